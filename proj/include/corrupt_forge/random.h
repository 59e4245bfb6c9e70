// Copyright 2026 The corrupt_forge Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CORRUPT_FORGE_RANDOM_H_
#define CORRUPT_FORGE_RANDOM_H_

#include <cstdint>
#include <random>
#include <string_view>

#include "corrupt_forge/types.h"

namespace corrupt_forge {

class RandomStream;

// Builds the stream for one (seed, sample, corruption, sensor) tuple. The
// state is a BLAKE2b digest of the canonical encoding of all four inputs,
// so results never depend on which worker processes a sample or in what
// order.
RandomStream DeriveStream(std::uint64_t global_seed, std::string_view sample_id,
                          CorruptionKind kind, std::string_view sensor_tag);

// Single-owner deterministic generator. Not thread safe; never share one
// between concurrent tasks.
class RandomStream {
 public:
  RandomStream(const RandomStream&) = delete;
  RandomStream& operator=(const RandomStream&) = delete;
  RandomStream(RandomStream&&) = default;
  RandomStream& operator=(RandomStream&&) = default;

  std::uint64_t NextU64() { return engine_(); }
  // [0, 1)
  double Uniform();
  // [lo, hi)
  double Uniform(double lo, double hi);
  double Normal(double mean, double stddev);
  std::int64_t Poisson(double mean);
  bool Bernoulli(double p) { return Uniform() < p; }
  // Uniformly distributed unit 3-vector.
  Eigen::Vector3d UnitVector();

 private:
  friend RandomStream DeriveStream(std::uint64_t, std::string_view,
                                   CorruptionKind, std::string_view);
  explicit RandomStream(std::seed_seq& seq) : engine_(seq) {}

  std::mt19937_64 engine_;
};

}  // namespace corrupt_forge

#endif  // CORRUPT_FORGE_RANDOM_H_
