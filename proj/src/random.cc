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

#include "corrupt_forge/random.h"

#include <sodium.h>

#include <array>
#include <string>

namespace corrupt_forge {
namespace {

void AppendField(std::string& out, std::string_view field) {
  const auto size = static_cast<std::uint32_t>(field.size());
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>(size >> (8 * i)));
  out.append(field);
}

}  // namespace

RandomStream DeriveStream(std::uint64_t global_seed, std::string_view sample_id,
                          CorruptionKind kind, std::string_view sensor_tag) {
  [[maybe_unused]] static const int sodium_ready = sodium_init();
  std::string message;
  for (int i = 0; i < 8; ++i) {
    message.push_back(static_cast<char>(global_seed >> (8 * i)));
  }
  AppendField(message, sample_id);
  AppendField(message, KindName(kind));
  AppendField(message, sensor_tag);

  std::array<unsigned char, 32> digest{};
  crypto_generichash(digest.data(), digest.size(),
                     reinterpret_cast<const unsigned char*>(message.data()),
                     message.size(), nullptr, 0);

  std::array<std::uint32_t, 8> words{};
  for (std::size_t w = 0; w < words.size(); ++w) {
    words[w] = static_cast<std::uint32_t>(digest[4 * w]) |
               static_cast<std::uint32_t>(digest[4 * w + 1]) << 8 |
               static_cast<std::uint32_t>(digest[4 * w + 2]) << 16 |
               static_cast<std::uint32_t>(digest[4 * w + 3]) << 24;
  }
  std::seed_seq seq(words.begin(), words.end());
  return RandomStream(seq);
}

double RandomStream::Uniform() {
  // 53 random mantissa bits.
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RandomStream::Uniform(double lo, double hi) {
  return lo + (hi - lo) * Uniform();
}

double RandomStream::Normal(double mean, double stddev) {
  std::normal_distribution<double> dist(mean, stddev);
  return dist(engine_);
}

std::int64_t RandomStream::Poisson(double mean) {
  if (!(mean > 0.0)) return 0;
  std::poisson_distribution<std::int64_t> dist(mean);
  return dist(engine_);
}

Eigen::Vector3d RandomStream::UnitVector() {
  while (true) {
    Eigen::Vector3d v(Normal(0, 1), Normal(0, 1), Normal(0, 1));
    const double norm = v.norm();
    if (norm > 1e-12) return v / norm;
  }
}

}  // namespace corrupt_forge
