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

#ifndef CORRUPT_FORGE_TESTS_FIXTURE_H_
#define CORRUPT_FORGE_TESTS_FIXTURE_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <string>

#include "corrupt_forge/types.h"

namespace corrupt_forge::testing {

// Removes itself on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline constexpr int kFixtureWidth = 64;
inline constexpr int kFixtureHeight = 48;

// Camera i looks outward at its nominal yaw from 1.5 m above the origin.
Calibration FixtureCameraCalib(int camera);
Calibration FixtureLidarCalib();

// One sweep: every ring x `azimuths` directions, hitting a ground plane
// 1.8 m below the sensor or a wall between 15 and 40 m away.
PointCloud MakeSweep(std::mt19937_64& rng, int azimuths = 100);

// Smooth gradient plus checkerboard plus mild noise.
ImageBuffer MakeTexture(std::mt19937_64& rng, int width = kFixtureWidth,
                        int height = kFixtureHeight);

struct FixtureOptions {
  int scenes = 2;
  int samples_per_scene = 3;
  int azimuths = 100;
  std::uint64_t seed = 7;
};

// Writes a dataset under `root` and returns the manifest path.
std::filesystem::path WriteFixtureDataset(const std::filesystem::path& root,
                                          const FixtureOptions& options = {});

// Relative path -> BLAKE2b hex digest for every regular file under `root`.
std::map<std::string, std::string> HashTree(const std::filesystem::path& root);

}  // namespace corrupt_forge::testing

#endif  // CORRUPT_FORGE_TESTS_FIXTURE_H_
