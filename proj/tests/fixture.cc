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

#include "fixture.h"

#include <sodium.h>

#include <cmath>
#include <stdexcept>

#include "corrupt_forge/dataio.h"

namespace corrupt_forge::testing {
namespace fs = std::filesystem;

TempDir::TempDir() {
  std::random_device rd;
  for (int attempt = 0; attempt < 100; ++attempt) {
    const fs::path candidate = fs::temp_directory_path() /
                               ("corrupt_forge_test_" + std::to_string(rd()));
    if (fs::create_directory(candidate)) {
      path_ = candidate;
      return;
    }
  }
  throw std::runtime_error("cannot create a temporary directory");
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

Calibration FixtureCameraCalib(int camera) {
  static constexpr double kYawDeg[kNumCameras] = {0, -55, 55, 180, 110, -110};
  const double yaw = kYawDeg[camera] * M_PI / 180.0;
  // Camera axes (x right, y down, z forward) in the vehicle frame.
  Eigen::Matrix3d axes;
  axes.col(2) = Eigen::Vector3d(std::cos(yaw), std::sin(yaw), 0.0);
  axes.col(0) = Eigen::Vector3d(std::sin(yaw), -std::cos(yaw), 0.0);
  axes.col(1) = Eigen::Vector3d(0.0, 0.0, -1.0);
  Calibration calib;
  calib.rotation = Eigen::Quaterniond(axes).normalized();
  calib.translation = Eigen::Vector3d(0.0, 0.0, 1.5);
  Eigen::Matrix3d k = Eigen::Matrix3d::Identity();
  k(0, 0) = 40.0;
  k(1, 1) = 40.0;
  k(0, 2) = kFixtureWidth / 2.0;
  k(1, 2) = kFixtureHeight / 2.0;
  calib.intrinsic = k;
  return calib;
}

Calibration FixtureLidarCalib() {
  Calibration calib;
  calib.rotation = Eigen::Quaterniond::Identity();
  calib.translation = Eigen::Vector3d(0.0, 0.0, 1.8);
  return calib;
}

PointCloud MakeSweep(std::mt19937_64& rng, int azimuths) {
  std::uniform_real_distribution<double> wall(15.0, 40.0);
  std::uniform_real_distribution<double> jitter(-0.02, 0.02);
  std::uniform_real_distribution<double> intensity(5.0, 100.0);
  PointCloud cloud;
  cloud.points.reserve(static_cast<std::size_t>(kNumRings) * azimuths);
  for (int a = 0; a < azimuths; ++a) {
    const double az = 2.0 * M_PI * a / azimuths;
    const double wall_range = wall(rng);
    for (int ring = 0; ring < kNumRings; ++ring) {
      const double elev =
          (-30.0 + 40.0 * ring / (kNumRings - 1)) * M_PI / 180.0;
      double range = wall_range;
      if (elev < 0.0) range = std::min(range, 1.8 / std::sin(-elev));
      range += jitter(rng);
      // Stored as float32 on disk; keep the in-memory copy representable.
      const float x = static_cast<float>(range * std::cos(elev) * std::cos(az));
      const float y = static_cast<float>(range * std::cos(elev) * std::sin(az));
      const float z = static_cast<float>(range * std::sin(elev));
      cloud.points.push_back({x, y, z, std::round(intensity(rng)), ring});
    }
  }
  return cloud;
}

ImageBuffer MakeTexture(std::mt19937_64& rng, int width, int height) {
  std::uniform_int_distribution<int> noise(-6, 6);
  ImageBuffer image(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const bool check = ((x / 4) + (y / 4)) % 2 == 0;
      for (int c = 0; c < 3; ++c) {
        const int base = 40 + (120 * x) / width + (60 * y) / height +
                         (check ? 40 : 0) + 10 * c;
        image.at(x, y, c) =
            static_cast<std::uint8_t>(std::clamp(base + noise(rng), 0, 255));
      }
    }
  }
  return image;
}

fs::path WriteFixtureDataset(const fs::path& root,
                             const FixtureOptions& options) {
  std::mt19937_64 rng(options.seed);
  DatasetManifest manifest;
  manifest.dataset_root = root;
  for (int scene = 0; scene < options.scenes; ++scene) {
    std::optional<std::string> prev;
    for (int k = 0; k < options.samples_per_scene; ++k) {
      SampleDescriptor s;
      s.scene_id = "scene-" + std::to_string(scene);
      s.sample_id = s.scene_id + "-" + std::to_string(k);
      s.timestamp_us = 1'000'000LL * scene + 500'000LL * k;
      s.prev_sample_id = prev;
      s.lidar.path = "lidar/" + s.sample_id + ".bin";
      s.lidar.calib = FixtureLidarCalib();
      WritePointCloud(MakeSweep(rng, options.azimuths), root / s.lidar.path);
      for (int i = 0; i < kNumCameras; ++i) {
        CameraEntry& cam = s.cameras[i];
        cam.path = std::string(kCameraNames[i]) + "/" + s.sample_id + ".png";
        cam.calib = FixtureCameraCalib(i);
        WritePng(MakeTexture(rng), root / cam.path);
      }
      prev = s.sample_id;
      manifest.samples.push_back(std::move(s));
    }
  }
  const fs::path file = root / std::string(kManifestFileName);
  WriteManifest(manifest, file);
  return file;
}

std::map<std::string, std::string> HashTree(const fs::path& root) {
  if (sodium_init() < 0) throw std::runtime_error("libsodium init failed");
  std::map<std::string, std::string> hashes;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    const auto bytes = ReadFileBytes(entry.path());
    unsigned char digest[crypto_generichash_BYTES];
    crypto_generichash(digest, sizeof digest, bytes.data(), bytes.size(),
                       nullptr, 0);
    char hex[2 * crypto_generichash_BYTES + 1];
    sodium_bin2hex(hex, sizeof hex, digest, sizeof digest);
    hashes[fs::relative(entry.path(), root).generic_string()] = hex;
  }
  return hashes;
}

}  // namespace corrupt_forge::testing
