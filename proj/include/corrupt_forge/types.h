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

#ifndef CORRUPT_FORGE_TYPES_H_
#define CORRUPT_FORGE_TYPES_H_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace corrupt_forge {

inline constexpr int kNumRings = 32;
inline constexpr int kNumCameras = 6;

// The ten corruption types of the benchmark, in catalog order.
enum class CorruptionKind {
  kDarkness,
  kBrightness,
  kPointsReducing,
  kTemporalMisalignment,
  kSpatialMisalignment,
  kMotionBlur,
  kMissingCamera,
  kBeamsReducing,
  kFog,
  kSnow,
};

inline constexpr std::array<CorruptionKind, 10> kAllKinds = {
    CorruptionKind::kDarkness,
    CorruptionKind::kBrightness,
    CorruptionKind::kPointsReducing,
    CorruptionKind::kTemporalMisalignment,
    CorruptionKind::kSpatialMisalignment,
    CorruptionKind::kMotionBlur,
    CorruptionKind::kMissingCamera,
    CorruptionKind::kBeamsReducing,
    CorruptionKind::kFog,
    CorruptionKind::kSnow,
};

// Which sensors a corruption touches.
enum class Modality { kCamera, kLidar, kBoth };

std::string_view KindName(CorruptionKind kind);
std::optional<CorruptionKind> ParseKind(std::string_view name);
Modality ModalityOf(CorruptionKind kind);
// Short letter code: "C", "L" or "LC".
std::string_view ModalityCode(Modality modality);

struct PointRecord {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double intensity = 0.0;  // [0, 255]
  int ring = 0;            // [0, 31]

  double Range() const;
  bool operator==(const PointRecord&) const = default;
};

struct PointCloud {
  std::vector<PointRecord> points;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  bool operator==(const PointCloud&) const = default;
};

// Throws DataError on a non-finite coordinate, an out-of-range intensity or
// an out-of-range ring index.
void ValidatePointCloud(const PointCloud& cloud);

// Row-major interleaved 8-bit RGB raster.
class ImageBuffer {
 public:
  ImageBuffer() = default;
  // Zero-filled image. Throws DataError on a non-positive size.
  ImageBuffer(int width, int height);
  ImageBuffer(int width, int height, std::vector<std::uint8_t> pixels);

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return pixels_.empty(); }

  std::uint8_t& at(int x, int y, int c) {
    return pixels_[(static_cast<std::size_t>(y) * width_ + x) * 3 + c];
  }
  std::uint8_t at(int x, int y, int c) const {
    return pixels_[(static_cast<std::size_t>(y) * width_ + x) * 3 + c];
  }

  const std::vector<std::uint8_t>& pixels() const { return pixels_; }
  std::vector<std::uint8_t>& pixels() { return pixels_; }

  bool operator==(const ImageBuffer&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> pixels_;
};

// Sensor-to-vehicle rigid transform, plus the pinhole matrix for cameras.
struct Calibration {
  Eigen::Quaterniond rotation = Eigen::Quaterniond::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();
  std::optional<Eigen::Matrix3d> intrinsic;

  // Throws CalibrationError if the quaternion is not unit length or the
  // intrinsic matrix is malformed.
  void Validate() const;
  bool operator==(const Calibration& other) const;
};

inline constexpr std::array<std::string_view, kNumCameras> kCameraNames = {
    "CAM_FRONT",     "CAM_FRONT_RIGHT", "CAM_FRONT_LEFT",
    "CAM_BACK",      "CAM_BACK_LEFT",   "CAM_BACK_RIGHT",
};

// Index into kCameraNames, or nullopt for an unknown name.
std::optional<int> CameraIndex(std::string_view name);

struct CameraSlot {
  std::optional<ImageBuffer> frame;  // nullopt is the Absent marker
  Calibration calib;
};

// Rigid extrinsic error: rotate by `angle_deg` about `axis`, then translate.
struct RigidPerturbation {
  Eigen::Vector3d axis = Eigen::Vector3d::UnitZ();  // unit length
  double angle_deg = 0.0;                           // >= 0
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  Eigen::Matrix3d Rotation() const;
  bool operator==(const RigidPerturbation&) const = default;
};

// One timestamped multi-sensor sample with its payloads loaded.
struct SampleBundle {
  std::string sample_id;
  std::string scene_id;
  std::int64_t timestamp_us = 0;
  std::optional<std::string> prev_sample_id;
  PointCloud lidar;
  Calibration lidar_calib;
  std::array<CameraSlot, kNumCameras> cameras;
};

}  // namespace corrupt_forge

#endif  // CORRUPT_FORGE_TYPES_H_
