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

#include "corrupt_forge/types.h"

#include <cmath>
#include <string>

#include "corrupt_forge/errors.h"

namespace corrupt_forge {
namespace {

struct KindInfo {
  CorruptionKind kind;
  std::string_view name;
  Modality modality;
};

constexpr std::array<KindInfo, kAllKinds.size()> kKindInfo = {{
    {CorruptionKind::kDarkness, "darkness", Modality::kCamera},
    {CorruptionKind::kBrightness, "brightness", Modality::kCamera},
    {CorruptionKind::kPointsReducing, "points_reducing", Modality::kLidar},
    {CorruptionKind::kTemporalMisalignment, "temporal_misalignment",
     Modality::kBoth},
    {CorruptionKind::kSpatialMisalignment, "spatial_misalignment",
     Modality::kBoth},
    {CorruptionKind::kMotionBlur, "motion_blur", Modality::kBoth},
    {CorruptionKind::kMissingCamera, "missing_camera", Modality::kCamera},
    {CorruptionKind::kBeamsReducing, "beams_reducing", Modality::kLidar},
    {CorruptionKind::kFog, "fog", Modality::kBoth},
    {CorruptionKind::kSnow, "snow", Modality::kBoth},
}};

const KindInfo& Info(CorruptionKind kind) {
  return kKindInfo[static_cast<std::size_t>(kind)];
}

}  // namespace

std::string_view KindName(CorruptionKind kind) { return Info(kind).name; }

std::optional<CorruptionKind> ParseKind(std::string_view name) {
  for (const auto& info : kKindInfo) {
    if (info.name == name) return info.kind;
  }
  return std::nullopt;
}

Modality ModalityOf(CorruptionKind kind) { return Info(kind).modality; }

std::string_view ModalityCode(Modality modality) {
  switch (modality) {
    case Modality::kCamera:
      return "C";
    case Modality::kLidar:
      return "L";
    case Modality::kBoth:
      return "LC";
  }
  return "?";
}

double PointRecord::Range() const { return std::sqrt(x * x + y * y + z * z); }

void ValidatePointCloud(const PointCloud& cloud) {
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    const PointRecord& p = cloud.points[i];
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z)) {
      throw DataError("point " + std::to_string(i) +
                      ": non-finite coordinate");
    }
    if (!(p.intensity >= 0.0 && p.intensity <= 255.0)) {
      throw DataError("point " + std::to_string(i) + ": intensity " +
                      std::to_string(p.intensity) + " outside [0, 255]");
    }
    if (p.ring < 0 || p.ring >= kNumRings) {
      throw DataError("point " + std::to_string(i) + ": ring " +
                      std::to_string(p.ring) + " outside [0, 31]");
    }
  }
}

ImageBuffer::ImageBuffer(int width, int height)
    : ImageBuffer(width, height,
                  std::vector<std::uint8_t>(
                      width > 0 && height > 0
                          ? static_cast<std::size_t>(width) * height * 3
                          : 0)) {}

ImageBuffer::ImageBuffer(int width, int height,
                         std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  if (width <= 0 || height <= 0) {
    throw DataError("image size must be positive, got " +
                    std::to_string(width) + "x" + std::to_string(height));
  }
  if (pixels_.size() != static_cast<std::size_t>(width) * height * 3) {
    throw DataError("pixel buffer size does not match " +
                    std::to_string(width) + "x" + std::to_string(height) +
                    "x3");
  }
}

void Calibration::Validate() const {
  const double norm = rotation.coeffs().norm();
  if (!(std::abs(norm - 1.0) <= 1e-6)) {
    throw CalibrationError("rotation quaternion norm " +
                           std::to_string(norm) + " is not 1");
  }
  if (!translation.allFinite()) {
    throw CalibrationError("translation is not finite");
  }
  if (intrinsic) {
    const Eigen::Matrix3d& k = *intrinsic;
    if (!k.allFinite() || !(k(0, 0) > 0.0) || !(k(1, 1) > 0.0) ||
        k(1, 0) != 0.0 || k(2, 0) != 0.0 || k(2, 1) != 0.0 ||
        k(2, 2) != 1.0) {
      throw CalibrationError(
          "intrinsic matrix must be upper triangular with positive focal "
          "lengths and K[2][2] = 1");
    }
  }
}

bool Calibration::operator==(const Calibration& other) const {
  return rotation.coeffs() == other.rotation.coeffs() &&
         translation == other.translation && intrinsic == other.intrinsic;
}

Eigen::Matrix3d RigidPerturbation::Rotation() const {
  return Eigen::AngleAxisd(angle_deg * M_PI / 180.0, axis).toRotationMatrix();
}

std::optional<int> CameraIndex(std::string_view name) {
  for (int i = 0; i < kNumCameras; ++i) {
    if (kCameraNames[i] == name) return i;
  }
  return std::nullopt;
}

}  // namespace corrupt_forge
