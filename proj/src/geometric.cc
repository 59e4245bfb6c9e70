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

#include "corrupt_forge/geometric.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <string>

#include "corrupt_forge/errors.h"

namespace corrupt_forge {
namespace {

void CheckProbability(double p, std::string_view what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw UsageError(std::string(what) + " probability must lie in [0, 1]");
  }
}

// Bilinear lookup with edge replication; (x, y) in pixel-index coordinates.
double SampleClamped(const ImageBuffer& image, double x, double y, int c) {
  const int w = image.width();
  const int h = image.height();
  x = std::clamp(x, 0.0, static_cast<double>(w - 1));
  y = std::clamp(y, 0.0, static_cast<double>(h - 1));
  const int x0 = static_cast<int>(std::floor(x));
  const int y0 = static_cast<int>(std::floor(y));
  const int x1 = std::min(x0 + 1, w - 1);
  const int y1 = std::min(y0 + 1, h - 1);
  const double fx = x - x0;
  const double fy = y - y0;
  const double top = image.at(x0, y0, c) * (1 - fx) + image.at(x1, y0, c) * fx;
  const double bottom =
      image.at(x0, y1, c) * (1 - fx) + image.at(x1, y1, c) * fx;
  return top * (1 - fy) + bottom * fy;
}

std::uint8_t ToByte(double value) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(value, 0.0, 255.0)));
}

}  // namespace

PointCloud ReducePoints(const PointCloud& cloud, double p,
                        RandomStream& stream) {
  CheckProbability(p, "drop");
  PointCloud out;
  out.points.reserve(static_cast<std::size_t>(cloud.size() * (1.0 - p)) + 16);
  for (const PointRecord& point : cloud.points) {
    if (!stream.Bernoulli(p)) out.points.push_back(point);
  }
  return out;
}

PointCloud ReduceBeams(const PointCloud& cloud, int beams) {
  if (beams < 1 || kNumRings % beams != 0) {
    throw UsageError("beam count " + std::to_string(beams) +
                     " does not divide 32");
  }
  const int stride = kNumRings / beams;
  PointCloud out;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const PointRecord& point = cloud.points[i];
    if (point.ring < 0 || point.ring >= kNumRings) {
      throw DataError("point " + std::to_string(i) + ": ring " +
                      std::to_string(point.ring) + " outside [0, 31]");
    }
    if (point.ring % stride == 0) out.points.push_back(point);
  }
  return out;
}

PointCloud JitterPoints(const PointCloud& cloud, double sigma,
                        RandomStream& stream) {
  if (!(sigma >= 0.0)) throw UsageError("jitter sigma must be non-negative");
  PointCloud out = cloud;
  if (sigma == 0.0) return out;
  for (PointRecord& point : out.points) {
    point.x += stream.Normal(0.0, sigma);
    point.y += stream.Normal(0.0, sigma);
    point.z += stream.Normal(0.0, sigma);
  }
  return out;
}

int MotionBlurParams::KernelLength() const {
  return static_cast<int>(std::lround(px_per_meter * sigma_t));
}

MotionBlurParams MotionBlurParams::FromParamSet(const ParamSet& params) {
  return {params.Get(param::kSigmaT), params.Get(param::kBlurPxPerM)};
}

ImageBuffer BlurImageDirectional(const ImageBuffer& image, int length,
                                 double angle) {
  if (length <= 1) return image;
  const double dx = std::cos(angle);
  const double dy = std::sin(angle);
  std::vector<double> offsets(length);
  for (int j = 0; j < length; ++j) offsets[j] = j - (length - 1) / 2.0;

  ImageBuffer out(image.width(), image.height());
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      for (int c = 0; c < 3; ++c) {
        double sum = 0.0;
        for (double t : offsets) {
          sum += SampleClamped(image, x + t * dx, y + t * dy, c);
        }
        out.at(x, y, c) = ToByte(sum / length);
      }
    }
  }
  return out;
}

ImageBuffer BlurImage(const ImageBuffer& image, const MotionBlurParams& params,
                      RandomStream& stream) {
  if (!(params.sigma_t >= 0.0)) {
    throw UsageError("motion blur sigma must be non-negative");
  }
  const double angle = stream.Uniform(0.0, M_PI);
  return BlurImageDirectional(image, params.KernelLength(), angle);
}

SpatialMisalignmentParams SpatialMisalignmentParams::FromParamSet(
    const ParamSet& params) {
  return {params.Get(param::kAngleDeg), params.Get(param::kProbability),
          params.Get(param::kTranslation)};
}

PointCloud ApplyRigidPerturbation(const PointCloud& cloud,
                                  const RigidPerturbation& perturbation) {
  const Eigen::Matrix3d rot = perturbation.Rotation();
  PointCloud out = cloud;
  for (PointRecord& point : out.points) {
    const Eigen::Vector3d q =
        rot * Eigen::Vector3d(point.x, point.y, point.z) +
        perturbation.translation;
    point.x = q.x();
    point.y = q.y();
    point.z = q.z();
  }
  return out;
}

SpatialMisalignmentResult MisalignSpatial(
    const PointCloud& cloud, const SpatialMisalignmentParams& params,
    RandomStream& stream) {
  CheckProbability(params.probability, "misalignment");
  if (!(params.angle_deg >= 0.0) || !(params.translation_m >= 0.0)) {
    throw UsageError("misalignment angle and translation must be >= 0");
  }
  SpatialMisalignmentResult result;
  result.applied = stream.Bernoulli(params.probability);
  if (!result.applied) {
    result.cloud = cloud;
    return result;
  }
  result.perturbation.axis = stream.UnitVector();
  result.perturbation.angle_deg = params.angle_deg;
  result.perturbation.translation = stream.UnitVector() * params.translation_m;
  result.cloud = ApplyRigidPerturbation(cloud, result.perturbation);
  return result;
}

ImageBuffer WarpImageByRotation(const ImageBuffer& image,
                                const Eigen::Matrix3d& intrinsic,
                                const Eigen::Matrix3d& rotation) {
  const Eigen::Matrix3d warp = intrinsic * rotation * intrinsic.inverse();
  const int w = image.width();
  const int h = image.height();
  ImageBuffer out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const Eigen::Vector3d src = warp * Eigen::Vector3d(x + 0.5, y + 0.5, 1.0);
      if (src.z() <= 0.0) continue;
      // Back to pixel-index coordinates for the bilinear lookup.
      const double sx = src.x() / src.z() - 0.5;
      const double sy = src.y() / src.z() - 0.5;
      if (sx < -0.5 || sy < -0.5 || sx > w - 0.5 || sy > h - 0.5) continue;
      for (int c = 0; c < 3; ++c) {
        out.at(x, y, c) = ToByte(SampleClamped(image, sx, sy, c));
      }
    }
  }
  return out;
}

CameraMisalignmentResult MisalignCamera(const ImageBuffer& image,
                                        const Eigen::Matrix3d& intrinsic,
                                        const SpatialMisalignmentParams& params,
                                        RandomStream& stream) {
  CheckProbability(params.probability, "misalignment");
  CameraMisalignmentResult result;
  result.applied = stream.Bernoulli(params.probability);
  if (!result.applied) {
    result.image = image;
    return result;
  }
  result.perturbation.axis = stream.UnitVector();
  result.perturbation.angle_deg = params.angle_deg;
  result.image =
      WarpImageByRotation(image, intrinsic, result.perturbation.Rotation());
  return result;
}

std::string_view SensorTag(std::size_t sensor) {
  return sensor == 0 ? kLidarTag : kCameraNames.at(sensor - 1);
}

FreezePlan PlanTemporalMisalignment(std::span<const std::string> sample_ids,
                                    std::span<const bool> has_predecessor,
                                    double p, const StreamFactory& streams) {
  CheckProbability(p, "frozen-frame");
  if (sample_ids.size() != has_predecessor.size()) {
    throw UsageError("sample id and predecessor lists differ in length");
  }
  FreezePlan plan;
  plan.frozen.resize(sample_ids.size());
  for (std::size_t i = 0; i < sample_ids.size(); ++i) {
    if (!has_predecessor[i]) continue;
    for (std::size_t sensor = 0; sensor < kNumSensors; ++sensor) {
      RandomStream stream = streams(sample_ids[i], SensorTag(sensor));
      plan.frozen[i][sensor] = stream.Bernoulli(p);
    }
  }
  return plan;
}

std::vector<SampleBundle> MisalignTemporal(
    const std::vector<SampleBundle>& scene, double p,
    const StreamFactory& streams, FreezePlan* plan_out) {
  std::map<std::string_view, std::size_t> index;
  for (std::size_t i = 0; i < scene.size(); ++i) {
    index.emplace(scene[i].sample_id, i);
  }
  std::vector<std::string> ids;
  std::vector<std::size_t> prev(scene.size(), 0);
  auto has_prev = std::make_unique<bool[]>(scene.size());
  for (std::size_t i = 0; i < scene.size(); ++i) {
    ids.push_back(scene[i].sample_id);
    if (scene[i].prev_sample_id) {
      const auto it = index.find(*scene[i].prev_sample_id);
      if (it != index.end()) {
        prev[i] = it->second;
        has_prev[i] = true;
      }
    }
  }

  FreezePlan plan = PlanTemporalMisalignment(
      ids, std::span<const bool>(has_prev.get(), scene.size()), p, streams);

  std::vector<SampleBundle> out = scene;
  for (std::size_t i = 0; i < scene.size(); ++i) {
    const SampleBundle& clean_prev = scene[prev[i]];
    if (plan.frozen[i][0]) out[i].lidar = clean_prev.lidar;
    for (int c = 0; c < kNumCameras; ++c) {
      if (plan.frozen[i][1 + c]) {
        out[i].cameras[c].frame = clean_prev.cameras[c].frame;
      }
    }
  }
  if (plan_out) *plan_out = std::move(plan);
  return out;
}

}  // namespace corrupt_forge
