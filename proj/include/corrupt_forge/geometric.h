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

#ifndef CORRUPT_FORGE_GEOMETRIC_H_
#define CORRUPT_FORGE_GEOMETRIC_H_

#include <array>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "corrupt_forge/random.h"
#include "corrupt_forge/severity.h"
#include "corrupt_forge/types.h"

namespace corrupt_forge {

// Keeps each point independently with probability 1 - p, in order.
PointCloud ReducePoints(const PointCloud& cloud, double p, RandomStream& stream);

// Keeps the points whose ring is a multiple of 32 / beams. Throws UsageError
// if `beams` does not divide 32 and DataError on a ring outside [0, 31].
PointCloud ReduceBeams(const PointCloud& cloud, int beams);

// Adds independent N(0, sigma) offsets to x, y and z of every point.
PointCloud JitterPoints(const PointCloud& cloud, double sigma,
                        RandomStream& stream);

struct MotionBlurParams {
  double sigma_t = 0.0;         // meters
  double px_per_meter = 150.0;  // blur length scale

  int KernelLength() const;
  static MotionBlurParams FromParamSet(const ParamSet& params);
};

// Averages `length` bilinear samples spaced one pixel apart along the
// direction `angle` (radians, image x axis towards y), centered on each
// pixel. Borders replicate edge pixels. length <= 1 returns the input.
ImageBuffer BlurImageDirectional(const ImageBuffer& image, int length,
                                 double angle);

// Directional blur with length round(px_per_meter * sigma_t) and a direction
// drawn uniformly from [0, pi).
ImageBuffer BlurImage(const ImageBuffer& image, const MotionBlurParams& params,
                      RandomStream& stream);

struct SpatialMisalignmentParams {
  double angle_deg = 0.0;
  double probability = 0.0;
  double translation_m = 0.0;

  static SpatialMisalignmentParams FromParamSet(const ParamSet& params);
};

struct SpatialMisalignmentResult {
  PointCloud cloud;
  bool applied = false;
  RigidPerturbation perturbation;
};

// q = R * p + t for every point.
PointCloud ApplyRigidPerturbation(const PointCloud& cloud,
                                  const RigidPerturbation& perturbation);

// With probability p rotates the cloud by exactly angle_deg about a uniform
// random axis and shifts it by translation_m along a uniform random
// direction.
SpatialMisalignmentResult MisalignSpatial(const PointCloud& cloud,
                                          const SpatialMisalignmentParams& params,
                                          RandomStream& stream);

// Image the camera would record after rotating by `rotation` (camera frame),
// i.e. the warp x_src = K R K^-1 x_dst. Pixels looking outside the original
// field of view are black.
ImageBuffer WarpImageByRotation(const ImageBuffer& image,
                                const Eigen::Matrix3d& intrinsic,
                                const Eigen::Matrix3d& rotation);

struct CameraMisalignmentResult {
  ImageBuffer image;
  bool applied = false;
  RigidPerturbation perturbation;  // rotation only
};

// Camera-side counterpart of MisalignSpatial. Translation cannot be rendered
// without scene depth, so only the rotation is applied.
CameraMisalignmentResult MisalignCamera(const ImageBuffer& image,
                                        const Eigen::Matrix3d& intrinsic,
                                        const SpatialMisalignmentParams& params,
                                        RandomStream& stream);

// Sensor slots considered by temporal misalignment: the LiDAR, then the
// cameras in kCameraNames order.
inline constexpr std::size_t kNumSensors = 1 + kNumCameras;
inline constexpr std::string_view kLidarTag = "LIDAR_TOP";
std::string_view SensorTag(std::size_t sensor);

using StreamFactory =
    std::function<RandomStream(std::string_view sample_id, std::string_view sensor)>;

// frozen[i][sensor] is true when sample i carries its predecessor's frame
// for that sensor.
struct FreezePlan {
  std::vector<std::array<bool, kNumSensors>> frozen;
};

// Draws one Bernoulli(p) per (sample, sensor) from that slot's own stream.
// Samples without a predecessor in the scene are never frozen.
FreezePlan PlanTemporalMisalignment(std::span<const std::string> sample_ids,
                                    std::span<const bool> has_predecessor,
                                    double p, const StreamFactory& streams);

// Replaces frozen sensor frames by the clean predecessor's frame. `scene`
// must hold one scene; predecessors are resolved through prev_sample_id.
std::vector<SampleBundle> MisalignTemporal(const std::vector<SampleBundle>& scene,
                                           double p,
                                           const StreamFactory& streams,
                                           FreezePlan* plan_out = nullptr);

}  // namespace corrupt_forge

#endif  // CORRUPT_FORGE_GEOMETRIC_H_
