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

#ifndef CORRUPT_FORGE_WEATHER_H_
#define CORRUPT_FORGE_WEATHER_H_

#include <vector>

#include "corrupt_forge/dataio.h"
#include "corrupt_forge/random.h"
#include "corrupt_forge/severity.h"
#include "corrupt_forge/types.h"

namespace corrupt_forge {

// Homogeneous fog from the meteorological optical range: attenuation
// alpha = ln(20) / V, the 5% contrast convention.
struct FogParams {
  double visibility_m = 300.0;  // +inf disables fog
  double airlight = 0.8;          // normalized luminance the image fades to
  double backscatter_gain = 0.5;  // fog return strength
  double noise_floor = 2.0;       // LiDAR detection threshold, intensity units

  double Attenuation() const;
  static FogParams FromParamSet(const ParamSet& params);
};

// Falling snow from a snowfall rate. Particle density is
// density_per_rate * rate particles per cubic meter.
struct SnowParams {
  double rate_mm_h = 5.0;
  double density_per_rate = 0.25;
  double beam_area_m2 = 1e-3;
  double wet_ground = 0.55;
  double veil_weight = 0.15;
  double veil_level = 0.75;

  double Density() const { return density_per_rate * rate_mm_h; }
  static SnowParams FromParamSet(const ParamSet& params);
};

// What happened to each input point, in input order.
enum class PointFate { kKept, kReplaced, kDropped };

struct WeatherLidarResult {
  PointCloud cloud;              // kept and replaced points, input order
  std::vector<PointFate> fates;  // one per input point
};

inline constexpr double kReferenceIntensity = 255.0;
inline constexpr double kMinFogReturnRange = 2.0;

// Single-scatter fog. Every hard return is attenuated two-way; a backscatter
// return from a uniform range in [2 m, min(R, V)) replaces it when stronger
// and above the noise floor. Returns pushed below the floor by the fog are
// lost.
WeatherLidarResult FogLidar(const PointCloud& cloud, const FogParams& params,
                            RandomStream& stream);

// Koschmieder blend of one normalized channel value at depth `depth_m`.
double FogPixel(double value, double depth_m, const FogParams& params);

// Pixels with Unknown depth are treated as lying at the visibility range.
// Throws UsageError if the depth map size differs from the image.
ImageBuffer FogCamera(const ImageBuffer& image, const DepthMap& depth,
                      const FogParams& params);

inline constexpr double kWetGroundBand = 0.3;  // meters above ground

// 2nd percentile of z; 0 for an empty cloud.
double EstimateGroundHeight(const PointCloud& cloud);

WeatherLidarResult SnowLidar(const PointCloud& cloud, const SnowParams& params,
                             RandomStream& stream);

// Number of streaks SnowCamera draws on a width x height frame.
int SnowStreakCount(const SnowParams& params, int width, int height);

// Anti-aliased falling-snow streaks followed by a global veil
// out = (1 - veil_weight) * in + veil_weight * veil_level.
ImageBuffer SnowCamera(const ImageBuffer& image, const SnowParams& params,
                       RandomStream& stream);

}  // namespace corrupt_forge

#endif  // CORRUPT_FORGE_WEATHER_H_
