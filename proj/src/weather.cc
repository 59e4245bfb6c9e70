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

#include "corrupt_forge/weather.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "corrupt_forge/errors.h"

namespace corrupt_forge {
namespace {

PointRecord MoveAlongRay(const PointRecord& p, double range, double new_range) {
  const double scale = new_range / range;
  PointRecord out = p;
  out.x *= scale;
  out.y *= scale;
  out.z *= scale;
  return out;
}

double DistanceToSegment(double px, double py, double ax, double ay, double bx,
                         double by) {
  const double vx = bx - ax;
  const double vy = by - ay;
  const double len2 = vx * vx + vy * vy;
  double t = len2 > 0.0 ? ((px - ax) * vx + (py - ay) * vy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const double dx = px - (ax + t * vx);
  const double dy = py - (ay + t * vy);
  return std::sqrt(dx * dx + dy * dy);
}

}  // namespace

double FogParams::Attenuation() const {
  if (std::isinf(visibility_m)) return 0.0;
  return std::log(20.0) / visibility_m;
}

FogParams FogParams::FromParamSet(const ParamSet& params) {
  FogParams p;
  p.visibility_m = params.Get(param::kVisibility);
  p.airlight = params.Get(param::kAirlight);
  p.backscatter_gain = params.Get(param::kBackscatterGain);
  p.noise_floor = params.Get(param::kNoiseFloor);
  return p;
}

SnowParams SnowParams::FromParamSet(const ParamSet& params) {
  SnowParams p;
  p.rate_mm_h = params.Get(param::kRate);
  p.density_per_rate = params.Get(param::kDensityPerRate);
  p.beam_area_m2 = params.Get(param::kBeamArea);
  p.wet_ground = params.Get(param::kWetGround);
  p.veil_weight = params.Get(param::kVeilWeight);
  p.veil_level = params.Get(param::kVeilLevel);
  return p;
}

WeatherLidarResult FogLidar(const PointCloud& cloud, const FogParams& params,
                            RandomStream& stream) {
  if (!(params.visibility_m > 0.0)) {
    throw UsageError("fog visibility must be positive");
  }
  const double alpha = params.Attenuation();
  WeatherLidarResult result;
  result.cloud.points.reserve(cloud.size());
  result.fates.reserve(cloud.size());

  for (const PointRecord& p : cloud.points) {
    const double range = p.Range();
    if (range <= 0.0) {
      result.cloud.points.push_back(p);
      result.fates.push_back(PointFate::kKept);
      continue;
    }
    const double hard = p.intensity * std::exp(-2.0 * alpha * range);

    double fog = 0.0;
    double fog_range = 0.0;
    const double far = std::min(range, params.visibility_m);
    if (params.backscatter_gain > 0.0 && far > kMinFogReturnRange) {
      fog_range = stream.Uniform(kMinFogReturnRange, far);
      fog = params.backscatter_gain * kReferenceIntensity *
            std::exp(-2.0 * alpha * fog_range) / (fog_range * fog_range);
    }

    if (fog > hard && fog > params.noise_floor) {
      PointRecord moved = MoveAlongRay(p, range, fog_range);
      moved.intensity = std::min(fog, kReferenceIntensity);
      result.cloud.points.push_back(moved);
      result.fates.push_back(PointFate::kReplaced);
    } else if (hard >= params.noise_floor || p.intensity < params.noise_floor) {
      // Clean returns already under the floor survive.
      PointRecord kept = p;
      kept.intensity = hard;
      result.cloud.points.push_back(kept);
      result.fates.push_back(PointFate::kKept);
    } else {
      result.fates.push_back(PointFate::kDropped);
    }
  }
  return result;
}

double FogPixel(double value, double depth_m, const FogParams& params) {
  const double alpha = params.Attenuation();
  const double t = alpha == 0.0 ? 1.0 : std::exp(-alpha * depth_m);
  return value * t + params.airlight * (1.0 - t);
}

ImageBuffer FogCamera(const ImageBuffer& image, const DepthMap& depth,
                      const FogParams& params) {
  if (depth.width() != image.width() || depth.height() != image.height()) {
    throw UsageError("depth map is " + std::to_string(depth.width()) + "x" +
                     std::to_string(depth.height()) + " but image is " +
                     std::to_string(image.width()) + "x" +
                     std::to_string(image.height()));
  }
  ImageBuffer out(image.width(), image.height());
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      const double d = depth.At(x, y).value_or(params.visibility_m);
      for (int c = 0; c < 3; ++c) {
        const double v = FogPixel(image.at(x, y, c) / 255.0, d, params);
        out.at(x, y, c) = static_cast<std::uint8_t>(
            std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
      }
    }
  }
  return out;
}

double EstimateGroundHeight(const PointCloud& cloud) {
  if (cloud.empty()) return 0.0;
  std::vector<double> z;
  z.reserve(cloud.size());
  for (const PointRecord& p : cloud.points) z.push_back(p.z);
  const auto k = static_cast<std::size_t>(0.02 * (z.size() - 1));
  std::nth_element(z.begin(), z.begin() + k, z.end());
  return z[k];
}

WeatherLidarResult SnowLidar(const PointCloud& cloud, const SnowParams& params,
                             RandomStream& stream) {
  if (!(params.rate_mm_h >= 0.0)) {
    throw UsageError("snowfall rate must be non-negative");
  }
  const double density = params.Density();
  const bool snowing = params.rate_mm_h > 0.0 && density > 0.0;
  const double ground = EstimateGroundHeight(cloud);

  WeatherLidarResult result;
  result.cloud.points.reserve(cloud.size());
  result.fates.reserve(cloud.size());
  for (const PointRecord& p : cloud.points) {
    const double range = p.Range();
    const double hits_mean = density * range * params.beam_area_m2;
    const double attenuated = p.intensity * std::exp(-0.5 * hits_mean);

    if (snowing && range > 1.0 && stream.Poisson(hits_mean) >= 1) {
      const double particle_range = stream.Uniform(1.0, range);
      const double radius_mm = stream.Uniform(1.0, 4.0);
      const double particle = 0.6 * kReferenceIntensity *
                              std::exp(-particle_range / 40.0) *
                              (radius_mm / 4.0);
      if (particle > attenuated) {
        PointRecord moved = MoveAlongRay(p, range, particle_range);
        moved.intensity = particle;
        result.cloud.points.push_back(moved);
        result.fates.push_back(PointFate::kReplaced);
        continue;
      }
    }
    PointRecord kept = p;
    kept.intensity = attenuated;
    if (snowing && p.z < ground + kWetGroundBand) {
      kept.intensity *= params.wet_ground;
    }
    result.cloud.points.push_back(kept);
    result.fates.push_back(PointFate::kKept);
  }
  return result;
}

int SnowStreakCount(const SnowParams& params, int width, int height) {
  return static_cast<int>(std::lround(0.002 * params.Density() *
                                      static_cast<double>(width) * height /
                                      100.0));
}

ImageBuffer SnowCamera(const ImageBuffer& image, const SnowParams& params,
                       RandomStream& stream) {
  const int w = image.width();
  const int h = image.height();
  std::vector<double> canvas(image.pixels().begin(), image.pixels().end());

  const int streaks = SnowStreakCount(params, w, h);
  constexpr double kMaxTilt = 20.0 * M_PI / 180.0;
  for (int s = 0; s < streaks; ++s) {
    const double cx = stream.Uniform(0.0, w);
    const double cy = stream.Uniform(0.0, h);
    const double length = stream.Uniform(5.0, 20.0);
    const double tilt = stream.Uniform(-kMaxTilt, kMaxTilt);
    const double level = 255.0 * stream.Uniform(0.8, 1.0);
    const double alpha = stream.Uniform(0.5, 0.9);

    const double hx = 0.5 * length * std::sin(tilt);
    const double hy = 0.5 * length * std::cos(tilt);
    const double ax = cx - hx, ay = cy - hy, bx = cx + hx, by = cy + hy;
    const int x0 = std::max(0, static_cast<int>(std::floor(std::min(ax, bx))) - 1);
    const int x1 = std::min(w - 1, static_cast<int>(std::ceil(std::max(ax, bx))) + 1);
    const int y0 = std::max(0, static_cast<int>(std::floor(std::min(ay, by))) - 1);
    const int y1 = std::min(h - 1, static_cast<int>(std::ceil(std::max(ay, by))) + 1);
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        const double coverage =
            1.0 - DistanceToSegment(x + 0.5, y + 0.5, ax, ay, bx, by);
        if (coverage <= 0.0) continue;
        const double a = alpha * coverage;
        for (int c = 0; c < 3; ++c) {
          double& v = canvas[(static_cast<std::size_t>(y) * w + x) * 3 + c];
          v = v * (1.0 - a) + level * a;
        }
      }
    }
  }

  ImageBuffer out(w, h);
  const double veil = params.veil_weight * params.veil_level * 255.0;
  for (std::size_t i = 0; i < canvas.size(); ++i) {
    const double v = (1.0 - params.veil_weight) * canvas[i] + veil;
    out.pixels()[i] =
        static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
  }
  return out;
}

}  // namespace corrupt_forge
