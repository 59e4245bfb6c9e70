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

#include "corrupt_forge/photometric.h"

#include <algorithm>
#include <cmath>

#include "corrupt_forge/errors.h"

namespace corrupt_forge {
namespace {

std::uint8_t Quantize(double normalized) {
  return static_cast<std::uint8_t>(
      std::lround(std::clamp(normalized, 0.0, 1.0) * 255.0));
}

}  // namespace

double DarknessParams::DimmingFactor() const {
  return std::pow(noise_intensity / dim_reference, dim_exponent);
}

DarknessParams DarknessParams::FromParamSet(const ParamSet& params) {
  DarknessParams p;
  p.noise_intensity = params.Get(param::kNoiseIntensity);
  p.dim_reference = params.Get(param::kDimReference);
  p.dim_exponent = params.Get(param::kDimExponent);
  p.read_noise = params.Get(param::kReadNoise);
  return p;
}

ImageBuffer ApplyDarkness(const ImageBuffer& image,
                          const DarknessParams& params, RandomStream& stream) {
  if (!(params.noise_intensity > 0.0)) {
    throw UsageError("darkness noise intensity must be positive");
  }
  const double s = params.noise_intensity;
  const double gain = params.DimmingFactor() * s;
  ImageBuffer out = image;
  for (std::uint8_t& channel : out.pixels()) {
    const double v = channel / 255.0;
    const double shot = static_cast<double>(stream.Poisson(v * gain)) / s;
    channel = Quantize(shot + stream.Normal(0.0, params.read_noise));
  }
  return out;
}

Hsv RgbToHsv(double r, double g, double b) {
  const double max = std::max({r, g, b});
  const double min = std::min({r, g, b});
  const double delta = max - min;
  Hsv hsv;
  hsv.v = max;
  hsv.s = max > 0.0 ? delta / max : 0.0;
  if (delta > 0.0) {
    double h;
    if (max == r) {
      h = (g - b) / delta;
    } else if (max == g) {
      h = 2.0 + (b - r) / delta;
    } else {
      h = 4.0 + (r - g) / delta;
    }
    h /= 6.0;
    if (h < 0.0) h += 1.0;
    hsv.h = h;
  }
  return hsv;
}

void HsvToRgb(const Hsv& hsv, double& r, double& g, double& b) {
  if (hsv.s <= 0.0) {
    r = g = b = hsv.v;
    return;
  }
  const double h6 = hsv.h * 6.0;
  const int sector = static_cast<int>(std::floor(h6)) % 6;
  const double f = h6 - std::floor(h6);
  const double p = hsv.v * (1.0 - hsv.s);
  const double q = hsv.v * (1.0 - hsv.s * f);
  const double t = hsv.v * (1.0 - hsv.s * (1.0 - f));
  switch (sector) {
    case 0: r = hsv.v; g = t; b = p; break;
    case 1: r = q; g = hsv.v; b = p; break;
    case 2: r = p; g = hsv.v; b = t; break;
    case 3: r = p; g = q; b = hsv.v; break;
    case 4: r = t; g = p; b = hsv.v; break;
    default: r = hsv.v; g = p; b = q; break;
  }
}

ImageBuffer ApplyBrightness(const ImageBuffer& image, double amount) {
  if (!(amount >= 0.0 && amount <= 1.0)) {
    throw UsageError("brightness amount must lie in [0, 1]");
  }
  ImageBuffer out = image;
  auto& px = out.pixels();
  for (std::size_t i = 0; i < px.size(); i += 3) {
    Hsv hsv = RgbToHsv(px[i] / 255.0, px[i + 1] / 255.0, px[i + 2] / 255.0);
    hsv.v += amount * (1.0 - hsv.v);
    double r, g, b;
    HsvToRgb(hsv, r, g, b);
    px[i] = Quantize(r);
    px[i + 1] = Quantize(g);
    px[i + 2] = Quantize(b);
  }
  return out;
}

std::array<bool, kNumCameras> DrawMissingCameras(double p,
                                                 RandomStream& stream) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw UsageError("missing-camera probability must lie in [0, 1]");
  }
  std::array<bool, kNumCameras> dropped{};
  for (bool& d : dropped) d = stream.Bernoulli(p);
  return dropped;
}

SampleBundle ApplyMissingCamera(SampleBundle bundle, double p,
                                RandomStream& stream) {
  const auto dropped = DrawMissingCameras(p, stream);
  for (int i = 0; i < kNumCameras; ++i) {
    if (dropped[i]) bundle.cameras[i].frame.reset();
  }
  return bundle;
}

}  // namespace corrupt_forge
