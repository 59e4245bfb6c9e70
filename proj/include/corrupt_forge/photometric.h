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

#ifndef CORRUPT_FORGE_PHOTOMETRIC_H_
#define CORRUPT_FORGE_PHOTOMETRIC_H_

#include "corrupt_forge/random.h"
#include "corrupt_forge/severity.h"
#include "corrupt_forge/types.h"

namespace corrupt_forge {

// Low-light model. The signal is dimmed by
// d = (noise_intensity / dim_reference)^dim_exponent before Poisson shot
// noise with `noise_intensity` photons per unit value and Gaussian read
// noise are applied.
struct DarknessParams {
  double noise_intensity = 25.0;
  double dim_reference = 25.0;
  double dim_exponent = 0.5;
  double read_noise = 0.01;

  double DimmingFactor() const;
  static DarknessParams FromParamSet(const ParamSet& params);
};

ImageBuffer ApplyDarkness(const ImageBuffer& image,
                          const DarknessParams& params, RandomStream& stream);

struct Hsv {
  double h = 0.0;  // [0, 1)
  double s = 0.0;
  double v = 0.0;
};

Hsv RgbToHsv(double r, double g, double b);
void HsvToRgb(const Hsv& hsv, double& r, double& g, double& b);

// V' = V + amount * (1 - V) in HSV space, hue and saturation untouched.
ImageBuffer ApplyBrightness(const ImageBuffer& image, double amount);

// Drops each camera frame independently with probability `p`. The LiDAR
// and the retained frames are returned untouched.
SampleBundle ApplyMissingCamera(SampleBundle bundle, double p,
                                RandomStream& stream);

// Which slots ApplyMissingCamera would drop, consuming the same draws.
std::array<bool, kNumCameras> DrawMissingCameras(double p, RandomStream& stream);

}  // namespace corrupt_forge

#endif  // CORRUPT_FORGE_PHOTOMETRIC_H_
