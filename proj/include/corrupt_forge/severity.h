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

#ifndef CORRUPT_FORGE_SEVERITY_H_
#define CORRUPT_FORGE_SEVERITY_H_

#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "corrupt_forge/types.h"

namespace corrupt_forge {

// Named numeric parameters for one (kind, level) cell. Holds the catalog
// value(s) plus the model constants the kernel for that kind consumes.
class ParamSet {
 public:
  ParamSet() = default;
  ParamSet(CorruptionKind kind, std::map<std::string, double, std::less<>> values)
      : kind_(kind), values_(std::move(values)) {}

  CorruptionKind kind() const { return kind_; }
  // Throws ConfigError if `name` is not a member of this set.
  double Get(std::string_view name) const;
  bool Has(std::string_view name) const;
  const std::map<std::string, double, std::less<>>& values() const {
    return values_;
  }

  bool operator==(const ParamSet&) const = default;

 private:
  friend class SeverityConfig;
  CorruptionKind kind_ = CorruptionKind::kDarkness;
  std::map<std::string, double, std::less<>> values_;
};

// Parameter names. The first group are the catalog symbols; the rest are
// the tunable model constants each kernel reads.
namespace param {
inline constexpr std::string_view kNoiseIntensity = "noise_intensity";
inline constexpr std::string_view kAmount = "amount";
inline constexpr std::string_view kDropProbability = "drop_probability";
inline constexpr std::string_view kProbability = "probability";
inline constexpr std::string_view kAngleDeg = "angle_deg";
inline constexpr std::string_view kSigmaT = "sigma_t";
inline constexpr std::string_view kBeams = "beams";
inline constexpr std::string_view kVisibility = "visibility_m";
inline constexpr std::string_view kRate = "rate_mm_h";

inline constexpr std::string_view kDimReference = "dim_reference";
inline constexpr std::string_view kDimExponent = "dim_exponent";
inline constexpr std::string_view kReadNoise = "read_noise";
inline constexpr std::string_view kTranslation = "translation_m";
inline constexpr std::string_view kBlurPxPerM = "blur_px_per_m";
inline constexpr std::string_view kAirlight = "airlight";
inline constexpr std::string_view kBackscatterGain = "backscatter_gain";
inline constexpr std::string_view kNoiseFloor = "noise_floor";
inline constexpr std::string_view kDensityPerRate = "density_per_rate";
inline constexpr std::string_view kBeamArea = "beam_area_m2";
inline constexpr std::string_view kWetGround = "wet_ground";
inline constexpr std::string_view kVeilWeight = "veil_weight";
inline constexpr std::string_view kVeilLevel = "veil_level";
}  // namespace param

// The catalog symbols of `kind` (one entry, or two for spatial
// misalignment: angle then probability).
std::vector<std::string_view> CatalogParamNames(CorruptionKind kind);

// Corruption kind x level -> ParamSet. Immutable once built.
class SeverityConfig {
 public:
  // The built-in three-level catalog.
  static const SeverityConfig& Default();

  // Default catalog with the overrides of a flat `key = value` document
  // applied. Keys are `<kind>.<level>.<param>` (one cell) or
  // `<kind>.<param>` (every level of that kind). A level above the
  // built-in ones may be introduced if it sets every catalog symbol.
  // Throws ConfigError on unknown keys, malformed lines, or a result that
  // violates the catalog invariants.
  static SeverityConfig FromOverrideText(std::string_view text);
  static SeverityConfig FromOverrideFile(const std::filesystem::path& path);

  // Throws ConfigError if the level is not defined for `kind`.
  const ParamSet& Params(CorruptionKind kind, int level) const;
  std::vector<int> Levels(CorruptionKind kind) const;

 private:
  SeverityConfig() = default;
  void Validate() const;

  std::array<std::map<int, ParamSet>, kAllKinds.size()> table_;
};

// Pure lookup into the built-in catalog.
const ParamSet& SeverityParams(CorruptionKind kind, int level);

}  // namespace corrupt_forge

#endif  // CORRUPT_FORGE_SEVERITY_H_
