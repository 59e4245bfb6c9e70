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

#include "corrupt_forge/severity.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "corrupt_forge/errors.h"

namespace corrupt_forge {
namespace {

using Values = std::map<std::string, double, std::less<>>;

// Model constants shared by every level of a kind.
Values KindConstants(CorruptionKind kind) {
  switch (kind) {
    case CorruptionKind::kDarkness:
      return {{std::string(param::kDimReference), 25.0},
              {std::string(param::kDimExponent), 0.5},
              {std::string(param::kReadNoise), 0.01}};
    case CorruptionKind::kMotionBlur:
      return {{std::string(param::kBlurPxPerM), 150.0}};
    case CorruptionKind::kFog:
      return {{std::string(param::kAirlight), 0.8},
              {std::string(param::kBackscatterGain), 0.5},
              {std::string(param::kNoiseFloor), 2.0}};
    case CorruptionKind::kSnow:
      return {{std::string(param::kDensityPerRate), 0.25},
              {std::string(param::kBeamArea), 1e-3},
              {std::string(param::kWetGround), 0.55},
              {std::string(param::kVeilWeight), 0.15},
              {std::string(param::kVeilLevel), 0.75}};
    default:
      return {};
  }
}

struct CatalogRow {
  CorruptionKind kind;
  std::array<std::array<double, 2>, 3> levels;  // second entry only if used
};

constexpr std::array<CatalogRow, kAllKinds.size()> kCatalog = {{
    {CorruptionKind::kDarkness, {{{25, 0}, {12, 0}, {5, 0}}}},
    {CorruptionKind::kBrightness, {{{0.5, 0}, {0.6, 0}, {0.7, 0}}}},
    {CorruptionKind::kPointsReducing, {{{0.7, 0}, {0.8, 0}, {0.9, 0}}}},
    {CorruptionKind::kTemporalMisalignment, {{{0.2, 0}, {0.4, 0}, {0.6, 0}}}},
    {CorruptionKind::kSpatialMisalignment, {{{1, 0.2}, {2, 0.4}, {3, 0.6}}}},
    {CorruptionKind::kMotionBlur, {{{0.06, 0}, {0.10, 0}, {0.13, 0}}}},
    {CorruptionKind::kMissingCamera, {{{0.2, 0}, {0.4, 0}, {0.6, 0}}}},
    {CorruptionKind::kBeamsReducing, {{{16, 0}, {8, 0}, {4, 0}}}},
    {CorruptionKind::kFog, {{{300, 0}, {150, 0}, {50, 0}}}},
    {CorruptionKind::kSnow, {{{5, 0}, {35, 0}, {70, 0}}}},
}};

std::size_t Index(CorruptionKind kind) { return static_cast<std::size_t>(kind); }

std::string_view Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> Split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

bool IsProbability(double v) { return v >= 0.0 && v <= 1.0; }

}  // namespace

double ParamSet::Get(std::string_view name) const {
  const auto it = values_.find(name);
  if (it == values_.end()) {
    throw ConfigError(std::string(KindName(kind_)) + " has no parameter '" +
                      std::string(name) + "'");
  }
  return it->second;
}

bool ParamSet::Has(std::string_view name) const {
  return values_.find(name) != values_.end();
}

std::vector<std::string_view> CatalogParamNames(CorruptionKind kind) {
  switch (kind) {
    case CorruptionKind::kDarkness:
      return {param::kNoiseIntensity};
    case CorruptionKind::kBrightness:
      return {param::kAmount};
    case CorruptionKind::kPointsReducing:
      return {param::kDropProbability};
    case CorruptionKind::kTemporalMisalignment:
    case CorruptionKind::kMissingCamera:
      return {param::kProbability};
    case CorruptionKind::kSpatialMisalignment:
      return {param::kAngleDeg, param::kProbability};
    case CorruptionKind::kMotionBlur:
      return {param::kSigmaT};
    case CorruptionKind::kBeamsReducing:
      return {param::kBeams};
    case CorruptionKind::kFog:
      return {param::kVisibility};
    case CorruptionKind::kSnow:
      return {param::kRate};
  }
  return {};
}

const SeverityConfig& SeverityConfig::Default() {
  static const SeverityConfig* config = [] {
    auto* c = new SeverityConfig();
    for (const CatalogRow& row : kCatalog) {
      const auto names = CatalogParamNames(row.kind);
      for (int level = 1; level <= 3; ++level) {
        Values values = KindConstants(row.kind);
        for (std::size_t i = 0; i < names.size(); ++i) {
          values[std::string(names[i])] = row.levels[level - 1][i];
        }
        if (row.kind == CorruptionKind::kSpatialMisalignment) {
          // 0.1 m of translation per degree of rotation.
          values[std::string(param::kTranslation)] =
              0.1 * row.levels[level - 1][0];
        }
        c->table_[Index(row.kind)].emplace(level,
                                           ParamSet(row.kind, std::move(values)));
      }
    }
    c->Validate();
    return c;
  }();
  return *config;
}

SeverityConfig SeverityConfig::FromOverrideText(std::string_view text) {
  SeverityConfig config = Default();
  // Kind-wide keys apply after per-level keys are created, so collect first.
  std::vector<std::tuple<CorruptionKind, int, std::string, double>> cells;
  std::vector<std::tuple<CorruptionKind, std::string, double>> kind_wide;

  int line_no = 0;
  for (std::string_view raw : Split(text, '\n')) {
    ++line_no;
    const auto hash = raw.find('#');
    std::string_view line = Trim(raw.substr(0, hash));
    if (line.empty()) continue;
    const auto where = "line " + std::to_string(line_no) + ": ";

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(where + "expected '<key> = <number>'");
    }
    const std::string_view key = Trim(line.substr(0, eq));
    const std::string_view number = Trim(line.substr(eq + 1));
    double value = 0.0;
    const auto [ptr, ec] =
        std::from_chars(number.data(), number.data() + number.size(), value);
    if (ec != std::errc() || ptr != number.data() + number.size() ||
        !std::isfinite(value)) {
      throw ConfigError(where + "'" + std::string(number) +
                        "' is not a finite number");
    }

    const auto parts = Split(key, '.');
    if (parts.size() != 2 && parts.size() != 3) {
      throw ConfigError(where + "unknown key '" + std::string(key) + "'");
    }
    const auto kind = ParseKind(parts.front());
    if (!kind) {
      throw ConfigError(where + "unknown corruption kind '" +
                        std::string(parts.front()) + "'");
    }
    const std::string name(parts.back());
    const ParamSet& reference = config.Params(*kind, 1);
    if (!reference.Has(name)) {
      throw ConfigError(where + "unknown parameter '" + std::string(key) + "'");
    }
    if (parts.size() == 2) {
      kind_wide.emplace_back(*kind, name, value);
      continue;
    }
    int level = 0;
    const auto [lptr, lec] = std::from_chars(
        parts[1].data(), parts[1].data() + parts[1].size(), level);
    if (lec != std::errc() || lptr != parts[1].data() + parts[1].size() ||
        level < 1) {
      throw ConfigError(where + "invalid level '" + std::string(parts[1]) +
                        "'");
    }
    cells.emplace_back(*kind, level, name, value);
  }

  // New levels start from the kind constants with the catalog symbols unset.
  for (const auto& [kind, level, name, value] : cells) {
    auto& levels = config.table_[Index(kind)];
    if (!levels.count(level)) {
      Values values = levels.at(1).values_;
      for (auto symbol : CatalogParamNames(kind)) {
        values.erase(std::string(symbol));
      }
      values.erase(std::string(param::kTranslation));
      levels.emplace(level, ParamSet(kind, std::move(values)));
    }
  }
  for (const auto& [kind, name, value] : kind_wide) {
    for (auto& [level, params] : config.table_[Index(kind)]) {
      params.values_[name] = value;
    }
  }
  for (const auto& [kind, level, name, value] : cells) {
    config.table_[Index(kind)].at(level).values_[name] = value;
  }
  // Derived translation default for spatial levels that did not set one.
  for (auto& [level, params] :
       config.table_[Index(CorruptionKind::kSpatialMisalignment)]) {
    if (!params.Has(param::kTranslation) && params.Has(param::kAngleDeg)) {
      params.values_[std::string(param::kTranslation)] =
          0.1 * params.Get(param::kAngleDeg);
    }
  }
  config.Validate();
  return config;
}

SeverityConfig SeverityConfig::FromOverrideFile(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read override file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return FromOverrideText(text.str());
}

const ParamSet& SeverityConfig::Params(CorruptionKind kind, int level) const {
  const auto& levels = table_[Index(kind)];
  const auto it = levels.find(level);
  if (it == levels.end()) {
    throw ConfigError("no severity level " + std::to_string(level) +
                      " for " + std::string(KindName(kind)));
  }
  return it->second;
}

std::vector<int> SeverityConfig::Levels(CorruptionKind kind) const {
  std::vector<int> levels;
  for (const auto& [level, params] : table_[Index(kind)]) {
    levels.push_back(level);
  }
  return levels;
}

void SeverityConfig::Validate() const {
  for (CorruptionKind kind : kAllKinds) {
    const auto& levels = table_[Index(kind)];
    const std::string kind_name(KindName(kind));
    for (int level = 1; level <= 3; ++level) {
      if (!levels.count(level)) {
        throw ConfigError(kind_name + " is missing level " +
                          std::to_string(level));
      }
    }
    for (const auto& [level, params] : levels) {
      const auto cell = kind_name + "." + std::to_string(level);
      for (auto symbol : CatalogParamNames(kind)) {
        if (!params.Has(symbol)) {
          throw ConfigError(cell + " does not set " + std::string(symbol));
        }
      }
      for (auto name : {param::kProbability, param::kDropProbability,
                        param::kAmount, param::kAirlight, param::kWetGround,
                        param::kVeilWeight, param::kVeilLevel}) {
        if (params.Has(name) && !IsProbability(params.Get(name))) {
          throw ConfigError(cell + "." + std::string(name) +
                            " must lie in [0, 1]");
        }
      }
      for (auto name : {param::kVisibility, param::kRate,
                        param::kNoiseIntensity, param::kDimReference}) {
        if (params.Has(name) && !(params.Get(name) > 0.0)) {
          throw ConfigError(cell + "." + std::string(name) +
                            " must be strictly positive");
        }
      }
      for (auto name : {param::kSigmaT, param::kAngleDeg, param::kTranslation,
                        param::kBlurPxPerM, param::kReadNoise,
                        param::kBackscatterGain, param::kNoiseFloor,
                        param::kDensityPerRate, param::kBeamArea,
                        param::kDimExponent}) {
        if (params.Has(name) && !(params.Get(name) >= 0.0)) {
          throw ConfigError(cell + "." + std::string(name) +
                            " must be non-negative");
        }
      }
      if (params.Has(param::kWetGround) && params.Get(param::kWetGround) <= 0) {
        throw ConfigError(cell + ".wet_ground must lie in (0, 1]");
      }
      if (params.Has(param::kBeams)) {
        const double beams = params.Get(param::kBeams);
        if (beams < 1 || beams != std::floor(beams) ||
            kNumRings % static_cast<int>(beams) != 0) {
          throw ConfigError(cell + ".beams must be an integer dividing 32");
        }
      }
    }
  }
}

const ParamSet& SeverityParams(CorruptionKind kind, int level) {
  if (level < 1 || level > 3) {
    throw ConfigError("severity level " + std::to_string(level) +
                      " outside 1..3");
  }
  return SeverityConfig::Default().Params(kind, level);
}

}  // namespace corrupt_forge
