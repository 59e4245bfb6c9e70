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

#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "corrupt_forge/errors.h"
#include "corrupt_forge/random.h"
#include "corrupt_forge/severity.h"
#include "corrupt_forge/types.h"

namespace corrupt_forge {
namespace {

struct GoldenCell {
  CorruptionKind kind;
  std::string_view symbol;
  std::array<double, 3> values;
};

// Catalog values copied by hand, one row per corruption.
const GoldenCell kGolden[] = {
    {CorruptionKind::kDarkness, "noise_intensity", {25, 12, 5}},
    {CorruptionKind::kBrightness, "amount", {0.5, 0.6, 0.7}},
    {CorruptionKind::kPointsReducing, "drop_probability", {0.7, 0.8, 0.9}},
    {CorruptionKind::kTemporalMisalignment, "probability", {0.2, 0.4, 0.6}},
    {CorruptionKind::kSpatialMisalignment, "angle_deg", {1, 2, 3}},
    {CorruptionKind::kSpatialMisalignment, "probability", {0.2, 0.4, 0.6}},
    {CorruptionKind::kMotionBlur, "sigma_t", {0.06, 0.10, 0.13}},
    {CorruptionKind::kMissingCamera, "probability", {0.2, 0.4, 0.6}},
    {CorruptionKind::kBeamsReducing, "beams", {16, 8, 4}},
    {CorruptionKind::kFog, "visibility_m", {300, 150, 50}},
    {CorruptionKind::kSnow, "rate_mm_h", {5, 35, 70}},
};

TEST(SeverityCatalog, EveryCellMatchesTheTable) {
  int cells = 0;
  for (const GoldenCell& row : kGolden) {
    for (int level = 1; level <= 3; ++level) {
      EXPECT_EQ(SeverityParams(row.kind, level).Get(row.symbol),
                row.values[level - 1])
          << KindName(row.kind) << " level " << level << " " << row.symbol;
      ++cells;
    }
  }
  // Spatial misalignment has two symbols per cell.
  EXPECT_EQ(cells - 3, 30);
}

TEST(SeverityCatalog, CatalogSymbolsCoverEveryKind) {
  std::size_t symbols = 0;
  for (CorruptionKind kind : kAllKinds) {
    const auto names = CatalogParamNames(kind);
    EXPECT_FALSE(names.empty()) << KindName(kind);
    symbols += names.size();
  }
  EXPECT_EQ(symbols, std::size(kGolden));
}

TEST(SeverityCatalog, LevelsOutsideOneToThreeAreRejected) {
  EXPECT_THROW(SeverityParams(CorruptionKind::kFog, 0), ConfigError);
  EXPECT_THROW(SeverityParams(CorruptionKind::kFog, 4), ConfigError);
}

TEST(SeverityCatalog, UnknownParameterNameThrows) {
  EXPECT_THROW(SeverityParams(CorruptionKind::kFog, 1).Get("rate_mm_h"),
               ConfigError);
}

TEST(SeverityCatalog, SpatialTranslationDefaultsToTenthOfAngle) {
  for (int level = 1; level <= 3; ++level) {
    const auto& p = SeverityParams(CorruptionKind::kSpatialMisalignment, level);
    EXPECT_DOUBLE_EQ(p.Get(param::kTranslation), 0.1 * level);
  }
}

TEST(SeverityOverrides, CellAndKindWideKeys) {
  const auto config = SeverityConfig::FromOverrideText(
      "# comment\n"
      "fog.2.visibility_m = 120\n"
      "fog.airlight = 0.7   # every level\n");
  EXPECT_EQ(config.Params(CorruptionKind::kFog, 2).Get("visibility_m"), 120);
  EXPECT_EQ(config.Params(CorruptionKind::kFog, 1).Get("visibility_m"), 300);
  for (int level = 1; level <= 3; ++level) {
    EXPECT_EQ(config.Params(CorruptionKind::kFog, level).Get("airlight"), 0.7);
  }
  // The built-in catalog is untouched.
  EXPECT_EQ(SeverityParams(CorruptionKind::kFog, 2).Get("visibility_m"), 150);
}

TEST(SeverityOverrides, NewLevelNeedsEveryCatalogSymbol) {
  EXPECT_THROW(SeverityConfig::FromOverrideText("spatial_misalignment.4.angle_deg = 5"),
               ConfigError);
  const auto config = SeverityConfig::FromOverrideText(
      "spatial_misalignment.4.angle_deg = 5\n"
      "spatial_misalignment.4.probability = 0.8\n");
  EXPECT_EQ(config.Levels(CorruptionKind::kSpatialMisalignment),
            (std::vector<int>{1, 2, 3, 4}));
  const auto& p = config.Params(CorruptionKind::kSpatialMisalignment, 4);
  EXPECT_DOUBLE_EQ(p.Get(param::kTranslation), 0.5);
}

TEST(SeverityOverrides, RejectsMalformedInput) {
  EXPECT_THROW(SeverityConfig::FromOverrideText("fog.1.bogus = 1"), ConfigError);
  EXPECT_THROW(SeverityConfig::FromOverrideText("haze.1.visibility_m = 1"),
               ConfigError);
  EXPECT_THROW(SeverityConfig::FromOverrideText("fog.1.visibility_m 100"),
               ConfigError);
  EXPECT_THROW(SeverityConfig::FromOverrideText("fog.0.visibility_m = 100"),
               ConfigError);
  EXPECT_THROW(SeverityConfig::FromOverrideText("fog.1.visibility_m = abc"),
               ConfigError);
  EXPECT_THROW(SeverityConfig::FromOverrideText("missing_camera.1.probability = 1.5"),
               ConfigError);
  EXPECT_THROW(SeverityConfig::FromOverrideText("beams_reducing.1.beams = 5"),
               ConfigError);
  EXPECT_THROW(SeverityConfig::FromOverrideText("fog.1.visibility_m = -3"),
               ConfigError);
  EXPECT_THROW(SeverityConfig::FromOverrideFile("/nonexistent/overrides.txt"),
               ConfigError);
}

TEST(Kinds, NamesRoundTrip) {
  std::set<std::string_view> names;
  for (CorruptionKind kind : kAllKinds) {
    EXPECT_EQ(ParseKind(KindName(kind)), kind);
    names.insert(KindName(kind));
  }
  EXPECT_EQ(names.size(), kAllKinds.size());
  EXPECT_FALSE(ParseKind("haze").has_value());
}

TEST(Kinds, ModalityColumn) {
  const std::pair<CorruptionKind, std::string_view> expected[] = {
      {CorruptionKind::kDarkness, "C"},
      {CorruptionKind::kBrightness, "C"},
      {CorruptionKind::kPointsReducing, "L"},
      {CorruptionKind::kTemporalMisalignment, "LC"},
      {CorruptionKind::kSpatialMisalignment, "LC"},
      {CorruptionKind::kMotionBlur, "LC"},
      {CorruptionKind::kMissingCamera, "C"},
      {CorruptionKind::kBeamsReducing, "L"},
      {CorruptionKind::kFog, "LC"},
      {CorruptionKind::kSnow, "LC"},
  };
  for (const auto& [kind, code] : expected) {
    EXPECT_EQ(ModalityCode(ModalityOf(kind)), code) << KindName(kind);
  }
}

TEST(Types, PointCloudValidation) {
  PointCloud cloud;
  cloud.points.push_back({1, 2, 3, 10, 0});
  EXPECT_NO_THROW(ValidatePointCloud(cloud));
  cloud.points[0].ring = 32;
  EXPECT_THROW(ValidatePointCloud(cloud), DataError);
  cloud.points[0].ring = 0;
  cloud.points[0].intensity = 300;
  EXPECT_THROW(ValidatePointCloud(cloud), DataError);
  cloud.points[0].intensity = 10;
  cloud.points[0].y = std::nan("");
  EXPECT_THROW(ValidatePointCloud(cloud), DataError);
}

TEST(Types, ImageBufferRejectsBadSizes) {
  EXPECT_THROW(ImageBuffer(0, 4), DataError);
  EXPECT_THROW(ImageBuffer(2, 2, std::vector<std::uint8_t>(11)), DataError);
  ImageBuffer image(2, 2);
  EXPECT_EQ(image.pixels().size(), 12u);
  EXPECT_EQ(image.at(1, 1, 2), 0);
}

TEST(Types, CalibrationValidation) {
  Calibration calib;
  EXPECT_NO_THROW(calib.Validate());
  calib.rotation = Eigen::Quaterniond(1.1, 0, 0, 0);
  EXPECT_THROW(calib.Validate(), CalibrationError);
  calib.rotation = Eigen::Quaterniond::Identity();
  Eigen::Matrix3d k = Eigen::Matrix3d::Identity();
  k(0, 0) = -5;
  calib.intrinsic = k;
  EXPECT_THROW(calib.Validate(), CalibrationError);
  k(0, 0) = 5;
  k(2, 0) = 1;
  calib.intrinsic = k;
  EXPECT_THROW(calib.Validate(), CalibrationError);
}

TEST(Types, CameraNames) {
  EXPECT_EQ(CameraIndex("CAM_BACK_LEFT"), 4);
  EXPECT_FALSE(CameraIndex("CAM_TOP").has_value());
}

TEST(RandomStreams, SameKeySameSequence) {
  auto a = DeriveStream(42, "s0", CorruptionKind::kFog, "LIDAR_TOP");
  auto b = DeriveStream(42, "s0", CorruptionKind::kFog, "LIDAR_TOP");
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a.NextU64(), b.NextU64());
}

TEST(RandomStreams, NoCollisionsAcrossKeys) {
  std::set<std::uint64_t> first;
  std::size_t streams = 0;
  for (std::uint64_t seed : {0ull, 1ull, 0xffffffffffffffffull}) {
    for (int s = 0; s < 200; ++s) {
      for (CorruptionKind kind : kAllKinds) {
        for (std::string_view sensor : {"LIDAR_TOP", "CAM_FRONT", "CAM_BACK"}) {
          first.insert(DeriveStream(seed, "sample-" + std::to_string(s), kind,
                                    sensor)
                           .NextU64());
          ++streams;
        }
      }
    }
  }
  EXPECT_EQ(first.size(), streams);
}

TEST(RandomStreams, FieldBoundariesAreUnambiguous) {
  auto a = DeriveStream(1, "ab", CorruptionKind::kSnow, "c");
  auto b = DeriveStream(1, "a", CorruptionKind::kSnow, "bc");
  EXPECT_NE(a.NextU64(), b.NextU64());
}

TEST(RandomStreams, AdjacentStreamsAreUncorrelated) {
  auto a = DeriveStream(5, "sample", CorruptionKind::kFog, "CAM_FRONT");
  auto b = DeriveStream(6, "sample", CorruptionKind::kFog, "CAM_FRONT");
  constexpr int kN = 100000;
  double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
  for (int i = 0; i < kN; ++i) {
    const double x = a.Uniform();
    const double y = b.Uniform();
    sa += x;
    sb += y;
    saa += x * x;
    sbb += y * y;
    sab += x * y;
  }
  const double cov = sab / kN - (sa / kN) * (sb / kN);
  const double va = saa / kN - (sa / kN) * (sa / kN);
  const double vb = sbb / kN - (sb / kN) * (sb / kN);
  // 4 sigma for n = 1e5 is about 0.0126.
  EXPECT_LT(std::abs(cov / std::sqrt(va * vb)), 0.0126);
}

TEST(RandomStreams, DistributionMoments) {
  auto s = DeriveStream(9, "x", CorruptionKind::kSnow, "y");
  constexpr int kN = 200000;
  double u = 0, n = 0, nn = 0, p = 0;
  for (int i = 0; i < kN; ++i) {
    const double x = s.Uniform();
    ASSERT_GE(x, 0.0);
    ASSERT_LT(x, 1.0);
    u += x;
    const double g = s.Normal(1.0, 2.0);
    n += g;
    nn += (g - 1.0) * (g - 1.0);
    p += static_cast<double>(s.Poisson(3.5));
  }
  EXPECT_NEAR(u / kN, 0.5, 0.003);
  EXPECT_NEAR(n / kN, 1.0, 0.02);
  EXPECT_NEAR(std::sqrt(nn / kN), 2.0, 0.02);
  EXPECT_NEAR(p / kN, 3.5, 0.02);
  EXPECT_EQ(s.Poisson(0.0), 0);
  for (int i = 0; i < 100; ++i) EXPECT_NEAR(s.UnitVector().norm(), 1.0, 1e-12);
}

}  // namespace
}  // namespace corrupt_forge
