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

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "corrupt_forge/dataio.h"
#include "corrupt_forge/geometric.h"
#include "corrupt_forge/photometric.h"
#include "corrupt_forge/pipeline.h"
#include "corrupt_forge/random.h"
#include "corrupt_forge/robustmetrics.h"
#include "corrupt_forge/severity.h"
#include "corrupt_forge/weather.h"
#include "detection_oracle.h"
#include "fixture.h"

namespace corrupt_forge {
namespace {

namespace fs = std::filesystem;
using K = CorruptionKind;

struct Outcome {
  bool ok = true;
  std::string detail;
};

// Records the first few failed checks.
class Checker {
 public:
  void Expect(bool condition, const std::string& what) {
    if (condition) return;
    ok_ = false;
    if (++failures_ <= 3) notes_ += (notes_.empty() ? "" : "; ") + what;
  }
  void Near(double got, double want, double tol, const std::string& what) {
    std::ostringstream s;
    s.precision(10);
    s << what << ": got " << got << ", want " << want << " +/- " << tol;
    Expect(std::abs(got - want) <= tol, s.str());
  }
  Outcome Done(const std::string& summary) const {
    return {ok_, ok_ ? summary : notes_};
  }

 private:
  bool ok_ = true;
  int failures_ = 0;
  std::string notes_;
};

double Seconds(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

constexpr K kTableOrder[] = {K::kBeamsReducing, K::kBrightness, K::kDarkness, K::kFog,
                             K::kMissingCamera, K::kMotionBlur, K::kPointsReducing,
                             K::kSnow, K::kSpatialMisalignment, K::kTemporalMisalignment};

std::vector<MetricRecord> GridFromRow(const std::string& model, double clean,
                                      const std::array<double, 10>& per_kind) {
  std::vector<MetricRecord> r;
  r.push_back({model, std::nullopt, std::nullopt, MetricBasis::kNds, clean});
  for (int i = 0; i < 10; ++i) {
    for (int s = 1; s <= 3; ++s) {
      r.push_back({model, kTableOrder[i], s, MetricBasis::kNds, per_kind[i]});
    }
  }
  return r;
}

// ---- 1 -------------------------------------------------------------------

Outcome MetricReproduction() {
  const auto start = std::chrono::steady_clock::now();
  Checker c;
  // Reference per-corruption RA row (NDS) for CMT.
  const std::array<double, 10> cmt_ra = {0.786, 0.937, 0.948, 0.806, 0.974,
                                         0.841, 0.925, 0.833, 0.809, 0.788};
  const double mra = ComputeResistanceAbility(GridFromRow("CMT", 1.0, cmt_ra),
                                              MetricBasis::kNds)
                         .mean;
  c.Near(mra, 0.865, 0.0005, "CMT mRA");

  // Reference RRA rows in percent. A baseline scoring 1 everywhere and a
  // candidate scoring 1 + RRA_c / 100 reproduce each RRA_c.
  const std::array<double, 10> ones = {1, 1, 1, 1, 1, 1, 1, 1, 1, 1};
  const auto baseline = GridFromRow("base", 1.0, ones);
  const std::pair<std::string, std::array<double, 10>> rows[] = {
      {"SparseFusion", {4.264, 3.179, 1.821, 4.429, 0.297, 0.280, 3.242, 1.887, 3.699, 7.228}},
      {"TransFusion",
       {-7.210, 1.799, 1.146, -0.552, 0.340, -5.412, -3.296, -4.220, -3.626, 3.850}}};
  const double expected[] = {3.033, -1.718};
  for (int r = 0; r < 2; ++r) {
    std::array<double, 10> m{};
    for (int i = 0; i < 10; ++i) m[i] = 1.0 + rows[r].second[i] / 100.0;
    const double mrra = ComputeRelativeResistance(GridFromRow(rows[r].first, 1.0, m),
                                                  baseline, MetricBasis::kNds)
                            .MeanPercent();
    c.Near(mrra, expected[r], 0.001, rows[r].first + " mRRA");
  }
  const double t = Seconds(start);
  c.Expect(t < 1.0, "runtime " + std::to_string(t) + " s");
  std::ostringstream s;
  s << "mRA 0.865, mRRA 3.033 / -1.718 reproduced in " << t << " s";
  return c.Done(s.str());
}

// ---- 2 -------------------------------------------------------------------

Outcome ResistanceChain() {
  Checker c;
  const K kinds[] = {K::kFog, K::kSnow, K::kDarkness};
  const double clean[2] = {0.64, 0.50};
  // values[model][corruption][severity]
  const double values[2][3][3] = {{{0.60, 0.48, 0.32}, {0.64, 0.56, 0.16}, {0.62, 0.60, 0.40}},
                                  {{0.45, 0.40, 0.35}, {0.50, 0.25, 0.20}, {0.44, 0.41, 0.30}}};
  std::vector<MetricRecord> grid[2];
  const char* names[2] = {"cand", "base"};
  for (int m = 0; m < 2; ++m) {
    grid[m].push_back({names[m], std::nullopt, std::nullopt, MetricBasis::kNds, clean[m]});
    for (int k = 0; k < 3; ++k) {
      for (int s = 0; s < 3; ++s) {
        grid[m].push_back({names[m], kinds[k], s + 1, MetricBasis::kNds, values[m][k][s]});
      }
    }
  }
  // Hand calculation for the candidate (clean 0.64):
  //   fog      0.9375 0.75   0.5   -> 0.729166...
  //   snow     1.0    0.875  0.25  -> 0.708333...
  //   darkness 0.96875 0.9375 0.625 -> 0.84375
  const double ra_cs[3][3] = {{0.9375, 0.75, 0.5}, {1.0, 0.875, 0.25}, {0.96875, 0.9375, 0.625}};
  const double ra_c[3] = {2.1875 / 3, 2.125 / 3, 2.53125 / 3};
  const double mra = (2.1875 + 2.125 + 2.53125) / 9;
  // RRA vs base: sums 1.40/1.20, 1.36/0.95, 1.62/1.15.
  const double rra[3] = {1.40 / 1.20 - 1, 1.36 / 0.95 - 1, 1.62 / 1.15 - 1};
  const double mrra = (rra[0] + rra[1] + rra[2]) / 3;

  const ResistanceAbility ra = ComputeResistanceAbility(grid[0], MetricBasis::kNds);
  for (int k = 0; k < 3; ++k) {
    for (int s = 0; s < 3; ++s) {
      c.Near(ra.per_severity.at(kinds[k])[s], ra_cs[k][s], 1e-9, "RA_cs");
    }
    c.Near(ra.per_corruption.at(kinds[k]), ra_c[k], 1e-9, "RA_c");
  }
  c.Near(ra.mean, mra, 1e-9, "mRA");
  const RelativeResistance rr = ComputeRelativeResistance(grid[0], grid[1], MetricBasis::kNds);
  for (int k = 0; k < 3; ++k) c.Near(rr.per_corruption.at(kinds[k]), rra[k], 1e-9, "RRA_c");
  c.Near(rr.mean, mrra, 1e-9, "mRRA");
  for (int m = 0; m < 2; ++m) {
    const RelativeResistance self = ComputeRelativeResistance(grid[m], grid[m], MetricBasis::kNds);
    for (const auto& [kind, v] : self.per_corruption) c.Expect(v == 0.0, "self RRA not 0");
    c.Expect(self.mean == 0.0, "self mRRA not 0");
  }
  return c.Done("RA_cs, RA_c, mRA, RRA_c, mRRA match hand values; self RRA = 0");
}

// ---- 3 -------------------------------------------------------------------

Outcome SeverityCatalog() {
  Checker c;
  struct Row {
    K kind;
    std::string_view symbol;
    std::array<double, 3> values;
  };
  const Row rows[] = {
      {K::kDarkness, param::kNoiseIntensity, {25, 12, 5}},
      {K::kBrightness, param::kAmount, {0.5, 0.6, 0.7}},
      {K::kPointsReducing, param::kDropProbability, {0.7, 0.8, 0.9}},
      {K::kTemporalMisalignment, param::kProbability, {0.2, 0.4, 0.6}},
      {K::kSpatialMisalignment, param::kAngleDeg, {1, 2, 3}},
      {K::kSpatialMisalignment, param::kProbability, {0.2, 0.4, 0.6}},
      {K::kMotionBlur, param::kSigmaT, {0.06, 0.10, 0.13}},
      {K::kMissingCamera, param::kProbability, {0.2, 0.4, 0.6}},
      {K::kBeamsReducing, param::kBeams, {16, 8, 4}},
      {K::kFog, param::kVisibility, {300, 150, 50}},
      {K::kSnow, param::kRate, {5, 35, 70}},
  };
  std::set<std::pair<K, int>> cells;
  for (const Row& row : rows) {
    for (int level = 1; level <= 3; ++level) {
      c.Expect(SeverityParams(row.kind, level).Get(row.symbol) == row.values[level - 1],
               std::string(KindName(row.kind)) + " level " + std::to_string(level));
      cells.insert({row.kind, level});
    }
  }
  c.Expect(cells.size() == 30, "cell count " + std::to_string(cells.size()));
  return c.Done(std::to_string(cells.size()) + " cells exact");
}

// ---- 4 -------------------------------------------------------------------

PointCloud UniformCloud(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-50.0, 50.0), inten(0.0, 255.0);
  std::uniform_int_distribution<int> ring(0, kNumRings - 1);
  PointCloud cloud;
  cloud.points.resize(n);
  for (auto& p : cloud.points) p = {u(rng), u(rng), u(rng) / 10, inten(rng), ring(rng)};
  return cloud;
}

Outcome StatisticalKernels() {
  const auto start = std::chrono::steady_clock::now();
  Checker c;
  const PointCloud cloud = UniformCloud(1000000, 41);
  std::ostringstream s;
  s.precision(4);
  for (int level = 1; level <= 3; ++level) {
    const double p = SeverityParams(K::kPointsReducing, level).Get(param::kDropProbability);
    auto stream = DeriveStream(1, "acceptance", K::kPointsReducing, StreamTag(kLidarTag, level));
    const double kept = static_cast<double>(ReducePoints(cloud, p, stream).size()) / cloud.size();
    c.Near(kept, 1 - p, 0.005, "retained fraction");
    s << "keep " << kept << " ";
  }
  for (int level = 1; level <= 3; ++level) {
    const double sigma = SeverityParams(K::kMotionBlur, level).Get(param::kSigmaT);
    auto stream = DeriveStream(1, "acceptance", K::kMotionBlur, StreamTag(kLidarTag, level));
    const PointCloud out = JitterPoints(cloud, sigma, stream);
    double ss[3] = {0, 0, 0};
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      ss[0] += std::pow(out.points[i].x - cloud.points[i].x, 2);
      ss[1] += std::pow(out.points[i].y - cloud.points[i].y, 2);
      ss[2] += std::pow(out.points[i].z - cloud.points[i].z, 2);
    }
    for (double v : ss) c.Near(std::sqrt(v / cloud.size()), sigma, 0.02 * sigma, "jitter sigma");
    s << "sigma " << std::sqrt(ss[0] / cloud.size()) << " ";
  }
  constexpr int kTrials = 10000;
  for (int level = 1; level <= 3; ++level) {
    const double p = SeverityParams(K::kMissingCamera, level).Get(param::kProbability);
    int dropped = 0;
    for (int t = 0; t < kTrials; ++t) {
      auto stream = DeriveStream(1, "trial-" + std::to_string(t), K::kMissingCamera,
                                 StreamTag("CAMERAS", level));
      for (bool d : DrawMissingCameras(p, stream)) dropped += d;
    }
    const double rate = static_cast<double>(dropped) / (kTrials * kNumCameras);
    c.Near(rate, p, 0.01, "missing-camera rate");
    s << "drop " << rate << " ";
  }
  std::vector<std::string> ids;
  std::vector<char> has_prev;
  for (int t = 0; t <= kTrials; ++t) {
    ids.push_back("trial-" + std::to_string(t));
    has_prev.push_back(t > 0);
  }
  for (int level = 1; level <= 3; ++level) {
    const double p = SeverityParams(K::kTemporalMisalignment, level).Get(param::kProbability);
    const StreamFactory streams = [&](std::string_view id, std::string_view sensor) {
      return DeriveStream(1, id, K::kTemporalMisalignment, StreamTag(sensor, level));
    };
    const FreezePlan plan = PlanTemporalMisalignment(
        ids, std::span<const bool>(reinterpret_cast<const bool*>(has_prev.data()), ids.size()),
        p, streams);
    long frozen = 0;
    for (int t = 1; t <= kTrials; ++t) {
      for (bool f : plan.frozen[t]) frozen += f;
    }
    const double rate = static_cast<double>(frozen) / (static_cast<double>(kTrials) * kNumSensors);
    c.Near(rate, p, 0.01, "frozen-frame rate");
    s << "freeze " << rate << " ";
  }
  const double t = Seconds(start);
  c.Expect(t < 30.0, "runtime " + std::to_string(t) + " s");
  s << "in " << t << " s";
  return c.Done(s.str());
}

// ---- 5 -------------------------------------------------------------------

Outcome ExactnessKernels() {
  Checker c;
  std::mt19937_64 rng(5);
  const PointCloud sweep = testing::MakeSweep(rng, 200);
  const auto bytes = EncodePointCloud(sweep);
  for (int level = 1; level <= 3; ++level) {
    const int k = static_cast<int>(SeverityParams(K::kBeamsReducing, level).Get(param::kBeams));
    const PointCloud out = ReduceBeams(sweep, k);
    std::set<int> rings;
    for (const auto& p : out.points) rings.insert(p.ring);
    c.Expect(static_cast<int>(rings.size()) == k, "ring classes at k = " + std::to_string(k));
    std::vector<std::uint8_t> expected;
    for (std::size_t i = 0; i < sweep.size(); ++i) {
      if (rings.count(sweep.points[i].ring)) {
        expected.insert(expected.end(), bytes.begin() + i * kPointRecordBytes,
                        bytes.begin() + (i + 1) * kPointRecordBytes);
      }
    }
    c.Expect(EncodePointCloud(out) == expected, "surviving records differ");
  }

  const PointCloud cloud = UniformCloud(100000, 6);
  double worst = 0.0;
  for (int level = 1; level <= 3; ++level) {
    auto params = SpatialMisalignmentParams::FromParamSet(
        SeverityParams(K::kSpatialMisalignment, level));
    params.probability = 1.0;
    params.translation_m = 0.0;
    auto stream = DeriveStream(1, "acceptance", K::kSpatialMisalignment, "LIDAR_TOP");
    const auto result = MisalignSpatial(cloud, params, stream);
    c.Expect(result.applied, "perturbation not applied");
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      const auto& a = cloud.points[i];
      const auto& b = result.cloud.points[i];
      worst = std::max(worst, std::abs(std::sqrt(a.x * a.x + a.y * a.y + a.z * a.z) -
                                       std::sqrt(b.x * b.x + b.y * b.y + b.z * b.z)));
    }
  }
  c.Expect(worst <= 1e-9, "norm drift " + std::to_string(worst));

  double pixel_err = 0.0, quant_err = 0.0;
  const ImageBuffer image = testing::MakeTexture(rng);
  for (int level = 1; level <= 3; ++level) {
    const FogParams fog = FogParams::FromParamSet(SeverityParams(K::kFog, level));
    for (int v = 0; v <= 255; ++v) {
      const double in = v / 255.0;
      pixel_err = std::max(pixel_err, std::abs(FogPixel(in, fog.visibility_m, fog) -
                                               (0.05 * in + 0.95 * fog.airlight)));
    }
    DepthMap depth(image.width(), image.height());
    for (int y = 0; y < image.height(); ++y) {
      for (int x = 0; x < image.width(); ++x) depth.Set(x, y, fog.visibility_m);
    }
    const ImageBuffer out = FogCamera(image, depth, fog);
    for (std::size_t i = 0; i < image.pixels().size(); ++i) {
      const double want = 0.05 * image.pixels()[i] / 255.0 + 0.95 * fog.airlight;
      quant_err = std::max(quant_err, std::abs(out.pixels()[i] / 255.0 - want));
    }
  }
  c.Expect(pixel_err <= 1e-12, "fog pixel error " + std::to_string(pixel_err));
  c.Expect(quant_err <= 1.0 / 255.0, "fog 8-bit error " + std::to_string(quant_err));
  std::ostringstream s;
  s << "beam rings exact, norm drift " << worst << ", fog error " << pixel_err
    << " (8-bit " << quant_err * 255 << "/255)";
  return c.Done(s.str());
}

// ---- 6 -------------------------------------------------------------------

double MeanRange(const PointCloud& cloud) {
  double s = 0.0;
  for (const auto& p : cloud.points) s += p.Range();
  return cloud.empty() ? 0.0 : s / cloud.size();
}

double MeanIntensity(const PointCloud& cloud) {
  double s = 0.0;
  for (const auto& p : cloud.points) s += p.intensity;
  return cloud.empty() ? 0.0 : s / cloud.size();
}

// Mean absolute difference between horizontal and vertical neighbors.
double Sharpness(const ImageBuffer& image) {
  double s = 0.0;
  long n = 0;
  for (int y = 0; y + 1 < image.height(); ++y) {
    for (int x = 0; x + 1 < image.width(); ++x) {
      for (int ch = 0; ch < 3; ++ch) {
        s += std::abs(image.at(x + 1, y, ch) - image.at(x, y, ch));
        s += std::abs(image.at(x, y + 1, ch) - image.at(x, y, ch));
        n += 2;
      }
    }
  }
  return s / n;
}

double Variance(const ImageBuffer& image) {
  double s = 0.0, ss = 0.0;
  for (std::uint8_t v : image.pixels()) {
    s += v / 255.0;
    ss += (v / 255.0) * (v / 255.0);
  }
  const double n = static_cast<double>(image.pixels().size());
  return ss / n - (s / n) * (s / n);
}

Outcome Monotonicity() {
  Checker c;
  std::mt19937_64 rng(9);
  const PointCloud sweep = testing::MakeSweep(rng, 400);
  const ImageBuffer texture = testing::MakeTexture(rng);
  const Calibration cam = testing::FixtureCameraCalib(0);
  const DepthMap depth = ProjectPoints(sweep, testing::FixtureLidarCalib(), cam,
                                       texture.width(), texture.height());

  std::ostringstream s;
  s.precision(4);
  double range = MeanRange(sweep), intensity = MeanIntensity(sweep), sharp = Sharpness(texture);
  s << "fog range/intensity/sharpness:";
  for (int level = 1; level <= 3; ++level) {
    const FogParams fog = FogParams::FromParamSet(SeverityParams(K::kFog, level));
    auto stream = DeriveStream(2, "acceptance", K::kFog, StreamTag(kLidarTag, level));
    const auto lidar = FogLidar(sweep, fog, stream);
    const ImageBuffer image = FogCamera(texture, depth, fog);
    const double r = MeanRange(lidar.cloud), i = MeanIntensity(lidar.cloud), sh = Sharpness(image);
    c.Expect(r <= range, "fog mean range rose at level " + std::to_string(level));
    c.Expect(i <= intensity, "fog mean intensity rose at level " + std::to_string(level));
    c.Expect(sh <= sharp, "fog sharpness rose at level " + std::to_string(level));
    range = r;
    intensity = i;
    sharp = sh;
    s << " " << r << "/" << i << "/" << sh;
  }

  const ImageBuffer gray(200, 200, std::vector<std::uint8_t>(200 * 200 * 3, 128));
  double variance = 0.0;
  s << "; darkness variance:";
  for (int level = 1; level <= 3; ++level) {
    const auto params = DarknessParams::FromParamSet(SeverityParams(K::kDarkness, level));
    auto stream = DeriveStream(2, "acceptance", K::kDarkness, StreamTag("CAM_FRONT", level));
    const double v = Variance(ApplyDarkness(gray, params, stream));
    c.Expect(v > variance, "darkness variance did not grow at level " + std::to_string(level));
    variance = v;
    s << " " << v;
  }

  double fraction = -1.0;
  s << "; snow replaced:";
  for (int level = 1; level <= 3; ++level) {
    const SnowParams snow = SnowParams::FromParamSet(SeverityParams(K::kSnow, level));
    auto stream = DeriveStream(2, "acceptance", K::kSnow, StreamTag(kLidarTag, level));
    const auto result = SnowLidar(sweep, snow, stream);
    const double f = static_cast<double>(std::count(result.fates.begin(), result.fates.end(),
                                                    PointFate::kReplaced)) /
                     sweep.size();
    c.Expect(f > fraction, "snow replacement did not grow at level " + std::to_string(level));
    fraction = f;
    s << " " << f;
  }
  return c.Done(s.str());
}

// ---- 7 and 9 ---------------------------------------------------------------

struct CorruptFixture {
  testing::TempDir tmp;
  fs::path manifest;
  std::map<std::string, std::string> input_hashes;
  std::map<std::string, std::string> out_hashes;  // workers = 1
  bool corrupted = false;
};

RunPlan FullPlan(const CorruptFixture& f, const fs::path& out, int workers) {
  RunPlan plan;
  plan.manifest = f.manifest;
  plan.out = out;
  plan.kinds.assign(std::begin(kAllKinds), std::end(kAllKinds));
  plan.seed = 20240;
  plan.workers = workers;
  return plan;
}

CorruptFixture& SharedFixture() {
  static CorruptFixture f;
  if (f.manifest.empty()) {
    testing::FixtureOptions options;
    // Enough samples that every LC kind touches both sensors at level 1.
    options.scenes = 6;
    options.samples_per_scene = 10;
    options.azimuths = 60;
    f.manifest = testing::WriteFixtureDataset(f.tmp.path() / "in", options);
    f.input_hashes = testing::HashTree(f.tmp.path() / "in");
  }
  return f;
}

Outcome Determinism() {
  Checker c;
  CorruptFixture& f = SharedFixture();
  std::ostringstream log;
  const fs::path a = f.tmp.path() / "w1", b = f.tmp.path() / "w8", again = f.tmp.path() / "w1b";
  const auto start = std::chrono::steady_clock::now();
  c.Expect(RunCorrupt(FullPlan(f, a, 1), log).ok(), "workers=1 run had failures");
  c.Expect(RunCorrupt(FullPlan(f, b, 8), log).ok(), "workers=8 run had failures");
  c.Expect(RunCorrupt(FullPlan(f, again, 1), log).ok(), "second workers=1 run had failures");
  const auto ha = testing::HashTree(a);
  c.Expect(ha == testing::HashTree(b), "trees differ between 1 and 8 workers");
  c.Expect(ha == testing::HashTree(again), "trees differ between identical runs");
  f.out_hashes = ha;
  f.corrupted = true;
  std::ostringstream s;
  s << ha.size() << " files identical across 3 runs (workers 1, 8, 1) in " << Seconds(start)
    << " s";
  return c.Done(s.str());
}

Outcome ModalityIsolation() {
  Checker c;
  CorruptFixture& f = SharedFixture();
  if (!f.corrupted) {
    std::ostringstream log;
    RunCorrupt(FullPlan(f, f.tmp.path() / "w1", 1), log);
    f.out_hashes = testing::HashTree(f.tmp.path() / "w1");
  }
  int rows = 0;
  for (K kind : kAllKinds) {
    for (int level = 1; level <= 3; ++level) {
      const std::string prefix = std::string(KindName(kind)) + "/" + std::to_string(level) + "/";
      std::size_t lidar_changed = 0, camera_changed = 0, lidar_total = 0, camera_total = 0;
      for (const auto& [path, hash] : f.out_hashes) {
        if (path.rfind(prefix, 0) != 0) continue;
        const std::string rel = path.substr(prefix.size());
        const bool is_lidar = rel.rfind("lidar/", 0) == 0;
        const bool is_cam = rel.rfind("CAM_", 0) == 0;
        if (!is_lidar && !is_cam) continue;
        const auto in = f.input_hashes.find(rel);
        const bool changed = in == f.input_hashes.end() || in->second != hash;
        (is_lidar ? lidar_changed : camera_changed) += changed;
        (is_lidar ? lidar_total : camera_total) += 1;
      }
      const std::string cell = std::string(KindName(kind)) + " L" + std::to_string(level);
      c.Expect(lidar_total == 60 && camera_total == 360, cell + ": missing outputs");
      switch (ModalityOf(kind)) {
        case Modality::kCamera:
          c.Expect(lidar_changed == 0, cell + ": LiDAR bytes changed");
          c.Expect(camera_changed > 0, cell + ": no image changed");
          break;
        case Modality::kLidar:
          c.Expect(camera_changed == 0, cell + ": image bytes changed");
          c.Expect(lidar_changed > 0, cell + ": no LiDAR file changed");
          break;
        case Modality::kBoth:
          c.Expect(lidar_changed > 0, cell + ": no LiDAR file changed");
          c.Expect(camera_changed > 0, cell + ": no image changed");
          break;
      }
      ++rows;
    }
  }
  return c.Done(std::to_string(rows) + " kind/level cells respect their modality column");
}

// ---- 8 -------------------------------------------------------------------

Outcome EvaluatorOracle() {
  Checker c;
  std::mt19937_64 rng(88);
  std::uniform_real_distribution<double> pos(-12, 12), jitter(-2.5, 2.5), u(0, 1);
  const char* labels[] = {"car", "pedestrian", "bus"};
  int scenes = 0;
  for (; scenes < 500; ++scenes) {
    std::vector<DetectionBox> gts, preds;
    const int ng = 1 + static_cast<int>(u(rng) * 9);
    for (int i = 0; i < ng; ++i) {
      DetectionBox g;
      g.sample_id = u(rng) < 0.5 ? "s0" : "s1";
      g.label = labels[static_cast<int>(u(rng) * 3)];
      g.center = Eigen::Vector3d(pos(rng), pos(rng), 0.5);
      g.size = Eigen::Vector3d(0.5 + 2 * u(rng), 0.5 + 4 * u(rng), 1 + u(rng));
      g.yaw = (u(rng) - 0.5) * 7;
      g.velocity = Eigen::Vector2d(u(rng), u(rng));
      g.attribute = u(rng) < 0.5 ? "moving" : "parked";
      gts.push_back(g);
    }
    const int np = static_cast<int>(u(rng) * (20 - ng));
    for (int i = 0; i < np; ++i) {
      DetectionBox p = gts[i % ng];
      p.center.x() += jitter(rng);
      p.center.y() += jitter(rng);
      p.yaw += jitter(rng);
      p.size *= 0.7 + 0.6 * u(rng);
      if (u(rng) < 0.2) p.label = labels[static_cast<int>(u(rng) * 3)];
      if (u(rng) < 0.2) p.velocity.reset();
      if (u(rng) < 0.3) p.attribute = "stopped";
      p.score = std::round(u(rng) * 5) / 5;
      preds.push_back(p);
    }
    for (const auto& g : gts) {
      for (double t : kDistanceThresholds) {
        const Matching m = MatchDetections(preds, gts, g.label, t);
        const testing::OracleCurve o = testing::OracleMatch(preds, gts, g.label, t);
        bool same = m.pairs.size() == o.pairs.size();
        for (std::size_t i = 0; same && i < m.pairs.size(); ++i) {
          same = static_cast<int>(m.pairs[i].pred) == o.pairs[i].first &&
                 static_cast<int>(m.pairs[i].gt) == o.pairs[i].second;
        }
        c.Expect(same, "matching differs in scene " + std::to_string(scenes));
        c.Near(*AveragePrecision(m), testing::OracleAp(o), 1e-9, "AP");
      }
    }
    const DetectionSummary got = EvaluateDetections(preds, gts);
    const testing::OracleScores want = testing::OracleEvaluate(preds, gts);
    c.Near(got.map, want.map, 1e-9, "mAP");
    const auto errors = got.errors.AsArray();
    for (int k = 0; k < 5; ++k) c.Near(errors[k], want.errors[k], 1e-9, "TP error");
    c.Near(got.nds, want.nds, 1e-9, "NDS");
  }

  // Edge cases: perfect predictions and no predictions.
  std::vector<DetectionBox> gts;
  for (int i = 0; i < 6; ++i) {
    DetectionBox g;
    g.sample_id = "edge";
    g.label = labels[i % 3];
    g.center = Eigen::Vector3d(5.0 * i, 0, 0);
    g.size = Eigen::Vector3d(2, 4, 1.5);
    g.velocity = Eigen::Vector2d(1, 1);
    g.attribute = "moving";
    gts.push_back(g);
  }
  std::vector<DetectionBox> perfect = gts;
  for (auto& p : perfect) p.score = 0.5;
  const double nds_one = EvaluateDetections(perfect, gts).nds;
  const double nds_zero = EvaluateDetections({}, gts).nds;
  c.Expect(nds_one == 1.0, "perfect NDS " + std::to_string(nds_one));
  c.Expect(nds_zero == 0.0, "empty NDS " + std::to_string(nds_zero));
  return c.Done(std::to_string(scenes) +
                " random scenes of <= 20 boxes match the brute-force oracle; NDS 1 and 0 exact");
}

}  // namespace
}  // namespace corrupt_forge

int main() {
  using corrupt_forge::Outcome;
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"metric reproduction", corrupt_forge::MetricReproduction},
      {"resistance chain", corrupt_forge::ResistanceChain},
      {"severity catalog", corrupt_forge::SeverityCatalog},
      {"statistical kernels", corrupt_forge::StatisticalKernels},
      {"exactness kernels", corrupt_forge::ExactnessKernels},
      {"monotonicity", corrupt_forge::Monotonicity},
      {"determinism", corrupt_forge::Determinism},
      {"evaluator oracle", corrupt_forge::EvaluatorOracle},
      {"modality isolation", corrupt_forge::ModalityIsolation},
  };
  int failed = 0;
  int index = 0;
  for (const auto& [name, run] : criteria) {
    ++index;
    Outcome outcome;
    try {
      outcome = run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    failed += !outcome.ok;
    std::cout << (outcome.ok ? "PASS" : "FAIL") << " criterion " << index << " (" << name
              << "): " << outcome.detail << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
