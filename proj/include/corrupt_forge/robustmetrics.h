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

#ifndef CORRUPT_FORGE_ROBUSTMETRICS_H_
#define CORRUPT_FORGE_ROBUSTMETRICS_H_

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "corrupt_forge/types.h"

namespace corrupt_forge {

// ---------------------------------------------------------------------------
// Detection evaluation (center-distance matching, AP, TP errors, NDS).
// ---------------------------------------------------------------------------

struct DetectionBox {
  std::string sample_id;  // boxes only match within the same sample
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  Eigen::Vector3d size = Eigen::Vector3d::Ones();  // (w, l, h)
  double yaw = 0.0;
  std::optional<Eigen::Vector2d> velocity;
  std::string label;
  std::optional<double> score;  // predictions only
  std::string attribute;
};

inline constexpr std::array<double, 4> kDistanceThresholds = {0.5, 1.0, 2.0,
                                                               4.0};
inline constexpr double kTpDistanceThreshold = 2.0;
inline constexpr double kMinRecall = 0.1;
inline constexpr double kMinPrecision = 0.1;

struct MatchPair {
  std::size_t pred = 0;  // index into the prediction list
  std::size_t gt = 0;    // index into the ground-truth list
  double distance = 0.0;
};

// Result of greedy matching for one class at one threshold.
struct Matching {
  std::vector<std::size_t> order;  // class predictions, descending score
  std::vector<bool> is_tp;         // parallel to `order`
  std::vector<MatchPair> pairs;
  std::size_t num_gt = 0;
};

// Predictions in descending score order (ties by input order) each claim the
// nearest unmatched same-class, same-sample ground truth whose x-y center
// distance is at most `threshold`.
Matching MatchDetections(std::span<const DetectionBox> preds,
                         std::span<const DetectionBox> gts,
                         const std::string& label, double threshold);

// Precision interpolated at recall `r` from the PR points of a matching,
// linear between operating points and 0 past the highest recall reached.
double InterpolatedPrecision(const Matching& matching, double r);

// Mean of max(0, p(r) - 0.1) / 0.9 over r = 0.11, 0.12, ..., 1.00. Nullopt
// when the class has no ground truth.
std::optional<double> AveragePrecision(const Matching& matching);
std::optional<double> AveragePrecision(std::span<const DetectionBox> preds,
                                       std::span<const DetectionBox> gts,
                                       const std::string& label,
                                       double threshold);

struct TpErrors {
  double ate = 1.0;  // meters, x-y center distance
  double ase = 1.0;  // 1 - IoU after aligning centers and yaw
  double aoe = 1.0;  // radians, wrapped to [0, pi]
  double ave = 1.0;  // m/s
  double aae = 1.0;  // 1 - attribute accuracy
  bool defaulted = false;           // empty matching
  bool velocity_defaulted = false;  // some pair lacked a velocity

  std::array<double, 5> AsArray() const { return {ate, ase, aoe, ave, aae}; }
};

double AlignedIou(const Eigen::Vector3d& a, const Eigen::Vector3d& b);
double YawDifference(double a, double b);

// Means over the matched pairs; an empty matching yields 1 everywhere with
// `defaulted` set. A pair missing a velocity on either side counts as 1.
TpErrors ComputeTpErrors(const Matching& matching,
                         std::span<const DetectionBox> preds,
                         std::span<const DetectionBox> gts);

// (5 * mAP + sum(1 - min(1, e))) / 10
double Nds(double map, const std::array<double, 5>& errors);
double Nds(double map, const TpErrors& errors);

struct DetectionSummary {
  double map = 0.0;
  TpErrors errors;  // class means
  double nds = 0.0;
  std::map<std::string, double> class_ap;  // classes present in ground truth
  std::vector<std::string> classes_without_gt;
};

// mAP over ground-truth classes and the four thresholds; TP errors from the
// 2 m matching, averaged over the same classes.
DetectionSummary EvaluateDetections(std::span<const DetectionBox> preds,
                                    std::span<const DetectionBox> gts);

// ---------------------------------------------------------------------------
// Robustness scores.
// ---------------------------------------------------------------------------

enum class MetricBasis { kNds, kMap };
std::string_view MetricName(MetricBasis basis);  // "NDS" / "mAP"
std::optional<MetricBasis> ParseMetric(std::string_view name);

inline constexpr int kNumSeverities = 3;

struct MetricRecord {
  std::string model;
  std::optional<CorruptionKind> corruption;  // nullopt = clean
  std::optional<int> severity;               // 1..3, nullopt when clean
  MetricBasis metric = MetricBasis::kNds;
  double value = 0.0;
};

struct ResistanceAbility {
  double clean = 0.0;
  std::map<CorruptionKind, std::array<double, kNumSeverities>> per_severity;
  std::map<CorruptionKind, double> per_corruption;
  double mean = 0.0;  // mRA
};

// RA_{c,s} = M_{c,s} / M_clean, RA_c = mean over s, mRA = mean over the
// corruptions present. `records` belong to one model; other metric bases
// are ignored. Throws MetricError on M_clean = 0 or a missing cell.
ResistanceAbility ComputeResistanceAbility(std::span<const MetricRecord> records,
                                           MetricBasis basis);

struct RelativeResistance {
  std::map<CorruptionKind, double> per_corruption;  // fraction
  double mean = 0.0;                                // fraction

  double PercentOf(CorruptionKind kind) const {
    return 100.0 * per_corruption.at(kind);
  }
  double MeanPercent() const { return 100.0 * mean; }
};

// RRA_c = sum_s M_{c,s} / sum_s M_{baseline,c,s} - 1, mRRA = mean over c.
// Both models must cover the same corruption grid.
RelativeResistance ComputeRelativeResistance(
    std::span<const MetricRecord> candidate,
    std::span<const MetricRecord> baseline, MetricBasis basis);

struct ModelRobustness {
  std::string model;
  ResistanceAbility ra;
  std::optional<RelativeResistance> rra;  // absent for the baseline
};

struct RobustnessReport {
  MetricBasis basis = MetricBasis::kNds;
  std::string baseline;
  std::vector<CorruptionKind> corruptions;  // table column order
  std::vector<ModelRobustness> models;      // first-appearance order
};

// Throws UsageError (listing the models found) if the baseline is missing.
RobustnessReport BuildReport(std::span<const MetricRecord> records,
                             const std::string& baseline, MetricBasis basis);

struct ReportArtifacts {
  std::string markdown;    // report.md
  std::string cells_csv;   // report.csv
  std::string curves_csv;  // ra_curves.csv
};

ReportArtifacts RenderReport(const RobustnessReport& report);
void WriteReport(const ReportArtifacts& artifacts,
                 const std::filesystem::path& out_dir);

// Human-readable column title, e.g. "Beams Red.".
std::string_view KindTitle(CorruptionKind kind);

// ---------------------------------------------------------------------------
// File formats.
// ---------------------------------------------------------------------------

// Flat `model,corruption,severity,metric,value` table.
std::vector<MetricRecord> ParseResultsCsv(const std::string& text);
std::vector<MetricRecord> ReadResultsCsv(const std::filesystem::path& path);
std::string FormatResultsCsv(std::span<const MetricRecord> records);

struct PredictionFile {
  std::string model;
  std::optional<CorruptionKind> corruption;
  std::optional<int> severity;
  std::vector<DetectionBox> predictions;
};

// Throws FormatError naming the file on malformed content.
PredictionFile ReadPredictionFile(const std::filesystem::path& path);
std::vector<DetectionBox> ReadGroundTruthFile(const std::filesystem::path& path);
std::string FormatPredictionFile(const PredictionFile& file);
std::string FormatGroundTruthFile(std::span<const DetectionBox> gts);

}  // namespace corrupt_forge

#endif  // CORRUPT_FORGE_ROBUSTMETRICS_H_
