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

#include "corrupt_forge/robustmetrics.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include "corrupt_forge/dataio.h"
#include "corrupt_forge/errors.h"
#include "json.hpp"

namespace corrupt_forge {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

double CenterDistance(const DetectionBox& a, const DetectionBox& b) {
  return std::hypot(a.center.x() - b.center.x(), a.center.y() - b.center.y());
}

// Report column order.
constexpr std::array<CorruptionKind, 10> kReportOrder = {
    CorruptionKind::kBeamsReducing,
    CorruptionKind::kBrightness,
    CorruptionKind::kDarkness,
    CorruptionKind::kFog,
    CorruptionKind::kMissingCamera,
    CorruptionKind::kMotionBlur,
    CorruptionKind::kPointsReducing,
    CorruptionKind::kSnow,
    CorruptionKind::kSpatialMisalignment,
    CorruptionKind::kTemporalMisalignment,
};

std::string Fixed(double value, int digits = 3) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(digits) << value;
  std::string s = out.str();
  if (s == "-0.000") s = "0.000";
  return s;
}

std::string Exact(double value) {
  std::ostringstream out;
  out << std::setprecision(17) << value;
  return out.str();
}

std::string CellName(const std::optional<CorruptionKind>& c,
                     const std::optional<int>& s) {
  if (!c) return "clean";
  return std::string(KindName(*c)) + "/" + (s ? std::to_string(*s) : "?");
}

// Collects one model's metric grid, rejecting duplicates and mixed models.
struct Grid {
  std::optional<double> clean;
  std::map<CorruptionKind, std::array<std::optional<double>, kNumSeverities>>
      cells;
};

Grid CollectGrid(std::span<const MetricRecord> records, MetricBasis basis) {
  Grid grid;
  const std::string* model = nullptr;
  for (const MetricRecord& r : records) {
    if (r.metric != basis) continue;
    if (model && *model != r.model) {
      throw UsageError("records mix models '" + *model + "' and '" + r.model +
                       "'");
    }
    model = &r.model;
    if (!r.corruption) {
      if (r.severity) throw UsageError("clean record carries a severity");
      if (grid.clean) throw UsageError("duplicate clean record for " + r.model);
      grid.clean = r.value;
      continue;
    }
    if (!r.severity || *r.severity < 1 || *r.severity > kNumSeverities) {
      throw UsageError("record " + CellName(r.corruption, r.severity) +
                       " of " + r.model + " needs a severity in 1..3");
    }
    auto& slot = grid.cells[*r.corruption][*r.severity - 1];
    if (slot) {
      throw UsageError("duplicate record " +
                       CellName(r.corruption, r.severity) + " for " + r.model);
    }
    slot = r.value;
  }
  for (const auto& [kind, row] : grid.cells) {
    for (int s = 0; s < kNumSeverities; ++s) {
      if (!row[s]) {
        throw MetricError("incomplete grid: missing " +
                          CellName(kind, s + 1) +
                          (model ? " for " + *model : std::string()));
      }
    }
  }
  return grid;
}

Eigen::Vector3d JsonVec3(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 3) {
    throw FormatError(std::string(what) + " must be a 3-element array");
  }
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

DetectionBox BoxFromJson(const json& j, bool prediction) {
  DetectionBox box;
  box.sample_id = j.value("sample_id", "");
  box.center = JsonVec3(j.at("center"), "center");
  box.size = JsonVec3(j.at("size"), "size");
  if (!(box.size.minCoeff() > 0.0)) {
    throw FormatError("box sizes must be positive");
  }
  box.yaw = j.at("yaw").get<double>();
  if (j.contains("velocity") && !j["velocity"].is_null()) {
    const json& v = j["velocity"];
    if (!v.is_array() || v.size() != 2) {
      throw FormatError("velocity must be a 2-element array");
    }
    box.velocity = Eigen::Vector2d(v[0].get<double>(), v[1].get<double>());
  }
  box.label = j.at("label").get<std::string>();
  if (prediction) {
    box.score = j.at("score").get<double>();
    if (!(*box.score >= 0.0 && *box.score <= 1.0)) {
      throw FormatError("score must lie in [0, 1]");
    }
  } else if (j.contains("score")) {
    throw FormatError("ground-truth boxes carry no score");
  }
  box.attribute = j.value("attribute", "");
  return box;
}

json BoxToJson(const DetectionBox& box) {
  json j = {{"sample_id", box.sample_id},
            {"center", {box.center.x(), box.center.y(), box.center.z()}},
            {"size", {box.size.x(), box.size.y(), box.size.z()}},
            {"yaw", box.yaw},
            {"label", box.label},
            {"attribute", box.attribute}};
  if (box.velocity) j["velocity"] = {box.velocity->x(), box.velocity->y()};
  if (box.score) j["score"] = *box.score;
  return j;
}

json ReadJsonFile(const fs::path& path) {
  const auto bytes = ReadFileBytes(path);
  try {
    return json::parse(bytes.begin(), bytes.end());
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::vector<std::string> SplitCsvLine(std::string_view line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    std::string_view f = line.substr(start, pos - start);
    while (!f.empty() && (f.front() == ' ' || f.front() == '\t')) f.remove_prefix(1);
    while (!f.empty() && (f.back() == ' ' || f.back() == '\t' || f.back() == '\r')) {
      f.remove_suffix(1);
    }
    fields.emplace_back(f);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return fields;
}

}  // namespace

Matching MatchDetections(std::span<const DetectionBox> preds,
                         std::span<const DetectionBox> gts,
                         const std::string& label, double threshold) {
  Matching m;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (preds[i].label == label) m.order.push_back(i);
  }
  std::stable_sort(m.order.begin(), m.order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return preds[a].score.value_or(0.0) >
                            preds[b].score.value_or(0.0);
                   });
  std::vector<bool> taken(gts.size(), false);
  for (const DetectionBox& g : gts) {
    if (g.label == label) ++m.num_gt;
  }
  m.is_tp.reserve(m.order.size());
  for (std::size_t p : m.order) {
    std::optional<std::size_t> best;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (taken[g] || gts[g].label != label ||
          gts[g].sample_id != preds[p].sample_id) {
        continue;
      }
      const double d = CenterDistance(preds[p], gts[g]);
      if (d < best_dist) {
        best_dist = d;
        best = g;
      }
    }
    const bool hit = best && best_dist <= threshold;
    m.is_tp.push_back(hit);
    if (hit) {
      taken[*best] = true;
      m.pairs.push_back({p, *best, best_dist});
    }
  }
  return m;
}

double InterpolatedPrecision(const Matching& matching, double r) {
  if (matching.num_gt == 0 || matching.order.empty()) return 0.0;
  std::vector<double> recall;
  std::vector<double> precision;
  std::size_t tp = 0;
  for (std::size_t i = 0; i < matching.is_tp.size(); ++i) {
    if (matching.is_tp[i]) ++tp;
    recall.push_back(static_cast<double>(tp) / matching.num_gt);
    precision.push_back(static_cast<double>(tp) / (i + 1));
  }
  if (r > recall.back()) return 0.0;
  const auto upper = std::upper_bound(recall.begin(), recall.end(), r);
  if (upper == recall.begin()) return precision.front();
  const std::size_t j = static_cast<std::size_t>(upper - recall.begin()) - 1;
  if (j + 1 == recall.size()) return precision.back();
  const double t = (r - recall[j]) / (recall[j + 1] - recall[j]);
  return precision[j] + t * (precision[j + 1] - precision[j]);
}

std::optional<double> AveragePrecision(const Matching& matching) {
  if (matching.num_gt == 0) return std::nullopt;
  const int first = static_cast<int>(std::lround(100 * kMinRecall)) + 1;
  double sum = 0.0;
  int samples = 0;
  for (int k = first; k <= 100; ++k) {
    const double p = InterpolatedPrecision(matching, k / 100.0);
    sum += std::max(p, kMinPrecision);
    ++samples;
  }
  // Same as the mean of max(0, p - min) but exact for a perfect curve.
  return std::max(0.0, sum / samples - kMinPrecision) / (1.0 - kMinPrecision);
}

std::optional<double> AveragePrecision(std::span<const DetectionBox> preds,
                                       std::span<const DetectionBox> gts,
                                       const std::string& label,
                                       double threshold) {
  return AveragePrecision(MatchDetections(preds, gts, label, threshold));
}

double AlignedIou(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  const double inter = a.cwiseMin(b).prod();
  return inter / (a.prod() + b.prod() - inter);
}

double YawDifference(double a, double b) {
  double d = std::fmod(std::abs(a - b), 2.0 * M_PI);
  if (d > M_PI) d = 2.0 * M_PI - d;
  return d;
}

TpErrors ComputeTpErrors(const Matching& matching,
                         std::span<const DetectionBox> preds,
                         std::span<const DetectionBox> gts) {
  TpErrors e;
  if (matching.pairs.empty()) {
    e.defaulted = true;
    return e;
  }
  double ate = 0, ase = 0, aoe = 0, ave = 0, aae = 0;
  for (const MatchPair& pair : matching.pairs) {
    const DetectionBox& p = preds[pair.pred];
    const DetectionBox& g = gts[pair.gt];
    ate += CenterDistance(p, g);
    ase += 1.0 - AlignedIou(p.size, g.size);
    aoe += YawDifference(p.yaw, g.yaw);
    if (p.velocity && g.velocity) {
      ave += (*p.velocity - *g.velocity).norm();
    } else {
      ave += 1.0;
      e.velocity_defaulted = true;
    }
    aae += p.attribute == g.attribute ? 0.0 : 1.0;
  }
  const double n = static_cast<double>(matching.pairs.size());
  e.ate = ate / n;
  e.ase = ase / n;
  e.aoe = aoe / n;
  e.ave = ave / n;
  e.aae = aae / n;
  return e;
}

double Nds(double map, const std::array<double, 5>& errors) {
  double score = 5.0 * map;
  for (double e : errors) score += 1.0 - std::min(1.0, e);
  return score / 10.0;
}

double Nds(double map, const TpErrors& errors) {
  return Nds(map, errors.AsArray());
}

DetectionSummary EvaluateDetections(std::span<const DetectionBox> preds,
                                    std::span<const DetectionBox> gts) {
  DetectionSummary summary;
  std::set<std::string> gt_classes;
  for (const DetectionBox& g : gts) gt_classes.insert(g.label);
  std::set<std::string> pred_classes;
  for (const DetectionBox& p : preds) {
    if (!gt_classes.count(p.label)) pred_classes.insert(p.label);
  }
  summary.classes_without_gt.assign(pred_classes.begin(), pred_classes.end());
  if (gt_classes.empty()) {
    summary.errors.defaulted = true;
    summary.nds = Nds(0.0, summary.errors);
    return summary;
  }

  std::array<double, 5> error_sum{};
  double ap_sum = 0.0;
  for (const std::string& label : gt_classes) {
    double class_ap = 0.0;
    for (double threshold : kDistanceThresholds) {
      class_ap += *AveragePrecision(preds, gts, label, threshold);
    }
    class_ap /= kDistanceThresholds.size();
    summary.class_ap[label] = class_ap;
    ap_sum += class_ap;

    const Matching tp_match =
        MatchDetections(preds, gts, label, kTpDistanceThreshold);
    const TpErrors class_errors = ComputeTpErrors(tp_match, preds, gts);
    summary.errors.defaulted |= class_errors.defaulted;
    summary.errors.velocity_defaulted |= class_errors.velocity_defaulted;
    const auto values = class_errors.AsArray();
    for (std::size_t i = 0; i < values.size(); ++i) error_sum[i] += values[i];
  }
  const double n = static_cast<double>(gt_classes.size());
  summary.map = ap_sum / n;
  summary.errors.ate = error_sum[0] / n;
  summary.errors.ase = error_sum[1] / n;
  summary.errors.aoe = error_sum[2] / n;
  summary.errors.ave = error_sum[3] / n;
  summary.errors.aae = error_sum[4] / n;
  summary.nds = Nds(summary.map, summary.errors);
  return summary;
}

std::string_view MetricName(MetricBasis basis) {
  return basis == MetricBasis::kNds ? "NDS" : "mAP";
}

std::optional<MetricBasis> ParseMetric(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (lower == "nds") return MetricBasis::kNds;
  if (lower == "map") return MetricBasis::kMap;
  return std::nullopt;
}

ResistanceAbility ComputeResistanceAbility(std::span<const MetricRecord> records,
                                           MetricBasis basis) {
  const Grid grid = CollectGrid(records, basis);
  if (!grid.clean) throw MetricError("incomplete grid: missing clean record");
  if (*grid.clean == 0.0) {
    throw MetricError("clean metric is 0; resistance ability is undefined");
  }
  ResistanceAbility ra;
  ra.clean = *grid.clean;
  double sum = 0.0;
  for (const auto& [kind, row] : grid.cells) {
    auto& out = ra.per_severity[kind];
    double row_sum = 0.0;
    for (int s = 0; s < kNumSeverities; ++s) {
      out[s] = *row[s] / *grid.clean;
      row_sum += out[s];
    }
    ra.per_corruption[kind] = row_sum / kNumSeverities;
    sum += ra.per_corruption[kind];
  }
  ra.mean = grid.cells.empty() ? 0.0 : sum / grid.cells.size();
  return ra;
}

RelativeResistance ComputeRelativeResistance(
    std::span<const MetricRecord> candidate,
    std::span<const MetricRecord> baseline, MetricBasis basis) {
  const Grid cand = CollectGrid(candidate, basis);
  const Grid base = CollectGrid(baseline, basis);
  std::set<CorruptionKind> cand_kinds, base_kinds;
  for (const auto& [kind, row] : cand.cells) cand_kinds.insert(kind);
  for (const auto& [kind, row] : base.cells) base_kinds.insert(kind);
  if (cand_kinds != base_kinds) {
    throw MetricError("candidate and baseline cover different corruptions");
  }
  RelativeResistance rra;
  double sum = 0.0;
  for (const auto& [kind, row] : cand.cells) {
    double num = 0.0, den = 0.0;
    for (int s = 0; s < kNumSeverities; ++s) {
      num += *row[s];
      den += *base.cells.at(kind)[s];
    }
    if (den == 0.0) {
      throw MetricError("baseline metric sum is 0 for " +
                        std::string(KindName(kind)));
    }
    rra.per_corruption[kind] = num / den - 1.0;
    sum += rra.per_corruption[kind];
  }
  rra.mean = cand.cells.empty() ? 0.0 : sum / cand.cells.size();
  return rra;
}

RobustnessReport BuildReport(std::span<const MetricRecord> records,
                             const std::string& baseline, MetricBasis basis) {
  std::vector<std::string> models;
  std::map<std::string, std::vector<MetricRecord>> by_model;
  for (const MetricRecord& r : records) {
    if (r.metric != basis) continue;
    if (!by_model.count(r.model)) models.push_back(r.model);
    by_model[r.model].push_back(r);
  }
  if (!by_model.count(baseline)) {
    std::string found;
    for (const auto& m : models) found += (found.empty() ? "" : ", ") + m;
    throw UsageError("baseline '" + baseline + "' not found; models with " +
                     std::string(MetricName(basis)) +
                     " records: " + (found.empty() ? "(none)" : found));
  }

  RobustnessReport report;
  report.basis = basis;
  report.baseline = baseline;
  std::set<CorruptionKind> present;
  for (const std::string& model : models) {
    ModelRobustness m;
    m.model = model;
    m.ra = ComputeResistanceAbility(by_model[model], basis);
    if (model != baseline) {
      m.rra = ComputeRelativeResistance(by_model[model], by_model[baseline],
                                        basis);
    }
    for (const auto& [kind, value] : m.ra.per_corruption) present.insert(kind);
    report.models.push_back(std::move(m));
  }
  for (CorruptionKind kind : kReportOrder) {
    if (present.count(kind)) report.corruptions.push_back(kind);
  }
  return report;
}

std::string_view KindTitle(CorruptionKind kind) {
  switch (kind) {
    case CorruptionKind::kBeamsReducing: return "Beams Red.";
    case CorruptionKind::kBrightness: return "Brightness";
    case CorruptionKind::kDarkness: return "Darkness";
    case CorruptionKind::kFog: return "Fog";
    case CorruptionKind::kMissingCamera: return "Missing Cam.";
    case CorruptionKind::kMotionBlur: return "Motion Blur";
    case CorruptionKind::kPointsReducing: return "Points Red.";
    case CorruptionKind::kSnow: return "Snow";
    case CorruptionKind::kSpatialMisalignment: return "Spatial Mis.";
    case CorruptionKind::kTemporalMisalignment: return "Temporal Mis.";
  }
  return "?";
}

ReportArtifacts RenderReport(const RobustnessReport& report) {
  ReportArtifacts out;
  const std::string metric(MetricName(report.basis));

  // Column maxima over the rendered (rounded) values, so ties print alike.
  auto table = [&](const std::vector<std::pair<std::string, std::vector<double>>>& rows,
                   const std::string& mean_title) {
    std::ostringstream md;
    md << "| Model |";
    for (CorruptionKind kind : report.corruptions) md << ' ' << KindTitle(kind) << " |";
    md << ' ' << mean_title << " |\n|---|";
    for (std::size_t i = 0; i <= report.corruptions.size(); ++i) md << "---:|";
    md << '\n';
    const std::size_t cols = report.corruptions.size() + 1;
    std::vector<double> best(cols, -std::numeric_limits<double>::infinity());
    for (const auto& [name, values] : rows) {
      for (std::size_t c = 0; c < cols; ++c) {
        best[c] = std::max(best[c], std::stod(Fixed(values[c])));
      }
    }
    for (const auto& [name, values] : rows) {
      md << "| " << name << " |";
      for (std::size_t c = 0; c < cols; ++c) {
        const std::string cell = Fixed(values[c]);
        if (rows.size() > 1 && std::stod(cell) == best[c]) {
          md << " **" << cell << "** |";
        } else {
          md << ' ' << cell << " |";
        }
      }
      md << '\n';
    }
    return md.str();
  };

  std::vector<std::pair<std::string, std::vector<double>>> ra_rows;
  std::vector<std::pair<std::string, std::vector<double>>> rra_rows;
  for (const ModelRobustness& m : report.models) {
    std::vector<double> ra;
    for (CorruptionKind kind : report.corruptions) {
      const auto it = m.ra.per_corruption.find(kind);
      ra.push_back(it == m.ra.per_corruption.end()
                       ? std::numeric_limits<double>::quiet_NaN()
                       : it->second);
    }
    ra.push_back(m.ra.mean);
    ra_rows.emplace_back(m.model, std::move(ra));
    if (m.rra) {
      std::vector<double> rra;
      for (CorruptionKind kind : report.corruptions) {
        rra.push_back(m.rra->PercentOf(kind));
      }
      rra.push_back(m.rra->MeanPercent());
      rra_rows.emplace_back(m.model, std::move(rra));
    }
  }

  std::ostringstream md;
  md << "# Robustness report\n\n"
     << "Metric basis: " << metric << ". Baseline model: " << report.baseline
     << ".\n\n"
     << "Spatial misalignment datasets produced by `corrupt` translate the "
        "LiDAR by 0.1 m per degree of rotation unless overridden.\n\n"
     << "## Resistance ability (RA_c, " << metric << ")\n\n"
     << table(ra_rows, "mRA") << '\n'
     << "## Relative resistance ability (RRA_c, " << metric << ", %, vs. "
     << report.baseline << ")\n\n";
  if (rra_rows.empty()) {
    md << "No candidate models besides the baseline.\n";
  } else {
    md << table(rra_rows, "mRRA");
  }
  out.markdown = md.str();

  std::ostringstream cells;
  cells << "model,quantity,corruption,severity,value\n";
  for (const ModelRobustness& m : report.models) {
    cells << m.model << ",M_clean,clean,," << Exact(m.ra.clean) << '\n';
    for (CorruptionKind kind : report.corruptions) {
      const auto it = m.ra.per_severity.find(kind);
      if (it == m.ra.per_severity.end()) continue;
      for (int s = 0; s < kNumSeverities; ++s) {
        cells << m.model << ",RA_cs," << KindName(kind) << ',' << s + 1 << ','
              << Exact(it->second[s]) << '\n';
      }
      cells << m.model << ",RA_c," << KindName(kind) << ",,"
            << Exact(m.ra.per_corruption.at(kind)) << '\n';
    }
    cells << m.model << ",mRA,,," << Exact(m.ra.mean) << '\n';
    if (m.rra) {
      for (CorruptionKind kind : report.corruptions) {
        cells << m.model << ",RRA_c," << KindName(kind) << ",,"
              << Exact(m.rra->per_corruption.at(kind)) << '\n';
        cells << m.model << ",RRA_c_percent," << KindName(kind) << ",,"
              << Exact(m.rra->PercentOf(kind)) << '\n';
      }
      cells << m.model << ",mRRA,,," << Exact(m.rra->mean) << '\n';
      cells << m.model << ",mRRA_percent,,," << Exact(m.rra->MeanPercent())
            << '\n';
    }
  }
  out.cells_csv = cells.str();

  std::ostringstream curves;
  curves << "corruption,severity";
  for (const ModelRobustness& m : report.models) curves << ',' << m.model;
  curves << '\n';
  for (CorruptionKind kind : report.corruptions) {
    for (int s = 0; s < kNumSeverities; ++s) {
      curves << KindName(kind) << ',' << s + 1;
      for (const ModelRobustness& m : report.models) {
        const auto it = m.ra.per_severity.find(kind);
        curves << ',';
        if (it != m.ra.per_severity.end()) curves << Exact(it->second[s]);
      }
      curves << '\n';
    }
  }
  out.curves_csv = curves.str();
  return out;
}

void WriteReport(const ReportArtifacts& artifacts, const fs::path& out_dir) {
  auto write = [&](const std::string& text, const char* name) {
    WriteFileBytes(std::vector<std::uint8_t>(text.begin(), text.end()),
                   out_dir / name);
  };
  write(artifacts.markdown, "report.md");
  write(artifacts.cells_csv, "report.csv");
  write(artifacts.curves_csv, "ra_curves.csv");
}

std::vector<MetricRecord> ParseResultsCsv(const std::string& text) {
  std::vector<MetricRecord> records;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = SplitCsvLine(line);
    if (fields.size() == 1 && fields[0].empty()) continue;
    const auto where = "results line " + std::to_string(line_no) + ": ";
    if (!header_seen) {
      if (fields != std::vector<std::string>{"model", "corruption", "severity",
                                             "metric", "value"}) {
        throw FormatError(where +
                          "expected header model,corruption,severity,metric,value");
      }
      header_seen = true;
      continue;
    }
    if (fields.size() != 5) throw FormatError(where + "expected 5 fields");
    MetricRecord r;
    r.model = fields[0];
    if (r.model.empty()) throw FormatError(where + "empty model name");
    if (fields[1] != "clean") {
      r.corruption = ParseKind(fields[1]);
      if (!r.corruption) {
        throw FormatError(where + "unknown corruption '" + fields[1] + "'");
      }
    }
    if (!fields[2].empty()) {
      int s = 0;
      const auto [p, ec] =
          std::from_chars(fields[2].data(), fields[2].data() + fields[2].size(), s);
      if (ec != std::errc() || p != fields[2].data() + fields[2].size()) {
        throw FormatError(where + "bad severity '" + fields[2] + "'");
      }
      r.severity = s;
    }
    const auto metric = ParseMetric(fields[3]);
    if (!metric) throw FormatError(where + "unknown metric '" + fields[3] + "'");
    r.metric = *metric;
    try {
      std::size_t used = 0;
      r.value = std::stod(fields[4], &used);
      if (used != fields[4].size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw FormatError(where + "bad value '" + fields[4] + "'");
    }
    records.push_back(std::move(r));
  }
  if (!header_seen) throw FormatError("results table is empty");
  return records;
}

std::vector<MetricRecord> ReadResultsCsv(const fs::path& path) {
  const auto bytes = ReadFileBytes(path);
  try {
    return ParseResultsCsv(std::string(bytes.begin(), bytes.end()));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::string FormatResultsCsv(std::span<const MetricRecord> records) {
  std::ostringstream out;
  out << "model,corruption,severity,metric,value\n";
  for (const MetricRecord& r : records) {
    if (r.model.find(',') != std::string::npos) {
      throw UsageError("model name '" + r.model + "' contains a comma");
    }
    out << r.model << ','
        << (r.corruption ? std::string(KindName(*r.corruption)) : "clean")
        << ',' << (r.severity ? std::to_string(*r.severity) : "") << ','
        << MetricName(r.metric) << ',' << Exact(r.value) << '\n';
  }
  return out.str();
}

PredictionFile ReadPredictionFile(const fs::path& path) {
  const json doc = ReadJsonFile(path);
  PredictionFile file;
  try {
    file.model = doc.at("model").get<std::string>();
    const std::string corruption = doc.at("corruption").get<std::string>();
    if (corruption != "clean") {
      file.corruption = ParseKind(corruption);
      if (!file.corruption) {
        throw FormatError("unknown corruption '" + corruption + "'");
      }
      file.severity = doc.at("severity").get<int>();
    } else if (doc.contains("severity") && !doc["severity"].is_null()) {
      throw FormatError("clean predictions carry no severity");
    }
    for (const json& box : doc.at("predictions")) {
      file.predictions.push_back(BoxFromJson(box, true));
    }
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  return file;
}

std::vector<DetectionBox> ReadGroundTruthFile(const fs::path& path) {
  const json doc = ReadJsonFile(path);
  std::vector<DetectionBox> gts;
  try {
    for (const json& box : doc.at("ground_truth")) {
      gts.push_back(BoxFromJson(box, false));
    }
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  return gts;
}

std::string FormatPredictionFile(const PredictionFile& file) {
  json doc = {{"model", file.model},
              {"corruption", file.corruption
                                 ? std::string(KindName(*file.corruption))
                                 : "clean"},
              {"severity", file.severity ? json(*file.severity) : json(nullptr)},
              {"predictions", json::array()}};
  for (const DetectionBox& box : file.predictions) {
    doc["predictions"].push_back(BoxToJson(box));
  }
  return doc.dump(2) + "\n";
}

std::string FormatGroundTruthFile(std::span<const DetectionBox> gts) {
  json doc = {{"ground_truth", json::array()}};
  for (const DetectionBox& box : gts) doc["ground_truth"].push_back(BoxToJson(box));
  return doc.dump(2) + "\n";
}

}  // namespace corrupt_forge
