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

#include "corrupt_forge/pipeline.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <set>
#include <thread>
#include <tuple>

#include "corrupt_forge/dataio.h"
#include "corrupt_forge/errors.h"
#include "corrupt_forge/geometric.h"
#include "corrupt_forge/photometric.h"
#include "corrupt_forge/random.h"
#include "corrupt_forge/weather.h"
#include "json.hpp"

namespace corrupt_forge {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::string_view kCameraGroupTag = "CAMERAS";

class Logger {
 public:
  explicit Logger(std::ostream& out) : out_(out) {}
  void Line(const std::string& text) {
    std::lock_guard<std::mutex> lock(mu_);
    out_ << text << '\n';
    out_.flush();
  }

 private:
  std::ostream& out_;
  std::mutex mu_;
};

struct LeafContext {
  const DatasetManifest& input;
  CorruptionKind kind;
  int level;
  const ParamSet& params;
  std::uint64_t seed;
  fs::path leaf;

  RandomStream Stream(std::string_view sample_id,
                      std::string_view sensor) const {
    return DeriveStream(seed, sample_id, kind, StreamTag(sensor, level));
  }
};

std::string CheckedRelative(const std::string& path) {
  const fs::path p = fs::path(path).lexically_normal();
  if (p.empty() || p.is_absolute() || *p.begin() == "..") {
    throw DataError("path leaves the dataset root: " + path);
  }
  return p.generic_string();
}

std::string WithExtension(const std::string& path, const fs::path& ext) {
  fs::path p(path);
  p.replace_extension(ext);
  return p.generic_string();
}

void CopyInto(const LeafContext& ctx, const std::string& src,
              const std::string& dst) {
  WriteFileBytes(ReadFileBytes(ctx.input.Resolve(CheckedRelative(src))),
                 ctx.leaf / CheckedRelative(dst));
}

SampleDescriptor ProcessSample(const LeafContext& ctx, std::size_t index) {
  const SampleDescriptor& in = ctx.input.samples[index];
  SampleDescriptor out = in;
  out.corruption.reset();
  SampleCorruptionRecord record;
  const Modality modality = ModalityOf(ctx.kind);

  std::optional<PointCloud> clean;
  auto clean_cloud = [&]() -> const PointCloud& {
    if (!clean) clean = ReadPointCloud(ctx.input.Resolve(CheckedRelative(in.lidar.path)));
    return *clean;
  };

  std::optional<PointCloud> cloud;
  if (modality != Modality::kCamera) {
    RandomStream stream = ctx.Stream(in.sample_id, kLidarTag);
    switch (ctx.kind) {
      case CorruptionKind::kPointsReducing:
        cloud = ReducePoints(clean_cloud(),
                             ctx.params.Get(param::kDropProbability), stream);
        break;
      case CorruptionKind::kBeamsReducing:
        cloud = ReduceBeams(clean_cloud(), static_cast<int>(std::lround(
                                               ctx.params.Get(param::kBeams))));
        break;
      case CorruptionKind::kMotionBlur:
        cloud = JitterPoints(clean_cloud(), ctx.params.Get(param::kSigmaT),
                             stream);
        break;
      case CorruptionKind::kSpatialMisalignment: {
        auto result = MisalignSpatial(
            clean_cloud(), SpatialMisalignmentParams::FromParamSet(ctx.params),
            stream);
        if (result.applied) {
          cloud = std::move(result.cloud);
          record.spatial = result.perturbation;
        }
        break;
      }
      case CorruptionKind::kFog:
        cloud = FogLidar(clean_cloud(), FogParams::FromParamSet(ctx.params),
                         stream).cloud;
        break;
      case CorruptionKind::kSnow:
        cloud = SnowLidar(clean_cloud(), SnowParams::FromParamSet(ctx.params),
                          stream).cloud;
        break;
      default:
        break;
    }
  }
  if (cloud) {
    WritePointCloud(*cloud, ctx.leaf / CheckedRelative(out.lidar.path));
  } else {
    CopyInto(ctx, in.lidar.path, out.lidar.path);
  }

  std::array<bool, kNumCameras> dropped{};
  if (ctx.kind == CorruptionKind::kMissingCamera) {
    RandomStream stream = ctx.Stream(in.sample_id, kCameraGroupTag);
    dropped = DrawMissingCameras(ctx.params.Get(param::kProbability), stream);
  }
  for (int i = 0; i < kNumCameras; ++i) {
    const CameraEntry& cam = in.cameras[i];
    CameraEntry& out_cam = out.cameras[i];
    if (modality == Modality::kLidar || cam.absent) {
      CopyInto(ctx, cam.path, out_cam.path);
      continue;
    }
    const std::string_view name = kCameraNames[i];
    RandomStream stream = ctx.Stream(in.sample_id, name);
    const ImageBuffer image = ReadImage(ctx.input.Resolve(CheckedRelative(cam.path)));
    std::optional<ImageBuffer> changed;
    switch (ctx.kind) {
      case CorruptionKind::kDarkness:
        changed = ApplyDarkness(image, DarknessParams::FromParamSet(ctx.params),
                                stream);
        break;
      case CorruptionKind::kBrightness:
        changed = ApplyBrightness(image, ctx.params.Get(param::kAmount));
        break;
      case CorruptionKind::kMissingCamera:
        if (dropped[i]) {
          changed = ImageBuffer(image.width(), image.height());
          out_cam.absent = true;
        }
        break;
      case CorruptionKind::kMotionBlur:
        changed = BlurImage(image, MotionBlurParams::FromParamSet(ctx.params),
                            stream);
        break;
      case CorruptionKind::kSpatialMisalignment: {
        auto result = MisalignCamera(
            image, *cam.calib.intrinsic,
            SpatialMisalignmentParams::FromParamSet(ctx.params), stream);
        if (result.applied) {
          changed = std::move(result.image);
          record.camera_spatial[std::string(name)] = result.perturbation;
        }
        break;
      }
      case CorruptionKind::kFog: {
        const DepthMap depth =
            ProjectPoints(clean_cloud(), in.lidar.calib, cam.calib,
                          image.width(), image.height());
        changed = FogCamera(image, depth, FogParams::FromParamSet(ctx.params));
        break;
      }
      case CorruptionKind::kSnow:
        changed = SnowCamera(image, SnowParams::FromParamSet(ctx.params), stream);
        break;
      default:
        break;
    }
    if (changed) {
      out_cam.path = WithExtension(cam.path, ".png");
      WritePng(*changed, ctx.leaf / CheckedRelative(out_cam.path));
    } else {
      CopyInto(ctx, cam.path, out_cam.path);
    }
  }

  if (record.spatial || !record.camera_spatial.empty()) out.corruption = record;
  return out;
}

SampleDescriptor ProcessFrozenSample(
    const LeafContext& ctx, std::size_t index,
    const std::array<bool, kNumSensors>& frozen) {
  const SampleDescriptor& in = ctx.input.samples[index];
  SampleDescriptor out = in;
  out.corruption.reset();
  const SampleDescriptor* prev = nullptr;
  if (in.prev_sample_id) {
    prev = &ctx.input.samples.at(*ctx.input.Find(*in.prev_sample_id));
  }
  SampleCorruptionRecord record;

  if (frozen[0] && prev) {
    out.lidar.path = WithExtension(in.lidar.path,
                                   fs::path(prev->lidar.path).extension());
    CopyInto(ctx, prev->lidar.path, out.lidar.path);
    record.frozen.emplace_back(SensorTag(0));
  } else {
    CopyInto(ctx, in.lidar.path, out.lidar.path);
  }
  for (int i = 0; i < kNumCameras; ++i) {
    CameraEntry& out_cam = out.cameras[i];
    if (frozen[i + 1] && prev) {
      const CameraEntry& src = prev->cameras[i];
      out_cam.path = WithExtension(in.cameras[i].path,
                                   fs::path(src.path).extension());
      out_cam.absent = src.absent;
      CopyInto(ctx, src.path, out_cam.path);
      record.frozen.emplace_back(SensorTag(i + 1));
    } else {
      CopyInto(ctx, in.cameras[i].path, out_cam.path);
    }
  }
  if (!record.frozen.empty()) out.corruption = record;
  return out;
}

bool FilesPresent(const fs::path& root, const SampleDescriptor& s) {
  if (!fs::exists(root / s.lidar.path)) return false;
  return std::all_of(s.cameras.begin(), s.cameras.end(),
                     [&](const CameraEntry& c) { return fs::exists(root / c.path); });
}

std::optional<DatasetManifest> LoadExistingLeaf(const fs::path& leaf,
                                                Logger& logger) {
  const fs::path file = leaf / kManifestFileName;
  if (!fs::exists(file)) return std::nullopt;
  try {
    const auto bytes = ReadFileBytes(file);
    return ParseManifest(std::string(bytes.begin(), bytes.end()), leaf);
  } catch (const Error& e) {
    logger.Line("ignoring unreadable manifest " + file.string() + ": " +
                e.what());
    return std::nullopt;
  }
}

// Drops failed samples and relinks their successors to the nearest kept
// predecessor.
std::vector<SampleDescriptor> AssembleKept(
    const DatasetManifest& input,
    const std::vector<std::optional<SampleDescriptor>>& results) {
  std::set<std::string> kept;
  for (const auto& r : results) {
    if (r) kept.insert(r->sample_id);
  }
  std::vector<SampleDescriptor> samples;
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (!results[i]) continue;
    SampleDescriptor s = *results[i];
    std::optional<std::string> prev = input.samples[i].prev_sample_id;
    while (prev && !kept.count(*prev)) {
      prev = input.samples[*input.Find(*prev)].prev_sample_id;
    }
    s.prev_sample_id = prev;
    samples.push_back(std::move(s));
  }
  return samples;
}

LeafSummary RunLeaf(const RunPlan& plan, const DatasetManifest& input,
                    CorruptionKind kind, int level, const ParamSet& params,
                    Logger& logger, std::vector<SampleFailure>& failures) {
  const std::string kind_name(KindName(kind));
  const std::string prefix =
      "[" + kind_name + "/" + std::to_string(level) + "] ";
  LeafContext ctx{input, kind, level, params, plan.seed,
                  LeafDirectory(plan.out, kind, level)};
  const CorruptionMetadata metadata{kind_name, level, plan.seed,
                                    std::string(kToolVersion)};

  std::optional<DatasetManifest> existing;
  if (plan.overwrite == OverwritePolicy::kSkipExisting) {
    existing = LoadExistingLeaf(ctx.leaf, logger);
    if (existing && existing->corruption != metadata) {
      std::string found = "no corruption metadata";
      if (const auto& c = existing->corruption) {
        found = "kind " + c->kind + ", level " + std::to_string(c->level) +
                ", seed " + std::to_string(c->seed) + ", version " +
                c->tool_version;
      }
      throw UsageError(ctx.leaf.string() + " holds output of a different plan (" +
                       found + "); rerun with --overwrite or choose another --out");
    }
  }

  const std::size_t n = input.samples.size();
  std::vector<std::optional<SampleDescriptor>> results(n);
  std::vector<std::optional<std::string>> errors(n);
  std::vector<char> skipped(n, 0);
  if (existing) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto found = existing->Find(input.samples[i].sample_id);
      if (!found) continue;
      const SampleDescriptor& prior = existing->samples[*found];
      if (!FilesPresent(ctx.leaf, prior)) continue;
      results[i] = prior;
      skipped[i] = 1;
    }
  }

  auto run_one = [&](std::size_t i, auto&& body) {
    const std::string& id = input.samples[i].sample_id;
    if (skipped[i]) {
      logger.Line(prefix + id + " skipped");
      return;
    }
    try {
      results[i] = body();
      logger.Line(prefix + id + " ok");
    } catch (const std::exception& e) {
      errors[i] = e.what();
      logger.Line(prefix + id + " FAILED: " + e.what());
    }
  };

  if (kind == CorruptionKind::kTemporalMisalignment) {
    std::vector<std::vector<std::size_t>> scenes;
    std::map<std::string, std::size_t> scene_index;
    for (std::size_t i = 0; i < n; ++i) {
      const auto [it, inserted] =
          scene_index.emplace(input.samples[i].scene_id, scenes.size());
      if (inserted) scenes.emplace_back();
      scenes[it->second].push_back(i);
    }
    const double p = params.Get(param::kProbability);
    const StreamFactory streams = [&](std::string_view id,
                                      std::string_view sensor) {
      return ctx.Stream(id, sensor);
    };
    ParallelFor(scenes.size(), plan.workers, [&](std::size_t s) {
      const auto& members = scenes[s];
      std::vector<std::string> ids;
      auto has_prev = std::make_unique<bool[]>(members.size());
      for (std::size_t k = 0; k < members.size(); ++k) {
        ids.push_back(input.samples[members[k]].sample_id);
        has_prev[k] = input.samples[members[k]].prev_sample_id.has_value();
      }
      const FreezePlan freeze = PlanTemporalMisalignment(
          ids, std::span<const bool>(has_prev.get(), members.size()), p,
          streams);
      for (std::size_t k = 0; k < members.size(); ++k) {
        run_one(members[k], [&] {
          return ProcessFrozenSample(ctx, members[k], freeze.frozen[k]);
        });
      }
    });
  } else {
    ParallelFor(n, plan.workers, [&](std::size_t i) {
      run_one(i, [&] { return ProcessSample(ctx, i); });
    });
  }

  LeafSummary summary;
  summary.kind = kind_name;
  summary.level = level;
  for (std::size_t i = 0; i < n; ++i) {
    if (skipped[i]) {
      ++summary.skipped;
    } else if (errors[i]) {
      ++summary.failed;
      failures.push_back(
          {kind_name, level, input.samples[i].sample_id, *errors[i]});
    } else {
      ++summary.processed;
    }
  }

  DatasetManifest out;
  out.dataset_root = ctx.leaf;
  out.samples = AssembleKept(input, results);
  out.corruption = metadata;
  const std::string text = SerializeManifest(out);
  const fs::path manifest_file = ctx.leaf / kManifestFileName;
  bool unchanged = false;
  if (fs::exists(manifest_file)) {
    const auto prior = ReadFileBytes(manifest_file);
    unchanged = std::equal(prior.begin(), prior.end(), text.begin(), text.end());
  }
  if (!unchanged) {
    WriteFileBytes(std::vector<std::uint8_t>(text.begin(), text.end()),
                   manifest_file);
    summary.manifest_written = true;
  }
  return summary;
}

fs::path Canonical(const fs::path& p) {
  return fs::weakly_canonical(fs::absolute(p));
}

}  // namespace

void RunPlan::Validate() const {
  if (manifest.empty()) throw UsageError("no input manifest given");
  if (out.empty()) throw UsageError("no output root given");
  if (kinds.empty()) throw UsageError("no corruption kind given");
  if (workers < 1) throw UsageError("worker count must be at least 1");
  for (int level : levels) {
    if (level < 1) throw UsageError("severity levels start at 1");
  }
}

std::optional<int> WorkersFromEnv() {
  const char* value = std::getenv(std::string(kWorkersEnvVar).c_str());
  if (value == nullptr || *value == '\0') return std::nullopt;
  char* end = nullptr;
  const long n = std::strtol(value, &end, 10);
  if (*end != '\0' || n < 1 || n > 4096) {
    throw UsageError(std::string(kWorkersEnvVar) + "='" + value +
                     "' is not a positive worker count");
  }
  return static_cast<int>(n);
}

void ParallelFor(std::size_t n, int workers,
                 const std::function<void(std::size_t)>& fn) {
  const std::size_t threads =
      std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, workers)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

std::string RunSummary::ToJson() const {
  json doc;
  doc["seed"] = seed;
  doc["tool_version"] = kToolVersion;
  doc["wall_time_s"] = wall_time_s;
  std::size_t processed = 0, skipped = 0;
  doc["leaves"] = json::array();
  for (const LeafSummary& leaf : leaves) {
    processed += leaf.processed;
    skipped += leaf.skipped;
    doc["leaves"].push_back({{"kind", leaf.kind},
                             {"level", leaf.level},
                             {"processed", leaf.processed},
                             {"skipped", leaf.skipped},
                             {"failed", leaf.failed},
                             {"manifest_written", leaf.manifest_written}});
  }
  doc["processed"] = processed;
  doc["skipped"] = skipped;
  doc["failed"] = failures.size();
  doc["failures"] = json::array();
  for (const SampleFailure& f : failures) {
    doc["failures"].push_back({{"kind", f.kind},
                               {"level", f.level},
                               {"sample_id", f.sample_id},
                               {"error", f.message}});
  }
  return doc.dump(2);
}

fs::path LeafDirectory(const fs::path& out, CorruptionKind kind, int level) {
  return out / std::string(KindName(kind)) / std::to_string(level);
}

std::string StreamTag(std::string_view sensor, int level) {
  return std::string(sensor) + "#" + std::to_string(level);
}

RunSummary RunCorrupt(const RunPlan& plan, std::ostream& log) {
  plan.Validate();
  const auto start = std::chrono::steady_clock::now();
  const SeverityConfig config = plan.params_file
                                    ? SeverityConfig::FromOverrideFile(*plan.params_file)
                                    : SeverityConfig::Default();
  const DatasetManifest input = LoadManifest(plan.manifest);
  const fs::path input_root = Canonical(input.dataset_root);
  if (Canonical(plan.out) == input_root) {
    throw UsageError("output root must differ from the input dataset root");
  }

  struct Cell {
    CorruptionKind kind;
    int level;
    const ParamSet* params;
  };
  std::vector<Cell> cells;
  for (CorruptionKind kind : plan.kinds) {
    const std::vector<int> defined = config.Levels(kind);
    const std::vector<int> levels = plan.levels.empty() ? defined : plan.levels;
    for (int level : levels) {
      if (std::find(defined.begin(), defined.end(), level) == defined.end()) {
        std::string known;
        for (int d : defined) known += (known.empty() ? "" : ", ") + std::to_string(d);
        throw UsageError(std::string(KindName(kind)) + " has no level " +
                         std::to_string(level) + "; defined: " + known);
      }
      cells.push_back({kind, level, &config.Params(kind, level)});
      if (Canonical(LeafDirectory(plan.out, kind, level)) == input_root) {
        throw UsageError("output leaf would overwrite the input dataset");
      }
    }
  }

  Logger logger(log);
  RunSummary summary;
  summary.seed = plan.seed;
  for (const Cell& cell : cells) {
    summary.leaves.push_back(RunLeaf(plan, input, cell.kind, cell.level,
                                     *cell.params, logger, summary.failures));
  }
  summary.wall_time_s = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - start)
                            .count();
  return summary;
}

std::vector<MetricRecord> RunEvaluate(const EvaluatePlan& plan,
                                      std::ostream& log) {
  if (!fs::is_directory(plan.pred_dir)) {
    throw UsageError("prediction directory not found: " +
                     plan.pred_dir.string());
  }
  const std::vector<DetectionBox> gts = ReadGroundTruthFile(plan.ground_truth);
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(plan.pred_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    throw UsageError("no prediction files (*.json) in " +
                     plan.pred_dir.string());
  }

  std::vector<PredictionFile> inputs;
  std::set<std::tuple<std::string, int, int>> seen;
  for (const fs::path& file : files) {
    PredictionFile pf = ReadPredictionFile(file);
    const int kind = pf.corruption ? static_cast<int>(*pf.corruption) : -1;
    if (!seen.emplace(pf.model, kind, pf.severity.value_or(0)).second) {
      throw UsageError(file.string() + " repeats an evaluated cell of model " +
                       pf.model);
    }
    inputs.push_back(std::move(pf));
  }

  Logger logger(log);
  std::vector<DetectionSummary> summaries(inputs.size());
  ParallelFor(inputs.size(), plan.workers, [&](std::size_t i) {
    summaries[i] = EvaluateDetections(inputs[i].predictions, gts);
    const DetectionSummary& s = summaries[i];
    std::string line = files[i].filename().string() + ": NDS " +
                       std::to_string(s.nds) + " mAP " + std::to_string(s.map);
    if (!s.classes_without_gt.empty()) {
      line += " (ignored classes without ground truth:";
      for (const auto& c : s.classes_without_gt) line += " " + c;
      line += ")";
    }
    if (s.errors.defaulted) line += " (some TP errors defaulted to 1)";
    if (s.errors.velocity_defaulted) line += " (missing velocities scored as 1)";
    logger.Line(line);
  });

  std::vector<MetricRecord> records;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    for (MetricBasis basis : {MetricBasis::kNds, MetricBasis::kMap}) {
      records.push_back({inputs[i].model, inputs[i].corruption,
                         inputs[i].severity, basis,
                         basis == MetricBasis::kNds ? summaries[i].nds
                                                    : summaries[i].map});
    }
  }
  const std::string text = FormatResultsCsv(records);
  WriteFileBytes(std::vector<std::uint8_t>(text.begin(), text.end()), plan.out);
  return records;
}

RobustnessReport RunReport(const ReportPlan& plan) {
  if (plan.results.empty()) throw UsageError("no results table given");
  std::vector<MetricRecord> records;
  for (const fs::path& path : plan.results) {
    auto part = ReadResultsCsv(path);
    records.insert(records.end(), part.begin(), part.end());
  }
  RobustnessReport report = BuildReport(records, plan.baseline, plan.metric);
  WriteReport(RenderReport(report), plan.out);
  return report;
}

}  // namespace corrupt_forge
