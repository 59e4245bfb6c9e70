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

#ifndef CORRUPT_FORGE_PIPELINE_H_
#define CORRUPT_FORGE_PIPELINE_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "corrupt_forge/robustmetrics.h"
#include "corrupt_forge/severity.h"
#include "corrupt_forge/types.h"

namespace corrupt_forge {

inline constexpr std::string_view kToolVersion = "0.1.0";
inline constexpr std::string_view kWorkersEnvVar = "CORRUPT_FORGE_WORKERS";

enum class OverwritePolicy { kSkipExisting, kOverwrite };

struct RunPlan {
  std::filesystem::path manifest;  // file or dataset directory
  std::filesystem::path out;
  std::vector<CorruptionKind> kinds;
  std::vector<int> levels;  // empty = every level defined for the kind
  std::uint64_t seed = 0;
  int workers = 1;
  OverwritePolicy overwrite = OverwritePolicy::kSkipExisting;
  std::optional<std::filesystem::path> params_file;

  // Throws UsageError.
  void Validate() const;
};

// Worker count from the environment fallback, or nullopt when unset.
// Throws UsageError on a malformed value.
std::optional<int> WorkersFromEnv();

// Runs fn(i) for i in [0, n) on `workers` threads. Exceptions thrown by fn
// are the caller's problem; fn must not throw.
void ParallelFor(std::size_t n, int workers,
                 const std::function<void(std::size_t)>& fn);

struct SampleFailure {
  std::string kind;
  int level = 0;
  std::string sample_id;
  std::string message;
};

struct LeafSummary {
  std::string kind;
  int level = 0;
  std::size_t processed = 0;
  std::size_t skipped = 0;
  std::size_t failed = 0;
  bool manifest_written = false;
};

struct RunSummary {
  std::uint64_t seed = 0;
  double wall_time_s = 0.0;
  std::vector<LeafSummary> leaves;
  std::vector<SampleFailure> failures;

  bool ok() const { return failures.empty(); }
  std::string ToJson() const;
};

// Writes `<out>/<kind>/<level>/` for every requested cell. Per-sample
// failures are collected rather than thrown; `log` receives one line per
// sample. Plan and manifest problems throw.
RunSummary RunCorrupt(const RunPlan& plan, std::ostream& log);

// Leaf directory of one corrupted dataset.
std::filesystem::path LeafDirectory(const std::filesystem::path& out,
                                    CorruptionKind kind, int level);

// Stream tag for a sensor at a severity level.
std::string StreamTag(std::string_view sensor, int level);

struct EvaluatePlan {
  std::filesystem::path pred_dir;
  std::filesystem::path ground_truth;
  std::filesystem::path out;
  int workers = 1;
};

// One NDS and one mAP record per prediction file, in file-name order.
std::vector<MetricRecord> RunEvaluate(const EvaluatePlan& plan,
                                      std::ostream& log);

struct ReportPlan {
  std::vector<std::filesystem::path> results;
  std::string baseline;
  std::filesystem::path out;
  MetricBasis metric = MetricBasis::kNds;
};

RobustnessReport RunReport(const ReportPlan& plan);

}  // namespace corrupt_forge

#endif  // CORRUPT_FORGE_PIPELINE_H_
