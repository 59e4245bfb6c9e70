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

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "corrupt_forge/errors.h"
#include "corrupt_forge/pipeline.h"

namespace {

using corrupt_forge::UsageError;

std::vector<std::string> SplitList(const std::string& text) {
  std::vector<std::string> items;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto pos = text.find(',', start);
    const std::string item = text.substr(start, pos - start);
    if (!item.empty()) items.push_back(item);
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return items;
}

std::vector<corrupt_forge::CorruptionKind> ParseKinds(
    const std::vector<std::string>& names) {
  std::vector<corrupt_forge::CorruptionKind> kinds;
  for (const std::string& raw : names) {
    for (const std::string& name : SplitList(raw)) {
      if (name == "all") {
        kinds.assign(corrupt_forge::kAllKinds.begin(),
                     corrupt_forge::kAllKinds.end());
        continue;
      }
      const auto kind = corrupt_forge::ParseKind(name);
      if (!kind) {
        std::string known;
        for (auto k : corrupt_forge::kAllKinds) {
          known += " " + std::string(corrupt_forge::KindName(k));
        }
        throw UsageError("unknown corruption kind '" + name + "'; known:" +
                         known);
      }
      kinds.push_back(*kind);
    }
  }
  return kinds;
}

std::vector<int> ParseLevels(const std::string& text) {
  if (text == "all") return {};
  std::vector<int> levels;
  for (const std::string& item : SplitList(text)) {
    try {
      std::size_t used = 0;
      const int level = std::stoi(item, &used);
      if (used != item.size() || level < 1) throw std::invalid_argument(item);
      levels.push_back(level);
    } catch (const std::exception&) {
      throw UsageError("bad severity level '" + item + "'");
    }
  }
  if (levels.empty()) throw UsageError("no severity level given");
  return levels;
}

int DefaultWorkers() {
  if (auto env = corrupt_forge::WorkersFromEnv()) return *env;
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic corruption synthesis and robustness scoring "
               "for multi-modal driving datasets"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(corrupt_forge::kToolVersion));

  std::string manifest, out, level_text = "all", params;
  std::vector<std::string> kind_names;
  std::uint64_t seed = 0;
  int workers = 0;
  bool overwrite = false;
  auto* corrupt = app.add_subcommand("corrupt", "Write corrupted copies of a dataset");
  corrupt->add_option("--manifest", manifest, "Input manifest file or dataset directory")
      ->required();
  corrupt->add_option("--out", out, "Output root")->required();
  corrupt->add_option("--kind", kind_names, "Corruption kind(s), comma separated, or all")
      ->required()
      ->delimiter(',');
  corrupt->add_option("--level", level_text, "Severity level(s) 1,2,3 or all");
  corrupt->add_option("--seed", seed, "Global seed")->required();
  corrupt->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
  corrupt->add_flag("--overwrite", overwrite, "Recompute samples already present");
  corrupt->add_option("--params", params, "Severity override file")
      ->check(CLI::ExistingFile);

  std::string pred_dir, gt_file, results_out;
  int eval_workers = 0;
  auto* evaluate = app.add_subcommand("evaluate", "Score detection results");
  evaluate->add_option("--pred", pred_dir, "Directory of prediction files")->required();
  evaluate->add_option("--gt", gt_file, "Ground-truth file")->required();
  evaluate->add_option("--out", results_out, "Results table to write")->required();
  evaluate->add_option("--workers", eval_workers, "Worker threads")
      ->check(CLI::PositiveNumber);

  std::vector<std::string> results;
  std::string baseline, report_out, metric = "nds";
  auto* report = app.add_subcommand("report", "Render robustness tables");
  report->add_option("--results", results, "Results table(s), comma separated")
      ->required()
      ->delimiter(',');
  report->add_option("--baseline", baseline, "Baseline model name")->required();
  report->add_option("--out", report_out, "Output directory")->required();
  report->add_option("--metric", metric, "nds or map");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*corrupt) {
      corrupt_forge::RunPlan plan;
      plan.manifest = manifest;
      plan.out = out;
      plan.kinds = ParseKinds(kind_names);
      plan.levels = ParseLevels(level_text);
      plan.seed = seed;
      plan.workers = workers > 0 ? workers : DefaultWorkers();
      plan.overwrite = overwrite ? corrupt_forge::OverwritePolicy::kOverwrite
                                 : corrupt_forge::OverwritePolicy::kSkipExisting;
      if (!params.empty()) plan.params_file = params;
      const auto summary = corrupt_forge::RunCorrupt(plan, std::cerr);
      std::cout << summary.ToJson() << std::endl;
      return summary.ok() ? 0 : 1;
    }
    if (*evaluate) {
      corrupt_forge::EvaluatePlan plan{pred_dir, gt_file, results_out,
                                       eval_workers > 0 ? eval_workers
                                                        : DefaultWorkers()};
      corrupt_forge::RunEvaluate(plan, std::cerr);
      return 0;
    }
    if (*report) {
      const auto basis = corrupt_forge::ParseMetric(metric);
      if (!basis) throw UsageError("--metric must be nds or map");
      corrupt_forge::ReportPlan plan;
      for (const auto& r : results) plan.results.emplace_back(r);
      plan.baseline = baseline;
      plan.out = report_out;
      plan.metric = *basis;
      corrupt_forge::RunReport(plan);
      return 0;
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const corrupt_forge::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
