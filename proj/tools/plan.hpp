#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "typosearch/eval.hpp"
#include "typosearch/model.hpp"
#include "typosearch/stats.hpp"

namespace typosearch::cli {

// A stats source in a config file is one of:
//   "uniform" | "qwerty" | "<path to stats json>"
//   {"stats": "<path>"}
//   {"corpus": "<path>", "format": "tsv|github-jsonl|twitter-tsv", "bins": 10}
// Relative paths resolve against `base`.
std::shared_ptr<const StatsModel> load_stats_source(const nlohmann::json& source,
                                                    const std::filesystem::path& base,
                                                    const std::string& id);

// Preset ("desk" or "full") plus field overrides.
ModelConfig model_from_json(const nlohmann::json& model, std::size_t num_classes);

struct SweepPlan {
  Strategy strategy = Strategy::uniform();
  std::vector<std::size_t> counts = {4, 8, 16, 32};
  std::vector<std::uint64_t> seeds = {0};
};

struct FusionPlan {
  std::vector<std::string> datasets;
  double step = 0.25;
  std::size_t samples_per_class = 20;
  std::uint64_t seed = 0;
};

struct Plan {
  ExperimentContext context;
  std::vector<ExperimentConfig> experiments;
  SweepPlan sweep;
  FusionPlan fusion;
};

// Reads an experiment config file. When `seed` is set it replaces every
// seed list in the file.
Plan load_plan(const std::filesystem::path& path, std::optional<std::uint64_t> seed);

}  // namespace typosearch::cli
