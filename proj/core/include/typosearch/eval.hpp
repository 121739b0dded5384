#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "typosearch/alphabet.hpp"
#include "typosearch/baseline.hpp"
#include "typosearch/index.hpp"
#include "typosearch/model.hpp"
#include "typosearch/stats.hpp"

namespace typosearch {

struct ValidationItem {
  std::string query;
  std::size_t true_class = 0;

  friend bool operator==(const ValidationItem&, const ValidationItem&) = default;
};

struct ValidationSet {
  std::vector<ValidationItem> items;
  std::string provenance;
};

// Every catalog entry labelled with its own class.
ValidationSet catalog_validation(std::span<const std::string> catalog);

// `per_class` synthetic typos per catalog entry drawn from `stats` with a
// seed that must differ from every training seed. Each query carries
// `edits` successive edits.
ValidationSet heldout_validation(std::span<const std::string> catalog,
                                 const StatsSelector& stats,
                                 std::size_t per_class, std::uint64_t seed,
                                 std::size_t edits = 1);

// TSV `query<TAB>class`, `#` comments allowed.
void save_validation(const ValidationSet& set, std::ostream& out);
ValidationSet load_validation(std::istream& in, std::size_t num_classes,
                              const Alphabet& alphabet = Alphabet::standard());
ValidationSet load_validation_file(const std::filesystem::path& path,
                                   std::size_t num_classes,
                                   const Alphabet& alphabet = Alphabet::standard());

using Predictor = std::function<std::optional<std::size_t>(std::string_view)>;

// Fraction of items whose prediction equals the true class. The divisor is
// the validation size. Throws Error(kValidation) on an empty set.
double evaluate_predictor(const Predictor& predictor, const ValidationSet& set);

// Top-1 nearest-neighbour accuracy.
double evaluate(const EmbeddingIndex& index, const ModelParams& params,
                const Alphabet& alphabet, const ValidationSet& set);

struct Strategy {
  enum class Kind {
    kUniform,
    kQwerty,
    kReal,
    kFusion,
    kBaselineDefault,
    kBaselineCatalog,
  };

  Kind kind = Kind::kUniform;
  // Dataset weights; one entry for kReal.
  std::vector<std::pair<std::string, double>> mixture;

  static Strategy uniform() { return {Kind::kUniform, {}}; }
  static Strategy qwerty() { return {Kind::kQwerty, {}}; }
  static Strategy real(std::string dataset) {
    return {Kind::kReal, {{std::move(dataset), 1.0}}};
  }
  static Strategy fusion(std::vector<std::pair<std::string, double>> weights) {
    return {Kind::kFusion, std::move(weights)};
  }
  static Strategy baseline_default() { return {Kind::kBaselineDefault, {}}; }
  static Strategy baseline_catalog() { return {Kind::kBaselineCatalog, {}}; }

  bool is_baseline() const noexcept {
    return kind == Kind::kBaselineDefault || kind == Kind::kBaselineCatalog;
  }
  std::string label() const;
  // Inverse of label(). Throws Error(kConfiguration) on unknown kinds,
  // missing dataset ids or malformed weights.
  static Strategy parse(std::string_view label);
};

struct ExperimentConfig {
  std::string id;
  Strategy strategy;
  bool keep_duplicate = true;
  std::size_t samples_per_class = 20;
  // Drives both synthetic generation and model initialization / shuffling.
  std::uint64_t seed = 0;
};

struct ExperimentContext {
  std::vector<std::string> catalog;
  Alphabet alphabet = Alphabet::standard();
  // Real-world statistics by dataset id.
  std::map<std::string, std::shared_ptr<const StatsModel>> datasets;
  ValidationSet validation;
  // Template; num_classes and init_seed are set per row.
  ModelConfig model;
  // Required by baseline rows.
  std::optional<FrequencyDictionary> english;
  std::size_t threads = 1;
  std::size_t grid_budget = 512;
  // When set, each row writes dataset.tsv, model.ckpt and index.bin under
  // artifacts_dir / row id.
  std::optional<std::filesystem::path> artifacts_dir;
  std::function<void(const std::string&)> log;
};

struct ExperimentRow {
  std::string id;
  std::string strategy;
  bool keep_duplicate = true;
  std::size_t samples_per_class = 0;
  std::uint64_t seed = 0;
  std::optional<double> accuracy;
  std::string error;
  double wall_clock_s = 0.0;
};

struct ExperimentReport {
  std::vector<ExperimentRow> rows;
  std::string environment_digest;

  const ExperimentRow* find(std::string_view id) const;
  // Deterministic under fixed seeds: wall-clock is left out.
  std::string to_json() const;
  // Human-readable table including wall-clock.
  std::string to_table() const;
};

// Builds the stats selector for a model-training strategy.
StatsSelector selector_for(const ExperimentContext& ctx, const Strategy& strategy);

// Generate -> train -> index -> evaluate (or evaluate a dictionary baseline).
// Failures are captured in the row's `error`.
ExperimentRow run_experiment(const ExperimentContext& ctx,
                             const ExperimentConfig& config);

// Rows run on ctx.threads workers; row order in the report follows `configs`.
ExperimentReport run_matrix(const ExperimentContext& ctx,
                            std::span<const ExperimentConfig> configs);

// All weight vectors on the probability simplex with coordinates that are
// multiples of `step`, in lexicographic order. Throws Error(kConfiguration)
// if step does not divide 1 and Error(kBudget) if there would be more than
// `budget` points.
std::vector<std::vector<double>> simplex_grid(std::size_t dims, double step,
                                              std::size_t budget);

struct GridSearchResult {
  std::vector<std::string> datasets;
  std::vector<double> best_weights;
  double best_accuracy = 0.0;
  std::vector<std::pair<std::vector<double>, double>> surface;
  ExperimentReport report;
};

// Evaluates every grid point as a fusion row sharing `base`'s seed and sample
// count. Ties keep the first point in lexicographic order.
GridSearchResult fusion_grid_search(const ExperimentContext& ctx,
                                    std::span<const std::string> datasets,
                                    double step, const ExperimentConfig& base);

struct SweepPoint {
  std::size_t samples_per_class = 0;
  double accuracy = 0.0;
};

// Throws Error(kConfiguration) for an empty, zero-containing or
// non-ascending list of sample counts.
std::vector<SweepPoint> sample_size_sweep(const ExperimentContext& ctx,
                                          const Strategy& strategy,
                                          std::span<const std::size_t> sample_counts,
                                          const ExperimentConfig& base);

}  // namespace typosearch
