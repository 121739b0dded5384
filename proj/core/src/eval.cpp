#include "typosearch/eval.hpp"

#include <atomic>
#include <chrono>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "typosearch/digest.hpp"
#include "typosearch/error.hpp"
#include "typosearch/syngen.hpp"

namespace typosearch {

// ---------------------------------------------------------------------------
// Validation sets

ValidationSet catalog_validation(std::span<const std::string> catalog) {
  ValidationSet set;
  set.provenance = "catalog";
  for (std::size_t i = 0; i < catalog.size(); ++i) set.items.push_back({catalog[i], i});
  return set;
}

ValidationSet heldout_validation(std::span<const std::string> catalog,
                                 const StatsSelector& stats, std::size_t per_class,
                                 std::uint64_t seed, std::size_t edits) {
  if (edits < 1) throw Error(ErrorCode::kConfiguration, "validation queries need >= 1 edit");
  GenerationConfig config;
  config.samples_per_class = per_class;
  config.seed = seed;
  config.strategy = "heldout";
  ValidationSet set;
  set.provenance = "held-out-synthetic<" + std::to_string(seed) + ">";
  if (edits > 1) set.provenance += " edits=" + std::to_string(edits);
  GenerationConfig more = config;
  more.samples_per_class = 1;
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    for (auto& sample : generate_samples(catalog[i], i, config, stats)) {
      // Further edits are drawn on top of the previous draw, seeded by the
      // edit number so repeated edits of equal strings stay independent.
      for (std::size_t e = 1; e < edits; ++e) {
        more.seed = derive_seed(seed, e);
        sample = std::move(generate_samples(sample.text, i, more, stats).front());
      }
      set.items.push_back({std::move(sample.text), i});
    }
  }
  return set;
}

void save_validation(const ValidationSet& set, std::ostream& out) {
  out << "# provenance: " << set.provenance << '\n';
  for (const auto& item : set.items) out << item.query << '\t' << item.true_class << '\n';
}

ValidationSet load_validation(std::istream& in, std::size_t num_classes,
                              const Alphabet& alphabet) {
  ValidationSet set;
  set.provenance = "manual-file";
  std::string line;
  std::size_t line_no = 0;
  constexpr std::string_view kProvenance = "# provenance: ";
  while (std::getline(in, line)) {
    ++line_no;
    if (line.starts_with(kProvenance)) {
      set.provenance = line.substr(kProvenance.size());
      continue;
    }
    if (line.empty() || line.front() == '#') continue;
    const auto tab = line.rfind('\t');
    std::size_t cls = 0;
    try {
      if (tab == std::string::npos) throw std::invalid_argument("no tab");
      std::size_t used = 0;
      cls = std::stoull(line.substr(tab + 1), &used);
      if (used != line.size() - tab - 1) throw std::invalid_argument("trailing text");
    } catch (const std::exception&) {
      throw Error(ErrorCode::kValidation,
                  "validation line " + std::to_string(line_no) + " is malformed");
    }
    if (cls >= num_classes) {
      throw Error(ErrorCode::kValidation, "validation line " + std::to_string(line_no) +
                                              " has class " + std::to_string(cls) +
                                              " outside the catalog");
    }
    std::string query = alphabet.canonicalize(std::string_view(line).substr(0, tab));
    if (query.empty()) {
      throw Error(ErrorCode::kValidation,
                  "validation line " + std::to_string(line_no) + " has an empty query");
    }
    set.items.push_back({std::move(query), cls});
  }
  return set;
}

ValidationSet load_validation_file(const std::filesystem::path& path,
                                   std::size_t num_classes, const Alphabet& alphabet) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return load_validation(in, num_classes, alphabet);
}

double evaluate_predictor(const Predictor& predictor, const ValidationSet& set) {
  if (set.items.empty()) throw Error(ErrorCode::kValidation, "empty validation set");
  std::size_t correct = 0;
  for (const auto& item : set.items) {
    const auto predicted = predictor(item.query);
    if (predicted && *predicted == item.true_class) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(set.items.size());
}

double evaluate(const EmbeddingIndex& index, const ModelParams& params,
                const Alphabet& alphabet, const ValidationSet& set) {
  return evaluate_predictor(
      [&](std::string_view q) -> std::optional<std::size_t> {
        const std::string canonical = alphabet.canonicalize(q);
        if (canonical.empty()) return std::nullopt;
        auto top = query_embedding(index, embed(params, canonical, alphabet), 1);
        if (top.empty()) return std::nullopt;
        return top.front().class_index;
      },
      set);
}

// ---------------------------------------------------------------------------
// Experiments

namespace {

std::string format_weight(double w) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", w);
  return buf;
}

void log_line(const ExperimentContext& ctx, const std::string& message) {
  if (ctx.log) ctx.log(message);
}

}  // namespace

std::string Strategy::label() const {
  switch (kind) {
    case Kind::kUniform:
      return "uniform";
    case Kind::kQwerty:
      return "qwerty";
    case Kind::kReal:
      return "real:" + (mixture.empty() ? std::string("?") : mixture.front().first);
    case Kind::kFusion: {
      std::string out = "fusion:";
      for (std::size_t i = 0; i < mixture.size(); ++i) {
        if (i > 0) out += ',';
        out += mixture[i].first + "=" + format_weight(mixture[i].second);
      }
      return out;
    }
    case Kind::kBaselineDefault:
      return "baseline:default";
    case Kind::kBaselineCatalog:
      return "baseline:catalog";
  }
  return "unknown";
}

Strategy Strategy::parse(std::string_view label) {
  auto fail = [&](const char* why) {
    return Error(ErrorCode::kConfiguration,
                 "strategy '" + std::string(label) + "': " + why);
  };
  if (label == "uniform") return uniform();
  if (label == "qwerty") return qwerty();
  if (label == "baseline:default") return baseline_default();
  if (label == "baseline:catalog") return baseline_catalog();
  if (label.starts_with("real:")) {
    const auto id = label.substr(5);
    if (id.empty()) throw fail("missing dataset id");
    return real(std::string(id));
  }
  if (label.starts_with("fusion:")) {
    std::vector<std::pair<std::string, double>> weights;
    std::string_view rest = label.substr(7);
    for (bool more = !rest.empty(); more;) {
      const auto comma = rest.find(',');
      const auto part = rest.substr(0, comma);
      more = comma != std::string_view::npos;
      rest = more ? rest.substr(comma + 1) : std::string_view{};
      const auto eq = part.find('=');
      if (eq == 0 || eq == std::string_view::npos) throw fail("expected id=weight");
      double w = 0.0;
      const auto* first = part.data() + eq + 1;
      const auto* last = part.data() + part.size();
      const auto [ptr, ec] = std::from_chars(first, last, w);
      if (ec != std::errc() || ptr != last || first == last) throw fail("malformed weight");
      weights.emplace_back(std::string(part.substr(0, eq)), w);
    }
    if (weights.empty()) throw fail("empty mixture");
    return fusion(std::move(weights));
  }
  throw fail("unknown kind");
}

StatsSelector selector_for(const ExperimentContext& ctx, const Strategy& strategy) {
  auto dataset = [&](const std::string& id) {
    auto it = ctx.datasets.find(id);
    if (it == ctx.datasets.end()) {
      throw Error(ErrorCode::kConfiguration, "unknown dataset '" + id + "'");
    }
    return it->second;
  };
  switch (strategy.kind) {
    case Strategy::Kind::kUniform:
      return StatsSelector::single(
          std::make_shared<const StatsModel>(uniform_stats(ctx.alphabet)));
    case Strategy::Kind::kQwerty:
      return StatsSelector::single(
          std::make_shared<const StatsModel>(qwerty_stats(ctx.alphabet)));
    case Strategy::Kind::kReal:
      if (strategy.mixture.size() != 1) {
        throw Error(ErrorCode::kConfiguration, "real strategy needs one dataset");
      }
      return StatsSelector::single(dataset(strategy.mixture.front().first));
    case Strategy::Kind::kFusion: {
      FusionSpec spec;
      for (const auto& [id, weight] : strategy.mixture) {
        spec.components.push_back({dataset(id), weight});
      }
      return fuse(std::move(spec));
    }
    case Strategy::Kind::kBaselineDefault:
    case Strategy::Kind::kBaselineCatalog:
      break;
  }
  throw Error(ErrorCode::kConfiguration,
              "strategy " + strategy.label() + " does not generate data");
}

ExperimentRow run_experiment(const ExperimentContext& ctx, const ExperimentConfig& config) {
  ExperimentRow row;
  row.id = config.id;
  row.strategy = config.strategy.label();
  row.keep_duplicate = config.keep_duplicate;
  row.samples_per_class = config.samples_per_class;
  row.seed = config.seed;
  const auto start = std::chrono::steady_clock::now();
  try {
    if (config.strategy.is_baseline()) {
      if (!ctx.english) {
        throw Error(ErrorCode::kConfiguration, "baseline rows need an English dictionary");
      }
      FrequencyDictionary dict =
          config.strategy.kind == Strategy::Kind::kBaselineCatalog
              ? ctx.english->with_catalog(ctx.catalog)
              : *ctx.english;
      BaselinePredictor predictor(std::move(dict), ctx.catalog, ctx.alphabet);
      row.accuracy = evaluate_predictor(
          [&](std::string_view q) { return predictor.predict(q); }, ctx.validation);
    } else {
      const StatsSelector selector = selector_for(ctx, config.strategy);
      GenerationConfig gen;
      gen.samples_per_class = config.samples_per_class;
      gen.keep_duplicate = config.keep_duplicate;
      gen.seed = config.seed;
      gen.strategy = row.strategy;
      log_line(ctx, row.id + ": generating");
      const SyntheticDataset dataset = build_training_set(ctx.catalog, gen, selector);

      ModelConfig model = ctx.model;
      model.num_classes = ctx.catalog.size();
      model.init_seed = config.seed;
      TrainingOptions options;
      options.on_epoch = [&](std::size_t epoch, double loss) {
        char buf[96];
        std::snprintf(buf, sizeof buf, ": epoch %zu loss %.6f", epoch + 1, loss);
        log_line(ctx, row.id + buf);
      };
      TrainingResult trained = train(dataset.samples, model, ctx.alphabet, options);
      Checkpoint checkpoint{std::move(trained.params), std::string(ctx.alphabet.symbols()),
                            std::move(trained.epoch_losses)};
      const std::string ckpt_digest = checkpoint_digest(checkpoint);
      const EmbeddingIndex index =
          build_index(checkpoint.params, ctx.alphabet, ctx.catalog, ckpt_digest);
      row.accuracy = evaluate(index, checkpoint.params, ctx.alphabet, ctx.validation);

      if (ctx.artifacts_dir) {
        const auto dir = *ctx.artifacts_dir / row.id;
        std::filesystem::create_directories(dir);
        save_dataset_file(dataset, dir / "dataset.tsv");
        save_checkpoint_file(checkpoint, dir / "model.ckpt");
        save_index_file(index, dir / "index.bin");
      }
    }
  } catch (const std::exception& e) {
    row.accuracy.reset();
    row.error = e.what();
    log_line(ctx, row.id + ": failed: " + row.error);
  }
  row.wall_clock_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (row.accuracy) {
    char buf[64];
    std::snprintf(buf, sizeof buf, ": accuracy %.4f (%.1f s)", *row.accuracy,
                  row.wall_clock_s);
    log_line(ctx, row.id + buf);
  }
  return row;
}

namespace {

std::string environment_digest(const ExperimentContext& ctx) {
  Fnv1a64 h;
  h.update(catalog_digest(ctx.catalog));
  h.update(ctx.alphabet.symbols());
  for (const auto& item : ctx.validation.items) {
    h.update(item.query);
    h.update("\t" + std::to_string(item.true_class) + "\n");
  }
  const auto& m = ctx.model;
  for (std::size_t v : {m.max_seq_len, m.alphabet_size, m.hidden_size, m.num_layers,
                        m.dense_size, m.batch_size, m.epochs}) {
    h.update(std::to_string(v) + ",");
  }
  h.update(format_weight(m.learning_rate));
  for (const auto& [id, stats] : ctx.datasets) {
    h.update(id);
    h.update(stats_digest(*stats));
  }
  if (ctx.english) h.update("english:" + std::to_string(ctx.english->size()));
  return h.hex();
}

}  // namespace

ExperimentReport run_matrix(const ExperimentContext& ctx,
                            std::span<const ExperimentConfig> configs) {
  ExperimentReport report;
  report.environment_digest = environment_digest(ctx);
  report.rows.resize(configs.size());
  const std::size_t workers = std::max<std::size_t>(1, std::min(ctx.threads, configs.size()));
  if (workers == 1) {
    for (std::size_t i = 0; i < configs.size(); ++i) {
      report.rows[i] = run_experiment(ctx, configs[i]);
    }
    return report;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < configs.size(); i = next++) {
        report.rows[i] = run_experiment(ctx, configs[i]);
      }
    });
  }
  for (auto& t : pool) t.join();
  return report;
}

const ExperimentRow* ExperimentReport::find(std::string_view id) const {
  for (const auto& row : rows) {
    if (row.id == id) return &row;
  }
  return nullptr;
}

std::string ExperimentReport::to_json() const {
  nlohmann::ordered_json out;
  out["environment_digest"] = environment_digest;
  auto& rows_json = out["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : rows) {
    nlohmann::ordered_json r;
    r["id"] = row.id;
    r["strategy"] = row.strategy;
    r["keep_duplicate"] = row.keep_duplicate;
    r["samples_per_class"] = row.samples_per_class;
    r["seed"] = row.seed;
    r["accuracy"] = row.accuracy ? nlohmann::ordered_json(*row.accuracy) : nlohmann::ordered_json(nullptr);
    if (!row.error.empty()) r["error"] = row.error;
    rows_json.push_back(std::move(r));
  }
  return out.dump(2) + "\n";
}

std::string ExperimentReport::to_table() const {
  std::ostringstream out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-24s %-40s %-5s %5s %6s %9s %9s\n", "id", "strategy",
                "dups", "N", "seed", "accuracy", "wall_s");
  out << buf;
  for (const auto& row : rows) {
    std::string acc = row.accuracy ? format_weight(std::round(*row.accuracy * 10000) / 100)
                                   : std::string("error");
    std::snprintf(buf, sizeof buf, "%-24s %-40s %-5s %5zu %6llu %9s %9.1f\n",
                  row.id.c_str(), row.strategy.c_str(), row.keep_duplicate ? "yes" : "no",
                  row.samples_per_class, static_cast<unsigned long long>(row.seed),
                  acc.c_str(), row.wall_clock_s);
    out << buf;
    if (!row.error.empty()) out << "  error: " << row.error << '\n';
  }
  out << "environment " << environment_digest << '\n';
  return out.str();
}

// ---------------------------------------------------------------------------
// Grid search and sweeps

std::vector<std::vector<double>> simplex_grid(std::size_t dims, double step,
                                              std::size_t budget) {
  if (dims == 0) throw Error(ErrorCode::kConfiguration, "simplex needs >= 1 dimension");
  if (!(step > 0.0) || step > 1.0) {
    throw Error(ErrorCode::kConfiguration, "grid step must be in (0, 1]");
  }
  const double parts_real = 1.0 / step;
  const auto parts = static_cast<std::size_t>(std::llround(parts_real));
  if (std::abs(static_cast<double>(parts) * step - 1.0) > 1e-9) {
    throw Error(ErrorCode::kConfiguration, "grid step does not divide 1");
  }
  // Number of compositions of `parts` into `dims` parts: C(parts+dims-1, dims-1).
  double count = 1.0;
  for (std::size_t i = 1; i < dims; ++i) {
    count = count * static_cast<double>(parts + i) / static_cast<double>(i);
  }
  if (std::llround(count) > static_cast<long long>(budget)) {
    throw Error(ErrorCode::kBudget, "grid has " + std::to_string(std::llround(count)) +
                                        " points, budget is " + std::to_string(budget));
  }
  std::vector<std::vector<double>> out;
  std::vector<std::size_t> units(dims, 0);
  auto recurse = [&](auto&& self, std::size_t d, std::size_t remaining) -> void {
    if (d + 1 == dims) {
      units[d] = remaining;
      std::vector<double> point(dims);
      for (std::size_t i = 0; i < dims; ++i) {
        point[i] = static_cast<double>(units[i]) / static_cast<double>(parts);
      }
      out.push_back(std::move(point));
      return;
    }
    for (std::size_t k = 0; k <= remaining; ++k) {
      units[d] = k;
      self(self, d + 1, remaining - k);
    }
  };
  recurse(recurse, 0, parts);
  return out;
}

GridSearchResult fusion_grid_search(const ExperimentContext& ctx,
                                    std::span<const std::string> datasets, double step,
                                    const ExperimentConfig& base) {
  if (datasets.size() < 2) {
    throw Error(ErrorCode::kConfiguration, "grid search needs at least two datasets");
  }
  GridSearchResult result;
  result.datasets.assign(datasets.begin(), datasets.end());
  const auto grid = simplex_grid(datasets.size(), step, ctx.grid_budget);
  std::vector<ExperimentConfig> configs;
  for (std::size_t p = 0; p < grid.size(); ++p) {
    std::vector<std::pair<std::string, double>> mixture;
    for (std::size_t d = 0; d < datasets.size(); ++d) {
      mixture.emplace_back(datasets[d], grid[p][d]);
    }
    ExperimentConfig config = base;
    config.id = base.id + "grid-" + std::to_string(p);
    config.strategy = Strategy::fusion(std::move(mixture));
    configs.push_back(std::move(config));
  }
  result.report = run_matrix(ctx, configs);
  bool found = false;
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const auto& row = result.report.rows[p];
    if (!row.accuracy) continue;
    result.surface.emplace_back(grid[p], *row.accuracy);
    if (!found || *row.accuracy > result.best_accuracy) {
      found = true;
      result.best_accuracy = *row.accuracy;
      result.best_weights = grid[p];
    }
  }
  if (!found) throw Error(ErrorCode::kConfiguration, "every grid point failed");
  return result;
}

std::vector<SweepPoint> sample_size_sweep(const ExperimentContext& ctx,
                                          const Strategy& strategy,
                                          std::span<const std::size_t> sample_counts,
                                          const ExperimentConfig& base) {
  if (sample_counts.empty()) throw Error(ErrorCode::kConfiguration, "no sample counts");
  for (std::size_t i = 0; i < sample_counts.size(); ++i) {
    if (sample_counts[i] == 0) {
      throw Error(ErrorCode::kConfiguration, "sample count must be >= 1");
    }
    if (i > 0 && sample_counts[i] <= sample_counts[i - 1]) {
      throw Error(ErrorCode::kConfiguration, "sample counts must be ascending");
    }
  }
  std::vector<ExperimentConfig> configs;
  for (std::size_t n : sample_counts) {
    ExperimentConfig config = base;
    config.id = base.id + "N" + std::to_string(n);
    config.strategy = strategy;
    config.samples_per_class = n;
    configs.push_back(std::move(config));
  }
  const auto report = run_matrix(ctx, configs);
  std::vector<SweepPoint> out;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    const auto& row = report.rows[i];
    if (!row.accuracy) {
      throw Error(ErrorCode::kConfiguration, row.id + " failed: " + row.error);
    }
    out.push_back({sample_counts[i], *row.accuracy});
  }
  return out;
}

}  // namespace typosearch
