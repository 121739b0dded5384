#include "plan.hpp"

#include <fstream>

#include "typosearch/baseline.hpp"
#include "typosearch/corpus.hpp"
#include "typosearch/error.hpp"
#include "typosearch/syngen.hpp"

namespace typosearch::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path resolve(const fs::path& base, const std::string& path) {
  const fs::path p(path);
  return p.is_absolute() ? p : base / p;
}

[[noreturn]] void bad_config(const std::string& what) {
  throw Error(ErrorCode::kConfiguration, what);
}

std::vector<std::uint64_t> seeds_of(const json& entry, std::optional<std::uint64_t> seed) {
  if (seed) return {*seed};
  if (entry.contains("seeds")) return entry.at("seeds").get<std::vector<std::uint64_t>>();
  return {entry.value("seed", std::uint64_t{0})};
}

ValidationSet validation_from_json(const json& v, const fs::path& base,
                                   const std::vector<std::string>& catalog) {
  if (v.is_string() && v.get<std::string>() == "catalog") return catalog_validation(catalog);
  if (!v.is_object()) bad_config("validation must be \"catalog\" or an object");
  if (v.contains("file")) {
    return load_validation_file(resolve(base, v.at("file").get<std::string>()), catalog.size());
  }
  if (v.contains("heldout")) {
    auto stats = load_stats_source(v.at("heldout"), base, "heldout");
    return heldout_validation(catalog, StatsSelector::single(std::move(stats)),
                              v.value("per_class", std::size_t{10}),
                              v.value("seed", std::uint64_t{424242}),
                              v.value("edits", std::size_t{1}));
  }
  bad_config("validation object needs \"file\" or \"heldout\"");
}

}  // namespace

std::shared_ptr<const StatsModel> load_stats_source(const json& source, const fs::path& base,
                                                    const std::string& id) {
  if (source.is_string()) {
    const auto s = source.get<std::string>();
    if (s == "uniform") return std::make_shared<const StatsModel>(uniform_stats());
    if (s == "qwerty") return std::make_shared<const StatsModel>(qwerty_stats());
    return std::make_shared<const StatsModel>(load_stats_file(resolve(base, s)));
  }
  if (!source.is_object()) bad_config("stats source for '" + id + "' must be a string or object");
  if (source.contains("stats")) {
    return std::make_shared<const StatsModel>(
        load_stats_file(resolve(base, source.at("stats").get<std::string>())));
  }
  if (!source.contains("corpus")) bad_config("stats source for '" + id + "' needs \"corpus\"");
  const auto format_name = source.value("format", std::string("tsv"));
  const auto format = parse_corpus_format(format_name);
  if (!format) bad_config("unknown corpus format '" + format_name + "'");
  auto parsed =
      parse_corpus_file(resolve(base, source.at("corpus").get<std::string>()), *format);
  auto summary = classify_corpus(parsed.pairs, id);
  auto stats = build_stats(summary.events, Alphabet::standard(),
                           source.value("bins", kDefaultPositionBins));
  stats.dataset_id = id;
  return std::make_shared<const StatsModel>(std::move(stats));
}

ModelConfig model_from_json(const json& model, std::size_t num_classes) {
  const auto preset = model.value("preset", std::string("desk"));
  ModelConfig c;
  if (preset == "desk") {
    c = ModelConfig::desk_scale(num_classes);
  } else if (preset == "full") {
    c = ModelConfig::full_scale();
    c.num_classes = num_classes;
  } else {
    bad_config("unknown model preset '" + preset + "'");
  }
  c.max_seq_len = model.value("max_seq_len", c.max_seq_len);
  c.hidden_size = model.value("hidden_size", c.hidden_size);
  c.num_layers = model.value("num_layers", c.num_layers);
  c.dense_size = model.value("dense_size", c.dense_size);
  c.batch_size = model.value("batch_size", c.batch_size);
  c.learning_rate = model.value("learning_rate", c.learning_rate);
  c.epochs = model.value("epochs", c.epochs);
  c.validate();
  return c;
}

Plan load_plan(const fs::path& path, std::optional<std::uint64_t> seed) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    bad_config(path.string() + ": " + e.what());
  }
  const fs::path base = path.parent_path();

  try {
    Plan plan;
    auto& ctx = plan.context;
    if (!j.contains("catalog")) bad_config("config needs \"catalog\"");
    ctx.catalog = load_catalog(resolve(base, j.at("catalog").get<std::string>()));
    const auto datasets = j.value("datasets", json::object());
    for (const auto& [id, source] : datasets.items()) {
      ctx.datasets[id] = load_stats_source(source, base, id);
    }
    ctx.validation = validation_from_json(j.value("validation", json("catalog")), base, ctx.catalog);
    if (j.contains("dictionary")) {
      ctx.english = FrequencyDictionary::load_file(resolve(base, j.at("dictionary").get<std::string>()));
    }
    ctx.model = model_from_json(j.value("model", json::object()), ctx.catalog.size());
    ctx.threads = j.value("threads", std::size_t{1});
    ctx.grid_budget = j.value("grid_budget", ctx.grid_budget);

    const auto experiments = j.value("experiments", json::array());
    for (const auto& e : experiments) {
      ExperimentConfig base_row;
      base_row.strategy = Strategy::parse(e.at("strategy").get<std::string>());
      base_row.id = e.value("id", base_row.strategy.label());
      base_row.samples_per_class = e.value("samples_per_class", base_row.samples_per_class);
      base_row.keep_duplicate = e.value("keep_duplicate", true);
      if (base_row.strategy.is_baseline()) {
        plan.experiments.push_back(base_row);
        continue;
      }
      const auto seeds = seeds_of(e, seed);
      for (auto s : seeds) {
        auto row = base_row;
        row.seed = s;
        if (seeds.size() > 1) row.id += "-" + std::to_string(s);
        plan.experiments.push_back(std::move(row));
      }
    }

    const auto sweep = j.value("sweep", json::object());
    plan.sweep.strategy = Strategy::parse(sweep.value("strategy", std::string("uniform")));
    plan.sweep.counts = sweep.value("counts", plan.sweep.counts);
    plan.sweep.seeds = seeds_of(sweep, seed);

    const auto fusion = j.value("fusion", json::object());
    if (fusion.contains("datasets")) {
      plan.fusion.datasets = fusion.at("datasets").get<std::vector<std::string>>();
    } else {
      for (const auto& [id, stats] : ctx.datasets) plan.fusion.datasets.push_back(id);
    }
    plan.fusion.step = fusion.value("step", plan.fusion.step);
    plan.fusion.samples_per_class = fusion.value("samples_per_class", plan.fusion.samples_per_class);
    plan.fusion.seed = seed.value_or(fusion.value("seed", std::uint64_t{0}));
    return plan;
  } catch (const json::exception& e) {
    bad_config(path.string() + ": " + e.what());
  }
}

}  // namespace typosearch::cli
