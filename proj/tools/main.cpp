// typosearch: command-line front door for the correction pipeline.

#include <pthread.h>
#include <signal.h>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "plan.hpp"
#include "typosearch/baseline.hpp"
#include "typosearch/corpus.hpp"
#include "typosearch/error.hpp"
#include "typosearch/eval.hpp"
#include "typosearch/index.hpp"
#include "typosearch/model.hpp"
#include "typosearch/rng.hpp"
#include "typosearch/service.hpp"
#include "typosearch/stats.hpp"
#include "typosearch/syngen.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

namespace ts = typosearch;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Globals {
  std::uint64_t seed = 0;
  CLI::Option* seed_option = nullptr;
  std::string config;

  std::optional<std::uint64_t> seed_override() const {
    return seed_option->count() > 0 ? std::optional(seed) : std::nullopt;
  }
  json config_json() const {
    if (config.empty()) return json::object();
    std::ifstream in(config);
    if (!in) throw ts::Error(ts::ErrorCode::kIo, "cannot open config " + config);
    return json::parse(in);
  }
  ts::cli::Plan plan() const {
    if (config.empty()) {
      throw ts::Error(ts::ErrorCode::kConfiguration, "this command needs --config <file>");
    }
    return ts::cli::load_plan(config, seed_override());
  }
};

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ts::Error(ts::ErrorCode::kIo, "cannot write " + path);
  out << text;
}

std::int64_t source_date_epoch() {
  const char* value = std::getenv("SOURCE_DATE_EPOCH");
  if (value == nullptr || *value == '\0') return 0;
  try {
    return std::stoll(value);
  } catch (const std::exception&) {
    throw ts::Error(ts::ErrorCode::kConfiguration,
                    std::string("SOURCE_DATE_EPOCH is not an integer: ") + value);
  }
}

// `path[=weight]`; the bare keywords uniform and qwerty name built-in stats.
ts::StatsSelector selector_from_args(const std::vector<std::string>& specs) {
  if (specs.empty()) {
    return ts::StatsSelector::single(std::make_shared<const ts::StatsModel>(ts::uniform_stats()));
  }
  ts::FusionSpec spec;
  for (const auto& s : specs) {
    const auto eq = s.rfind('=');
    const std::string source = eq == std::string::npos ? s : s.substr(0, eq);
    double weight = 1.0;
    if (eq != std::string::npos) {
      try {
        weight = std::stod(s.substr(eq + 1));
      } catch (const std::exception&) {
        throw ts::Error(ts::ErrorCode::kConfiguration, "bad weight in '" + s + "'");
      }
    }
    spec.components.push_back({ts::cli::load_stats_source(json(source), fs::current_path(), source),
                               specs.size() == 1 ? 1.0 : weight});
  }
  return specs.size() == 1 ? ts::StatsSelector::single(spec.components.front().stats)
                           : ts::fuse(std::move(spec));
}

void log_line(const std::string& line) { std::cerr << line << '\n'; }

// --- ingest ----------------------------------------------------------------

struct IngestArgs {
  std::string input;
  std::string format = "tsv";
  std::string source;
  std::string output;
};

void run_ingest(const IngestArgs& a) {
  const auto format = ts::parse_corpus_format(a.format);
  if (!format) throw ts::Error(ts::ErrorCode::kConfiguration, "unknown format " + a.format);
  auto parsed = ts::parse_corpus_file(a.input, *format);
  const auto source = a.source.empty() ? fs::path(a.input).stem().string() : a.source;
  auto summary = ts::classify_corpus(parsed.pairs, source);
  std::printf("source %s: %zu pairs, %zu skipped, %llu identical, %llu multi-edit\n",
              source.c_str(), parsed.pairs.size(), parsed.skipped,
              static_cast<unsigned long long>(summary.identical),
              static_cast<unsigned long long>(summary.multi_edit));
  for (auto t : ts::kAllEditTypes) {
    std::printf("  %-13s %llu\n", std::string(ts::edit_type_name(t)).c_str(),
                static_cast<unsigned long long>(summary.per_type[ts::to_index(t)]));
  }
  if (!a.output.empty()) {
    std::ofstream out(a.output, std::ios::binary);
    if (!out) throw ts::Error(ts::ErrorCode::kIo, "cannot write " + a.output);
    ts::write_corpus_tsv(out, parsed.pairs);
  }
}

// --- stats -----------------------------------------------------------------

struct StatsArgs {
  std::string input;
  std::string format = "tsv";
  std::string id;
  std::string builtin;
  std::size_t bins = ts::kDefaultPositionBins;
  std::string output;
};

void run_stats(const StatsArgs& a) {
  ts::StatsModel stats;
  if (a.builtin == "uniform") {
    stats = ts::uniform_stats(ts::Alphabet::standard(), a.bins);
  } else if (a.builtin == "qwerty") {
    stats = ts::qwerty_stats(ts::Alphabet::standard(), ts::KeyboardLayout::qwerty_us(), a.bins);
  } else if (!a.input.empty()) {
    const auto id = a.id.empty() ? fs::path(a.input).stem().string() : a.id;
    json source = {{"corpus", fs::absolute(a.input).string()}, {"format", a.format}, {"bins", a.bins}};
    stats = *ts::cli::load_stats_source(source, fs::current_path(), id);
  } else {
    throw ts::Error(ts::ErrorCode::kConfiguration, "stats needs --input or --builtin");
  }
  if (!a.id.empty()) stats.dataset_id = a.id;
  std::fprintf(stderr, "stats %s: %llu events, digest %s\n", stats.dataset_id.c_str(),
               static_cast<unsigned long long>(stats.event_count), ts::stats_digest(stats).c_str());
  for (auto t : ts::kAllEditTypes) {
    std::fprintf(stderr, "  p(%s) = %.4f\n", std::string(ts::edit_type_name(t)).c_str(),
                 stats.error_types[t]);
  }
  write_text(a.output, ts::save_stats_string(stats));
}

// --- fuse ------------------------------------------------------------------

struct FuseArgs {
  std::vector<std::string> datasets;
  double step = 0.0;
  std::size_t samples = 0;
  std::string report;
};

void run_fuse(const Globals& g, const FuseArgs& a) {
  auto plan = g.plan();
  plan.context.log = log_line;
  auto& f = plan.fusion;
  if (!a.datasets.empty()) f.datasets = a.datasets;
  if (a.step > 0.0) f.step = a.step;
  if (a.samples > 0) f.samples_per_class = a.samples;
  ts::ExperimentConfig base;
  base.id = "fusion";
  base.seed = f.seed;
  base.samples_per_class = f.samples_per_class;
  auto result = ts::fusion_grid_search(plan.context, f.datasets, f.step, base);
  std::cout << result.report.to_table();
  std::cout << "best:";
  for (std::size_t i = 0; i < result.datasets.size(); ++i) {
    std::printf(" %s=%.4g", result.datasets[i].c_str(), result.best_weights[i]);
  }
  std::printf("  accuracy %.2f%%\n", 100 * result.best_accuracy);
  if (!a.report.empty()) write_text(a.report, result.report.to_json());
}

// --- gen -------------------------------------------------------------------

struct GenArgs {
  std::string catalog;
  std::vector<std::string> stats;
  std::size_t samples = 20;
  bool no_duplicates = false;
  std::size_t max_retries = 0;
  std::string output;
};

void run_gen(const Globals& g, const GenArgs& a) {
  const auto catalog = ts::load_catalog(a.catalog);
  ts::GenerationConfig config;
  config.samples_per_class = a.samples;
  config.keep_duplicate = !a.no_duplicates;
  config.seed = g.seed;
  config.max_retries = a.max_retries;
  config.strategy = a.stats.empty() ? "uniform" : "stats:" + std::to_string(a.stats.size());
  auto dataset = ts::build_training_set(catalog, config, selector_from_args(a.stats));
  std::fprintf(stderr, "%zu samples for %zu classes\n", dataset.samples.size(), catalog.size());
  std::ostringstream out;
  ts::save_dataset(dataset, out);
  write_text(a.output, out.str());
}

// --- train -----------------------------------------------------------------

struct TrainArgs {
  std::string dataset;
  std::string catalog;
  std::string preset;
  std::size_t epochs = 0;
  std::size_t batch = 0;
  double lr = 0.0;
  std::string output;
};

void run_train(const Globals& g, const TrainArgs& a) {
  const auto catalog = ts::load_catalog(a.catalog);
  const auto samples = ts::load_dataset_file(a.dataset);
  auto model = g.config_json().value("model", json::object());
  if (!a.preset.empty()) model["preset"] = a.preset;
  if (a.epochs > 0) model["epochs"] = a.epochs;
  if (a.batch > 0) model["batch_size"] = a.batch;
  if (a.lr > 0.0) model["learning_rate"] = a.lr;
  auto config = ts::cli::model_from_json(model, catalog.size());
  config.init_seed = g.seed;
  ts::TrainingOptions options;
  options.on_epoch = [&](std::size_t epoch, double loss) {
    std::fprintf(stderr, "epoch %zu/%zu loss %.5f\n", epoch + 1, config.epochs, loss);
  };
  auto result = ts::train(samples, config, ts::Alphabet::standard(), options);
  ts::Checkpoint ck{std::move(result.params), std::string(ts::Alphabet::standard().symbols()),
                    std::move(result.epoch_losses)};
  ts::save_checkpoint_file(ck, a.output);
  std::fprintf(stderr, "checkpoint %s digest %s\n", a.output.c_str(),
               ts::checkpoint_digest(ck).c_str());
}

// --- index -----------------------------------------------------------------

struct IndexArgs {
  std::string checkpoint;
  std::string catalog;
  std::string output;
};

void run_index(const IndexArgs& a) {
  const auto ck = ts::load_checkpoint_file(a.checkpoint);
  const auto catalog = ts::load_catalog(a.catalog);
  auto index = ts::build_index(ck.params, ts::Alphabet::standard(), catalog,
                               ts::checkpoint_digest(ck), source_date_epoch());
  ts::save_index_file(index, a.output);
  std::fprintf(stderr, "index %s: %zu names x %zu dims, digest %s\n", a.output.c_str(),
               index.size(), index.dims(), ts::index_digest(index).c_str());
}

// --- eval ------------------------------------------------------------------

struct EvalArgs {
  std::string checkpoint;
  std::string index;
  std::string baseline;
  std::string catalog;
  std::string dictionary;
  std::string validation;
};

void run_eval(const EvalArgs& a) {
  double accuracy = 0.0;
  std::string what;
  if (!a.baseline.empty()) {
    if (a.catalog.empty() || a.dictionary.empty()) {
      throw ts::Error(ts::ErrorCode::kConfiguration, "baseline eval needs --catalog and --dictionary");
    }
    const auto catalog = ts::load_catalog(a.catalog);
    auto dict = ts::FrequencyDictionary::load_file(a.dictionary);
    if (a.baseline == "catalog") {
      dict = dict.with_catalog(catalog);
    } else if (a.baseline != "default") {
      throw ts::Error(ts::ErrorCode::kConfiguration, "--baseline is default or catalog");
    }
    const auto set = a.validation.empty() ? ts::catalog_validation(catalog)
                                          : ts::load_validation_file(a.validation, catalog.size());
    ts::BaselinePredictor predictor(std::move(dict), catalog);
    accuracy = ts::evaluate_predictor(
        [&](std::string_view q) { return predictor.predict(q); }, set);
    what = "baseline:" + a.baseline + " on " + set.provenance;
  } else {
    if (a.checkpoint.empty() || a.index.empty()) {
      throw ts::Error(ts::ErrorCode::kConfiguration, "eval needs --checkpoint and --index");
    }
    const auto ck = ts::load_checkpoint_file(a.checkpoint);
    const auto index = ts::load_index_file(a.index, ts::checkpoint_digest(ck));
    const auto set = a.validation.empty() ? ts::catalog_validation(index.names)
                                          : ts::load_validation_file(a.validation, index.size());
    accuracy = ts::evaluate(index, ck.params, ts::Alphabet::standard(), set);
    what = "model on " + set.provenance;
  }
  std::printf("accuracy %.2f%% (%s)\n", 100 * accuracy, what.c_str());
}

// --- matrix / sweep --------------------------------------------------------

struct MatrixArgs {
  std::size_t threads = 0;
  std::string report;
  std::string artifacts;
};

void run_matrix(const Globals& g, const MatrixArgs& a) {
  auto plan = g.plan();
  plan.context.log = log_line;
  if (a.threads > 0) plan.context.threads = a.threads;
  if (!a.artifacts.empty()) plan.context.artifacts_dir = a.artifacts;
  if (plan.experiments.empty()) {
    throw ts::Error(ts::ErrorCode::kConfiguration, "config has no experiments");
  }
  auto report = ts::run_matrix(plan.context, plan.experiments);
  std::cout << report.to_table();
  if (!a.report.empty()) write_text(a.report, report.to_json());
}

struct SweepArgs {
  std::string strategy;
  std::vector<std::size_t> counts;
};

void run_sweep(const Globals& g, const SweepArgs& a) {
  auto plan = g.plan();
  plan.context.log = log_line;
  auto& s = plan.sweep;
  if (!a.strategy.empty()) s.strategy = ts::Strategy::parse(a.strategy);
  if (!a.counts.empty()) s.counts = a.counts;
  std::map<std::size_t, std::vector<double>> by_count;
  for (auto seed : s.seeds) {
    ts::ExperimentConfig base;
    base.id = "sweep-" + std::to_string(seed);
    base.seed = seed;
    for (const auto& p : ts::sample_size_sweep(plan.context, s.strategy, s.counts, base)) {
      by_count[p.samples_per_class].push_back(p.accuracy);
    }
  }
  std::printf("%-6s %-10s %s\n", "N", "mean", "per seed");
  for (const auto& [n, values] : by_count) {
    double sum = 0.0;
    std::string per;
    for (double v : values) {
      sum += v;
      char buf[32];
      std::snprintf(buf, sizeof buf, " %.2f", 100 * v);
      per += buf;
    }
    std::printf("%-6zu %-10.2f%s\n", n, 100 * sum / static_cast<double>(values.size()), per.c_str());
  }
}

// --- serve / bench ---------------------------------------------------------

struct ServeArgs {
  std::string checkpoint;
  std::string index;
  std::string host = "127.0.0.1";
  CLI::Option* port_option = nullptr;
  int port = 8080;
  std::size_t k = 5;
  std::size_t max_query_length = 256;
  double budget_ms = 50.0;
};

// The --port flag wins, then the environment, then the default.
int resolve_port(const ServeArgs& a) {
  if (a.port_option->count() > 0) return a.port;
  if (const char* env = std::getenv(ts::kPortEnvVar); env != nullptr && *env != '\0') {
    try {
      return std::stoi(env);
    } catch (const std::exception&) {
      throw ts::Error(ts::ErrorCode::kConfiguration,
                      std::string(ts::kPortEnvVar) + " is not a port: " + env);
    }
  }
  return a.port;
}

ts::ServiceConfig service_config(const ServeArgs& a) {
  ts::ServiceConfig c;
  c.host = a.host;
  c.port = resolve_port(a);
  c.checkpoint_path = a.checkpoint;
  c.index_path = a.index;
  c.default_k = a.k;
  c.max_query_length = a.max_query_length;
  c.latency_budget_ms = a.budget_ms;
  return c;
}

void run_serve(const ServeArgs& a) {
  sigset_t stop_signals;
  sigemptyset(&stop_signals);
  sigaddset(&stop_signals, SIGINT);
  sigaddset(&stop_signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &stop_signals, nullptr);

  ts::CorrectionService service(service_config(a));
  const int port = service.start();
  std::fprintf(stderr, "serving %zu names on http://%s:%d (index %s)\n",
               service.snapshot()->catalog_size(), a.host.c_str(), port,
               service.snapshot()->index_digest().c_str());
  int signal = 0;
  sigwait(&stop_signals, &signal);
  std::fprintf(stderr, "stopping on signal %d\n", signal);
  service.stop();
}

struct BenchArgs {
  ServeArgs target;
  std::string queries;
  std::string catalog;
  std::size_t count = 10000;
  std::size_t clients = 8;
};

std::vector<std::string> bench_queries(const Globals& g, const BenchArgs& a) {
  if (!a.queries.empty()) {
    std::ifstream in(a.queries);
    if (!in) throw ts::Error(ts::ErrorCode::kIo, "cannot open " + a.queries);
    std::vector<std::string> out;
    for (std::string line; std::getline(in, line);) {
      if (!line.empty()) out.push_back(line);
    }
    return out;
  }
  if (a.catalog.empty()) {
    throw ts::Error(ts::ErrorCode::kConfiguration, "bench needs --queries or --catalog");
  }
  const auto catalog = ts::load_catalog(a.catalog);
  ts::GenerationConfig config;
  config.samples_per_class = (a.count + catalog.size() - 1) / catalog.size();
  config.seed = g.seed;
  auto dataset = ts::build_training_set(
      catalog, config,
      ts::StatsSelector::single(std::make_shared<const ts::StatsModel>(ts::uniform_stats())));
  std::vector<std::string> out;
  for (auto& s : dataset.samples) out.push_back(std::move(s.text));
  ts::Rng rng(g.seed);
  ts::shuffle(std::span<std::string>(out), rng);
  out.resize(std::min(out.size(), a.count));
  return out;
}

void run_bench(const Globals& g, const BenchArgs& a) {
  const auto queries = bench_queries(g, a);
  std::optional<ts::CorrectionService> local;
  int port = 0;
  std::string host = a.target.host;
  if (!a.target.checkpoint.empty()) {
    auto config = service_config(a.target);
    config.port = 0;
    local.emplace(config);
    port = local->start();
  } else {
    port = resolve_port(a.target);
  }
  const auto r = ts::measure_latency(host, port, queries, a.clients, a.target.k);
  if (local) local->stop();
  std::printf("%zu requests, %zu clients, %zu errors\n", r.requests, a.clients, r.errors);
  std::printf("p50 %.3f ms  p99 %.3f ms  p99.9 %.3f ms  max %.3f ms  mean %.3f ms\n", r.p50_ms,
              r.p99_ms, r.p999_ms, r.max_ms, r.mean_ms);
  std::printf("p99 %s the %.0f ms budget\n", r.p99_ms < a.target.budget_ms ? "within" : "over",
              a.target.budget_ms);
}

void add_serve_options(CLI::App* cmd, ServeArgs& a, bool checkpoint_required) {
  auto* ck = cmd->add_option("--checkpoint", a.checkpoint, "model checkpoint");
  auto* ix = cmd->add_option("--index", a.index, "embedding index built from the checkpoint");
  if (checkpoint_required) {
    ck->required();
    ix->required();
  }
  cmd->add_option("--host", a.host, "listen / target host")->capture_default_str();
  a.port_option = cmd->add_option("--port", a.port,
                                  std::string("port (overrides ") + ts::kPortEnvVar + ")");
  cmd->add_option("--k", a.k, "default number of matches")->capture_default_str();
  cmd->add_option("--max-query-length", a.max_query_length)->capture_default_str();
  cmd->add_option("--budget-ms", a.budget_ms, "latency budget")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"typosearch: typo-tolerant catalog search"};
  app.require_subcommand(1);
  Globals g;
  g.seed_option = app.add_option("--seed", g.seed, "seed for generation, training and sampling");
  app.add_option("--config", g.config, "experiment config (JSON)")->check(CLI::ExistingFile);
  app.fallthrough();

  IngestArgs ingest;
  auto* c_ingest = app.add_subcommand("ingest", "parse and classify a typo corpus");
  c_ingest->add_option("--input", ingest.input)->required()->check(CLI::ExistingFile);
  c_ingest->add_option("--format", ingest.format, "tsv | github-jsonl | twitter-tsv")
      ->capture_default_str();
  c_ingest->add_option("--source", ingest.source, "dataset id (default: file stem)");
  c_ingest->add_option("--output", ingest.output, "write canonical wrong/correct TSV");

  StatsArgs stats;
  auto* c_stats = app.add_subcommand("stats", "build a statistics file");
  c_stats->add_option("--input", stats.input, "typo corpus")->check(CLI::ExistingFile);
  c_stats->add_option("--format", stats.format)->capture_default_str();
  c_stats->add_option("--builtin", stats.builtin, "uniform | qwerty");
  c_stats->add_option("--id", stats.id, "dataset id");
  c_stats->add_option("--bins", stats.bins, "position bins")->capture_default_str();
  c_stats->add_option("--output", stats.output, "stats JSON (default stdout)");

  FuseArgs fuse;
  auto* c_fuse = app.add_subcommand("fuse", "grid search over fusion weights");
  c_fuse->add_option("--datasets", fuse.datasets, "dataset ids (default: config)")->delimiter(',');
  c_fuse->add_option("--step", fuse.step, "simplex grid step");
  c_fuse->add_option("--samples", fuse.samples, "samples per class");
  c_fuse->add_option("--report", fuse.report, "write report JSON");

  GenArgs gen;
  auto* c_gen = app.add_subcommand("gen", "generate a synthetic training set");
  c_gen->add_option("--catalog", gen.catalog)->required()->check(CLI::ExistingFile);
  c_gen->add_option("--stats", gen.stats,
                    "stats source path[=weight], repeatable; uniform and qwerty are built in");
  c_gen->add_option("--samples", gen.samples, "samples per class")->capture_default_str();
  c_gen->add_flag("--no-duplicates", gen.no_duplicates);
  c_gen->add_option("--max-retries", gen.max_retries);
  c_gen->add_option("--output", gen.output, "dataset TSV (default stdout)");

  TrainArgs train;
  auto* c_train = app.add_subcommand("train", "train the encoder on a dataset");
  c_train->add_option("--dataset", train.dataset)->required()->check(CLI::ExistingFile);
  c_train->add_option("--catalog", train.catalog)->required()->check(CLI::ExistingFile);
  c_train->add_option("--preset", train.preset, "desk | full");
  c_train->add_option("--epochs", train.epochs);
  c_train->add_option("--batch", train.batch);
  c_train->add_option("--lr", train.lr);
  c_train->add_option("--output", train.output)->required();

  IndexArgs index;
  auto* c_index = app.add_subcommand("index", "embed the catalog (built_at from SOURCE_DATE_EPOCH)");
  c_index->add_option("--checkpoint", index.checkpoint)->required()->check(CLI::ExistingFile);
  c_index->add_option("--catalog", index.catalog)->required()->check(CLI::ExistingFile);
  c_index->add_option("--output", index.output)->required();

  EvalArgs eval;
  auto* c_eval = app.add_subcommand("eval", "top-1 accuracy of a model or baseline");
  c_eval->add_option("--checkpoint", eval.checkpoint);
  c_eval->add_option("--index", eval.index);
  c_eval->add_option("--baseline", eval.baseline, "default | catalog");
  c_eval->add_option("--catalog", eval.catalog);
  c_eval->add_option("--dictionary", eval.dictionary);
  c_eval->add_option("--validation", eval.validation, "query<TAB>class file (default: catalog)");

  MatrixArgs matrix;
  auto* c_matrix = app.add_subcommand("matrix", "run the experiment matrix from --config");
  c_matrix->add_option("--threads", matrix.threads);
  c_matrix->add_option("--report", matrix.report, "write report JSON");
  c_matrix->add_option("--artifacts", matrix.artifacts, "keep dataset, checkpoint and index per row");

  SweepArgs sweep;
  auto* c_sweep = app.add_subcommand("sweep", "accuracy against samples per class");
  c_sweep->add_option("--strategy", sweep.strategy, "e.g. uniform, real:github");
  c_sweep->add_option("--counts", sweep.counts)->delimiter(',');

  ServeArgs serve;
  auto* c_serve = app.add_subcommand("serve", "run the correction API");
  add_serve_options(c_serve, serve, true);

  BenchArgs bench;
  auto* c_bench = app.add_subcommand("bench", "replay queries against the API");
  add_serve_options(c_bench, bench.target, false);
  c_bench->add_option("--queries", bench.queries, "one query per line");
  c_bench->add_option("--catalog", bench.catalog, "generate typo queries from this catalog");
  c_bench->add_option("--count", bench.count)->capture_default_str();
  c_bench->add_option("--clients", bench.clients)->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*c_ingest) run_ingest(ingest);
    if (*c_stats) run_stats(stats);
    if (*c_fuse) run_fuse(g, fuse);
    if (*c_gen) run_gen(g, gen);
    if (*c_train) run_train(g, train);
    if (*c_index) run_index(index);
    if (*c_eval) run_eval(eval);
    if (*c_matrix) run_matrix(g, matrix);
    if (*c_sweep) run_sweep(g, sweep);
    if (*c_serve) run_serve(serve);
    if (*c_bench) run_bench(g, bench);
  } catch (const ts::Error& e) {
    std::fprintf(stderr, "error [%s]: %s\n", std::string(ts::error_code_name(e.code())).c_str(),
                 e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
