#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "typosearch/baseline.hpp"
#include "typosearch/index.hpp"
#include "typosearch/model.hpp"
#include "typosearch/stats.hpp"
#include "typosearch/syngen.hpp"

namespace ts = typosearch;

namespace {

const std::vector<std::string>& catalog_1000() {
  static const auto catalog =
      ts::load_catalog(std::string(TYPOSEARCH_DATA_DIR) + "/catalog/catalog_1000.txt");
  return catalog;
}

const ts::ModelParams& desk_params() {
  static const auto params = [] {
    auto config = ts::ModelConfig::desk_scale(catalog_1000().size());
    config.init_seed = 1;
    return ts::init_params(config);
  }();
  return params;
}

std::vector<std::string> typo_queries(std::size_t per_class) {
  ts::GenerationConfig config;
  config.samples_per_class = per_class;
  config.seed = 3;
  auto selector =
      ts::StatsSelector::single(std::make_shared<const ts::StatsModel>(ts::uniform_stats()));
  std::vector<std::string> out;
  for (auto& s : ts::build_training_set(catalog_1000(), config, selector).samples) {
    out.push_back(std::move(s.text));
  }
  return out;
}

void BM_Embed(benchmark::State& state) {
  const auto& params = desk_params();
  const std::string q = "contoso payroll connector";
  for (auto _ : state) {
    benchmark::DoNotOptimize(ts::embed(params, q, ts::Alphabet::standard()));
  }
}
BENCHMARK(BM_Embed);

void BM_Query(benchmark::State& state) {
  const auto& params = desk_params();
  const auto index = ts::build_index(params, ts::Alphabet::standard(), catalog_1000());
  const auto queries = typo_queries(1);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(ts::query(index, params, ts::Alphabet::standard(),
                                       queries[i++ % queries.size()], 5));
  }
}
BENCHMARK(BM_Query)->Unit(benchmark::kMicrosecond);

ts::EncodedBatch desk_batch(const ts::ModelConfig& config) {
  const auto texts = typo_queries(1);
  const std::vector<std::string> batch_texts(texts.begin(), texts.begin() + config.batch_size);
  std::vector<std::size_t> labels(config.batch_size);
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = i;
  return ts::encode_batch(batch_texts, labels, config, ts::Alphabet::standard());
}

void BM_ForwardBatch(benchmark::State& state) {
  const auto config = ts::ModelConfig::desk_scale(catalog_1000().size());
  const auto batch = desk_batch(config);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ts::forward(desk_params(), batch));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(config.batch_size));
}
BENCHMARK(BM_ForwardBatch)->Unit(benchmark::kMicrosecond);

void BM_LossAndGradients(benchmark::State& state) {
  const auto config = ts::ModelConfig::desk_scale(catalog_1000().size());
  const auto batch = desk_batch(config);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ts::loss_and_gradients(desk_params(), batch));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(config.batch_size));
}
BENCHMARK(BM_LossAndGradients)->Unit(benchmark::kMillisecond);

void BM_Levenshtein(benchmark::State& state) {
  const auto& catalog = catalog_1000();
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        ts::levenshtein(catalog[i % catalog.size()], catalog[(i + 1) % catalog.size()]));
    ++i;
  }
}
BENCHMARK(BM_Levenshtein);

void BM_BaselineCorrect(benchmark::State& state) {
  static const auto dict = ts::FrequencyDictionary::load_file(
      std::string(TYPOSEARCH_DATA_DIR) + "/dictionaries/en_top20k.tsv");
  const std::vector<std::string> words = {"finlly", "contoso", "paymnet", "schedul", "xqzv"};
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(ts::baseline_correct(words[i++ % words.size()], dict));
  }
}
BENCHMARK(BM_BaselineCorrect)->Unit(benchmark::kMicrosecond);

void BM_GenerateSamples(benchmark::State& state) {
  auto selector =
      ts::StatsSelector::single(std::make_shared<const ts::StatsModel>(ts::qwerty_stats()));
  ts::GenerationConfig config;
  config.samples_per_class = 20;
  for (auto _ : state) {
    benchmark::DoNotOptimize(ts::generate_samples("contoso payroll connector", 0, config, selector));
  }
}
BENCHMARK(BM_GenerateSamples)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
