#include "typosearch/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "typosearch/digest.hpp"
#include "typosearch/error.hpp"

namespace typosearch {
namespace {

constexpr int kStatsVersion = 1;
constexpr std::string_view kStatsFormat = "typosearch-stats";

bool is_marginal_type(EditType t) {
  return t == EditType::kDeletion || t == EditType::kInsertion;
}

std::vector<double> uniform_vector(std::size_t n) {
  return std::vector<double>(n, 1.0 / static_cast<double>(n));
}

// Normalizes in place; returns false when the total is zero.
bool normalize(std::span<double> values) {
  double total = 0.0;
  for (double v : values) total += v;
  if (total <= 0.0) return false;
  for (double& v : values) v /= total;
  return true;
}

KeyMarginal uniform_marginal(std::size_t k, bool fallback) {
  return {uniform_vector(k), fallback};
}

KeyConditional uniform_conditional(std::size_t k, bool fallback) {
  KeyConditional table;
  table.width = k;
  table.rows.assign(k * k, 1.0 / static_cast<double>(k));
  table.fallback.assign(k, fallback ? 1 : 0);
  return table;
}

KeyConditional point_mass_conditional(std::size_t k, bool fallback) {
  KeyConditional table;
  table.width = k;
  table.rows.assign(k * k, 0.0);
  for (std::size_t i = 0; i < k; ++i) table.rows[i * k + i] = 1.0;
  table.fallback.assign(k, fallback ? 1 : 0);
  return table;
}

PositionHistogram uniform_histogram(std::size_t bins, bool fallback) {
  return {uniform_vector(bins), fallback};
}

StatsModel uniform_model(const Alphabet& alphabet, std::size_t bins,
                         bool fallback) {
  if (bins < 2) throw Error(ErrorCode::kValidation, "position bins must be >= 2");
  const std::size_t k = alphabet.size();
  StatsModel s;
  s.alphabet = alphabet;
  s.error_types.probabilities.fill(1.0 / static_cast<double>(kNumEditTypes));
  s.keys.deletion = uniform_marginal(k, fallback);
  s.keys.insertion = uniform_marginal(k, fallback);
  s.keys.replication = point_mass_conditional(k, fallback);
  s.keys.substitution = uniform_conditional(k, fallback);
  s.keys.transposition = uniform_conditional(k, fallback);
  s.positions.bins = bins;
  for (auto& h : s.positions.per_type) h = uniform_histogram(bins, fallback);
  return s;
}

std::size_t key_index(const Alphabet& alphabet, char key) {
  auto idx = alphabet.index_of(key);
  if (!idx) {
    throw Error(ErrorCode::kDomain,
                std::string("key '") + key + "' is not in the alphabet");
  }
  return *idx;
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string json_string(std::string_view s) {
  return nlohmann::json(std::string(s)).dump();
}

void write_array(std::ostream& out, std::span<const double> values) {
  out << '[';
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out << ", ";
    out << fmt_double(values[i]);
  }
  out << ']';
}

void check_distribution(std::span<const double> values, std::size_t expected,
                        const std::string& what) {
  if (values.size() != expected) {
    throw Error(ErrorCode::kValidation, what + ": expected " +
                                            std::to_string(expected) +
                                            " entries, got " +
                                            std::to_string(values.size()));
  }
  double total = 0.0;
  for (double v : values) {
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
      throw Error(ErrorCode::kValidation, what + ": entry outside [0, 1]");
    }
    total += v;
  }
  if (std::abs(total - 1.0) > kNormalizationTolerance) {
    throw Error(ErrorCode::kValidation,
                what + ": sums to " + fmt_double(total));
  }
}

std::vector<double> read_distribution(const nlohmann::json& j,
                                      std::size_t expected,
                                      const std::string& what) {
  if (!j.is_array()) throw Error(ErrorCode::kLoad, what + " is not an array");
  std::vector<double> values;
  values.reserve(j.size());
  for (const auto& v : j) {
    if (!v.is_number()) throw Error(ErrorCode::kLoad, what + " has a non-number");
    values.push_back(v.get<double>());
  }
  if (values.size() != expected) {
    throw Error(ErrorCode::kLoad, what + " has the wrong length");
  }
  return values;
}

}  // namespace

const KeyMarginal& KeyStats::marginal(EditType t) const {
  if (t == EditType::kDeletion) return deletion;
  if (t == EditType::kInsertion) return insertion;
  throw std::invalid_argument("edit type has conditional key stats");
}

KeyMarginal& KeyStats::marginal(EditType t) {
  return const_cast<KeyMarginal&>(std::as_const(*this).marginal(t));
}

const KeyConditional& KeyStats::conditional(EditType t) const {
  switch (t) {
    case EditType::kReplication: return replication;
    case EditType::kSubstitution: return substitution;
    case EditType::kTransposition: return transposition;
    default: break;
  }
  throw std::invalid_argument("edit type has marginal key stats");
}

KeyConditional& KeyStats::conditional(EditType t) {
  return const_cast<KeyConditional&>(std::as_const(*this).conditional(t));
}

std::size_t PositionStats::bin_of(double r) const {
  if (!(r >= 0.0)) return 0;
  auto b = static_cast<std::size_t>(r * static_cast<double>(bins));
  return std::min(b, bins - 1);
}

StatsModel build_stats(std::span<const EditEvent> events,
                       const Alphabet& alphabet, std::size_t bins) {
  if (events.empty()) {
    throw Error(ErrorCode::kEmptyStats, "no edit events to build statistics from");
  }
  if (bins < 2) throw Error(ErrorCode::kValidation, "position bins must be >= 2");
  const std::size_t k = alphabet.size();
  const std::string& source = events.front().source;

  std::array<double, kNumEditTypes> type_weight{};
  std::vector<double> deletion(k, 0.0);
  std::vector<double> insertion(k, 0.0);
  std::array<std::vector<double>, kNumEditTypes> conditional;
  for (auto t : {EditType::kReplication, EditType::kSubstitution,
                 EditType::kTransposition}) {
    conditional[to_index(t)].assign(k * k, 0.0);
  }
  std::array<std::vector<double>, kNumEditTypes> histograms;
  for (auto& h : histograms) h.assign(bins, 0.0);

  PositionStats layout;
  layout.bins = bins;
  std::uint64_t total = 0;
  for (const auto& ev : events) {
    if (ev.source != source) {
      throw Error(ErrorCode::kValidation,
                  "events mix datasets '" + source + "' and '" + ev.source + "'");
    }
    if (ev.weight < 1) throw Error(ErrorCode::kValidation, "event weight < 1");
    if (!(ev.position_rel >= 0.0 && ev.position_rel <= 1.0)) {
      throw Error(ErrorCode::kValidation, "event position outside [0, 1]");
    }
    const auto w = static_cast<double>(ev.weight);
    const std::size_t ti = to_index(ev.type);
    const std::size_t key = key_index(alphabet, ev.key);
    type_weight[ti] += w;
    total += ev.weight;
    histograms[ti][layout.bin_of(ev.position_rel)] += w;
    switch (ev.type) {
      case EditType::kDeletion:
        deletion[key] += w;
        break;
      case EditType::kInsertion:
        if (!ev.other_key) throw Error(ErrorCode::kValidation, "insertion without key");
        insertion[key_index(alphabet, *ev.other_key)] += w;
        break;
      case EditType::kReplication:
      case EditType::kSubstitution:
      case EditType::kTransposition: {
        if (!ev.other_key) {
          throw Error(ErrorCode::kValidation,
                      std::string(edit_type_name(ev.type)) + " without key");
        }
        const std::size_t other = key_index(alphabet, *ev.other_key);
        conditional[ti][key * k + other] += w;
        break;
      }
    }
  }

  StatsModel s;
  s.dataset_id = source;
  s.alphabet = alphabet;
  s.event_count = total;
  for (std::size_t t = 0; t < kNumEditTypes; ++t) {
    s.error_types.probabilities[t] = type_weight[t] / static_cast<double>(total);
  }

  auto finish_marginal = [&](std::vector<double>& counts) {
    KeyMarginal m{std::move(counts), false};
    if (!normalize(m.probabilities)) m = uniform_marginal(k, true);
    return m;
  };
  s.keys.deletion = finish_marginal(deletion);
  s.keys.insertion = finish_marginal(insertion);

  for (auto t : {EditType::kSubstitution, EditType::kTransposition}) {
    KeyConditional table;
    table.width = k;
    table.rows = std::move(conditional[to_index(t)]);
    table.fallback.assign(k, 0);
    for (std::size_t key = 0; key < k; ++key) {
      auto row = table.row(key);
      if (!normalize(row)) {
        std::fill(row.begin(), row.end(), 1.0 / static_cast<double>(k));
        table.fallback[key] = 1;
      }
    }
    s.keys.conditional(t) = std::move(table);
  }

  // Replication always duplicates the key itself.
  s.keys.replication = point_mass_conditional(k, false);
  const auto& repl = conditional[to_index(EditType::kReplication)];
  for (std::size_t key = 0; key < k; ++key) {
    double seen = 0.0;
    for (std::size_t o = 0; o < k; ++o) seen += repl[key * k + o];
    s.keys.replication.fallback[key] = seen > 0.0 ? 0 : 1;
  }

  s.positions.bins = bins;
  for (std::size_t t = 0; t < kNumEditTypes; ++t) {
    PositionHistogram h{std::move(histograms[t]), false};
    if (!normalize(h.probabilities)) h = uniform_histogram(bins, true);
    s.positions.per_type[t] = std::move(h);
  }
  return s;
}

StatsModel uniform_stats(const Alphabet& alphabet, std::size_t bins) {
  StatsModel s = uniform_model(alphabet, bins, false);
  s.dataset_id = "uniform";
  return s;
}

StatsModel qwerty_stats(const Alphabet& alphabet, const KeyboardLayout& layout,
                        std::size_t bins) {
  StatsModel s = uniform_model(alphabet, bins, false);
  s.dataset_id = "qwerty";
  auto& sub = s.keys.substitution;
  for (std::size_t key = 0; key < alphabet.size(); ++key) {
    auto row = sub.row(key);
    std::vector<std::size_t> nbrs;
    for (char c : layout.neighbors(alphabet.symbol(key))) {
      if (auto idx = alphabet.index_of(c)) nbrs.push_back(*idx);
    }
    if (nbrs.empty()) {
      sub.fallback[key] = 1;
      continue;
    }
    std::fill(row.begin(), row.end(), 0.0);
    for (auto idx : nbrs) row[idx] = 1.0 / static_cast<double>(nbrs.size());
  }
  return s;
}

KeyLookup lookup_key_dist(const StatsModel& stats, EditType type, char key) {
  const std::size_t idx = key_index(stats.alphabet, key);
  KeyLookup out;
  if (is_marginal_type(type)) {
    const auto& m = stats.keys.marginal(type);
    out.marginal = m.probabilities[idx];
    out.fallback = m.fallback;
  } else {
    const auto& table = stats.keys.conditional(type);
    out.distribution = table.row(idx);
    out.fallback = table.fallback[idx] != 0;
  }
  return out;
}

std::size_t sample_position(const StatsModel& stats, EditType type,
                            std::size_t string_length, Rng& rng) {
  if (string_length == 0) {
    throw std::invalid_argument("sample_position: empty string");
  }
  const auto& hist = stats.positions.per_type[to_index(type)].probabilities;
  const std::size_t bin = sample_categorical(rng, hist);
  const double r = (static_cast<double>(bin) + uniform01(rng)) /
                   static_cast<double>(hist.size());
  const double scaled = std::clamp(r, 0.0, 1.0) *
                        static_cast<double>(string_length - 1);
  auto index = static_cast<std::size_t>(std::llround(scaled));
  return std::min(index, string_length - 1);
}

void validate_stats(const StatsModel& stats) {
  const std::size_t k = stats.alphabet.size();
  check_distribution(stats.error_types.probabilities, kNumEditTypes,
                     "error type distribution");
  for (auto t : {EditType::kDeletion, EditType::kInsertion}) {
    check_distribution(stats.keys.marginal(t).probabilities, k,
                       std::string(edit_type_name(t)) + " marginal");
  }
  for (auto t : {EditType::kReplication, EditType::kSubstitution,
                 EditType::kTransposition}) {
    const auto& table = stats.keys.conditional(t);
    if (table.width != k || table.rows.size() != k * k ||
        table.fallback.size() != k) {
      throw Error(ErrorCode::kValidation,
                  std::string(edit_type_name(t)) + " table has the wrong shape");
    }
    for (std::size_t key = 0; key < k; ++key) {
      check_distribution(table.row(key), k,
                         std::string(edit_type_name(t)) + " row '" +
                             stats.alphabet.symbol(key) + "'");
    }
  }
  if (stats.positions.bins < 2) {
    throw Error(ErrorCode::kValidation, "position bins must be >= 2");
  }
  for (auto t : kAllEditTypes) {
    check_distribution(stats.positions.per_type[to_index(t)].probabilities,
                       stats.positions.bins,
                       std::string(edit_type_name(t)) + " position histogram");
  }
}

void save_stats(const StatsModel& stats, std::ostream& out) {
  const Alphabet& alphabet = stats.alphabet;
  const std::size_t k = alphabet.size();
  out << "{\n";
  out << "  \"format\": " << json_string(kStatsFormat) << ",\n";
  out << "  \"version\": " << kStatsVersion << ",\n";
  out << "  \"dataset_id\": " << json_string(stats.dataset_id) << ",\n";
  out << "  \"alphabet\": " << json_string(alphabet.symbols()) << ",\n";
  out << "  \"bins\": " << stats.positions.bins << ",\n";
  out << "  \"event_count\": " << stats.event_count << ",\n";

  out << "  \"error_types\": {";
  for (auto t : kAllEditTypes) {
    out << (t == EditType::kDeletion ? "\n" : ",\n") << "    "
        << json_string(edit_type_name(t)) << ": "
        << fmt_double(stats.error_types[t]);
  }
  out << "\n  },\n";

  out << "  \"key_stats\": {";
  for (auto t : kAllEditTypes) {
    out << (t == EditType::kDeletion ? "\n" : ",\n") << "    "
        << json_string(edit_type_name(t)) << ": {";
    if (is_marginal_type(t)) {
      const auto& m = stats.keys.marginal(t);
      out << "\n      \"fallback\": " << (m.fallback ? "true" : "false")
          << ",\n      \"marginal\": ";
      write_array(out, m.probabilities);
      out << "\n    }";
    } else {
      const auto& table = stats.keys.conditional(t);
      out << "\n      \"fallback\": [";
      bool first = true;
      for (std::size_t key = 0; key < k; ++key) {
        if (!table.fallback[key]) continue;
        out << (first ? "" : ", ")
            << json_string(std::string(1, alphabet.symbol(key)));
        first = false;
      }
      out << "],\n      \"rows\": {";
      for (std::size_t key = 0; key < k; ++key) {
        out << (key ? ",\n" : "\n") << "        "
            << json_string(std::string(1, alphabet.symbol(key))) << ": ";
        write_array(out, table.row(key));
      }
      out << "\n      }\n    }";
    }
  }
  out << "\n  },\n";

  out << "  \"positions\": {";
  for (auto t : kAllEditTypes) {
    const auto& h = stats.positions.per_type[to_index(t)];
    out << (t == EditType::kDeletion ? "\n" : ",\n") << "    "
        << json_string(edit_type_name(t)) << ": {\"fallback\": "
        << (h.fallback ? "true" : "false") << ", \"probabilities\": ";
    write_array(out, h.probabilities);
    out << "}";
  }
  out << "\n  }\n}\n";
}

std::string save_stats_string(const StatsModel& stats) {
  std::ostringstream out;
  save_stats(stats, out);
  return out.str();
}

StatsModel load_stats(std::istream& in) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kLoad, std::string("stats file: ") + e.what());
  }
  try {
    if (!doc.is_object() || doc.value("format", "") != kStatsFormat) {
      throw Error(ErrorCode::kLoad, "not a typosearch stats file");
    }
    const int version = doc.at("version").get<int>();
    if (version != kStatsVersion) {
      throw Error(ErrorCode::kLoad, "unsupported stats version " +
                                        std::to_string(version));
    }
    const Alphabet alphabet(doc.value("alphabet", std::string(Alphabet::standard().symbols())));
    const auto bins = doc.value<std::size_t>("bins", kDefaultPositionBins);
    const std::size_t k = alphabet.size();

    // Start from a fully flagged fallback model and overwrite what is present.
    StatsModel s = uniform_model(alphabet, bins, true);
    s.dataset_id = doc.value("dataset_id", "");
    s.event_count = doc.value<std::uint64_t>("event_count", 0);

    s.error_types.probabilities.fill(0.0);
    const auto& types = doc.at("error_types");
    for (auto it = types.begin(); it != types.end(); ++it) {
      auto t = parse_edit_type(it.key());
      if (!t) throw Error(ErrorCode::kLoad, "unknown edit type " + it.key());
      s.error_types.probabilities[to_index(*t)] = it.value().get<double>();
    }

    if (auto ks = doc.find("key_stats"); ks != doc.end()) {
      for (auto it = ks->begin(); it != ks->end(); ++it) {
        auto t = parse_edit_type(it.key());
        if (!t) throw Error(ErrorCode::kLoad, "unknown edit type " + it.key());
        const auto& section = it.value();
        if (is_marginal_type(*t)) {
          auto& m = s.keys.marginal(*t);
          m.probabilities = read_distribution(section.at("marginal"), k,
                                              it.key() + " marginal");
          m.fallback = section.value("fallback", false);
        } else {
          auto& table = s.keys.conditional(*t);
          std::fill(table.fallback.begin(), table.fallback.end(), 1);
          if (auto rows = section.find("rows"); rows != section.end()) {
            for (auto r = rows->begin(); r != rows->end(); ++r) {
              if (r.key().size() != 1) {
                throw Error(ErrorCode::kLoad, "row key must be one character");
              }
              const std::size_t key = key_index(alphabet, r.key()[0]);
              auto values = read_distribution(r.value(), k,
                                              it.key() + " row " + r.key());
              std::copy(values.begin(), values.end(), table.row(key).begin());
              table.fallback[key] = 0;
            }
          }
          if (auto fb = section.find("fallback"); fb != section.end()) {
            for (const auto& c : *fb) {
              auto key_str = c.get<std::string>();
              if (key_str.size() != 1) {
                throw Error(ErrorCode::kLoad, "fallback key must be one character");
              }
              table.fallback[key_index(alphabet, key_str[0])] = 1;
            }
          }
        }
      }
    }

    if (auto pos = doc.find("positions"); pos != doc.end()) {
      for (auto it = pos->begin(); it != pos->end(); ++it) {
        auto t = parse_edit_type(it.key());
        if (!t) throw Error(ErrorCode::kLoad, "unknown edit type " + it.key());
        auto& h = s.positions.per_type[to_index(*t)];
        h.probabilities = read_distribution(it.value().at("probabilities"), bins,
                                            it.key() + " positions");
        h.fallback = it.value().value("fallback", false);
      }
    }

    validate_stats(s);
    return s;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kLoad) throw;
    throw Error(ErrorCode::kLoad, e.what());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kLoad, std::string("stats file: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw Error(ErrorCode::kLoad, std::string("stats file: ") + e.what());
  }
}

StatsModel load_stats_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return load_stats(in);
}

void save_stats_file(const StatsModel& stats, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  save_stats(stats, out);
  if (!out) throw Error(ErrorCode::kIo, "error writing " + path.string());
}

std::string stats_digest(const StatsModel& stats) {
  return digest_hex(save_stats_string(stats));
}

StatsSelector::StatsSelector(FusionSpec spec) : spec_(std::move(spec)) {
  if (spec_.components.empty()) {
    throw Error(ErrorCode::kValidation, "fusion needs at least one dataset");
  }
  double total = 0.0;
  for (const auto& c : spec_.components) {
    if (!c.stats) throw Error(ErrorCode::kValidation, "fusion component without stats");
    if (!(c.weight >= 0.0) || !std::isfinite(c.weight)) {
      throw Error(ErrorCode::kValidation, "fusion weights must be >= 0");
    }
    if (!(c.stats->alphabet == spec_.components.front().stats->alphabet)) {
      throw Error(ErrorCode::kValidation, "fusion components use different alphabets");
    }
    total += c.weight;
    weights_.push_back(c.weight);
  }
  if (std::abs(total - 1.0) > kNormalizationTolerance) {
    throw Error(ErrorCode::kValidation,
                "fusion weights sum to " + fmt_double(total) + ", not 1");
  }
}

StatsSelector StatsSelector::single(std::shared_ptr<const StatsModel> stats) {
  return StatsSelector(FusionSpec{{FusionComponent{std::move(stats), 1.0}}});
}

std::size_t StatsSelector::pick_index(Rng& rng) const {
  return sample_categorical(rng, weights_);
}

const StatsModel& StatsSelector::pick(Rng& rng) const {
  return *spec_.components[pick_index(rng)].stats;
}

const Alphabet& StatsSelector::alphabet() const {
  return spec_.components.front().stats->alphabet;
}

std::string StatsSelector::digest() const {
  Fnv1a64 h;
  for (const auto& c : spec_.components) {
    h.update(stats_digest(*c.stats));
    h.update(fmt_double(c.weight));
  }
  return h.hex();
}

StatsSelector fuse(FusionSpec spec) { return StatsSelector(std::move(spec)); }

}  // namespace typosearch
