#include "typosearch/syngen.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>
#include <unordered_set>

#include "typosearch/error.hpp"

namespace typosearch {

void GenerationConfig::validate() const {
  if (samples_per_class < 1) {
    throw Error(ErrorCode::kConfiguration, "samples_per_class must be >= 1");
  }
  if (effective_max_retries() < samples_per_class) {
    throw Error(ErrorCode::kConfiguration, "max_retries must be >= samples_per_class");
  }
}

std::optional<std::string> apply_typo(std::string_view s, EditType type,
                                      std::size_t index,
                                      std::span<const double> key_row,
                                      const Alphabet& alphabet, Rng& rng) {
  if (index >= s.size()) {
    throw std::out_of_range("apply_typo: index " + std::to_string(index) +
                            " outside string of length " +
                            std::to_string(s.size()));
  }
  std::string out(s);
  switch (type) {
    case EditType::kDeletion:
      if (s.size() < 2) return std::nullopt;
      out.erase(index, 1);
      break;
    case EditType::kInsertion: {
      if (key_row.size() != alphabet.size()) {
        throw std::invalid_argument("apply_typo: insertion row has wrong width");
      }
      const char key = alphabet.symbol(sample_categorical(rng, key_row));
      out.insert(out.begin() + static_cast<std::ptrdiff_t>(index) + 1, key);
      break;
    }
    case EditType::kReplication:
      out.insert(out.begin() + static_cast<std::ptrdiff_t>(index) + 1, s[index]);
      break;
    case EditType::kSubstitution: {
      if (key_row.size() != alphabet.size()) {
        throw std::invalid_argument("apply_typo: substitution row has wrong width");
      }
      auto self = alphabet.index_of(s[index]);
      std::vector<double> row(key_row.begin(), key_row.end());
      if (self) row[*self] = 0.0;
      double mass = 0.0;
      for (double v : row) mass += v;
      // Drawing from the row with the key itself removed is the same
      // distribution as redrawing until the key changes.
      if (mass <= 0.0) return std::nullopt;
      out[index] = alphabet.symbol(sample_categorical(rng, row));
      break;
    }
    case EditType::kTransposition: {
      if (s.size() < 2) return std::nullopt;
      const std::size_t other = index + 1 < s.size() ? index + 1 : index - 1;
      if (s[index] == s[other]) return std::nullopt;
      std::swap(out[index], out[other]);
      break;
    }
  }
  if (out == s || out.empty() || !alphabet.is_canonical(out)) return std::nullopt;
  return out;
}

std::optional<std::string> replay_edit(std::string_view correct,
                                       const EditEvent& event,
                                       const Alphabet& alphabet) {
  std::vector<double> row(alphabet.size(), 0.0);
  if (event.other_key) {
    auto idx = alphabet.index_of(*event.other_key);
    if (!idx) return std::nullopt;
    row[*idx] = 1.0;
  } else {
    row[alphabet.space_index()] = 1.0;
  }
  std::size_t index = event.position_index;
  if (event.type == EditType::kInsertion) {
    // Insertions are applied after the sampled index.
    if (index == 0) return std::nullopt;
    --index;
  }
  if (index >= correct.size()) return std::nullopt;
  Rng rng(0);
  return apply_typo(correct, event.type, index, row, alphabet, rng);
}

std::vector<SynthSample> generate_samples(std::string_view s_gt,
                                          std::size_t label,
                                          const GenerationConfig& config,
                                          const StatsSelector& stats) {
  config.validate();
  if (s_gt.empty()) {
    throw std::invalid_argument("generate_samples: empty ground truth");
  }
  const Alphabet& alphabet = stats.alphabet();
  const std::size_t max_retries = config.effective_max_retries();
  const std::size_t attempts = 2 * s_gt.size() + 8;

  Rng rng(derive_seed(config.seed, s_gt));
  std::vector<SynthSample> out;
  out.reserve(config.samples_per_class);
  std::unordered_set<std::string> seen;
  std::size_t rejected = 0;

  while (out.size() < config.samples_per_class) {
    const StatsModel& model = stats.pick(rng);
    const EditType type =
        kAllEditTypes[sample_categorical(rng, model.error_types.probabilities)];
    // A draw that is a no-op or leaves canonical form (a replicated space, a
    // transposed double letter) says nothing about the type, so the position
    // and key are redrawn. Only a type that fails every attempt is treated as
    // inapplicable and the type is drawn again. Without this the emitted type
    // mix drifts away from the error-type distribution.
    std::optional<std::string> text;
    for (std::size_t attempt = 0; attempt < attempts && !text; ++attempt) {
      const std::size_t index = sample_position(model, type, s_gt.size(), rng);
      std::span<const double> row;
      if (type == EditType::kInsertion) {
        row = model.keys.insertion.probabilities;
      } else if (type == EditType::kSubstitution) {
        row = lookup_key_dist(model, type, s_gt[index]).distribution;
      }
      text = apply_typo(s_gt, type, index, row, alphabet, rng);
    }
    const bool reject =
        !text || (!config.keep_duplicate && seen.contains(*text));
    if (reject) {
      if (++rejected > max_retries) {
        throw Error(ErrorCode::kGenerationExhausted,
                    "could not draw " + std::to_string(config.samples_per_class) +
                        " samples for '" + std::string(s_gt) + "' within " +
                        std::to_string(max_retries) + " rejected draws");
      }
      continue;
    }
    if (!config.keep_duplicate) seen.insert(*text);
    out.push_back({std::move(*text), label, type, model.dataset_id});
  }
  return out;
}

namespace {

void validate_catalog_with(std::span<const std::string> catalog,
                           const Alphabet& alphabet) {
  std::map<std::string, std::vector<std::string>> by_canonical;
  std::string problems;
  for (const auto& name : catalog) {
    auto canonical = alphabet.canonicalize(name);
    if (canonical.empty()) {
      problems += " '" + name + "' is empty after canonicalization;";
      continue;
    }
    by_canonical[canonical].push_back(name);
  }
  for (const auto& [canonical, names] : by_canonical) {
    if (names.size() < 2) continue;
    problems += " '" + canonical + "' <-";
    for (const auto& n : names) problems += " '" + n + "'";
    problems += ";";
  }
  if (!problems.empty()) {
    throw Error(ErrorCode::kCatalog, "catalog collisions:" + problems);
  }
}

}  // namespace

void validate_catalog(std::span<const std::string> catalog) {
  validate_catalog_with(catalog, Alphabet::standard());
}

std::vector<std::string> load_catalog(const std::filesystem::path& path,
                                      const Alphabet& alphabet) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::vector<std::string> names;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    auto canonical = alphabet.canonicalize(line);
    if (!canonical.empty()) names.push_back(std::move(canonical));
  }
  if (names.empty()) throw Error(ErrorCode::kCatalog, path.string() + " is empty");
  validate_catalog_with(names, alphabet);
  return names;
}

SyntheticDataset build_training_set(std::span<const std::string> catalog,
                                    const GenerationConfig& config,
                                    const StatsSelector& stats) {
  config.validate();
  const Alphabet& alphabet = stats.alphabet();
  validate_catalog_with(catalog, alphabet);

  SyntheticDataset dataset;
  dataset.config = config;
  dataset.stats_digest = stats.digest();
  dataset.catalog.reserve(catalog.size());
  for (const auto& name : catalog) dataset.catalog.push_back(alphabet.canonicalize(name));
  dataset.samples.reserve(catalog.size() * config.samples_per_class);
  for (std::size_t label = 0; label < dataset.catalog.size(); ++label) {
    auto samples = generate_samples(dataset.catalog[label], label, config, stats);
    std::move(samples.begin(), samples.end(), std::back_inserter(dataset.samples));
  }
  return dataset;
}

void save_dataset(const SyntheticDataset& dataset, std::ostream& out) {
  const auto& c = dataset.config;
  out << "# typosearch-dataset v1\n";
  out << "# strategy=" << c.strategy << " samples_per_class=" << c.samples_per_class
      << " keep_duplicate=" << (c.keep_duplicate ? 1 : 0) << " seed=" << c.seed
      << " max_retries=" << c.effective_max_retries() << "\n";
  out << "# stats_digest=" << dataset.stats_digest << "\n";
  out << "# classes=" << dataset.catalog.size()
      << " samples=" << dataset.samples.size() << "\n";
  for (const auto& s : dataset.samples) {
    out << s.text << '\t' << s.label << '\t' << edit_type_name(s.edit_type)
        << '\t' << s.source_dataset << '\n';
  }
}

void save_dataset_file(const SyntheticDataset& dataset,
                       const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  save_dataset(dataset, out);
  if (!out) throw Error(ErrorCode::kIo, "error writing " + path.string());
}

std::vector<SynthSample> load_dataset(std::istream& in) {
  std::vector<SynthSample> samples;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string_view> fields;
    std::string_view rest = line;
    for (std::size_t pos; (pos = rest.find('\t')) != std::string_view::npos;) {
      fields.push_back(rest.substr(0, pos));
      rest.remove_prefix(pos + 1);
    }
    fields.push_back(rest);
    std::size_t label = 0;
    auto type = fields.size() == 4 ? parse_edit_type(fields[2]) : std::nullopt;
    bool ok = type.has_value() && !fields[0].empty();
    if (ok) {
      auto [ptr, ec] = std::from_chars(fields[1].data(),
                                       fields[1].data() + fields[1].size(), label);
      ok = ec == std::errc{} && ptr == fields[1].data() + fields[1].size();
    }
    if (!ok) {
      throw Error(ErrorCode::kLoad,
                  "malformed dataset line " + std::to_string(line_no));
    }
    samples.push_back({std::string(fields[0]), label, *type, std::string(fields[3])});
  }
  if (in.bad()) throw Error(ErrorCode::kIo, "error reading dataset");
  return samples;
}

std::vector<SynthSample> load_dataset_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return load_dataset(in);
}

}  // namespace typosearch
