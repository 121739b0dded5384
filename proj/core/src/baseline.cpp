#include "typosearch/baseline.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <limits>
#include <sstream>

#include "typosearch/error.hpp"

namespace typosearch {

std::size_t levenshtein(std::string_view a, std::string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({up + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

std::optional<std::size_t> bounded_levenshtein(std::string_view a, std::string_view b,
                                               std::size_t max_distance) {
  if (a.size() < b.size()) std::swap(a, b);
  if (a.size() - b.size() > max_distance) return std::nullopt;
  const std::size_t inf = std::numeric_limits<std::size_t>::max() / 2;
  const std::size_t k = max_distance;
  std::vector<std::size_t> prev(b.size() + 1, inf);
  std::vector<std::size_t> cur(b.size() + 1, inf);
  for (std::size_t j = 0; j <= std::min(b.size(), k); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    const std::size_t lo = i > k ? i - k : 0;
    const std::size_t hi = std::min(b.size(), i + k);
    std::fill(cur.begin(), cur.end(), inf);
    std::size_t row_min = inf;
    if (lo == 0) {
      cur[0] = i;
      row_min = i;
    }
    for (std::size_t j = std::max<std::size_t>(lo, 1); j <= hi; ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      const std::size_t del = prev[j] + 1;
      const std::size_t ins = cur[j - 1] + 1;
      cur[j] = std::min({sub, del, ins});
      row_min = std::min(row_min, cur[j]);
    }
    if (row_min > k) return std::nullopt;
    std::swap(prev, cur);
  }
  if (prev[b.size()] > k) return std::nullopt;
  return prev[b.size()];
}

// ---------------------------------------------------------------------------

FrequencyDictionary FrequencyDictionary::load(std::istream& in, const Alphabet& alphabet) {
  FrequencyDictionary dict(Source::kDefaultEnglish);
  std::string line;
  while (std::getline(in, line)) {
    const auto tab = line.find('\t');
    if (tab == std::string::npos) continue;
    std::uint64_t frequency = 0;
    try {
      frequency = std::stoull(line.substr(tab + 1));
    } catch (const std::exception&) {
      continue;
    }
    const std::string word = alphabet.canonicalize(std::string_view(line).substr(0, tab));
    if (word.empty() || frequency < 1) continue;
    dict.add(word, frequency);
  }
  return dict;
}

FrequencyDictionary FrequencyDictionary::load_file(const std::filesystem::path& path,
                                                   const Alphabet& alphabet) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return load(in, alphabet);
}

FrequencyDictionary FrequencyDictionary::with_catalog(
    std::span<const std::string> catalog) const {
  FrequencyDictionary out = *this;
  out.source_ = Source::kCatalogEnhanced;
  for (const auto& name : catalog) {
    std::istringstream tokens(name);
    std::string token;
    while (tokens >> token) out.add(token, 1);
    if (!name.empty()) out.add(name, 1);
  }
  return out;
}

void FrequencyDictionary::add(std::string_view word, std::uint64_t frequency) {
  if (word.empty() || frequency == 0) return;
  auto [it, inserted] = words_.try_emplace(std::string(word), 0);
  it->second += frequency;
  if (inserted) {
    if (by_length_.size() <= word.size()) by_length_.resize(word.size() + 1);
    by_length_[word.size()].push_back(it->first);
  }
}

std::uint64_t FrequencyDictionary::frequency(std::string_view word) const {
  auto it = words_.find(std::string(word));
  return it == words_.end() ? 0 : it->second;
}

std::span<const std::string> FrequencyDictionary::words_of_length(std::size_t length) const {
  if (length >= by_length_.size()) return {};
  return by_length_[length];
}

std::optional<std::string> baseline_correct(std::string_view word,
                                            const FrequencyDictionary& dict,
                                            std::size_t max_edit) {
  if (dict.empty()) throw Error(ErrorCode::kConfiguration, "empty dictionary");
  if (dict.contains(word)) return std::string(word);

  // best[d] is the winning candidate at distance d.
  std::vector<const std::string*> best(max_edit + 1, nullptr);
  std::vector<std::uint64_t> best_freq(max_edit + 1, 0);
  const std::size_t lo = word.size() > max_edit ? word.size() - max_edit : 0;
  for (std::size_t len = lo; len <= word.size() + max_edit; ++len) {
    for (const auto& candidate : dict.words_of_length(len)) {
      const auto d = bounded_levenshtein(word, candidate, max_edit);
      if (!d || *d == 0) continue;
      const std::uint64_t f = dict.frequency(candidate);
      const std::string* cur = best[*d];
      if (!cur || f > best_freq[*d] || (f == best_freq[*d] && candidate < *cur)) {
        best[*d] = &candidate;
        best_freq[*d] = f;
      }
    }
  }
  for (std::size_t d = 1; d <= max_edit; ++d) {
    if (best[d]) return *best[d];
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------

BaselinePredictor::BaselinePredictor(FrequencyDictionary dict,
                                     std::span<const std::string> catalog,
                                     const Alphabet& alphabet, std::size_t max_edit)
    : dict_(std::move(dict)), alphabet_(alphabet), max_edit_(max_edit) {
  if (dict_.empty()) throw Error(ErrorCode::kConfiguration, "empty dictionary");
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    classes_.try_emplace(alphabet_.canonicalize(catalog[i]), i);
  }
}

std::string BaselinePredictor::correct_query(std::string_view query) const {
  const std::string canonical = alphabet_.canonicalize(query);
  if (canonical.empty()) return canonical;
  if (auto whole = baseline_correct(canonical, dict_, max_edit_);
      whole && classes_.contains(*whole)) {
    return *whole;
  }
  std::istringstream tokens(canonical);
  std::string token;
  std::string out;
  while (tokens >> token) {
    if (!out.empty()) out.push_back(' ');
    out += baseline_correct(token, dict_, max_edit_).value_or(token);
  }
  return out;
}

std::optional<std::size_t> BaselinePredictor::predict(std::string_view query) const {
  auto it = classes_.find(correct_query(query));
  if (it == classes_.end()) return std::nullopt;
  return it->second;
}

}  // namespace typosearch
