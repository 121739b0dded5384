#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "typosearch/alphabet.hpp"

namespace typosearch {

// Unit-cost insert / delete / substitute distance.
std::size_t levenshtein(std::string_view a, std::string_view b);

// Distance if it is <= max_distance, otherwise nullopt. Banded DP.
std::optional<std::size_t> bounded_levenshtein(std::string_view a,
                                               std::string_view b,
                                               std::size_t max_distance);

class FrequencyDictionary {
 public:
  enum class Source { kDefaultEnglish, kCatalogEnhanced };

  explicit FrequencyDictionary(Source source = Source::kDefaultEnglish)
      : source_(source) {}

  // Lines of `word<TAB>frequency`; words are canonicalized. Entries that
  // canonicalize to nothing or carry a frequency < 1 are skipped.
  static FrequencyDictionary load(std::istream& in,
                                  const Alphabet& alphabet = Alphabet::standard());
  static FrequencyDictionary load_file(const std::filesystem::path& path,
                                       const Alphabet& alphabet = Alphabet::standard());

  // Copy with every catalog token (frequency +1 per occurrence) and every
  // full catalog name (as one entry, spaces included) added.
  FrequencyDictionary with_catalog(std::span<const std::string> catalog) const;

  void add(std::string_view word, std::uint64_t frequency);
  std::uint64_t frequency(std::string_view word) const;
  bool contains(std::string_view word) const { return frequency(word) > 0; }
  std::size_t size() const noexcept { return words_.size(); }
  bool empty() const noexcept { return words_.empty(); }
  Source source() const noexcept { return source_; }

  // Entries of one length, for candidate scans.
  std::span<const std::string> words_of_length(std::size_t length) const;

 private:
  Source source_;
  std::unordered_map<std::string, std::uint64_t> words_;
  std::vector<std::vector<std::string>> by_length_;
};

// Norvig-style correction: the word itself if known, otherwise the most
// frequent dictionary word at distance 1, then at distance 2 (up to
// max_edit); ties by lexicographic order. Throws Error(kConfiguration) for an
// empty dictionary.
std::optional<std::string> baseline_correct(std::string_view word,
                                            const FrequencyDictionary& dict,
                                            std::size_t max_edit = 2);

// Maps a query to a catalog class through the dictionary corrector: the whole
// query is corrected first (catalog-enhanced dictionaries contain full names),
// then token by token; the corrected string must equal a catalog name.
class BaselinePredictor {
 public:
  BaselinePredictor(FrequencyDictionary dict,
                    std::span<const std::string> catalog,
                    const Alphabet& alphabet = Alphabet::standard(),
                    std::size_t max_edit = 2);

  std::string correct_query(std::string_view query) const;
  std::optional<std::size_t> predict(std::string_view query) const;

 private:
  FrequencyDictionary dict_;
  std::unordered_map<std::string, std::size_t> classes_;
  Alphabet alphabet_;
  std::size_t max_edit_;
};

}  // namespace typosearch
