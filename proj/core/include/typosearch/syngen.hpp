#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "typosearch/alphabet.hpp"
#include "typosearch/corpus.hpp"
#include "typosearch/rng.hpp"
#include "typosearch/stats.hpp"

namespace typosearch {

struct SynthSample {
  std::string text;
  std::size_t label = 0;
  EditType edit_type = EditType::kDeletion;
  std::string source_dataset;

  friend bool operator==(const SynthSample&, const SynthSample&) = default;
};

struct GenerationConfig {
  std::size_t samples_per_class = 20;
  bool keep_duplicate = true;
  std::uint64_t seed = 0;
  // Rejected draws (duplicates and no-op edits) tolerated per class before
  // giving up. Zero means 100 * samples_per_class.
  std::size_t max_retries = 0;
  // Free-form strategy label recorded in dataset headers.
  std::string strategy = "uniform";

  std::size_t effective_max_retries() const noexcept {
    return max_retries == 0 ? 100 * samples_per_class : max_retries;
  }
  void validate() const;
};

// Applies one typo at `index` of canonical `s`. `key_row` is the distribution
// used to draw the new key: the insertion marginal for insertions and the
// substitution row of s[index] for substitutions; other types ignore it.
// Insertions place the drawn key after `index`; transpositions swap with the
// next character, or the previous one at the last index.
//
// Returns nullopt when the draw cannot produce a canonical string different
// from `s` (length-1 transposition, swapping equal characters, a substitution
// row with no mass off the key, edits creating doubled or edge spaces).
std::optional<std::string> apply_typo(std::string_view s, EditType type,
                                      std::size_t index,
                                      std::span<const double> key_row,
                                      const Alphabet& alphabet, Rng& rng);

// Re-applies a classified event to its ground truth through apply_typo with a
// point-mass key row.
std::optional<std::string> replay_edit(std::string_view correct,
                                       const EditEvent& event,
                                       const Alphabet& alphabet);

// Synthetic one-edit misspellings of `s_gt`, all labelled `label`. The RNG is
// seeded from (config.seed, s_gt) so output does not depend on catalog order.
// Throws Error(kGenerationExhausted) when more than max_retries draws are
// rejected.
std::vector<SynthSample> generate_samples(std::string_view s_gt,
                                          std::size_t label,
                                          const GenerationConfig& config,
                                          const StatsSelector& stats);

struct SyntheticDataset {
  std::vector<std::string> catalog;
  std::vector<SynthSample> samples;
  GenerationConfig config;
  std::string stats_digest;
};

// Throws Error(kCatalog) listing every canonical collision.
void validate_catalog(std::span<const std::string> catalog);

// Reads one name per line, canonicalizes, drops blanks and `#` comments and
// validates uniqueness.
std::vector<std::string> load_catalog(const std::filesystem::path& path,
                                      const Alphabet& alphabet = Alphabet::standard());

SyntheticDataset build_training_set(std::span<const std::string> catalog,
                                    const GenerationConfig& config,
                                    const StatsSelector& stats);

// TSV: text, label index, edit type, source dataset; preceded by `#` header
// lines recording the generation config and stats digest.
void save_dataset(const SyntheticDataset& dataset, std::ostream& out);
void save_dataset_file(const SyntheticDataset& dataset,
                       const std::filesystem::path& path);
std::vector<SynthSample> load_dataset(std::istream& in);
std::vector<SynthSample> load_dataset_file(const std::filesystem::path& path);

}  // namespace typosearch
