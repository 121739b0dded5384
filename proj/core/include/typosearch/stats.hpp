#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "typosearch/alphabet.hpp"
#include "typosearch/corpus.hpp"
#include "typosearch/keyboard.hpp"
#include "typosearch/rng.hpp"

namespace typosearch {

inline constexpr std::size_t kDefaultPositionBins = 10;
inline constexpr double kNormalizationTolerance = 1e-9;

struct ErrorTypeDistribution {
  std::array<double, kNumEditTypes> probabilities{};

  double operator[](EditType t) const { return probabilities[to_index(t)]; }
};

// Scalar P_w for deletions and insertions, realized as a distribution over
// the alphabet of the deleted / inserted key.
struct KeyMarginal {
  std::vector<double> probabilities;
  bool fallback = false;
};

// Row-major |K| x |K| table of P(k' | k).
struct KeyConditional {
  std::size_t width = 0;
  std::vector<double> rows;
  std::vector<std::uint8_t> fallback;

  std::span<const double> row(std::size_t key) const {
    return {rows.data() + key * width, width};
  }
  std::span<double> row(std::size_t key) {
    return {rows.data() + key * width, width};
  }
};

struct KeyStats {
  KeyMarginal deletion;
  KeyMarginal insertion;
  KeyConditional replication;
  KeyConditional substitution;
  KeyConditional transposition;

  const KeyMarginal& marginal(EditType t) const;
  KeyMarginal& marginal(EditType t);
  const KeyConditional& conditional(EditType t) const;
  KeyConditional& conditional(EditType t);
};

struct PositionHistogram {
  std::vector<double> probabilities;
  bool fallback = false;
};

// Per edit type, a histogram over r in [0, 1] with uniform bins.
struct PositionStats {
  std::size_t bins = kDefaultPositionBins;
  std::array<PositionHistogram, kNumEditTypes> per_type;

  std::size_t bin_of(double r) const;
};

struct StatsModel {
  std::string dataset_id;
  Alphabet alphabet = Alphabet::standard();
  ErrorTypeDistribution error_types;
  KeyStats keys;
  PositionStats positions;
  std::uint64_t event_count = 0;
};

// Events must share one source and only use alphabet keys. Types that never
// occur keep probability zero and get uniform, flagged key rows and
// position histograms. Replication rows are point masses on the key itself.
StatsModel build_stats(std::span<const EditEvent> events,
                       const Alphabet& alphabet = Alphabet::standard(),
                       std::size_t bins = kDefaultPositionBins);

StatsModel uniform_stats(const Alphabet& alphabet = Alphabet::standard(),
                         std::size_t bins = kDefaultPositionBins);

// Uniform stats whose substitution rows are uniform over the physical
// neighbours of each key. Keys without neighbours keep a flagged uniform row.
StatsModel qwerty_stats(const Alphabet& alphabet = Alphabet::standard(),
                        const KeyboardLayout& layout = KeyboardLayout::qwerty_us(),
                        std::size_t bins = kDefaultPositionBins);

struct KeyLookup {
  // Set for deletion / insertion: P_w of the key.
  std::optional<double> marginal;
  // Set for replication / substitution / transposition.
  std::span<const double> distribution;
  bool fallback = false;
};

// Throws Error(kDomain) if `key` is not in the stats' alphabet.
KeyLookup lookup_key_dist(const StatsModel& stats, EditType type, char key);

// Draws a bin, a uniform r inside it, and maps r to round(r * (len - 1)).
std::size_t sample_position(const StatsModel& stats, EditType type,
                            std::size_t string_length, Rng& rng);

// Throws Error(kValidation) if any distribution is off by more than 1e-9,
// negative, or shaped inconsistently with the alphabet.
void validate_stats(const StatsModel& stats);

void save_stats(const StatsModel& stats, std::ostream& out);
std::string save_stats_string(const StatsModel& stats);
// Throws Error(kLoad) on malformed, truncated or wrong-version input. Absent
// sections load as flagged uniform fallbacks.
StatsModel load_stats(std::istream& in);
StatsModel load_stats_file(const std::filesystem::path& path);
void save_stats_file(const StatsModel& stats, const std::filesystem::path& path);

std::string stats_digest(const StatsModel& stats);

struct FusionComponent {
  std::shared_ptr<const StatsModel> stats;
  double weight = 0.0;
};

struct FusionSpec {
  std::vector<FusionComponent> components;
};

// Per-draw dataset selector: each call to pick() chooses dataset d with
// probability lambda_d using exactly one uniform draw, including the
// single-dataset case, so a degenerate mixture consumes randomness exactly
// like plain single-dataset generation.
class StatsSelector {
 public:
  explicit StatsSelector(FusionSpec spec);

  static StatsSelector single(std::shared_ptr<const StatsModel> stats);

  const StatsModel& pick(Rng& rng) const;
  std::size_t pick_index(Rng& rng) const;

  const FusionSpec& spec() const noexcept { return spec_; }
  const Alphabet& alphabet() const;
  std::string digest() const;

 private:
  FusionSpec spec_;
  std::vector<double> weights_;
};

// Validates the mixture (weights >= 0, sum 1 within 1e-9) and returns the
// selector; throws Error(kValidation) otherwise.
StatsSelector fuse(FusionSpec spec);

}  // namespace typosearch
