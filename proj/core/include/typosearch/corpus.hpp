#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "typosearch/alphabet.hpp"

namespace typosearch {

// The five one-character typo classes.
enum class EditType : std::uint8_t {
  kDeletion = 0,
  kInsertion = 1,
  kReplication = 2,
  kSubstitution = 3,
  kTransposition = 4,
};

inline constexpr std::size_t kNumEditTypes = 5;
inline constexpr std::array<EditType, kNumEditTypes> kAllEditTypes = {
    EditType::kDeletion, EditType::kInsertion, EditType::kReplication,
    EditType::kSubstitution, EditType::kTransposition};

constexpr std::size_t to_index(EditType t) noexcept {
  return static_cast<std::size_t>(t);
}

std::string_view edit_type_name(EditType type) noexcept;
std::optional<EditType> parse_edit_type(std::string_view name) noexcept;

struct TypoPair {
  std::string wrong;
  std::string correct;
  std::uint64_t weight = 1;

  friend bool operator==(const TypoPair&, const TypoPair&) = default;
};

// One classified single-character edit.
//
// `key` is the ground-truth character acted on (for insertions, the character
// the new key was typed after). `other_key` is the inserted, substituting or
// swapped character and is empty for deletions. Deletion positions index the
// ground-truth string; every other type indexes the mistyped string.
struct EditEvent {
  EditType type = EditType::kDeletion;
  char key = ' ';
  std::optional<char> other_key;
  std::size_t position_index = 0;
  double position_rel = 0.0;
  std::string source;
  std::uint64_t weight = 1;

  friend bool operator==(const EditEvent&, const EditEvent&) = default;
};

enum class CorpusFormat { kTsv, kGithubJsonl, kTwitterTsv };

std::optional<CorpusFormat> parse_corpus_format(std::string_view name) noexcept;

struct ParseResult {
  std::vector<TypoPair> pairs;
  std::size_t skipped = 0;
};

// Throws Error(kIo) on an unreadable stream and Error(kEmptyCorpus) when no
// record parses. Malformed records are counted in `skipped`.
ParseResult parse_corpus(std::istream& in, CorpusFormat format,
                         const Alphabet& alphabet = Alphabet::standard());
ParseResult parse_corpus_file(const std::filesystem::path& path,
                              CorpusFormat format,
                              const Alphabet& alphabet = Alphabet::standard());

void write_corpus_tsv(std::ostream& out, const std::vector<TypoPair>& pairs);

enum class OpTag : std::uint8_t { kEqual, kReplace, kDelete, kInsert };

// Half-open spans: correct[a_begin, a_end) becomes wrong[b_begin, b_end).
struct Opcode {
  OpTag tag = OpTag::kEqual;
  std::size_t a_begin = 0;
  std::size_t a_end = 0;
  std::size_t b_begin = 0;
  std::size_t b_end = 0;

  friend bool operator==(const Opcode&, const Opcode&) = default;
};

// LCS-based diff turning `correct` into `wrong`. Adjacent delete/insert spans
// are merged into a replace.
std::vector<Opcode> align(std::string_view correct, std::string_view wrong);

// Applies opcodes produced by align(correct, wrong); yields `wrong`.
std::string replay_opcodes(std::string_view correct, std::string_view wrong,
                           const std::vector<Opcode>& ops);

// Returns the single edit that turns pair.correct into pair.wrong, or empty
// for identical strings and multi-edit pairs. Precedence: transposition,
// replication, insertion, deletion, substitution. Deletions and replications
// inside a run of equal characters are attributed to the leftmost index.
std::optional<EditEvent> classify_single_edit(const TypoPair& pair,
                                              std::string_view source = {});

// index / (reference_length - 1); 0 for single-character references.
double normalize_position(std::size_t index, std::size_t reference_length);

struct ClassificationSummary {
  std::vector<EditEvent> events;
  std::uint64_t identical = 0;
  std::uint64_t multi_edit = 0;
  std::array<std::uint64_t, kNumEditTypes> per_type{};
};

ClassificationSummary classify_corpus(const std::vector<TypoPair>& pairs,
                                      std::string_view source);

}  // namespace typosearch
