#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace typosearch {

// Ordered set of canonical characters K. Text is canonicalized by
// case-folding ASCII letters, mapping every other unknown byte (including
// all non-ASCII UTF-8 bytes) to a space, collapsing space runs and trimming.
class Alphabet {
 public:
  // a-z, 0-9 and space: 37 symbols.
  static const Alphabet& standard();

  // `symbols` must be non-empty, contain ' ' and have no repeated bytes.
  explicit Alphabet(std::string_view symbols);

  std::size_t size() const noexcept { return symbols_.size(); }
  std::string_view symbols() const noexcept { return symbols_; }

  char symbol(std::size_t index) const { return symbols_.at(index); }
  std::optional<std::size_t> index_of(char c) const noexcept;
  bool contains(char c) const noexcept { return index_of(c).has_value(); }
  std::size_t space_index() const noexcept { return space_index_; }

  std::string canonicalize(std::string_view text) const;
  bool is_canonical(std::string_view text) const;

  friend bool operator==(const Alphabet& a, const Alphabet& b) noexcept {
    return a.symbols_ == b.symbols_;
  }

 private:
  std::string symbols_;
  std::array<std::int16_t, 256> lookup_{};
  std::size_t space_index_ = 0;
};

}  // namespace typosearch
