#include "typosearch/alphabet.hpp"

#include <stdexcept>

namespace typosearch {

const Alphabet& Alphabet::standard() {
  static const Alphabet kStandard("abcdefghijklmnopqrstuvwxyz0123456789 ");
  return kStandard;
}

Alphabet::Alphabet(std::string_view symbols) : symbols_(symbols) {
  lookup_.fill(-1);
  if (symbols_.empty() || symbols_.size() > 256) {
    throw std::invalid_argument("alphabet must have 1..256 symbols");
  }
  for (std::size_t i = 0; i < symbols_.size(); ++i) {
    auto byte = static_cast<unsigned char>(symbols_[i]);
    if (lookup_[byte] >= 0) {
      throw std::invalid_argument("alphabet has a repeated symbol");
    }
    lookup_[byte] = static_cast<std::int16_t>(i);
  }
  if (lookup_[static_cast<unsigned char>(' ')] < 0) {
    throw std::invalid_argument("alphabet must contain a space");
  }
  space_index_ = static_cast<std::size_t>(lookup_[static_cast<unsigned char>(' ')]);
}

std::optional<std::size_t> Alphabet::index_of(char c) const noexcept {
  auto v = lookup_[static_cast<unsigned char>(c)];
  if (v < 0) return std::nullopt;
  return static_cast<std::size_t>(v);
}

std::string Alphabet::canonicalize(std::string_view text) const {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char raw : text) {
    char c = raw;
    if (c >= 'A' && c <= 'Z') {
      char lower = static_cast<char>(c - 'A' + 'a');
      if (contains(lower) || !contains(c)) c = lower;
    }
    if (c == ' ' || !contains(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(c);
  }
  return out;
}

bool Alphabet::is_canonical(std::string_view text) const {
  if (text.empty()) return true;
  if (text.front() == ' ' || text.back() == ' ') return false;
  char prev = 0;
  for (char c : text) {
    if (!contains(c)) return false;
    if (c >= 'A' && c <= 'Z' && contains(static_cast<char>(c - 'A' + 'a'))) {
      return false;
    }
    if (c == ' ' && prev == ' ') return false;
    prev = c;
  }
  return true;
}

}  // namespace typosearch
