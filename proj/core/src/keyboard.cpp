#include "typosearch/keyboard.hpp"

#include <algorithm>
#include <cmath>

namespace typosearch {

KeyboardLayout::KeyboardLayout(std::vector<Row> rows) : rows_(std::move(rows)) {}

const KeyboardLayout& KeyboardLayout::qwerty_us() {
  static const KeyboardLayout kLayout({
      {"1234567890", 0.0},
      {"qwertyuiop", 0.5},
      {"asdfghjkl", 0.75},
      {"zxcvbnm", 1.25},
  });
  return kLayout;
}

std::optional<KeyboardLayout::Position> KeyboardLayout::position(char key) const {
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    auto col = rows_[r].keys.find(key);
    if (col != std::string::npos) {
      return Position{static_cast<int>(r),
                      rows_[r].offset + static_cast<double>(col)};
    }
  }
  return std::nullopt;
}

bool KeyboardLayout::adjacent(char a, char b) const {
  if (a == b) return false;
  auto pa = position(a);
  auto pb = position(b);
  if (!pa || !pb) return false;
  const double dx = std::abs(pa->x - pb->x);
  const int dy = std::abs(pa->row - pb->row);
  if (dy == 0) return std::abs(dx - 1.0) < 1e-9;
  return dy == 1 && dx < 1.0 - 1e-9;
}

std::vector<char> KeyboardLayout::neighbors(char key) const {
  std::vector<char> out;
  for (const auto& row : rows_) {
    for (char c : row.keys) {
      if (adjacent(key, c)) out.push_back(c);
    }
  }
  return out;
}

}  // namespace typosearch
