#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace typosearch {

// Physical key coordinates for a staggered keyboard. Row 0 is the digit row;
// each row carries a horizontal offset in key widths.
class KeyboardLayout {
 public:
  struct Row {
    std::string keys;
    double offset = 0.0;
  };

  explicit KeyboardLayout(std::vector<Row> rows);

  // US QWERTY: digit row at 0, qwerty row +0.5, home row +0.75, bottom +1.25.
  static const KeyboardLayout& qwerty_us();

  struct Position {
    int row = 0;
    double x = 0.0;
  };
  std::optional<Position> position(char key) const;

  // Keys at distance one: horizontal neighbours on the same row, and keys on
  // an adjacent row whose centre lies less than one key width away.
  std::vector<char> neighbors(char key) const;
  bool adjacent(char a, char b) const;

 private:
  std::vector<Row> rows_;
};

}  // namespace typosearch
