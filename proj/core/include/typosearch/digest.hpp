#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace typosearch {

// 64-bit FNV-1a, used for provenance digests of files and catalogs.
class Fnv1a64 {
 public:
  Fnv1a64& update(std::string_view bytes) noexcept {
    for (unsigned char c : bytes) {
      state_ ^= c;
      state_ *= 0x100000001b3ULL;
    }
    return *this;
  }

  std::uint64_t value() const noexcept { return state_; }
  std::string hex() const;

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

std::string digest_hex(std::string_view bytes);

}  // namespace typosearch
