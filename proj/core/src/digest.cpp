#include "typosearch/digest.hpp"

#include <cstdio>

namespace typosearch {

std::string Fnv1a64::hex() const {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(state_));
  return buf;
}

std::string digest_hex(std::string_view bytes) {
  return Fnv1a64{}.update(bytes).hex();
}

}  // namespace typosearch
