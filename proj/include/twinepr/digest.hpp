#pragma once

#include <cstdint>
#include <cstdio>
#include <span>
#include <string>
#include <string_view>

namespace twinepr {

/// 64-bit FNV-1a. Used for content digests in manifests and reports;
/// not a cryptographic hash.
class Fnv1a {
 public:
  Fnv1a& update(std::span<const unsigned char> bytes) {
    for (unsigned char b : bytes) {
      state_ ^= b;
      state_ *= 0x100000001b3ULL;
    }
    return *this;
  }
  Fnv1a& update(std::string_view s) {
    return update({reinterpret_cast<const unsigned char*>(s.data()), s.size()});
  }
  Fnv1a& update(std::uint64_t v) {
    unsigned char bytes[8];
    for (int k = 0; k < 8; ++k) bytes[k] = static_cast<unsigned char>(v >> (8 * k));
    return update(std::span<const unsigned char>(bytes, 8));
  }
  std::uint64_t value() const noexcept { return state_; }

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

inline std::string to_hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace twinepr
