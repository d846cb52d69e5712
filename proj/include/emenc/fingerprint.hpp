#pragma once

#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

namespace emenc {

/// 64-bit FNV-1a, rendered as 16 hex digits.
inline std::string fnv1a_hex(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

/// Canonical key=value accumulator for fingerprints.
class Canon {
 public:
  Canon& add(std::string_view key, double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return add(key, std::string_view(buf));
  }
  Canon& add(std::string_view key, long long v) { return add(key, std::string_view(std::to_string(v))); }
  Canon& add(std::string_view key, int v) { return add(key, static_cast<long long>(v)); }
  Canon& add(std::string_view key, std::string_view v) {
    text_.append(key).append("=").append(v).append(";");
    return *this;
  }
  const std::string& text() const { return text_; }
  std::string hash() const { return fnv1a_hex(text_); }

 private:
  std::string text_;
};

}  // namespace emenc
