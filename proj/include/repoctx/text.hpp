#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace repoctx {

// Replaces every invalid UTF-8 sequence with U+FFFD.
std::string sanitize_utf8(std::string_view bytes);

// Forward slashes, no empty/"." segments, ".." folded into its parent.
// Leading "/" is stripped. A ".." that would climb above the root is dropped,
// so the result never contains ".." segments. Idempotent.
std::string normalize_path(std::string_view path);

std::vector<std::string_view> split_path(std::string_view path);
std::string_view basename_of(std::string_view path);
std::string_view dirname_of(std::string_view path);  // "" for top-level files
std::string join_path(std::string_view dir, std::string_view rel);

std::string to_lower(std::string_view s);
bool starts_with_icase(std::string_view s, std::string_view prefix);
std::string_view trim(std::string_view s);

inline bool is_word_byte(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
}

inline bool is_space_byte(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

std::uint64_t fnv1a64(std::string_view data);
std::uint64_t mix64(std::uint64_t x);
std::string hex64(std::uint64_t v);

// SplitMix64 stream with portable bounded draws. std::uniform_*_distribution
// are implementation-defined, which would break cross-platform determinism.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next();
  // Uniform in [0, bound); bound must be > 0.
  std::uint64_t below(std::uint64_t bound);
  // Uniform in [0, 1) with 53 bits of precision.
  double unit();

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      auto j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t state_;
};

// Deterministic seed derivation from a base seed and a label.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view label);

}  // namespace repoctx
