#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

#include "serkit/errors.hpp"

namespace serkit {

// 64-bit FNV-1a. Stable across platforms; used to fold string ids into seeds
// so per-utterance draws do not depend on corpus order.
constexpr std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

// splitmix64 stream. Fully specified arithmetic, so a seed reproduces the
// same sequence on any platform; std:: distributions are avoided for the
// same reason.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n). Plain modulo; bias is < 2^-32 for the small n
  // used here.
  std::uint64_t below(std::uint64_t n) { return n ? next_u64() % n : 0; }

  // Standard normal, Box-Muller. Consumes two uniforms per pair of values.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 1.0 - uniform();  // (0, 1], keeps log() finite
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  // Index drawn proportionally to a nonnegative weight vector.
  std::size_t weighted(const std::vector<double>& w) {
    double total = 0.0;
    for (double x : w) {
      if (x < 0.0) throw InputError("weighted draw: negative weight");
      total += x;
    }
    if (total <= 0.0) throw InputError("weighted draw: all weights zero");
    double x = uniform() * total;
    for (std::size_t i = 0; i < w.size(); ++i) {
      x -= w[i];
      if (x < 0.0) return i;
    }
    // Fall through on rounding: last index with positive weight.
    for (std::size_t i = w.size(); i-- > 0;)
      if (w[i] > 0.0) return i;
    return w.size() - 1;
  }

  // In-place Fisher-Yates.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace serkit
