#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <vector>

#include "tailcs/types.hpp"

namespace tailcs {

namespace detail {
inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
inline constexpr std::uint64_t kInit = 0xD1B54A32D192ED03ULL;

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}
}  // namespace detail

/// Deterministic sub-seed keyed by (seed, keys...).
inline std::uint64_t derive_seed(std::uint64_t seed,
                                 std::initializer_list<std::uint64_t> keys) {
  std::uint64_t h = detail::mix64(seed ^ detail::kInit);
  for (std::uint64_t k : keys) h = detail::mix64(h ^ detail::mix64(k + detail::kGolden));
  return h;
}

// Splittable counter-style generator (SplitMix64). Every consumer derives its
// own stream from (seed, keys...), so trials and roles never share state and
// results are independent of execution order.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(detail::mix64(seed ^ detail::kInit)) {}

  /// Child stream keyed by (this seed, keys...). Does not advance the parent.
  static Rng derive(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) {
    return Rng(FromState{}, derive_seed(seed, keys));
  }

  std::uint64_t next_u64() {
    state_ += detail::kGolden;
    return detail::mix64(state_);
  }

  /// Uniform double in [0, 1).
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n).
  Index uniform_index(Index n) {
    if (n <= 0) throw std::invalid_argument("uniform_index: n must be positive");
    // Rejection to kill modulo bias.
    const std::uint64_t un = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % un;
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return static_cast<Index>(x % un);
  }

  /// Standard normal via Box-Muller (second deviate cached).
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform01();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  /// Gamma(shape, 1) by Marsaglia-Tsang; shape > 0.
  double gamma(double shape) {
    if (!(shape > 0.0)) throw std::invalid_argument("gamma: shape must be positive");
    if (shape < 1.0) {
      const double u = uniform01();
      return gamma(shape + 1.0) * std::pow(u > 0.0 ? u : 0x1.0p-53, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform01();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  double chi_square(double dof) { return 2.0 * gamma(0.5 * dof); }

  /// Student-t: normal over the square root of a scaled chi-square.
  double student_t(double dof) {
    if (!(dof > 0.0)) throw std::invalid_argument("student_t: dof must be positive");
    const double z = normal();
    const double v = chi_square(dof);
    return z / std::sqrt(v / dof);
  }

  /// Uniformly random k-subset of [0, n) (Floyd's algorithm), sorted ascending.
  SupportSet uniform_subset(Index n, Index k) {
    if (k < 0 || k > n) throw std::invalid_argument("uniform_subset: need 0 <= k <= n");
    std::vector<bool> chosen(static_cast<std::size_t>(n), false);
    SupportSet s;
    s.reserve(static_cast<std::size_t>(k));
    for (Index j = n - k; j < n; ++j) {
      const Index t = uniform_index(j + 1);
      if (chosen[static_cast<std::size_t>(t)]) {
        chosen[static_cast<std::size_t>(j)] = true;
        s.push_back(j);
      } else {
        chosen[static_cast<std::size_t>(t)] = true;
        s.push_back(t);
      }
    }
    std::sort(s.begin(), s.end());
    return s;
  }

 private:
  struct FromState {};
  Rng(FromState, std::uint64_t raw) : state_(raw) {}

  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Stream roles for deriving disjoint sub-streams from one trial seed.
namespace stream {
inline constexpr std::uint64_t matrix = 0xA1;
inline constexpr std::uint64_t support = 0xA2;
inline constexpr std::uint64_t values = 0xA3;
inline constexpr std::uint64_t noise = 0xA4;
inline constexpr std::uint64_t init = 0xA5;
inline constexpr std::uint64_t rip_mc = 0xA6;
}  // namespace stream

}  // namespace tailcs
