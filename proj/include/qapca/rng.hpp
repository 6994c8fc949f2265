#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace qapca {

/// Deterministic random helpers used throughout the toolkit.
///
/// All sampling goes through these functions instead of the standard
/// library distributions so that a fixed seed produces the same stream on
/// every platform and standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform double in [0, 1).
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n) { return engine_() % n; }

  /// Fair ±1 spin.
  int spin() { return (engine_() & 1u) ? 1 : -1; }

  /// Standard normal draw (Box-Muller; one value per call, spare cached).
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double mag = std::sqrt(-2.0 * std::log(u1));
    const double two_pi = 6.283185307179586476925286766559;
    spare_ = mag * std::sin(two_pi * u2);
    has_spare_ = true;
    return mag * std::cos(two_pi * u2);
  }

  /// Fisher-Yates shuffle of indices [0, n); returns the first k entries.
  template <typename IntT>
  std::vector<IntT> sample_without_replacement(IntT n, IntT k) {
    std::vector<IntT> idx(static_cast<std::size_t>(n));
    for (IntT i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
    for (IntT i = 0; i < k; ++i) {
      const auto j = i + static_cast<IntT>(below(static_cast<std::uint64_t>(n - i)));
      std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
    }
    idx.resize(static_cast<std::size_t>(k));
    return idx;
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace qapca
