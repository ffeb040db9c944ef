#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "ofrr/dense_matrix.hpp"

namespace ofrr {

/// Seeded 64-bit Mersenne Twister with a platform-independent mapping to
/// doubles (std::uniform_real_distribution is not portable across
/// standard libraries).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = bound ? (~std::uint64_t{0} / bound) * bound : 0;
    std::uint64_t v = engine_();
    while (v >= limit) v = engine_();
    return v % bound;
  }
  /// Standard normal via Box-Muller; used only by tests and generators.
  double normal();

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::mt19937_64 engine_;
};

inline double Rng::normal() {
  constexpr double kTwoPi = 6.283185307179586476925286766559;
  double u1 = uniform01();
  while (u1 == 0.0) u1 = uniform01();
  const double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

/// rows x cols matrix of U(0,1) draws generated in FP64 (column-major order)
/// and rounded once into `fmt`.
inline DenseMatrix uniform_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed,
                                  Format fmt = Format::F64) {
  Rng rng(seed);
  DenseMatrix m(rows, cols, fmt);
  for (double& v : m.data()) v = round_to(rng.uniform01(), fmt);
  return m;
}

/// Same draws with standard-normal entries, FP64.
inline DenseMatrix normal_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  Rng rng(seed);
  DenseMatrix m(rows, cols);
  for (double& v : m.data()) v = rng.normal();
  return m;
}

}  // namespace ofrr
