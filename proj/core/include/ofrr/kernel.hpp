#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "ofrr/dense_matrix.hpp"

namespace ofrr {

/// n points in `dim` dimensions, stored point-major: coords[i * dim + d].
struct PointSet {
  std::size_t dim = 2;
  std::vector<double> coords;

  std::size_t size() const noexcept { return dim ? coords.size() / dim : 0; }
  std::span<const double> point(std::size_t i) const noexcept {
    return {coords.data() + i * dim, dim};
  }
  friend bool operator==(const PointSet&, const PointSet&) = default;
};

/// n i.i.d. points uniform on [0, side]^2 from a seeded generator.
PointSet sample_uniform_square(std::size_t n, double side, std::uint64_t seed);

/// `count` distinct points drawn from `points` without replacement (partial
/// Fisher-Yates, seeded).
PointSet sample_without_replacement(const PointSet& points, std::size_t count,
                                    std::uint64_t seed);

/// A_ij = f * (exp(-|x_i - x_j|^2 / (2 l^2)) + s * delta_ij). With cross_points
/// the matrix is rectangular, A_ij = f * exp(-|x_i - y_j|^2 / (2 l^2)), and s is
/// not used.
struct KernelConfig {
  double f = 1.0;
  double l = 1.0;
  double s = 0.0;
  PointSet points;
  std::optional<PointSet> cross_points;

  bool is_valid() const noexcept;
};

/// Entries are evaluated in FP64 and rounded once into `fmt`. Throws
/// ContractError for an invalid configuration.
DenseMatrix gaussian_kernel(const KernelConfig& cfg, Format fmt = Format::F64);

/// "x,y" per line (one column per dimension) with 17 significant digits.
void write_points_csv(std::ostream& out, const PointSet& points);

}  // namespace ofrr
