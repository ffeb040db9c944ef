#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ofrr/dense_matrix.hpp"
#include "ofrr/precision.hpp"

namespace ofrr {

/// Square compressed-sparse-row matrix. Column indices within a row are
/// strictly increasing; values are values of `fmt`.
struct CsrMatrix {
  std::size_t n = 0;
  std::vector<std::size_t> row_ptr{0};
  std::vector<std::size_t> col_idx;
  std::vector<double> values;
  Format fmt = Format::F64;

  std::size_t nnz() const noexcept { return values.size(); }

  /// Structural checks: row_ptr monotone with row_ptr[n] == nnz, indices in range
  /// and sorted within each row.
  bool is_well_formed() const noexcept;
  /// Entry (i, j) present iff (j, i) present with an equal value.
  bool is_symmetric() const;

  CsrMatrix rounded(Format target) const;
  DenseMatrix to_dense() const;
  static CsrMatrix from_dense(const DenseMatrix& a);
  /// Coordinate triplets (0-based); duplicates are summed.
  static CsrMatrix from_triplets(std::size_t n, std::span<const std::size_t> rows,
                                 std::span<const std::size_t> cols,
                                 std::span<const double> vals, Format fmt = Format::F64);

  friend bool operator==(const CsrMatrix&, const CsrMatrix&) = default;
};

struct SpmvResult {
  std::vector<double> values;
  std::size_t non_finite = 0;  ///< entries that came out inf or NaN
};

/// y = A x with each row evaluated as a mixed_dot under `policy` and written to
/// policy.storage. x is brought to policy.storage and A to policy.compute first
/// when they are held in a wider format.
SpmvResult spmv(const CsrMatrix& a, std::span<const double> x, const PrecisionPolicy& policy);

/// FP64 power-iteration estimate of the dominant |eigenvalue|.
struct PowerIterationResult {
  double eigenvalue = 0.0;
  std::vector<double> vector;
  int iterations = 0;
};
PowerIterationResult power_iteration(const CsrMatrix& a, int max_iterations = 200,
                                     double rel_tol = 1e-10, std::uint64_t seed = 0x5eed);

/// Rescale constant: the estimated dominant eigenvalue is mapped to this.
inline constexpr double kRescaleTarget = 64.0;

/// A * (64 / lambda_hat) in FP64, lambda_hat from power_iteration. A zero
/// matrix is returned unchanged.
CsrMatrix spectral_rescale(const CsrMatrix& a);

}  // namespace ofrr
