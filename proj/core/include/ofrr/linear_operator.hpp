#pragma once

#include <memory>
#include <variant>

#include "ofrr/csr_matrix.hpp"
#include "ofrr/dense_matrix.hpp"
#include "ofrr/precision.hpp"

namespace ofrr {

/// The MatVec seen by builders and drivers. Wraps an FP64 source matrix (dense
/// or CSR) together with a copy rounded to the policy's compute format.
/// apply() follows the policy; the *_exact variants use the FP64 source and
/// serve residual diagnostics and reference computations.
///
/// Copies share the underlying matrices, so passing operators by value is
/// cheap and concurrent use from several threads is safe.
class LinearOperator {
 public:
  LinearOperator() = default;
  LinearOperator(const DenseMatrix& a, const PrecisionPolicy& policy);
  LinearOperator(const CsrMatrix& a, const PrecisionPolicy& policy);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  const PrecisionPolicy& policy() const noexcept { return policy_; }
  bool is_sparse() const noexcept;

  /// Same source matrix with a different MatVec policy.
  LinearOperator with_policy(const PrecisionPolicy& policy) const;

  /// A * X. X is rounded to storage first; each output entry is a mixed_dot
  /// against the held copy of A, written to storage. Throws NumericalError if
  /// any entry is inf or NaN.
  DenseMatrix apply(const DenseMatrix& x) const;
  /// A' * X under the same contract.
  DenseMatrix apply_transpose(const DenseMatrix& x) const;

  DenseMatrix apply_exact(const DenseMatrix& x) const;
  DenseMatrix apply_transpose_exact(const DenseMatrix& x) const;

  /// Frobenius norm of the FP64 source.
  double frobenius_norm() const noexcept { return frobenius_; }
  /// FP64 source densified (tests and reference solvers only).
  DenseMatrix to_dense() const;

 private:
  struct Dense {
    DenseMatrix source;       // FP64, column-major
    DenseMatrix stored;       // rounded to compute, column-major (columns of A)
    DenseMatrix stored_rows;  // transpose of `stored` (rows of A contiguous)
    DenseMatrix source_rows;  // transpose of `source`
  };
  struct Sparse {
    CsrMatrix source;
    CsrMatrix stored;
  };
  using Storage = std::variant<Dense, Sparse>;

  LinearOperator(std::shared_ptr<const Storage> storage, std::size_t rows, std::size_t cols,
                 double frobenius, const PrecisionPolicy& policy);
  static std::shared_ptr<const Storage> restore(const Storage& src, const PrecisionPolicy& policy);

  std::shared_ptr<const Storage> storage_;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  double frobenius_ = 0.0;
  PrecisionPolicy policy_;
};

}  // namespace ofrr
