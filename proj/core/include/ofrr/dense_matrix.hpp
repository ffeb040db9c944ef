#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ofrr/precision.hpp"

namespace ofrr {

/// Column-major dense matrix whose entries are values of format().
///
/// Mutable element access does not re-round; code that writes entries is
/// responsible for writing values of the matrix's format. Use rounded() or
/// from_values() to bring arbitrary FP64 data onto the grid.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, Format fmt = Format::F64);

  /// Copies `column_major` and rounds every entry to `fmt`.
  static DenseMatrix from_values(std::size_t rows, std::size_t cols,
                                 std::span<const double> column_major, Format fmt = Format::F64);
  /// Row-major convenience for small literals in tests and examples.
  static DenseMatrix from_rows(std::size_t rows, std::size_t cols,
                               std::span<const double> row_major, Format fmt = Format::F64);
  static DenseMatrix identity(std::size_t n, Format fmt = Format::F64);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return rows_ == 0 || cols_ == 0; }
  Format format() const noexcept { return fmt_; }

  double& operator()(std::size_t i, std::size_t j) noexcept { return data_[j * rows_ + i]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[j * rows_ + i]; }

  std::span<double> col(std::size_t j) noexcept { return {data_.data() + j * rows_, rows_}; }
  std::span<const double> col(std::size_t j) const noexcept {
    return {data_.data() + j * rows_, rows_};
  }
  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  /// Same entries re-rounded into `fmt` (widening is exact).
  DenseMatrix rounded(Format fmt) const;
  DenseMatrix transposed() const;
  /// Columns [first, first + count).
  DenseMatrix columns(std::size_t first, std::size_t count) const;
  /// Columns whose mask entry is true, in order.
  DenseMatrix select_columns(const std::vector<bool>& keep) const;

  /// Tags the matrix with a new format without touching entries. Only valid
  /// when every entry already lies on the new format's grid.
  void retag(Format fmt) noexcept { fmt_ = fmt; }

  bool all_finite() const noexcept;
  double frobenius_norm() const noexcept;

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
  Format fmt_ = Format::F64;
};

/// C = A * B with every entry computed as mixed_dot of a row of A and a column
/// of B under `policy`, then rounded to `out_fmt`. Throws
/// ContractError on an inner-dimension mismatch.
DenseMatrix mixed_gemm(const DenseMatrix& a, const DenseMatrix& b, const PrecisionPolicy& policy,
                       Format out_fmt);

/// C = A' * B, same rounding contract as mixed_gemm. Both operands are read
/// down their columns.
DenseMatrix mixed_gemm_tn(const DenseMatrix& a, const DenseMatrix& b,
                          const PrecisionPolicy& policy, Format out_fmt);

/// Plain FP64 products for the small projected problems and diagnostics.
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b);

/// (S + S') / 2 in FP64.
DenseMatrix symmetrized(const DenseMatrix& s);

}  // namespace ofrr
