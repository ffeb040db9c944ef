#include "ofrr/dense_matrix.hpp"

#include <algorithm>
#include <cmath>

#include "ofrr/errors.hpp"

namespace ofrr {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, Format fmt)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0), fmt_(fmt) {}

DenseMatrix DenseMatrix::from_values(std::size_t rows, std::size_t cols,
                                     std::span<const double> column_major, Format fmt) {
  if (column_major.size() != rows * cols) {
    throw ContractError("DenseMatrix::from_values: data length != rows * cols");
  }
  DenseMatrix m(rows, cols, fmt);
  std::transform(column_major.begin(), column_major.end(), m.data_.begin(),
                 [fmt](double v) { return round_to(v, fmt); });
  return m;
}

DenseMatrix DenseMatrix::from_rows(std::size_t rows, std::size_t cols,
                                   std::span<const double> row_major, Format fmt) {
  if (row_major.size() != rows * cols) {
    throw ContractError("DenseMatrix::from_rows: data length != rows * cols");
  }
  DenseMatrix m(rows, cols, fmt);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = round_to(row_major[i * cols + j], fmt);
  }
  return m;
}

DenseMatrix DenseMatrix::identity(std::size_t n, Format fmt) {
  DenseMatrix m(n, n, fmt);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::rounded(Format fmt) const {
  DenseMatrix m(rows_, cols_, fmt);
  std::transform(data_.begin(), data_.end(), m.data_.begin(),
                 [fmt](double v) { return round_to(v, fmt); });
  return m;
}

DenseMatrix DenseMatrix::transposed() const {
  DenseMatrix t(cols_, rows_, fmt_);
  for (std::size_t j = 0; j < cols_; ++j) {
    for (std::size_t i = 0; i < rows_; ++i) t(j, i) = (*this)(i, j);
  }
  return t;
}

DenseMatrix DenseMatrix::columns(std::size_t first, std::size_t count) const {
  if (first + count > cols_) throw ContractError("DenseMatrix::columns: range past end");
  DenseMatrix out(rows_, count, fmt_);
  std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>(first * rows_), count * rows_,
              out.data_.begin());
  return out;
}

DenseMatrix DenseMatrix::select_columns(const std::vector<bool>& keep) const {
  if (keep.size() != cols_) throw ContractError("select_columns: mask size mismatch");
  const auto kept = static_cast<std::size_t>(std::count(keep.begin(), keep.end(), true));
  DenseMatrix out(rows_, kept, fmt_);
  std::size_t dst = 0;
  for (std::size_t j = 0; j < cols_; ++j) {
    if (!keep[j]) continue;
    auto src = col(j);
    std::copy(src.begin(), src.end(), out.col(dst++).begin());
  }
  return out;
}

bool DenseMatrix::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

double DenseMatrix::frobenius_norm() const noexcept {
  double s = 0.0;
  for (double v : data_) s += v * v;
  return std::sqrt(s);
}

DenseMatrix mixed_gemm_tn(const DenseMatrix& a, const DenseMatrix& b,
                          const PrecisionPolicy& policy, Format out_fmt) {
  if (a.rows() != b.rows()) throw ContractError("mixed_gemm_tn: inner dimension mismatch");
  DenseMatrix c(a.cols(), b.cols(), out_fmt);
  dispatch_arith(policy, [&](auto tag) {
    using T = decltype(tag);
    for (std::size_t j = 0; j < b.cols(); ++j) {
      const double* bj = b.col(j).data();
      for (std::size_t i = 0; i < a.cols(); ++i) {
        const double v = mixed_dot_kernel<T::compute, T::accumulate>(a.col(i).data(), bj, a.rows());
        c(i, j) = round_to(v, out_fmt);
      }
    }
  });
  return c;
}

DenseMatrix mixed_gemm(const DenseMatrix& a, const DenseMatrix& b, const PrecisionPolicy& policy,
                       Format out_fmt) {
  if (a.cols() != b.rows()) throw ContractError("mixed_gemm: inner dimension mismatch");
  return mixed_gemm_tn(a.transposed(), b, policy, out_fmt);
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) throw ContractError("matmul: inner dimension mismatch");
  DenseMatrix c(a.rows(), b.cols());
  for (std::size_t j = 0; j < b.cols(); ++j) {
    auto cj = c.col(j);
    for (std::size_t l = 0; l < a.cols(); ++l) {
      const double blj = b(l, j);
      if (blj == 0.0) continue;
      auto al = a.col(l);
      for (std::size_t i = 0; i < a.rows(); ++i) cj[i] += al[i] * blj;
    }
  }
  return c;
}

DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows()) throw ContractError("matmul_tn: inner dimension mismatch");
  DenseMatrix c(a.cols(), b.cols());
  for (std::size_t j = 0; j < b.cols(); ++j) {
    auto bj = b.col(j);
    for (std::size_t i = 0; i < a.cols(); ++i) {
      auto ai = a.col(i);
      double s = 0.0;
      for (std::size_t l = 0; l < a.rows(); ++l) s += ai[l] * bj[l];
      c(i, j) = s;
    }
  }
  return c;
}

DenseMatrix symmetrized(const DenseMatrix& s) {
  if (s.rows() != s.cols()) throw ContractError("symmetrized: matrix is not square");
  DenseMatrix out(s.rows(), s.cols());
  for (std::size_t j = 0; j < s.cols(); ++j) {
    for (std::size_t i = 0; i < s.rows(); ++i) out(i, j) = 0.5 * (s(i, j) + s(j, i));
  }
  return out;
}

}  // namespace ofrr
