#include "ofrr/csr_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ofrr/errors.hpp"
#include "ofrr/random.hpp"

namespace ofrr {

bool CsrMatrix::is_well_formed() const noexcept {
  if (row_ptr.size() != n + 1 || row_ptr.front() != 0 || row_ptr.back() != values.size() ||
      col_idx.size() != values.size()) {
    return false;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (row_ptr[i] > row_ptr[i + 1]) return false;
    for (std::size_t p = row_ptr[i]; p < row_ptr[i + 1]; ++p) {
      if (col_idx[p] >= n) return false;
      if (p > row_ptr[i] && col_idx[p] <= col_idx[p - 1]) return false;
    }
  }
  return true;
}

namespace {

// Value at (i, j) or NaN when the entry is structurally absent.
double lookup(const CsrMatrix& a, std::size_t i, std::size_t j) {
  const auto first = a.col_idx.begin() + static_cast<std::ptrdiff_t>(a.row_ptr[i]);
  const auto last = a.col_idx.begin() + static_cast<std::ptrdiff_t>(a.row_ptr[i + 1]);
  const auto it = std::lower_bound(first, last, j);
  if (it == last || *it != j) return std::nan("");
  return a.values[static_cast<std::size_t>(it - a.col_idx.begin())];
}

}  // namespace

bool CsrMatrix::is_symmetric() const {
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t p = row_ptr[i]; p < row_ptr[i + 1]; ++p) {
      if (lookup(*this, col_idx[p], i) != values[p]) return false;
    }
  }
  return true;
}

CsrMatrix CsrMatrix::rounded(Format target) const {
  CsrMatrix out = *this;
  out.fmt = target;
  for (double& v : out.values) v = round_to(v, target);
  return out;
}

DenseMatrix CsrMatrix::to_dense() const {
  DenseMatrix d(n, n, fmt);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t p = row_ptr[i]; p < row_ptr[i + 1]; ++p) d(i, col_idx[p]) = values[p];
  }
  return d;
}

CsrMatrix CsrMatrix::from_dense(const DenseMatrix& a) {
  if (a.rows() != a.cols()) throw ContractError("CsrMatrix::from_dense: matrix is not square");
  CsrMatrix out;
  out.n = a.rows();
  out.fmt = a.format();
  out.row_ptr.assign(out.n + 1, 0);
  for (std::size_t i = 0; i < out.n; ++i) {
    for (std::size_t j = 0; j < out.n; ++j) {
      if (a(i, j) != 0.0) {
        out.col_idx.push_back(j);
        out.values.push_back(a(i, j));
      }
    }
    out.row_ptr[i + 1] = out.values.size();
  }
  return out;
}

CsrMatrix CsrMatrix::from_triplets(std::size_t n, std::span<const std::size_t> rows,
                                   std::span<const std::size_t> cols,
                                   std::span<const double> vals, Format fmt) {
  if (rows.size() != cols.size() || rows.size() != vals.size()) {
    throw ContractError("CsrMatrix::from_triplets: triplet arrays differ in length");
  }
  std::vector<std::size_t> order(rows.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return rows[a] != rows[b] ? rows[a] < rows[b] : cols[a] < cols[b];
  });

  CsrMatrix out;
  out.n = n;
  out.fmt = fmt;
  out.row_ptr.assign(n + 1, 0);
  for (std::size_t t = 0; t < order.size(); ++t) {
    const std::size_t k = order[t];
    if (rows[k] >= n || cols[k] >= n) throw ContractError("CsrMatrix::from_triplets: index out of range");
    const bool duplicate = t > 0 && rows[order[t - 1]] == rows[k] && cols[order[t - 1]] == cols[k];
    if (duplicate) {
      out.values.back() += vals[k];
    } else {
      out.col_idx.push_back(cols[k]);
      out.values.push_back(vals[k]);
      ++out.row_ptr[rows[k] + 1];
    }
  }
  std::partial_sum(out.row_ptr.begin(), out.row_ptr.end(), out.row_ptr.begin());
  for (double& v : out.values) v = round_to(v, fmt);
  return out;
}

SpmvResult spmv(const CsrMatrix& a, std::span<const double> x, const PrecisionPolicy& policy) {
  if (x.size() != a.n) throw ContractError("spmv: vector length does not match matrix dimension");
  const Format storage = policy.storage;

  const CsrMatrix* mat = &a;
  CsrMatrix narrowed;
  if (!at_least_as_wide(policy.compute, a.fmt)) {
    narrowed = a.rounded(policy.compute);
    mat = &narrowed;
  }
  std::vector<double> xs(x.begin(), x.end());
  for (double& v : xs) v = round_to(v, storage);

  SpmvResult result;
  result.values.assign(a.n, 0.0);
  dispatch_arith(policy, [&](auto tag) {
    using T = decltype(tag);
    for (std::size_t i = 0; i < mat->n; ++i) {
      MixedAccumulator<T::compute, T::accumulate> acc;
      for (std::size_t p = mat->row_ptr[i]; p < mat->row_ptr[i + 1]; ++p) {
        acc.add(mat->values[p], xs[mat->col_idx[p]]);
      }
      result.values[i] = round_to(acc.sum, storage);
    }
  });
  result.non_finite = static_cast<std::size_t>(std::count_if(
      result.values.begin(), result.values.end(), [](double v) { return !std::isfinite(v); }));
  return result;
}

PowerIterationResult power_iteration(const CsrMatrix& a, int max_iterations, double rel_tol,
                                     std::uint64_t seed) {
  const PrecisionPolicy fp64 = PrecisionPolicy::full(Format::F64);
  PowerIterationResult out;
  Rng rng(seed);
  std::vector<double> x(a.n);
  for (double& v : x) v = rng.uniform01();
  double nrm = std::sqrt(std::inner_product(x.begin(), x.end(), x.begin(), 0.0));
  for (double& v : x) v /= nrm;

  double previous = 0.0;
  for (int it = 1; it <= max_iterations; ++it) {
    std::vector<double> y = spmv(a, x, fp64).values;
    const double rayleigh = std::inner_product(x.begin(), x.end(), y.begin(), 0.0);
    nrm = std::sqrt(std::inner_product(y.begin(), y.end(), y.begin(), 0.0));
    out.iterations = it;
    out.eigenvalue = std::fabs(rayleigh);
    if (nrm == 0.0) {
      out.eigenvalue = 0.0;
      break;
    }
    for (std::size_t i = 0; i < y.size(); ++i) x[i] = y[i] / nrm;
    if (it > 1 && std::fabs(out.eigenvalue - previous) < rel_tol * out.eigenvalue) break;
    previous = out.eigenvalue;
  }
  out.vector = std::move(x);
  return out;
}

CsrMatrix spectral_rescale(const CsrMatrix& a) {
  const double lambda = power_iteration(a).eigenvalue;
  if (lambda == 0.0) return a;
  const double factor = kRescaleTarget / lambda;
  CsrMatrix out = a;
  for (double& v : out.values) v = round_to(v * factor, a.fmt);
  return out;
}

}  // namespace ofrr
