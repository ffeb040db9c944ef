#include "ofrr/smallsolve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ofrr/errors.hpp"

namespace ofrr {

namespace {

constexpr int kMaxSweeps = 30;
constexpr double kOffTolerance = 1e-14;
constexpr double kSvdTolerance = 1e-15;

double off_norm(const DenseMatrix& a) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.cols(); ++j) {
    for (std::size_t i = 0; i < a.rows(); ++i) {
      if (i != j) s += a(i, j) * a(i, j);
    }
  }
  return std::sqrt(s);
}

// Makes the largest-magnitude entry of every column positive.
void fix_signs(DenseMatrix& v) {
  for (std::size_t j = 0; j < v.cols(); ++j) {
    auto c = v.col(j);
    std::size_t arg = 0;
    for (std::size_t i = 1; i < c.size(); ++i) {
      if (std::fabs(c[i]) > std::fabs(c[arg])) arg = i;
    }
    if (!c.empty() && c[arg] < 0.0) {
      for (double& e : c) e = -e;
    }
  }
}

std::vector<std::size_t> descending_order(const std::vector<double>& values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  return order;
}

DenseMatrix permute_columns(const DenseMatrix& m, const std::vector<std::size_t>& order) {
  DenseMatrix out(m.rows(), order.size());
  for (std::size_t j = 0; j < order.size(); ++j) {
    std::copy(m.col(order[j]).begin(), m.col(order[j]).end(), out.col(j).begin());
  }
  return out;
}

void rotate_columns(DenseMatrix& m, std::size_t p, std::size_t q, double c, double s) {
  auto cp = m.col(p);
  auto cq = m.col(q);
  for (std::size_t i = 0; i < cp.size(); ++i) {
    const double x = cp[i];
    const double y = cq[i];
    cp[i] = c * x - s * y;
    cq[i] = s * x + c * y;
  }
}

}  // namespace

EigResult sym_eig(const DenseMatrix& s_in) {
  if (s_in.rows() != s_in.cols()) throw ContractError("sym_eig: matrix is not square");
  const std::size_t n = s_in.rows();
  DenseMatrix a = symmetrized(s_in.rounded(Format::F64));
  DenseMatrix v = DenseMatrix::identity(n);
  const double scale = a.frobenius_norm();

  for (int sweep = 0; sweep <= kMaxSweeps; ++sweep) {
    const double off = off_norm(a);
    if (off <= kOffTolerance * scale) break;
    if (sweep == kMaxSweeps) throw ConvergenceError("sym_eig: Jacobi did not converge", off);
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double app = a(p, p);
        const double aqq = a(q, q);
        // Negligible next to both diagonal entries: annihilate.
        if (std::fabs(app) + 100.0 * std::fabs(apq) == std::fabs(app) &&
            std::fabs(aqq) + 100.0 * std::fabs(apq) == std::fabs(aqq)) {
          a(p, q) = 0.0;
          a(q, p) = 0.0;
          continue;
        }
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) / (std::fabs(theta) + std::hypot(theta, 1.0));
        const double c = 1.0 / std::hypot(t, 1.0);
        const double sn = t * c;
        // A <- J' A J with J the (p, q) rotation [c s; -s c].
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - sn * akq;
          a(k, q) = sn * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - sn * aqk;
          a(q, k) = sn * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        rotate_columns(v, p, q, c, sn);
      }
    }
  }

  std::vector<double> diag(n);
  for (std::size_t i = 0; i < n; ++i) diag[i] = a(i, i);
  const auto order = descending_order(diag);
  EigResult out;
  out.values.resize(n);
  for (std::size_t j = 0; j < n; ++j) out.values[j] = diag[order[j]];
  out.vectors = permute_columns(v, order);
  fix_signs(out.vectors);
  return out;
}

EigResult sym_def_gen_eig(const DenseMatrix& b, const DenseMatrix& m) {
  if (b.rows() != b.cols() || m.rows() != m.cols() || b.rows() != m.rows()) {
    throw ContractError("sym_def_gen_eig: B and M must be square and of equal size");
  }
  const std::size_t n = m.rows();
  EigResult out;
  if (n == 0) {
    out.diagnostic = "empty pencil";
    return out;
  }
  const EigResult mass = sym_eig(m);
  const double mu_max = mass.values.front();
  if (!(mu_max > 0.0)) {
    out.vectors = DenseMatrix(n, 0);
    out.discarded = n;
    out.diagnostic = "mass matrix is numerically zero";
    return out;
  }
  const double cutoff = static_cast<double>(n) * machine_epsilon(Format::F64) * mu_max;
  std::size_t r = 0;
  while (r < n && mass.values[r] > cutoff) ++r;

  // W = P_r D_r^{-1/2}
  DenseMatrix w(n, r);
  for (std::size_t j = 0; j < r; ++j) {
    const double f = 1.0 / std::sqrt(mass.values[j]);
    for (std::size_t i = 0; i < n; ++i) w(i, j) = mass.vectors(i, j) * f;
  }
  const DenseMatrix t = symmetrized(matmul_tn(w, matmul(b.rounded(Format::F64), w)));
  EigResult inner = sym_eig(t);

  out.values = std::move(inner.values);
  out.vectors = matmul(w, inner.vectors);
  fix_signs(out.vectors);
  out.discarded = n - r;
  if (out.discarded) {
    out.diagnostic = std::to_string(out.discarded) + " mass-matrix direction(s) below threshold";
  }
  return out;
}

SvdResult small_svd(const DenseMatrix& c_in) {
  if (c_in.rows() < c_in.cols()) {
    SvdResult t = small_svd(c_in.transposed());
    return {std::move(t.v), std::move(t.s), std::move(t.u)};
  }
  const std::size_t m = c_in.rows();
  const std::size_t n = c_in.cols();
  DenseMatrix u = c_in.rounded(Format::F64);
  DenseMatrix v = DenseMatrix::identity(n);

  auto dot = [](std::span<const double> x, std::span<const double> y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
  };

  bool converged = n < 2;
  double worst = 0.0;
  for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
    bool rotated = false;
    worst = 0.0;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double alpha = dot(u.col(p), u.col(p));
        const double beta = dot(u.col(q), u.col(q));
        const double gamma = dot(u.col(p), u.col(q));
        const double denom = std::sqrt(alpha) * std::sqrt(beta);
        if (gamma == 0.0 || denom == 0.0) continue;
        const double rel = std::fabs(gamma) / denom;
        if (!(rel > kSvdTolerance)) continue;
        worst = std::max(worst, rel);
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::fabs(zeta) + std::hypot(zeta, 1.0));
        const double c = 1.0 / std::hypot(t, 1.0);
        const double s = c * t;
        rotate_columns(u, p, q, c, s);
        rotate_columns(v, p, q, c, s);
      }
    }
    converged = !rotated;
  }
  if (!converged) throw ConvergenceError("small_svd: one-sided Jacobi did not converge", worst);

  std::vector<double> sigma(n);
  for (std::size_t j = 0; j < n; ++j) sigma[j] = std::sqrt(dot(u.col(j), u.col(j)));
  const auto order = descending_order(sigma);

  SvdResult out;
  out.s.resize(n);
  out.u = DenseMatrix(m, n);
  out.v = permute_columns(v, order);
  std::vector<std::size_t> zero_cols;
  for (std::size_t j = 0; j < n; ++j) {
    const double sj = sigma[order[j]];
    out.s[j] = sj;
    if (sj > 0.0) {
      auto src = u.col(order[j]);
      auto dst = out.u.col(j);
      for (std::size_t i = 0; i < m; ++i) dst[i] = src[i] / sj;
    } else {
      zero_cols.push_back(j);
    }
  }
  // Complete U with unit vectors orthogonalized against the filled columns.
  std::vector<bool> filled(n, true);
  for (std::size_t j : zero_cols) filled[j] = false;
  std::size_t e = 0;
  for (std::size_t j : zero_cols) {
    for (; e < m && !filled[j]; ++e) {
      std::vector<double> cand(m, 0.0);
      cand[e] = 1.0;
      for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t l = 0; l < n; ++l) {
          if (!filled[l]) continue;
          const double r = dot(out.u.col(l), cand);
          for (std::size_t i = 0; i < m; ++i) cand[i] -= r * out.u(i, l);
        }
      }
      const double nrm = std::sqrt(dot(cand, cand));
      if (nrm > 0.5) {
        for (std::size_t i = 0; i < m; ++i) out.u(i, j) = cand[i] / nrm;
        filled[j] = true;
      }
    }
  }
  return out;
}

double cond2(const DenseMatrix& x) {
  if (x.empty()) throw ContractError("cond2: empty matrix");
  const SvdResult r = small_svd(x);
  const double smin = r.s.back();
  if (smin == 0.0) return std::numeric_limits<double>::infinity();
  return r.s.front() / smin;
}

}  // namespace ofrr
