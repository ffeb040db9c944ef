#include "ofrr/basis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ofrr/errors.hpp"

namespace ofrr {

namespace {

constexpr double kReorthThreshold = 0.70710678118654752440;  // sqrt(2)/2

struct MethodEntry {
  BasisMethod method;
  std::string_view name;
};

constexpr MethodEntry kMethods[] = {
    {BasisMethod::MgsLeft, "mgs-left"},       {BasisMethod::MgsRight, "mgs-right"},
    {BasisMethod::Cgs, "cgs"},                {BasisMethod::Cgs2, "cgs2"},
    {BasisMethod::HessLeft, "hess-left"},     {BasisMethod::HessRight, "hess-right"},
    {BasisMethod::ArnoldiMgs, "arnoldi-mgs"}, {BasisMethod::KrylovHess, "krylov-hess"},
};

double coefficient(std::span<const double> q, std::span<const double> v,
                   const PrecisionPolicy& policy) {
  return round_to(mixed_dot(q, v, policy), policy.compute);
}

// v <- v - sum_i (q_i' v) q_i, one coefficient at a time on the current v.
void mgs_sweep(const std::vector<std::vector<double>>& qs, std::vector<double>& v,
               const PrecisionPolicy& policy, double* h = nullptr) {
  for (std::size_t i = 0; i < qs.size(); ++i) {
    const double r = coefficient(qs[i], v, policy);
    if (h) h[i] += r;
    mixed_axpy(-r, qs[i], v, policy);
  }
}

// All coefficients from the same v, then subtracted.
void cgs_sweep(const std::vector<std::vector<double>>& qs, std::vector<double>& v,
               const PrecisionPolicy& policy) {
  std::vector<double> r(qs.size());
  for (std::size_t i = 0; i < qs.size(); ++i) r[i] = coefficient(qs[i], v, policy);
  for (std::size_t i = 0; i < qs.size(); ++i) mixed_axpy(-r[i], qs[i], v, policy);
}

DenseMatrix assemble(const std::vector<std::vector<double>>& cols, std::size_t rows, Format fmt) {
  DenseMatrix q(rows, cols.size(), fmt);
  for (std::size_t j = 0; j < cols.size(); ++j) std::copy(cols[j].begin(), cols[j].end(), q.col(j).begin());
  return q;
}

std::vector<double> column_copy(const DenseMatrix& x, std::size_t j, Format fmt) {
  std::vector<double> v(x.col(j).begin(), x.col(j).end());
  for (double& e : v) e = round_to(e, fmt);
  return v;
}

// Largest |v_i| over rows not yet used as pivots; lowest index wins ties.
std::size_t pivot_row(std::span<const double> v, const std::vector<bool>& used) {
  std::size_t best = v.size();
  double best_mag = -1.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (used[i]) continue;
    const double m = std::fabs(v[i]);
    if (m > best_mag) {
      best_mag = m;
      best = i;
    }
  }
  return best;
}

void require_valid(const PrecisionPolicy& policy, const char* who) {
  if (!policy.is_valid()) throw ContractError(std::string(who) + ": invalid precision policy");
}

}  // namespace

std::string_view method_name(BasisMethod m) noexcept {
  for (const auto& e : kMethods) {
    if (e.method == m) return e.name;
  }
  return "?";
}

std::optional<BasisMethod> parse_method(std::string_view name) noexcept {
  for (const auto& e : kMethods) {
    if (e.name == name) return e.method;
  }
  if (name == "mgs") return BasisMethod::MgsLeft;
  if (name == "lanczos" || name == "arnoldi") return BasisMethod::ArnoldiMgs;
  if (name == "hessenberg" || name == "hess") return BasisMethod::HessLeft;
  return std::nullopt;
}

bool is_krylov(BasisMethod m) noexcept {
  return m == BasisMethod::ArnoldiMgs || m == BasisMethod::KrylovHess;
}

bool is_hessenberg(BasisMethod m) noexcept {
  return m == BasisMethod::HessLeft || m == BasisMethod::HessRight;
}

BasisFactorization orthonormalize(const DenseMatrix& x, BasisMethod method,
                                  const PrecisionPolicy& policy, BasisOptions options) {
  require_valid(policy, "orthonormalize");
  if (x.empty()) throw ContractError("orthonormalize: empty input");
  if (method != BasisMethod::MgsLeft && method != BasisMethod::MgsRight &&
      method != BasisMethod::Cgs && method != BasisMethod::Cgs2) {
    throw ContractError("orthonormalize: not a Gram-Schmidt method");
  }
  const Format storage = policy.storage;
  const double tol = policy.drop_tolerance();
  const std::size_t n = x.rows();

  BasisFactorization out;
  out.method = method;
  out.policy = policy;
  out.kept.assign(x.cols(), false);
  std::vector<std::vector<double>> qs;

  if (method == BasisMethod::MgsRight) {
    std::vector<std::vector<double>> work(x.cols());
    std::vector<double> pre(x.cols());
    for (std::size_t j = 0; j < x.cols(); ++j) {
      work[j] = column_copy(x, j, storage);
      pre[j] = safe_norm2(work[j], policy);
    }
    for (std::size_t j = 0; j < x.cols(); ++j) {
      std::vector<double>& v = work[j];
      const double post = safe_norm2(v, policy);
      if (!(pre[j] > 0.0) || post < tol * pre[j]) continue;
      mixed_divide(v, post, policy);
      for (std::size_t l = j + 1; l < x.cols(); ++l) {
        mixed_axpy(-coefficient(v, work[l], policy), v, work[l], policy);
      }
      out.kept[j] = true;
      qs.push_back(std::move(v));
    }
  } else {
    for (std::size_t j = 0; j < x.cols(); ++j) {
      std::vector<double> v = column_copy(x, j, storage);
      const double pre = safe_norm2(v, policy);
      if (!(pre > 0.0)) continue;
      switch (method) {
        case BasisMethod::MgsLeft: {
          mgs_sweep(qs, v, policy);
          if (options.reorthogonalize && safe_norm2(v, policy) < kReorthThreshold * pre) {
            mgs_sweep(qs, v, policy);
          }
          break;
        }
        case BasisMethod::Cgs:
          cgs_sweep(qs, v, policy);
          break;
        default:
          cgs_sweep(qs, v, policy);
          cgs_sweep(qs, v, policy);
          break;
      }
      const double post = safe_norm2(v, policy);
      if (post < tol * pre) continue;
      mixed_divide(v, post, policy);
      out.kept[j] = true;
      qs.push_back(std::move(v));
    }
  }

  if (qs.empty()) throw EmptyBasisError("orthonormalize: every column was dropped");
  out.q = assemble(qs, n, storage);
  out.pivots.resize(qs.size());
  std::iota(out.pivots.begin(), out.pivots.end(), std::size_t{0});
  return out;
}

BasisFactorization hessenberg_basis(const DenseMatrix& x, Layout layout,
                                    const PrecisionPolicy& policy) {
  require_valid(policy, "hessenberg_basis");
  if (x.empty()) throw ContractError("hessenberg_basis: empty input");
  const Format storage = policy.storage;
  const double tol = policy.drop_tolerance();
  const std::size_t n = x.rows();
  const std::size_t k = x.cols();

  BasisFactorization out;
  out.method = layout == Layout::Left ? BasisMethod::HessLeft : BasisMethod::HessRight;
  out.policy = policy;
  out.kept.assign(k, false);
  std::vector<bool> used(n, false);
  std::vector<std::vector<double>> qs;

  std::vector<std::vector<double>> work(k);
  for (std::size_t j = 0; j < k; ++j) work[j] = column_copy(x, j, storage);

  auto eliminate = [&](const std::vector<double>& q, std::size_t row, std::vector<double>& v) {
    const double c = v[row];
    if (c != 0.0) mixed_axpy(-c, q, v, policy);
  };

  for (std::size_t j = 0; j < k; ++j) {
    std::vector<double>& v = work[j];
    if (layout == Layout::Left) {
      for (std::size_t i = 0; i < qs.size(); ++i) eliminate(qs[i], out.pivots[i], v);
    }
    const std::size_t r = pivot_row(v, used);
    if (r == n || !(std::fabs(v[r]) >= tol)) continue;
    mixed_divide(v, v[r], policy);
    v[r] = 1.0;
    used[r] = true;
    out.kept[j] = true;
    out.pivots.push_back(r);
    if (layout == Layout::Right) {
      for (std::size_t l = j + 1; l < k; ++l) eliminate(v, r, work[l]);
    }
    qs.push_back(std::move(v));
  }

  if (qs.empty()) throw EmptyBasisError("hessenberg_basis: every column was skipped");
  out.q = assemble(qs, n, storage);
  return out;
}

namespace {

std::vector<double> matvec(const LinearOperator& a, const std::vector<double>& v, Format storage) {
  const DenseMatrix y = a.apply(DenseMatrix::from_values(v.size(), 1, v, a.policy().storage));
  std::vector<double> w(y.col(0).begin(), y.col(0).end());
  for (double& e : w) e = round_to(e, storage);
  return w;
}

void check_krylov_args(const LinearOperator& a, std::span<const double> v0, std::size_t k,
                       const PrecisionPolicy& policy, const char* who) {
  require_valid(policy, who);
  if (a.rows() != a.cols()) throw ContractError(std::string(who) + ": operator must be square");
  if (v0.size() != a.cols()) throw ContractError(std::string(who) + ": start vector length mismatch");
  if (k == 0) throw ContractError(std::string(who) + ": k must be positive");
}

DenseMatrix coefficient_matrix(const std::vector<std::vector<double>>& h, std::size_t width) {
  DenseMatrix out(width, h.size());
  for (std::size_t j = 0; j < h.size(); ++j) {
    for (std::size_t i = 0; i < std::min(width, h[j].size()); ++i) out(i, j) = h[j][i];
  }
  return out;
}

}  // namespace

BasisFactorization arnoldi_mgs(const LinearOperator& a, std::span<const double> v0, std::size_t k,
                               const PrecisionPolicy& policy, BasisOptions options) {
  check_krylov_args(a, v0, k, policy, "arnoldi_mgs");
  const Format storage = policy.storage;
  const std::size_t n = a.rows();
  const std::size_t width = std::min(k, n);
  const double tol = policy.drop_tolerance();

  std::vector<double> v(v0.begin(), v0.end());
  for (double& e : v) e = round_to(e, storage);
  const double nrm = safe_norm2(v, policy);
  if (!(nrm > 0.0)) throw ContractError("arnoldi_mgs: start vector is zero");
  mixed_divide(v, nrm, policy);

  BasisFactorization out;
  out.method = BasisMethod::ArnoldiMgs;
  out.policy = policy;
  std::vector<std::vector<double>> qs{std::move(v)};
  std::vector<std::vector<double>> h;

  while (qs.size() < width) {
    std::vector<double> w = matvec(a, qs.back(), storage);
    const double pre = safe_norm2(w, policy);
    std::vector<double> hj(qs.size() + 1, 0.0);
    mgs_sweep(qs, w, policy, hj.data());
    double post = safe_norm2(w, policy);
    if (options.reorthogonalize && post < kReorthThreshold * pre) {
      mgs_sweep(qs, w, policy, hj.data());
      post = safe_norm2(w, policy);
    }
    hj.back() = post;
    h.push_back(hj);
    if (!(post >= tol * pre) || post == 0.0) {
      out.breakdown = true;
      break;
    }
    mixed_divide(w, post, policy);
    qs.push_back(std::move(w));
  }

  out.kept.assign(qs.size(), true);
  out.pivots.resize(qs.size());
  std::iota(out.pivots.begin(), out.pivots.end(), std::size_t{0});
  out.q = assemble(qs, n, storage);
  out.coefficients = coefficient_matrix(h, qs.size());
  return out;
}

BasisFactorization krylov_hessenberg(const LinearOperator& a, std::span<const double> v0,
                                     std::size_t k, const PrecisionPolicy& policy) {
  check_krylov_args(a, v0, k, policy, "krylov_hessenberg");
  const Format storage = policy.storage;
  const std::size_t n = a.rows();
  const std::size_t width = std::min(k, n);
  const double tol = policy.drop_tolerance();

  std::vector<bool> used(n, false);
  std::vector<double> v(v0.begin(), v0.end());
  for (double& e : v) e = round_to(e, storage);
  const std::size_t r0 = pivot_row(v, used);
  if (!(std::fabs(v[r0]) > 0.0)) throw ContractError("krylov_hessenberg: start vector is zero");
  mixed_divide(v, v[r0], policy);
  v[r0] = 1.0;
  used[r0] = true;

  BasisFactorization out;
  out.method = BasisMethod::KrylovHess;
  out.policy = policy;
  out.pivots.push_back(r0);
  std::vector<std::vector<double>> qs{std::move(v)};
  std::vector<std::vector<double>> h;

  while (qs.size() < width) {
    std::vector<double> w = matvec(a, qs.back(), storage);
    const double pre = inf_norm(w);
    std::vector<double> hj(qs.size() + 1, 0.0);
    for (std::size_t i = 0; i < qs.size(); ++i) {
      const double c = w[out.pivots[i]];
      hj[i] = c;
      if (c != 0.0) mixed_axpy(-c, qs[i], w, policy);
    }
    const std::size_t r = pivot_row(w, used);
    const double p = r < n ? w[r] : 0.0;
    hj.back() = p;
    h.push_back(hj);
    if (!(std::fabs(p) >= tol * pre) || p == 0.0) {
      out.breakdown = true;
      break;
    }
    mixed_divide(w, p, policy);
    w[r] = 1.0;
    used[r] = true;
    out.pivots.push_back(r);
    qs.push_back(std::move(w));
  }

  out.kept.assign(qs.size(), true);
  out.q = assemble(qs, n, storage);
  out.coefficients = coefficient_matrix(h, qs.size());
  return out;
}

BasisFactorization build_block_basis(const DenseMatrix& x, BasisMethod method,
                                     const PrecisionPolicy& policy, BasisOptions options) {
  switch (method) {
    case BasisMethod::HessLeft: return hessenberg_basis(x, Layout::Left, policy);
    case BasisMethod::HessRight: return hessenberg_basis(x, Layout::Right, policy);
    case BasisMethod::ArnoldiMgs:
    case BasisMethod::KrylovHess:
      throw ContractError("build_block_basis: Krylov methods need an operator and a start vector");
    default: return orthonormalize(x, method, policy, options);
  }
}

}  // namespace ofrr
