#include "ofrr/projection.hpp"

#include <cmath>
#include <limits>

#include "ofrr/errors.hpp"

namespace ofrr {

std::string_view projection_name(Projection p) noexcept {
  return p == Projection::RR ? "rr" : "ofrr";
}

std::optional<Projection> parse_projection(std::string_view name) noexcept {
  if (name == "rr" || name == "RR") return Projection::RR;
  if (name == "ofrr" || name == "OFRR") return Projection::OFRR;
  return std::nullopt;
}

PrecisionPolicy projection_policy(const PrecisionPolicy& basis_policy) noexcept {
  switch (basis_policy.storage) {
    case Format::F16: return {Format::F16, Format::F32, Format::F32, basis_policy.drop_tol_factor};
    case Format::F32: return {Format::F32, Format::F32, Format::F32, basis_policy.drop_tol_factor};
    case Format::F64: break;
  }
  return PrecisionPolicy::full(Format::F64);
}

Format projection_output_format(const PrecisionPolicy& basis_policy) noexcept {
  return basis_policy.storage == Format::F16 ? Format::F32 : Format::F64;
}

namespace {

DenseMatrix project(const DenseMatrix& left, const DenseMatrix& right, const PrecisionPolicy& policy,
                    const char* what) {
  DenseMatrix p = mixed_gemm_tn(left, right, projection_policy(policy), projection_output_format(policy));
  if (!p.all_finite()) throw NumericalError(std::string(what) + ": non-finite projected entry");
  return p.rounded(Format::F64);
}

DenseMatrix promote(const DenseMatrix& x) { return x.rounded(Format::F64); }

void check_values(const std::vector<double>& values, const char* what) {
  for (double v : values) {
    if (!std::isfinite(v)) throw NumericalError(std::string(what) + ": non-finite Ritz value");
  }
}

DenseMatrix scaled(DenseMatrix m, double f) {
  for (double& v : m.data()) v *= f;
  return m;
}

}  // namespace

PencilProblem form_eig_pencil(const LinearOperator& a, const DenseMatrix& u,
                              const PrecisionPolicy& policy, bool with_mass) {
  if (a.rows() != a.cols() || u.rows() != a.cols()) {
    throw ContractError("form_eig_pencil: dimension mismatch");
  }
  const DenseMatrix us = u.rounded(policy.storage);
  const DenseMatrix w = a.apply(us);
  PencilProblem out;
  out.source_dim = a.rows();
  out.b = symmetrized(project(us, w, policy, "U'AU"));
  if (with_mass) out.m = symmetrized(project(us, us, policy, "U'U"));
  return out;
}

RitzSet rr_eig(const LinearOperator& a, const DenseMatrix& q, const PrecisionPolicy& policy) {
  const PencilProblem p = form_eig_pencil(a, q, policy, false);
  EigResult e = sym_eig(p.b);
  check_values(e.values, "rr_eig");
  RitzSet out;
  out.kind = RitzKind::Eig;
  out.values = std::move(e.values);
  out.vectors = matmul(promote(q.rounded(policy.storage)), e.vectors);
  return out;
}

RitzSet ofrr_eig(const LinearOperator& a, const DenseMatrix& u, const PrecisionPolicy& policy) {
  const PencilProblem p = form_eig_pencil(a, u, policy, true);
  EigResult e = sym_def_gen_eig(p.b, p.m);
  if (e.size() == 0) throw EmptyBasisError("ofrr_eig: " + e.diagnostic);
  check_values(e.values, "ofrr_eig");
  RitzSet out;
  out.kind = RitzKind::Eig;
  out.values = std::move(e.values);
  out.vectors = matmul(promote(u.rounded(policy.storage)), e.vectors);
  out.diagnostic = std::move(e.diagnostic);
  return out;
}

RitzSet rr_svd(const LinearOperator& a, const DenseMatrix& u, const DenseMatrix& v,
               const PrecisionPolicy& policy) {
  if (u.rows() != a.rows() || v.rows() != a.cols()) throw ContractError("rr_svd: dimension mismatch");
  const DenseMatrix us = u.rounded(policy.storage);
  const DenseMatrix vs = v.rounded(policy.storage);
  const DenseMatrix g = project(us, a.apply(vs), policy, "U'AV");
  SvdResult s = small_svd(g);
  check_values(s.s, "rr_svd");
  RitzSet out;
  out.kind = RitzKind::Svd;
  out.values = std::move(s.s);
  out.vectors = matmul(promote(us), s.u);
  out.right_vectors = matmul(promote(vs), s.v);
  return out;
}

SvdPencilSolution solve_svd_pencil(const LinearOperator& a, const DenseMatrix& u,
                                   const DenseMatrix& v, const PrecisionPolicy& policy) {
  if (u.rows() != a.rows() || v.rows() != a.cols()) {
    throw ContractError("solve_svd_pencil: dimension mismatch");
  }
  const DenseMatrix us = u.rounded(policy.storage);
  const DenseMatrix vs = v.rounded(policy.storage);

  SvdPencilSolution out;
  out.k1 = u.cols();
  out.k2 = v.cols();
  out.g = project(us, a.apply(vs), policy, "U'AV");
  out.mu = symmetrized(project(us, us, policy, "U'U"));
  out.mv = symmetrized(project(vs, vs, policy, "V'V"));

  const std::size_t k = out.k1 + out.k2;
  DenseMatrix b(k, k);
  DenseMatrix m(k, k);
  for (std::size_t j = 0; j < out.k2; ++j) {
    for (std::size_t i = 0; i < out.k1; ++i) {
      b(i, out.k1 + j) = out.g(i, j);
      b(out.k1 + j, i) = out.g(i, j);
    }
  }
  for (std::size_t j = 0; j < out.k1; ++j) {
    for (std::size_t i = 0; i < out.k1; ++i) m(i, j) = out.mu(i, j);
  }
  for (std::size_t j = 0; j < out.k2; ++j) {
    for (std::size_t i = 0; i < out.k2; ++i) m(out.k1 + i, out.k1 + j) = out.mv(i, j);
  }
  out.eig = sym_def_gen_eig(b, m);
  if (out.eig.size() > 0) {
    const double cutoff = kPositiveThreshold * out.eig.values.front();
    for (std::size_t i = 0; i < out.eig.size(); ++i) {
      if (out.eig.values[i] > cutoff && out.eig.values[i] > 0.0) out.positive.push_back(i);
    }
  }
  return out;
}

RitzSet ofrr_svd(const LinearOperator& a, const DenseMatrix& u, const DenseMatrix& v,
                 const PrecisionPolicy& policy) {
  const SvdPencilSolution p = solve_svd_pencil(a, u, v, policy);
  if (p.eig.size() == 0) throw EmptyBasisError("ofrr_svd: " + p.eig.diagnostic);

  const std::size_t r = p.positive.size();
  DenseMatrix y(p.k1, r);
  DenseMatrix z(p.k2, r);
  RitzSet out;
  out.kind = RitzKind::Svd;
  out.values.resize(r);
  for (std::size_t c = 0; c < r; ++c) {
    const std::size_t idx = p.positive[c];
    out.values[c] = p.eig.values[idx];
    for (std::size_t i = 0; i < p.k1; ++i) y(i, c) = p.eig.vectors(i, idx);
    for (std::size_t i = 0; i < p.k2; ++i) z(i, c) = p.eig.vectors(p.k1 + i, idx);
  }
  check_values(out.values, "ofrr_svd");
  const double root2 = std::sqrt(2.0);
  out.vectors = scaled(matmul(promote(u.rounded(policy.storage)), y), root2);
  out.right_vectors = scaled(matmul(promote(v.rounded(policy.storage)), z), root2);
  out.diagnostic = p.eig.diagnostic;
  const std::size_t expected = std::min(p.k1, p.k2);
  if (r < expected) {
    if (!out.diagnostic.empty()) out.diagnostic += "; ";
    out.diagnostic += std::to_string(r) + " of " + std::to_string(expected) + " positive eigenvalues";
  }
  return out;
}

namespace {

DenseMatrix unit_columns(const DenseMatrix& x) {
  DenseMatrix out = x;
  for (std::size_t j = 0; j < out.cols(); ++j) {
    auto c = out.col(j);
    double s = 0.0;
    for (double v : c) s += v * v;
    const double nrm = std::sqrt(s);
    if (nrm > 0.0) {
      for (double& v : c) v /= nrm;
    }
  }
  return out;
}

double distance(std::span<const double> x, double alpha, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - alpha * y[i];
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace

RitzSet residual_report(const LinearOperator& a, RitzSet rs) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  rs.residuals.assign(rs.size(), kInf);
  if (rs.size() == 0) return rs;
  const DenseMatrix left = unit_columns(rs.vectors);
  if (rs.kind == RitzKind::Eig) {
    const DenseMatrix av = a.apply_exact(left);
    for (std::size_t i = 0; i < rs.size(); ++i) {
      const double l = rs.values[i];
      if (l != 0.0) rs.residuals[i] = distance(av.col(i), l, left.col(i)) / std::fabs(l);
    }
    return rs;
  }
  if (!rs.right_vectors) throw ContractError("residual_report: SVD result lacks right vectors");
  const DenseMatrix right = unit_columns(*rs.right_vectors);
  const DenseMatrix av = a.apply_exact(right);
  const DenseMatrix atu = a.apply_transpose_exact(left);
  for (std::size_t i = 0; i < rs.size(); ++i) {
    const double s = rs.values[i];
    if (s == 0.0) continue;
    const double r1 = distance(av.col(i), s, left.col(i));
    const double r2 = distance(atu.col(i), s, right.col(i));
    rs.residuals[i] = std::max(r1, r2) / std::fabs(s);
  }
  return rs;
}

}  // namespace ofrr
