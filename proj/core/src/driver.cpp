#include "ofrr/driver.hpp"

#include <algorithm>
#include <cmath>

#include "ofrr/errors.hpp"
#include "ofrr/random.hpp"

namespace ofrr {

bool IterConfig::is_valid() const noexcept {
  return k >= 1 && m >= 1 && iter >= 1 && policy.is_valid();
}

namespace {

void require_valid(const IterConfig& cfg, const char* who) {
  if (!cfg.is_valid()) throw ContractError(std::string(who) + ": invalid iteration settings");
}

void scale_columns(DenseMatrix& x, const PrecisionPolicy& policy) {
  for (std::size_t j = 0; j < x.cols(); ++j) {
    auto c = x.col(j);
    const double d = inf_norm(c);
    if (!std::isfinite(d)) throw NumericalError("column scaling: non-finite column");
    if (d > 0.0) mixed_divide(c, d, policy);
  }
}

BasisOptions options_of(const IterConfig& cfg) { return {cfg.reorthogonalize}; }

RitzSet project(const LinearOperator& a, const DenseMatrix& q, const IterConfig& cfg) {
  return cfg.projection == Projection::RR ? rr_eig(a, q, cfg.policy) : ofrr_eig(a, q, cfg.policy);
}

RitzSet project_svd(const LinearOperator& a, const DenseMatrix& u, const DenseMatrix& v,
                    const IterConfig& cfg) {
  return cfg.projection == Projection::RR ? rr_svd(a, u, v, cfg.policy)
                                          : ofrr_svd(a, u, v, cfg.policy);
}

// Next start block: the Ritz vectors, topped up with fresh seeded U(0,1)
// columns when the basis dropped some, so the subspace width stays k. The
// top-up is orthogonalized against the kept vectors in FP64 first; a raw
// U(0,1) column is dominated by the leading eigenvector and would be dropped
// again in FP16.
DenseMatrix restart_block(const DenseMatrix& ritz, std::size_t k, const IterConfig& cfg,
                          std::size_t outer) {
  const std::size_t have = std::min(ritz.cols(), k);
  const std::size_t n = ritz.rows();
  DenseMatrix x(n, k, Format::F64);
  for (std::size_t j = 0; j < have; ++j) {
    auto src = ritz.col(j);
    std::copy(src.begin(), src.end(), x.col(j).begin());
  }
  if (have < k) {
    const PrecisionPolicy fp64 = PrecisionPolicy::full(Format::F64);
    const DenseMatrix fill = uniform_matrix(n, k - have, cfg.seed + 0x9e3779b97f4a7c15ULL * (outer + 1));
    for (std::size_t j = have; j < k; ++j) {
      auto v = x.col(j);
      auto src = fill.col(j - have);
      std::copy(src.begin(), src.end(), v.begin());
      for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t i = 0; i < j; ++i) {
          auto q = x.col(i);
          const double qq = mixed_dot(q, q, fp64);
          if (qq > 0.0) mixed_axpy(-mixed_dot(q, v, fp64) / qq, q, v, fp64);
        }
      }
      const double d = inf_norm(v);
      if (d > 0.0) mixed_divide(v, d, fp64);
    }
  }
  return x.rounded(cfg.policy.storage);
}

}  // namespace

DenseMatrix random_start(std::size_t rows, std::size_t cols, const IterConfig& cfg) {
  return uniform_matrix(rows, cols, cfg.seed, cfg.policy.storage);
}

DenseMatrix power_block(const LinearOperator& a, const DenseMatrix& x0, const IterConfig& cfg) {
  DenseMatrix x = x0;
  for (std::size_t t = 0; t < cfg.iter; ++t) {
    x = a.apply(x);
    scale_columns(x, a.policy());
  }
  return x.rounded(cfg.policy.storage);
}

RitzSet subspace_iter_eig(const LinearOperator& a, const IterConfig& cfg) {
  require_valid(cfg, "subspace_iter_eig");
  if (a.rows() != a.cols() || cfg.k > a.rows()) {
    throw ContractError("subspace_iter_eig: need a square operator with k <= n");
  }
  if (is_krylov(cfg.basis_method)) throw ContractError("subspace_iter_eig: block basis method required");

  DenseMatrix x0 = random_start(a.rows(), cfg.k, cfg);
  RitzSet rs;
  for (std::size_t outer = 0; outer < cfg.m; ++outer) {
    const DenseMatrix x = power_block(a, x0, cfg);
    const BasisFactorization basis = build_block_basis(x, cfg.basis_method, cfg.policy, options_of(cfg));
    rs = project(a, basis.q, cfg);
    x0 = restart_block(rs.vectors, cfg.k, cfg, outer);
  }
  return residual_report(a, std::move(rs));
}

RitzSet krylov_eig(const LinearOperator& a, const IterConfig& cfg) {
  require_valid(cfg, "krylov_eig");
  if (a.rows() != a.cols()) throw ContractError("krylov_eig: operator must be square");
  if (!is_krylov(cfg.basis_method)) throw ContractError("krylov_eig: Krylov basis method required");

  DenseMatrix v0 = random_start(a.rows(), 1, cfg);
  RitzSet rs;
  bool breakdown = false;
  for (std::size_t r = 0; r <= cfg.restarts; ++r) {
    const BasisFactorization basis =
        cfg.basis_method == BasisMethod::ArnoldiMgs
            ? arnoldi_mgs(a, v0.col(0), cfg.k, cfg.policy, {cfg.reorthogonalize})
            : krylov_hessenberg(a, v0.col(0), cfg.k, cfg.policy);
    breakdown = basis.breakdown;
    rs = project(a, basis.q, cfg);
    v0 = rs.vectors.columns(0, 1).rounded(cfg.policy.storage);
  }
  if (breakdown) {
    if (!rs.diagnostic.empty()) rs.diagnostic += "; ";
    rs.diagnostic += "Krylov breakdown at width " + std::to_string(rs.size());
  }
  return residual_report(a, std::move(rs));
}

RitzSet subspace_iter_svd(const LinearOperator& a, const IterConfig& cfg) {
  require_valid(cfg, "subspace_iter_svd");
  if (cfg.k > std::min(a.rows(), a.cols())) throw ContractError("subspace_iter_svd: k exceeds min(n1, n2)");
  if (is_krylov(cfg.basis_method)) throw ContractError("subspace_iter_svd: block basis method required");

  DenseMatrix v0 = random_start(a.cols(), cfg.k, cfg);
  RitzSet rs;
  for (std::size_t outer = 0; outer < cfg.m; ++outer) {
    DenseMatrix v = v0;
    DenseMatrix u;
    for (std::size_t t = 0; t < cfg.iter; ++t) {
      u = a.apply(v);
      scale_columns(u, a.policy());
      v = a.apply_transpose(u);
      scale_columns(v, a.policy());
    }
    const BasisFactorization ub =
        build_block_basis(u.rounded(cfg.policy.storage), cfg.basis_method, cfg.policy, options_of(cfg));
    const BasisFactorization vb =
        build_block_basis(v.rounded(cfg.policy.storage), cfg.basis_method, cfg.policy, options_of(cfg));
    rs = project_svd(a, ub.q, vb.q, cfg);
    if (rs.size() == 0) throw EmptyBasisError("subspace_iter_svd: projection returned no triplets");
    v0 = restart_block(*rs.right_vectors, cfg.k, cfg, outer);
  }
  return residual_report(a, std::move(rs));
}

}  // namespace ofrr
