#pragma once

#include <cstdint>

#include "ofrr/basis.hpp"
#include "ofrr/linear_operator.hpp"
#include "ofrr/projection.hpp"

namespace ofrr {

/// Outer-iteration settings. `policy` governs basis construction and the
/// projection; the MatVec follows the operator's own policy, so a
/// "MatVec precision / basis precision" pairing is an operator built with one
/// preset and an IterConfig carrying another.
struct IterConfig {
  std::size_t k = 20;        ///< subspace (or Krylov) dimension
  std::size_t m = 1;         ///< outer iterations
  std::size_t iter = 1;      ///< MatVecs per outer iteration
  std::size_t restarts = 0;  ///< Krylov restarts
  BasisMethod basis_method = BasisMethod::MgsLeft;
  Projection projection = Projection::RR;
  PrecisionPolicy policy = PrecisionPolicy::full(Format::F64);
  bool reorthogonalize = true;  ///< MgsLeft / ArnoldiMgs second pass
  std::uint64_t seed = 0;

  bool is_valid() const noexcept;
};

/// X <- A^iter X0 with infinity-norm column scaling after every MatVec; the
/// result is rounded to cfg.policy.storage. Exposed for the conditioning study.
DenseMatrix power_block(const LinearOperator& a, const DenseMatrix& x0, const IterConfig& cfg);

/// Seeded U(0,1) start block, drawn in FP64 and rounded to cfg.policy.storage.
DenseMatrix random_start(std::size_t rows, std::size_t cols, const IterConfig& cfg);

/// Multi-step subspace iteration with RR or OFRR projection. Residuals are
/// filled for every returned pair.
RitzSet subspace_iter_eig(const LinearOperator& a, const IterConfig& cfg);

/// Restarted Krylov iteration (ArnoldiMgs or KrylovHess), restarting from the
/// Ritz vector of the largest Ritz value.
RitzSet krylov_eig(const LinearOperator& a, const IterConfig& cfg);

/// Alternating subspace iteration for the leading singular triplets:
/// U <- A V, then V <- A' U, each followed by column scaling.
RitzSet subspace_iter_svd(const LinearOperator& a, const IterConfig& cfg);

}  // namespace ofrr
