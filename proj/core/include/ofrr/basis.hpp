#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "ofrr/dense_matrix.hpp"
#include "ofrr/linear_operator.hpp"
#include "ofrr/precision.hpp"

namespace ofrr {

enum class BasisMethod { MgsLeft, MgsRight, Cgs, Cgs2, HessLeft, HessRight, ArnoldiMgs, KrylovHess };

std::string_view method_name(BasisMethod m) noexcept;
std::optional<BasisMethod> parse_method(std::string_view name) noexcept;
bool is_krylov(BasisMethod m) noexcept;
bool is_hessenberg(BasisMethod m) noexcept;

/// Output of every builder. Pivots are 0-based row indices; for the
/// Gram-Schmidt family they are simply 0, 1, ..., width-1.
struct BasisFactorization {
  DenseMatrix q;                ///< kept columns only, in policy.storage
  std::vector<std::size_t> pivots;
  std::vector<bool> kept;       ///< one entry per input column (Krylov: per step)
  BasisMethod method = BasisMethod::MgsLeft;
  PrecisionPolicy policy;
  /// Krylov builders: coefficients h(i, j) with A q_j = sum_i h(i, j) q_i.
  /// width rows; one column per completed step.
  std::optional<DenseMatrix> coefficients;
  bool breakdown = false;

  std::size_t width() const noexcept { return q.cols(); }
};

struct BasisOptions {
  /// MgsLeft and ArnoldiMgs: repeat the projection once when the norm shrinks
  /// below sqrt(2)/2 of its value before projection.
  bool reorthogonalize = false;
};

/// Gram-Schmidt family. Columns whose norm after projection falls below
/// drop_tolerance() times their norm before projection are dropped. Throws
/// EmptyBasisError if nothing survives and ContractError for a non-GS method.
BasisFactorization orthonormalize(const DenseMatrix& x, BasisMethod method,
                                  const PrecisionPolicy& policy, BasisOptions options = {});

enum class Layout { Left, Right };

/// Hessenberg process (row-pivoted LU without the U factor). Each kept column
/// is scaled so its pivot entry is exactly 1; columns whose pivot magnitude is
/// below drop_tolerance() are skipped without consuming a pivot.
BasisFactorization hessenberg_basis(const DenseMatrix& x, Layout layout,
                                    const PrecisionPolicy& policy);

/// Arnoldi with modified Gram-Schmidt over A, at most min(k, n) columns.
/// Breakdown when the projected norm drops below drop_tolerance() times the
/// norm of A*v_j. The operator's own policy governs the matvec; `policy`
/// governs every basis operation.
BasisFactorization arnoldi_mgs(const LinearOperator& a, std::span<const double> v0, std::size_t k,
                               const PrecisionPolicy& policy, BasisOptions options = {});

/// Krylov-Hessenberg process with z_i = e_{pi_i}. Breakdown when the largest
/// remaining entry drops below drop_tolerance() times the largest entry of
/// A*v_j before elimination.
BasisFactorization krylov_hessenberg(const LinearOperator& a, std::span<const double> v0,
                                     std::size_t k, const PrecisionPolicy& policy);

/// Dispatches block methods (Gram-Schmidt family and Hessenberg layouts).
BasisFactorization build_block_basis(const DenseMatrix& x, BasisMethod method,
                                     const PrecisionPolicy& policy, BasisOptions options = {});

}  // namespace ofrr
