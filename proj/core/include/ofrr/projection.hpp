#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ofrr/dense_matrix.hpp"
#include "ofrr/linear_operator.hpp"
#include "ofrr/precision.hpp"
#include "ofrr/smallsolve.hpp"

namespace ofrr {

enum class Projection { RR, OFRR };
std::string_view projection_name(Projection p) noexcept;
std::optional<Projection> parse_projection(std::string_view name) noexcept;

enum class RitzKind { Eig, Svd };

/// Approximate eigen- or singular triplets, values descending. vectors (and
/// right_vectors for SVD) are FP64, one column per value.
struct RitzSet {
  std::vector<double> values;
  DenseMatrix vectors;
  std::optional<DenseMatrix> right_vectors;
  std::vector<double> residuals;  ///< empty until residual_report runs
  RitzKind kind = RitzKind::Eig;
  std::string diagnostic;

  std::size_t size() const noexcept { return values.size(); }
};

/// Projected pencil (B, M) promoted to FP64 and symmetrized.
struct PencilProblem {
  DenseMatrix b;
  DenseMatrix m;
  std::size_t source_dim = 0;
};

/// Policy used for the projection products U'AU, U'U, U'AV: FP16 storage
/// forms them with FP32 arithmetic into FP32; FP32 storage uses FP32
/// arithmetic and keeps the result in FP64; FP64 is FP64 throughout.
PrecisionPolicy projection_policy(const PrecisionPolicy& basis_policy) noexcept;
Format projection_output_format(const PrecisionPolicy& basis_policy) noexcept;

/// B = U'AU and (when with_mass) M = U'U. A*U is computed by the operator under
/// its own policy. Throws NumericalError on non-finite entries.
PencilProblem form_eig_pencil(const LinearOperator& a, const DenseMatrix& u,
                              const PrecisionPolicy& policy, bool with_mass = true);

/// Classical Rayleigh-Ritz; Q is treated as orthonormal without checking.
RitzSet rr_eig(const LinearOperator& a, const DenseMatrix& q, const PrecisionPolicy& policy);
/// Orthogonalization-free Rayleigh-Ritz: solves B y = lambda M y. Throws
/// EmptyBasisError when M retains no direction.
RitzSet ofrr_eig(const LinearOperator& a, const DenseMatrix& u, const PrecisionPolicy& policy);

RitzSet rr_svd(const LinearOperator& a, const DenseMatrix& u, const DenseMatrix& v,
               const PrecisionPolicy& policy);

/// Full solution of the block pencil [[0, G], [G', 0]] vs diag(Mu, Mv).
struct SvdPencilSolution {
  DenseMatrix g;   ///< U'AV, FP64
  DenseMatrix mu;  ///< U'U, FP64
  DenseMatrix mv;  ///< V'V, FP64
  EigResult eig;   ///< every eigenpair of the pencil, descending
  std::vector<std::size_t> positive;  ///< indices into eig of the selected values
  std::size_t k1 = 0;
  std::size_t k2 = 0;
};

/// Relative cutoff separating the +sigma eigenvalues from the zero cluster.
inline constexpr double kPositiveThreshold = 1e-8;

SvdPencilSolution solve_svd_pencil(const LinearOperator& a, const DenseMatrix& u,
                                   const DenseMatrix& v, const PrecisionPolicy& policy);

/// Orthogonalization-free SVD projection: U~ = sqrt(2) U Y, V~ = sqrt(2) V Z from
/// the eigenvectors of the positive pencil eigenvalues.
RitzSet ofrr_svd(const LinearOperator& a, const DenseMatrix& u, const DenseMatrix& v,
                 const PrecisionPolicy& policy);

/// Fills residuals in FP64 against the FP64 source matrix, with each vector
/// normalized to unit 2-norm. Eig: ||A v - l v|| / |l|. Svd: max(||A v - s u||,
/// ||A' u - s v||) / s. A zero value gets +inf.
RitzSet residual_report(const LinearOperator& a, RitzSet rs);

}  // namespace ofrr
