#pragma once

#include <string>
#include <vector>

#include "ofrr/dense_matrix.hpp"

namespace ofrr {

/// Eigenpairs in descending order of value. Each vector's largest-magnitude
/// entry is positive.
struct EigResult {
  std::vector<double> values;
  DenseMatrix vectors;
  std::size_t discarded = 0;  ///< generalized solve: mass-matrix directions dropped
  std::string diagnostic;     ///< empty when nothing noteworthy happened

  std::size_t size() const noexcept { return values.size(); }
};

/// Cyclic Jacobi on (S + S')/2. Throws ConvergenceError after 30 sweeps.
EigResult sym_eig(const DenseMatrix& s);

/// B y = lambda M y with M symmetric positive semidefinite, reduced by
/// whitening M. Directions with mu_i <= dim * eps * mu_max are discarded; the
/// returned vectors satisfy Y' M Y = I. A numerically zero M yields an empty
/// result with a diagnostic.
EigResult sym_def_gen_eig(const DenseMatrix& b, const DenseMatrix& m);

/// Thin SVD C = U diag(s) V' with s descending, via one-sided Jacobi.
struct SvdResult {
  DenseMatrix u;
  std::vector<double> s;
  DenseMatrix v;
};
SvdResult small_svd(const DenseMatrix& c);

/// sigma_max / sigma_min of X promoted to FP64; +inf when sigma_min is 0.
double cond2(const DenseMatrix& x);

}  // namespace ofrr
