#pragma once

#include <vector>

#include "ofrr/dense_matrix.hpp"
#include "ofrr/smallsolve.hpp"

namespace ofrr {

// FP64 dense ground truth for the large test matrices, where the Jacobi
// kernels in smallsolve would be needlessly slow.

/// Full eigendecomposition of a symmetric matrix, values descending.
EigResult reference_eig(const DenseMatrix& s);
std::vector<double> reference_eigenvalues(const DenseMatrix& s);
/// Singular values, descending.
std::vector<double> reference_singular_values(const DenseMatrix& a);

}  // namespace ofrr
