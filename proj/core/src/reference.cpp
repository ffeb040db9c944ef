#include "ofrr/reference.hpp"

#include <algorithm>

#include <Eigen/Dense>

#include "ofrr/errors.hpp"

namespace ofrr {

namespace {

Eigen::MatrixXd to_eigen(const DenseMatrix& a) {
  Eigen::MatrixXd m(a.rows(), a.cols());
  for (std::size_t j = 0; j < a.cols(); ++j) {
    for (std::size_t i = 0; i < a.rows(); ++i) m(i, j) = a(i, j);
  }
  return m;
}

Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solve(const DenseMatrix& s, bool vectors) {
  if (s.rows() != s.cols()) throw ContractError("reference_eig: matrix is not square");
  const Eigen::MatrixXd m = to_eigen(s);
  const Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(
      sym, vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
}

}  // namespace

EigResult reference_eig(const DenseMatrix& s) {
  const auto es = solve(s, true);
  const std::size_t n = s.rows();
  EigResult out;
  out.values.resize(n);
  out.vectors = DenseMatrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    const auto src = static_cast<Eigen::Index>(n - 1 - j);  // Eigen sorts ascending
    out.values[j] = es.eigenvalues()(src);
    auto col = out.vectors.col(j);
    std::size_t arg = 0;
    for (std::size_t i = 0; i < n; ++i) {
      col[i] = es.eigenvectors()(static_cast<Eigen::Index>(i), src);
      if (std::abs(col[i]) > std::abs(col[arg])) arg = i;
    }
    if (col[arg] < 0.0) {
      for (double& v : col) v = -v;
    }
  }
  return out;
}

std::vector<double> reference_eigenvalues(const DenseMatrix& s) {
  const auto es = solve(s, false);
  std::vector<double> out(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  std::reverse(out.begin(), out.end());
  return out;
}

std::vector<double> reference_singular_values(const DenseMatrix& a) {
  const Eigen::BDCSVD<Eigen::MatrixXd> svd(to_eigen(a));
  const auto& s = svd.singularValues();
  return {s.data(), s.data() + s.size()};
}

}  // namespace ofrr
