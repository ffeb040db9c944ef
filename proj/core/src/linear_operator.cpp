#include "ofrr/linear_operator.hpp"

#include <cmath>
#include <numeric>

#include "ofrr/errors.hpp"

namespace ofrr {

namespace {

double csr_frobenius(const CsrMatrix& a) {
  return std::sqrt(std::inner_product(a.values.begin(), a.values.end(), a.values.begin(), 0.0));
}

void require_finite(const DenseMatrix& y, const char* what) {
  if (!y.all_finite()) throw NumericalError(std::string(what) + ": non-finite entry (overflow)");
}

DenseMatrix csr_apply(const CsrMatrix& a, const DenseMatrix& x, const PrecisionPolicy& policy) {
  DenseMatrix y(a.n, x.cols(), policy.storage);
  for (std::size_t j = 0; j < x.cols(); ++j) {
    const SpmvResult r = spmv(a, x.col(j), policy);
    std::copy(r.values.begin(), r.values.end(), y.col(j).begin());
  }
  return y;
}

// The operator holds A in the compute format: the named presets all compute at
// storage precision, while a wider compute format (FP16 vectors, FP32
// arithmetic) reads A at that wider precision and truncates only the result.
Format matrix_format(const PrecisionPolicy& policy) { return policy.compute; }

}  // namespace

LinearOperator::LinearOperator(std::shared_ptr<const Storage> storage, std::size_t rows,
                               std::size_t cols, double frobenius, const PrecisionPolicy& policy)
    : storage_(std::move(storage)), rows_(rows), cols_(cols), frobenius_(frobenius), policy_(policy) {}

LinearOperator::LinearOperator(const DenseMatrix& a, const PrecisionPolicy& policy)
    : rows_(a.rows()), cols_(a.cols()), frobenius_(a.frobenius_norm()), policy_(policy) {
  if (!policy.is_valid()) throw ContractError("LinearOperator: invalid precision policy");
  Dense d;
  d.source = a.rounded(Format::F64);
  d.source_rows = d.source.transposed();
  d.stored = d.source.rounded(matrix_format(policy));
  d.stored_rows = d.stored.transposed();
  storage_ = std::make_shared<const Storage>(std::move(d));
}

LinearOperator::LinearOperator(const CsrMatrix& a, const PrecisionPolicy& policy)
    : rows_(a.n), cols_(a.n), frobenius_(csr_frobenius(a)), policy_(policy) {
  if (!policy.is_valid()) throw ContractError("LinearOperator: invalid precision policy");
  if (!a.is_well_formed()) throw ContractError("LinearOperator: malformed CSR matrix");
  Sparse s;
  s.source = a.rounded(Format::F64);
  s.stored = a.rounded(matrix_format(policy));
  storage_ = std::make_shared<const Storage>(std::move(s));
}

bool LinearOperator::is_sparse() const noexcept {
  return storage_ && std::holds_alternative<Sparse>(*storage_);
}

std::shared_ptr<const LinearOperator::Storage> LinearOperator::restore(const Storage& src,
                                                                       const PrecisionPolicy& policy) {
  if (const auto* d = std::get_if<Dense>(&src)) {
    Dense out = *d;
    out.stored = d->source.rounded(matrix_format(policy));
    out.stored_rows = out.stored.transposed();
    return std::make_shared<const Storage>(std::move(out));
  }
  const auto& s = std::get<Sparse>(src);
  return std::make_shared<const Storage>(Sparse{s.source, s.source.rounded(matrix_format(policy))});
}

LinearOperator LinearOperator::with_policy(const PrecisionPolicy& policy) const {
  if (!policy.is_valid()) throw ContractError("LinearOperator: invalid precision policy");
  if (!storage_) throw ContractError("LinearOperator: empty operator");
  if (matrix_format(policy) == matrix_format(policy_)) {
    return LinearOperator(storage_, rows_, cols_, frobenius_, policy);
  }
  return LinearOperator(restore(*storage_, policy), rows_, cols_, frobenius_, policy);
}

DenseMatrix LinearOperator::apply(const DenseMatrix& x) const {
  if (x.rows() != cols_) throw ContractError("LinearOperator::apply: dimension mismatch");
  const DenseMatrix xs = x.rounded(policy_.storage);
  DenseMatrix y;
  if (const auto* d = std::get_if<Dense>(storage_.get())) {
    y = mixed_gemm_tn(d->stored_rows, xs, policy_, policy_.storage);
  } else {
    y = csr_apply(std::get<Sparse>(*storage_).stored, xs, policy_);
  }
  require_finite(y, "matvec");
  return y;
}

DenseMatrix LinearOperator::apply_transpose(const DenseMatrix& x) const {
  if (x.rows() != rows_) throw ContractError("LinearOperator::apply_transpose: dimension mismatch");
  const DenseMatrix xs = x.rounded(policy_.storage);
  DenseMatrix y;
  if (const auto* d = std::get_if<Dense>(storage_.get())) {
    y = mixed_gemm_tn(d->stored, xs, policy_, policy_.storage);
  } else {
    // Sparse operators are symmetric by construction.
    y = csr_apply(std::get<Sparse>(*storage_).stored, xs, policy_);
  }
  require_finite(y, "transpose matvec");
  return y;
}

DenseMatrix LinearOperator::apply_exact(const DenseMatrix& x) const {
  if (x.rows() != cols_) throw ContractError("LinearOperator::apply_exact: dimension mismatch");
  const DenseMatrix x64 = x.rounded(Format::F64);
  if (const auto* d = std::get_if<Dense>(storage_.get())) return matmul_tn(d->source_rows, x64);
  return csr_apply(std::get<Sparse>(*storage_).source, x64, PrecisionPolicy::full(Format::F64));
}

DenseMatrix LinearOperator::apply_transpose_exact(const DenseMatrix& x) const {
  if (x.rows() != rows_) throw ContractError("LinearOperator::apply_transpose_exact: dimension mismatch");
  const DenseMatrix x64 = x.rounded(Format::F64);
  if (const auto* d = std::get_if<Dense>(storage_.get())) return matmul_tn(d->source, x64);
  return csr_apply(std::get<Sparse>(*storage_).source, x64, PrecisionPolicy::full(Format::F64));
}

DenseMatrix LinearOperator::to_dense() const {
  if (const auto* d = std::get_if<Dense>(storage_.get())) return d->source;
  return std::get<Sparse>(*storage_).source.to_dense();
}

}  // namespace ofrr
