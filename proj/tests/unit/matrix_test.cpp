#include <cmath>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "f16_oracle.hpp"
#include "ofrr/csr_matrix.hpp"
#include "ofrr/dense_matrix.hpp"
#include "ofrr/errors.hpp"
#include "ofrr/kernel.hpp"
#include "ofrr/linear_operator.hpp"
#include "ofrr/matrix_market.hpp"
#include "ofrr/random.hpp"
#include "ofrr/reference.hpp"

namespace {

using ofrr::CsrMatrix;
using ofrr::DenseMatrix;
using ofrr::Format;
using ofrr::PrecisionPolicy;

const PrecisionPolicy kF64 = PrecisionPolicy::full(Format::F64);

CsrMatrix parse_mtx(const std::string& text) {
  std::istringstream in(text);
  return ofrr::read_matrix_market(in);
}

TEST(DenseMatrix, FromRowsIsColumnMajor) {
  const std::vector<double> rows{1, 2, 3, 4, 5, 6};
  const DenseMatrix a = DenseMatrix::from_rows(2, 3, rows);
  EXPECT_EQ(a(0, 2), 3.0);
  EXPECT_EQ(a(1, 0), 4.0);
  EXPECT_EQ(a.col(1)[1], 5.0);
}

TEST(DenseMatrix, FromValuesRounds) {
  const std::vector<double> v{1.0 + std::ldexp(1.0, -11), 7e4};
  const DenseMatrix a = DenseMatrix::from_values(2, 1, v, Format::F16);
  EXPECT_EQ(a(0, 0), 1.0);
  EXPECT_TRUE(std::isinf(a(1, 0)));
  EXPECT_FALSE(a.all_finite());
}

TEST(MixedGemm, IdentityReRounds) {
  const DenseMatrix b = ofrr::uniform_matrix(4, 3, 1);
  const DenseMatrix c = ofrr::mixed_gemm(DenseMatrix::identity(4), b, kF64, Format::F16);
  EXPECT_EQ(c, b.rounded(Format::F16));
}

TEST(MixedGemm, OneByOneIsDot) {
  const std::vector<double> x{0.3, -1.7, 2.2};
  const std::vector<double> y{1.1, 0.4, -0.9};
  const DenseMatrix a = DenseMatrix::from_values(1, 3, x);
  const DenseMatrix b = DenseMatrix::from_values(3, 1, y);
  for (const auto& p : {PrecisionPolicy::native_half(), PrecisionPolicy::mixed_half(), kF64}) {
    EXPECT_EQ(ofrr::mixed_gemm(a, b, p, Format::F64)(0, 0), ofrr::mixed_dot(x, y, p));
  }
}

TEST(MixedGemm, HalfStorageMatchesOracleEntrywise) {
  const std::vector<double> av{0.7, -1.3, 2.9, 0.11};
  const std::vector<double> bv{1.5, 0.25, -3.1, 0.9};
  const DenseMatrix a = DenseMatrix::from_rows(2, 2, av, Format::F16);
  const DenseMatrix b = DenseMatrix::from_rows(2, 2, bv, Format::F16);
  const PrecisionPolicy p = PrecisionPolicy::mixed_half();
  const DenseMatrix c = ofrr::mixed_gemm(a, b, p, Format::F16);
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      const std::vector<double> row{a(i, 0), a(i, 1)};
      const std::vector<double> col{b(0, j), b(1, j)};
      EXPECT_EQ(c(i, j), oracle::round_f16(oracle::dot(row, col, p)));
    }
  }
}

TEST(MixedGemm, DimensionMismatchThrows) {
  EXPECT_THROW(ofrr::mixed_gemm(DenseMatrix(2, 3), DenseMatrix(2, 3), kF64, Format::F64),
               ofrr::ContractError);
}

TEST(Sampling, DegenerateSquare) {
  const auto p = ofrr::sample_uniform_square(1, 0.0, 9);
  ASSERT_EQ(p.size(), 1u);
  EXPECT_EQ(p.point(0)[0], 0.0);
  EXPECT_EQ(p.point(0)[1], 0.0);
}

TEST(Sampling, DeterministicAndUniform) {
  const double side = std::sqrt(1000.0);
  const auto a = ofrr::sample_uniform_square(1000, side, 42);
  const auto b = ofrr::sample_uniform_square(1000, side, 42);
  EXPECT_EQ(a, b);
  double mean = 0.0;
  for (double c : a.coords) {
    EXPECT_GE(c, 0.0);
    EXPECT_LE(c, side);
    mean += c;
  }
  mean /= static_cast<double>(a.coords.size());
  const double sigma = side / std::sqrt(12.0) / std::sqrt(static_cast<double>(a.coords.size()));
  EXPECT_LE(std::fabs(mean - side / 2), 3 * sigma);
}

TEST(Sampling, WithoutReplacementIsSubset) {
  const auto pts = ofrr::sample_uniform_square(50, 1.0, 1);
  const auto sub = ofrr::sample_without_replacement(pts, 20, 2);
  ASSERT_EQ(sub.size(), 20u);
  std::vector<bool> taken(50, false);
  for (std::size_t i = 0; i < sub.size(); ++i) {
    bool found = false;
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if (pts.point(j)[0] == sub.point(i)[0] && pts.point(j)[1] == sub.point(i)[1]) {
        EXPECT_FALSE(taken[j]);
        taken[j] = found = true;
      }
    }
    EXPECT_TRUE(found);
  }
}

TEST(Kernel, Examples) {
  ofrr::KernelConfig cfg;
  cfg.f = 1.0;
  cfg.l = 5.0;
  cfg.s = 0.01;
  cfg.points.coords = {0.0, 0.0, 3.0, 4.0};
  const DenseMatrix a = ofrr::gaussian_kernel(cfg);
  EXPECT_DOUBLE_EQ(a(0, 0), 1.01);
  EXPECT_NEAR(a(0, 1), std::exp(-0.5), 1e-15);
  EXPECT_NEAR(a(0, 1), 0.606531, 1e-6);
  EXPECT_EQ(a(0, 1), a(1, 0));

  cfg.points.coords = {0.0, 0.0, 1e3, 0.0};
  cfg.s = 0.0;
  EXPECT_EQ(ofrr::gaussian_kernel(cfg)(0, 1), 0.0);
}

TEST(Kernel, CrossKernelOmitsVariance) {
  ofrr::KernelConfig cfg;
  cfg.l = 5.0;
  cfg.s = 0.5;
  cfg.points.coords = {0.0, 0.0, 1.0, 1.0, 2.0, 2.0};
  ofrr::PointSet ys;
  ys.coords = {0.0, 0.0, 3.0, 4.0};
  cfg.cross_points = ys;
  const DenseMatrix a = ofrr::gaussian_kernel(cfg);
  ASSERT_EQ(a.rows(), 3u);
  ASSERT_EQ(a.cols(), 2u);
  EXPECT_EQ(a(0, 0), 1.0);
  EXPECT_NEAR(a(0, 1), std::exp(-0.5), 1e-15);
}

TEST(Kernel, RoundedOnceIntoTarget) {
  ofrr::KernelConfig cfg;
  cfg.l = 2.0;
  cfg.points = ofrr::sample_uniform_square(30, 5.0, 3);
  const DenseMatrix a64 = ofrr::gaussian_kernel(cfg, Format::F64);
  EXPECT_EQ(ofrr::gaussian_kernel(cfg, Format::F16), a64.rounded(Format::F16));
}

TEST(Kernel, PositiveSemidefinite) {
  ofrr::KernelConfig cfg;
  cfg.l = 3.0;
  cfg.points = ofrr::sample_uniform_square(60, 10.0, 4);
  const DenseMatrix a = ofrr::gaussian_kernel(cfg);
  const auto ev = ofrr::reference_eigenvalues(a);
  EXPECT_GE(ev.back(), -60 * 0x1p-52 * a.frobenius_norm());
}

TEST(Kernel, InvalidConfigThrows) {
  ofrr::KernelConfig cfg;
  cfg.l = 0.0;
  cfg.points.coords = {0.0, 0.0};
  EXPECT_THROW(ofrr::gaussian_kernel(cfg), ofrr::ContractError);
  cfg.l = 1.0;
  cfg.points.coords = {0.0, std::nan("")};
  EXPECT_THROW(ofrr::gaussian_kernel(cfg), ofrr::ContractError);
}

TEST(MatrixMarket, SymmetryExpansion) {
  const CsrMatrix a = parse_mtx(
      "%%MatrixMarket matrix coordinate real symmetric\n"
      "% comment\n"
      "2 2 1\n"
      "2 1 3.5\n");
  EXPECT_EQ(a.n, 2u);
  EXPECT_EQ(a.nnz(), 2u);
  const DenseMatrix d = a.to_dense();
  EXPECT_EQ(d(0, 1), 3.5);
  EXPECT_EQ(d(1, 0), 3.5);
  EXPECT_TRUE(a.is_symmetric());
  EXPECT_TRUE(a.is_well_formed());
}

TEST(MatrixMarket, DiagonalOnly) {
  const CsrMatrix a = parse_mtx(
      "%%MatrixMarket matrix coordinate real symmetric\n"
      "3 3 3\n1 1 1\n2 2 2\n3 3 3\n");
  const DenseMatrix d = a.to_dense();
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(d(i, j), i == j ? double(i + 1) : 0.0);
  }
}

TEST(MatrixMarket, DuplicatesSummed) {
  const CsrMatrix a = parse_mtx(
      "%%MatrixMarket matrix coordinate real symmetric\n"
      "2 2 3\n1 1 1\n1 1 2\n2 1 1\n");
  EXPECT_EQ(a.to_dense()(0, 0), 3.0);
}

TEST(MatrixMarket, ErrorsNameTheLine) {
  auto line_of = [](const std::string& text) -> std::size_t {
    try {
      parse_mtx(text);
    } catch (const ofrr::ParseError& e) {
      return e.line();
    }
    return 0;
  };
  EXPECT_EQ(line_of("%%MatrixMarket matrix coordinate complex symmetric\n1 1 1\n1 1 1 0\n"), 1u);
  EXPECT_EQ(line_of("%%MatrixMarket matrix coordinate real general\n1 1 1\n1 1 1\n"), 1u);
  EXPECT_EQ(line_of("not a header\n"), 1u);
  EXPECT_EQ(line_of("%%MatrixMarket matrix coordinate real symmetric\n%c\n2 2 1\n3 1 1.0\n"), 4u);
  EXPECT_EQ(line_of("%%MatrixMarket matrix coordinate real symmetric\n2 2 2\n1 1 x\n"), 3u);
  EXPECT_EQ(line_of("%%MatrixMarket matrix coordinate real symmetric\n2 two 2\n"), 2u);
}

TEST(MatrixMarket, SpmvOnUnitVectorsReproducesColumns) {
  const CsrMatrix a = parse_mtx(
      "%%MatrixMarket matrix coordinate real symmetric\n"
      "4 4 6\n1 1 4\n2 1 -1\n3 2 2.5\n4 4 1\n4 1 0.5\n3 3 7\n");
  const DenseMatrix d = a.to_dense();
  for (std::size_t j = 0; j < 4; ++j) {
    std::vector<double> e(4, 0.0);
    e[j] = 1.0;
    const auto y = ofrr::spmv(a, e, kF64);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(y.values[i], d(i, j));
  }
}

TEST(Spmv, Examples) {
  const std::vector<std::size_t> r{0, 0, 1, 1}, c{0, 1, 0, 1};
  const std::vector<double> v{2, 1, 1, 1};
  const CsrMatrix a = CsrMatrix::from_triplets(2, r, c, v);
  const std::vector<double> x{1, 1};
  const auto y = ofrr::spmv(a, x, kF64);
  EXPECT_EQ(y.values, (std::vector<double>{3, 2}));
  EXPECT_EQ(y.non_finite, 0u);

  const std::vector<std::size_t> ri{0, 1}, ci{0, 1};
  const std::vector<double> ones{1, 1};
  const CsrMatrix eye = CsrMatrix::from_triplets(2, ri, ci, ones);
  const std::vector<double> z{0.1, 1.0 + std::ldexp(1.0, -11)};
  const auto w = ofrr::spmv(eye, z, PrecisionPolicy::native_half());
  EXPECT_EQ(w.values[0], oracle::round_f16(0.1));
  EXPECT_EQ(w.values[1], 1.0);
}

TEST(Spmv, HalfStorageMatrixEntry) {
  const std::vector<std::size_t> r{0}, c{0};
  const std::vector<double> v{1.0 + std::ldexp(1.0, -11)};
  const CsrMatrix a = CsrMatrix::from_triplets(1, r, c, v);
  const std::vector<double> x{3.0};
  EXPECT_EQ(ofrr::spmv(a, x, PrecisionPolicy::native_half()).values[0], 3.0);
}

TEST(Spmv, FlagsOverflow) {
  const std::vector<std::size_t> r{0}, c{0};
  const std::vector<double> v{300.0};
  const CsrMatrix a = CsrMatrix::from_triplets(1, r, c, v);
  const std::vector<double> x{300.0};
  EXPECT_EQ(ofrr::spmv(a, x, PrecisionPolicy::native_half()).non_finite, 1u);
}

TEST(SpectralRescale, Examples) {
  const std::vector<std::size_t> idx{0, 1};
  const std::vector<double> ones{1, 1};
  const CsrMatrix eye = CsrMatrix::from_triplets(2, idx, idx, ones);
  const CsrMatrix s = ofrr::spectral_rescale(eye);
  EXPECT_NEAR(s.values[0], 64.0, 1e-8);
  EXPECT_NEAR(s.values[1], 64.0, 1e-8);

  const std::vector<double> d{200, 2};
  const CsrMatrix a = CsrMatrix::from_triplets(2, idx, idx, d);
  const CsrMatrix r = ofrr::spectral_rescale(a);
  EXPECT_NEAR(r.values[0], 64.0, 64.0 * 1e-8);
  EXPECT_NEAR(r.values[1], 0.64, 0.64 * 1e-8);

  const CsrMatrix zero = CsrMatrix::from_triplets(2, idx, idx, std::vector<double>{0, 0});
  EXPECT_EQ(ofrr::spectral_rescale(zero), zero);
}

TEST(SpectralRescale, PreservesDominantDirection) {
  ofrr::KernelConfig cfg;
  cfg.l = 2.0;
  cfg.s = 0.1;
  cfg.points = ofrr::sample_uniform_square(40, 6.0, 8);
  const CsrMatrix a = CsrMatrix::from_dense(ofrr::gaussian_kernel(cfg));
  const CsrMatrix s = ofrr::spectral_rescale(a);
  const auto va = ofrr::power_iteration(a).vector;
  const auto vs = ofrr::power_iteration(s).vector;
  double dot = 0.0;
  for (std::size_t i = 0; i < va.size(); ++i) dot += va[i] * vs[i];
  EXPECT_NEAR(std::fabs(dot), 1.0, 1e-8);
  const auto ev = ofrr::reference_eigenvalues(s.to_dense());
  EXPECT_LT(ev.front(), 100.0);
}

TEST(LinearOperator, DenseAndSparseAgree) {
  ofrr::KernelConfig cfg;
  cfg.l = 1.5;
  cfg.points = ofrr::sample_uniform_square(25, 4.0, 12);
  const DenseMatrix a = ofrr::gaussian_kernel(cfg);
  const DenseMatrix x = ofrr::uniform_matrix(25, 3, 5);
  for (const auto& p : {PrecisionPolicy::native_half(), PrecisionPolicy::mixed_half(), kF64}) {
    const ofrr::LinearOperator dense(a, p);
    const ofrr::LinearOperator sparse(CsrMatrix::from_dense(a), p);
    EXPECT_EQ(dense.apply(x), sparse.apply(x));
  }
}

TEST(LinearOperator, EntriesAreMixedDots) {
  const DenseMatrix a = ofrr::uniform_matrix(6, 4, 1);
  const DenseMatrix x = ofrr::uniform_matrix(4, 2, 2);
  const PrecisionPolicy p = PrecisionPolicy::mixed_half();
  const ofrr::LinearOperator op(a, p);
  const DenseMatrix y = op.apply(x);
  EXPECT_EQ(y.format(), Format::F16);
  const DenseMatrix a16 = a.rounded(Format::F16);
  const DenseMatrix x16 = x.rounded(Format::F16);
  for (std::size_t i = 0; i < 6; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      std::vector<double> row(4);
      for (std::size_t l = 0; l < 4; ++l) row[l] = a16(i, l);
      EXPECT_EQ(y(i, j), oracle::round_f16(oracle::dot(row, x16.col(j), p)));
    }
  }
  const DenseMatrix yt = op.apply_transpose(ofrr::uniform_matrix(6, 1, 3));
  EXPECT_EQ(yt.rows(), 4u);
  EXPECT_EQ(op.with_policy(kF64).apply(x), ofrr::matmul(a, x));
}

TEST(LinearOperator, HalfF32HoldsSingleMatrix) {
  const DenseMatrix a = ofrr::uniform_matrix(6, 4, 4);
  const DenseMatrix x = ofrr::uniform_matrix(4, 1, 5);
  const PrecisionPolicy p = PrecisionPolicy::half_f32();
  const DenseMatrix y = ofrr::LinearOperator(a, p).apply(x);
  const DenseMatrix a32 = a.rounded(Format::F32);
  const DenseMatrix x16 = x.rounded(Format::F16);
  for (std::size_t i = 0; i < 6; ++i) {
    std::vector<double> row(4);
    for (std::size_t l = 0; l < 4; ++l) row[l] = a32(i, l);
    EXPECT_EQ(y(i, 0), oracle::round_f16(oracle::dot(row, x16.col(0), p)));
  }
}

TEST(LinearOperator, OverflowThrows) {
  const DenseMatrix a = DenseMatrix::from_values(1, 1, std::vector<double>{300.0});
  const ofrr::LinearOperator op(a, PrecisionPolicy::native_half());
  EXPECT_THROW(op.apply(a), ofrr::NumericalError);
}

}  // namespace
