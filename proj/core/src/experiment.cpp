#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <thread>

#include "ofrr/csr_matrix.hpp"
#include "ofrr/errors.hpp"
#include "ofrr/experiment.hpp"
#include "ofrr/kernel.hpp"
#include "ofrr/matrix_market.hpp"
#include "ofrr/random.hpp"
#include "ofrr/reference.hpp"
#include "ofrr/smallsolve.hpp"

namespace ofrr {

namespace {

using Clock = std::chrono::steady_clock;
using Job = std::function<ResultTable()>;

// Salt so the cross-kernel subsample does not reuse the point stream.
constexpr std::uint64_t kCrossSeedSalt = 0x9e3779b97f4a7c15ull;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

std::string fmt_g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

double relative_error(double value, double reference) {
  const double diff = std::fabs(value - reference);
  if (reference == 0.0) return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return diff / std::fabs(reference);
}

ResultRow base_row(const ExperimentSpec& spec, const std::string& matrix, const Cell& cell) {
  ResultRow r;
  r.experiment = spec.name;
  r.matrix = matrix;
  r.policy = cell.policy_label();
  r.basis_method = cell.method_label();
  r.projection = std::string(projection_name(cell.projection));
  return r;
}

std::string status_of(const std::exception& e) {
  if (dynamic_cast<const NumericalError*>(&e)) return "overflow";
  if (dynamic_cast<const EmptyBasisError*>(&e)) return "breakdown";
  return "error";
}

IterConfig cell_config(const ExperimentSpec& spec, const Cell& cell) {
  IterConfig cfg = spec.cfg;
  cfg.policy = cell.basis;
  cfg.projection = cell.projection;
  if (cell.method) cfg.basis_method = *cell.method;
  return cfg;
}

// Rows for a converged RitzSet: one per reported index, breakdown rows for
// indices the run could not deliver.
ResultTable ritz_rows(const ExperimentSpec& spec, const std::string& matrix, const Cell& cell,
                      const RitzSet& rs, const std::vector<double>& reference, double wall_ms) {
  const std::size_t want = spec.top ? spec.top : rs.size();
  ResultTable rows;
  for (std::size_t i = 0; i < want; ++i) {
    ResultRow r = base_row(spec, matrix, cell);
    r.index = i + 1;
    r.wall_ms = wall_ms;
    if (i < reference.size()) r.reference = reference[i];
    if (i < rs.size()) {
      r.value = rs.values[i];
      if (r.reference) r.rel_error = relative_error(rs.values[i], *r.reference);
      if (i < rs.residuals.size()) r.residual = rs.residuals[i];
    } else {
      r.status = "breakdown";
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

ResultTable failed_cell(const ExperimentSpec& spec, const std::string& matrix, const Cell& cell,
                        const std::exception& e, double wall_ms) {
  ResultRow r = base_row(spec, matrix, cell);
  r.status = status_of(e);
  r.wall_ms = wall_ms;
  return {r};
}

std::string kernel_label(const KernelSource& k, double l) {
  return "kernel(n=" + std::to_string(k.n) + ",f=" + fmt_g(k.f) + ",l=" + fmt_g(l) +
         ",s=" + fmt_g(k.s) + ")";
}

std::uint64_t kernel_seed(const ExperimentSpec& spec) {
  return spec.kernel.seed ? *spec.kernel.seed : spec.cfg.seed;
}

PointSet kernel_points(const ExperimentSpec& spec) {
  return sample_uniform_square(spec.kernel.n, spec.kernel.side_length(), kernel_seed(spec));
}

DenseMatrix square_kernel(const ExperimentSpec& spec, const PointSet& pts, double l) {
  KernelConfig kc;
  kc.f = spec.kernel.f;
  kc.l = l;
  kc.s = spec.kernel.s;
  kc.points = pts;
  return gaussian_kernel(kc, Format::F64);
}

std::vector<Job> eig_jobs(const ExperimentSpec& spec, const LinearOperator& base,
                          const std::string& matrix, std::shared_ptr<const std::vector<double>> reference,
                          bool krylov) {
  std::vector<Job> jobs;
  for (const Cell& cell : spec.cells) {
    jobs.push_back([&spec, base, matrix, reference, cell, krylov]() -> ResultTable {
      const auto t0 = Clock::now();
      try {
        const LinearOperator op = base.with_policy(cell.matvec);
        const IterConfig cfg = cell_config(spec, cell);
        const RitzSet rs = krylov ? krylov_eig(op, cfg) : subspace_iter_eig(op, cfg);
        return ritz_rows(spec, matrix, cell, rs, *reference, elapsed_ms(t0));
      } catch (const std::exception& e) {
        return failed_cell(spec, matrix, cell, e, elapsed_ms(t0));
      }
    });
  }
  return jobs;
}

std::vector<Job> kernel_eig_jobs(const ExperimentSpec& spec) {
  if (spec.cells.empty()) return {};
  const DenseMatrix a = square_kernel(spec, kernel_points(spec), spec.kernel.l);
  auto ref = std::make_shared<const std::vector<double>>(reference_eigenvalues(a));
  return eig_jobs(spec, LinearOperator(a, PrecisionPolicy::full(Format::F64)),
                  kernel_label(spec.kernel, spec.kernel.l), ref, false);
}

std::vector<Job> sparse_eig_jobs(const ExperimentSpec& spec) {
  if (spec.cells.empty()) return {};
  CsrMatrix a = read_matrix_market(spec.matrix_path);
  if (spec.rescale) a = spectral_rescale(a);
  auto ref = std::make_shared<const std::vector<double>>(reference_eigenvalues(a.to_dense()));
  const std::string label = std::filesystem::path(spec.matrix_path).stem().string();
  return eig_jobs(spec, LinearOperator(a, PrecisionPolicy::full(Format::F64)), label, ref, true);
}

std::vector<Job> kernel_svd_jobs(const ExperimentSpec& spec) {
  if (spec.cells.empty()) return {};
  KernelConfig kc;
  kc.f = spec.kernel.f;
  kc.l = spec.kernel.l;
  kc.s = 0.0;
  kc.points = kernel_points(spec);
  kc.cross_points = sample_without_replacement(kc.points, spec.kernel.cross_count,
                                               kernel_seed(spec) ^ kCrossSeedSalt);
  const DenseMatrix a = gaussian_kernel(kc, Format::F64);
  auto ref = std::make_shared<const std::vector<double>>(reference_singular_values(a));
  const std::string matrix = "cross-kernel(" + std::to_string(a.rows()) + "x" +
                             std::to_string(a.cols()) + ",f=" + fmt_g(kc.f) + ",l=" + fmt_g(kc.l) + ")";
  const LinearOperator base(a, PrecisionPolicy::full(Format::F64));

  std::vector<Job> jobs;
  for (const Cell& cell : spec.cells) {
    jobs.push_back([&spec, base, matrix, ref, cell]() -> ResultTable {
      const auto t0 = Clock::now();
      try {
        const RitzSet rs = subspace_iter_svd(base.with_policy(cell.matvec), cell_config(spec, cell));
        return ritz_rows(spec, matrix, cell, rs, *ref, elapsed_ms(t0));
      } catch (const std::exception& e) {
        return failed_cell(spec, matrix, cell, e, elapsed_ms(t0));
      }
    });
  }
  return jobs;
}

std::vector<Job> cond_study_jobs(const ExperimentSpec& spec) {
  if (spec.cells.empty()) return {};
  const PointSet pts = kernel_points(spec);
  std::vector<Job> jobs;
  for (double l : spec.lengthscales) {
    const LinearOperator base(square_kernel(spec, pts, l), PrecisionPolicy::full(Format::F64));
    const std::string matrix = kernel_label(spec.kernel, l);
    for (const Cell& cell : spec.cells) {
      jobs.push_back([&spec, base, matrix, cell]() -> ResultTable {
        const auto t0 = Clock::now();
        try {
          const IterConfig cfg = cell_config(spec, cell);
          const LinearOperator op = base.with_policy(cell.matvec);
          const DenseMatrix x = power_block(op, random_start(op.cols(), cfg.k, cfg), cfg);
          ResultRow r = base_row(spec, matrix, cell);
          if (cell.method) {
            const BasisFactorization b =
                build_block_basis(x, *cell.method, cfg.policy, {cfg.reorthogonalize});
            r.cond2 = cond2(b.q);
          } else {
            r.cond2 = cond2(x);
          }
          r.wall_ms = elapsed_ms(t0);
          return {r};
        } catch (const std::exception& e) {
          return failed_cell(spec, matrix, cell, e, elapsed_ms(t0));
        }
      });
    }
  }
  return jobs;
}

std::vector<Job> bench_jobs(const ExperimentSpec& spec) {
  std::vector<Job> jobs;
  for (const BenchSize& size : spec.bench_sizes) {
    const std::string matrix = "uniform(" + std::to_string(size.rows) + "x" + std::to_string(size.cols) + ")";
    for (const Cell& cell : spec.cells) {
      jobs.push_back([&spec, size, matrix, cell]() -> ResultTable {
        const auto t0 = Clock::now();
        try {
          if (!cell.method) throw ContractError("bench: a basis method is required");
          const DenseMatrix x = uniform_matrix(size.rows, size.cols, spec.cfg.seed, cell.basis.storage);
          std::vector<double> times;
          std::size_t width = 0;
          for (std::size_t rep = 0; rep < spec.repetitions; ++rep) {
            const auto start = Clock::now();
            const BasisFactorization b =
                build_block_basis(x, *cell.method, cell.basis, {spec.cfg.reorthogonalize});
            times.push_back(elapsed_ms(start));
            width = b.width();
          }
          std::nth_element(times.begin(), times.begin() + static_cast<std::ptrdiff_t>(times.size() / 2),
                           times.end());
          ResultRow r = base_row(spec, matrix, cell);
          r.value = static_cast<double>(width);
          r.wall_ms = times[times.size() / 2];
          return {r};
        } catch (const std::exception& e) {
          return failed_cell(spec, matrix, cell, e, elapsed_ms(t0));
        }
      });
    }
  }
  return jobs;
}

}  // namespace

ResultTable run_experiment(const ExperimentSpec& spec, unsigned threads) {
  spec.validate();
  std::vector<Job> jobs;
  switch (spec.kind) {
    case ExperimentKind::KernelEig: jobs = kernel_eig_jobs(spec); break;
    case ExperimentKind::SparseEig: jobs = sparse_eig_jobs(spec); break;
    case ExperimentKind::KernelSvd: jobs = kernel_svd_jobs(spec); break;
    case ExperimentKind::CondStudy: jobs = cond_study_jobs(spec); break;
    case ExperimentKind::Bench: jobs = bench_jobs(spec); break;
  }

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  // Timing runs share no cores.
  if (spec.kind == ExperimentKind::Bench) threads = 1;
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(jobs.size(), 1)));

  std::vector<ResultTable> results(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) results[i] = jobs[i]();
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  ResultTable table;
  for (auto& part : results) {
    std::move(part.begin(), part.end(), std::back_inserter(table));
  }
  return table;
}

}  // namespace ofrr
