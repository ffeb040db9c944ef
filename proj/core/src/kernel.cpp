#include "ofrr/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "ofrr/errors.hpp"
#include "ofrr/random.hpp"

namespace ofrr {

PointSet sample_uniform_square(std::size_t n, double side, std::uint64_t seed) {
  if (n == 0) throw ContractError("sample_uniform_square: n must be positive");
  if (!(side >= 0.0)) throw ContractError("sample_uniform_square: side must be non-negative");
  Rng rng(seed);
  PointSet ps;
  ps.dim = 2;
  ps.coords.resize(2 * n);
  for (double& c : ps.coords) c = side * rng.uniform01();
  return ps;
}

PointSet sample_without_replacement(const PointSet& points, std::size_t count,
                                    std::uint64_t seed) {
  const std::size_t n = points.size();
  if (count > n) throw ContractError("sample_without_replacement: count exceeds population");
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Rng rng(seed);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(idx[i], idx[j]);
  }
  PointSet out;
  out.dim = points.dim;
  out.coords.reserve(count * points.dim);
  for (std::size_t i = 0; i < count; ++i) {
    auto p = points.point(idx[i]);
    out.coords.insert(out.coords.end(), p.begin(), p.end());
  }
  return out;
}

namespace {

bool all_finite(const PointSet& ps) {
  return std::all_of(ps.coords.begin(), ps.coords.end(), [](double v) { return std::isfinite(v); });
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t d = 0; d < a.size(); ++d) {
    const double t = a[d] - b[d];
    s += t * t;
  }
  return s;
}

}  // namespace

bool KernelConfig::is_valid() const noexcept {
  if (!(l > 0.0) || !(s >= 0.0) || !std::isfinite(f) || points.dim == 0) return false;
  if (points.coords.size() % points.dim != 0 || !all_finite(points)) return false;
  if (cross_points) {
    if (cross_points->dim != points.dim || !all_finite(*cross_points)) return false;
  }
  return true;
}

DenseMatrix gaussian_kernel(const KernelConfig& cfg, Format fmt) {
  if (!cfg.is_valid()) throw ContractError("gaussian_kernel: invalid kernel configuration");
  const double inv_two_l2 = 1.0 / (2.0 * cfg.l * cfg.l);
  const PointSet& xs = cfg.points;

  if (cfg.cross_points) {
    const PointSet& ys = *cfg.cross_points;
    DenseMatrix a(xs.size(), ys.size(), fmt);
    for (std::size_t j = 0; j < ys.size(); ++j) {
      for (std::size_t i = 0; i < xs.size(); ++i) {
        const double v = cfg.f * std::exp(-squared_distance(xs.point(i), ys.point(j)) * inv_two_l2);
        a(i, j) = round_to(v, fmt);
      }
    }
    return a;
  }

  const std::size_t n = xs.size();
  DenseMatrix a(n, n, fmt);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = j; i < n; ++i) {
      double v = std::exp(-squared_distance(xs.point(i), xs.point(j)) * inv_two_l2);
      if (i == j) v += cfg.s;
      v = round_to(cfg.f * v, fmt);
      a(i, j) = v;
      a(j, i) = v;
    }
  }
  return a;
}

void write_points_csv(std::ostream& out, const PointSet& points) {
  const auto old_precision = out.precision(17);
  for (std::size_t i = 0; i < points.size(); ++i) {
    auto p = points.point(i);
    for (std::size_t d = 0; d < p.size(); ++d) {
      if (d) out << ',';
      out << p[d];
    }
    out << '\n';
  }
  out.precision(old_precision);
}

}  // namespace ofrr
