#include "ofrr/precision.hpp"

#include <algorithm>

#include "ofrr/errors.hpp"

namespace ofrr {

std::string_view format_name(Format f) noexcept {
  switch (f) {
    case Format::F16: return "f16";
    case Format::F32: return "f32";
    case Format::F64: return "f64";
  }
  return "?";
}

std::optional<Format> parse_format(std::string_view name) noexcept {
  if (name == "f16" || name == "F16" || name == "half") return Format::F16;
  if (name == "f32" || name == "F32" || name == "single") return Format::F32;
  if (name == "f64" || name == "F64" || name == "double") return Format::F64;
  return std::nullopt;
}

std::string preset_name(const PrecisionPolicy& p) {
  const PrecisionPolicy plain{p.storage, p.compute, p.accumulate, kDefaultDropTolFactor};
  if (plain == PrecisionPolicy::native_half()) return "native-half";
  if (plain == PrecisionPolicy::mixed_half()) return "mixed-half";
  if (plain == PrecisionPolicy::half_f32()) return "half-f32";
  if (plain == PrecisionPolicy::full(Format::F32)) return "f32";
  if (plain == PrecisionPolicy::full(Format::F64)) return "f64";
  std::string out = "custom(";
  out += format_name(p.storage);
  out += '/';
  out += format_name(p.compute);
  out += '/';
  out += format_name(p.accumulate);
  out += ')';
  return out;
}

std::optional<PrecisionPolicy> parse_preset(std::string_view name) noexcept {
  if (name == "native-half" || name == "half-half" || name == "f16") {
    return PrecisionPolicy::native_half();
  }
  if (name == "mixed-half") return PrecisionPolicy::mixed_half();
  if (name == "half-f32") return PrecisionPolicy::half_f32();
  if (name == "f32" || name == "single") return PrecisionPolicy::full(Format::F32);
  if (name == "f64" || name == "double") return PrecisionPolicy::full(Format::F64);
  return std::nullopt;
}

double mixed_dot(std::span<const double> x, std::span<const double> y,
                 const PrecisionPolicy& policy) {
  if (x.size() != y.size()) throw ContractError("mixed_dot: length mismatch");
  return dispatch_arith(policy, [&](auto tag) {
    using T = decltype(tag);
    return mixed_dot_kernel<T::compute, T::accumulate>(x.data(), y.data(), x.size());
  });
}

double inf_norm(std::span<const double> x) noexcept {
  double m = 0.0;
  for (double v : x) {
    const double a = std::fabs(v);
    if (std::isnan(a)) return a;
    m = std::max(m, a);
  }
  return m;
}

double safe_norm2(std::span<const double> x, const PrecisionPolicy& policy) {
  const double scale = inf_norm(x);
  if (scale == 0.0 || !std::isfinite(scale)) return scale;
  return dispatch_arith(policy, [&](auto tag) {
    using T = decltype(tag);
    constexpr Format C = T::compute;
    MixedAccumulator<C, T::accumulate> acc;
    for (double v : x) {
      const double y = round_as<C>(v / scale);
      acc.add(y, y);
    }
    const double root = round_as<C>(std::sqrt(acc.sum));
    return round_as<C>(scale * root);
  });
}

void mixed_axpy(double alpha, std::span<const double> x, std::span<double> y,
                const PrecisionPolicy& policy) {
  if (x.size() != y.size()) throw ContractError("mixed_axpy: length mismatch");
  const Format storage = policy.storage;
  dispatch_arith(policy, [&](auto tag) {
    constexpr Format C = decltype(tag)::compute;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double t = round_as<C>(y[i] + round_as<C>(alpha * x[i]));
      y[i] = round_to(t, storage);
    }
  });
}

void mixed_divide(std::span<double> x, double divisor, const PrecisionPolicy& policy) {
  const Format storage = policy.storage;
  dispatch_arith(policy, [&](auto tag) {
    constexpr Format C = decltype(tag)::compute;
    for (double& v : x) v = round_to(round_as<C>(v / divisor), storage);
  });
}

}  // namespace ofrr
