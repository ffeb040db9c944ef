#pragma once

// Emulated floating-point formats and the mixed-precision scalar kernels every
// other module builds on. Values are carried as doubles; a Format tag says which
// set of values a double is allowed to hold, and round_to() is the only way a
// value moves between sets.

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>

namespace ofrr {

enum class Format : std::uint8_t { F16 = 0, F32 = 1, F64 = 2 };

constexpr double machine_epsilon(Format f) noexcept {
  switch (f) {
    case Format::F16: return 0x1p-10;
    case Format::F32: return 0x1p-23;
    case Format::F64: return 0x1p-52;
  }
  return 0.0;
}

constexpr double max_finite(Format f) noexcept {
  switch (f) {
    case Format::F16: return 65504.0;
    case Format::F32: return static_cast<double>(std::numeric_limits<float>::max());
    case Format::F64: return std::numeric_limits<double>::max();
  }
  return 0.0;
}

/// True when every value of `narrow` is also a value of `wide`.
constexpr bool at_least_as_wide(Format wide, Format narrow) noexcept {
  return static_cast<int>(wide) >= static_cast<int>(narrow);
}

constexpr Format wider_of(Format a, Format b) noexcept {
  return at_least_as_wide(a, b) ? a : b;
}

std::string_view format_name(Format f) noexcept;
std::optional<Format> parse_format(std::string_view name) noexcept;

namespace detail {

// Round-to-nearest-even onto the binary16 grid, straight from the double's bits
// so no intermediate binary32 rounding can occur.
inline double round_f16(double x) noexcept {
  constexpr std::uint64_t kSignMask = 0x8000'0000'0000'0000ull;
  constexpr std::uint64_t kMinNormal = 0x3F10'0000'0000'0000ull;  // 2^-14
  constexpr std::uint64_t kOverflow = 0x40F0'0000'0000'0000ull;   // 2^16
  constexpr std::uint64_t kInf = 0x7FF0'0000'0000'0000ull;
  constexpr int kDropped = 52 - 10;

  const std::uint64_t bits = std::bit_cast<std::uint64_t>(x);
  const std::uint64_t sign = bits & kSignMask;
  std::uint64_t mag = bits ^ sign;
  if (mag >= kInf) return x;  // inf or NaN
  if (mag >= kMinNormal) {
    const std::uint64_t half = (std::uint64_t{1} << (kDropped - 1)) - 1;
    mag += half + ((mag >> kDropped) & 1u);
    mag &= ~((std::uint64_t{1} << kDropped) - 1);
    if (mag >= kOverflow) mag = kInf;
    return std::bit_cast<double>(mag | sign);
  }
  // Subnormal binary16 range: fixed quantum 2^-24. The magic constant forces
  // the FPU's round-to-nearest-even onto integers; the scaling is exact.
  constexpr double kMagic = 0x1.8p52;
  const double scaled = std::bit_cast<double>(mag) * 0x1p24;
  const double rounded = ((scaled + kMagic) - kMagic) * 0x1p-24;
  return std::bit_cast<double>(std::bit_cast<std::uint64_t>(rounded) | sign);
}

inline double round_f32(double x) noexcept {
  return static_cast<double>(static_cast<float>(x));
}

}  // namespace detail

template <Format F>
inline double round_as(double x) noexcept {
  if constexpr (F == Format::F16) {
    return detail::round_f16(x);
  } else if constexpr (F == Format::F32) {
    return detail::round_f32(x);
  } else {
    return x;
  }
}

/// IEEE round-to-nearest-even of an FP64 value into `fmt`. Overflow goes to
/// +-inf, subnormals of the target are kept, NaN propagates.
inline double round_to(double x, Format fmt) noexcept {
  switch (fmt) {
    case Format::F16: return detail::round_f16(x);
    case Format::F32: return detail::round_f32(x);
    case Format::F64: return x;
  }
  return x;
}

/// Storage/compute/accumulate triple. Storage is what vectors and matrices hold,
/// compute is where products and quotients are rounded, accumulate is where
/// running sums live. drop_tol_factor scales eps(storage) into the column-drop
/// tolerance used by the basis builders.
///
/// With the default factor an exact copy of a column is not reliably dropped:
/// projecting it out of itself leaves a residual of 0.5 to 3 eps. A factor of
/// 4 covers that band.
inline constexpr double kDefaultDropTolFactor = 1.0;

struct PrecisionPolicy {
  Format storage = Format::F64;
  Format compute = Format::F64;
  Format accumulate = Format::F64;
  double drop_tol_factor = kDefaultDropTolFactor;

  static constexpr PrecisionPolicy native_half() noexcept {
    return {Format::F16, Format::F16, Format::F16, kDefaultDropTolFactor};
  }
  /// FP16 storage with FP32 products and sums: every result is computed in
  /// FP32 and then truncated to FP16.
  static constexpr PrecisionPolicy half_f32() noexcept {
    return {Format::F16, Format::F32, Format::F32, kDefaultDropTolFactor};
  }
  static constexpr PrecisionPolicy mixed_half() noexcept {
    return {Format::F16, Format::F16, Format::F32, kDefaultDropTolFactor};
  }
  static constexpr PrecisionPolicy full(Format f) noexcept { return {f, f, f, kDefaultDropTolFactor}; }

  double drop_tolerance() const noexcept { return drop_tol_factor * machine_epsilon(storage); }

  bool is_valid() const noexcept {
    return at_least_as_wide(accumulate, compute) && at_least_as_wide(compute, storage) &&
           drop_tol_factor >= 0.0 && std::isfinite(drop_tol_factor);
  }

  friend bool operator==(const PrecisionPolicy&, const PrecisionPolicy&) = default;
};

/// "native-half", "mixed-half", "f32", "f64"; anything else is rendered as
/// "custom(storage/compute/accumulate)".
std::string preset_name(const PrecisionPolicy& policy);
std::optional<PrecisionPolicy> parse_preset(std::string_view name) noexcept;

template <Format C, Format A>
struct ArithTag {
  static constexpr Format compute = C;
  static constexpr Format accumulate = A;
};

/// Calls fn(ArithTag<C, A>{}) with the policy's compute/accumulate formats
/// lifted to compile time so hot loops carry no per-element branching.
template <class Fn>
decltype(auto) dispatch_arith(const PrecisionPolicy& policy, Fn&& fn) {
  using enum Format;
  switch (policy.compute) {
    case F16:
      switch (policy.accumulate) {
        case F16: return fn(ArithTag<F16, F16>{});
        case F32: return fn(ArithTag<F16, F32>{});
        case F64: return fn(ArithTag<F16, F64>{});
      }
      break;
    case F32:
      if (policy.accumulate == F32) return fn(ArithTag<F32, F32>{});
      return fn(ArithTag<F32, F64>{});
    case F64:
      break;
  }
  return fn(ArithTag<F64, F64>{});
}

/// Sequential dot product with explicit rounding: each product is rounded to
/// the compute format, and each partial sum to the accumulate format.
template <Format C, Format A>
struct MixedAccumulator {
  double sum = 0.0;
  void add(double a, double b) noexcept { sum = round_as<A>(sum + round_as<C>(a * b)); }
};

template <Format C, Format A>
inline double mixed_dot_kernel(const double* x, const double* y, std::size_t n) noexcept {
  MixedAccumulator<C, A> acc;
  for (std::size_t i = 0; i < n; ++i) acc.add(x[i], y[i]);
  return acc.sum;
}

/// Index-ascending dot product under `policy`. Returns the accumulator value,
/// i.e. a value of the accumulate format; a caller writing it to storage
/// rounds it there. Throws ContractError on length mismatch.
double mixed_dot(std::span<const double> x, std::span<const double> y,
                 const PrecisionPolicy& policy);

/// ||x||_inf * ||x / ||x||_inf||_2 evaluated under `policy`; exact 0 for the
/// zero vector. Result is a compute-format value.
double safe_norm2(std::span<const double> x, const PrecisionPolicy& policy);

/// y <- y + alpha * x, product and sum rounded to compute, result stored.
void mixed_axpy(double alpha, std::span<const double> x, std::span<double> y,
                const PrecisionPolicy& policy);

/// x <- x / divisor, quotient rounded to compute, result stored.
void mixed_divide(std::span<double> x, double divisor, const PrecisionPolicy& policy);

/// Largest |x_i|; NaN entries are returned as NaN.
double inf_norm(std::span<const double> x) noexcept;

}  // namespace ofrr
