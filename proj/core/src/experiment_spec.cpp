#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <stdexcept>

#include "ofrr/errors.hpp"
#include "ofrr/experiment.hpp"

namespace ofrr {

namespace {

constexpr std::pair<ExperimentKind, std::string_view> kKinds[] = {
    {ExperimentKind::KernelEig, "kernel-eig"}, {ExperimentKind::SparseEig, "sparse-eig"},
    {ExperimentKind::KernelSvd, "kernel-svd"}, {ExperimentKind::CondStudy, "cond-study"},
    {ExperimentKind::Bench, "bench"},
};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

class LineParser {
 public:
  explicit LineParser(std::size_t line) : line_(line) {}

  [[noreturn]] void fail(const std::string& what) const { throw ParseError("spec: " + what, line_); }

  std::size_t count(std::string_view v) const {
    std::size_t out = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size()) fail("expected a non-negative integer, got '" + std::string(v) + "'");
    return out;
  }

  std::uint64_t u64(std::string_view v) const {
    std::uint64_t out = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size()) fail("expected an unsigned integer, got '" + std::string(v) + "'");
    return out;
  }

  double number(std::string_view v) const {
    const std::string s(v);
    char* end = nullptr;
    const double out = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size()) fail("expected a number, got '" + s + "'");
    return out;
  }

  bool boolean(std::string_view v) const {
    if (v == "true" || v == "yes" || v == "1" || v == "on") return true;
    if (v == "false" || v == "no" || v == "0" || v == "off") return false;
    fail("expected a boolean, got '" + std::string(v) + "'");
  }

  PrecisionPolicy preset(std::string_view v) const {
    const auto p = parse_preset(v);
    if (!p) fail("unknown precision preset '" + std::string(v) + "'");
    return *p;
  }

  std::optional<BasisMethod> method(std::string_view v) const {
    if (v == "raw") return std::nullopt;
    const auto m = parse_method(v);
    if (!m) fail("unknown basis method '" + std::string(v) + "'");
    return m;
  }

  Projection projection(std::string_view v) const {
    const auto p = parse_projection(v);
    if (!p) fail("unknown projection '" + std::string(v) + "'");
    return *p;
  }

  // "preset" or "matvec/basis"
  std::pair<PrecisionPolicy, PrecisionPolicy> policy_pair(std::string_view v) const {
    const auto parts = split(v, '/');
    if (parts.size() == 1) return {preset(parts[0]), preset(parts[0])};
    if (parts.size() == 2) return {preset(parts[0]), preset(parts[1])};
    fail("malformed policy '" + std::string(v) + "'");
  }

  Cell cell(std::string_view v) const {
    const auto parts = split(v, ':');
    Cell c;
    if (parts.size() == 3) {
      c.matvec = c.basis = preset(parts[0]);
    } else if (parts.size() == 4) {
      c.matvec = preset(parts[0]);
      c.basis = preset(parts[1]);
    } else {
      fail("cell must be policy:method:projection or matvec:basis:method:projection");
    }
    c.method = method(parts[parts.size() - 2]);
    c.projection = projection(parts.back());
    return c;
  }

  BenchSize bench_size(std::string_view v) const {
    const auto x = v.find('x');
    if (x == std::string_view::npos) fail("bench size must look like ROWSxCOLS");
    return {count(trim(v.substr(0, x))), count(trim(v.substr(x + 1)))};
  }

 private:
  std::size_t line_;
};

}  // namespace

std::string_view experiment_name(ExperimentKind k) noexcept {
  for (const auto& [kind, name] : kKinds) {
    if (kind == k) return name;
  }
  return "?";
}

std::optional<ExperimentKind> parse_experiment(std::string_view name) noexcept {
  for (const auto& [kind, n] : kKinds) {
    if (n == name) return kind;
  }
  return std::nullopt;
}

double KernelSource::side_length() const noexcept {
  return side ? *side : std::sqrt(static_cast<double>(n));
}

std::string Cell::policy_label() const {
  if (matvec == basis) return preset_name(basis);
  return preset_name(matvec) + ":" + preset_name(basis);
}

std::string Cell::method_label() const {
  return method ? std::string(method_name(*method)) : std::string("raw");
}

void ExperimentSpec::validate() const {
  if (!cfg.is_valid()) throw ContractError("spec: k, m and iter must be at least 1");
  for (const Cell& c : cells) {
    if (!c.matvec.is_valid() || !c.basis.is_valid()) throw ContractError("spec: invalid precision policy");
    if (!c.method && kind != ExperimentKind::CondStudy) {
      throw ContractError("spec: method 'raw' is only meaningful in cond-study");
    }
    const bool krylov = c.method && is_krylov(*c.method);
    if (kind == ExperimentKind::SparseEig && !krylov) {
      throw ContractError("spec: sparse-eig cells need a Krylov method (arnoldi-mgs, krylov-hess)");
    }
    if (kind != ExperimentKind::SparseEig && krylov) {
      throw ContractError("spec: Krylov methods are only available in sparse-eig");
    }
  }
  switch (kind) {
    case ExperimentKind::SparseEig:
      if (matrix_path.empty()) throw ContractError("spec: sparse-eig requires `matrix`");
      break;
    case ExperimentKind::CondStudy:
      if (lengthscales.empty()) throw ContractError("spec: cond-study requires `lengthscales`");
      break;
    case ExperimentKind::Bench:
      if (bench_sizes.empty()) throw ContractError("spec: bench requires `bench.sizes`");
      if (repetitions == 0) throw ContractError("spec: bench.repetitions must be positive");
      break;
    default:
      break;
  }
  if (kind == ExperimentKind::KernelEig || kind == ExperimentKind::KernelSvd ||
      kind == ExperimentKind::CondStudy) {
    if (kernel.n == 0 || !(kernel.l > 0.0) || !(kernel.s >= 0.0)) {
      throw ContractError("spec: kernel needs n >= 1, l > 0, s >= 0");
    }
    if (kind == ExperimentKind::KernelSvd && (kernel.cross_count == 0 || kernel.cross_count > kernel.n)) {
      throw ContractError("spec: kernel.cross must lie in [1, kernel.n]");
    }
  }
  if (format != "csv" && format != "json") throw ContractError("spec: format must be csv or json");
}

ExperimentSpec parse_spec(std::istream& in, const std::filesystem::path& base_dir) {
  ExperimentSpec spec;
  bool have_kind = false;
  std::optional<double> drop_tol;
  std::vector<std::pair<PrecisionPolicy, PrecisionPolicy>> grid_policies;
  std::vector<std::optional<BasisMethod>> grid_methods;
  std::vector<Projection> grid_projections;

  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const LineParser p(lineno);
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) p.fail("expected key = value");
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));

    if (key == "experiment") {
      const auto k = parse_experiment(value);
      if (!k) p.fail("unknown experiment '" + std::string(value) + "'");
      spec.kind = *k;
      have_kind = true;
    } else if (key == "name") {
      spec.name = value;
    } else if (key == "kernel.n") {
      spec.kernel.n = p.count(value);
    } else if (key == "kernel.side") {
      spec.kernel.side = p.number(value);
    } else if (key == "kernel.f") {
      spec.kernel.f = p.number(value);
    } else if (key == "kernel.l") {
      spec.kernel.l = p.number(value);
    } else if (key == "kernel.s") {
      spec.kernel.s = p.number(value);
    } else if (key == "kernel.seed") {
      spec.kernel.seed = p.u64(value);
    } else if (key == "kernel.cross") {
      spec.kernel.cross_count = p.count(value);
    } else if (key == "matrix") {
      const std::filesystem::path mp{std::string(value)};
      spec.matrix_path = (mp.is_relative() && !base_dir.empty() ? base_dir / mp : mp).string();
    } else if (key == "rescale") {
      spec.rescale = p.boolean(value);
    } else if (key == "k") {
      spec.cfg.k = p.count(value);
    } else if (key == "m") {
      spec.cfg.m = p.count(value);
    } else if (key == "iter") {
      spec.cfg.iter = p.count(value);
    } else if (key == "restarts") {
      spec.cfg.restarts = p.count(value);
    } else if (key == "reorthogonalize") {
      spec.cfg.reorthogonalize = p.boolean(value);
    } else if (key == "seed") {
      spec.cfg.seed = p.u64(value);
    } else if (key == "top") {
      spec.top = p.count(value);
    } else if (key == "drop_tol_factor") {
      drop_tol = p.number(value);
    } else if (key == "cell") {
      spec.cells.push_back(p.cell(value));
    } else if (key == "grid.policies") {
      for (auto t : split(value, ',')) grid_policies.push_back(p.policy_pair(t));
    } else if (key == "grid.methods") {
      for (auto t : split(value, ',')) grid_methods.push_back(p.method(t));
    } else if (key == "grid.projections") {
      for (auto t : split(value, ',')) grid_projections.push_back(p.projection(t));
    } else if (key == "lengthscales") {
      for (auto t : split(value, ',')) spec.lengthscales.push_back(p.number(t));
    } else if (key == "bench.sizes") {
      for (auto t : split(value, ',')) spec.bench_sizes.push_back(p.bench_size(t));
    } else if (key == "bench.repetitions") {
      spec.repetitions = p.count(value);
    } else if (key == "output") {
      spec.output = value;
    } else if (key == "format") {
      if (value != "csv" && value != "json") p.fail("format must be csv or json");
      spec.format = value;
    } else {
      p.fail("unknown key '" + std::string(key) + "'");
    }
  }
  if (!have_kind) throw ParseError("spec: missing `experiment`", 0);

  if (!grid_policies.empty() || !grid_methods.empty()) {
    if (grid_policies.empty() || grid_methods.empty()) {
      throw ParseError("spec: grid.policies and grid.methods must be given together", 0);
    }
    if (grid_projections.empty()) grid_projections.push_back(Projection::RR);
    for (const auto& [mv, bp] : grid_policies) {
      for (const auto& method : grid_methods) {
        for (Projection proj : grid_projections) spec.cells.push_back({mv, bp, method, proj});
      }
    }
  }
  if (drop_tol) {
    for (Cell& c : spec.cells) {
      c.matvec.drop_tol_factor = *drop_tol;
      c.basis.drop_tol_factor = *drop_tol;
    }
  }
  if (spec.name.empty()) spec.name = experiment_name(spec.kind);
  try {
    spec.validate();
  } catch (const ContractError& e) {
    throw ParseError(e.what(), 0);
  }
  return spec;
}

ExperimentSpec load_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open spec file: " + path.string());
  return parse_spec(in, path.parent_path());
}

void override_seed(ExperimentSpec& spec, std::uint64_t seed) {
  spec.cfg.seed = seed;
  if (spec.kernel.seed) spec.kernel.seed = seed;
}

bool apply_seed_from_environment(ExperimentSpec& spec) {
  const char* env = std::getenv("OFRR_SEED");
  if (!env || !*env) return false;
  std::uint64_t seed = 0;
  const std::string_view v(env);
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), seed);
  if (ec != std::errc() || p != v.data() + v.size()) {
    throw ContractError("OFRR_SEED must be an unsigned integer, got '" + std::string(v) + "'");
  }
  override_seed(spec, seed);
  return true;
}

}  // namespace ofrr
