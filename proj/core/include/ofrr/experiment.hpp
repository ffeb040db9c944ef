#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ofrr/basis.hpp"
#include "ofrr/driver.hpp"
#include "ofrr/precision.hpp"
#include "ofrr/projection.hpp"

namespace ofrr {

enum class ExperimentKind { KernelEig, SparseEig, KernelSvd, CondStudy, Bench };
std::string_view experiment_name(ExperimentKind k) noexcept;
std::optional<ExperimentKind> parse_experiment(std::string_view name) noexcept;

/// Point cloud and Gaussian-kernel parameters. For KernelSvd, cross_count
/// points are drawn without replacement from the main cloud.
struct KernelSource {
  std::size_t n = 1000;
  std::optional<double> side;  ///< defaults to sqrt(n)
  double f = 1.0;
  double l = 10.0;
  double s = 0.0;
  std::optional<std::uint64_t> seed;  ///< defaults to the run seed
  std::size_t cross_count = 200;

  double side_length() const noexcept;
};

/// One grid cell. matvec drives the operator, basis drives basis construction
/// and projection. An empty method means the raw power block (CondStudy only).
struct Cell {
  PrecisionPolicy matvec = PrecisionPolicy::full(Format::F64);
  PrecisionPolicy basis = PrecisionPolicy::full(Format::F64);
  std::optional<BasisMethod> method = BasisMethod::MgsLeft;
  Projection projection = Projection::RR;

  /// "f64" when both policies agree, "mixed-half:f64" otherwise.
  std::string policy_label() const;
  std::string method_label() const;
};

struct BenchSize {
  std::size_t rows = 0;
  std::size_t cols = 0;
};

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::KernelEig;
  std::string name;  ///< value of the `experiment` CSV column; defaults to the kind name
  KernelSource kernel;
  std::string matrix_path;  ///< SparseEig
  bool rescale = true;      ///< SparseEig spectral rescale
  std::vector<Cell> cells;
  IterConfig cfg;           ///< k, m, iter, restarts, reorthogonalize, seed
  std::size_t top = 0;      ///< reported pairs; 0 means all
  std::vector<double> lengthscales;  ///< CondStudy
  std::vector<BenchSize> bench_sizes;
  std::size_t repetitions = 5;
  std::string output;
  std::string format = "csv";

  /// Throws ContractError describing the first problem found.
  void validate() const;
};

/// Parses the key = value spec format ('#' starts a comment). Relative
/// `matrix` paths are resolved against `base_dir`. Throws ParseError.
ExperimentSpec parse_spec(std::istream& in, const std::filesystem::path& base_dir = {});
ExperimentSpec load_spec(const std::filesystem::path& path);

/// Replaces every seed in the spec (run seed and kernel seed).
void override_seed(ExperimentSpec& spec, std::uint64_t seed);
/// Applies OFRR_SEED when it is set to an unsigned integer; returns whether it did.
bool apply_seed_from_environment(ExperimentSpec& spec);

/// One output record. Unset optionals serialize as empty fields.
struct ResultRow {
  std::string experiment;
  std::string matrix;
  std::string policy;
  std::string basis_method;
  std::string projection;
  std::optional<std::size_t> index;
  std::optional<double> value;
  std::optional<double> reference;
  std::optional<double> rel_error;
  std::optional<double> residual;
  std::optional<double> cond2;
  std::optional<double> wall_ms;
  std::string status = "ok";

  friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

using ResultTable = std::vector<ResultRow>;

/// Runs every cell on `threads` workers (0 = hardware concurrency). Rows are
/// returned in grid order. A failing cell yields a row with status overflow,
/// breakdown or error instead of an exception.
ResultTable run_experiment(const ExperimentSpec& spec, unsigned threads = 1);

enum class OutputFormat { Csv, Json };
std::optional<OutputFormat> parse_output_format(std::string_view name) noexcept;

inline constexpr std::string_view kCsvHeader =
    "experiment,matrix,policy,basis_method,projection,index,value,reference,rel_error,residual,"
    "cond2,wall_ms,status";

void write_csv(std::ostream& out, const ResultTable& table);
void write_json(std::ostream& out, const ResultTable& table);
/// Throws std::runtime_error naming the path on I/O failure.
void write_results(const ResultTable& table, OutputFormat format, const std::filesystem::path& path);
/// Inverse of write_csv. Throws ParseError.
ResultTable read_csv(std::istream& in);

}  // namespace ofrr
