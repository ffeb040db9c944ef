// ofrr: runs experiment spec files and writes CSV/JSON result tables.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ofrr/errors.hpp"
#include "ofrr/experiment.hpp"

namespace {

struct Options {
  std::string spec;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string format;
  unsigned threads = 1;
};

int run(ofrr::ExperimentKind kind, const Options& opt) {
  ofrr::ExperimentSpec spec = ofrr::load_spec(opt.spec);
  if (spec.kind != kind) {
    std::cerr << "ofrr: spec '" << opt.spec << "' describes a " << ofrr::experiment_name(spec.kind)
              << " experiment, not " << ofrr::experiment_name(kind) << '\n';
    return 1;
  }
  ofrr::apply_seed_from_environment(spec);
  if (opt.seed) ofrr::override_seed(spec, *opt.seed);
  if (!opt.out.empty()) spec.output = opt.out;
  if (!opt.format.empty()) spec.format = opt.format;
  const auto format = ofrr::parse_output_format(spec.format);
  if (!format) {
    std::cerr << "ofrr: unknown format '" << spec.format << "'\n";
    return 1;
  }

  const ofrr::ResultTable table = ofrr::run_experiment(spec, opt.threads);
  if (spec.output.empty() || spec.output == "-") {
    if (*format == ofrr::OutputFormat::Csv) {
      ofrr::write_csv(std::cout, table);
    } else {
      ofrr::write_json(std::cout, table);
    }
  } else {
    ofrr::write_results(table, *format, spec.output);
  }

  std::size_t failed = 0;
  for (const auto& row : table) failed += row.status != "ok";
  if (failed) std::cerr << "ofrr: " << failed << " row(s) with non-ok status\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mixed-precision OFRR experiment runner"};
  app.require_subcommand(1);
  Options opt;

  struct Sub {
    const char* name;
    ofrr::ExperimentKind kind;
    const char* help;
  };
  const Sub subs[] = {
      {"kernel-eig", ofrr::ExperimentKind::KernelEig, "Subspace iteration on a Gaussian kernel matrix"},
      {"sparse-eig", ofrr::ExperimentKind::SparseEig, "Restarted Krylov iteration on a Matrix Market file"},
      {"kernel-svd", ofrr::ExperimentKind::KernelSvd, "Partial SVD of a rectangular cross-kernel"},
      {"cond-study", ofrr::ExperimentKind::CondStudy, "Condition numbers of bases across length scales"},
      {"bench", ofrr::ExperimentKind::Bench, "Wall-clock medians of the basis builders"},
  };
  std::optional<ofrr::ExperimentKind> chosen;
  for (const Sub& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    sub->add_option("--spec", opt.spec, "Experiment spec file")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", opt.seed, "Override every seed in the spec");
    sub->add_option("--out", opt.out, "Output path ('-' for stdout)");
    sub->add_option("--format", opt.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--threads", opt.threads, "Worker threads for grid cells (0 = all cores)");
    sub->callback([&chosen, kind = s.kind] { chosen = kind; });
  }
  CLI11_PARSE(app, argc, argv);

  try {
    return run(*chosen, opt);
  } catch (const ofrr::ParseError& e) {
    std::cerr << "ofrr: " << opt.spec << ": " << e.what() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "ofrr: " << e.what() << '\n';
  }
  return 1;
}
