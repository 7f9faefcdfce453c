// Command-line experiment runner.  Every command maps to one library call
// path; results go to stdout or --output as CSV/JSON.
//
// Exit codes: 0 success, 1 usage error, 2 identity-check failure.

#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "ntprobe/experiment.hpp"

using ntprobe::ExperimentSpec;

namespace {

void add_common(CLI::App* cmd, ExperimentSpec& spec) {
  cmd->add_option("--output", spec.output_path, "output file (default stdout)");
  cmd->add_option("--format", spec.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--seed", spec.seed, "seed for randomized grids");
  cmd->add_flag("--timings", spec.timings, "append wall-clock columns");
}

void param_option(CLI::App* cmd, ExperimentSpec& spec, const std::string& name,
                  const std::string& help, bool required = false) {
  auto* opt = cmd->add_option_function<std::string>(
      "--" + name, [&spec, name](const std::string& v) { spec.params[name] = v; },
      help);
  if (required) opt->required();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ntprobe: pair correlation of n^2*alpha and divisor sums in "
               "arithmetic progressions"};
  app.require_subcommand(1);
  ExperimentSpec spec;

  if (const char* t = std::getenv("NTPROBE_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(t, &end, 10);
    if (end && *end == '\0' && v >= 1 && v <= 256)
      spec.threads = static_cast<unsigned>(v);
  }

  auto* paircorr = app.add_subcommand("paircorr", "R2(x, N, alpha) statistics");
  param_option(paircorr, spec, "alpha", "alpha (p/q, sqrt2, golden, ...)", true);
  param_option(paircorr, spec, "N", "sequence length(s), comma list", true);
  param_option(paircorr, spec, "x", "window parameter(s), comma list", true);
  param_option(paircorr, spec, "algorithm", "sorted | naive | both");
  param_option(paircorr, spec, "precision-bits", "working precision (default 96)");
  add_common(paircorr, spec);

  auto* apsum = app.add_subcommand("apsum", "windowed progression sums");
  for (const char* k : {"M", "N", "rho"}) param_option(apsum, spec, k, k, true);
  param_option(apsum, spec, "q", "modulus(es), comma list", true);
  param_option(apsum, spec, "K", "window length(s), comma list", true);
  add_common(apsum, spec);

  auto* variance = app.add_subcommand("variance", "variance statistics");
  param_option(variance, spec, "statistic", "shifts | gcd | multipliers", true);
  param_option(variance, spec, "M", "M bound (0 = track N)", true);
  param_option(variance, spec, "N", "N bound(s), comma list", true);
  param_option(variance, spec, "q", "modulus", true);
  param_option(variance, spec, "K", "window length");
  param_option(variance, spec, "rho", "multiplier (shifts)");
  param_option(variance, spec, "k", "gcd class (gcd)");
  param_option(variance, spec, "nu", "bad-shift threshold (default 0.1)");
  add_common(variance, spec);

  auto* lattice = app.add_subcommand("lattice", "strip counts and basis data");
  param_option(lattice, spec, "M", "strip length", true);
  param_option(lattice, spec, "alpha", "slope", true);
  param_option(lattice, spec, "delta", "half-width(s), comma list", true);
  add_common(lattice, spec);

  auto* identity = app.add_subcommand("identity-check", "exact identity fuzzing");
  param_option(identity, spec, "kind", "cycle | muphi | lattice");
  param_option(identity, spec, "q-max", "modulus cap (cycle, muphi)");
  param_option(identity, spec, "count", "instances (lattice)");
  add_common(identity, spec);

  auto* cf = app.add_subcommand("cf", "continued-fraction expansion");
  param_option(cf, spec, "alpha", "value to expand", true);
  param_option(cf, spec, "count", "number of convergents");
  add_common(cf, spec);

  auto* type_const = app.add_subcommand("type-constant",
                                        "rational approximation constants");
  param_option(type_const, spec, "p", "numerator (rational mode)");
  param_option(type_const, spec, "q", "denominator (rational mode)");
  param_option(type_const, spec, "alpha", "irrational profile mode");
  param_option(type_const, spec, "count", "convergents in profile mode");
  param_option(type_const, spec, "e", "exponent (integer >= 2, default 2)");
  add_common(type_const, spec);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  spec.command = app.get_subcommands().front()->get_name();
  try {
    return ntprobe::run_and_write(spec);
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
