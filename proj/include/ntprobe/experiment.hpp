// Reproducible experiment runner: expands a parameter grid, drives the
// computational modules, and serializes rows.  Identical spec + seed gives
// byte-identical output; wall times are emitted only on request so the
// default artifact stays reproducible.

#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "ntprobe/intmath.hpp"

namespace ntprobe {

struct ExperimentSpec {
  std::string command;  // paircorr | apsum | variance | lattice |
                        // identity-check | cf | type-constant
  std::map<std::string, std::string> params;
  std::string output_path;  // empty = stdout
  std::string format = "csv";
  u64 seed = 1;
  bool timings = false;
  unsigned threads = 1;  // grid-level parallelism; output order is canonical
};

struct ResultRecord {
  std::vector<std::pair<std::string, std::string>> cols;
  void add(const std::string& k, const std::string& v) { cols.emplace_back(k, v); }
};

struct RunOutcome {
  std::vector<std::string> comments;  // '#' header lines (csv only)
  std::vector<ResultRecord> rows;
  int exit_code = 0;  // 0 ok, 2 identity failure
};

// Deterministic stream for randomized instance grids (named in the output).
struct SplitMix64 {
  u64 state;
  explicit SplitMix64(u64 seed) : state(seed) {}
  u64 next() {
    u64 z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  u64 below(u64 n) { return next() % n; }
};

std::string version_string();

// Executes the command; throws std::invalid_argument on usage errors with a
// message naming the offending parameter.
RunOutcome run(const ExperimentSpec& spec);

void write_csv(std::ostream& os, const RunOutcome& out);
void write_json(std::ostream& os, const RunOutcome& out);

// Runs and writes to spec.output_path (or stdout); returns the exit code.
int run_and_write(const ExperimentSpec& spec);

// Exact rational from "p/q", integer, or decimal text.
mpq_class parse_rational(const std::string& text, const std::string& name);

}  // namespace ntprobe
