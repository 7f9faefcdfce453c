#include "ntprobe/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <future>
#include <iostream>
#include <numeric>
#include <sstream>

#include "ntprobe/apsums.hpp"
#include "ntprobe/contfrac.hpp"
#include "ntprobe/lattice.hpp"
#include "ntprobe/paircorr.hpp"

namespace ntprobe {

std::string version_string() { return "ntprobe 1.0.0"; }

namespace {

std::string rat_str(const mpq_class& r) {
  std::ostringstream os;
  os << r.get_num();
  if (r.get_den() != 1) os << "/" << r.get_den();
  return os.str();
}

std::string dec_str(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

const std::string& require(const ExperimentSpec& spec, const std::string& key) {
  auto it = spec.params.find(key);
  if (it == spec.params.end() || it->second.empty())
    throw std::invalid_argument("missing required parameter --" + key);
  return it->second;
}

std::string optional_param(const ExperimentSpec& spec, const std::string& key,
                           const std::string& fallback) {
  auto it = spec.params.find(key);
  return it == spec.params.end() || it->second.empty() ? fallback : it->second;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  if (out.empty()) throw std::invalid_argument("empty list parameter");
  return out;
}

u64 parse_u64(const std::string& text, const std::string& name) {
  try {
    size_t pos = 0;
    unsigned long long v = std::stoull(text, &pos);
    if (pos != text.size()) throw std::invalid_argument(name);
    return v;
  } catch (...) {
    throw std::invalid_argument("parameter --" + name +
                                ": expected a positive integer, got '" + text +
                                "'");
  }
}

// Simple index-ordered parallel map; rows land in grid order regardless of
// the thread count, keeping the output canonical.
template <typename F>
std::vector<std::vector<ResultRecord>> parallel_map(u64 n, unsigned threads,
                                                    F&& f) {
  std::vector<std::vector<ResultRecord>> out(n);
  if (threads <= 1 || n <= 1) {
    for (u64 i = 0; i < n; ++i) out[i] = f(i);
    return out;
  }
  std::atomic<u64> next{0};
  auto worker = [&] {
    for (u64 i = next.fetch_add(1); i < n; i = next.fetch_add(1)) out[i] = f(i);
  };
  std::vector<std::future<void>> fs;
  for (unsigned t = 0; t < std::min<u64>(threads, n); ++t)
    fs.push_back(std::async(std::launch::async, worker));
  for (auto& fu : fs) fu.get();
  return out;
}

void echo_common(ResultRecord& r, const ExperimentSpec& spec) {
  r.add("command", spec.command);
  r.add("version", version_string());
  r.add("seed", std::to_string(spec.seed));
}

// ----------------------------------------------------------------------
// paircorr
// ----------------------------------------------------------------------

RunOutcome run_paircorr(const ExperimentSpec& spec) {
  RealAlpha alpha = RealAlpha::parse(require(spec, "alpha"));
  auto n_list = split_list(require(spec, "N"));
  auto x_list = split_list(require(spec, "x"));
  std::string alg = optional_param(spec, "algorithm", "sorted");
  unsigned prec = static_cast<unsigned>(
      parse_u64(optional_param(spec, "precision-bits", "96"), "precision-bits"));
  if (alg != "sorted" && alg != "naive" && alg != "both")
    throw std::invalid_argument("parameter --algorithm: sorted, naive or both");

  struct Cell {
    u64 n;
    mpq_class x;
  };
  std::vector<Cell> grid;
  for (const auto& ns : n_list)
    for (const auto& xs : x_list)
      grid.push_back({parse_u64(ns, "N"), parse_rational(xs, "x")});

  RunOutcome out;
  auto rows = parallel_map(grid.size(), spec.threads, [&](u64 i) {
    const Cell& c = grid[i];
    std::vector<ResultRecord> rs;
    auto t0 = std::chrono::steady_clock::now();
    auto emit = [&](const PairCorrelationResult& r) {
      PoissonReport rep;
      rep.r2 = r;
      double xd = c.x.get_d();
      rep.deviation = std::abs(r.r2_value.get_d() - 2 * xd);
      rep.hb_normalized = rep.deviation / std::pow(xd, 7.0 / 8.0);
      rep.in_regime = c.x >= 1 && xd <= std::log(static_cast<double>(c.n));
      ResultRecord rec;
      echo_common(rec, spec);
      rec.add("alpha", alpha.to_string());
      rec.add("N", std::to_string(c.n));
      rec.add("x", rat_str(c.x));
      rec.add("algorithm", r.algorithm == R2Algorithm::naive ? "naive" : "sorted");
      rec.add("pair_count", r.pair_count.get_str());
      rec.add("r2", rat_str(r.r2_value));
      rec.add("r2_decimal", dec_str(r.r2_value.get_d()));
      rec.add("deviation", dec_str(rep.deviation));
      rec.add("hb_normalized", dec_str(rep.hb_normalized));
      rec.add("in_regime", rep.in_regime ? "1" : "0");
      if (spec.timings) {
        auto ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
        rec.add("wall_ms", dec_str(ms));
      }
      rs.push_back(std::move(rec));
    };
    if (alg == "sorted" || alg == "both") emit(r2_sorted(c.x, c.n, alpha, prec));
    if (alg == "naive" || alg == "both") emit(r2_naive(c.x, c.n, alpha, prec));
    return rs;
  });
  for (auto& rs : rows)
    for (auto& r : rs) out.rows.push_back(std::move(r));
  return out;
}

// ----------------------------------------------------------------------
// apsum
// ----------------------------------------------------------------------

RunOutcome run_apsum(const ExperimentSpec& spec) {
  mpq_class M = parse_rational(require(spec, "M"), "M");
  mpq_class N = parse_rational(require(spec, "N"), "N");
  auto q_list = split_list(require(spec, "q"));
  auto k_list = split_list(require(spec, "K"));
  u64 rho = parse_u64(require(spec, "rho"), "rho");

  RunOutcome out;
  for (const auto& qs : q_list) {
    u64 q = parse_u64(qs, "q");
    TruncationWindow w(M, N);
    ClassSumTable table = build_class_sums(w, q);
    for (const auto& ks : k_list) {
      mpq_class K = parse_rational(ks, "K");
      u64 observed = ap_window_sum(table, rho, K);
      mpq_class main = main_term(M, N, K, q);
      ResultRecord rec;
      echo_common(rec, spec);
      rec.add("M", rat_str(M));
      rec.add("N", rat_str(N));
      rec.add("q", std::to_string(q));
      rec.add("rho", std::to_string(rho));
      rec.add("K", rat_str(K));
      rec.add("observed", std::to_string(observed));
      rec.add("main", rat_str(main));
      rec.add("main_decimal", dec_str(main.get_d()));
      double rel = main == 0 ? 0 : observed / main.get_d() - 1;
      rec.add("relative_deviation", dec_str(rel));
      out.rows.push_back(std::move(rec));
    }
  }
  return out;
}

// ----------------------------------------------------------------------
// variance
// ----------------------------------------------------------------------

RunOutcome run_variance(const ExperimentSpec& spec) {
  std::string stat = require(spec, "statistic");
  mpq_class M = parse_rational(require(spec, "M"), "M");
  auto n_list = split_list(require(spec, "N"));
  RunOutcome out;
  for (const auto& ns : n_list) {
    mpq_class N = parse_rational(ns, "N");
    mpq_class Mi = M == 0 ? N : M;  // --M 0 means "track N"
    u64 q = parse_u64(require(spec, "q"), "q");
    TruncationWindow w(Mi, N);
    ClassSumTable table = build_class_sums(w, q);
    VarianceReport rep;
    if (stat == "shifts") {
      u64 rho = parse_u64(optional_param(spec, "rho", "1"), "rho");
      mpq_class K = parse_rational(require(spec, "K"), "K");
      double nu = std::stod(optional_param(spec, "nu", "0.1"));
      rep = variance_over_shifts(table, rho, K, nu);
    } else if (stat == "gcd") {
      u64 k = parse_u64(optional_param(spec, "k", "1"), "k");
      rep = variance_over_gcd_class(table, k);
    } else if (stat == "multipliers") {
      mpq_class K = parse_rational(require(spec, "K"), "K");
      rep = variance_over_multipliers(table, K);
    } else {
      throw std::invalid_argument(
          "parameter --statistic: shifts, gcd or multipliers");
    }
    ResultRecord rec;
    echo_common(rec, spec);
    rec.add("statistic", stat);
    rec.add("M", rat_str(Mi));
    rec.add("N", rat_str(N));
    rec.add("q", std::to_string(q));
    rec.add("K", rat_str(rep.K));
    rec.add("k", std::to_string(rep.gcd_class));
    rec.add("rho", std::to_string(rep.rho));
    rec.add("observed", rat_str(rep.observed));
    rec.add("predicted_main", rat_str(rep.predicted_main));
    rec.add("normalized", dec_str(rep.normalized));
    rec.add("trend_exponent", dec_str(rep.trend_exponent));
    rec.add("bad_count", std::to_string(rep.bad_count));
    out.rows.push_back(std::move(rec));
  }
  return out;
}

// ----------------------------------------------------------------------
// lattice
// ----------------------------------------------------------------------

RunOutcome run_lattice(const ExperimentSpec& spec) {
  mpq_class M = parse_rational(require(spec, "M"), "M");
  RealAlpha alpha = RealAlpha::parse(require(spec, "alpha"));
  auto d_list = split_list(require(spec, "delta"));
  RunOutcome out;
  for (const auto& ds : d_list) {
    mpq_class delta = parse_rational(ds, "delta");
    StripQuery q{M, alpha, delta};
    auto est = strip_count_estimate(q);
    auto rb = reduce_basis(M, alpha, delta);
    ResultRecord rec;
    echo_common(rec, spec);
    rec.add("M", rat_str(M));
    rec.add("alpha", alpha.to_string());
    rec.add("delta", rat_str(delta));
    rec.add("exact", est.exact.get_str());
    rec.add("main", dec_str(est.main));
    rec.add("lambda1", dec_str(rb.lambda1));
    rec.add("error_shape", dec_str(est.error_shape));
    rec.add("ratio", dec_str(est.ratio));
    out.rows.push_back(std::move(rec));
  }
  return out;
}

// ----------------------------------------------------------------------
// identity-check
// ----------------------------------------------------------------------

RunOutcome run_identity_check(const ExperimentSpec& spec) {
  std::string kind = optional_param(spec, "kind", "cycle");
  RunOutcome out;
  bool all_ok = true;
  if (kind == "cycle") {
    u64 qmax = parse_u64(optional_param(spec, "q-max", "100"), "q-max");
    for (u64 q = 1; q <= qmax; ++q) {
      auto id = ap_weight_cycle_identity(q);
      all_ok = all_ok && id.equal();
      ResultRecord rec;
      echo_common(rec, spec);
      rec.add("kind", kind);
      rec.add("q", std::to_string(q));
      rec.add("lhs", id.lhs.get_str());
      rec.add("rhs", id.rhs.get_str());
      rec.add("equal", id.equal() ? "1" : "0");
      out.rows.push_back(std::move(rec));
    }
  } else if (kind == "muphi") {
    u64 qmax = parse_u64(optional_param(spec, "q-max", "100"), "q-max");
    for (u64 q = 1; q <= qmax; ++q) {
      u64 mismatches = 0;
      for (u64 r = 0; r <= q; ++r)
        if (static_cast<i64>(divisor_ap_weight(q, static_cast<i64>(r))) !=
            divisor_ap_weight_double_sum(q, static_cast<i64>(r)))
          ++mismatches;
      all_ok = all_ok && mismatches == 0;
      ResultRecord rec;
      echo_common(rec, spec);
      rec.add("kind", kind);
      rec.add("q", std::to_string(q));
      rec.add("classes_checked", std::to_string(q + 1));
      rec.add("mismatches", std::to_string(mismatches));
      rec.add("equal", mismatches == 0 ? "1" : "0");
      out.rows.push_back(std::move(rec));
    }
  } else if (kind == "lattice") {
    u64 count = parse_u64(optional_param(spec, "count", "1000"), "count");
    SplitMix64 gen(spec.seed);
    for (u64 i = 0; i < count; ++i) {
      u64 M = 1 + gen.below(12), N = 1 + gen.below(12);
      u64 q = 1 + gen.below(40);
      u64 p = 1 + gen.below(q);
      while (std::gcd(p, q) != 1) p = 1 + gen.below(q);
      mpq_class K(gen.below(2 * q + 1), 2);  // integers and half-integers <= q
      K.canonicalize();
      auto rep = strip_divisor_identity(M, N, K, mpz_class(p), q);
      all_ok = all_ok && rep.equal;
      ResultRecord rec;
      echo_common(rec, spec);
      rec.add("kind", kind);
      rec.add("instance", std::to_string(i));
      rec.add("M", std::to_string(M));
      rec.add("N", std::to_string(N));
      rec.add("K", rat_str(K));
      rec.add("p", std::to_string(p));
      rec.add("q", std::to_string(q));
      rec.add("lhs", rep.lhs.get_str());
      rec.add("rhs", rep.rhs.get_str());
      rec.add("equal", rep.equal ? "1" : "0");
      out.rows.push_back(std::move(rec));
    }
  } else {
    throw std::invalid_argument("parameter --kind: cycle, muphi or lattice");
  }
  out.exit_code = all_ok ? 0 : 2;
  return out;
}

// ----------------------------------------------------------------------
// cf and type-constant
// ----------------------------------------------------------------------

RunOutcome run_cf(const ExperimentSpec& spec) {
  RealAlpha alpha = RealAlpha::parse(require(spec, "alpha"));
  u64 count = parse_u64(optional_param(spec, "count", "20"), "count");
  auto cf = continued_fraction(alpha, count);
  RunOutcome out;
  for (size_t n = 0; n < cf.size(); ++n) {
    ResultRecord rec;
    echo_common(rec, spec);
    rec.add("alpha", alpha.to_string());
    rec.add("n", std::to_string(n));
    rec.add("a_n", cf.partial_quotients()[n].get_str());
    rec.add("p_n", cf.convergent(n).p.get_str());
    rec.add("q_n", cf.convergent(n).q.get_str());
    if (n + 1 < cf.size()) {
      mpz_class det = cf.convergent(n + 1).q * cf.convergent(n).p -
                      cf.convergent(n + 1).p * cf.convergent(n).q;
      rec.add("det", det.get_str());
    } else {
      rec.add("det", "");
    }
    out.rows.push_back(std::move(rec));
  }
  return out;
}

RunOutcome run_type_constant(const ExperimentSpec& spec) {
  unsigned e =
      static_cast<unsigned>(parse_u64(optional_param(spec, "e", "2"), "e"));
  RunOutcome out;
  if (spec.params.count("p") || spec.params.count("q")) {
    mpz_class p(require(spec, "p"));
    mpz_class q(require(spec, "q"));
    mpq_class c = rational_type_constant(p, q, e);
    ResultRecord rec;
    echo_common(rec, spec);
    rec.add("p", p.get_str());
    rec.add("q", q.get_str());
    rec.add("e", std::to_string(e));
    rec.add("constant", rat_str(c));
    rec.add("constant_decimal", dec_str(c.get_d()));
    out.rows.push_back(std::move(rec));
    return out;
  }
  // Empirical type profile of an irrational: per-convergent least constants
  // with a running max.  No sup over all denominators is computable, so the
  // profile is what the data can honestly show.
  RealAlpha alpha = RealAlpha::parse(require(spec, "alpha"));
  u64 count = parse_u64(optional_param(spec, "count", "15"), "count");
  auto cf = continued_fraction(alpha, count);
  mpq_class running = 0;
  for (size_t n = 0; n < cf.size(); ++n) {
    mpq_class c = rational_type_constant(cf.convergent(n).p, cf.convergent(n).q, e);
    if (c > running) running = c;
    ResultRecord rec;
    echo_common(rec, spec);
    rec.add("alpha", alpha.to_string());
    rec.add("e", std::to_string(e));
    rec.add("n", std::to_string(n));
    rec.add("p_n", cf.convergent(n).p.get_str());
    rec.add("q_n", cf.convergent(n).q.get_str());
    rec.add("constant", rat_str(c));
    rec.add("running_max", rat_str(running));
    out.rows.push_back(std::move(rec));
  }
  return out;
}

}  // namespace

mpq_class parse_rational(const std::string& text, const std::string& name) {
  try {
    RealAlpha a = RealAlpha::parse(text);
    if (!a.is_rational()) throw std::invalid_argument(name);
    return a.rational_value();
  } catch (...) {
    throw std::invalid_argument("parameter --" + name +
                                ": expected p/q, integer or decimal, got '" +
                                text + "'");
  }
}

RunOutcome run(const ExperimentSpec& spec) {
  RunOutcome out;
  if (spec.command == "paircorr")
    out = run_paircorr(spec);
  else if (spec.command == "apsum")
    out = run_apsum(spec);
  else if (spec.command == "variance")
    out = run_variance(spec);
  else if (spec.command == "lattice")
    out = run_lattice(spec);
  else if (spec.command == "identity-check")
    out = run_identity_check(spec);
  else if (spec.command == "cf")
    out = run_cf(spec);
  else if (spec.command == "type-constant")
    out = run_type_constant(spec);
  else
    throw std::invalid_argument("unknown command '" + spec.command + "'");

  out.comments.push_back(version_string());
  out.comments.push_back("command: " + spec.command);
  out.comments.push_back("seed: " + std::to_string(spec.seed) +
                         " (generator: splitmix64)");
  return out;
}

void write_csv(std::ostream& os, const RunOutcome& out) {
  for (const auto& c : out.comments) os << "# " << c << "\n";
  if (out.rows.empty()) return;
  const auto& head = out.rows.front().cols;
  for (size_t i = 0; i < head.size(); ++i)
    os << head[i].first << (i + 1 < head.size() ? "," : "\n");
  for (const auto& row : out.rows) {
    for (size_t i = 0; i < row.cols.size(); ++i)
      os << row.cols[i].second << (i + 1 < row.cols.size() ? "," : "\n");
  }
}

void write_json(std::ostream& os, const RunOutcome& out) {
  auto escape = [](const std::string& s) {
    std::string r;
    for (char c : s) {
      if (c == '"' || c == '\\') r += '\\';
      r += c;
    }
    return r;
  };
  os << "[\n";
  for (size_t i = 0; i < out.rows.size(); ++i) {
    os << "  {";
    const auto& cols = out.rows[i].cols;
    for (size_t j = 0; j < cols.size(); ++j) {
      os << "\"" << escape(cols[j].first) << "\": \"" << escape(cols[j].second)
         << "\"";
      if (j + 1 < cols.size()) os << ", ";
    }
    os << "}" << (i + 1 < out.rows.size() ? "," : "") << "\n";
  }
  os << "]\n";
}

int run_and_write(const ExperimentSpec& spec) {
  RunOutcome out = run(spec);
  if (spec.output_path.empty()) {
    if (spec.format == "json")
      write_json(std::cout, out);
    else
      write_csv(std::cout, out);
  } else {
    std::ofstream f(spec.output_path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open output file " + spec.output_path);
    if (spec.format == "json")
      write_json(f, out);
    else
      write_csv(f, out);
  }
  return out.exit_code;
}

}  // namespace ntprobe
