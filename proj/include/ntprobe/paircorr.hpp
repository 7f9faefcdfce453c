// Pair-correlation statistics for the fractional parts of n^2*alpha: the
// normalized pair count R2, its factored surrogate S, the rhombus count with
// a mod-q norm window, and the convergent sandwich linking them.
//
// All threshold tests are exact.  Rational alpha reduces to integer
// comparisons; surd alpha runs on 128-bit certified fixed-point keys with an
// exact quadratic-field fallback inside the (provably thin) ambiguity band,
// so near-threshold pairs are decided by the field arithmetic, never by a
// rounded key.  Ties ||...|| = x/N are impossible for surd alpha: equality
// would make alpha rational.

#pragma once

#include "ntprobe/contfrac.hpp"
#include "ntprobe/realalpha.hpp"

namespace ntprobe {

enum class R2Algorithm { naive, sorted };

struct PairCorrelationResult {
  mpq_class x;
  u64 n = 0;
  mpz_class pair_count;  // ordered pairs m != n
  mpq_class r2_value;    // pair_count / n
  R2Algorithm algorithm = R2Algorithm::sorted;
};

// All-pairs evaluation; the oracle for r2_sorted.
PairCorrelationResult r2_naive(const mpq_class& x, u64 n, const RealAlpha& alpha,
                               unsigned precision_bits = 96);

// Sort + linear sweep; identical counts by construction.
PairCorrelationResult r2_sorted(const mpq_class& x, u64 n,
                                const RealAlpha& alpha,
                                unsigned precision_bits = 96);

// S(x, N, alpha): pairs (a, b), 1 <= a < 2N, 1 <= |b| <= N - |N - a|,
// a + b even, ||a b alpha|| <= x/N, divided by N.  Raw count also returned.
struct SStatistic {
  mpz_class count;
  mpq_class value;  // count / N
};
SStatistic s_statistic(const mpq_class& x, u64 n, const RealAlpha& alpha,
                       unsigned precision_bits = 96);

// Rhombus count with the mod-q norm window:
// #{(a,b) : 1 <= a < 2N, 1 <= |b| <= N - |N-a|, 2 | a+b, ||abp||_q <= y}.
struct RhombusQuery {
  mpq_class y;
  u64 n = 0;
  mpz_class p;
  u64 q = 1;
  bool saturated() const;  // y >= q/2: the window covers every residue
};

// Fast path: per a, the admissible residues form two intervals mod q and
// the b's form an arithmetic progression; counting is a floor-sum.
u64 rhombus_norm_count(const RhombusQuery& query);
// Direct double loop; the oracle.
u64 rhombus_norm_count_naive(const RhombusQuery& query);

// The proof inequality for one convergent p_n/q_n:
//   rhombus(x q_n/N - N^2/q_{n+1}) <= N*S(x,N,alpha)
//                                  <= rhombus(x q_n/N + N^2/q_{n+1}).
struct SandwichReport {
  size_t n_index = 0;
  mpz_class pn, qn, qn1;
  mpq_class y_lo, y_hi;
  u64 lower = 0, upper = 0;
  mpz_class middle;  // N * S = raw S count
  bool degenerate = false;  // y_lo < 0 (lower window empty by fiat)
  bool holds = false;
};
SandwichReport sandwich_check(const mpq_class& x, u64 n, const RealAlpha& alpha,
                              const ContinuedFractionExpansion& cf,
                              size_t n_index, unsigned precision_bits = 96);

// Deviation of R2 from the Poissonian value 2x, with the x^{7/8}-normalized
// column for trend inspection.  in_regime flags 1 <= x <= log N.
struct PoissonReport {
  PairCorrelationResult r2;
  double deviation = 0;      // |r2 - 2x|
  double hb_normalized = 0;  // deviation / x^{7/8}
  bool in_regime = false;
};
PoissonReport poissonian_deviation(const mpq_class& x, u64 n,
                                   const RealAlpha& alpha,
                                   unsigned precision_bits = 96);

// Exact predicate ||k * alpha|| <= threshold (k any integer).  Exposed for
// tests; the counting paths funnel through it when keys cannot decide.
bool norm_multiple_within(const mpz_class& k, const RealAlpha& alpha,
                          const mpq_class& threshold);

}  // namespace ntprobe
