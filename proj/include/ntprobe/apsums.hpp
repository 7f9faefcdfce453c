// Residue-class sums of truncated divisor counts, their predicted main
// terms, and the three variance statistics built on one class-sum table.
//
// Everything aggregates from ClassSumTable: one O(M*N) pass gives totals[s]
// = sum over m == s (mod q) of tau_window(m), after which each statistic is
// O(q*K) or O(phi(q)*K).  Naive evaluation (a divisor sum per residue per
// multiplier) would be hopeless at the scales the variance trends need.
//
// Multiplicity convention: sums over r <= K run over the integers
// r = 1..floor(K).  When K > q two different r may land in the same residue
// class and are counted twice; that is the iterated-sum reading and it
// changes results for K > q, so it is pinned by tests.

#pragma once

#include "ntprobe/intmath.hpp"

namespace ntprobe {

struct ClassSumTable {
  u64 modulus = 1;
  TruncationWindow window;
  std::vector<u64> totals;  // totals[s], s = 0..q-1
  u64 grand_total = 0;      // = m_floor * n_floor
};

// Double loop over a <= M, b <= N incrementing totals[a*b mod q].
// max_pairs guards the time budget.
ClassSumTable build_class_sums(const TruncationWindow& w, u64 q,
                               u64 max_pairs = u64{2} << 30);

// sum_{r=1..floor(K)} totals[(rho*r) mod q]; requires (rho, q) = 1.
u64 ap_window_sum(const ClassSumTable& t, u64 rho, const mpq_class& K);

// K*M*N/q, exact.
mpq_class main_term(const mpq_class& M, const mpq_class& N, const mpq_class& K,
                    u64 q);

u64 ap_single_class_sum(const ClassSumTable& t, u64 r);

// (M*N/q^2) * divisor_ap_weight(q, r), exact.
mpq_class predicted_single_main(const mpq_class& M, const mpq_class& N, u64 q,
                                i64 r);

enum class VarianceKind { over_shifts, over_gcd_class, over_multipliers };

struct VarianceReport {
  VarianceKind statistic;
  u64 modulus = 1;
  mpq_class K = 0;            // 0 for the gcd-class statistic
  u64 gcd_class = 0;          // k for over_gcd_class, else 0
  u64 rho = 0;                // multiplier for over_shifts, else 0
  mpq_class observed = 0;     // exact sum of squared deviations
  mpq_class predicted_main = 0;  // the per-term target the deviations use
  double normalized = 0.0;
  // Expected decay: normalized ~ N^trend_exponent (epsilon suppressed),
  // computed from the instance's effective delta = 2 - log_N q and
  // eta = log_N K.
  double trend_exponent = 0.0;
  // over_shifts only: residues s with |1 - q*W_s/(KMN)| > nu.
  u64 bad_count = 0;
  double nu = 0.0;
};

// sum over shifts s = 0..q-1 of (W_s - KMN/q)^2 with
// W_s = sum_{r<=K} totals[(rho*r + s) mod q]; normalized by q/(K^2 N^4).
// (Summing s over a full residue cycle; the 1..q and 0..q-1 readings agree.)
VarianceReport variance_over_shifts(const ClassSumTable& t, u64 rho,
                                    const mpq_class& K, double nu = 0.1);

// sum over r with (r, q) = k of (totals[r] - (MN/q^2) W(q,k))^2 where the
// weight W runs through the Mobius double sum; normalized by q/N^{7/2}.
VarianceReport variance_over_gcd_class(const ClassSumTable& t, u64 k);

// sum over (rho, q) = 1 of (S_rho - KMN/q)^2; normalized to the mean-square
// relative deviation (1/phi(q)) sum (q S_rho/(KMN) - 1)^2.
VarianceReport variance_over_multipliers(const ClassSumTable& t,
                                         const mpq_class& K);

struct MultiplierMean {
  mpz_class observed_sum;  // sum over (rho,q)=1 of S_rho
  mpq_class predicted;     // phi(q) K M N / q
};

MultiplierMean mean_over_multipliers(const ClassSumTable& t, const mpq_class& K);

// #{(a,b) : a <= M, b <= N, (ab, q) = k} for k | q, through the factored
// form sum_{l|k} #{b : (b,q) = l} * #{a : (a, q/l) = k/l}.
mpz_class coprime_pair_count(const mpq_class& M, const mpq_class& N, u64 q,
                             u64 k);

// Full-cycle identity: sum_{r=1}^{q} (Mobius double sum weight) = q^2.
struct CycleIdentity {
  mpz_class lhs;
  mpz_class rhs;  // q^2
  bool equal() const { return lhs == rhs; }
};
CycleIdentity ap_weight_cycle_identity(u64 q);

// Partial sum over r <= K of the same weight; main term K*q.
struct CyclePartial {
  mpz_class lhs;
  mpq_class main;
};
CyclePartial ap_weight_partial_sum(u64 q, const mpq_class& K);

// The three gcd-window double sums
//   S1 = sum_{r<=K} sum_{d<=N, (d,q)|r} (d,q)
//   S2 = sum_{r<=K} sum_{d<=N, (d,q)|r} (d,q)/d
//   S3 = sum_{r<=K} r * sum_{d<=N, (d,q)|r} (d,q)
// with main terms K*N, K*log N, N*K^2/2.
struct GcdWindowSums {
  mpz_class s1;
  mpq_class s2;
  mpz_class s3;
  double main1 = 0, main2 = 0, main3 = 0;
};
GcdWindowSums gcd_window_sums(u64 q, const mpq_class& K, const mpq_class& N);

// sum over x < n <= x+y, n == r (mod q) of tau_upto(n, N_trunc), plus the
// scale-free ratio sum * q^2 / (y * phi(q) * log N_trunc).
struct IntervalTauSum {
  u64 sum = 0;
  double bound_ratio = 0;
};
IntervalTauSum ap_interval_tau_sum(u64 x, u64 y, u64 q, u64 r, u64 n_trunc);

// sum over m == r (mod q) of tau_window_sym(m, N) (finite, m < N^2), plus
// the ratio sum * q^2 / (phi(q) * N^2).
struct SymWindowApSum {
  u64 sum = 0;
  double hb_ratio = 0;
};
SymWindowApSum ap_sym_window_sum(const mpq_class& N, u64 q, u64 r);

}  // namespace ntprobe
