// Exact integer number theory: multiplicative functions, truncated divisor
// counts and their batch (sieve) evaluation.
//
// Truncation bounds are real-valued (they arise as M/2, xq/N, ... in the
// statistics built on top), so windows carry exact rationals.  For an integer
// divisor d the test "d <= M" only ever needs floor(M), which is computed
// once, exactly, per window.

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace ntprobe {

using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;

// floor/ceil of an exact rational, as mpz.
mpz_class floor_q(const mpq_class& x);
mpz_class ceil_q(const mpq_class& x);

// floor(x) clamped into [0, 2^62]; throws std::overflow_error beyond that.
u64 floor_q_u64(const mpq_class& x);

// Rectangular truncation window (a <= m_bound, b <= n_bound).
// The symmetric window uses m_bound == n_bound.
class TruncationWindow {
 public:
  TruncationWindow(mpq_class m_bound, mpq_class n_bound);
  static TruncationWindow symmetric(const mpq_class& m) { return {m, m}; }

  const mpq_class& m_bound() const { return m_bound_; }
  const mpq_class& n_bound() const { return n_bound_; }
  u64 m_floor() const { return m_floor_; }
  u64 n_floor() const { return n_floor_; }

 private:
  mpq_class m_bound_, n_bound_;
  u64 m_floor_, n_floor_;
};

// tau(m): number of divisors. Trial division, intended for m <= ~1e12.
u64 tau(u64 m);

// tau_upto(m, M): number of divisors d <= M.
u64 tau_upto(u64 m, const mpq_class& bound);
u64 tau_upto(u64 m, u64 bound_floor);

// tau_window(m, w): number of ordered factorizations m = a*b with
// a <= m_bound, b <= n_bound.  Zero for m > m_bound*n_bound.
u64 tau_window(u64 m, const TruncationWindow& w);

// tau_window_sym(m, M) = tau_window with the symmetric window.
// Satisfies the exact three-case relation
//   tau(m)            for m <= M
//   2*tau_upto(m,M) - tau(m)   for M < m < M^2
//   0                 for m >= M^2
u64 tau_window_sym(u64 m, const mpq_class& bound);

// tau_window_parity(m, M): ordered factorizations m = a*b with a,b <= M and
// a == b (mod 2).  Case split (verified exhaustively in the tests):
//   m odd        -> tau_window_sym(m, M)
//   m == 2 mod 4 -> 0
//   m == 0 mod 4 -> tau_window_sym(m/4, M/2)
u64 tau_window_parity(u64 m, const mpq_class& bound);

// Hooley Delta: max over u of #{d | n : e^u < d <= e^{u+1}}.
// The max is attained with the window's closed end at some divisor, so it
// suffices to scan windows (d_j/e, d_j].  Membership d_i > d_j/e is decided
// exactly against a 50-digit rational enclosure of e; the enclosure is far
// tighter than any rational d_j/d_i with 64-bit entries can approach e.
u64 hooley_delta(u64 n);

int mobius(u64 n);
u64 euler_phi(u64 n);

// Sorted list of all divisors (trial-division factorization).
std::vector<u64> divisors(u64 n);

// Prime factorization as (prime, exponent) pairs, ascending.
std::vector<std::pair<u64, unsigned>> factorize(u64 n);

bool is_prime(u64 n);

// coprime_count_upto(x, q) = #{n <= x : (n,q) = 1}
//                          = sum_{d|q} mu(d) * floor(x/d).
u64 coprime_count_upto(const mpq_class& x, u64 q);

// divisor_ap_weight(q, r) = sum_{d | (q,r)} d * phi(q/d), with (q,0) = q.
// This is the arithmetic weight in the expected residue-class mean of
// divisor sums; it equals the Mobius double sum
// sum_{d|(q,r)} sum_{c|q/d} d*c*mu(q/(dc)) (checked in the tests).
u64 divisor_ap_weight(u64 q, i64 r);

// Same weight through the Mobius double sum; kept as an independent route.
i64 divisor_ap_weight_double_sum(u64 q, i64 r);

// Batch table of tau (full) or tau_window values for all m <= upper_limit.
struct DivisorSieve {
  u64 upper_limit = 0;
  std::optional<TruncationWindow> window;  // nullopt = full divisor function
  std::vector<std::uint16_t> values;       // values[m], index 0 unused

  u64 value(u64 m) const { return values[m]; }
};

// Construction marks multiples of each a <= min(m_bound, X); O(X log X).
// max_entries guards the memory budget (default 2^27 entries, ~256 MiB).
DivisorSieve sieve_divisor_values(u64 upper_limit,
                                  const std::optional<TruncationWindow>& window,
                                  u64 max_entries = u64{1} << 27);

}  // namespace ntprobe
