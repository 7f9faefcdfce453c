// Lattice-point counting in thin strips |x*alpha - y| <= delta, the reduced
// basis / shortest-vector data controlling the count's error, and the exact
// identity tying the summed strip counts to residue-class divisor sums.

#pragma once

#include "ntprobe/apsums.hpp"
#include "ntprobe/quadexpr.hpp"
#include "ntprobe/realalpha.hpp"

namespace ntprobe {

struct StripQuery {
  mpq_class m_bound;  // |x| <= M
  RealAlpha alpha;
  mpq_class delta;    // strip half-width
};

// Exact #{(x,y) integer : |x*alpha - y| <= delta, |x| <= M}.
mpz_class strip_count(const StripQuery& q);

// Lagrange-reduced basis of the lattice spanned by
//   u = (sqrt(delta/M), alpha*sqrt(M/delta)),  v = (0, -sqrt(M/delta)).
// The Gram matrix of (u, v) is exact in Q(sqrt(d)), so the reduction runs
// on exact scalars; only the reported vector entries and lambda1 round.
struct ReducedBasis2D {
  double u[2] = {0, 0}, v[2] = {0, 0};  // reduced vectors, working precision
  QuadExpr lambda1_sq;                  // exact |shortest|^2
  double lambda1 = 0;
  double lambda1_lo = 0, lambda1_hi = 0;  // enclosure (relative inflation)
  QuadExpr gram_det;                      // exact; must equal 1
  mpz_class coeff[2][2];                  // reduced basis in terms of (u, v)
};

ReducedBasis2D reduce_basis(const mpq_class& m_bound, const RealAlpha& alpha,
                            const mpq_class& delta);

// Exact count next to the area term 4*M*delta and the error shape
// sqrt(M*delta)/lambda1 + 1; ratio tracks the empirical constant.
struct StripEstimate {
  mpz_class exact;
  double main = 0;
  double error_shape = 0;
  double ratio = 0;  // |exact - main| / error_shape
};
StripEstimate strip_count_estimate(const StripQuery& q);

// sum_{a <= N} strip_count(M, a*p/q, K/q)
//   = N*(2*floor(K/q) + 1) + 2 * sum_{|r| <= K} sum_{p*m == r (q)} tau_window(m).
// The first term is the x = 0 column; it reduces to the bare N whenever
// K < q (the delta < 1 regime the identity is normally quoted in).  rhs_flat
// records that plain N + 2*sum form.
struct StripIdentityReport {
  mpz_class lhs;
  mpz_class rhs;       // with the exact x = 0 column
  mpz_class rhs_flat;  // N + 2*sum
  bool equal = false;  // lhs == rhs
};
StripIdentityReport strip_divisor_identity(const mpq_class& M,
                                           const mpq_class& N,
                                           const mpq_class& K,
                                           const mpz_class& p, u64 q);

// #{(a,b,z) : a <= A, b <= B, z integer, (ab, z) = 1, |ab*beta - z| <= D}.
mpz_class coprime_strip_triples(const mpq_class& A, const mpq_class& B,
                                const mpq_class& D, const mpq_class& beta);

}  // namespace ntprobe
