#include "ntprobe/contfrac.hpp"

namespace ntprobe {

ContinuedFractionExpansion continued_fraction(const RealAlpha& alpha,
                                              size_t count) {
  if (count == 0) throw std::invalid_argument("continued_fraction: count >= 1");
  if (alpha.is_fixed())
    throw std::invalid_argument(
        "continued_fraction: fixed-point input not supported");

  ContinuedFractionExpansion cf;
  mpz_class pm1 = 1, pm2 = 0, qm1 = 0, qm2 = 1;  // p_{-1}, p_{-2}, ...

  auto push = [&](const mpz_class& a) {
    mpz_class p = a * pm1 + pm2;
    mpz_class q = a * qm1 + qm2;
    cf.a_.push_back(a);
    cf.conv_.push_back({p, q});
    pm2 = pm1;
    pm1 = p;
    qm2 = qm1;
    qm1 = q;
  };

  if (alpha.is_rational()) {
    mpz_class num = alpha.rational_value().get_num();
    mpz_class den = alpha.rational_value().get_den();
    while (cf.conv_.size() < count) {
      mpz_class a;
      mpz_fdiv_q(a.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
      push(a);
      mpz_class rem = num - a * den;
      if (rem == 0) {
        cf.complete_ = true;
        break;
      }
      num = den;
      den = rem;
    }
    return cf;
  }

  // Surd (a + b*sqrt(d))/c as (P + sqrt(D))/Q with Q | D - P^2:
  //   b > 0:  P = a*c, D = b^2*d*c^2, Q = c^2
  //   b < 0:  P = -a*c, D = b^2*d*c^2, Q = -c^2
  const QuadExpr& x = alpha.surd_value();
  mpz_class P = x.a() * x.c();
  mpz_class D = x.b() * x.b() * x.d() * x.c() * x.c();
  mpz_class Q = x.c() * x.c();
  if (x.b() < 0) {
    P = -P;
    Q = -Q;
  }
  while (cf.conv_.size() < count) {
    // a_k = floor((P + sqrt(D)) / Q), exact.
    QuadExpr term = Q > 0 ? QuadExpr(P, 1, D, Q) : QuadExpr(-P, -1, D, -Q);
    mpz_class a = term.floor();
    push(a);
    P = a * Q - P;
    mpz_class num = D - P * P;
    if (num % Q != 0)
      throw std::logic_error("continued_fraction: recurrence invariant broken");
    Q = num / Q;
    if (Q == 0)
      throw std::logic_error("continued_fraction: square radicand slipped in");
  }
  return cf;
}

std::optional<size_t> convergent_in_range(const ContinuedFractionExpansion& cf,
                                          const mpq_class& lo,
                                          const mpq_class& hi) {
  if (lo > hi) return std::nullopt;
  mpq_class qmax = 0;
  for (size_t n = 0; n < cf.size(); ++n) {
    mpq_class q(cf.convergent(n).q);
    if (q >= lo && q <= hi) return n;
    if (q > qmax) qmax = q;
  }
  if (qmax <= hi && !cf.complete())
    throw std::runtime_error(
        "convergent_in_range: expansion too short to decide");
  return std::nullopt;
}

mpq_class rational_type_constant(const mpz_class& p, const mpz_class& q,
                                 unsigned e) {
  if (q <= 0) throw std::invalid_argument("rational_type_constant: q >= 1");
  if (e < 2) throw std::invalid_argument("rational_type_constant: e >= 2");
  if (gcd(p, q) != 1)
    throw std::invalid_argument("rational_type_constant: (p,q) = 1 required");
  mpq_class best = 0;
  for (mpz_class v = 1; v <= q; ++v) {
    mpz_class t = p * v % q;
    if (t < 0) t += q;
    mpz_class dist = std::min(t, mpz_class(q - t));
    mpz_class ve;  // v^{e-1}
    mpz_pow_ui(ve.get_mpz_t(), v.get_mpz_t(), e - 1);
    mpq_class contrib;
    if (dist == 0) {
      contrib = mpq_class(1, ve);  // q | v: nearest distinct u gives |pv-uq| = q
    } else {
      contrib = mpq_class(q, dist * ve);
    }
    contrib.canonicalize();
    if (contrib > best) best = contrib;
  }
  return best;
}

}  // namespace ntprobe
