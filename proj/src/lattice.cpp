#include "ntprobe/lattice.hpp"

#include <cmath>

namespace ntprobe {

namespace {

// #{y integer : lo <= y <= hi} for exact rational endpoints.
mpz_class integers_between(const mpq_class& lo, const mpq_class& hi) {
  if (lo > hi) return 0;
  mpz_class n = floor_q(hi) - ceil_q(lo) + 1;
  return n < 0 ? mpz_class(0) : n;
}

mpz_class strip_column_rational(const mpq_class& x_alpha, const mpq_class& delta) {
  return integers_between(x_alpha - delta, x_alpha + delta);
}

mpz_class strip_column_surd(const QuadExpr& x_alpha, const mpq_class& delta) {
  QuadExpr hi = x_alpha + delta;
  QuadExpr lo = x_alpha - delta;
  mpz_class n = hi.floor() - lo.ceil() + 1;
  return n < 0 ? mpz_class(0) : n;
}

}  // namespace

mpz_class strip_count(const StripQuery& q) {
  if (q.delta < 0) throw std::invalid_argument("strip_count: delta >= 0");
  mpz_class m = q.m_bound < 0 ? mpz_class(0) : floor_q(q.m_bound);
  // Column x and -x match ((x,y) <-> (-x,-y)), so count x = 0 plus twice x > 0.
  mpz_class total = 2 * floor_q(q.delta) + 1;
  if (q.alpha.is_rational()) {
    const mpq_class& a = q.alpha.rational_value();
    for (mpz_class x = 1; x <= m; ++x)
      total += 2 * strip_column_rational(a * mpq_class(x), q.delta);
  } else {
    const QuadExpr a = q.alpha.exact();
    for (mpz_class x = 1; x <= m; ++x)
      total += 2 * strip_column_surd(a * mpq_class(x), q.delta);
  }
  return total;
}

ReducedBasis2D reduce_basis(const mpq_class& m_bound, const RealAlpha& alpha,
                            const mpq_class& delta) {
  if (m_bound <= 0 || delta <= 0)
    throw std::invalid_argument("reduce_basis: M, delta > 0");
  QuadExpr a = alpha.exact();
  mpq_class dm = delta / m_bound;           // delta/M
  mpq_class md = m_bound / delta;           // M/delta
  QuadExpr g11 = QuadExpr(dm) + a * a * mpq_class(md);
  QuadExpr g12 = -(a * mpq_class(md));
  QuadExpr g22{mpq_class(md)};

  ReducedBasis2D out;
  mpz_class c[2][2] = {{1, 0}, {0, 1}};
  QuadExpr B1 = g11, B2 = g22, B12 = g12;
  QuadExpr half{mpq_class(1, 2)};

  // Lagrange-Gauss on the exact Gram data.
  for (int iter = 0; iter < 1024; ++iter) {
    if (B2 < B1) {
      std::swap(B1, B2);
      std::swap(c[0][0], c[1][0]);
      std::swap(c[0][1], c[1][1]);
    }
    // mu = round(B12 / B1)
    mpz_class mu = (B12 * B1.inverse() + half).floor();
    if (mu == 0 && B1 <= B2) break;
    QuadExpr muq{mpz_class(mu)};
    QuadExpr B12_new = B12 - muq * B1;
    B2 = B2 - muq * (B12 + B12_new);
    B12 = B12_new;
    c[1][0] -= mu * c[0][0];
    c[1][1] -= mu * c[0][1];
  }
  if (B2 < B1) {
    std::swap(B1, B2);
    std::swap(c[0][0], c[1][0]);
    std::swap(c[0][1], c[1][1]);
  }

  out.lambda1_sq = B1;
  out.gram_det = B1 * B2 - B12 * B12;
  out.coeff[0][0] = c[0][0];
  out.coeff[0][1] = c[0][1];
  out.coeff[1][0] = c[1][0];
  out.coeff[1][1] = c[1][1];

  double s1 = std::sqrt(dm.get_d());
  double s2 = std::sqrt(md.get_d());
  double ad = a.to_double();
  for (int i = 0; i < 2; ++i) {
    double c1 = out.coeff[i][0].get_d(), c2 = out.coeff[i][1].get_d();
    double* w = i == 0 ? out.u : out.v;
    w[0] = c1 * s1;
    w[1] = c1 * ad * s2 - c2 * s2;
  }
  out.lambda1 = std::sqrt(B1.to_double());
  out.lambda1_lo = out.lambda1 * (1 - 1e-12);
  out.lambda1_hi = out.lambda1 * (1 + 1e-12);
  return out;
}

StripEstimate strip_count_estimate(const StripQuery& q) {
  StripEstimate est;
  est.exact = strip_count(q);
  double M = q.m_bound.get_d(), d = q.delta.get_d();
  est.main = 4 * M * d;
  ReducedBasis2D rb = reduce_basis(q.m_bound, q.alpha, q.delta);
  est.error_shape = std::sqrt(M * d) / rb.lambda1 + 1;
  est.ratio = std::abs(est.exact.get_d() - est.main) / est.error_shape;
  return est;
}

StripIdentityReport strip_divisor_identity(const mpq_class& M,
                                           const mpq_class& N,
                                           const mpq_class& K,
                                           const mpz_class& p, u64 q) {
  if (q == 0) throw std::invalid_argument("strip_divisor_identity: q >= 1");
  mpz_class pr = p % q;
  if (pr < 0) pr += q;
  mpz_class qz(q);
  if (gcd(pr, qz) != 1)
    throw std::invalid_argument("strip_divisor_identity: (p, q) = 1 required");
  if (K < 0) throw std::invalid_argument("strip_divisor_identity: K >= 0");

  u64 n0 = floor_q_u64(N);
  mpq_class delta = K / mpq_class(q);
  mpz_class lhs = 0;
  for (u64 a = 1; a <= n0; ++a) {
    mpq_class xa(mpz_class(a) * pr, qz);
    xa.canonicalize();
    StripQuery sq{M, RealAlpha::rational(xa), delta};
    lhs += strip_count(sq);
  }

  // Residue histogram of tau_window over m, then walk r in [-K, K].
  TruncationWindow w(M, N);
  ClassSumTable table = build_class_sums(w, q);
  mpz_class pinv;
  if (!mpz_invert(pinv.get_mpz_t(), pr.get_mpz_t(), qz.get_mpz_t()))
    throw std::logic_error("strip_divisor_identity: p not invertible");
  u64 pinv_u = mpz_get_ui(mpz_class(pinv % qz).get_mpz_t());

  u64 kf = K < 1 ? 0 : floor_q_u64(K);
  mpz_class sum = 0;
  for (i64 r = -static_cast<i64>(kf); r <= static_cast<i64>(kf); ++r) {
    u64 rr = static_cast<u64>(((r % static_cast<i64>(q)) + static_cast<i64>(q)) %
                              static_cast<i64>(q));
    u64 s = static_cast<u64>(static_cast<u128>(rr) * pinv_u % q);
    sum += table.totals[s];
  }

  StripIdentityReport rep;
  rep.lhs = lhs;
  u64 kq = floor_q_u64(K / mpq_class(q));
  rep.rhs = mpz_class(n0) * (2 * mpz_class(kq) + 1) + 2 * sum;
  rep.rhs_flat = mpz_class(n0) + 2 * sum;
  rep.equal = rep.lhs == rep.rhs;
  return rep;
}

mpz_class coprime_strip_triples(const mpq_class& A, const mpq_class& B,
                                const mpq_class& D, const mpq_class& beta) {
  if (D < 0) throw std::invalid_argument("coprime_strip_triples: D >= 0");
  u64 a_max = A < 1 ? 0 : floor_q_u64(A);
  u64 b_max = B < 1 ? 0 : floor_q_u64(B);
  mpz_class count = 0;
  for (u64 a = 1; a <= a_max; ++a) {
    for (u64 b = 1; b <= b_max; ++b) {
      mpz_class m = mpz_class(a) * mpz_class(b);
      mpq_class center = beta * mpq_class(m);
      mpz_class z = ceil_q(center - D);
      mpz_class z_hi = floor_q(center + D);
      for (; z <= z_hi; ++z) {
        mpz_class g = gcd(m, z < 0 ? mpz_class(-z) : z);
        if (z == 0 ? m == 1 : g == 1) ++count;
      }
    }
  }
  return count;
}

}  // namespace ntprobe
