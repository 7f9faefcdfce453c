#include "ntprobe/apsums.hpp"

#include <cmath>
#include <numeric>

namespace ntprobe {

namespace {

mpq_class mpq_sq(const mpq_class& x) { return x * x; }

double log_ratio(double num, double den) { return std::log(num) / std::log(den); }

// Effective exponents of the instance: q = N^{2-delta}, K = N^{eta}.
void fill_trend(VarianceReport& r, const ClassSumTable& t) {
  double N = t.window.n_bound().get_d();
  if (N <= 1) return;
  double delta = 2.0 - log_ratio(static_cast<double>(t.modulus), N);
  double K = r.K.get_d();
  double eta = K >= 1 ? log_ratio(K, N) : 0.0;
  switch (r.statistic) {
    case VarianceKind::over_shifts:
      r.trend_exponent = -std::min({0.5, delta, eta});
      break;
    case VarianceKind::over_gcd_class:
      r.trend_exponent = std::max(0.0, 0.5 - delta);
      break;
    case VarianceKind::over_multipliers:
      r.trend_exponent = -std::min({0.5, delta, 2 * eta});
      break;
  }
}

}  // namespace

ClassSumTable build_class_sums(const TruncationWindow& w, u64 q, u64 max_pairs) {
  if (q == 0) throw std::invalid_argument("build_class_sums: q >= 1");
  u64 a_max = w.m_floor(), b_max = w.n_floor();
  if (a_max > max_pairs / (b_max ? b_max : 1))
    throw std::length_error("build_class_sums: pair budget exceeded");
  ClassSumTable t{q, w, std::vector<u64>(q, 0), a_max * b_max};
  for (u64 a = 1; a <= a_max; ++a) {
    u64 step = a % q;
    u64 m = 0;
    for (u64 b = 1; b <= b_max; ++b) {
      m += step;
      if (m >= q) m -= q;
      ++t.totals[m];
    }
  }
  return t;
}

u64 ap_window_sum(const ClassSumTable& t, u64 rho, const mpq_class& K) {
  u64 q = t.modulus;
  if (std::gcd(rho % q, q) != 1)  // gcd(0, q) = q, so rho == 0 mod q rejects
    throw std::invalid_argument("ap_window_sum: (rho, q) = 1 required");
  if (K < 1) return 0;
  u64 kf = floor_q_u64(K);
  u64 step = rho % q;
  u64 res = 0, sum = 0;
  for (u64 r = 1; r <= kf; ++r) {
    res += step;
    if (res >= q) res -= q;
    sum += t.totals[res];
  }
  return sum;
}

mpq_class main_term(const mpq_class& M, const mpq_class& N, const mpq_class& K,
                    u64 q) {
  mpq_class r = K * M * N / mpq_class(q);
  r.canonicalize();
  return r;
}

u64 ap_single_class_sum(const ClassSumTable& t, u64 r) {
  return t.totals.at(r % t.modulus);
}

mpq_class predicted_single_main(const mpq_class& M, const mpq_class& N, u64 q,
                                i64 r) {
  mpq_class w(divisor_ap_weight(q, r));
  mpq_class out = M * N * w / mpq_class(mpz_class(q) * mpz_class(q));
  out.canonicalize();
  return out;
}

VarianceReport variance_over_shifts(const ClassSumTable& t, u64 rho,
                                    const mpq_class& K, double nu) {
  u64 q = t.modulus;
  if (std::gcd(rho % q, q) != 1)
    throw std::invalid_argument("variance_over_shifts: (rho, q) = 1 required");
  VarianceReport rep;
  rep.statistic = VarianceKind::over_shifts;
  rep.modulus = q;
  rep.K = K;
  rep.rho = rho;
  rep.nu = nu;
  rep.predicted_main =
      main_term(t.window.m_bound(), t.window.n_bound(), K, q);

  // W_s for every shift: accumulate the shifted residue windows directly.
  u64 kf = K < 1 ? 0 : floor_q_u64(K);
  std::vector<u64> w(q, 0);
  u64 step = rho % q, res = 0;
  for (u64 r = 1; r <= kf; ++r) {
    res += step;
    if (res >= q) res -= q;
    // residue (rho r + s) mod q contributes totals[...] to shift s; equivalently
    // W_s = sum over window residues res of totals[(res + s) mod q].
    for (u64 s = 0; s < q; ++s) {
      u64 idx = res + s;
      if (idx >= q) idx -= q;
      w[s] += t.totals[idx];
    }
  }

  mpq_class obs = 0;
  u64 bad = 0;
  mpq_class scale = rep.predicted_main;
  for (u64 s = 0; s < q; ++s) {
    mpq_class dev = mpq_class(w[s]) - scale;
    obs += mpq_sq(dev);
    if (scale != 0) {
      mpq_class rel = dev / scale;
      if (std::abs(rel.get_d()) > nu) ++bad;
    }
  }
  obs.canonicalize();
  rep.observed = obs;
  rep.bad_count = bad;
  mpq_class n4 = mpq_sq(mpq_sq(t.window.n_bound()));
  mpq_class norm = obs * mpq_class(q) / (mpq_sq(K) * n4);
  rep.normalized = norm.get_d();
  fill_trend(rep, t);
  return rep;
}

VarianceReport variance_over_gcd_class(const ClassSumTable& t, u64 k) {
  u64 q = t.modulus;
  if (k == 0 || q % k != 0)
    throw std::invalid_argument("variance_over_gcd_class: k | q required");
  VarianceReport rep;
  rep.statistic = VarianceKind::over_gcd_class;
  rep.modulus = q;
  rep.gcd_class = k;
  // Main term through the Mobius double-sum route; the dphi form is the
  // cross-checked equivalent.
  mpq_class weight(divisor_ap_weight_double_sum(q, static_cast<i64>(k)));
  mpq_class mainv = t.window.m_bound() * t.window.n_bound() * weight /
                    mpq_class(mpz_class(q) * mpz_class(q));
  mainv.canonicalize();
  rep.predicted_main = mainv;

  mpq_class obs = 0;
  for (u64 r = 0; r < q; ++r) {
    u64 g = r == 0 ? q : std::gcd(r, q);
    if (g != k) continue;
    mpq_class dev = mpq_class(t.totals[r]) - mainv;
    obs += mpq_sq(dev);
  }
  obs.canonicalize();
  rep.observed = obs;
  double n = t.window.n_bound().get_d();
  rep.normalized = obs.get_d() * static_cast<double>(q) / std::pow(n, 3.5);
  fill_trend(rep, t);
  return rep;
}

VarianceReport variance_over_multipliers(const ClassSumTable& t,
                                         const mpq_class& K) {
  u64 q = t.modulus;
  VarianceReport rep;
  rep.statistic = VarianceKind::over_multipliers;
  rep.modulus = q;
  rep.K = K;
  rep.predicted_main = main_term(t.window.m_bound(), t.window.n_bound(), K, q);
  mpq_class obs = 0;
  u64 phi = 0;
  for (u64 rho = 1; rho <= q; ++rho) {
    if (std::gcd(rho % q, q) != 1) continue;
    ++phi;
    u64 s = ap_window_sum(t, rho, K);
    obs += mpq_sq(mpq_class(s) - rep.predicted_main);
  }
  obs.canonicalize();
  rep.observed = obs;
  // Mean-square relative deviation (1/phi) sum (q S/(KMN) - 1)^2.
  if (rep.predicted_main != 0) {
    mpq_class norm = obs / (mpq_class(phi) * mpq_sq(rep.predicted_main));
    rep.normalized = norm.get_d();
  }
  fill_trend(rep, t);
  return rep;
}

MultiplierMean mean_over_multipliers(const ClassSumTable& t, const mpq_class& K) {
  u64 q = t.modulus;
  MultiplierMean m;
  m.observed_sum = 0;
  for (u64 rho = 1; rho <= q; ++rho) {
    if (std::gcd(rho % q, q) != 1) continue;
    m.observed_sum += ap_window_sum(t, rho, K);
  }
  m.predicted = mpq_class(euler_phi(q)) *
                main_term(t.window.m_bound(), t.window.n_bound(), K, q);
  m.predicted.canonicalize();
  return m;
}

mpz_class coprime_pair_count(const mpq_class& M, const mpq_class& N, u64 q,
                             u64 k) {
  if (k == 0 || q % k != 0)
    throw std::invalid_argument("coprime_pair_count: k | q required");
  mpz_class total = 0;
  for (u64 l : divisors(k)) {
    // b = l*b' with (b', q/l) = 1 and b' <= N/l
    u64 nb = coprime_count_upto(N / mpq_class(l), q / l);
    // a = (k/l)*a' with (a', q/k) = 1 and a' <= M*l/k
    u64 na = coprime_count_upto(M * mpq_class(l) / mpq_class(k), q / k);
    total += mpz_class(nb) * mpz_class(na);
  }
  return total;
}

CycleIdentity ap_weight_cycle_identity(u64 q) {
  CycleIdentity id;
  id.lhs = 0;
  for (u64 r = 1; r <= q; ++r)
    id.lhs += divisor_ap_weight_double_sum(q, static_cast<i64>(r));
  id.rhs = mpz_class(q) * mpz_class(q);
  return id;
}

CyclePartial ap_weight_partial_sum(u64 q, const mpq_class& K) {
  CyclePartial p;
  p.lhs = 0;
  u64 kf = K < 1 ? 0 : floor_q_u64(K);
  for (u64 r = 1; r <= kf; ++r)
    p.lhs += divisor_ap_weight_double_sum(q, static_cast<i64>(r));
  p.main = K * mpq_class(q);
  p.main.canonicalize();
  return p;
}

GcdWindowSums gcd_window_sums(u64 q, const mpq_class& K, const mpq_class& N) {
  if (q == 0) throw std::invalid_argument("gcd_window_sums: q >= 1");
  u64 kf = K < 1 ? 0 : floor_q_u64(K);
  u64 nf = N < 1 ? 0 : floor_q_u64(N);

  // Bucket d <= N by g = (d, q); then r-sums reduce to floor(K/g) counts.
  GcdWindowSums out;
  out.s1 = 0;
  out.s2 = 0;
  out.s3 = 0;
  std::vector<u64> divs = divisors(q);
  std::vector<mpz_class> cnt(divs.size(), 0);
  std::vector<mpq_class> inv_sum(divs.size(), 0);
  for (u64 d = 1; d <= nf; ++d) {
    u64 g = std::gcd(d, q);
    size_t idx = std::lower_bound(divs.begin(), divs.end(), g) - divs.begin();
    cnt[idx] += 1;
    inv_sum[idx] += mpq_class(1, d);
  }
  for (size_t i = 0; i < divs.size(); ++i) {
    u64 g = divs[i];
    mpz_class reps = kf / g;  // #{r <= K : g | r}
    out.s1 += mpz_class(g) * cnt[i] * reps;
    out.s2 += mpq_class(g) * inv_sum[i] * mpq_class(reps);
    // sum of those r: g * reps * (reps + 1) / 2
    mpz_class rsum = mpz_class(g) * reps * (reps + 1) / 2;
    out.s3 += mpz_class(g) * cnt[i] * rsum;
  }
  out.s2.canonicalize();
  double Kd = K.get_d(), Nd = N.get_d();
  out.main1 = Kd * Nd;
  out.main2 = Kd * std::log(Nd);
  out.main3 = Nd * Kd * Kd / 2;
  return out;
}

IntervalTauSum ap_interval_tau_sum(u64 x, u64 y, u64 q, u64 r, u64 n_trunc) {
  if (q == 0 || std::gcd(r % q == 0 ? q : r % q, q) != 1)
    throw std::invalid_argument("ap_interval_tau_sum: (r, q) = 1 required");
  IntervalTauSum out;
  u64 first = x + 1;
  u64 rr = r % q;
  u64 n = first + ((rr + q - first % q) % q);
  for (; n <= x + y; n += q) out.sum += tau_upto(n, n_trunc);
  double phi = static_cast<double>(euler_phi(q));
  double logN = std::log(static_cast<double>(n_trunc));
  if (y > 0 && phi > 0 && logN > 0)
    out.bound_ratio = static_cast<double>(out.sum) * q * q /
                      (static_cast<double>(y) * phi * logN);
  return out;
}

SymWindowApSum ap_sym_window_sum(const mpq_class& N, u64 q, u64 r) {
  if (q == 0 || std::gcd(r % q == 0 ? q : r % q, q) != 1)
    throw std::invalid_argument("ap_sym_window_sum: (r, q) = 1 required");
  u64 nf = N < 1 ? 0 : floor_q_u64(N);
  if (nf > (u64{1} << 16))
    throw std::length_error("ap_sym_window_sum: pair budget exceeded");
  // Sum over pairs: #{(a,b) <= N : ab == r (mod q)}.
  SymWindowApSum out;
  u64 rr = r % q;
  for (u64 a = 1; a <= nf; ++a) {
    u64 step = a % q;
    u64 m = 0;
    for (u64 b = 1; b <= nf; ++b) {
      m += step;
      if (m >= q) m -= q;
      if (m == rr) ++out.sum;
    }
  }
  double Nd = N.get_d();
  out.hb_ratio = static_cast<double>(out.sum) * q * q /
                 (static_cast<double>(euler_phi(q)) * Nd * Nd);
  return out;
}

}  // namespace ntprobe
