#include "ntprobe/paircorr.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ntprobe {

namespace {

// ---------------------------------------------------------------------
// Certified 128-bit keys for frac(n^2 alpha).
//
// Key k approximates frac * 2^128 with |error| <= 2 ulps.  Pairwise key
// distances therefore carry <= 4 ulps of error; every comparison against a
// threshold keeps an 8-ulp guard band and falls back to the exact field
// predicate inside it.  For surd alpha the band is provably tie-free, so
// the fallback always decides.
// ---------------------------------------------------------------------

u128 to_u128(const mpz_class& z) {
  mpz_class lo = z & mpz_class((mpz_class(1) << 64) - 1);
  mpz_class hi = z >> 64;
  return (static_cast<u128>(mpz_get_ui(hi.get_mpz_t())) << 64) |
         static_cast<u128>(mpz_get_ui(lo.get_mpz_t()));
}

struct FracKeys {
  std::vector<u128> by_n;  // by_n[i] = key of frac((i+1)^2 alpha)
};

FracKeys build_keys(u64 n, const RealAlpha& alpha) {
  FracKeys fk;
  fk.by_n.resize(n);
  if (alpha.is_rational()) {
    const mpq_class& r = alpha.rational_value();
    const mpz_class& p = r.get_num();
    const mpz_class& q = r.get_den();
    mpz_class s, key;
    for (u64 i = 1; i <= n; ++i) {
      s = mpz_class(i) * mpz_class(i) % q * p % q;
      if (s < 0) s += q;
      key = (s << 128) / q;
      fk.by_n[i - 1] = to_u128(key);
    }
    return fk;
  }
  const QuadExpr x = alpha.exact();
  mpz_class n2_max = mpz_class(n) * mpz_class(n);
  unsigned scale = 136 + mpz_sizeinbase(n2_max.get_mpz_t(), 2);
  mpz_class a = x.scaled_floor(scale);  // a <= alpha 2^s < a + 1
  mpz_class two_s = mpz_class(1) << scale;
  mpz_class pm, n2;
  for (u64 i = 1; i <= n; ++i) {
    n2 = mpz_class(i) * mpz_class(i);
    pm = n2 * a;
    mpz_fdiv_r_2exp(pm.get_mpz_t(), pm.get_mpz_t(), scale);
    if (pm + n2 >= two_s) {
      // The enclosure straddles an integer: settle this n exactly.
      QuadExpr f = (x * mpq_class(n2)).frac();
      fk.by_n[i - 1] = to_u128(f.scaled_floor(128));
    } else {
      fk.by_n[i - 1] = to_u128(pm >> (scale - 128));
    }
  }
  return fk;
}

enum class Region { in, out, band };

struct ThresholdBands {
  u128 t_key = 0;   // floor(threshold * 2^128)
  bool has_in = false;
  u128 in_max = 0;    // d <= in_max certainly within
  u128 band_max = 0;  // d <= band_max needs the exact predicate
};

ThresholdBands make_bands(const mpq_class& threshold) {
  ThresholdBands b;
  mpz_class t = floor_q(threshold * mpq_class(mpz_class(1) << 128));
  b.t_key = to_u128(t);
  b.has_in = b.t_key >= 8;
  b.in_max = b.has_in ? b.t_key - 8 : 0;
  b.band_max = b.t_key + 8;
  return b;
}

// Classify an absolute key distance d = |k_i - k_j| (no wrap) against the
// circular predicate min(delta, 1 - delta) <= threshold.
Region classify(u128 d, const ThresholdBands& b) {
  if (b.has_in && d <= b.in_max) return Region::in;
  if (d <= b.band_max) return Region::band;
  u128 c = static_cast<u128>(0) - d;  // 2^128 - d (d > band_max >= 8 here)
  if (b.has_in && c <= b.in_max) return Region::in;
  if (c <= b.band_max) return Region::band;
  return Region::out;
}

}  // namespace

bool norm_multiple_within(const mpz_class& k, const RealAlpha& alpha,
                          const mpq_class& threshold) {
  if (threshold < 0) return false;
  if (alpha.is_rational()) {
    const mpq_class& r = alpha.rational_value();
    const mpz_class& q = r.get_den();
    mpz_class s = k % q * r.get_num() % q;
    if (s < 0) s += q;
    mpz_class dist = std::min(s, mpz_class(q - s));
    // dist/q <= threshold
    return dist * threshold.get_den() <= threshold.get_num() * q;
  }
  QuadExpr v = alpha.exact() * mpq_class(k);
  QuadExpr f = v.frac();
  QuadExpr one_minus = QuadExpr(1) - f;
  QuadExpr nrm = one_minus < f ? one_minus : f;
  return nrm <= QuadExpr(threshold);
}

namespace {

// Count unordered pairs within circular distance x/n; shared exact-band
// plumbing for the naive and sorted algorithms.
mpz_class count_pairs_naive(const FracKeys& fk, const ThresholdBands& bands,
                            const RealAlpha& alpha, const mpq_class& threshold) {
  const auto& k = fk.by_n;
  u64 n = k.size();
  mpz_class count = 0;
  for (u64 i = 0; i < n; ++i) {
    for (u64 j = i + 1; j < n; ++j) {
      u128 d = k[i] >= k[j] ? k[i] - k[j] : k[j] - k[i];
      switch (classify(d, bands)) {
        case Region::in:
          ++count;
          break;
        case Region::out:
          break;
        case Region::band: {
          mpz_class diff = mpz_class(j + 1) * mpz_class(j + 1) -
                           mpz_class(i + 1) * mpz_class(i + 1);
          if (norm_multiple_within(diff, alpha, threshold)) ++count;
          break;
        }
      }
    }
  }
  return count;
}

mpz_class count_pairs_sorted(const FracKeys& fk, const ThresholdBands& bands,
                             const RealAlpha& alpha, const mpq_class& threshold) {
  u64 n = fk.by_n.size();
  std::vector<std::pair<u128, u64>> s(n);
  for (u64 i = 0; i < n; ++i) s[i] = {fk.by_n[i], i + 1};
  std::sort(s.begin(), s.end());

  auto resolve = [&](u64 a, u64 b) {  // original indices
    mpz_class diff = mpz_class(a) * mpz_class(a) - mpz_class(b) * mpz_class(b);
    return norm_multiple_within(diff, alpha, threshold);
  };
  auto first_ge = [&](u64 from, u128 key) {  // first index >= from with k >= key
    return static_cast<u64>(
        std::lower_bound(s.begin() + from, s.end(), key,
                         [](const std::pair<u128, u64>& e, u128 k) {
                           return e.first < k;
                         }) -
        s.begin());
  };
  auto last_le = [&](u64 from, u128 key) {  // last index >= from with k <= key,
    return first_ge(from, key + 1) - 1;     // valid only if key < 2^128-1
  };

  // Linear decomposition of the circular window: pairs i < j with
  // k_j - k_i <= t (near side) or k_j - k_i >= 1 - t (wrap side).
  mpz_class count = 0;

  for (u64 i = 0; i < n; ++i) {
    u128 ki = s[i].first;

    // Near side.  A threshold that reaches 2^128 covers every later key.
    const u128 kmax = ~static_cast<u128>(0);
    u64 cert_hi = i;
    if (bands.has_in) {
      u128 th = ki + bands.in_max;
      cert_hi = (th < ki || th == kmax) ? n - 1 : last_le(i, th);
    }
    u128 thb = ki + bands.band_max;
    u64 band_hi = (thb < ki || thb == kmax) ? n - 1 : last_le(i, thb);
    count += cert_hi - i;
    for (u64 j = cert_hi + 1; j <= band_hi && j < n; ++j)
      if (resolve(s[i].second, s[j].second)) ++count;

    // Wrap side: k_j - k_i >= 2^128 - (T + 8) possible only if ki < T + 8.
    if (ki < bands.band_max) {
      u128 start_band = ki + (static_cast<u128>(0) - bands.band_max);
      u64 jband = first_ge(i + 1, start_band);
      u64 jin = n;
      if (bands.has_in && ki < bands.in_max)
        jin = first_ge(i + 1, ki + (static_cast<u128>(0) - bands.in_max));
      if (jin < n) count += n - jin;
      for (u64 j = jband; j < jin && j < n; ++j)
        if (resolve(s[i].second, s[j].second)) ++count;
    }
  }

  return count;
}

PairCorrelationResult r2_impl(const mpq_class& x, u64 n, const RealAlpha& alpha,
                              R2Algorithm alg) {
  if (n < 2) throw std::invalid_argument("r2: N >= 2 required");
  if (x <= 0) throw std::invalid_argument("r2: x > 0 required");
  PairCorrelationResult res;
  res.x = x;
  res.n = n;
  res.algorithm = alg;
  mpq_class threshold = x / mpq_class(n);
  if (threshold * 2 >= 1) {
    // Window covers the whole circle.
    res.pair_count = mpz_class(n) * mpz_class(n - 1);
  } else {
    FracKeys fk = build_keys(n, alpha);
    ThresholdBands bands = make_bands(threshold);
    mpz_class unordered = alg == R2Algorithm::naive
                              ? count_pairs_naive(fk, bands, alpha, threshold)
                              : count_pairs_sorted(fk, bands, alpha, threshold);
    res.pair_count = 2 * unordered;
  }
  res.r2_value = mpq_class(res.pair_count, n);
  res.r2_value.canonicalize();
  return res;
}

}  // namespace

PairCorrelationResult r2_naive(const mpq_class& x, u64 n, const RealAlpha& alpha,
                               unsigned) {
  return r2_impl(x, n, alpha, R2Algorithm::naive);
}

PairCorrelationResult r2_sorted(const mpq_class& x, u64 n,
                                const RealAlpha& alpha, unsigned) {
  return r2_impl(x, n, alpha, R2Algorithm::sorted);
}

SStatistic s_statistic(const mpq_class& x, u64 n, const RealAlpha& alpha,
                       unsigned) {
  if (n < 2) throw std::invalid_argument("s_statistic: N >= 2 required");
  SStatistic out;
  out.count = 0;
  mpq_class threshold = x / mpq_class(n);

  if (alpha.is_rational()) {
    // ||ab p/q|| <= x/N  <=>  (abp mod q) within floor(xq/N) of 0 mod q.
    const mpq_class& r = alpha.rational_value();
    mpz_class p = r.get_num(), q = r.get_den();
    mpz_class ybound = floor_q(threshold * mpq_class(q));
    if (ybound * 2 >= q) {
      // saturated: count admissible pairs
      for (u64 a = 1; a < 2 * n; ++a) {
        u64 bmax = n - (a > n ? a - n : n - a);
        u64 b0 = (a % 2 == 1) ? 1 : 2;
        if (bmax >= b0) out.count += 2 * ((bmax - b0) / 2 + 1);
      }
    } else {
      if (q.fits_ulong_p() && mpz_get_ui(q.get_mpz_t()) < (u64{1} << 62)) {
        u64 qq = mpz_get_ui(q.get_mpz_t());
        u64 lo = mpz_get_ui(ybound.get_mpz_t());  // s <= lo or s >= q - lo
        for (u64 a = 1; a < 2 * n; ++a) {
          u64 bmax = n - (a > n ? a - n : n - a);
          u64 b0 = (a % 2 == 1) ? 1 : 2;
          if (bmax < b0) continue;
          mpz_class apz = mpz_class(a) * p % q;
          if (apz < 0) apz += q;
          u64 ap = mpz_get_ui(apz.get_mpz_t());
          u64 step = static_cast<u64>(u128{2} * ap % qq);
          u64 res = static_cast<u64>(static_cast<u128>(ap) * (b0 % qq) % qq);
          for (u64 b = b0;; b += 2) {
            if (res <= lo || res >= qq - lo) out.count += 2;  // +-b
            if (b + 2 > bmax) break;
            res += step;
            if (res >= qq) res -= qq;
          }
        }
      } else {
        for (u64 a = 1; a < 2 * n; ++a) {
          u64 bmax = n - (a > n ? a - n : n - a);
          for (u64 b = (a % 2 == 1) ? 1 : 2; b <= bmax; b += 2) {
            mpz_class s = mpz_class(a) * b % q * p % q;
            if (s < 0) s += q;
            if (std::min(s, mpz_class(q - s)) <= ybound) out.count += 2;
          }
        }
      }
    }
  } else {
    // Surd: certified mantissa per product, exact fallback near the edge.
    const QuadExpr xq = alpha.exact();
    mpz_class kmax = mpz_class(n) * mpz_class(n);
    unsigned scale = 136 + mpz_sizeinbase(kmax.get_mpz_t(), 2);
    mpz_class am = xq.scaled_floor(scale);
    mpz_class two_s = mpz_class(1) << scale;
    mpz_class tlow = floor_q(threshold * mpq_class(two_s));  // certified bands
    mpz_class pm, kz;
    for (u64 a = 1; a < 2 * n; ++a) {
      u64 bmax = n - (a > n ? a - n : n - a);
      for (u64 b = (a % 2 == 1) ? 1 : 2; b <= bmax; b += 2) {
        kz = mpz_class(a) * mpz_class(b);
        pm = kz * am;
        mpz_fdiv_r_2exp(pm.get_mpz_t(), pm.get_mpz_t(), scale);
        // enclosure [pm, pm + k]; compare min(f, 1-f) against threshold
        mpz_class hi = pm + kz;
        bool in, decided = true;
        if (hi >= two_s) {
          decided = false;  // wraps an integer
          in = false;
        } else if (hi + 8 <= tlow) {
          in = true;
        } else if (pm >= tlow + 8 && hi + tlow + 8 <= two_s) {
          in = false;
        } else if (pm >= two_s - tlow + 8) {
          in = true;  // 1 - f <= threshold certainly
        } else {
          decided = false;
          in = false;
        }
        if (!decided) in = norm_multiple_within(kz, alpha, threshold);
        if (in) out.count += 2;
      }
    }
  }
  out.value = mpq_class(out.count, n);
  out.value.canonicalize();
  return out;
}

bool RhombusQuery::saturated() const { return y * 2 >= mpq_class(q); }

namespace {

// sum_{i=0}^{n-1} floor((a*i + b) / m), any sign of b; a >= 0, m >= 1.
i64 floor_sum(i64 n, i64 m, i64 a, i64 b) {
  i64 ans = 0;
  if (a < 0) throw std::invalid_argument("floor_sum: a >= 0");
  if (b < 0) {
    i64 k = (-b + m - 1) / m;  // shift b into [0, m)
    ans -= n * k;
    b += k * m;
  }
  while (true) {
    if (a >= m) {
      ans += (n - 1) * n / 2 * (a / m);
      a %= m;
    }
    if (b >= m) {
      ans += n * (b / m);
      b %= m;
    }
    i64 y_max = a * n + b;
    if (y_max < m) break;
    n = y_max / m;
    b = y_max % m;
    std::swap(m, a);
  }
  return ans;
}

// #{j in [0, J) : (u + j*v) mod q < L}
i64 residues_below(i64 J, i64 u, i64 v, i64 q, i64 L) {
  if (J <= 0 || L <= 0) return 0;
  if (L >= q) return J;
  return floor_sum(J, q, v, u) - floor_sum(J, q, v, u - L);
}

u64 rhombus_admissible_total(u64 n) {
  u64 total = 0;
  for (u64 a = 1; a < 2 * n; ++a) {
    u64 bmax = n - (a > n ? a - n : n - a);
    u64 b0 = (a % 2 == 1) ? 1 : 2;
    if (bmax >= b0) total += 2 * ((bmax - b0) / 2 + 1);
  }
  return total;
}

}  // namespace

u64 rhombus_norm_count(const RhombusQuery& query) {
  u64 q = query.q, n = query.n;
  if (q == 0 || n == 0) throw std::invalid_argument("rhombus: q, N >= 1");
  mpz_class pr = query.p % q;
  if (pr < 0) pr += q;
  if (gcd(mpz_class(pr), mpz_class(q)) != 1)
    throw std::invalid_argument("rhombus: (p, q) = 1 required");
  if (query.y < 0) return 0;
  if (query.saturated()) return rhombus_admissible_total(n);
  // floor_sum works in i64: keep q*J clear of overflow.
  if (q >= (u64{1} << 40) || n >= (u64{1} << 21))
    throw std::overflow_error("rhombus_norm_count: q or N too large");

  u64 p = mpz_get_ui(pr.get_mpz_t());
  // Admissible residues: [0, lo] and [hi, q-1], disjoint since y < q/2.
  u64 lo = floor_q_u64(query.y);
  mpz_class hz = ceil_q(mpq_class(q) - query.y);
  u64 hi = mpz_get_ui(hz.get_mpz_t());

  u64 total = 0;
  for (u64 a = 1; a < 2 * n; ++a) {
    u64 bmax = n - (a > n ? a - n : n - a);
    u64 b0 = (a % 2 == 1) ? 1 : 2;
    if (bmax < b0) continue;
    i64 J = static_cast<i64>((bmax - b0) / 2 + 1);
    u64 ap = static_cast<u64>(static_cast<u128>(a % q) * (p % q) % q);
    i64 u = static_cast<i64>(static_cast<u128>(ap) * (b0 % q) % q);
    i64 v = static_cast<i64>(u128{2} * ap % q);
    i64 cnt = residues_below(J, u, v, static_cast<i64>(q),
                             static_cast<i64>(lo) + 1);
    if (hi <= q - 1)
      cnt += residues_below(J, u - static_cast<i64>(hi), v,
                            static_cast<i64>(q), static_cast<i64>(q - hi));
    total += 2 * static_cast<u64>(cnt);  // b and -b
  }
  return total;
}

u64 rhombus_norm_count_naive(const RhombusQuery& query) {
  u64 q = query.q, n = query.n;
  if (q == 0 || n == 0) throw std::invalid_argument("rhombus: q, N >= 1");
  mpz_class pr = query.p % q;
  if (pr < 0) pr += q;
  if (gcd(mpz_class(pr), mpz_class(q)) != 1)
    throw std::invalid_argument("rhombus: (p, q) = 1 required");
  if (query.y < 0) return 0;
  u64 p = mpz_get_ui(pr.get_mpz_t());
  u64 total = 0;
  for (u64 a = 1; a < 2 * n; ++a) {
    u64 bmax = n - (a > n ? a - n : n - a);
    for (u64 b = (a % 2 == 1) ? 1 : 2; b <= bmax; b += 2) {
      u64 s = static_cast<u64>(static_cast<u128>(a % q) * (b % q) % q *
                               (p % q) % q);
      mpq_class dist(std::min(s, q - s));
      if (dist <= query.y) total += 2;
    }
  }
  return total;
}

SandwichReport sandwich_check(const mpq_class& x, u64 n, const RealAlpha& alpha,
                              const ContinuedFractionExpansion& cf,
                              size_t n_index, unsigned precision_bits) {
  SandwichReport rep;
  rep.n_index = n_index;
  const Convergent& c = cf.convergent(n_index);
  rep.pn = c.p;
  rep.qn = c.q;
  mpq_class err_term;
  if (n_index + 1 < cf.size()) {
    rep.qn1 = cf.convergent(n_index + 1).q;
    err_term = mpq_class(mpz_class(n) * mpz_class(n), rep.qn1);
    err_term.canonicalize();
  } else if (cf.complete() && alpha.is_rational() &&
             mpq_class(rep.pn, rep.qn) == alpha.rational_value()) {
    rep.qn1 = 0;  // exact convergent: zero approximation error
    err_term = 0;
  } else {
    throw std::invalid_argument("sandwich_check: need convergent n_index + 1");
  }

  mpq_class base = x * mpq_class(rep.qn) / mpq_class(n);
  rep.y_lo = base - err_term;
  rep.y_hi = base + err_term;
  rep.degenerate = rep.y_lo < 0;

  if (!rep.qn.fits_ulong_p())
    throw std::overflow_error("sandwich_check: q_n too large for counting");
  u64 qn = mpz_get_ui(rep.qn.get_mpz_t());

  rep.lower = rhombus_norm_count({rep.y_lo, n, rep.pn, qn});
  rep.upper = rhombus_norm_count({rep.y_hi, n, rep.pn, qn});
  rep.middle = s_statistic(x, n, alpha, precision_bits).count;
  rep.holds = mpz_class(rep.lower) <= rep.middle &&
              rep.middle <= mpz_class(rep.upper);
  return rep;
}

PoissonReport poissonian_deviation(const mpq_class& x, u64 n,
                                   const RealAlpha& alpha,
                                   unsigned precision_bits) {
  PoissonReport rep;
  rep.r2 = r2_sorted(x, n, alpha, precision_bits);
  double xd = x.get_d();
  rep.deviation = std::abs(rep.r2.r2_value.get_d() - 2 * xd);
  rep.hb_normalized = rep.deviation / std::pow(xd, 7.0 / 8.0);
  rep.in_regime = x >= 1 && xd <= std::log(static_cast<double>(n));
  return rep;
}

}  // namespace ntprobe
