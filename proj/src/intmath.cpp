#include "ntprobe/intmath.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ntprobe {

mpz_class floor_q(const mpq_class& x) {
  mpz_class r;
  mpz_fdiv_q(r.get_mpz_t(), x.get_num().get_mpz_t(), x.get_den().get_mpz_t());
  return r;
}

mpz_class ceil_q(const mpq_class& x) {
  mpz_class r;
  mpz_cdiv_q(r.get_mpz_t(), x.get_num().get_mpz_t(), x.get_den().get_mpz_t());
  return r;
}

u64 floor_q_u64(const mpq_class& x) {
  mpz_class f = floor_q(x);
  if (f < 0) return 0;
  if (!f.fits_ulong_p() || f > mpz_class(u64{1} << 62))
    throw std::overflow_error("floor_q_u64: bound too large");
  return mpz_get_ui(f.get_mpz_t());
}

TruncationWindow::TruncationWindow(mpq_class m_bound, mpq_class n_bound)
    : m_bound_(std::move(m_bound)), n_bound_(std::move(n_bound)) {
  if (m_bound_ < 1 || n_bound_ < 1)
    throw std::invalid_argument("TruncationWindow: bounds must be >= 1");
  m_floor_ = floor_q_u64(m_bound_);
  n_floor_ = floor_q_u64(n_bound_);
}

std::vector<std::pair<u64, unsigned>> factorize(u64 n) {
  std::vector<std::pair<u64, unsigned>> f;
  for (u64 p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
    if (n % p) continue;
    unsigned e = 0;
    while (n % p == 0) n /= p, ++e;
    f.emplace_back(p, e);
  }
  if (n > 1) f.emplace_back(n, 1);
  return f;
}

bool is_prime(u64 n) {
  if (n < 2) return false;
  for (u64 p = 2; p * p <= n; p += (p == 2 ? 1 : 2))
    if (n % p == 0) return false;
  return true;
}

std::vector<u64> divisors(u64 n) {
  std::vector<u64> d{1};
  for (auto [p, e] : factorize(n)) {
    size_t sz = d.size();
    u64 pk = 1;
    for (unsigned k = 1; k <= e; ++k) {
      pk *= p;
      for (size_t i = 0; i < sz; ++i) d.push_back(d[i] * pk);
    }
  }
  std::sort(d.begin(), d.end());
  return d;
}

u64 tau(u64 m) {
  u64 count = 0;
  for (u64 d = 1; d * d <= m; ++d)
    if (m % d == 0) count += (d * d == m) ? 1 : 2;
  return count;
}

u64 tau_upto(u64 m, u64 bound_floor) {
  u64 count = 0;
  for (u64 d = 1; d * d <= m; ++d) {
    if (m % d) continue;
    if (d <= bound_floor) ++count;
    u64 e = m / d;
    if (e != d && e <= bound_floor) ++count;
  }
  return count;
}

u64 tau_upto(u64 m, const mpq_class& bound) {
  if (bound < 1) return 0;
  return tau_upto(m, floor_q_u64(bound));
}

u64 tau_window(u64 m, const TruncationWindow& w) {
  u64 a_max = w.m_floor(), b_max = w.n_floor();
  u64 count = 0;
  for (u64 d = 1; d * d <= m; ++d) {
    if (m % d) continue;
    u64 e = m / d;
    if (d <= a_max && e <= b_max) ++count;
    if (e != d && e <= a_max && d <= b_max) ++count;
  }
  return count;
}

u64 tau_window_sym(u64 m, const mpq_class& bound) {
  if (bound < 1) return 0;
  u64 b = floor_q_u64(bound);
  u64 count = 0;
  for (u64 d = 1; d * d <= m; ++d) {
    if (m % d) continue;
    u64 e = m / d;
    if (d <= b && e <= b) count += (d == e) ? 1 : 2;
  }
  return count;
}

u64 tau_window_parity(u64 m, const mpq_class& bound) {
  u64 b = bound < 1 ? 0 : floor_q_u64(bound);
  u64 count = 0;
  for (u64 d = 1; d * d <= m; ++d) {
    if (m % d) continue;
    u64 e = m / d;
    if (d <= b && e <= b && ((d ^ e) & 1) == 0) count += (d == e) ? 1 : 2;
  }
  return count;
}

namespace {

// Rational enclosure e_lo < e < e_hi, 50 significant digits.  Divisor ratios
// with 64-bit entries stay ~1e-40 away from e, so the enclosure always
// decides d_i * e vs d_j.
struct EulerEnclosure {
  mpq_class lo, hi;
  EulerEnclosure() {
    mpz_class digits("27182818284590452353602874713526624977572470936999");
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, 49);
    lo = mpq_class(digits, scale);
    lo.canonicalize();
    hi = mpq_class(digits + 1, scale);
    hi.canonicalize();
  }
};

const EulerEnclosure& euler_e() {
  static const EulerEnclosure e;
  return e;
}

// Is d_small * e > d_large?  (strict; equality impossible, e irrational)
bool times_e_exceeds(u64 d_small, u64 d_large) {
  const auto& e = euler_e();
  mpq_class lo = e.lo * d_small;
  if (lo > d_large) return true;
  mpq_class hi = e.hi * d_small;
  if (hi < d_large) return false;
  throw std::logic_error("hooley_delta: e enclosure exhausted");
}

}  // namespace

u64 hooley_delta(u64 n) {
  std::vector<u64> d = divisors(n);
  // Window (d[j]/e, d[j]]: count divisors d[i] with d[i]*e > d[j].
  u64 best = 1;
  size_t lo = 0;
  for (size_t j = 0; j < d.size(); ++j) {
    while (!times_e_exceeds(d[lo], d[j])) ++lo;
    best = std::max<u64>(best, j - lo + 1);
  }
  return best;
}

int mobius(u64 n) {
  int sign = 1;
  for (auto [p, e] : factorize(n)) {
    (void)p;
    if (e > 1) return 0;
    sign = -sign;
  }
  return sign;
}

u64 euler_phi(u64 n) {
  u64 result = n;
  for (auto [p, e] : factorize(n)) {
    (void)e;
    result -= result / p;
  }
  return result;
}

u64 coprime_count_upto(const mpq_class& x, u64 q) {
  if (q == 0) throw std::invalid_argument("coprime_count_upto: q >= 1");
  if (x < 0) return 0;
  mpz_class total = 0;
  for (u64 d : divisors(q)) {
    int mu = mobius(d);
    if (mu == 0) continue;
    mpq_class xd = x / mpq_class(d);
    total += mu * floor_q(xd);
  }
  if (total < 0) throw std::logic_error("coprime_count_upto: negative count");
  return mpz_get_ui(total.get_mpz_t());
}

u64 divisor_ap_weight(u64 q, i64 r) {
  if (q == 0) throw std::invalid_argument("divisor_ap_weight: q >= 1");
  u64 rr = static_cast<u64>(((r % static_cast<i64>(q)) + static_cast<i64>(q)) %
                            static_cast<i64>(q));
  u64 g = rr == 0 ? q : std::gcd(q, rr);
  u64 total = 0;
  for (u64 d : divisors(g)) total += d * euler_phi(q / d);
  return total;
}

i64 divisor_ap_weight_double_sum(u64 q, i64 r) {
  if (q == 0) throw std::invalid_argument("divisor_ap_weight: q >= 1");
  u64 rr = static_cast<u64>(((r % static_cast<i64>(q)) + static_cast<i64>(q)) %
                            static_cast<i64>(q));
  u64 g = rr == 0 ? q : std::gcd(q, rr);
  i64 total = 0;
  for (u64 d : divisors(g))
    for (u64 c : divisors(q / d))
      total += static_cast<i64>(d * c) * mobius(q / (d * c));
  return total;
}

DivisorSieve sieve_divisor_values(u64 upper_limit,
                                  const std::optional<TruncationWindow>& window,
                                  u64 max_entries) {
  if (upper_limit < 1)
    throw std::invalid_argument("sieve_divisor_values: upper_limit >= 1");
  if (upper_limit + 1 > max_entries)
    throw std::length_error("sieve_divisor_values: table exceeds memory budget");
  DivisorSieve s;
  s.upper_limit = upper_limit;
  s.window = window;
  s.values.assign(upper_limit + 1, 0);
  if (!window) {
    for (u64 d = 1; d <= upper_limit; ++d)
      for (u64 m = d; m <= upper_limit; m += d) ++s.values[m];
  } else {
    u64 a_max = std::min(window->m_floor(), upper_limit);
    u64 b_max = window->n_floor();
    for (u64 a = 1; a <= a_max; ++a) {
      u64 top = std::min(b_max, upper_limit / a) * a;
      for (u64 m = a; m <= top; m += a) ++s.values[m];
    }
  }
  return s;
}

}  // namespace ntprobe
