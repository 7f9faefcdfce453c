#include "ntprobe/realalpha.hpp"

#include <cctype>
#include <sstream>

namespace ntprobe {

mpq_class FixedPoint::midpoint() const {
  mpz_class den = mpz_class(1) << scale_bits;
  mpq_class r(mantissa, den);
  r.canonicalize();
  return r;
}

mpq_class FixedPoint::lower() const {
  mpz_class den = mpz_class(1) << scale_bits;
  mpq_class r(mantissa - err_ulps, den);
  r.canonicalize();
  return r;
}

mpq_class FixedPoint::upper() const {
  mpz_class den = mpz_class(1) << scale_bits;
  mpq_class r(mantissa + err_ulps, den);
  r.canonicalize();
  return r;
}

double FixedPoint::to_double() const { return midpoint().get_d(); }

RealAlpha RealAlpha::rational(const mpz_class& p, const mpz_class& q) {
  if (q == 0) throw std::invalid_argument("RealAlpha: zero denominator");
  mpq_class r(p, q);
  r.canonicalize();
  return rational(r);
}

RealAlpha RealAlpha::rational(const mpq_class& r) {
  RealAlpha a;
  a.v_ = r;
  return a;
}

RealAlpha RealAlpha::surd(const mpz_class& a, const mpz_class& b,
                          const mpz_class& d, const mpz_class& c) {
  QuadExpr q(a, b, d, c);
  RealAlpha r;
  if (q.is_rational())
    r.v_ = q.as_rational();
  else
    r.v_ = q;
  return r;
}

RealAlpha RealAlpha::fixed(FixedPoint fp) {
  RealAlpha r;
  r.v_ = std::move(fp);
  return r;
}

QuadExpr RealAlpha::exact() const {
  if (is_rational()) return QuadExpr(rational_value());
  if (is_surd()) return surd_value();
  throw precision_error("RealAlpha: fixed-point value has no exact form");
}

namespace {

std::string strip_spaces(const std::string& s) {
  std::string r;
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c))) r += c;
  return r;
}

bool parse_int(const std::string& s, mpz_class& out) {
  if (s.empty()) return false;
  size_t i = (s[0] == '+' || s[0] == '-') ? 1 : 0;
  if (i == s.size()) return false;
  for (size_t j = i; j < s.size(); ++j)
    if (!std::isdigit(static_cast<unsigned char>(s[j]))) return false;
  out = mpz_class(s.substr(i));  // mpz_set_str rejects a leading '+'
  if (s[0] == '-') out = -out;
  return true;
}

bool parse_decimal(const std::string& s, mpq_class& out) {
  auto dot = s.find('.');
  if (dot == std::string::npos) return false;
  std::string head = s.substr(0, dot), tail = s.substr(dot + 1);
  bool neg = !head.empty() && head[0] == '-';
  if (neg || (!head.empty() && head[0] == '+')) head = head.substr(1);
  if (head.empty()) head = "0";
  if (tail.empty()) return false;
  mpz_class h, t;
  if (!parse_int(head, h) || !parse_int(tail, t)) return false;
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, tail.size());
  mpq_class r(h * scale + t, scale);
  r.canonicalize();
  if (neg) r = -r;
  out = r;
  return true;
}

const char* kGrammar =
    "alpha grammar: \"p/q\" | \"sqrt2\" | \"golden\" | \"sqrtD\" | "
    "\"(a+b*sqrt(d))/c\" | integer | decimal";

}  // namespace

RealAlpha RealAlpha::parse(const std::string& text) {
  std::string s = strip_spaces(text);
  if (s.empty()) throw std::invalid_argument(kGrammar);

  if (s == "golden") return surd(1, 1, 5, 2);
  if (s.rfind("sqrt", 0) == 0) {
    mpz_class d;
    if (parse_int(s.substr(4), d) && d > 0) return surd(0, 1, d, 1);
    throw std::invalid_argument(kGrammar);
  }

  // (a+b*sqrt(d))/c
  if (s[0] == '(') {
    auto close = s.find(')');
    auto star = s.find("*sqrt(");
    auto inner_close = s.find(')', star == std::string::npos ? 0 : star + 6);
    if (star == std::string::npos || inner_close == std::string::npos)
      throw std::invalid_argument(kGrammar);
    // a is between '(' and the sign preceding b; scan for the +/- that
    // separates a from b (skip the leading sign of a).
    size_t split = std::string::npos;
    for (size_t i = 2; i < star; ++i)
      if (s[i] == '+' || s[i] == '-') split = i;
    if (split == std::string::npos) throw std::invalid_argument(kGrammar);
    mpz_class a, b, d, c = 1;
    std::string bs = s.substr(split, star - split);
    if (bs == "+") bs = "1";
    if (bs == "-") bs = "-1";
    if (!parse_int(s.substr(1, split - 1), a) || !parse_int(bs, b) ||
        !parse_int(s.substr(star + 6, inner_close - star - 6), d) || d <= 0)
      throw std::invalid_argument(kGrammar);
    close = s.find(')', inner_close + 1);
    if (close == std::string::npos) throw std::invalid_argument(kGrammar);
    std::string rest = s.substr(close + 1);
    if (!rest.empty()) {
      if (rest[0] != '/' || !parse_int(rest.substr(1), c) || c == 0)
        throw std::invalid_argument(kGrammar);
    }
    return surd(a, b, d, c);
  }

  auto slash = s.find('/');
  if (slash != std::string::npos) {
    mpz_class p, q;
    if (parse_int(s.substr(0, slash), p) && parse_int(s.substr(slash + 1), q) &&
        q != 0)
      return rational(p, q);
    throw std::invalid_argument(kGrammar);
  }

  mpz_class n;
  if (parse_int(s, n)) return rational(n, 1);
  mpq_class dec;
  if (parse_decimal(s, dec)) return rational(dec);
  throw std::invalid_argument(kGrammar);
}

std::string RealAlpha::to_string() const {
  if (is_rational()) {
    std::ostringstream os;
    os << rational_value();
    return os.str();
  }
  if (is_surd()) return surd_value().to_string();
  std::ostringstream os;
  const auto& f = fixed_value();
  os << "fixed(" << f.mantissa << "/2^" << f.scale_bits << "+-" << f.err_ulps
     << ")";
  return os.str();
}

double RealAlpha::to_double() const {
  if (is_rational()) return rational_value().get_d();
  if (is_surd()) return surd_value().to_double();
  return fixed_value().to_double();
}

QuadExpr norm_mod(const QuadExpr& t, u64 q) {
  if (q == 0) throw std::invalid_argument("norm_mod: q >= 1");
  QuadExpr qq{mpz_class(q)};
  QuadExpr f = t - qq * QuadExpr((t * mpq_class(1, q)).floor());
  QuadExpr other = qq - f;
  return other < f ? other : f;
}

mpq_class norm_mod(const mpq_class& t, u64 q) {
  if (q == 0) throw std::invalid_argument("norm_mod: q >= 1");
  mpq_class f = t - mpq_class(q) * floor_q(t / mpq_class(q));
  mpq_class other = mpq_class(q) - f;
  return std::min(f, other);
}

FixedPoint norm_mod(const FixedPoint& t, u64 q) {
  mpq_class width = t.upper() - t.lower();
  if (width * 4 >= mpq_class(q))
    throw precision_error("norm_mod: enclosure too wide for modulus");
  mpq_class lo = norm_mod(t.lower(), q);
  mpq_class hi = norm_mod(t.upper(), q);
  // 1-Lipschitz: the result enclosure has the same width.
  FixedPoint r;
  r.scale_bits = t.scale_bits;
  mpz_class den = mpz_class(1) << t.scale_bits;
  mpq_class mid = (lo + hi) / 2;
  r.mantissa = floor_q(mid * mpq_class(den));
  r.err_ulps = ceil_q((t.upper() - t.lower()) / 2 * mpq_class(den)) + 1;
  return r;
}

mpz_class alpha_mantissa(const RealAlpha& alpha, unsigned bits) {
  if (alpha.is_rational()) {
    const mpq_class& r = alpha.rational_value();
    mpz_class m;
    mpz_mul_2exp(m.get_mpz_t(), r.get_num().get_mpz_t(), bits);
    mpz_class out;
    mpz_fdiv_q(out.get_mpz_t(), m.get_mpz_t(), r.get_den().get_mpz_t());
    return out;
  }
  return alpha.exact().scaled_floor(bits);
}

FracN2 frac_n2_alpha(u64 n, const RealAlpha& alpha, unsigned precision_bits) {
  if (n == 0) throw std::invalid_argument("frac_n2_alpha: n >= 1");
  if (precision_bits < 16) precision_bits = 16;
  mpz_class n2 = mpz_class(n) * mpz_class(n);

  if (alpha.is_rational()) {
    const mpq_class& r = alpha.rational_value();
    mpq_class v = r * mpq_class(n2);
    mpq_class f = v - floor_q(v);
    FracN2 out;
    out.exact = f;
    out.fp.scale_bits = precision_bits;
    mpz_class den = mpz_class(1) << precision_bits;
    out.fp.mantissa = floor_q(f * mpq_class(den));
    out.fp.err_ulps = 1;
    return out;
  }
  if (alpha.is_fixed()) {
    const FixedPoint& f = alpha.fixed_value();
    // n^2 * enclosure; fails if the scaled enclosure cannot pin floor.
    mpz_class lo = n2 * (f.mantissa - f.err_ulps);
    mpz_class hi = n2 * (f.mantissa + f.err_ulps);
    mpz_class den = mpz_class(1) << f.scale_bits;
    mpz_class flo, fhi;
    mpz_fdiv_q(flo.get_mpz_t(), lo.get_mpz_t(), den.get_mpz_t());
    mpz_fdiv_q(fhi.get_mpz_t(), hi.get_mpz_t(), den.get_mpz_t());
    if (flo != fhi)
      throw precision_error("frac_n2_alpha: fixed-point input too coarse");
    FracN2 out;
    out.fp.scale_bits = f.scale_bits;
    out.fp.mantissa = lo - flo * den;
    out.fp.err_ulps = hi - lo;
    mpz_class need = (out.fp.err_ulps + 1) << precision_bits;
    if (need >= (mpz_class(1) << f.scale_bits) && out.fp.err_ulps > 0)
      throw precision_error("frac_n2_alpha: fixed-point input too coarse");
    return out;
  }

  // Surd: evaluate at a working scale generous enough that frac keeps
  // precision_bits of certainty after multiplying by n^2; escalate if the
  // enclosure straddles an integer (possible only for near-integer n^2*alpha).
  const QuadExpr& x = alpha.surd_value();
  unsigned extra = mpz_sizeinbase(n2.get_mpz_t(), 2);
  for (unsigned scale = precision_bits + extra + 8; scale <= 4096; scale *= 2) {
    mpz_class m = x.scaled_floor(scale);  // m <= alpha*2^s < m+1
    mpz_class lo = n2 * m, hi = n2 * m + n2;
    mpz_class flo, fhi;
    mpz_fdiv_q_2exp(flo.get_mpz_t(), lo.get_mpz_t(), scale);
    mpz_fdiv_q_2exp(fhi.get_mpz_t(), hi.get_mpz_t(), scale);
    if (flo != fhi) continue;  // integer inside the enclosure: escalate
    FracN2 out;
    out.fp.scale_bits = scale;
    out.fp.mantissa = lo - (flo << scale);
    out.fp.err_ulps = n2;
    return out;
  }
  throw precision_error("frac_n2_alpha: escalation cap (4096 bits) reached");
}

}  // namespace ntprobe
