#include "ntprobe/quadexpr.hpp"

#include <sstream>

namespace ntprobe {

namespace {

bool mixable(const mpz_class& d1, const mpz_class& d2) {
  return d1 == 0 || d2 == 0 || d1 == d2;
}

mpz_class merged_d(const mpz_class& d1, const mpz_class& d2) {
  return d1 == 0 ? d2 : d1;
}

}  // namespace

QuadExpr::QuadExpr(mpz_class a, mpz_class b, mpz_class d, mpz_class c)
    : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), d_(std::move(d)) {
  if (c_ == 0) throw std::invalid_argument("QuadExpr: zero denominator");
  if (d_ < 0) throw std::invalid_argument("QuadExpr: negative radicand");
  if (d_ > 0 && mpz_perfect_square_p(d_.get_mpz_t())) {
    // Fold b*sqrt(d) into the rational part.
    mpz_class s;
    mpz_sqrt(s.get_mpz_t(), d_.get_mpz_t());
    a_ += b_ * s;
    b_ = 0;
  }
  normalize();
}

void QuadExpr::normalize() {
  if (c_ < 0) {
    a_ = -a_;
    b_ = -b_;
    c_ = -c_;
  }
  if (b_ == 0) d_ = 0;
  if (d_ == 0) b_ = 0;
  mpz_class g = gcd(gcd(a_, b_), c_);
  if (g > 1) {
    a_ /= g;
    b_ /= g;
    c_ /= g;
  }
}

mpq_class QuadExpr::as_rational() const {
  if (!is_rational()) throw std::domain_error("QuadExpr: irrational value");
  mpq_class r(a_, c_);
  r.canonicalize();
  return r;
}

int QuadExpr::sign() const {
  // c_ > 0, so the sign is that of a + b*sqrt(d).
  if (b_ == 0) return sgn(a_);
  if (a_ == 0) return sgn(b_);
  int sa = sgn(a_), sb = sgn(b_);
  if (sa == sb) return sa;
  // Opposite signs: compare a^2 against b^2*d.
  mpz_class lhs = a_ * a_, rhs = b_ * b_ * d_;
  int c = cmp(lhs, rhs);
  if (c == 0) return 0;  // a = -b*sqrt(d) only if d is square; folded away
  return c > 0 ? sa : sb;
}

mpz_class QuadExpr::floor() const {
  mpz_class num_lo;  // integer lower bound for a + b*sqrt(d)
  if (b_ == 0) {
    num_lo = a_;
  } else {
    mpz_class t;
    mpz_class b2d = b_ * b_ * d_;
    mpz_sqrt(t.get_mpz_t(), b2d.get_mpz_t());  // t <= |b| sqrt(d) < t+1
    if (b_ > 0) {
      num_lo = a_ + t;
    } else {
      num_lo = a_ - t - 1;
    }
  }
  mpz_class k;
  mpz_fdiv_q(k.get_mpz_t(), num_lo.get_mpz_t(), c_.get_mpz_t());
  // num_lo is within 1 of the true numerator, so k is within 1 of the floor.
  while ((*this - QuadExpr(mpz_class(k + 1))).sign() >= 0) ++k;
  while ((*this - QuadExpr(mpz_class(k))).sign() < 0) --k;
  return k;
}

mpz_class QuadExpr::ceil() const {
  mpz_class f = floor();
  return (*this - QuadExpr(f)).sign() == 0 ? f : f + 1;
}

mpz_class QuadExpr::scaled_floor(unsigned bits) const {
  mpz_class a2 = a_ << bits, b2 = b_ << bits;
  return QuadExpr(a2, b2, d_, c_).floor();
}

QuadExpr QuadExpr::operator-() const {
  QuadExpr r;
  r.a_ = -a_;
  r.b_ = -b_;
  r.c_ = c_;
  r.d_ = d_;
  return r;
}

QuadExpr QuadExpr::operator+(const QuadExpr& o) const {
  if (!mixable(d_, o.d_)) throw std::invalid_argument("QuadExpr: mixed radicands");
  QuadExpr r;
  r.a_ = a_ * o.c_ + o.a_ * c_;
  r.b_ = b_ * o.c_ + o.b_ * c_;
  r.c_ = c_ * o.c_;
  r.d_ = merged_d(d_, o.d_);
  r.normalize();
  return r;
}

QuadExpr QuadExpr::operator-(const QuadExpr& o) const { return *this + (-o); }

QuadExpr QuadExpr::operator*(const QuadExpr& o) const {
  if (!mixable(d_, o.d_)) throw std::invalid_argument("QuadExpr: mixed radicands");
  mpz_class d = merged_d(d_, o.d_);
  QuadExpr r;
  r.a_ = a_ * o.a_ + b_ * o.b_ * d;
  r.b_ = a_ * o.b_ + b_ * o.a_;
  r.c_ = c_ * o.c_;
  r.d_ = d;
  r.normalize();
  return r;
}

QuadExpr QuadExpr::inverse() const {
  if (sign() == 0) throw std::domain_error("QuadExpr: division by zero");
  // c/(a + b sqrt d) = c(a - b sqrt d)/(a^2 - b^2 d)
  mpz_class norm = a_ * a_ - b_ * b_ * d_;
  QuadExpr r;
  r.a_ = c_ * a_;
  r.b_ = -c_ * b_;
  r.c_ = norm;
  r.d_ = d_;
  r.normalize();
  return r;
}

QuadExpr QuadExpr::operator*(const mpq_class& q) const {
  QuadExpr r;
  r.a_ = a_ * q.get_num();
  r.b_ = b_ * q.get_num();
  r.c_ = c_ * q.get_den();
  r.d_ = d_;
  r.normalize();
  return r;
}

double QuadExpr::to_double() const {
  // 80 fractional bits, then one double rounding; plenty for display use.
  mpz_class m = scaled_floor(80);
  mpf_class f(m, 128);
  mpf_div_2exp(f.get_mpf_t(), f.get_mpf_t(), 80);
  return f.get_d();
}

std::string QuadExpr::to_string() const {
  std::ostringstream os;
  if (is_rational()) {
    os << a_;
    if (c_ != 1) os << "/" << c_;
    return os.str();
  }
  os << "(" << a_;
  if (b_ >= 0) os << "+";
  os << b_ << "*sqrt(" << d_ << "))";
  if (c_ != 1) os << "/" << c_;
  return os.str();
}

}  // namespace ntprobe
