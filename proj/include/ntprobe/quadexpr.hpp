// Exact scalar in a real quadratic field: (a + b*sqrt(d)) / c with big
// integers, d = 0 meaning a plain rational.  Every counting predicate in the
// project decides through this type's exact sign/floor; no floating point
// touches a counted quantity.

#pragma once

#include <stdexcept>
#include <string>

#include <gmpxx.h>

namespace ntprobe {

class QuadExpr {
 public:
  QuadExpr() : a_(0), b_(0), c_(1), d_(0) {}
  QuadExpr(const mpz_class& n) : a_(n), b_(0), c_(1), d_(0) {}  // NOLINT
  QuadExpr(long n) : a_(n), b_(0), c_(1), d_(0) {}              // NOLINT
  explicit QuadExpr(const mpq_class& r) : a_(r.get_num()), b_(0), c_(r.get_den()), d_(0) {}

  // (a + b*sqrt(d)) / c; d must be 0 or a positive non-square.
  QuadExpr(mpz_class a, mpz_class b, mpz_class d, mpz_class c);

  static QuadExpr sqrt_of(const mpz_class& d) { return {0, 1, d, 1}; }

  const mpz_class& a() const { return a_; }
  const mpz_class& b() const { return b_; }
  const mpz_class& c() const { return c_; }
  const mpz_class& d() const { return d_; }

  bool is_rational() const { return d_ == 0; }
  mpq_class as_rational() const;  // throws if irrational

  int sign() const;
  mpz_class floor() const;
  mpz_class ceil() const;
  // floor(x * 2^bits): the fixed-point mantissa used for fast comparisons.
  mpz_class scaled_floor(unsigned bits) const;
  QuadExpr frac() const { return *this - QuadExpr(floor()); }

  QuadExpr operator-() const;
  QuadExpr operator+(const QuadExpr& o) const;
  QuadExpr operator-(const QuadExpr& o) const;
  QuadExpr operator*(const QuadExpr& o) const;
  QuadExpr inverse() const;
  QuadExpr operator/(const QuadExpr& o) const { return *this * o.inverse(); }

  QuadExpr operator*(const mpq_class& r) const;
  QuadExpr operator+(const mpq_class& r) const { return *this + QuadExpr(r); }
  QuadExpr operator-(const mpq_class& r) const { return *this - QuadExpr(r); }

  int compare(const QuadExpr& o) const { return (*this - o).sign(); }
  bool operator<(const QuadExpr& o) const { return compare(o) < 0; }
  bool operator<=(const QuadExpr& o) const { return compare(o) <= 0; }
  bool operator>(const QuadExpr& o) const { return compare(o) > 0; }
  bool operator>=(const QuadExpr& o) const { return compare(o) >= 0; }
  bool operator==(const QuadExpr& o) const { return compare(o) == 0; }

  QuadExpr abs() const { return sign() < 0 ? -*this : *this; }

  double to_double() const;
  std::string to_string() const;

 private:
  void normalize();
  mpz_class a_, b_, c_, d_;  // (a_ + b_*sqrt(d_)) / c_, c_ > 0
};

}  // namespace ntprobe
