// RealAlpha: the number whose multiples get reduced mod 1.  Exact rationals
// and quadratic surds carry exact arithmetic end to end; the fixed-point
// variant carries a rigorous error bound that every operation propagates.

#pragma once

#include <optional>
#include <string>
#include <variant>

#include "ntprobe/intmath.hpp"
#include "ntprobe/quadexpr.hpp"

namespace ntprobe {

// Enclosure value in [(mantissa - err)/2^scale, (mantissa + err)/2^scale].
struct FixedPoint {
  mpz_class mantissa;
  unsigned scale_bits = 0;
  mpz_class err_ulps = 0;

  mpq_class midpoint() const;
  mpq_class lower() const;
  mpq_class upper() const;
  double to_double() const;
};

struct precision_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class RealAlpha {
 public:
  static RealAlpha rational(const mpz_class& p, const mpz_class& q);
  static RealAlpha rational(const mpq_class& r);
  // (a + b*sqrt(d))/c with d a positive non-square; b = 0 or square d are
  // folded into the rational variant.
  static RealAlpha surd(const mpz_class& a, const mpz_class& b,
                        const mpz_class& d, const mpz_class& c);
  static RealAlpha fixed(FixedPoint fp);

  // "p/q", "sqrt2", "golden", "sqrtD", "(a+b*sqrt(d))/c", plain integers and
  // decimals.  Throws std::invalid_argument naming the grammar on failure.
  static RealAlpha parse(const std::string& text);

  bool is_rational() const { return std::holds_alternative<mpq_class>(v_); }
  bool is_surd() const { return std::holds_alternative<QuadExpr>(v_); }
  bool is_fixed() const { return std::holds_alternative<FixedPoint>(v_); }

  const mpq_class& rational_value() const { return std::get<mpq_class>(v_); }
  const QuadExpr& surd_value() const { return std::get<QuadExpr>(v_); }
  const FixedPoint& fixed_value() const { return std::get<FixedPoint>(v_); }

  // Exact value as a field scalar; throws for the fixed-point variant.
  QuadExpr exact() const;

  std::string to_string() const;
  double to_double() const;

 private:
  std::variant<mpq_class, QuadExpr, FixedPoint> v_;
};

// Distance from t to the nearest integer multiple of q, exact.
// Result lies in [0, q/2].
QuadExpr norm_mod(const QuadExpr& t, u64 q);
mpq_class norm_mod(const mpq_class& t, u64 q);

// Fixed-point input: the norm is 1-Lipschitz, so the enclosure passes
// through unchanged; throws precision_error if the input enclosure is too
// wide (>= q/4) for the result to locate a nearest multiple at all.
FixedPoint norm_mod(const FixedPoint& t, u64 q);

struct FracN2 {
  FixedPoint fp;                      // certified |value - fp| < 2^-precision
  std::optional<mpq_class> exact;     // set for rational alpha
};

// frac(n^2 * alpha) with certified absolute error < 2^-precision_bits.
// Surd evaluation escalates its working precision (doubling, capped at 4096
// bits) until the integer part is pinned; rational alpha is exact.
FracN2 frac_n2_alpha(u64 n, const RealAlpha& alpha, unsigned precision_bits);

// floor(alpha * 2^bits), exact; the 1-ulp enclosure used by the fast paths.
mpz_class alpha_mantissa(const RealAlpha& alpha, unsigned bits);

}  // namespace ntprobe
