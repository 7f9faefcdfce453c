// Continued-fraction expansions with exact integer recurrences, convergent
// selection, and the explicit rational approximation-quality constant.

#pragma once

#include <optional>
#include <vector>

#include "ntprobe/realalpha.hpp"

namespace ntprobe {

struct Convergent {
  mpz_class p, q;
};

class ContinuedFractionExpansion {
 public:
  const std::vector<mpz_class>& partial_quotients() const { return a_; }
  const std::vector<Convergent>& convergents() const { return conv_; }
  size_t size() const { return conv_.size(); }
  const Convergent& convergent(size_t n) const { return conv_.at(n); }
  // true when the value is rational and fully expanded before the cap.
  bool complete() const { return complete_; }

 private:
  friend ContinuedFractionExpansion continued_fraction(const RealAlpha&, size_t);
  std::vector<mpz_class> a_;
  std::vector<Convergent> conv_;
  bool complete_ = false;
};

// First `count` partial quotients and convergents.  Surds run the exact
// integer (P + sqrt(D))/Q recurrence (no floating point); rationals run the
// Euclidean algorithm and may terminate early.  Fixed-point input is
// rejected: the expansion of an enclosure is not well defined.
ContinuedFractionExpansion continued_fraction(const RealAlpha& alpha,
                                              size_t count);

// Smallest n with lo <= q_n <= hi, if any.  Throws std::runtime_error when
// the expansion is too short to decide (q never exceeded hi and the value
// was not fully expanded).
std::optional<size_t> convergent_in_range(const ContinuedFractionExpansion& cf,
                                          const mpq_class& lo,
                                          const mpq_class& hi);

// Least constant C such that |p/q - u/v| >= 1/(C v^e) for every rational
// u/v != p/q.  Exact: the minimum over u at fixed v is ||p v||_q / (q v)
// when nonzero, and q/(qv) when q | v (the nearest distinct numerator).
// Scanning v <= q suffices for integer e >= 2: for v > q with q not
// dividing v the contribution q v^{1-e} / ||pv||_q <= q v^{1-e} < q^{2-e}
// <= 1, while v = 1 already contributes q/||p||_q >= 2 (or exactly 1 when
// q = 1, where every contribution is v^{1-e} <= 1).
mpq_class rational_type_constant(const mpz_class& p, const mpz_class& q,
                                 unsigned e);

}  // namespace ntprobe
