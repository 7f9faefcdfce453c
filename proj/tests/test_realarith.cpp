#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ntprobe/quadexpr.hpp"
#include "ntprobe/realalpha.hpp"

using namespace ntprobe;

TEST_CASE("QuadExpr sign and floor") {
  QuadExpr r2 = QuadExpr::sqrt_of(2);
  CHECK(r2.sign() == 1);
  CHECK(r2.floor() == 1);
  CHECK((-r2).floor() == -2);
  CHECK((r2 * r2).as_rational() == 2);
  QuadExpr golden(1, 1, 5, 2);
  CHECK(golden.floor() == 1);
  // golden^2 = golden + 1
  CHECK(golden * golden == golden + QuadExpr(1));
  QuadExpr neg(1, -1, 2, 1);  // 1 - sqrt 2 < 0
  CHECK(neg.sign() == -1);
  CHECK(neg.floor() == -1);
  CHECK(neg.ceil() == 0);
  // scaled_floor: floor(sqrt(2) * 2^10) = floor(1448.15...) = 1448
  CHECK(r2.scaled_floor(10) == 1448);
}

TEST_CASE("QuadExpr arithmetic and inverse") {
  QuadExpr r5 = QuadExpr::sqrt_of(5);
  QuadExpr x = (QuadExpr(3) + r5 * mpq_class(2)) * mpq_class(1, 7);
  CHECK((x * x.inverse()).as_rational() == 1);
  CHECK((x - x).sign() == 0);
  // perfect-square radicand folds to rational
  QuadExpr folded(1, 3, 9, 2);  // (1 + 3*3)/2 = 5
  CHECK(folded.is_rational());
  CHECK(folded.as_rational() == 5);
}

TEST_CASE("norm_mod exact values") {
  CHECK(norm_mod(mpq_class(15, 2), 3) == mpq_class(3, 2));  // 7.5 vs 6, 9
  CHECK(norm_mod(mpq_class(23, 10), 1) == mpq_class(3, 10));
  CHECK(norm_mod(mpq_class(12), 4) == 0);
  CHECK(norm_mod(mpq_class(-15, 2), 3) == mpq_class(3, 2));  // symmetry
  // properties on a grid: result <= q/2, periodicity, evenness
  for (int num = -50; num <= 50; ++num)
    for (u64 q : {1u, 2u, 5u, 12u}) {
      mpq_class t(num, 7);
      t.canonicalize();
      mpq_class v = norm_mod(t, q);
      CHECK(v >= 0);
      CHECK(v * 2 <= mpq_class(q));
      CHECK(norm_mod(mpq_class(t + q), q) == v);
      CHECK(norm_mod(mpq_class(-t), q) == v);
    }
  // surd: ||sqrt(2)||_1 = sqrt(2) - 1
  QuadExpr r2 = QuadExpr::sqrt_of(2);
  CHECK(norm_mod(r2, 1) == r2 - QuadExpr(1));
}

TEST_CASE("norm_mod fixed-point propagates the enclosure") {
  FixedPoint fp;
  fp.scale_bits = 16;
  fp.mantissa = mpz_class(7) << 15;  // 3.5
  fp.err_ulps = 4;
  FixedPoint out = norm_mod(fp, 3);
  // true value 0.5 lies inside the result enclosure
  CHECK(out.lower() <= mpq_class(1, 2));
  CHECK(out.upper() >= mpq_class(1, 2));
  fp.err_ulps = mpz_class(1) << 16;  // +-1, too wide for q = 3
  CHECK_THROWS_AS(norm_mod(fp, 3), precision_error);
}

TEST_CASE("frac_n2_alpha rational is exact and periodic") {
  RealAlpha a = RealAlpha::rational(1, 3);
  for (u64 n = 1; n <= 30; ++n) {
    auto f = frac_n2_alpha(n, a, 64);
    REQUIRE(f.exact.has_value());
    mpq_class expect(((n * n) % 3), 3);
    expect.canonicalize();
    CHECK(*f.exact == expect);
    // period divides q = 3
    auto g = frac_n2_alpha(n + 3, a, 64);
    CHECK(*f.exact == *g.exact);
  }
}

TEST_CASE("frac_n2_alpha surd against frozen digits") {
  RealAlpha r2 = RealAlpha::parse("sqrt2");
  // frac(sqrt 2)  = 0.41421356237309504880...
  // frac(4 sqrt2) = 0.65685424949238019520...
  mpq_class f1("41421356237309504880168872420969807856967187537694/"
               "100000000000000000000000000000000000000000000000000");
  f1.canonicalize();
  mpq_class f4("65685424949238019520675489683879231427868750150779/"
               "100000000000000000000000000000000000000000000000000");
  f4.canonicalize();
  auto a1 = frac_n2_alpha(1, r2, 96);
  auto a2 = frac_n2_alpha(2, r2, 96);
  mpq_class tol(mpz_class(1), mpz_class(1) << 90);
  CHECK(abs(a1.fp.midpoint() - f1) < tol);
  CHECK(abs(a2.fp.midpoint() - f4) < tol);
  CHECK(!a1.exact.has_value());
}

TEST_CASE("frac_n2_alpha doubled-precision stability") {
  RealAlpha g = RealAlpha::parse("golden");
  for (u64 n : {1u, 7u, 123u, 4096u}) {
    auto a = frac_n2_alpha(n, g, 96);
    auto b = frac_n2_alpha(n, g, 160);
    mpq_class bound(a.fp.err_ulps, mpz_class(1) << a.fp.scale_bits);
    bound.canonicalize();
    CHECK(abs(a.fp.midpoint() - b.fp.midpoint()) <= bound);
  }
}

TEST_CASE("parse_alpha grammar") {
  CHECK(RealAlpha::parse("3/7").rational_value() == mpq_class(3, 7));
  CHECK(RealAlpha::parse("golden").surd_value() == QuadExpr(1, 1, 5, 2));
  CHECK(RealAlpha::parse("(2+3*sqrt(7))/5").surd_value() == QuadExpr(2, 3, 7, 5));
  CHECK(RealAlpha::parse("sqrt3").surd_value() == QuadExpr::sqrt_of(3));
  CHECK(RealAlpha::parse("2").rational_value() == 2);
  CHECK(RealAlpha::parse("0.25").rational_value() == mpq_class(1, 4));
  CHECK(RealAlpha::parse("(1-1*sqrt(2))/1").surd_value() == QuadExpr(1, -1, 2, 1));
  // sqrt of a square collapses to a rational
  CHECK(RealAlpha::parse("sqrt4").is_rational());
  CHECK_THROWS_AS(RealAlpha::parse("wat"), std::invalid_argument);
  CHECK_THROWS_AS(RealAlpha::parse("1/0"), std::invalid_argument);
}

TEST_CASE("frac_n2_alpha fixed-point input propagates or refuses") {
  // alpha given only as an enclosure: n^2 scales the error n^2-fold
  FixedPoint fp;
  fp.scale_bits = 100;
  fp.mantissa = QuadExpr::sqrt_of(2).scaled_floor(100);
  fp.err_ulps = 1;
  RealAlpha a = RealAlpha::fixed(fp);
  auto f = frac_n2_alpha(3, a, 32);
  // frac(9 sqrt 2) to 40 digits (finer than the ~2^-96 enclosure width)
  mpq_class truth(
      "7279220613578554392151985178872827071270/"
      "10000000000000000000000000000000000000000");
  truth.canonicalize();
  CHECK(f.fp.lower() <= truth);
  CHECK(f.fp.upper() >= truth);
  // coarse input cannot certify 32 bits after scaling by n^2 = 10^12
  FixedPoint coarse;
  coarse.scale_bits = 40;
  coarse.mantissa = QuadExpr::sqrt_of(2).scaled_floor(40);
  coarse.err_ulps = 1;
  RealAlpha ac = RealAlpha::fixed(coarse);
  CHECK_THROWS_AS(frac_n2_alpha(1000000, ac, 32), precision_error);
}

TEST_CASE("QuadExpr rejects mixed radicands") {
  QuadExpr r2 = QuadExpr::sqrt_of(2), r3 = QuadExpr::sqrt_of(3);
  CHECK_THROWS_AS(r2 + r3, std::invalid_argument);
  CHECK_THROWS_AS(r2 * r3, std::invalid_argument);
}

TEST_CASE("QuadExpr floor against 512-bit mpf oracle") {
  std::srand(1234);
  for (int inst = 0; inst < 400; ++inst) {
    long a = std::rand() % 2001 - 1000;
    long b = std::rand() % 2001 - 1000;
    unsigned long d = 2 + std::rand() % 400;
    long c = 1 + std::rand() % 50;
    mpz_class dz(static_cast<unsigned long>(d));
    if (mpz_perfect_square_p(dz.get_mpz_t())) continue;
    QuadExpr x(a, b, dz, c);
    mpf_class fd(0, 512);
    mpf_sqrt_ui(fd.get_mpf_t(), d);
    mpf_class val = (mpf_class(a, 512) + b * fd) / c;
    mpf_class fl(0, 512);
    mpf_floor(fl.get_mpf_t(), val.get_mpf_t());
    mpz_class expect;
    mpz_set_f(expect.get_mpz_t(), fl.get_mpf_t());
    CHECK(x.floor() == expect);
    // scaled variant at a few scales
    for (unsigned bits : {7u, 64u}) {
      mpf_class scaled = val;
      mpf_mul_2exp(scaled.get_mpf_t(), scaled.get_mpf_t(), bits);
      mpf_floor(fl.get_mpf_t(), scaled.get_mpf_t());
      mpz_set_f(expect.get_mpz_t(), fl.get_mpf_t());
      CHECK(x.scaled_floor(bits) == expect);
    }
  }
}
