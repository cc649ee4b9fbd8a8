#include <doctest.h>

#include "borderlab/laurent.hpp"
#include "borderlab/rng.hpp"
#include "borderlab/scalar.hpp"

using namespace borderlab;

namespace {

Rational frac(long n, long d) {
  Rational q(n, static_cast<unsigned long>(d));
  q.canonicalize();
  return q;
}

}  // namespace

TEST_CASE("rational arithmetic") {
  CHECK(Rational(1, 2) + Rational(1, 3) == Rational(5, 6));
  CHECK(parse_rational("-6/4") == Rational(-3, 2));
  CHECK_THROWS(parse_rational("1/0"));
  SeededRng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    Rational a = frac(rng.uniform_int(-50, 50), rng.uniform_int(1, 30));
    Rational b = frac(rng.uniform_int(-50, 50), rng.uniform_int(1, 30));
    Rational c = frac(rng.uniform_int(-50, 50), rng.uniform_int(1, 30));
    CHECK((a + b) + c == a + (b + c));
    CHECK(a * (b + c) == a * b + a * c);
    if (sgn(a) != 0) CHECK(a * (1 / a) == 1);
  }
}

TEST_CASE("prime table and reduction") {
  for (auto p : prime_table()) CHECK(is_prime_u64(p));
  CHECK(prime_table()[0] == (1ull << 61) - 1);
  CHECK(!is_prime_u64(2305843009213693953ull));
  CHECK(reduce_mod_p(Rational(5, 3), 7).value == 4);
  CHECK(reduce_mod_p(Rational(0), 7).value == 0);
  CHECK_THROWS_AS(reduce_mod_p(Rational(1, 7), 7), BadPrime);
  CHECK_THROWS(PrimeField(15));
}

TEST_CASE("reduction is a ring homomorphism") {
  SeededRng rng(11);
  std::uint64_t p = prime_table()[2];
  for (int trial = 0; trial < 200; ++trial) {
    Rational a = frac(rng.uniform_int(-1000, 1000), rng.uniform_int(1, 99));
    Rational b = frac(rng.uniform_int(-1000, 1000), rng.uniform_int(1, 99));
    CHECK(reduce_mod_p(a + b, p) == reduce_mod_p(a, p) + reduce_mod_p(b, p));
    CHECK(reduce_mod_p(a * b, p) == reduce_mod_p(a, p) * reduce_mod_p(b, p));
  }
}

TEST_CASE("shoup multiplication matches plain") {
  PrimeField f(prime_table()[0]);
  SeededRng rng(5);
  for (int i = 0; i < 1000; ++i) {
    std::uint64_t a = rng.next() % f.modulus(), b = rng.next() % f.modulus();
    CHECK(f.mul_shoup(a, b, f.shoup(b)) == f.mul(a, b));
  }
}

TEST_CASE("cyclotomic field") {
  auto z = Cyclotomic12::zeta_pow;
  CHECK(z(6) * z(6) == Cyclotomic12(1));
  CHECK(z(4) == Cyclotomic12(-1, 0, 1, 0));
  CHECK(z(12) == Cyclotomic12(1));
  CHECK(z(-1) * z(1) == Cyclotomic12(1));
  CHECK(Cyclotomic12::parse("1/2*z^3-2") == Cyclotomic12(-2, 0, 0, Rational(1, 2)));
  Cyclotomic12 x(1, 2, Rational(-1, 3), 5);
  CHECK(x * x.inverse() == Cyclotomic12(1));
}

TEST_CASE("cyclotomic embedding") {
  auto z6 = to_complex(Cyclotomic12::zeta_pow(6), 40);
  CHECK(std::abs(z6.re().to_double() + 1) < 1e-30);
  CHECK(std::abs(z6.im().to_double()) < 1e-30);
  auto z3 = to_complex(Cyclotomic12::zeta_pow(3), 40);
  CHECK(std::abs(z3.im().to_double() - 1) < 1e-30);
  auto z1 = to_complex(Cyclotomic12::zeta_pow(1), 40);
  CHECK(std::abs(z1.re().to_double() - 0.8660254037844386) < 1e-15);
  CHECK(std::abs(z1.im().to_double() - 0.5) < 1e-15);
  SeededRng rng(2);
  for (int t = 0; t < 30; ++t) {
    auto r = [&] { return frac(rng.uniform_int(-9, 9), rng.uniform_int(1, 5)); };
    Cyclotomic12 x(r(), r(), r(), r()), y(r(), r(), r(), r());
    auto lhs = to_complex(x * y, 40);
    auto rhs = to_complex(x, 40) * to_complex(y, 40);
    CHECK((lhs - rhs).abs_double() < 1e-37);
  }
}

TEST_CASE("bigfloat precision") {
  long bits = digits_to_bits(80);
  BigFloat two(Rational(2), bits);
  BigFloat s = BigFloat::sqrt(two);
  BigFloat err = s * s - two;
  CHECK(std::abs(err.to_double()) < 1e-78);
  BigComplex c = BigComplex::parse("1.5-2.25i", bits);
  CHECK(c.re().to_double() == 1.5);
  CHECK(c.im().to_double() == -2.25);
}

TEST_CASE("laurent multiplication") {
  using L = LaurentPoly<Rational>;
  L f = L::monomial(1, -1) + L::monomial(1, 1);
  L g = L::monomial(1, -1) - L::monomial(1, 1);
  CHECK(f * g == L::monomial(1, -2) - L::monomial(1, 2));
  CHECK(L::monomial(1, -5) * L::monomial(1, 5) == L(Rational(1)));
  L h = L(Rational(1)) + L::monomial(2, 1);
  CHECK(h * L::monomial(3, -2) == L::monomial(3, -2) + L::monomial(6, -1));
  CHECK((f - f).is_zero());
  SeededRng rng(9);
  for (int t = 0; t < 50; ++t) {
    std::vector<long> a(5), b(4);
    for (auto& v : a) v = rng.uniform_int(-3, 3);
    for (auto& v : b) v = rng.uniform_int(-3, 3);
    L fa, fb;
    for (int i = 0; i < 5; ++i) fa.add_term(i - 2, Rational(a[static_cast<std::size_t>(i)]));
    for (int i = 0; i < 4; ++i) fb.add_term(i - 1, Rational(b[static_cast<std::size_t>(i)]));
    std::vector<long> dense(8, 0);
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 4; ++j) dense[static_cast<std::size_t>(i + j)] += a[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(j)];
    L prod = laurent_multiply(fa, fb);
    for (int k = 0; k < 8; ++k) CHECK(prod.coeff(k - 3) == Rational(dense[static_cast<std::size_t>(k)]));
  }
}
