#include <doctest.h>

#include <cmath>

#include "borderlab/decomp.hpp"

using namespace borderlab;

namespace {

QDecomposition single_term() {
  QDecomposition d;
  d.dims = {2, 2, 2};
  DecompTerm<Rational> t;
  t.coeff = LaurentPoly<Rational>(Rational(1), 0);
  t.a = {LaurentPoly<Rational>(Rational(1), 0), {}};
  t.b = t.a;
  t.c = t.a;
  d.terms.push_back(t);
  return d;
}

QTensor e000() {
  QTensor t(2, 2, 2);
  t.set(0, 0, 0, 1);
  return t;
}

}  // namespace

TEST_CASE("decomp: single rank-one term verifies against itself") {
  auto rep = verify_exact(single_term(), e000());
  CHECK(rep.pass);
  CHECK(rep.witness.empty());
  CHECK(rep.lowest_exponent == 0);
}

TEST_CASE("decomp: cw(q) built-in, q+2 terms, exact pass with scale 1") {
  for (int q = 2; q <= 10; ++q) {
    auto d = builtin_cw(q);
    CHECK(d.size() == static_cast<std::size_t>(q + 2));
    auto rep = verify_exact(d, cw(q));
    CHECK_MESSAGE(rep.pass, "q=" << q << " " << rep.witness);
    CHECK(rep.lowest_exponent == -3);
  }
}

TEST_CASE("decomp: skewcw(q) built-in, 3q/2+2 terms, exact pass") {
  for (int q : {2, 4, 6, 8, 10}) {
    auto d = builtin_skewcw(q);
    CHECK(d.size() == static_cast<std::size_t>(3 * q / 2 + 2));
    auto rep = verify_exact(d, skewcw(q));
    CHECK_MESSAGE(rep.pass, "q=" << q << " " << rep.witness);
  }
}

TEST_CASE("decomp: corrected rank-five expression equals skewcw(2)") {
  auto d = builtin_skewcw2_rank5();
  CHECK(d.size() == 5);
  CHECK(verify_exact(d, skewcw(2)).pass);
  // The printed sign on the fifth term gives a different tensor.
  auto bad = d;
  bad.terms[4].coeff = -bad.terms[4].coeff;
  auto rep = verify_exact(bad, skewcw(2));
  CHECK_FALSE(rep.pass);
  CHECK_FALSE(rep.witness.empty());
}

TEST_CASE("decomp: dropping any single term breaks cw:2 and skewcw:2") {
  for (const auto& [d, t] : {std::pair{builtin_cw(2), cw(2)}, std::pair{builtin_skewcw(2), skewcw(2)}}) {
    for (std::size_t s = 0; s < d.size(); ++s) {
      auto e = d;
      e.terms.erase(e.terms.begin() + static_cast<long>(s));
      CHECK_FALSE(verify_exact(e, t).pass);
    }
  }
}

TEST_CASE("decomp: t -> c t preserves pass and fail") {
  for (const Rational& c : {Rational(2), Rational(-1, 3), Rational(7, 5)}) {
    CHECK(verify_exact(reparametrized(builtin_cw(3), c), cw(3)).pass);
    CHECK(verify_exact(reparametrized(builtin_skewcw(4), c), skewcw(4)).pass);
    auto bad = builtin_cw(3);
    bad.terms.pop_back();
    CHECK_FALSE(verify_exact(reparametrized(bad, c), cw(3)).pass);
  }
}

TEST_CASE("decomp: symmetric built-ins expand to symmetric t^0 tensors") {
  auto d = builtin_cw(4);
  auto e = expand(d, 0);
  const auto& x0 = e.coeff.at(0);
  for (const auto& [idx, v] : x0) {
    std::size_t n = d.dims[0];
    std::size_t k = idx % n, j = (idx / n) % n, i = idx / (n * n);
    for (auto [a, b, c] : {std::array{i, k, j}, std::array{j, i, k}, std::array{j, k, i}, std::array{k, i, j},
                           std::array{k, j, i}}) {
      auto it = x0.find(e.index(a, b, c));
      REQUIRE(it != x0.end());
      CHECK(it->second == v);
    }
  }
}

TEST_CASE("decomp: exact decompositions survive numeric evaluation") {
  for (int digits : {20, 60, 100}) {
    NumericOptions o;
    o.digits = digits;
    auto rep = verify_numeric(builtin_cw(2), cw(2), o);
    CHECK(rep.pass);
    CHECK(rep.max_negative_residual <= std::pow(10.0, -(digits - 5)));
    CHECK(rep.t0_max_residual <= std::pow(10.0, -(digits - 5)));
    CHECK(rep.permutation == "id");
    CHECK(verify_numeric(builtin_skewcw(6), skewcw(6), o).pass);
  }
}

TEST_CASE("decomp: det3 17-term data at 60 digits") {
  auto d = builtin_det3_17(60);
  CHECK(d.size() == 17);
  CHECK(d.symmetric);
  NumericOptions o;
  o.digits = 60;
  auto rep = verify_numeric(d, det_tensor(3), o);
  CHECK(rep.pass);
  CHECK(rep.lowest_exponent == -15);
  CHECK(rep.max_negative_residual <= 1e-40);
  CHECK(rep.t0_max_residual <= 1e-40);
  // Kronecker-square convention: scale 1 with the identity identification.
  CHECK(rep.permutation == "id");
  auto lam = BigComplex::parse(rep.scale, 200);
  CHECK(std::fabs(lam.re().to_double() - 1) < 1e-25);
  CHECK(std::fabs(lam.im().to_double()) < 1e-25);
  // Against the polynomial-coefficient form the matched scale is 6.
  auto rep6 = verify_numeric(d, det_poly_tensor(3), o);
  CHECK(rep6.pass);
  CHECK(std::fabs(BigComplex::parse(rep6.scale, 200).re().to_double() - 6) < 1e-25);
}

TEST_CASE("decomp: det3 radicals agree with their closed forms") {
  const long bits = digits_to_bits(90);
  const auto& r = det3_radicals();
  BigFloat five(Rational(5), bits);
  BigFloat s5 = BigFloat::sqrt(five);
  BigFloat two5(Rational(2, 5), bits);
  BigFloat one(Rational(1), bits);
  BigFloat cp = BigFloat::cbrt(one + two5 * s5);
  BigFloat cm = BigFloat::cbrt(one - two5 * s5);
  // 5^(5/6)/5 = 5^(-1/6): its sixth power is 1/5.
  BigFloat c55(r.c55, bits);
  BigFloat c6 = c55 * c55 * c55 * c55 * c55 * c55;
  CHECK(BigFloat::abs(c6 - BigFloat(Rational(1, 5), bits)).to_double() < 1e-78);
  CHECK(BigFloat::abs(cp - BigFloat(r.cplus, bits)).to_double() < 1e-78);
  CHECK(BigFloat::abs(cm - BigFloat(r.cminus, bits)).to_double() < 1e-78);
}

TEST_CASE("decomp: skewcw4^2 42-term data") {
  auto d = builtin_skewcw4sq_42(30);
  CHECK(d.size() == 42);
  NumericOptions o;
  o.digits = 30;
  auto rep = verify_numeric(d, catalog("skewcw:4^2"), o);
  CHECK(rep.pass);
  CHECK(rep.tolerance == doctest::Approx(1e-14));
  CHECK(rep.max_negative_residual <= 1e-14);
  CHECK(rep.t0_max_residual <= 1e-14);
  CHECK(rep.permutation == "id");
  CHECK(rep.lowest_exponent == -807);
  CHECK_FALSE(rep.warnings.empty());
  CHECK(skewcw4sq_weights()[0] == -269);
  CHECK(skewcw4sq_weights()[5] == -104);
}

TEST_CASE("decomp: scale_match") {
  SUBCASE("exact decomposition of T against T") {
    auto m = scale_match(builtin_cw(3), cw(3));
    CHECK(m.permutation == "id");
    CHECK(m.residual < 1e-50);
    CHECK(std::fabs(m.lambda.re().to_double() - 1) < 1e-50);
  }
  SUBCASE("Kronecker square vs polynomial-coefficient det") {
    Tensor3<BigComplex> x(9, 9, 9);
    det_tensor(3).for_each_nonzero([&](std::size_t i, std::size_t j, std::size_t k, const Rational& v) {
      x.set(i, j, k, to_complex(v, 60));
    });
    auto m = scale_match(x, det_poly_tensor(3));
    CHECK(m.residual < 1e-50);
    CHECK(std::fabs(m.lambda.re().to_double() - 6) < 1e-12);
  }
  SUBCASE("transposed target found") {
    Tensor3<BigComplex> x(4, 4, 4);
    QTensor t = catalog("matmul:2");
    apply_identification(t, "swap").for_each_nonzero(
        [&](std::size_t i, std::size_t j, std::size_t k, const Rational& v) { x.set(i, j, k, to_complex(v, 60)); });
    auto m = scale_match(x, t);
    CHECK(m.residual < 1e-50);
    CHECK(apply_identification(t, m.permutation) == apply_identification(t, "swap"));
  }
  SUBCASE("mismatched dims") {
    auto m = scale_match(builtin_cw(2), cw(3));
    CHECK(std::isinf(m.residual));
    CHECK(m.permutation == "none");
  }
  CHECK(index_identifications({9, 9, 9}).size() == 8);
  CHECK(index_identifications({3, 4, 5}).size() == 2);
}

TEST_CASE("decomp: omega bound") {
  CHECK(omega_bound(8, 1, 10) == doctest::Approx(2.403632261).epsilon(1e-9));
  CHECK(omega_bound(5, 3, 27.0 / 4 * 125) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(omega_bound(2, 2, 16) == doctest::Approx(std::log2(4.0 / 27 * 64)).epsilon(1e-9));
  CHECK(omega_bound(8, 1, 11) > omega_bound(8, 1, 10));
  CHECK(omega_bound(8, 2, 100) < omega_bound(8, 1, 100));
}

TEST_CASE("decomp: JSON round trip") {
  for (const auto& name : {std::string("cw:3"), std::string("skewcw:4"), std::string("det3-17")}) {
    AnyDecomposition d = builtin(name, 60);
    AnyDecomposition back = decomposition_from_json(decomposition_to_json(d));
    CHECK(back.index() == d.index());
    auto rep = verify_numeric_any(back, catalog(builtin_target(name)));
    CHECK_MESSAGE(rep.pass, name);
  }
  CHECK_THROWS(builtin("nope"));
  CHECK_THROWS(builtin("cw:x"));
}
