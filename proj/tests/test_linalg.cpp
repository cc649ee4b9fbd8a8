#include <doctest.h>

#include "borderlab/linalg.hpp"
#include "borderlab/rng.hpp"
#include "borderlab/tensor.hpp"

using namespace borderlab;

namespace {

QMatrix random_int_matrix(std::size_t r, std::size_t c, std::uint64_t seed, int bound = 9) {
  SeededRng rng(seed);
  QMatrix m(r, c);
  for (auto& x : m.a) x = static_cast<long>(rng.uniform_int(-bound, bound));
  return m;
}

// Rank-k product of random factors.
QMatrix low_rank(std::size_t r, std::size_t c, std::size_t k, std::uint64_t seed) {
  QMatrix u = random_int_matrix(r, k, seed), v = random_int_matrix(k, c, seed + 1000);
  QMatrix m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j)
      for (std::size_t t = 0; t < k; ++t) m(i, j) += u(i, t) * v(t, j);
  return m;
}

bool in_kernel(const QMatrix& m, const QVector& v) {
  for (std::size_t i = 0; i < m.rows; ++i) {
    Rational s = 0;
    for (std::size_t j = 0; j < m.cols; ++j) s += m(i, j) * v[j];
    if (sgn(s) != 0) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("exact rank basics") {
  CHECK(rank_exact(QMatrix::identity(3)) == 3);
  CHECK(rank_exact(QMatrix(4, 4, Rational(1))) == 1);
  CHECK(rank_exact(QMatrix(2, 3)) == 0);
  QMatrix h(2, 2);
  h(0, 0) = Rational(1, 2);
  h(0, 1) = Rational(1, 3);
  h(1, 0) = Rational(1, 3);
  h(1, 1) = Rational(2, 9);
  CHECK(rank_exact(h) == 1);
}

TEST_CASE("exact rank agrees with modular rank on random matrices") {
  int equal = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    QMatrix m = seed % 3 == 0 ? low_rank(20, 20, 5 + seed % 11, seed) : random_int_matrix(20, 20, seed);
    std::size_t r = rank_exact(m);
    std::uint64_t p = prime_for_seed(seed);
    std::size_t rp = rank_modp(reduce_mod_p(m, p));
    CHECK(rp <= r);
    if (rp == r) ++equal;
    CHECK(rank_modp_serial(reduce_mod_p(m, p)) == rp);
    CHECK(rank_certified(m) == r);
  }
  CHECK(equal >= 99);
}

TEST_CASE("modular rank") {
  ModMatrix id(5, 5, 7);
  for (std::size_t i = 0; i < 5; ++i) id(i, i) = 1;
  CHECK(rank_modp(id) == 5);
  QMatrix dup = random_int_matrix(4, 6, 3);
  for (std::size_t j = 0; j < 6; ++j) dup(3, j) = dup(1, j);
  CHECK(rank_modp(reduce_mod_p(dup, 7)) == rank_modp(reduce_mod_p(dup, 7)));
  CHECK(rank_exact(dup) == 3);
  // Rank drops modulo a prime dividing a minor.
  QMatrix m(2, 2);
  m(0, 0) = 1;
  m(0, 1) = 2;
  m(1, 0) = 3;
  m(1, 1) = 13;
  CHECK(rank_exact(m) == 2);
  CHECK(rank_modp(reduce_mod_p(m, 7)) == 1);
}

TEST_CASE("parallel and serial modular rank agree") {
  QMatrix m = low_rank(120, 90, 61, 77);
  std::vector<std::size_t> p1, p2;
  auto mm = reduce_mod_p(m, prime_table()[1]);
  set_thread_count(4);
  std::size_t a = rank_modp(mm, &p1);
  set_thread_count(1);
  std::size_t b = rank_modp(mm, &p2);
  set_thread_count(0);
  CHECK(a == 61);
  CHECK(a == b);
  CHECK(p1 == p2);
  CHECK(rank_modp_serial(mm) == a);
}

TEST_CASE("kernel basis") {
  CHECK(kernel_basis(QMatrix::identity(3)).empty());
  CHECK(kernel_basis(QMatrix(2, 3)).size() == 3);
  QMatrix row(1, 3);
  row(0, 0) = 1;
  row(0, 1) = 1;
  auto k = kernel_basis(row);
  CHECK(k.size() == 2);
  CHECK(k[0] == QVector{-1, 1, 0});
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    QMatrix m = low_rank(15, 25, 3 + seed % 9, seed);
    m(0, 0) += Rational(1, 7);
    auto ker = kernel_basis(m);
    CHECK(ker.size() == m.cols - rank_exact(m));
    for (const auto& v : ker) CHECK(in_kernel(m, v));
    CHECK(kernel_basis_exact(m).size() == ker.size());
  }
}

TEST_CASE("kernel lifting with large entries falls back correctly") {
  QMatrix m = random_int_matrix(30, 31, 5, 1000000);
  auto ker = kernel_basis(m);
  REQUIRE(ker.size() == 1);
  CHECK(in_kernel(m, ker[0]));
}

TEST_CASE("cyclotomic rank and kernel") {
  Matrix<Cyclotomic12> m(2, 2);
  auto z = Cyclotomic12::zeta_pow;
  m(0, 0) = z(1);
  m(0, 1) = z(2);
  m(1, 0) = z(3);
  m(1, 1) = z(4);
  CHECK(rank_exact(m) == 1);
  auto k = kernel_basis(m);
  REQUIRE(k.size() == 1);
  CHECK((m(0, 0) * k[0][0] + m(0, 1) * k[0][1]).is_zero());
}

TEST_CASE("rational reconstruction") {
  std::uint64_t p = prime_table()[0];
  PrimeField f(p);
  auto r = rational_reconstruct(f.from_rational(Rational(-22, 7)), p);
  REQUIRE(r);
  CHECK(*r == Rational(-22, 7));
}

TEST_CASE("subspace intersection") {
  std::vector<QVector> xy{{1, 0, 0}, {0, 1, 0}}, yz{{0, 1, 0}, {0, 0, 1}};
  auto i = intersect({xy, yz}, 3);
  REQUIRE(i.size() == 1);
  CHECK(i[0] == QVector{0, 1, 0});
  CHECK(intersect({xy, xy}, 3).size() == 2);
  SeededRng rng(1);
  auto plane = [&] {
    std::vector<QVector> p(2, QVector(4));
    for (auto& v : p)
      for (auto& x : v) x = static_cast<long>(rng.uniform_int(-9, 9));
    return p;
  };
  CHECK(intersect({plane(), plane(), plane()}, 4).empty());
  CHECK(intersect({plane(), plane()}, 4).empty());
}

TEST_CASE("independent subset") {
  std::vector<QVector> vs{{1, 2}, {2, 4}, {0, 1}, {1, 1}};
  CHECK(independent_subset(vs) == std::vector<std::size_t>{0, 2});
}

TEST_CASE("parametric rank") {
  QPoly x = QPoly::x();
  Matrix<QPoly> a(2, 2);
  a(0, 0) = x;
  a(1, 1) = 1;
  auto r = rank_parametric(a);
  CHECK(r.generic_rank == 2);
  CHECK(r.min_rank == 1);
  CHECK(r.exceptional == x);
  Matrix<QPoly> b(2, 2);
  b(0, 0) = 1;
  b(0, 1) = x;
  b(1, 0) = x;
  b(1, 1) = x * x;
  auto rb = rank_parametric(b);
  CHECK(rb.generic_rank == 1);
  CHECK(rb.min_rank == 1);
  Matrix<QPoly> c(3, 3);
  QMatrix cq = low_rank(3, 3, 2, 4);
  for (std::size_t k = 0; k < 9; ++k) c.a[k] = cq.a[k];
  auto rc = rank_parametric(c);
  CHECK(rc.generic_rank == rank_exact(cq));
  CHECK(rc.min_rank == rc.generic_rank);
  CHECK_THROWS_AS(rank_parametric(Matrix<QPoly>(65, 2)), DimensionBudget);
}

TEST_CASE("parametric rank matches random specialization") {
  SeededRng rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    Matrix<QPoly> m(5, 6);
    for (auto& e : m.a)
      e = QPoly(std::vector<Rational>{Rational(static_cast<long>(rng.uniform_int(-3, 3))),
                                      Rational(static_cast<long>(rng.uniform_int(-3, 3)))});
    // Force a dependency so the generic rank is 4.
    for (std::size_t j = 0; j < 6; ++j) m(4, j) = m(0, j) + QPoly::x() * m(1, j);
    auto r = rank_parametric(m);
    Rational x0(37, 11);
    CHECK(sgn(r.exceptional.eval(x0)) != 0);
    QMatrix s(5, 6);
    for (std::size_t k = 0; k < 30; ++k) s.a[k] = m.a[k].eval(x0);
    CHECK(r.generic_rank == rank_exact(s));
    CHECK(r.generic_rank == 4);
  }
}

TEST_CASE("projective enumeration") {
  CHECK(projective_point_count(5, 3) == 31);
  CHECK(projective_point_count(3, 9) == 9841);
  CHECK(projective_point(0, 5, 3) == std::vector<std::uint64_t>{0, 0, 1});
  CHECK(projective_point(1, 5, 3) == std::vector<std::uint64_t>{0, 1, 0});
  CHECK(projective_point(30, 5, 3) == std::vector<std::uint64_t>{1, 4, 4});
}

TEST_CASE("minimum rank certificates") {
  auto id = min_rank_certificate({QMatrix::identity(4)}, 5, 100);
  CHECK(id.rho == 4);
  auto s = slice_space(cw(2), Factor::C);
  auto r = min_rank_certificate(s.basis, 5, 1000);
  CHECK(r.rho == 2);
  CHECK(r.points == 31);
  CHECK(min_rank_certificate_serial(s.basis, 5, 1000).rho == 2);
  auto big = slice_space(kronecker(cw(2), cw(2)), Factor::C);
  REQUIRE(big.dim() == 9);
  auto rb = min_rank_certificate(big.basis, 3, 20000);
  CHECK(rb.points == 9841);
  CHECK(rb.rho == 4);  // independent exhaustive oracle
  auto rs = min_rank_certificate_serial(big.basis, 3, 20000);
  CHECK(rs.rho == rb.rho);
  CHECK(rs.witness == rb.witness);
  CHECK_THROWS_AS(min_rank_certificate(big.basis, 3, 100), BudgetExceeded);
  // Soundness spot-check with a second prime.
  CHECK(min_rank_certificate(s.basis, 7, 1000).rho == 2);
}

TEST_CASE("rank certificate json") {
  RankCertificate c;
  c.rank = 5;
  c.prime = 7;
  c.seed = 2;
  CHECK(c.to_json() == R"({"method":"mod-p","prime":7,"rank":5,"seed":2})");
}
