#include <doctest.h>

#include <algorithm>
#include <array>
#include <set>

#include <json.hpp>

#include "borderlab/solve.hpp"
#include "borderlab/rng.hpp"

using namespace borderlab;

namespace {

TightWeights det3_tight() {
  auto w = det3_weights();
  return TightWeights::symmetric_from(std::vector<long>(w.begin(), w.end()));
}

TightWeights skewcw4sq_tight() {
  auto w = skewcw4sq_weights();
  return TightWeights::symmetric_from(std::vector<long>(w.begin(), w.end()));
}

struct Planted {
  QTensor t;
  std::array<std::vector<long>, 3> factors;  // r x d per factor, term-major
};

// Rank-3 tensor in (3,3,3) from integer factors with about 20% zeros; factor matrices nonsingular.
Planted planted_rank3(std::uint64_t seed, bool with_zeros) {
  SeededRng rng(seed * 977 + 3);
  Planted p;
  for (auto& f : p.factors) {
    while (true) {
      f.assign(9, 0);
      for (auto& v : f) {
        if (with_zeros && rng.uniform() < 0.2) continue;
        do v = rng.uniform_int(-3, 3);
        while (v == 0);
      }
      long det = f[0] * (f[4] * f[8] - f[5] * f[7]) - f[1] * (f[3] * f[8] - f[5] * f[6]) +
                 f[2] * (f[3] * f[7] - f[4] * f[6]);
      if (det != 0) break;
    }
  }
  p.t = QTensor(3, 3, 3);
  for (std::size_t s = 0; s < 3; ++s)
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j)
        for (std::size_t k = 0; k < 3; ++k)
          p.t.add(i, j, k, Rational(p.factors[0][s * 3 + i] * p.factors[1][s * 3 + j] * p.factors[2][s * 3 + k]));
  return p;
}

}  // namespace

TEST_CASE("standard tight weights") {
  CHECK(is_standard_tight(det_tensor(3), det3_tight()));
  CHECK(is_standard_tight(catalog("skewcw:4^2"), skewcw4sq_tight()));
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    SeededRng rng(seed);
    std::vector<long> w;
    while (w.size() < 3) {
      long v = rng.uniform_int(-20, 20);
      if (std::find(w.begin(), w.end(), v) == w.end()) w.push_back(v);
    }
    CHECK_FALSE(is_standard_tight(cw(2), TightWeights::symmetric_from(w)));
  }
  QTensor one(2, 2, 2);
  one.set(1, 0, 1, 1);
  TightWeights w;
  w.w = {std::vector<long>{5, -3}, {1, 2}, {0, 2}};
  CHECK(is_standard_tight(one, w));
  w.w[2] = {2, 2};
  CHECK_FALSE(is_standard_tight(one, w));
}

TEST_CASE("weights from the exact LP") {
  QTensor t = det_tensor(3);
  Partition part = induced_partition(t, det3_tight());
  auto lp = weights_from_lp(t, part.le, part.gt, true);
  REQUIRE(lp.feasible);
  CHECK(is_standard_tight(t, lp.weights));
  Partition back = induced_partition(t, lp.weights);
  CHECK(back.le == part.le);
  CHECK(back.gt == part.gt);
  auto gt_support = part.gt;
  gt_support.push_back({0, 4, 8});
  CHECK_FALSE(weights_from_lp(t, part.le, gt_support, true).feasible);
  std::vector<Triple> everything = part.le;
  everything.insert(everything.end(), part.gt.begin(), part.gt.end());
  // every index lies on the support, so sums <= 0 everywhere force all weights to 0
  CHECK_FALSE(weights_from_lp(t, everything, {}, true).feasible);
  auto loose = weights_from_lp(t, {}, {}, true);
  REQUIRE(loose.feasible);
  CHECK(is_standard_tight(t, loose.weights));
}

TEST_CASE("minimal equation search") {
  QTensor one(2, 2, 2);
  one.set(0, 0, 0, 1);
  auto s = search_min_equations(one, false, 10000);
  CHECK(s.feasible);
  CHECK(s.complete);
  CHECK(s.count == 1);
  CHECK(equation_count(one.dims(), s.weights, false) == 1);
  auto bad = search_min_equations(cw(2), true, 1000);
  CHECK_FALSE(bad.feasible);
  QTensor d = det_tensor(3);
  std::size_t known = equation_count(d.dims(), det3_tight(), true);
  auto ds = search_min_equations(d, true, 200, det3_tight());
  CHECK(ds.feasible);
  CHECK(ds.count <= known);
  CHECK(is_standard_tight(d, ds.weights));
  CHECK(equation_count(d.dims(), ds.weights, true) == ds.count);
}

TEST_CASE("equation counts and translation invariance") {
  QTensor t = catalog("skewcw:4^2");
  TightWeights w = skewcw4sq_tight();
  TightProblem p = equations(t, w, 42);
  CHECK(p.eqs.size() == 692);
  CHECK(p.unknowns() == 1050);
  CHECK(all_triples(t.dims(), true).size() == 2925);
  CHECK(equation_count(t.dims(), w, false) == 3625);
  TightProblem d = equations(det_tensor(3), det3_tight(), 17);
  CHECK(d.eqs.size() == equation_count({9, 9, 9}, det3_tight(), true));
  CHECK(d.eqs.size() == 87);

  QTensor r = random_tensor(3, 3, 3, 1, 2);
  QTensor mono(3, 3, 3);
  mono.set(0, 2, 1, 1);
  mono.set(1, 1, 1, 2);
  mono.set(2, 0, 1, -1);
  TightWeights a;
  a.w = {std::vector<long>{-4, 0, 4}, {-3, 1, 5}, {0, -1, 2}};
  REQUIRE(is_standard_tight(mono, a));
  TightWeights b = a;
  for (auto& v : b.w[0]) v += 7;
  for (auto& v : b.w[1]) v -= 3;
  for (auto& v : b.w[2]) v -= 4;
  auto pa = equations(mono, a, 2), pb = equations(mono, b, 2);
  CHECK(pa.eqs == pb.eqs);
  CHECK(pa.target == pb.target);
  CHECK_THROWS_AS(equations(r, a, 2), std::invalid_argument);
}

TEST_CASE("analytic Jacobian matches central differences") {
  QTensor t = random_tensor(3, 3, 3, 11, 3);
  for (bool sym : {false, true}) {
    TightProblem p = full_problem(sym ? catalog("cw:2") : t, 3, sym);
    double worst = 0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      auto x = random_start(p, 1000 + seed);
      Eigen::MatrixXcd ja = jacobian(p, x), jf = jacobian_fd(p, x);
      double rel = (ja - jf).norm() / std::max(1.0, ja.norm());
      worst = std::max(worst, rel);
    }
    CHECK(worst < 1e-6);
  }
}

TEST_CASE("Levenberg-Marquardt recovers a planted rank-3 tensor") {
  Planted pl = planted_rank3(1, false);
  TightProblem p = full_problem(pl.t, 3);
  LmConfig cfg;
  std::size_t solved = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    SolveResult r = lm_solve(p, cfg, seed);
    for (std::size_t k = 1; k < r.history.size(); ++k) CHECK(r.history[k] <= r.history[k - 1]);
    if (r.residual < 1e-10) ++solved;
  }
  CHECK(solved >= 1);
  SolveResult par = multi_start(p, cfg, 0, 8), ser = multi_start_serial(p, cfg, 0, 8);
  CHECK(par.residual == ser.residual);
  CHECK(par.x == ser.x);
  CHECK(par.seed == ser.seed);
  REQUIRE(par.residual < 1e-10);
  NumDecomposition d = assemble_decomposition(p, par.x, 30);
  NumericOptions opts;
  opts.digits = 30;
  opts.tolerance = 1e-8;
  opts.match = false;
  auto rep = verify_numeric(d, pl.t, opts);
  CHECK(rep.pass);
  fill_isolation(p, cfg, par);
  CHECK(par.free_params == 27);
  CHECK(par.gauge_dim == 6);
  CHECK(par.isolated);
  auto back = SolveResult::from_json(par.to_json());
  CHECK(back.x == par.x);
  CHECK(back.residual == par.residual);
}

TEST_CASE("zero terms leave the target norm") {
  QTensor t = random_tensor(2, 2, 2, 5, 3);
  TightProblem p = full_problem(t, 0);
  SolveResult r = lm_solve(p, {}, 0);
  double norm = 0;
  for (const auto& v : p.target) norm += v.get_d() * v.get_d();
  CHECK(r.residual == doctest::Approx(std::sqrt(norm)));
  CHECK(r.iterations == 0);
  NumDecomposition z = assemble_decomposition(full_problem(t, 2), std::vector<Complex>(12, 0.0), 20);
  NumericOptions opts;
  opts.digits = 20;
  opts.match = false;
  CHECK_FALSE(verify_numeric(z, t, opts).pass);
}

TEST_CASE("sparsify recovers planted zeros") {
  std::size_t planted = 0, recovered = 0;
  SparsifyConfig cfg;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Planted pl = planted_rank3(seed + 100, true);
    TightProblem p = full_problem(pl.t, 3);
    SolveResult r = multi_start(p, cfg.lm, seed * 50, 10);
    if (r.residual >= 1e-10) {
      for (const auto& f : pl.factors) planted += static_cast<std::size_t>(std::count(f.begin(), f.end(), 0L));
      continue;
    }
    SolveResult sp = sparsify(p, r, cfg);
    CHECK(sp.residual < cfg.accept_tol);
    // match terms by the permutation with the best zero-pattern agreement
    std::array<std::size_t, 3> perm{0, 1, 2}, best_perm = perm;
    std::size_t best = 0;
    do {
      std::size_t hit = 0;
      for (int f = 0; f < 3; ++f)
        for (std::size_t s = 0; s < 3; ++s)
          for (std::size_t i = 0; i < 3; ++i) {
            std::size_t v = p.var(f, perm[s], i);
            if (pl.factors[static_cast<std::size_t>(f)][s * 3 + i] == 0 && sp.state[v] == 1 && sp.x[v] == Complex(0))
              ++hit;
          }
      if (hit > best) {
        best = hit;
        best_perm = perm;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
    for (const auto& f : pl.factors) planted += static_cast<std::size_t>(std::count(f.begin(), f.end(), 0L));
    recovered += best;
  }
  REQUIRE(planted > 0);
  CHECK(static_cast<double>(recovered) >= 0.8 * static_cast<double>(planted));

  // an isolated input comes back unchanged
  QTensor u = unit(2);
  TightProblem pu = full_problem(u, 2);
  SolveResult fixed;
  fixed.x = {1, 0, 0, 1, 1, 0, 0, 1, 1, 0, 0, 1};
  fixed.state = std::vector<int>(12, 1);
  fixed.state[0] = 0;
  SolveResult same = sparsify(pu, fixed, cfg);
  CHECK(same.x == fixed.x);
  CHECK(same.state == fixed.state);
}

TEST_CASE("a pin that breaks solvability is frozen") {
  QTensor one(2, 2, 2);
  one.set(0, 0, 0, 1);
  TightProblem p = full_problem(one, 1);
  SolveResult r;
  r.x = {2, 0, 2, 0, 0.25, 0};
  SparsifyConfig cfg;
  SolveResult s = sparsify(p, r, cfg);
  CHECK(s.residual < cfg.accept_tol);
  // zeros pin; 0.25 snaps to 0, which breaks the product, and is restored
  CHECK(s.state[1] == 1);
  CHECK(s.state[3] == 1);
  CHECK(s.state[5] == 1);
  CHECK(s.state[4] == 2);
  CHECK(s.x[4] == Complex(0.25));
  CHECK(s.state[0] == 2);
  CHECK(s.state[2] == 2);
}

TEST_CASE("the 42-term parameters solve the reduced system") {
  QTensor t = catalog("skewcw:4^2");
  TightProblem p = equations(t, skewcw4sq_tight(), 42);
  auto d = builtin_skewcw4sq_42(30);
  auto big = parameters_from_decomposition(d, p);
  std::vector<Complex> x;
  for (const auto& z : big) x.emplace_back(z.re().to_double(), z.im().to_double());
  LmConfig cfg;
  cfg.max_iter = 0;
  SolveResult r = lm_solve_from(p, x, cfg);
  CHECK(r.residual <= 1e-13);
  CHECK(r.max_residual <= 1e-14);
  auto hp = residual(p, big, 30);
  double worst = 0;
  for (const auto& z : hp) worst = std::max(worst, z.abs_double());
  CHECK(worst <= 1e-14);
}

TEST_CASE("det3 data through the equations") {
  TightProblem p = equations(det_tensor(3), det3_tight(), 17);
  auto big = parameters_from_decomposition(builtin_det3_17(60), p);
  auto f = residual(p, big, 60);
  double worst = 0;
  for (const auto& z : f) worst = std::max(worst, z.abs_double());
  CHECK(worst <= 1e-40);
  std::vector<Complex> x;
  for (const auto& z : big) x.emplace_back(z.re().to_double(), z.im().to_double());
  NumDecomposition d = assemble_decomposition(p, x, 30);
  NumericOptions opts;
  opts.digits = 30;
  opts.tolerance = 1e-12;
  opts.match = false;
  CHECK(verify_numeric(d, det_tensor(3), opts).pass);
}

TEST_CASE("two expansion paths agree on every built-in") {
  for (std::string name : {"cw:2", "cw:5", "cw:10", "skewcw:2", "skewcw:4", "skewcw:10", "skewcw2-rank5", "det3-17",
                           "skewcw4sq-42"}) {
    CAPTURE(name);
    CrossCheck cc = cross_check(name);
    CHECK(cc.pass);
    CHECK(cc.compared > 0);
    CHECK(cc.max_diff <= 1e-12);
  }
  CHECK(cross_check("det3-17").path == "equations");
  CHECK(cross_check("cw:3").path == "sampling");
}

TEST_CASE("problem json round trip") {
  TightProblem p = equations(det_tensor(3), det3_tight(), 17);
  TightProblem q = TightProblem::from_json(p.to_json());
  CHECK(q.eqs == p.eqs);
  CHECK(q.target == p.target);
  CHECK(q.exponent == p.exponent);
  CHECK(q.weights->w == p.weights->w);
  CHECK(q.unknowns() == 153);
  auto j = nlohmann::json::parse(p.to_json());
  j["equations"][0][0] = 99;
  CHECK_THROWS(TightProblem::from_json(j.dump()));
}
