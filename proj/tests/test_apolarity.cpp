#include <doctest.h>

#include <json.hpp>

#include "borderlab/apolarity.hpp"

using namespace borderlab;

namespace {

constexpr std::array<int, 3> kAB{1, 1, 0};

SpaceVector sum_of(std::size_t d2, std::initializer_list<std::pair<std::size_t, std::size_t>> coords) {
  SpaceVector v;
  for (auto [i, j] : coords) v.coords[i * d2 + j] = {Rational(1), Rational(0)};
  return v;
}

CandidateSpace complement(std::size_t d1, std::size_t d2, std::vector<SpaceVector> basis) {
  CandidateSpace e;
  e.grade = kAB;
  e.d1 = d1;
  e.d2 = d2;
  e.basis = std::move(basis);
  return e;
}

// perm(3) candidate with a^i_i' -> (i - 1) * 3 + (i' - 1).
CandidateSpace perm3_complement() {
  auto a = [](int i, int ip) { return static_cast<std::size_t>((i - 1) * 3 + (ip - 1)); };
  return complement(9, 9,
                    {sum_of(9, {{a(1, 1), a(1, 1)}}),
                     sum_of(9, {{a(1, 2), a(1, 1)}, {a(1, 1), a(1, 2)}}),
                     sum_of(9, {{a(1, 3), a(1, 1)}, {a(1, 1), a(1, 3)}}),
                     sum_of(9, {{a(2, 1), a(1, 1)}, {a(1, 1), a(2, 1)}}),
                     sum_of(9, {{a(3, 1), a(1, 1)}, {a(1, 1), a(3, 1)}}),
                     sum_of(9, {{a(1, 2), a(1, 2)}}),
                     sum_of(9, {{a(1, 3), a(1, 2)}, {a(1, 2), a(1, 3)}})});
}

CandidateSpace staircase() {
  std::vector<SpaceVector> b;
  for (std::size_t i = 0; i < 27; ++i)
    for (std::size_t j = 0; i + j <= 5; ++j) b.push_back(unit_vector(27, i, j));
  return complement(27, 27, b);
}

}  // namespace

TEST_CASE("single-point spaces at r = dim of the slice space") {
  CandidateSpace u = slice_candidate(unit(3), kAB);
  CHECK(u.dim() == 3);
  CHECK(test_210(u, 3).pass_generic());
  CHECK(test_120(u, 3).pass_generic());
  CHECK(test_210(u, 3).exact);
  // border rank 4: the slice space alone fails at r = 3
  QTensor t = cw_split(2);
  CandidateSpace s = slice_candidate(t, kAB);
  CHECK(s.dim() == 3);
  CHECK(test_210(s, 3).refuted_all());
  auto tw = torus_weights(t);
  auto cands = torus_candidates(t, kAB, 3, tw);
  REQUIRE(cands.size() == 1);
  CHECK(cands[0].dim() == 3);
  CHECK(torus_candidates(t, kAB, 2, tw).empty());
}

TEST_CASE("cw(2) in split form: three candidates pass at r = 4") {
  QTensor t = catalog("cwsplit:2");
  auto tw = torus_weights(t);
  auto classes = weight_classes(t, kAB, tw);
  std::size_t singles = 0, doubles = 0;
  for (const auto& c : classes) {
    if (c.coords.size() == 1) {
      ++singles;
      CHECK(c.slice_part.empty());
    } else {
      ++doubles;
      CHECK(c.coords.size() == 2);
      CHECK(c.slice_part.size() == 1);
    }
  }
  CHECK(singles == 3);
  CHECK(doubles == 3);
  auto cands = torus_candidates(t, kAB, 4, tw);
  CHECK(cands.size() == 6);
  std::size_t passing = 0;
  for (const auto& e : cands) {
    auto l = test_210(e, 4), r = test_120(e, 4);
    if (l.pass_generic() && r.pass_generic()) ++passing;
    CHECK(is_torus_fixed(e, tw, std::vector<Rational>(tw.dim, Rational(3, 2))));
  }
  CHECK(passing == 3);
  auto rep = lower_bound_search(t, 4, {}, "cwsplit:2");
  CHECK(rep.survivors[0] == 3);
  CHECK(rep.survivors[1] == 3);
  CHECK(rep.survivors[2] == 3);
}

TEST_CASE("(210) and (120) agree on symmetric spaces") {
  auto e = perm3_complement();
  for (std::size_t r : {7u, 8u, 9u}) {
    CHECK(test_210(e, r).kernel_generic == test_120(e, r).kernel_generic);
  }
  auto s = staircase();
  CandidateSpace sym = s;
  for (auto& v : sym.basis) {
    SpaceVector w;
    for (auto& [idx, pe] : v.coords) w.coords[(idx % 27) * 27 + idx / 27] = pe;
    v = w;
  }
  CHECK(test_210(s, 0).kernel_generic == test_120(sym, 0).kernel_generic);
}

TEST_CASE("perm(3) candidate of dimension 16") {
  QTensor t = perm_tensor(3);
  auto c = perm3_complement();
  auto k = kappa_split(t, c);
  CHECK(k.free == 1);
  // the kernel also holds the symmetric a11 a12 a13 element, so the pure part is 9
  CHECK(k.pure == 9);
  CHECK(k.total == k.free + k.pure + k.mixed);
  auto km = kappa_split(t, c, true);
  CHECK(km.pure == 9);
  CHECK(km.free == 1);
  auto e = with_slices(t, c);
  CHECK(e.dim() == 16);
  CHECK(test_210(e, 16).pass_generic());
  CHECK(test_120(e, 16).pass_generic());
  auto prof = cartan_bound(c);
  CHECK(prof.s == std::vector<std::size_t>{5, 2});
  CHECK(prof.bound() == k.pure);
  CHECK_THROWS_AS(kappa_split(t, slice_candidate(t, kAB)), std::invalid_argument);
}

TEST_CASE("staircase complement attains its Cartan bound") {
  auto e = staircase();
  CHECK(e.dim() == 21);
  auto prof = cartan_bound(e);
  CHECK(prof.s == std::vector<std::size_t>{6, 5, 4, 3, 2, 1});
  CHECK(prof.bound() == 56);
  CHECK(test_210(e, 0).kernel_generic == 56);
}

TEST_CASE("trivial flag profiles") {
  auto one = complement(3, 3, {unit_vector(3, 0, 0)});
  CHECK(cartan_bound(one).s == std::vector<std::size_t>{1});
  CHECK(cartan_bound(one).bound() == 1);
  auto row = complement(3, 3, {unit_vector(3, 0, 0), unit_vector(3, 0, 1), unit_vector(3, 0, 2)});
  CHECK(cartan_bound(row).s == std::vector<std::size_t>{1, 1, 1});
  CHECK(cartan_bound(row).bound() == 6);
  CHECK(cartan_bound(row, false).s == std::vector<std::size_t>{3});
}

TEST_CASE("flag filtration check") {
  auto rank_one = [](std::size_t i, std::size_t j) {
    QMatrix m(6, 6);
    m(i, j) = 1;
    return m;
  };
  FlagCheck ok = flag_filtration_check({{rank_one(0, 0)}});
  CHECK_FALSE(ok.refuted);
  CHECK(ok.generic_ranks == std::vector<std::size_t>{1});
  QMatrix three(6, 6);
  for (std::size_t i = 0; i < 3; ++i) three(i, i) = 1;
  FlagCheck bad = flag_filtration_check({{three}});
  CHECK(bad.refuted);
  CHECK(bad.first_refuted == 1);
  FlagCheck two = flag_filtration_check({{rank_one(0, 0)}, {rank_one(0, 0), rank_one(1, 1)}});
  CHECK_FALSE(two.refuted);
  CHECK(two.generic_ranks == std::vector<std::size_t>{1, 2});
  FlagCheck late = flag_filtration_check({{rank_one(0, 0)}, {rank_one(0, 0), rank_one(1, 1), rank_one(2, 2),
                                                              rank_one(3, 3), rank_one(4, 4)}});
  CHECK(late.refuted);
  CHECK(late.first_refuted == 2);
}

TEST_CASE("one-parameter families report special values") {
  // x a0 (x) b1 + a1 (x) b0 together with a0 (x) b0: (210) at r = 3 on C^2 (x) C^2
  CandidateSpace e = complement(2, 2, {unit_vector(2, 0, 0)});
  SpaceVector fam;
  fam.var = 0;
  fam.coords[0 * 2 + 1] = {Rational(0), Rational(1)};
  fam.coords[1 * 2 + 0] = {Rational(1), Rational(0)};
  e.basis.push_back(fam);
  auto o = test_210(e, 3);
  CHECK(o.exact);
  CHECK(o.param_var == 0);
  // kernel is spanned by symmetric tensors; generic element has kernel 2
  for (long x : {2L, 5L}) {
    CandidateSpace s = complement(2, 2, {unit_vector(2, 0, 0), sum_of(2, {{1, 0}})});
    s.basis[1].coords[1] = {Rational(x), Rational(0)};
    CHECK(test_210(s, 3).kernel_generic == o.kernel_generic);
  }
  CandidateSpace zero = complement(2, 2, {unit_vector(2, 0, 0), unit_vector(2, 1, 0)});
  CHECK(o.kernel_max >= test_210(zero, 3).kernel_generic);
  CHECK(o.kernel_max >= o.kernel_generic);
}

TEST_CASE("two-parameter components are relaxed soundly") {
  CandidateSpace e = complement(3, 3, {unit_vector(3, 0, 0)});
  for (int v = 0; v < 2; ++v) {
    SpaceVector fam;
    fam.var = v;
    fam.coords[static_cast<std::size_t>(v + 1) * 3 + 0] = {Rational(0), Rational(1)};
    fam.coords[0 * 3 + static_cast<std::size_t>(v + 1)] = {Rational(1), Rational(0)};
    e.basis.push_back(fam);
  }
  auto o = test_210(e, 5);
  CHECK(o.kernel_max >= o.kernel_generic);
  for (long x : {0L, 1L, -1L, 3L})
    for (long y : {0L, 1L, 2L}) {
      CandidateSpace s = e;
      s.basis[1].var = s.basis[2].var = -1;
      s.basis[1].coords[3] = {Rational(x), Rational(0)};
      s.basis[2].coords[6] = {Rational(y), Rational(0)};
      CHECK(test_210(s, 5).kernel_generic <= o.kernel_max);
    }
}

TEST_CASE("torus weights") {
  auto tw = torus_weights(unit(3));
  CHECK(tw.dim == 6);
  auto cw2 = torus_weights(catalog("cwsplit:2"));
  CHECK(cw2.dim == 4);
  auto sk = torus_weights(skewcw(4));
  CHECK(sk.dim == 5);
  auto tm = torus_weights(matmul(2, 2, 2));
  CHECK(tm.dim == 5);
  QTensor t = catalog("cwsplit:2");
  CandidateSpace s = slice_candidate(t, kAB);
  CHECK(is_torus_fixed(s, cw2, {Rational(2), Rational(-3), Rational(5, 7), Rational(11)}));
  CandidateSpace mixed = complement(3, 3, {sum_of(3, {{0, 0}, {0, 1}})});
  CHECK_FALSE(is_torus_fixed(mixed, cw2, {Rational(2), Rational(-3), Rational(5, 7), Rational(11)}));
}

TEST_CASE("skewcw(4) weight classes") {
  QTensor t = skewcw(4);
  auto tw = torus_weights(t);
  auto classes = weight_classes(t, kAB, tw);
  std::map<std::size_t, std::size_t> sizes;
  std::size_t slice_total = 0, relax = 0;
  for (const auto& c : classes) {
    ++sizes[c.coords.size()];
    slice_total += c.slice_part.size();
    if (c.complement.size() >= 3) ++relax;
  }
  CHECK(sizes[1] == 5);
  CHECK(sizes[2] == 8);
  CHECK(sizes[4] == 1);
  CHECK(slice_total == 5);
  CHECK(relax == 1);
}

TEST_CASE("skewcw(4) admits no torus-fixed triple at r = 7") {
  auto rep = lower_bound_search(skewcw(4), 7, {}, "skewcw:4");
  CHECK(rep.torus_dim == 5);
  CHECK(rep.triples > 0);
  CHECK(rep.no_triple_passes());
  CHECK(rep.triples_passing == 0);
  CHECK(rep.triples_inconclusive == 0);
  CHECK(rep.max_111 < 7);
  auto j = nlohmann::json::parse(rep.to_json());
  CHECK(j["no_triple_passes"].get<bool>());
}

TEST_CASE("weak construction at m = 9") {
  auto wc = weak_candidate(9, 18);
  CHECK(wc.k == 3);
  for (const auto& c : wc.complements) CHECK(c.dim() == 9);
  QTensor t = weak_witness_tensor(9, 18);
  CHECK(is_concise(t) == std::array<bool, 3>{true, true, true});
  std::array<CandidateSpace, 3> e;
  for (std::size_t g = 0; g < 3; ++g) {
    e[g] = with_slices(t, wc.complements[g]);
    CHECK(e[g].dim() == 18);
    CHECK(test_210(e[g], 18).pass_generic());
    CHECK(test_120(e[g], 18).pass_generic());
  }
  auto o = test_111(e[0], e[1], e[2], 18);
  CHECK(o.kernel_generic >= 28);
  CHECK(o.pass_generic());
  QTensor rnd = random_tensor(9, 9, 9, 4, 3);
  auto er = with_slices(rnd, wc.complements[0]);
  CHECK(test_210(er, 18).pass_generic());
  CHECK(test_120(er, 18).pass_generic());
  CHECK_THROWS_AS(weak_candidate(10, 20), std::invalid_argument);
  CHECK_THROWS_AS(weak_candidate(8, 16), std::invalid_argument);
  auto wk = weak_candidate(6, 15);
  CHECK(wk.k == 3);
  CHECK(wk.complements[0].dim() == 9);
}

TEST_CASE("empty-core bound from min rank certificates") {
  CHECK(emptycor_bound(cw(2), Factor::A, 5, 1000000).bound == 4);
  CHECK(emptycor_bound(unit(4), Factor::A, 5, 1000000).bound == 4);
  auto b = emptycor_bound(catalog("cw:2^2"), Factor::A, 3, 10000000);
  CHECK(b.m == 9);
  CHECK(b.certificate.rho == 4);
  CHECK(b.bound == 12);
}

TEST_CASE("candidate json round trip") {
  auto c = perm3_complement();
  SpaceVector fam;
  fam.var = 0;
  fam.coords[5] = {Rational(1, 2), Rational(-3)};
  c.basis.push_back(fam);
  auto back = CandidateSpace::from_json(c.to_json());
  CHECK(back.dim() == c.dim());
  CHECK(back.num_params() == 1);
  CHECK(back.basis.back().coords.at(5).c0 == Rational(1, 2));
  CHECK(back.to_json() == c.to_json());
  CHECK_THROWS(CandidateSpace::from_json(R"({"grade":[1,1,1],"d1":1,"d2":1,"basis":[]})"));
}
