#include <doctest.h>

#include "borderlab/koszul.hpp"

using namespace borderlab;

TEST_CASE("koszul map of a rank-one tensor") {
  QTensor t(3, 3, 3);
  t.set(0, 1, 2, 1);
  QMatrix m = koszul_map(t, Factor::A, 1);
  CHECK(m.rows == 9);
  CHECK(m.cols == 9);
  CHECK(rank_exact(m) == 2);
  CHECK(koszul_map(zero_tensor(3, 3, 3), Factor::A, 1).is_zero());
  CHECK_THROWS(koszul_map(t, Factor::A, 3));
  auto kb = lower_bound(t, Factor::A, 1, {0, 1, 2});
  CHECK(kb.bound == 1);
}

TEST_CASE("p = 0 is the ordinary flattening") {
  QTensor t = cw(3);
  QMatrix m = koszul_map(t, Factor::A, 0);
  CHECK(rank_exact(m) == slice_space(t, Factor::B).dim());
}

TEST_CASE("koszul map is linear in the tensor") {
  QTensor a = random_tensor(4, 3, 3, 1, 3), b = random_tensor(4, 3, 3, 2, 3);
  QTensor s(4, 3, 3);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      for (std::size_t k = 0; k < 3; ++k) s.set(i, j, k, a.at(i, j, k) + b.at(i, j, k));
  QMatrix ma = koszul_map(a, Factor::A, 2), mb = koszul_map(b, Factor::A, 2), ms = koszul_map(s, Factor::A, 2);
  for (std::size_t x = 0; x < ms.a.size(); ++x) CHECK(ms.a[x] == ma.a[x] + mb.a[x]);
  auto mp = koszul_map_modp(a, Factor::A, 2, 101);
  CHECK(rank_modp(mp) == rank_modp(reduce_mod_p(ma, 101)));
}

TEST_CASE("unit tensors attain the bound") {
  for (int p = 1; p <= 2; ++p) {
    KoszulOptions exact;
    exact.force_exact = true;
    auto kb = lower_bound(unit(2 * p + 1), Factor::A, p, {0, 1, 2}, exact);
    CHECK(kb.bound == static_cast<std::size_t>(2 * p + 1));
    CHECK(kb.certificate.method == "exact");
  }
}

TEST_CASE("bound invariant under B/C relabeling and factor choice") {
  QTensor t = skewcw(4);
  auto a = lower_bound(t, Factor::A, 1, {0});
  auto swapped = t.permuted({0, 2, 1});
  auto b = lower_bound(swapped, Factor::A, 1, {0});
  CHECK(a.bound == b.bound);
  CHECK(lower_bound(t, Factor::B, 1, {0}).bound == a.bound);
}

TEST_CASE("restriction") {
  QTensor t = cw(2);
  CHECK(restrict_generic(t, Factor::A, 3, 5, true) == t);
  QTensor r = restrict_generic(unit(9), Factor::A, 5, 3);
  CHECK(r.dims() == Dims{5, 9, 9});
  CHECK(slice_space(r, Factor::A).dim() == 5);
  CHECK(is_concise(r) == std::array<bool, 3>{true, true, true});
  QTensor one(3, 3, 3);
  one.set(1, 1, 1, 2);
  QTensor r1 = restrict_generic(one, Factor::B, 2, 9);
  CHECK(r1.nonzero_count() <= 2);
  CHECK(restrict_generic(t, Factor::A, 2, 1) == restrict_generic(t, Factor::A, 2, 1));
}

TEST_CASE("koszul bound on a small catalog tensor does not exceed a known decomposition") {
  // cw(2) has border rank 4.
  for (std::uint64_t seed = 0; seed < 5; ++seed) CHECK(lower_bound(cw(2), Factor::A, 1, {seed}).bound <= 4);
  CHECK(lower_bound(catalog("skewcw:4^2"), Factor::A, 2, {0}).bound == 39);
}

TEST_CASE("bound table") {
  TableOptions opts;
  opts.seeds = {0};
  auto res = bound_table({{"zero:3,3,3", 1, 1, Factor::A}, {"skewcw:2", 3, 4, Factor::A}, {"skewcw:10", 2, 4, Factor::A}},
                         opts);
  CHECK(res[0].result.bound == 0);
  CHECK_FALSE(res[0].skipped);
  CHECK(res[1].skipped == false);
  CHECK(res[1].result.bound == 49);
  CHECK(res[2].skipped);
}
