#include <doctest.h>

#include <set>

#include "borderlab/linalg.hpp"
#include "borderlab/reproduce.hpp"

using namespace borderlab;
using nlohmann::json;

TEST_CASE("manifest covers every criterion with unique ids") {
  std::set<std::string> ids;
  std::set<int> crits;
  for (const auto& c : manifest()) {
    CHECK(ids.insert(c.id).second);
    crits.insert(c.criterion);
    CHECK_FALSE(c.expect.empty());
  }
  CHECK(crits.size() == 11);
  CHECK(find_claim("equations-692").criterion == 8);
  CHECK_THROWS_AS(find_claim("no-such-claim"), std::invalid_argument);
}

TEST_CASE("expectation comparison") {
  json obs{{"bound", 39}, {"err", 1e-15}, {"omega", 2.4036}, {"ok", true}};
  CHECK(compare_expectation(obs, {{"bound", 39}, {"err_le", 1e-14}, {"omega_in", {2.40, 2.41}}, {"ok", true}}).empty());
  CHECK(compare_expectation(obs, {{"bound", 40}}).size() == 1);
  CHECK(compare_expectation(obs, {{"err_ge", 1e-14}}).size() == 1);
  CHECK(compare_expectation(obs, {{"missing", 1}}).size() == 1);
}

TEST_CASE("claims replay identically across thread counts") {
  for (const char* id : {"apolarity-cw2-r4", "solver-planted", "koszul-skewcw4sq-p2"}) {
    CAPTURE(id);
    set_thread_count(1);
    ClaimResult a = reproduce(id);
    set_thread_count(3);
    ClaimResult b = reproduce(id);
    set_thread_count(0);
    CHECK(a.pass);
    CHECK(a.to_json().dump() == b.to_json().dump());
  }
}

TEST_CASE("a documented deviation is reported as a failure") {
  ClaimResult r = reproduce("apolarity-perm3-dim7");
  CHECK_FALSE(r.pass);
  CHECK(r.known_deviation);
  CHECK(r.observed["kappa_p"] == 9);
  CHECK(r.observed["pass_210"] == true);
}
