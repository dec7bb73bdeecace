#include <doctest.h>

#include "hdcoop/rate_region.hpp"

using namespace hdcoop;

namespace {

const std::map<std::string, Rational> kAllOnes = {{"R_W1", 1}, {"R_U1", 1}, {"R_V1", 1}, {"R_V1p", 1},
                                                  {"R_W2", 1}, {"R_U2", 1}, {"R_V2", 1}, {"R_V2p", 1}};

}  // namespace

TEST_SUITE("rate_region") {
  TEST_CASE("mutual information from ranks") {
    AuxSpec s;
    s.base_bits = 3;
    s.gen["X"] = gf2::BitMatrix::identity(3);
    s.gen["Y"] = gf2::BitMatrix::identity(3);
    s.gen["Z"] = gf2::BitMatrix(3, 3);
    CHECK(ldm_mutual_info(s, {"X"}, "Y", {}) == 3);
    CHECK(ldm_mutual_info(s, {"X"}, "Z", {}) == 0);

    auto a = symmetric_aux(6, 4);
    CHECK(ldm_mutual_info(a, {"XU1"}, "Y3", {"XW1", "V1", "XVp1", "XW2", "XVp2"}) == 2);
  }

  TEST_CASE("elimination basics") {
    Polytope p;
    p.vars = {"x", "y"};
    p.add({{"x", 1}, {"y", 1}}, 3);
    auto q = fourier_motzkin(p, {"y"});
    Polytope want;
    want.vars = {"x"};
    want.add({{"x", 1}}, 3);
    CHECK(same_polytope(q, want));
    CHECK(same_polytope(fourier_motzkin(p, {}), p));
    CHECK(max_weighted_rate(q, {{"x", 1}}) == 3);

    Polytope box;
    box.vars = {"a"};
    box.add({{"a", 1}}, 0);
    CHECK(max_weighted_rate(box, {{"a", 1}}) == 0);
    Polytope open;
    open.vars = {"a", "b"};
    open.add({{"a", 1}}, 1);
    CHECK_THROWS_AS(max_weighted_rate(open, {{"b", 1}}), Unbounded);
  }

  TEST_CASE("guard stops blow-up") {
    auto poly = virtual_constraints_sym({6, 4, 0}, 3, 0);
    FmOptions tiny;
    tiny.guard = 5;
    CHECK_THROWS_AS(fourier_motzkin(poly, {"R_W1", "R_U1", "R_V1", "R_V1p"}, tiny), FmBlowup);
  }

  TEST_CASE("serialization round trip") {
    auto poly = virtual_constraints_cog({2, 3, 5, 2, 6}, ratio(3, 2));
    auto back = parse_polytope(serialize(poly));
    CHECK(serialize(back) == serialize(poly));
    CHECK(same_polytope(back, poly));
  }

  TEST_CASE("symmetric virtual sum rate") {
    CHECK(max_weighted_rate(virtual_constraints_sym({0, 0, 0}, 2, 2), kAllOnes) == 0);
    CHECK(closed_form_sum_virtual(6, 4, 3, 0) == 11);
    CHECK(fm_sum_rate_sym({6, 4, 0}, 3, 0) == 11);
    CHECK(closed_form_sum_virtual(2, 4, 1, 1) == 6);
    CHECK(fm_sum_rate_sym({2, 4, 0}, 1, 1) == 6);
    CHECK(max_weighted_rate(virtual_constraints_sym({2, 4, 0}, 1, 1), kAllOnes) == 6);
    CHECK(closed_form_sum_virtual(5, 4, 0, 0) == 6);
    CHECK(fm_sum_rate_sym({5, 4, 0}, 0, 0) == 6);
    CHECK(fm_sum_rate_sym({6, 4, 0}, ratio(1, 2), 0) == closed_form_sum_virtual(6, 4, ratio(1, 2), 0));
    CHECK_THROWS_AS(closed_form_sum_virtual(3, 3, 0, 0), std::invalid_argument);
    CHECK_THROWS_AS(closed_form_sum_virtual(5, 2, 0, 1), std::invalid_argument);
  }

  TEST_CASE("projection onto tied rates for weak interference") {
    for (auto [nd, ni, bp] : std::vector<std::tuple<int, int, int>>{{6, 4, 3}, {5, 2, 1}, {4, 1, 0}, {6, 2, 5}}) {
      CAPTURE(nd);
      CAPTURE(ni);
      Polytope poly = virtual_constraints_sym({nd, ni, 0}, bp, 0);
      for (const std::string base : {"R_W", "R_U", "R_V"}) poly = poly.substitute(base + "2", {{base + "1", 1}}, 0);
      poly = poly.substitute("R_V2p", {{"R_V1p", 1}}, 0);
      auto proj = fourier_motzkin(poly, {"R_V1p"});
      Polytope want;
      want.vars = {"R_W1", "R_U1", "R_V1"};
      want.add({{"R_W1", 2}, {"R_V1", 1}, {"R_U1", 1}}, nd);
      want.add({{"R_U1", 1}, {"R_W1", 1}}, std::max(ni, nd - ni));
      want.add({{"R_U1", 1}}, nd - ni);
      want.add({{"R_V1", 1}}, bp);
      CHECK(same_polytope(proj, want));
    }
  }

  TEST_CASE("cognitive virtual rate") {
    LdmCogParams p{2, 3, 5, 2, 0};
    CHECK(cog_v(p) == std::array<int, 4>{3, 1, 3, 3});
    CHECK(fm_cog_rate(p, 2) == 3);
    CHECK(fm_cog_rate(p, 0) == 1);
    CHECK(fm_cog_rate({0, 0, 0, 0, 0}, 0) == 0);
    CHECK(fm_cog_rate({3, 4, 0, 0, 0}, 0) == 4);
  }
}
