#include <doctest.h>

#include <random>
#include <sstream>

#include "hdcoop/capacity.hpp"
#include "hdcoop/ldm_codec.hpp"

using namespace hdcoop;
using gf2::BitVector;

namespace {

BitVector random_vec(int n, std::mt19937_64& rng) {
  BitVector v(n);
  for (auto& b : v) b = rng() & 1u;
  return v;
}

// Decodes both destinations for one message tuple; true if everything intended is recovered.
bool round_trip(const LdmSymParams& p, const SlotCode& code, const SlotMessages& m) {
  auto x = encode_virtual_sym(p, code, m);
  auto y = apply_channel(transfer(p, Mode::A), x.first, x.second);
  for (int d = 0; d < 2; ++d) {
    auto got = decode_virtual(p, code, d, y[2 + d], m[1 - d].vp);
    if (!got || !(got->own == m[d])) return false;
  }
  return true;
}

// Largest k such that every target supported on the bottom k levels has a cancelling precoding.
int brute_realizable(const LdmCogParams& p) {
  int m = std::max({p.n1, p.n2, p.a1, p.a2});
  int k = 0;
  while (k < m) {
    BitVector e(m, 0);
    e[m - 1 - k] = 1;
    try {
      zero_forcing_precode_cog(p, e);
    } catch (const InfeasibleAllocation&) {
      break;
    }
    ++k;
  }
  return k;
}

}  // namespace

TEST_SUITE("ldm_codec") {
  TEST_CASE("symmetric zero forcing") {
    LdmSymParams p{2, 1, 0};
    auto z = zero_forcing_precode_sym(p, {0, 0}, {0, 0});
    CHECK(gf2::is_zero(z.first));
    CHECK(gf2::is_zero(z.second));
    auto map = transfer(p, Mode::A);
    for (unsigned a = 0; a < 4; ++a)
      for (unsigned b = 0; b < 4; ++b) {
        BitVector v1{static_cast<uint8_t>(a & 1), static_cast<uint8_t>(a >> 1)};
        BitVector v2{static_cast<uint8_t>(b & 1), static_cast<uint8_t>(b >> 1)};
        auto x = zero_forcing_precode_sym(p, v1, v2);
        auto y = apply_channel(map, x.first, x.second);
        CHECK(y[2] == v1);
        CHECK(y[3] == v2);
      }
    CHECK_THROWS_AS(zero_forcing_precode_sym({1, 1, 0}, {1}, {0}), SingularChannel);
  }

  TEST_CASE("realizable cooperative levels") {
    CHECK(realizable_k({3, 2, 2, 4, 0}) == 2);
    CHECK(realizable_k({3, 4, 2, 1, 0}) == 3);
    CHECK(realizable_k({0, 0, 0, 0, 0}) == 0);
    for (int n1 = 0; n1 <= 4; ++n1)
      for (int n2 = 0; n2 <= 4; ++n2)
        for (int a1 = 0; a1 <= 4; ++a1)
          for (int a2 = 0; a2 <= 4; ++a2) {
            LdmCogParams p{n1, n2, a1, a2, 0};
            CAPTURE(n1);
            CAPTURE(n2);
            CAPTURE(a1);
            CAPTURE(a2);
            CHECK(realizable_k(p) == brute_realizable(p));
          }
  }

  TEST_CASE("cognitive zero forcing cancels at the secondary destination") {
    LdmCogParams p{3, 2, 2, 4, 6};
    auto zero = zero_forcing_precode_cog(p, gf2::zeros(4));
    CHECK(gf2::is_zero(zero.first));
    CHECK(gf2::is_zero(zero.second));
    auto map = transfer(p, Mode::A);
    for (unsigned t = 0; t < 4; ++t) {
      BitVector v1{0, 0, static_cast<uint8_t>(t & 1), static_cast<uint8_t>(t >> 1)};
      auto x = zero_forcing_precode_cog(p, v1);
      auto y = apply_channel(map, x.first, x.second);
      CHECK(y[2] == v1);
      CHECK(gf2::is_zero(y[3]));
    }
    CHECK_THROWS_AS(zero_forcing_precode_cog(p, BitVector{0, 1, 0, 0}), InfeasibleAllocation);
  }

  TEST_CASE("layered code examples") {
    std::mt19937_64 rng(1);
    SlotCounts zero{};
    auto c0 = design_slot_code({3, 1, 0}, {zero, zero});
    REQUIRE(c0);
    CHECK(round_trip({3, 1, 0}, *c0, random_messages(*c0, rng)));
    auto x0 = encode_virtual_sym({3, 1, 0}, *c0, random_messages(*c0, rng));
    CHECK(gf2::is_zero(x0.first));

    LdmSymParams a{6, 4, 0};
    SlotCounts ca{1, 1, 3, 0};
    auto code_a = design_slot_code(a, {ca, ca});
    REQUIRE(code_a);
    for (int t = 0; t < 100; ++t) CHECK(round_trip(a, *code_a, random_messages(*code_a, rng)));

    LdmSymParams b{4, 6, 0};
    SlotCounts cb{1, 0, 2, 2};
    auto code_b = design_slot_code(b, {cb, cb});
    REQUIRE(code_b);
    for (int t = 0; t < 100; ++t) CHECK(round_trip(b, *code_b, random_messages(*code_b, rng)));
  }

  TEST_CASE("pre-shared public bits cancel") {
    LdmSymParams p{4, 6, 0};
    SlotCounts c{1, 0, 2, 2};
    auto code = design_slot_code(p, {c, c});
    REQUIRE(code);
    std::mt19937_64 rng(2);
    for (int t = 0; t < 50; ++t) {
      auto m = random_messages(*code, rng);
      auto m2 = m;
      m2[1].vp = random_vec(2, rng);
      for (const auto* mm : {&m, &m2}) {
        auto x = encode_virtual_sym(p, *code, *mm);
        auto y = apply_channel(transfer(p, Mode::A), x.first, x.second);
        auto got = decode_virtual(p, *code, 0, y[2], (*mm)[1].vp);
        REQUIRE(got);
        CHECK(got->own == m[0]);
      }
    }
  }

  TEST_CASE("every feasible slot tuple decodes exactly") {
    std::mt19937_64 rng(3);
    long tuples = 0;
    for (int nd = 0; nd <= 5; ++nd)
      for (int ni = 0; ni <= 5; ++ni) {
        LdmSymParams p{nd, ni, 0};
        for (const auto& t : feasible_slot_tuples(nd, ni)) {
          auto code = design_slot_code(p, t);
          CAPTURE(nd);
          CAPTURE(ni);
          REQUIRE(code);
          ++tuples;
          bool ok = true;
          for (int k = 0; k < 100 && ok; ++k) ok = round_trip(p, *code, random_messages(*code, rng));
          CHECK(ok);
        }
      }
    MESSAGE("tuples checked: " << tuples);
  }

  TEST_CASE("one extra bit over a tight constraint is ambiguous") {
    LdmSymParams p{6, 4, 0};
    SlotCounts over{1, 3, 0, 0};  // private bits exceed n_d - n_i
    SlotCode code;
    code.n = 6;
    std::mt19937_64 rng(4);
    for (int i = 0; i < 2; ++i) {
      code.src[i].w.push_back(BitVector{1, 0, 0, 0, 0, 0});
      for (int j = 0; j < 3; ++j) {
        BitVector u(6, 0);
        u[3 + j] = 1;
        code.src[i].u.push_back(u);
      }
    }
    CHECK_FALSE(decodable(p, code));
    CHECK(find_ambiguity(p, code).has_value());
  }

  TEST_CASE("too many public bits are ambiguous only for joint decoding") {
    LdmSymParams p{4, 2, 0};
    SlotCode code;
    code.n = 4;
    for (int j = 0; j < 3; ++j) {
      BitVector w(4, 0);
      w[j] = 1;
      code.src[1].w.push_back(w);
    }
    CHECK(decodable(p, code));
    CHECK_FALSE(find_ambiguity(p, code).has_value());
    auto amb = find_ambiguity(p, code, 1, true);
    REQUIRE(amb);
    CHECK(amb->dest == 0);
    CHECK(amb->a[1].w != amb->b[1].w);
  }

  TEST_CASE("half-duplex simulation") {
    LdmSymParams p{2, 4, 8};
    auto cap = ldm_sum_capacity(p);
    REQUIRE(cap.value == ratio(24, 5));
    auto delta = ExtRational::of(ratio(1, 2));
    REQUIRE(cap.delta_star == delta);
    auto alloc = region_allocation(p, delta);
    CHECK(allocation_sum_rate(p, delta, alloc) == cap.value);
    auto plan = plan_halfduplex(p, delta, alloc);
    REQUIRE(plan);
    auto one = run_halfduplex_sim(p, plan->schedule, plan->alloc, 1);
    auto many = run_halfduplex_sim(p, plan->schedule, plan->alloc, 64);
    CHECK(one.errors == 0);
    CHECK(many.errors == 0);
    CHECK(one.relay_deficit > 0);
    CHECK(one.relay_deficit == 64 * many.relay_deficit);
    CHECK(one.sum + 2 * one.relay_deficit == cap.value);
    CHECK(many.sum + 2 * many.relay_deficit == cap.value);
    CHECK(many.sum == ratio(191, 40));

    std::ostringstream a, b;
    SimOptions oa, ob;
    oa.trace = &a;
    ob.trace = &b;
    run_halfduplex_sim(p, plan->schedule, plan->alloc, 2, oa);
    run_halfduplex_sim(p, plan->schedule, plan->alloc, 2, ob);
    CHECK(a.str() == b.str());
    CHECK_FALSE(a.str().empty());

    for (int nc = 0; nc <= 6; ++nc) CHECK(ldm_sum_capacity({3, 3, nc}).value == 3);
  }
}
