#include <doctest.h>

#include <json.hpp>

#include <cmath>

#include "hdcoop/analysis.hpp"

using namespace hdcoop;

namespace {

std::optional<Rational> fin(const Rational& q) { return q; }
const std::optional<Rational> kInf = std::nullopt;

double numeric_sum_gdof(const Rational& alpha, const Rational& beta, double snr) {
  GaussSymParams p{snr, std::pow(snr, alpha.get_d()), std::pow(snr, beta.get_d()), M_PI / 2};
  auto best = optimize_delta([&](double d) {
    auto u = gauss_sum_u(p, d);
    return std::vector<double>(u.begin(), u.end());
  });
  return best.value / std::log2(snr);
}

}  // namespace

TEST_SUITE("analysis") {
  TEST_CASE("sweep parsing") {
    auto s = parse_sweep(
        "# comment\n"
        "alpha = 0:1/4:1\n"
        "beta = 0, 16/5, inf  # trailing\n"
        "[sym]\n"
        "snr = 10^0:2:4\n"
        "theta = 0, pi/4, 3*pi/4, pi\n");
    REQUIRE(s.at("alpha").size() == 5);
    CHECK(*s.at("alpha")[1].exact == ratio(1, 4));
    CHECK(s.at("beta")[2].infinite);
    CHECK(*s.at("beta")[1].exact == ratio(16, 5));
    CHECK(s.at("sym.snr").size() == 3);
    CHECK(s.at("sym.snr")[2].real == doctest::Approx(1e4));
    CHECK(s.at("sym.theta")[2].real == doctest::Approx(3 * M_PI / 4));
    CHECK(to_string(s.at("alpha")[2]) == "1/2");
    CHECK(to_string(s.at("beta")[2]) == "inf");
    CHECK_THROWS_AS(parse_sweep("alpha 0:1"), std::invalid_argument);
    CHECK_THROWS_AS(parse_values("0:0:1"), std::invalid_argument);
    CHECK_THROWS_AS(s.at("missing"), std::exception);
  }

  TEST_CASE("tables as csv and json") {
    Table t{{"alpha", "beta", "d"}, {{"0", "inf", "2"}, {"1/2", "0", "1"}}};
    CHECK(to_csv(t) == "alpha,beta,d\n0,inf,2\n1/2,0,1\n");
    auto j = nlohmann::json::parse(to_json(t, "sum_gdof"));
    CHECK(j["schema_version"] == 1);
    CHECK(j["kind"] == "sum_gdof");
    CHECK(j["columns"].size() == 3);
    CHECK(j["rows"][1][0] == "1/2");
  }

  TEST_CASE("symmetric GDoF values") {
    CHECK(gdof_sum(0, fin(0)) == 2);
    CHECK(gdof_sum(1, fin(0), true) == 1);
    CHECK(gdof_sum(1, kInf, true) == 1);
    CHECK_THROWS_AS(gdof_sum(1, fin(0)), AlignmentRequired);
    CHECK(gdof_sum(ratio(1, 2), fin(0)) == 1);
    CHECK(gdof_sum(ratio(1, 2), fin(1)) == 1);
  }

  TEST_CASE("symmetric GDoF in beta") {
    std::vector<std::optional<Rational>> betas;
    for (int b = 0; b <= 40; ++b) betas.push_back(ratio(b, 5));
    betas.push_back(kInf);
    for (int i = 0; i <= 300; i += 3) {
      Rational a = ratio(i, 100);
      std::optional<bool> flag = a == 1 ? std::optional<bool>(false) : std::nullopt;
      Rational prev = -1;
      for (const auto& b : betas) {
        Rational d = gdof_sum(a, b, flag);
        CHECK(d >= prev);
        CHECK(d >= 0);
        prev = d;
      }
      // the beta = inf value is a supremum approached by finite beta
      Rational top = gdof_sum(a, kInf, flag), gap20 = top - gdof_sum(a, fin(20), flag);
      Rational gap2000 = top - gdof_sum(a, fin(2000), flag);
      CHECK(gap20 >= gap2000);
      CHECK(gap2000 >= 0);
      CHECK(gap2000 < ratio(1, 50));
    }
  }

  TEST_CASE("symmetric GDoF is continuous at alpha = 1 without alignment") {
    for (auto b : {fin(0), fin(1), fin(ratio(16, 5)), kInf}) {
      Rational at = gdof_sum(1, b, false);
      for (int k = 1; k <= 4; ++k) {
        Rational eps = ratio(1, 1000 * k);
        CHECK(abs(gdof_sum(1 + eps, b) - at) <= 4 * eps);
        CHECK(abs(gdof_sum(1 - eps, b) - at) <= 4 * eps);
      }
    }
  }

  TEST_CASE("symmetric GDoF matches the high-SNR limit of the upper bound") {
    // Additive bit constants divided by log2 SNR vanish slowly: at 1e12 they reach ~0.07, so compare at 1e40.
    double worst40 = 0, worst12 = 0;
    for (int i = 0; i < 50; ++i) {
      Rational a = ratio(6 * i + 3, 100), b = ratio(i % 7, 2);
      if (a == 1) continue;
      double d = gdof_sum(a, b).get_d();
      worst40 = std::max(worst40, std::abs(d - numeric_sum_gdof(a, b, 1e40)));
      worst12 = std::max(worst12, std::abs(d - numeric_sum_gdof(a, b, 1e12)));
    }
    MESSAGE("max |d - limit| at 1e12: " << worst12 << ", at 1e40: " << worst40);
    CHECK(worst40 <= 0.02);
    CHECK(worst40 < worst12);
  }

  TEST_CASE("cognitive GDoF") {
    CHECK(gdof_cog(ratio(4, 5), ratio(9, 10), ratio(3, 10), kInf) == 0);
    for (auto b : {fin(0), fin(1), fin(3), kInf}) CHECK(gdof_cog(1, 0, 0, b) == 1);
    for (int n2 = 0; n2 <= 10; ++n2)
      for (int a1 = 0; a1 <= 15; ++a1)
        for (int a2 = 0; a2 <= 15; ++a2) {
          Rational N2 = ratio(n2, 5), A1 = ratio(a1, 5), A2 = ratio(a2, 5);
          Rational d0 = gdof_cog(N2, A1, A2, fin(0));
          CHECK(d0 <= N2);
          Rational lim = rmax(A2, 1);
          for (int b = 0; b <= 4; ++b) CHECK(gdof_cog(N2, A1, A2, fin(lim * ratio(b, 4))) == d0);
          if (N2 <= A1 && A1 <= 1) CHECK(gdof_cog(N2, A1, A2, kInf) == 0);
          CHECK(gdof_cog(N2, A1, A2, kInf) <= N2);
        }
  }

  TEST_CASE("figure data") {
    auto t = emit_figure_data("sum_gdof", default_figure_sweep("sum_gdof"));
    CHECK(t.header == std::vector<std::string>{"alpha", "beta", "d"});
    CHECK(t.rows.size() == 301 * 4);
    bool above = false;
    std::map<std::string, Rational> base;
    for (const auto& r : t.rows)
      if (r[1] == "0") base[r[0]] = parse_rational(r[2]);
    for (const auto& r : t.rows)
      if (r[1] == "16/5" && parse_rational(r[2]) - base[r[0]] >= ratio(1, 20)) above = true;
    CHECK(above);

    auto c = emit_figure_data("cog_gdof", default_figure_sweep("cog_gdof"));
    CHECK(c.header == std::vector<std::string>{"alpha1", "beta", "d"});
    CHECK_FALSE(c.rows.empty());

    CHECK(emit_figure_data("sum_gdof", SweepSpec{}).rows.empty());
    CHECK_THROWS_AS(emit_figure_data("nope", SweepSpec{}), UnknownKind);
  }

  TEST_CASE("gap verification on small grids") {
    auto one = gap_grid_from(parse_sweep("snr = 1e5\ninr = 100\ncnr = 0.5\n"));
    REQUIRE(one.sym.size() == 1);
    auto rep = verify_gaps(one);
    CHECK(rep.violations.empty());
    CHECK_FALSE(rep.sym[0].result.cooperation);
    for (double m : rep.sym[0].margins) CHECK(m >= -1e-6);

    auto small = gap_grid_from(parse_sweep(
        "[sym]\nsnr = 10^0:4:8\ninr = 10^0:4:8\ncnr = 10^0:4:8\ntheta = 0, pi\n"
        "[cog]\nsnr1 = 1e2, 1e6\nsnr2 = 1e3\ninr1 = 1e4\ninr2 = 10\ncnr = 1e6\nr0 = 7, 10\n"));
    CHECK(small.sym.size() == 54);
    CHECK(small.cog.size() == 4);
    auto ok = verify_gaps(small);
    CHECK(ok.violations.empty());

    GapConstants bad;
    bad.sym_lower = 1;
    CHECK_FALSE(verify_gaps(small, bad).violations.empty());
    GapConstants bad_cog;
    bad_cog.cog_lower = -23;
    CHECK_FALSE(verify_gaps(small, bad_cog).violations.empty());

    auto j = nlohmann::json::parse(report_json(ok));
    CHECK(j["schema_version"] == 1);
    CHECK(j["sym"].size() == 54);
    CHECK(gap_margin_table(ok).rows.size() == 58);
  }

  TEST_CASE("LDM point reproduced by simulation") {
    auto r = check_ldm_point({2, 4, 8});
    CHECK(r.exact);
    CHECK(r.sim.errors == 0);
    CHECK(r.sim.messages >= 100);
    CHECK(r.capacity.value == ratio(24, 5));
    auto off = check_ldm_point({3, 1, 0});
    CHECK(off.exact);
    CHECK(off.delta.infinite);
  }
}
