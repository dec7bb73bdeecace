#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "hdcoop/analysis.hpp"
#include "hdcoop/capacity.hpp"
#include "hdcoop/ldm_codec.hpp"
#include "hdcoop/rate_region.hpp"

using namespace hdcoop;

namespace {

struct Common {
  std::string out;
  std::string format = "text";
  int grid_density = 512;
  size_t fm_guard = 20000;
  bool strict = false;
  std::uint64_t seed = 1;
};

std::string fmt9(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream o;
  o << std::setprecision(9) << v;
  return o.str();
}

void emit(const Common& c, const std::string& text) {
  if (c.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(c.out);
  if (!f) throw std::runtime_error("cannot write " + c.out);
  f << text;
}

GridOptions grid(const Common& c) {
  GridOptions g;
  g.points = c.grid_density;
  return g;
}

std::string delta_text(const DeltaOptResult& r) {
  if (r.value == 0) return to_string(r.value);
  if (r.any_delta) return to_string(r.value) + " (δ*: any)";
  return to_string(r.value) + " (δ*=" + to_string(r.delta_star) + ")";
}

std::string active_text(const std::vector<int>& idx, const char* prefix) {
  std::string s;
  for (int i : idx) s += (s.empty() ? "" : ",") + std::string(prefix) + std::to_string(i + 1);
  return s;
}

ExtRational parse_delta(const std::string& s) {
  if (s == "inf") return ExtRational::inf();
  Rational q = parse_rational(s);
  if (q < 0) throw std::invalid_argument("delta must be nonnegative");
  return ExtRational::of(q);
}

int cmd_ldm_sum(const Common& c, int nd, int ni, int nc) {
  auto r = ldm_sum_capacity({nd, ni, nc});
  if (c.format == "json") {
    nlohmann::ordered_json j{{"schema_version", 1},          {"kind", "ldm_sum"},
                             {"value", to_string(r.value)},  {"delta_star", to_string(r.delta_star)},
                             {"any_delta", r.any_delta},     {"active", active_text(r.active, "l")}};
    emit(c, j.dump(2) + "\n");
    return 0;
  }
  emit(c, delta_text(r) + "\nactive: " + active_text(r.active, "l") + "\n");
  return 0;
}

int cmd_ldm_cog(const Common& c, const LdmCogParams& p) {
  auto r = ldm_cog_capacity(p);
  int ifc = ifc_cog_capacity(p.n1, p.n2, p.a1, p.a2);
  std::ostringstream o;
  if (c.format == "json") {
    nlohmann::ordered_json j{{"schema_version", 1},
                             {"kind", "ldm_cog"},
                             {"value", to_string(r.value)},
                             {"delta_star", to_string(r.delta_star)},
                             {"any_delta", r.maxmin.any_delta},
                             {"ifc_capacity", ifc},
                             {"interpretation", to_string(r.interpretation)},
                             {"delta0", r.delta0 ? to_string(*r.delta0) : "none"},
                             {"identity_checked", r.identity_checked}};
    emit(c, j.dump(2) + "\n");
    return 0;
  }
  o << delta_text(r.maxmin) << "\n";
  o << "active: " << active_text(r.maxmin.active, "u") << "\n";
  o << "interference channel without cooperation: " << ifc << "\n";
  o << "listen-then-cancel value: " << to_string(r.interpretation);
  if (r.delta0) o << " (δ0=" << to_string(*r.delta0) << ")";
  o << (r.identity_checked ? ", agrees" : ", cooperation link not useful or aligned") << "\n";
  emit(c, o.str());
  return 0;
}

int cmd_gauss_sum(const Common& c, const GaussSymParams& p, bool theta_given) {
  auto r = gaussian_sum_inner_outer(p, grid(c));
  std::array<double, 5> m{r.outer - r.achievable, r.achievable - (r.c_bar - 17), r.c_bar + 7 - r.outer,
                          r.c_bar_ldm + 10 - r.c_bar, r.achievable - (r.c_bar_ldm - 7)};
  if (c.format == "json") {
    nlohmann::ordered_json j{{"schema_version", 1},
                             {"kind", "gauss_sum"},
                             {"theta", fmt9(p.theta)},
                             {"c_bar", fmt9(r.c_bar)},
                             {"c_bar_ldm", fmt9(r.c_bar_ldm)},
                             {"achievable", fmt9(r.achievable)},
                             {"outer", fmt9(r.outer)},
                             {"delta_c_bar", fmt9(r.delta_c_bar)},
                             {"region", static_cast<int>(r.region)},
                             {"cooperation", r.cooperation}};
    for (int i = 0; i < 5; ++i) j["margins"][kSymChecks[i]] = fmt9(m[i]);
    emit(c, j.dump(2) + "\n");
    return 0;
  }
  std::ostringstream o;
  if (!theta_given) o << "note: --theta not given, using theta = 0\n";
  o << "c_bar       " << fmt9(r.c_bar) << "  (δ*=" << fmt9(r.delta_c_bar) << ")\n";
  o << "c_bar_ldm   " << fmt9(r.c_bar_ldm) << "\n";
  o << "achievable  " << fmt9(r.achievable) << "\n";
  o << "outer       " << fmt9(r.outer) << "\n";
  o << "region      " << region_name(r.region) << "\n";
  o << "cooperation: " << (r.cooperation ? "on" : "off") << "\n";
  o << "margins\n";
  for (int i = 0; i < 5; ++i) o << "  " << std::left << std::setw(26) << kSymChecks[i] << fmt9(m[i]) << "\n";
  emit(c, o.str());
  return 0;
}

int cmd_cog(const Common& c, const GaussCogParams& p, bool theta_given) {
  auto r = gaussian_cog_bounds(p, grid(c));
  std::array<double, 3> m{r.c_bar_r0 - r.lower, r.lower - (r.c_bar_r0 - 23 - 2 * p.r0),
                          r.ldm_link + 13 + 2 * p.r0 - r.c_bar_r0};
  if (c.format == "json") {
    nlohmann::ordered_json j{{"schema_version", 1},
                             {"kind", "cog"},
                             {"theta", fmt9(p.theta)},
                             {"r0", fmt9(p.r0)},
                             {"c_bar_r0", fmt9(r.c_bar_r0)},
                             {"delta_star", fmt9(r.delta_c_bar)},
                             {"lower", r.lower_asserted ? fmt9(r.lower) : "not asserted (R0<7)"},
                             {"ldm_link", fmt9(r.ldm_link)}};
    for (int i = 0; i < 3; ++i) j["margins"][kCogChecks[i]] = fmt9(m[i]);
    emit(c, j.dump(2) + "\n");
    return 0;
  }
  std::ostringstream o;
  if (!theta_given) o << "note: --theta not given, using theta = 0\n";
  o << "c_bar_r0    " << fmt9(r.c_bar_r0) << "  (δ*=" << fmt9(r.delta_c_bar) << ")\n";
  if (r.lower_asserted)
    o << "lower       " << fmt9(r.lower) << "  (δ=" << fmt9(r.delta_lower) << ")\n";
  else
    o << "lower       not asserted (R0<7); construction gives " << fmt9(r.lower) << "\n";
  o << "ldm_link    " << fmt9(r.ldm_link) << "\n";
  o << "margins\n";
  for (int i = 0; i < 3; ++i) {
    o << "  " << std::left << std::setw(28) << kCogChecks[i] << fmt9(m[i]);
    if (i < 2 && !r.lower_asserted) o << "  (not asserted)";
    o << "\n";
  }
  emit(c, o.str());
  return 0;
}

int cmd_codec_sim(const Common& c, const LdmSymParams& p, const std::string& delta_arg, long blocks,
                  const std::string& trace_path) {
  auto cap = ldm_sum_capacity(p);
  ExtRational delta;
  if (delta_arg.empty()) {
    delta = cap.any_delta ? ExtRational::inf() : cap.delta_star;
  } else {
    delta = parse_delta(delta_arg);
  }
  auto alloc = region_allocation(p, delta);
  auto plan = plan_halfduplex(p, delta, alloc);
  if (!plan) {
    std::cerr << "no integral half-duplex plan for delta=" << to_string(delta) << " (" << alloc.label << ")\n";
    return 2;
  }
  std::ofstream trace;
  SimOptions opt;
  opt.seed = c.seed;
  if (!trace_path.empty()) {
    trace.open(trace_path);
    if (!trace) throw std::runtime_error("cannot write " + trace_path);
    opt.trace = &trace;
  }
  auto s = run_halfduplex_sim(p, plan->schedule, plan->alloc, blocks, opt);
  std::ostringstream o;
  o << "seed " << c.seed << "\n";
  o << "delta " << to_string(delta) << "  allocation " << alloc.label << "\n";
  o << "schedule L_A=" << plan->schedule.l_a << " L_B=L_C=" << plan->schedule.l_b << "  blocks " << blocks
    << "  slots " << s.total_slots << "\n";
  o << "bit-pipes bp_ss=" << to_string(alloc.bp_ss) << " bp_sd=" << to_string(alloc.bp_sd)
    << " relay=" << to_string(alloc.delta_r) << "\n";
  o << "messages " << s.messages << "  decode errors " << s.errors << "\n";
  o << "rates R1=" << to_string(s.r1) << " R2=" << to_string(s.r2) << " sum=" << to_string(s.sum) << " ("
    << fmt9(s.sum.get_d()) << ")\n";
  o << "relay deficit per user " << to_string(s.relay_deficit) << "\n";
  o << "sum + 2*deficit " << to_string(s.sum + 2 * s.relay_deficit) << "  nominal " << to_string(s.nominal_sum)
    << "  capacity " << to_string(cap.value) << "\n";
  emit(c, o.str());
  return s.errors == 0 ? 0 : 1;
}

int cmd_fm_check(const Common& c, int max) {
  FmOptions fo;
  fo.guard = c.fm_guard;
  long cases = 0, bad = 0;
  std::ostringstream o;
  for (int nd = 0; nd <= max; ++nd)
    for (int ni = 0; ni <= max; ++ni) {
      if (nd == ni) continue;
      for (int s = 0; s <= 2 * max; ++s)
        for (int t = 0; t <= (ni < nd ? 0 : 2 * max); ++t) {
          Rational bs = ratio(s, 2), bd = ratio(t, 2);
          Rational fm = fm_sum_rate_sym({nd, ni, 0}, bs, bd, fo), cf = closed_form_sum_virtual(nd, ni, bs, bd);
          ++cases;
          if (fm != cf) {
            ++bad;
            o << "mismatch sym n_d=" << nd << " n_i=" << ni << " bp_ss=" << to_string(bs) << " bp_sd=" << to_string(bd)
              << ": " << to_string(fm) << " vs " << to_string(cf) << "\n";
          }
        }
    }
  int cmax = std::min(max, 5);
  for (int n1 = 0; n1 <= cmax; ++n1)
    for (int n2 = 0; n2 <= cmax; ++n2)
      for (int a1 = 0; a1 <= cmax; ++a1)
        for (int a2 = 0; a2 <= cmax; ++a2)
          for (int b = 0; b <= 2 * cmax; ++b) {
            LdmCogParams p{n1, n2, a1, a2, 0};
            Rational bp = ratio(b, 2);
            auto v = cog_v(p);
            Rational cf = rmin(rmin(Rational(v[0]), Rational(v[1] + bp)), rmin(Rational(v[2]), Rational(v[3] + bp)));
            Rational fm = fm_cog_rate(p, bp, fo);
            ++cases;
            if (fm != cf) {
              ++bad;
              o << "mismatch cog (" << n1 << "," << n2 << "," << a1 << "," << a2 << ") bp12=" << to_string(bp) << ": "
                << to_string(fm) << " vs " << to_string(cf) << "\n";
            }
          }
  if (bad == 0)
    o << "all closed-form identities hold (" << cases << " cases)\n";
  else
    o << bad << " of " << cases << " cases disagree\n";
  emit(c, o.str());
  return bad == 0 ? 0 : 1;
}

int cmd_gdof(const Common& c, const std::string& kind_arg, const std::string& sweep_path) {
  std::string kind = kind_arg;
  if (kind == "sum") kind = "sum_gdof";
  if (kind == "cog") kind = "cog_gdof";
  SweepSpec sweep = sweep_path.empty() ? default_figure_sweep(kind) : load_sweep(sweep_path);
  Table t = emit_figure_data(kind, sweep);
  emit(c, c.format == "json" ? to_json(t, kind) : to_csv(t));
  return 0;
}

int cmd_verify_gaps(const Common& c, const std::string& grid_path, bool corrupt) {
  GapGrid g = grid_path.empty() || grid_path == "default" ? default_gap_grid() : gap_grid_from(load_sweep(grid_path));
  GapConstants k;
  if (corrupt) k.sym_lower = 1;
  auto r = verify_gaps(g, k, grid(c));
  std::ostringstream summary;
  summary << "grid " << r.grid << "\n";
  summary << "points " << r.sym.size() << " symmetric, " << r.cog.size() << " cognitive\n";
  summary << "max c_bar - achievable " << fmt9(r.max_sym_gap) << "\n";
  summary << "violations " << r.violations.size() << "\n";
  for (size_t i = 0; i < r.violations.size() && i < 20; ++i) {
    const auto& v = r.violations[i];
    summary << "  " << v.family << " #" << v.index << " " << v.check << " margin " << fmt9(v.margin) << " at "
            << v.context << "\n";
  }
  if (c.out.empty()) {
    if (c.format == "json")
      std::cout << report_json(r);
    else if (c.format == "csv")
      std::cout << to_csv(gap_margin_table(r));
    else
      std::cout << summary.str();
  } else {
    emit(c, c.format == "csv" ? to_csv(gap_margin_table(r)) : report_json(r));
    std::cout << summary.str();
  }
  return c.strict && !r.violations.empty() ? 3 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Half-duplex cooperative interference channel toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  Common c;
  app.add_option("--out", c.out, "Write results to this file");
  app.add_option("--format", c.format, "Output format")->check(CLI::IsMember({"text", "csv", "json"}));
  app.add_option("--grid-density", c.grid_density, "Points on the log-spaced delta grid")->check(CLI::PositiveNumber);
  app.add_option("--fm-guard", c.fm_guard, "Inequality-count guard for Fourier-Motzkin");
  app.add_flag("--strict", c.strict, "Nonzero exit when a gap report lists violations");
  app.add_option("--seed", c.seed, "Seed for random messages");

  int nd = 0, ni = 0, nc = 0;
  auto* ldm_sum = app.add_subcommand("ldm-sum", "Exact LDM sum capacity");
  ldm_sum->add_option("n_d", nd)->required()->check(CLI::NonNegativeNumber);
  ldm_sum->add_option("n_i", ni)->required()->check(CLI::NonNegativeNumber);
  ldm_sum->add_option("n_c", nc)->required()->check(CLI::NonNegativeNumber);

  LdmCogParams cp;
  auto* ldm_cog = app.add_subcommand("ldm-cog", "Exact LDM cognitive capacity");
  ldm_cog->add_option("n1", cp.n1)->required()->check(CLI::NonNegativeNumber);
  ldm_cog->add_option("n2", cp.n2)->required()->check(CLI::NonNegativeNumber);
  ldm_cog->add_option("alpha1", cp.a1)->required()->check(CLI::NonNegativeNumber);
  ldm_cog->add_option("alpha2", cp.a2)->required()->check(CLI::NonNegativeNumber);
  ldm_cog->add_option("beta", cp.beta)->required()->check(CLI::NonNegativeNumber);

  GaussSymParams gp;
  auto* gauss = app.add_subcommand("gauss-sum", "Gaussian symmetric sum-capacity bounds");
  gauss->add_option("snr", gp.snr)->required()->check(CLI::PositiveNumber);
  gauss->add_option("inr", gp.inr)->required()->check(CLI::PositiveNumber);
  gauss->add_option("cnr", gp.cnr)->required()->check(CLI::PositiveNumber);
  auto* gtheta = gauss->add_option("--theta", gp.theta, "Phase difference in radians");

  GaussCogParams gc;
  auto* cog = app.add_subcommand("cog", "Gaussian cognitive R0-capacity bounds");
  cog->add_option("snr1", gc.snr1)->required()->check(CLI::PositiveNumber);
  cog->add_option("snr2", gc.snr2)->required()->check(CLI::PositiveNumber);
  cog->add_option("inr1", gc.inr1)->required()->check(CLI::PositiveNumber);
  cog->add_option("inr2", gc.inr2)->required()->check(CLI::PositiveNumber);
  cog->add_option("cnr", gc.cnr)->required()->check(CLI::PositiveNumber);
  auto* ctheta = cog->add_option("--theta", gc.theta, "Phase combination in radians");
  cog->add_option("--r0", gc.r0, "Primary back-off in bits")->required()->check(CLI::NonNegativeNumber);

  std::string delta_arg, trace_path;
  long blocks = 16;
  auto* sim = app.add_subcommand("codec-sim", "Bit-exact LDM half-duplex simulation");
  sim->add_option("n_d", nd)->required()->check(CLI::NonNegativeNumber);
  sim->add_option("n_i", ni)->required()->check(CLI::NonNegativeNumber);
  sim->add_option("n_c", nc)->required()->check(CLI::NonNegativeNumber);
  sim->add_option("--delta", delta_arg, "Schedule ratio L_A/L_B as p/q or inf (default: optimal)");
  sim->add_option("--blocks", blocks, "Number of blocks")->check(CLI::PositiveNumber);
  sim->add_option("--trace", trace_path, "Write per-slot received signals");

  int fm_max = 6;
  auto* fm = app.add_subcommand("fm-check", "Fourier-Motzkin elimination against closed forms");
  fm->add_option("--max", fm_max, "Largest exponent")->check(CLI::Range(0, 8));

  std::string gdof_kind = "sum", sweep_path;
  auto* gdof = app.add_subcommand("gdof", "GDoF figure data");
  gdof->add_option("kind", gdof_kind, "sum, cog, or gap_margins")
      ->check(CLI::IsMember({"sum", "cog", "sum_gdof", "cog_gdof", "gap_margins"}));
  gdof->add_option("sweep", sweep_path, "key=range sweep file");

  std::string grid_path;
  bool corrupt = false;
  auto* verify = app.add_subcommand("verify-gaps", "Constant-gap certification sweep");
  verify->add_option("grid", grid_path, "key=range grid file, or 'default'");
  verify->add_flag("--corrupt-constant", corrupt, "Test mode: replace the 17-bit constant by 1");

  CLI11_PARSE(app, argc, argv);
  if (c.format == "text" && !c.out.empty() && app.got_subcommand(gdof)) c.format = "csv";

  try {
    if (app.got_subcommand(ldm_sum)) return cmd_ldm_sum(c, nd, ni, nc);
    if (app.got_subcommand(ldm_cog)) return cmd_ldm_cog(c, cp);
    if (app.got_subcommand(gauss)) return cmd_gauss_sum(c, gp, gtheta->count() > 0);
    if (app.got_subcommand(cog)) return cmd_cog(c, gc, ctheta->count() > 0);
    if (app.got_subcommand(sim)) return cmd_codec_sim(c, {nd, ni, nc}, delta_arg, blocks, trace_path);
    if (app.got_subcommand(fm)) return cmd_fm_check(c, fm_max);
    if (app.got_subcommand(gdof)) return cmd_gdof(c, gdof_kind, sweep_path);
    if (app.got_subcommand(verify)) return cmd_verify_gaps(c, grid_path, corrupt);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
