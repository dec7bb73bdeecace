#include "hdcoop/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace hdcoop {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(trim(cur));
  return out;
}

std::string fmt9(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream o;
  o << std::setprecision(9) << v;
  return o.str();
}

GridValue scalar(const std::string& tok) {
  GridValue v;
  std::string t = trim(tok);
  if (t == "inf" || t == "infinity") {
    v.infinite = true;
    v.real = INFINITY;
    return v;
  }
  size_t p = t.find("pi");
  if (p != std::string::npos) {
    double mult = 1, div = 1;
    std::string pre = trim(t.substr(0, p)), post = trim(t.substr(p + 2));
    if (!pre.empty()) {
      if (pre.back() != '*') throw std::invalid_argument("bad value: " + t);
      mult = std::stod(pre.substr(0, pre.size() - 1));
    }
    if (!post.empty()) {
      if (post.front() != '/') throw std::invalid_argument("bad value: " + t);
      div = std::stod(post.substr(1));
    }
    v.real = mult * M_PI / div;
    return v;
  }
  if (t.rfind("10^", 0) == 0) {
    v.real = std::pow(10.0, std::stod(t.substr(3)));
    return v;
  }
  if (t.find_first_of("eE") != std::string::npos) {
    size_t used = 0;
    v.real = std::stod(t, &used);
    if (used != t.size()) throw std::invalid_argument("bad value: " + t);
    return v;
  }
  v.exact = parse_rational(t);
  v.real = v.exact->get_d();
  return v;
}

}  // namespace

std::string to_string(const GridValue& v) {
  if (v.infinite) return "inf";
  if (v.exact) return to_string(*v.exact);
  return fmt9(v.real);
}

std::vector<GridValue> parse_values(const std::string& item) {
  std::vector<GridValue> out;
  for (const auto& part : split(item, ',')) {
    if (part.empty()) continue;
    auto r = split(part, ':');
    if (r.size() == 1) {
      out.push_back(scalar(part));
      continue;
    }
    if (r.size() != 3) throw std::invalid_argument("range needs lo:step:hi: " + part);
    bool pow10 = r[0].rfind("10^", 0) == 0;
    Rational lo = parse_rational(pow10 ? r[0].substr(3) : r[0]);
    Rational step = parse_rational(r[1]), hi = parse_rational(r[2]);
    if (step <= 0) throw std::invalid_argument("range step must be positive: " + part);
    for (Rational x = lo; x <= hi; x += step) {
      GridValue v;
      if (pow10) {
        v.real = std::pow(10.0, x.get_d());
      } else {
        v.exact = x;
        v.real = x.get_d();
      }
      out.push_back(v);
    }
  }
  return out;
}

const std::vector<GridValue>& SweepSpec::at(const std::string& key) const {
  auto it = values.find(key);
  if (it == values.end()) throw std::invalid_argument("sweep: missing key " + key);
  return it->second;
}

SweepSpec parse_sweep(const std::string& text) {
  SweepSpec s;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']') {
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("sweep line " + std::to_string(lineno) + ": expected key=range");
    std::string key = trim(line.substr(0, eq));
    s.values[section.empty() ? key : section + "." + key] = parse_values(line.substr(eq + 1));
  }
  return s;
}

SweepSpec load_sweep(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_sweep(ss.str());
}

// ---------------- GDoF ----------------

Rational gdof_sum(const Rational& alpha, const std::optional<Rational>& beta, std::optional<bool> aligned) {
  if (alpha < 0 || (beta && *beta < 0)) throw std::invalid_argument("gdof_sum: negative exponent");
  bool equal_form = false;
  if (alpha == 1) {
    if (!aligned) throw AlignmentRequired("gdof_sum: alpha = 1 needs the aligned flag");
    equal_form = *aligned;
  }
  return maxmin_fractional(sum_bounds(1, alpha, beta, equal_form), 2, 1).value;
}

Rational gdof_cog(const Rational& n2, const Rational& alpha1, const Rational& alpha2,
                  const std::optional<Rational>& beta) {
  if (n2 < 0 || alpha1 < 0 || alpha2 < 0 || (beta && *beta < 0))
    throw std::invalid_argument("gdof_cog: negative exponent");
  return maxmin_fractional(cog_bounds(1, n2, alpha1, alpha2, beta), 1, 1).value;
}

// ---------------- gap certification ----------------

const std::array<const char*, 5> kSymChecks{"achievable<=outer", "c_bar-17<=achievable", "outer<=c_bar+7",
                                            "c_bar<=c_bar_ldm+10", "achievable>=c_bar_ldm-7"};
const std::array<const char*, 3> kCogChecks{"lower<=c_bar_r0", "c_bar_r0-23-2r0<=lower", "c_bar_r0<c_bar_ldm+13+2r0"};

namespace {

std::vector<double> reals(const SweepSpec& s, const std::string& key, std::vector<double> fallback) {
  if (!s.has(key)) return fallback;
  std::vector<double> out;
  for (const auto& v : s.at(key)) out.push_back(v.real);
  return out;
}

std::string sym_context(const GaussSymParams& p) {
  return "snr=" + fmt9(p.snr) + " inr=" + fmt9(p.inr) + " cnr=" + fmt9(p.cnr) + " theta=" + fmt9(p.theta);
}
std::string cog_context(const GaussCogParams& p) {
  return "snr1=" + fmt9(p.snr1) + " snr2=" + fmt9(p.snr2) + " inr1=" + fmt9(p.inr1) + " inr2=" + fmt9(p.inr2) +
         " cnr=" + fmt9(p.cnr) + " theta=" + fmt9(p.theta) + " r0=" + fmt9(p.r0);
}

template <class F>
void parallel_for(size_t n, unsigned threads, F f) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<size_t>(threads, std::max<size_t>(n, 1)));
  std::atomic<size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (size_t i = next++; i < n; i = next++) f(i);
    });
  for (auto& th : pool) th.join();
}

}  // namespace

GapGrid gap_grid_from(const SweepSpec& s) {
  GapGrid g;
  std::ostringstream d;
  // Keys may sit under a [sym] / [cog] section or bare.
  auto key = [&](const std::string& family, const std::string& k) {
    std::string q = family + "." + k;
    return s.has(q) ? q : k;
  };
  auto get = [&](const std::string& family, const std::string& k, std::vector<double> fallback) {
    return reals(s, key(family, k), std::move(fallback));
  };
  if (s.has(key("sym", "snr"))) {
    auto snr = get("sym", "snr", {}), inr = get("sym", "inr", {}), cnr = get("sym", "cnr", {});
    auto th = get("sym", "theta", {0.0});
    for (double a : snr)
      for (double b : inr)
        for (double c : cnr)
          for (double t : th) g.sym.push_back({a, b, c, t});
    d << "sym " << snr.size() << "x" << inr.size() << "x" << cnr.size() << "x" << th.size();
  }
  if (s.has(key("cog", "snr1"))) {
    auto x1 = get("cog", "snr1", {}), x2 = get("cog", "snr2", {}), y1 = get("cog", "inr1", {}),
         y2 = get("cog", "inr2", {}), z = get("cog", "cnr", {});
    auto th = get("cog", "theta", {0.0}), r0 = get("cog", "r0", {7.0});
    for (double t : th)
      for (double a : x1)
        for (double b : x2)
          for (double c : y1)
            for (double e : y2)
              for (double f : z)
                for (double r : r0) g.cog.push_back({a, b, c, e, f, t, r});
    if (!g.sym.empty()) d << "; ";
    d << "cog " << x1.size() << "x" << x2.size() << "x" << y1.size() << "x" << y2.size() << "x" << z.size() << "x"
      << th.size() << "x" << r0.size();
  }
  if (g.sym.empty() && g.cog.empty()) throw std::invalid_argument("gap grid: no snr or snr1 key");
  for (const auto& p : g.sym)
    if (!(p.snr > 0 && p.inr > 0 && p.cnr > 0)) throw std::invalid_argument("gap grid: gains must be positive");
  for (const auto& p : g.cog)
    if (!(p.snr1 > 0 && p.snr2 > 0 && p.inr1 > 0 && p.inr2 > 0 && p.cnr > 0 && p.r0 >= 0))
      throw std::invalid_argument("gap grid: gains must be positive, r0 nonnegative");
  g.description = d.str();
  return g;
}

const char* kDefaultGapGrid =
    "[sym]\n"
    "snr = 10^0:1:8\n"
    "inr = 10^0:1:8\n"
    "cnr = 10^0:1:8\n"
    "theta = 0, pi/4, pi/2, pi\n"
    "[cog]\n"
    "snr1 = 10^0:2:6\n"
    "snr2 = 10^0:2:6\n"
    "inr1 = 10^0:2:6\n"
    "inr2 = 10^0:2:6\n"
    "cnr = 10^0:2:6\n"
    "theta = 0\n"
    "r0 = 7, 10\n";

GapGrid default_gap_grid() { return gap_grid_from(parse_sweep(kDefaultGapGrid)); }

GapReport verify_gaps(const GapGrid& grid, const GapConstants& k, const GridOptions& opt, double tol,
                      unsigned threads) {
  GapReport r;
  r.grid = grid.description;
  r.sym.resize(grid.sym.size());
  r.cog.resize(grid.cog.size());
  parallel_for(grid.sym.size(), threads, [&](size_t i) {
    auto& pt = r.sym[i];
    pt.params = grid.sym[i];
    pt.result = gaussian_sum_inner_outer(pt.params, opt);
    const auto& s = pt.result;
    pt.margins = {s.outer - s.achievable, s.achievable - (s.c_bar - k.sym_lower), s.c_bar + k.sym_upper - s.outer,
                  s.c_bar_ldm + k.ldm_upper - s.c_bar, s.achievable - (s.c_bar_ldm - k.ldm_lower)};
  });
  parallel_for(grid.cog.size(), threads, [&](size_t i) {
    auto& pt = r.cog[i];
    pt.params = grid.cog[i];
    pt.result = gaussian_cog_bounds(pt.params, opt);
    const auto& c = pt.result;
    const double r0 = pt.params.r0;
    pt.margins = {c.c_bar_r0 - c.lower, c.lower - (c.c_bar_r0 - k.cog_lower - 2 * r0),
                  c.ldm_link + k.cog_ldm + 2 * r0 - c.c_bar_r0};
  });
  for (size_t i = 0; i < r.sym.size(); ++i) {
    const auto& pt = r.sym[i];
    r.max_sym_gap = std::max(r.max_sym_gap, pt.result.c_bar - pt.result.achievable);
    for (int c = 0; c < 5; ++c)
      if (pt.margins[c] < -tol) r.violations.push_back({"sym", i, kSymChecks[c], pt.margins[c], sym_context(pt.params)});
  }
  for (size_t i = 0; i < r.cog.size(); ++i) {
    const auto& pt = r.cog[i];
    for (int c = 0; c < 3; ++c) {
      if (c < 2 && !pt.result.lower_asserted) continue;
      // the LDM link inequality is strict
      bool bad = c == 2 ? pt.margins[c] <= -tol : pt.margins[c] < -tol;
      if (bad) r.violations.push_back({"cog", i, kCogChecks[c], pt.margins[c], cog_context(pt.params)});
    }
  }
  return r;
}

// ---------------- tables ----------------

std::string to_csv(const Table& t) {
  std::ostringstream o;
  for (size_t i = 0; i < t.header.size(); ++i) o << (i ? "," : "") << t.header[i];
  o << "\n";
  for (const auto& row : t.rows) {
    for (size_t i = 0; i < row.size(); ++i) o << (i ? "," : "") << row[i];
    o << "\n";
  }
  return o.str();
}

std::string to_json(const Table& t, const std::string& kind) {
  nlohmann::ordered_json j;
  j["schema_version"] = 1;
  j["kind"] = kind;
  j["columns"] = t.header;
  j["rows"] = t.rows;
  return j.dump(2) + "\n";
}

std::string report_json(const GapReport& r) {
  nlohmann::ordered_json j;
  j["schema_version"] = 1;
  j["kind"] = "gap_report";
  j["grid"] = r.grid;
  j["max_sym_gap"] = fmt9(r.max_sym_gap);
  auto& sym = j["sym"] = nlohmann::ordered_json::array();
  for (const auto& pt : r.sym) {
    nlohmann::ordered_json e;
    e["snr"] = fmt9(pt.params.snr);
    e["inr"] = fmt9(pt.params.inr);
    e["cnr"] = fmt9(pt.params.cnr);
    e["theta"] = fmt9(pt.params.theta);
    e["c_bar"] = fmt9(pt.result.c_bar);
    e["c_bar_ldm"] = fmt9(pt.result.c_bar_ldm);
    e["achievable"] = fmt9(pt.result.achievable);
    e["outer"] = fmt9(pt.result.outer);
    e["region"] = static_cast<int>(pt.result.region);
    e["cooperation"] = pt.result.cooperation;
    auto& m = e["margins"];
    for (int c = 0; c < 5; ++c) m[kSymChecks[c]] = fmt9(pt.margins[c]);
    sym.push_back(e);
  }
  auto& cog = j["cog"] = nlohmann::ordered_json::array();
  for (const auto& pt : r.cog) {
    nlohmann::ordered_json e;
    e["snr1"] = fmt9(pt.params.snr1);
    e["snr2"] = fmt9(pt.params.snr2);
    e["inr1"] = fmt9(pt.params.inr1);
    e["inr2"] = fmt9(pt.params.inr2);
    e["cnr"] = fmt9(pt.params.cnr);
    e["theta"] = fmt9(pt.params.theta);
    e["r0"] = fmt9(pt.params.r0);
    e["c_bar_r0"] = fmt9(pt.result.c_bar_r0);
    e["lower"] = fmt9(pt.result.lower);
    e["ldm_link"] = fmt9(pt.result.ldm_link);
    e["lower_asserted"] = pt.result.lower_asserted;
    auto& m = e["margins"];
    for (int c = 0; c < 3; ++c) m[kCogChecks[c]] = fmt9(pt.margins[c]);
    cog.push_back(e);
  }
  auto& v = j["violations"] = nlohmann::ordered_json::array();
  for (const auto& x : r.violations)
    v.push_back({{"family", x.family}, {"index", x.index}, {"check", x.check}, {"margin", fmt9(x.margin)},
                 {"context", x.context}});
  return j.dump(2) + "\n";
}

Table gap_margin_table(const GapReport& r) {
  Table t;
  t.header = {"family", "params", "upper", "lower", "c_bar", "c_bar_ldm"};
  for (auto c : kSymChecks) t.header.push_back(c);
  for (auto c : kCogChecks) t.header.push_back(c);
  for (const auto& pt : r.sym) {
    std::vector<std::string> row{"sym",
                                 sym_context(pt.params),
                                 fmt9(pt.result.outer),
                                 fmt9(pt.result.achievable),
                                 fmt9(pt.result.c_bar),
                                 fmt9(pt.result.c_bar_ldm)};
    for (double m : pt.margins) row.push_back(fmt9(m));
    for (int c = 0; c < 3; ++c) row.push_back("");
    t.rows.push_back(row);
  }
  for (const auto& pt : r.cog) {
    std::vector<std::string> row{"cog",
                                 cog_context(pt.params),
                                 fmt9(pt.result.c_bar_r0),
                                 pt.result.lower_asserted ? fmt9(pt.result.lower) : "not asserted",
                                 fmt9(pt.result.c_bar_r0),
                                 fmt9(pt.result.ldm_link)};
    for (int c = 0; c < 5; ++c) row.push_back("");
    for (double m : pt.margins) row.push_back(fmt9(m));
    t.rows.push_back(row);
  }
  return t;
}

SweepSpec default_figure_sweep(const std::string& kind) {
  if (kind == "sum_gdof") return parse_sweep("alpha = 0:1/100:3\nbeta = 0, 1, 16/5, inf\naligned = 0\n");
  if (kind == "cog_gdof") return parse_sweep("alpha1 = 0:1/100:3\nbeta = 0, 1, 16/5, inf\nn2 = 1\nalpha2 = 1/2\n");
  if (kind == "gap_margins")
    return parse_sweep("snr = 10^0:2:8\ninr = 10^0:2:8\ncnr = 10^0:2:8\ntheta = 0\n");
  throw UnknownKind("unknown figure kind: " + kind);
}

namespace {

std::optional<Rational> exponent(const GridValue& v, const std::string& key) {
  if (v.infinite) return std::nullopt;
  if (!v.exact) throw std::invalid_argument(key + " must be an exact rational or inf");
  return v.exact;
}

Rational finite_exponent(const SweepSpec& s, const std::string& key) {
  const auto& vs = s.at(key);
  if (vs.size() != 1) throw std::invalid_argument(key + " must be a single value");
  auto e = exponent(vs[0], key);
  if (!e) throw std::invalid_argument(key + " must be finite");
  return *e;
}

}  // namespace

Table emit_figure_data(const std::string& kind, const SweepSpec& sweep) {
  Table t;
  if (kind == "sum_gdof") {
    t.header = {"alpha", "beta", "d"};
    bool aligned = sweep.has("aligned") && !sweep.at("aligned").empty() && sweep.at("aligned")[0].real != 0;
    if (!sweep.has("alpha") || !sweep.has("beta")) return t;
    for (const auto& b : sweep.at("beta"))
      for (const auto& a : sweep.at("alpha")) {
        auto alpha = exponent(a, "alpha");
        if (!alpha) throw std::invalid_argument("alpha must be finite");
        Rational d = gdof_sum(*alpha, exponent(b, "beta"), aligned);
        t.rows.push_back({to_string(a), to_string(b), to_string(d)});
      }
    return t;
  }
  if (kind == "cog_gdof") {
    t.header = {"alpha1", "beta", "d"};
    if (!sweep.has("alpha1") || !sweep.has("beta")) return t;
    Rational n2 = sweep.has("n2") ? finite_exponent(sweep, "n2") : Rational(1);
    Rational a2 = sweep.has("alpha2") ? finite_exponent(sweep, "alpha2") : Rational(0);
    for (const auto& b : sweep.at("beta"))
      for (const auto& a : sweep.at("alpha1")) {
        auto a1 = exponent(a, "alpha1");
        if (!a1) throw std::invalid_argument("alpha1 must be finite");
        Rational d = gdof_cog(n2, *a1, a2, exponent(b, "beta"));
        t.rows.push_back({to_string(a), to_string(b), to_string(d)});
      }
    return t;
  }
  if (kind == "gap_margins") return gap_margin_table(verify_gaps(gap_grid_from(sweep)));
  throw UnknownKind("unknown figure kind: " + kind);
}

LdmSimCheck check_ldm_point(const LdmSymParams& p, long min_messages, std::uint64_t seed) {
  LdmSimCheck c;
  c.capacity = ldm_sum_capacity(p);
  c.delta = c.capacity.any_delta ? ExtRational::inf() : c.capacity.delta_star;
  c.allocation = region_allocation(p, c.delta);
  if (!c.allocation.cooperative && !c.delta.infinite) {
    c.delta = ExtRational::inf();
    c.allocation = region_allocation(p, c.delta);
  }
  c.nominal = allocation_sum_rate(p, c.delta, c.allocation);
  c.plan = plan_halfduplex(p, c.delta, c.allocation);
  if (!c.plan) return c;
  SimOptions opt;
  opt.seed = seed;
  long blocks = 2;
  c.sim = run_halfduplex_sim(p, c.plan->schedule, c.plan->alloc, blocks, opt);
  if (c.sim.messages < min_messages) {
    long per_block = std::max(1L, c.sim.messages / blocks);
    blocks = (min_messages + per_block - 1) / per_block;
    c.sim = run_halfduplex_sim(p, c.plan->schedule, c.plan->alloc, blocks, opt);
  }
  c.exact = c.sim.errors == 0 && c.sim.messages >= min_messages && c.nominal == c.capacity.value &&
            c.sim.sum + 2 * c.sim.relay_deficit == c.capacity.value;
  return c;
}

}  // namespace hdcoop
