#include "hdcoop/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hdcoop/simplex.hpp"

namespace hdcoop {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double pos(double v) { return std::max(v, 0.0); }

Rational rmax3(const Rational& a, const Rational& b, const Rational& c) { return rmax(rmax(a, b), c); }

}  // namespace

Rational eval_fractional(const FracBound& f, const ExtRational& delta, const Rational& d0, const Rational& d1) {
  if (f.infinite) throw std::invalid_argument("eval_fractional: infinite bound");
  if (delta.infinite) return f.a / d1;
  return (f.a * delta.value + f.b) / (d0 + d1 * delta.value);
}

DeltaOptResult maxmin_fractional(const std::vector<FracBound>& bounds, const Rational& d0, const Rational& d1) {
  std::vector<int> live;
  for (int i = 0; i < static_cast<int>(bounds.size()); ++i)
    if (!bounds[i].infinite) live.push_back(i);
  if (live.empty()) throw std::invalid_argument("maxmin_fractional: no finite bound");
  if (d0 < 0 || d1 <= 0) throw std::invalid_argument("maxmin_fractional: denominator must grow with delta");

  // Common denominator: the min is decided by the numerators, crossings are where two numerators meet.
  std::vector<ExtRational> cand{ExtRational::of(0), ExtRational::inf()};
  for (size_t x = 0; x < live.size(); ++x)
    for (size_t y = x + 1; y < live.size(); ++y) {
      const auto& f = bounds[live[x]];
      const auto& g = bounds[live[y]];
      if (f.a == g.a) continue;
      Rational d = (g.b - f.b) / (f.a - g.a);
      if (d > 0) cand.push_back(ExtRational::of(d));
    }
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());

  auto min_at = [&](const ExtRational& d) {
    Rational m = eval_fractional(bounds[live[0]], d, d0, d1);
    for (int i : live) m = rmin(m, eval_fractional(bounds[i], d, d0, d1));
    return m;
  };
  std::vector<Rational> vals;
  for (const auto& d : cand) vals.push_back(min_at(d));
  Rational best = *std::max_element(vals.begin(), vals.end());

  DeltaOptResult r;
  r.value = best;
  r.any_delta = std::all_of(vals.begin(), vals.end(), [&](const Rational& v) { return v == best; });
  if (r.any_delta || vals.back() == best) {
    r.delta_star = ExtRational::inf();
  } else {
    for (size_t i = 0; i < cand.size(); ++i)
      if (vals[i] == best) {
        r.delta_star = cand[i];
        break;
      }
  }
  for (int i : live)
    if (eval_fractional(bounds[i], r.delta_star, d0, d1) == best) r.active.push_back(i);
  return r;
}

std::vector<FracBound> sum_bounds(const Rational& nd, const Rational& ni, const std::optional<Rational>& nc,
                                  bool equal_form) {
  std::vector<FracBound> out(4);
  if (nc) {
    out[0] = {2 * nd, 2 * rmax(nd, *nc)};
    out[1] = {rmax(2 * nd - ni, ni), nd + rmax3(nd, ni, *nc)};
    out[2] = {2 * rmax(ni, nd - ni), 2 * rmax3(nd, ni, *nc)};
  } else {
    out[0] = {2 * nd, 0, true};
    out[1] = {rmax(2 * nd - ni, ni), 0, true};
    out[2] = {2 * rmax(ni, nd - ni), 0, true};
  }
  if (equal_form)
    out[3] = {nd, 2 * nd};
  else
    out[3] = {2 * rmax(nd, ni), 2 * rmax(nd, ni)};
  return out;
}

std::vector<FracBound> ldm_sum_bounds(const LdmSymParams& p) {
  return sum_bounds(p.n_d, p.n_i, Rational(p.n_c), p.n_d == p.n_i);
}

DeltaOptResult ldm_sum_capacity(const LdmSymParams& p) { return maxmin_fractional(ldm_sum_bounds(p), 2, 1); }

std::array<Rational, 4> cog_v_exponents(const Rational& n1, const Rational& n2, const Rational& a1,
                                        const Rational& a2) {
  Rational v1 = n2;
  Rational v2 = rmax(n2, a2) - rmin(a2, n1);
  Rational v3 = rpos(a1 - n1) + rpos(n2 - a1);
  Rational v4 = rpos(a1 - n1) - rmin(a2, n1) + rmax(n2 - a1, a2);
  return {v1, v2, v3, v4};
}

int ifc_cog_capacity(int n1, int n2, int a1, int a2) {
  auto v = cog_v_exponents(n1, n2, a1, a2);
  Rational m = std::min({v[0], v[1], v[2], v[3]});
  return static_cast<int>(m.get_num().get_si());
}

std::vector<FracBound> cog_bounds(const Rational& n1, const Rational& n2, const Rational& a1, const Rational& a2,
                                  const std::optional<Rational>& beta) {
  auto v = cog_v_exponents(n1, n2, a1, a2);
  std::vector<FracBound> out(4);
  out[0] = {0, v[0]};
  out[2] = {0, v[2]};
  if (beta) {
    Rational e = rmax3(*beta, a2, n1) - n1;
    out[1] = {e, v[1]};
    out[3] = {e, v[3]};
  } else {
    out[1] = {0, 0, true};
    out[3] = {0, 0, true};
  }
  return out;
}

std::vector<FracBound> ldm_cog_bounds(const LdmCogParams& p) {
  return cog_bounds(p.n1, p.n2, p.a1, p.a2, Rational(p.beta));
}

CogCapacity ldm_cog_capacity(const LdmCogParams& p) {
  CogCapacity c;
  c.maxmin = maxmin_fractional(ldm_cog_bounds(p), 1, 1);
  auto v = cog_v_exponents(p.n1, p.n2, p.a1, p.a2);
  Rational ifc = std::min({v[0], v[1], v[2], v[3]});
  Rational z = rmin(v[0], v[2]);
  c.interpretation = ifc;
  bool interesting = p.beta > std::max(p.a2, p.n1) && p.n1 + p.n2 != p.a1 + p.a2;
  if (p.beta > std::max(p.a2, p.n1)) {
    Rational d0 = (z - ifc) / Rational(p.beta - p.n1);
    c.delta0 = d0;
    c.interpretation = rmax(ifc, z / (1 + d0));
  }
  if (interesting) {
    c.identity_checked = true;
    if (c.interpretation != c.maxmin.value)
      throw InternalInconsistency("cognitive capacity: max-min " + to_string(c.maxmin.value) +
                                  " != interpretation " + to_string(c.interpretation));
  }
  c.value = c.maxmin.value;
  c.delta_star = c.maxmin.delta_star;
  return c;
}

// ---------------- numeric optimization ----------------

std::vector<double> delta_grid(const GridOptions& g) {
  std::vector<double> d{0.0};
  for (int i = 0; i < g.points; ++i) {
    double t = g.points == 1 ? g.lo_log2 : g.lo_log2 + (g.hi_log2 - g.lo_log2) * i / (g.points - 1);
    d.push_back(std::exp2(t));
  }
  d.push_back(kInf);
  return d;
}

RealDeltaOpt optimize_delta(const std::function<std::vector<double>(double)>& bounds, const GridOptions& g) {
  auto grid = delta_grid(g);
  auto value = [&](double d, bool& ok) {
    auto v = bounds(d);
    ok = !v.empty();
    return ok ? *std::min_element(v.begin(), v.end()) : -kInf;
  };
  RealDeltaOpt r;
  r.value = -kInf;
  int best = -1;
  for (size_t i = 0; i < grid.size(); ++i) {
    bool ok;
    double v = value(grid[i], ok);
    if (ok && v > r.value) {
      r.value = v;
      r.delta_star = grid[i];
      best = static_cast<int>(i);
    }
  }
  if (best < 0) return r;
  if (g.refine && best > 0 && best + 1 < static_cast<int>(grid.size()) - 1) {
    double lo = grid[best - 1], hi = grid[best + 1];
    const double phi = (std::sqrt(5.0) - 1) / 2;
    double c = hi - phi * (hi - lo), d = lo + phi * (hi - lo);
    bool okc, okd;
    double fc = value(c, okc), fd = value(d, okd);
    while (hi - lo > g.tol * std::max(1.0, lo)) {
      if (fc >= fd) {
        hi = d;
        d = c;
        fd = fc;
        c = hi - phi * (hi - lo);
        fc = value(c, okc);
      } else {
        lo = c;
        c = d;
        fc = fd;
        d = lo + phi * (hi - lo);
        fd = value(d, okd);
      }
    }
    double m = (lo + hi) / 2;
    bool ok;
    double fm = value(m, ok);
    if (ok && fm > r.value) {
      r.value = fm;
      r.delta_star = m;
    }
  }
  auto v = bounds(r.delta_star);
  for (int i = 0; i < static_cast<int>(v.size()); ++i)
    if (v[i] <= r.value + 1e-9) r.active.push_back(i);
  return r;
}

// ---------------- Gaussian, symmetric ----------------

double log2p(double v) { return std::log2(1.0 + v); }

int ldm_level(double gain) {
  if (gain <= 1) return 0;
  return static_cast<int>(std::floor(std::log2(gain)));
}

double beta1_sym(double x, double y, double theta) {
  return (x * x + y * y - 2 * x * y * std::cos(theta)) / (x * (x + y));
}
double beta2_sym(double x, double y, double theta) {
  return (x * x + y * y - 2 * x * y * std::cos(theta)) / (y * (x + y));
}

namespace {
double cog_numerator(const GaussCogParams& p) {
  return p.snr1 * p.snr2 + p.inr1 * p.inr2 - 2 * std::sqrt(p.snr1 * p.snr2 * p.inr1 * p.inr2) * std::cos(p.theta);
}
}  // namespace

double beta1_cog(const GaussCogParams& p) { return cog_numerator(p) / (p.snr1 * p.snr2); }
double beta2_cog(const GaussCogParams& p) { return cog_numerator(p) / (p.inr1 * p.inr2); }

std::array<double, 4> gauss_sum_u(const GaussSymParams& p, double d) {
  const double x = p.snr, y = p.inr, z = p.cnr, c = std::cos(p.theta);
  const double quad = 4 * x + 4 * y + x * x + y * y - 2 * x * y * c;
  const double vmax = std::max(log2p(y + (2 * x + y) / (1 + y)), log2p(2 * y));
  if (std::isinf(d))
    return {2 * log2p(x), log2p(2 * x + 2 * y) + log2p(x / (1 + y)), 2 * vmax, log2p(quad)};
  const double k = 1 / (2 + d);
  return {2 * k * (d * log2p(x) + log2p(x + z)),
          k * (d * log2p(2 * x + 2 * y) + log2p(x) + log2p(x + y + z) + d * log2p(x / (1 + y))),
          2 * k * (d * vmax + log2p(x + y + z)),
          k * (d * log2p(quad) + 2 * log2p(x + y))};
}

std::array<double, 4> gauss_sum_u_ldm(const GaussSymParams& p, double d) {
  const int nd = ldm_level(p.snr), ni = ldm_level(p.inr), nc = ldm_level(p.cnr);
  const int m3 = std::max({nd, ni, nc});
  if (std::isinf(d))
    return {2.0 * nd, 1.0 * std::max(2 * nd - ni, ni), 2.0 * std::max(ni, nd - ni), 2.0 * std::max(nd, ni)};
  const double k = 1 / (2 + d);
  return {2 * k * (d * nd + std::max(nd, nc)), k * (d * std::max(2 * nd - ni, ni) + nd + m3),
          2 * k * (d * std::max(ni, nd - ni) + m3), 2 * (1 + d) * k * std::max(nd, ni)};
}

std::array<double, 5> gauss_sum_ldm_terms(const GaussSymParams& p, double d) {
  auto a = gauss_sum_u_ldm(p, d);
  auto u = gauss_sum_u(p, d);
  return {a[0] - 6, a[1] - 4, a[2], a[3] - 4, u[3] - 10};
}

std::array<double, 4> gauss_sum_outer_terms(const GaussSymParams& p, double d) {
  const double x = p.snr, y = p.inr, z = p.cnr, c = std::cos(p.theta);
  double cut, zz, v, cp;
  if (d == 0) {
    const double pb = 2;
    cut = log2p((x + z) * pb);
    zz = 0.5 * (log2p(x * pb) + log2p((x + y + z) * pb));
    v = log2p((x + y + z) * pb);
    cp = log2p((x + y) * pb);
  } else if (std::isinf(d)) {
    cut = 2 * log2p(x);
    zz = log2p(2 * x + 2 * y) + log2p(x / (1 + y));
    v = 2 * std::max(log2p(y + (2 * x + y) / (1 + y)), log2p(2 * y));
    cp = log2p(4 * x + 4 * y + x * x + y * y - 2 * x * y * c);
  } else {
    const double pa = (2 + d) / d, pb = 2 + d, k = 1 / (2 + d);
    cut = k * (2 * d * log2p(x * pa) + 2 * log2p((x + z) * pb));
    zz = k * (d * log2p(2 * x * pa + 2 * y * pa) + log2p(x * pb) + log2p((x + y + z) * pb) +
              d * log2p(x * pa / (1 + y * pa)));
    const double m = std::max(1 + y * pa + (2 * x + y) * pa / (1 + y * pa), 1 + 2 * y * pa);
    v = k * (2 * d * std::log2(m) + 2 * log2p((x + y + z) * pb));
    cp = k * (d * log2p(4 * (x + y) * pa + pa * pa * (x * x + y * y - 2 * x * y * c)) + 2 * log2p((x + y) * pb));
  }
  return {cut + 2, zz + 3, v + 4, cp + 2};
}

namespace {

// Received-power bookkeeping for the superposition layers at one destination.
// Layers: 0 pre-shared public, 1 public, 2 private, 3 cooperative, 4 other public, 5 other private.
enum Layer { kP, kW, kU, kV, kW2, kU2, kLayers };

using Known = std::array<bool, kLayers>;

void mark(Known& k, Layer l) {
  switch (l) {
    case kU:
      k[kU] = true;
      [[fallthrough]];
    case kW:
      k[kW] = true;
      [[fallthrough]];
    case kP:
      k[kP] = true;
      break;
    default:
      k[l] = true;
  }
}

double residual(const std::array<double, kLayers>& pw, const Known& k) {
  double s = 0;
  for (int i = 0; i < kLayers; ++i)
    if (!k[i]) s += pw[i];
  return log2p(s);
}

const std::vector<std::vector<Layer>>& own_sets() {
  static const std::vector<std::vector<Layer>> s{{kU},     {kW, kU},     {kP, kW, kU},    {kV},
                                                 {kV, kU}, {kV, kW, kU}, {kV, kP, kW, kU}};
  return s;
}

struct MiRow {
  std::array<int, kLayers> uses{};  // counts of own layers and other public
  double rhs = 0;
};

std::vector<MiRow> destination_rows(const std::array<double, kLayers>& pw) {
  std::vector<MiRow> rows;
  for (bool with_other : {false, true}) {
    for (const auto& own : own_sets()) {
      Known kb{}, kab{};
      for (Layer l : {kP, kW, kU, kV})
        if (std::find(own.begin(), own.end(), l) == own.end()) mark(kb, l);
      if (!with_other) mark(kb, kW2);
      kab = kb;
      for (Layer l : own) mark(kab, l);
      if (with_other) mark(kab, kW2);
      MiRow r;
      for (Layer l : own) r.uses[l] += 1;
      if (with_other) r.uses[kW2] += 1;
      r.rhs = residual(pw, kb) - residual(pw, kab);
      rows.push_back(r);
    }
  }
  return rows;
}

double lp_max(const std::vector<std::vector<double>>& a, const std::vector<double>& b, const std::vector<double>& c) {
  auto r = simplex_max<double>(a, b, c, 1e-10);
  if (r.status != LpStatus::Optimal) return -kInf;
  return r.value;
}

}  // namespace

double gauss_virtual_sum(const GaussSymParams& p, const PowerSplitSym& s, double bp_ss, double bp_sd) {
  const double x = p.snr, y = p.inr;
  const double b1 = beta1_sym(x, y, p.theta);
  std::array<double, kLayers> pw{x * s.svp, x * s.sw, x * s.su, b1 * x * s.sxv, y * s.sw, y * s.su};
  // Symmetric rates: variables W, U, V, V'; the other source's public rate equals W.
  std::vector<std::vector<double>> a;
  std::vector<double> b;
  for (const auto& r : destination_rows(pw)) {
    a.push_back({double(r.uses[kW] + r.uses[kW2]), double(r.uses[kU]), double(r.uses[kV]), double(r.uses[kP])});
    b.push_back(std::max(r.rhs, 0.0));
  }
  a.push_back({0, 0, 1, 0});
  b.push_back(bp_ss);
  a.push_back({0, 0, 0, 1});
  b.push_back(bp_sd);
  return 2 * lp_max(a, b, {1, 1, 1, 1});
}

double gauss_hk_rate(const GaussSymParams& p) {
  const double y = p.inr;
  if (y <= 1) return gauss_virtual_sum(p, {0, 1, 0, 0}, 0, 0);
  return std::max(gauss_virtual_sum(p, {1 - 1 / y, 1 / y, 0, 0}, 0, 0), gauss_virtual_sum(p, {1, 0, 0, 0}, 0, 0));
}

SymRegion classify_region(const GaussSymParams& p) {
  const double x = p.snr, y = p.inr, z = p.cnr;
  if (z <= x || z <= 1 || y <= 1) return SymRegion::NoCooperation;
  if (2 * y < x && x < z) return SymRegion::WeakInterference;
  if (2 * x < y && y <= z) return SymRegion::CoopAboveInterference;
  if (x < z && z < y && 2 * x < y && z > 1) return SymRegion::CoopBelowInterference;
  return SymRegion::ComparableGains;
}

std::string region_name(SymRegion r) {
  switch (r) {
    case SymRegion::NoCooperation:
      return "1 (no cooperation)";
    case SymRegion::WeakInterference:
      return "2 (weak interference)";
    case SymRegion::CoopAboveInterference:
      return "3 (strong interference, cooperation link above interference)";
    case SymRegion::CoopBelowInterference:
      return "4 (strong interference, cooperation link below interference)";
    case SymRegion::ComparableGains:
      return "5 (comparable direct and interference gains)";
  }
  return "?";
}

std::optional<double> gauss_region_rate(const GaussSymParams& p, double d) {
  const double x = p.snr, y = p.inr, z = p.cnr;
  const double nD = ldm_level(x), nI = ldm_level(y), nC = ldm_level(z);
  const bool inf = std::isinf(d);
  const double L3 = std::log2(3.0), L5 = std::log2(5.0);
  auto tot = [&](double ra, double rb, double dr) { return inf ? ra : (d * ra + 2 * rb + 2 * dr) / (2 + d); };
  auto bp = [&](double dbp) { return inf ? 0.0 : (d > 0 ? dbp / d : 1e18); };
  auto virt = [&](double sw, double su, double svp, double sxv, double bss, double bsd) {
    return gauss_virtual_sum(p, {sw, su, svp, sxv}, bss, bsd);
  };
  const SymRegion region = classify_region(p);
  if (region == SymRegion::NoCooperation) return std::nullopt;
  const double yd = inf ? kInf : std::pow(y, d);
  auto listen_only = [&]() {
    double ra = 2 * std::min(log2p(y / (1 + x)), bp(nC));
    return tot(ra, 0, 0);
  };

  if (region == SymRegion::WeakInterference) {
    double rb = pos(nD - 1), dbs = pos(nC - nD - 1);
    double ra = d == 0 ? 0 : virt(1.0 / 3, 1 / (3 * y), 0, 1.0 / 3, bp(dbs), 0);
    return tot(ra, rb, 0);
  }
  if (region == SymRegion::CoopAboveInterference) {
    if (x > 1) {
      double rb, dbs, dr;
      if (yd * x >= z) {
        rb = pos(nD - 1);
        dbs = pos(nC - nD - 1);
        dr = 0;
      } else {
        rb = pos(nD - L5);
        dbs = pos(d * nI - 1 - L3);
        dr = pos(std::min(nI - nD, (nC - nD - d * nI) / 2) - 2 - L3 - d / 2);
      }
      double ra = d == 0 ? 0 : virt(0.5, 0, 0, 0.5, bp(dbs), 0);
      return tot(ra, rb, dr);
    }
    if (yd >= z) return listen_only();
    double dbs = pos(d * nI - 1.5);
    double dr = pos(std::min(nI, (nC - d * nI) / 2) - d / 2 - 2);
    double ra = 2 * pos(std::min(nI - 1, bp(dbs)));
    return tot(ra, 0, dr);
  }
  if (region == SymRegion::CoopBelowInterference) {
    if (x > 1) {
      double rb, dbs, dbd, dr;
      if (y <= x * yd || nC - nD + 1 <= d * (nI - nD)) {
        rb = pos(nD - 1);
        dbs = pos(nC - nD - 2);
        dbd = pos(nI - nC - 1);
        dr = 0;
      } else {
        rb = pos(nD - L5);
        dbs = pos(d * (nI - nD) - 3 - L3 - d / 2);
        dbd = pos(d * nD - 1.5 + d / 2 - L3);
        double sss = std::min(nC - nD, (1 + d) / 2 * nI - (1 + 2 * d) / 2 * nD) - 2 - L3 - d / 2;
        double ssd = (1 - d) / 2 * nI - (1 - 2 * d) / 2 * nD - (1 - d) / 2 - L3;
        dr = pos(std::min({std::min(nC - nD - d * (nI - nD), (1 - d) / 2 * nI - nD / 2) + 1, sss - dbs, ssd - dbd}));
      }
      double ra = d == 0 ? 0 : virt(1.0 / 3, 0, 1.0 / 3, 1.0 / 3, bp(dbs), bp(dbd));
      return tot(ra, rb, dr);
    }
    if (yd >= z) return listen_only();
    double dbs = pos(d * nI - 3);
    double dr = pos(std::min(nC - d * nI, (1 - d) / 2 * nI) - 1);
    double ra = 2 * pos(std::min(nI - 1, bp(dbs)));
    return tot(ra, 0, dr);
  }
  if (x < 1) return 0.0;
  double rb = pos(nD - 1), dbs = pos(nC - nD - 1);
  double ra = d == 0 ? 0 : virt(0.5, 0, 0, 0.5, bp(dbs), 0);
  return tot(ra, rb, 0);
}

GaussSumResult gaussian_sum_inner_outer(const GaussSymParams& p, const GridOptions& g) {
  GaussSumResult r;
  auto cb = optimize_delta(
      [&](double d) {
        auto u = gauss_sum_u(p, d);
        return std::vector<double>(u.begin(), u.end());
      },
      g);
  r.c_bar = cb.value;
  r.delta_c_bar = cb.delta_star;
  auto cl = optimize_delta(
      [&](double d) {
        auto u = gauss_sum_ldm_terms(p, d);
        return std::vector<double>(u.begin(), u.end());
      },
      g);
  r.c_bar_ldm = cl.value;
  auto ou = optimize_delta(
      [&](double d) {
        auto u = gauss_sum_outer_terms(p, d);
        return std::vector<double>(u.begin(), u.end());
      },
      g);
  r.outer = ou.value;
  r.delta_outer = ou.delta_star;
  r.region = classify_region(p);
  r.cooperation = r.region != SymRegion::NoCooperation;
  r.achievable = gauss_hk_rate(p);
  r.delta_achievable = kInf;
  if (r.cooperation) {
    auto ac = optimize_delta(
        [&](double d) {
          auto v = gauss_region_rate(p, d);
          return v ? std::vector<double>{*v} : std::vector<double>{};
        },
        g);
    if (ac.value > r.achievable) {
      r.achievable = ac.value;
      r.delta_achievable = ac.delta_star;
    }
  }
  return r;
}

// ---------------- Gaussian, cognitive ----------------

std::array<double, 4> gauss_cog_u(const GaussCogParams& p, double d) {
  const double x1 = p.snr1, x2 = p.snr2, y1 = p.inr1, y2 = p.inr2, z = p.cnr, r0 = p.r0;
  const double k = std::isinf(d) ? 0.0 : 1 / (1 + d);
  const double dk = std::isinf(d) ? 1.0 : d / (1 + d);
  const double m = std::max(log2p(y2 + (2 * x2 + y2) / (1 + y1)), log2p(2 * y2));
  const double coop = dk * log2p((y2 + z) / (1 + x1));
  return {k * log2p(x2) + 1,
          k * (log2p(2 * x2 + 2 * y2) - log2p(x1) + log2p(x1 / (1 + y2))) + coop + 2 + r0,
          k * (log2p(2 * x1 + 2 * y1) - log2p(x1) + log2p(x2 / (1 + y1))) + 2 + r0,
          k * (log2p(2 * x1 + 2 * y1) - 2 * log2p(x1) + log2p(x1 / (1 + y2)) + m) + coop + 3 + 2 * r0};
}

std::array<double, 4> gauss_cog_ldm_terms(const GaussCogParams& p, double d) {
  const int n1 = ldm_level(p.snr1), n2 = ldm_level(p.snr2), a1 = ldm_level(p.inr1), a2 = ldm_level(p.inr2),
            b = ldm_level(p.cnr);
  const double k = std::isinf(d) ? 0.0 : 1 / (1 + d);
  const double dk = std::isinf(d) ? 1.0 : d / (1 + d);
  const double e = std::max({b, a2, n1}) - n1;
  auto v = cog_v_exponents(n1, n2, a1, a2);
  const double v1 = v[0].get_d(), v2 = v[1].get_d(), v3 = v[2].get_d(), v4 = v[3].get_d();
  const double r0 = p.r0;
  return {k * v1 - 10 - 2 * r0, k * v2 + dk * e - 5 - r0, k * v3 - 5 - r0, k * v4 + dk * e};
}

std::optional<double> gauss_cog_lower_at(const GaussCogParams& p, double d) {
  const double x1 = p.snr1, x2 = p.snr2, y1 = p.inr1, y2 = p.inr2, z = p.cnr;
  if (std::isinf(d)) return std::nullopt;
  const double r1 = pos(log2p(x1) - p.r0);

  // Variables: W1 U1 V1 P1 W2 U2 V2 P2. Source 1 holds V1; nothing is pre-shared.
  auto solve = [&](std::array<double, 3> s1, std::array<double, 3> s2, double v_gain,
                   double bp12) -> std::optional<double> {
    std::array<double, kLayers> at3{0, x1 * s1[0], x1 * s1[1], v_gain * s1[2], y1 * s2[0], y1 * s2[1]};
    std::array<double, kLayers> at4{0, x2 * s2[0], x2 * s2[1], 0, y2 * s1[0], y2 * s1[1]};
    std::vector<std::vector<double>> a;
    std::vector<double> b;
    auto add_dest = [&](const std::array<double, kLayers>& pw, int own, int other) {
      for (const auto& r : destination_rows(pw)) {
        std::vector<double> row(8, 0);
        row[own + 0] += r.uses[kW];
        row[own + 1] += r.uses[kU];
        row[own + 2] += r.uses[kV];
        row[own + 3] += r.uses[kP];
        row[other + 0] += r.uses[kW2];
        a.push_back(row);
        b.push_back(std::max(r.rhs, 0.0));
      }
    };
    add_dest(at3, 0, 4);
    add_dest(at4, 4, 0);
    for (auto [idx, cap] : std::array<std::pair<int, double>, 4>{{{2, bp12}, {3, 0}, {6, 0}, {7, 0}}}) {
      std::vector<double> row(8, 0);
      row[idx] = 1;
      a.push_back(row);
      b.push_back(cap);
    }
    std::vector<double> eq{1, 1, 1, 1, 0, 0, 0, 0}, neq{-1, -1, -1, -1, 0, 0, 0, 0};
    a.push_back(eq);
    b.push_back(r1);
    a.push_back(neq);
    b.push_back(-r1);
    auto r = simplex_max<double>(a, b, {0, 0, 0, 0, 1, 1, 0, 0}, 1e-10);
    if (r.status != LpStatus::Optimal) return std::nullopt;
    return r.value;
  };

  if (d == 0) {
    double su1 = std::min(1.0, 1 / y2), su2 = std::min(1.0, 1 / y1);
    return solve({1 - su1, su1, 0}, {1 - su2, su2, 0}, 0, 0);
  }
  if (!(y1 >= 1 && y2 >= 1 && x1 >= 1)) return std::nullopt;
  if (log2p(x1) - 1 < r1) return std::nullopt;
  const double b1 = beta1_cog(p);
  const double bp = d * log2p(z / x1);
  auto v = solve({1.0 / 3, 1 / (3 * y2), std::min(1.0, x2 / y2) / 3}, {1.0 / 3, 1 / (3 * y1), 0}, b1 * x1, bp);
  if (!v) return std::nullopt;
  return *v / (1 + d);
}

CogBoundsResult gaussian_cog_bounds(const GaussCogParams& p, const GridOptions& g) {
  CogBoundsResult r;
  auto cb = optimize_delta(
      [&](double d) {
        auto u = gauss_cog_u(p, d);
        return std::vector<double>(u.begin(), u.end());
      },
      g);
  r.c_bar_r0 = cb.value;
  r.delta_c_bar = cb.delta_star;
  auto cl = optimize_delta(
      [&](double d) {
        if (d == 0) return std::vector<double>{};
        auto u = gauss_cog_ldm_terms(p, d);
        return std::vector<double>(u.begin(), u.end());
      },
      g);
  r.ldm_link = cl.value;
  GridOptions lg = g;
  lg.refine = false;
  auto lo = optimize_delta(
      [&](double d) {
        auto v = gauss_cog_lower_at(p, d);
        return v ? std::vector<double>{*v} : std::vector<double>{};
      },
      lg);
  r.lower = std::isfinite(lo.value) ? lo.value : 0.0;
  r.delta_lower = lo.delta_star;
  r.lower_asserted = p.r0 >= 7;
  return r;
}

double gap_term_power(double d) {
  if (d <= 0) return 0;
  if (std::isinf(d)) return 0;
  return d / (2 + d) * std::log2((2 + d) / d);
}

double gap_term_listen(double d) {
  if (std::isinf(d)) return 0;
  return std::log2(2 + d) / (2 + d);
}

}  // namespace hdcoop
