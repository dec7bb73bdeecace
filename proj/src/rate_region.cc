#include "hdcoop/rate_region.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "hdcoop/ldm_codec.hpp"
#include "hdcoop/simplex.hpp"

namespace hdcoop {

int Polytope::index_of(const std::string& name) const {
  auto it = std::find(vars.begin(), vars.end(), name);
  if (it == vars.end()) throw std::invalid_argument("unknown rate variable: " + name);
  return static_cast<int>(it - vars.begin());
}

void Polytope::add(const std::map<std::string, Rational>& terms, const Rational& rhs) {
  LinIneq row{std::vector<Rational>(vars.size(), 0), rhs};
  for (const auto& [name, c] : terms) row.coef[index_of(name)] += c;
  rows.push_back(std::move(row));
}

bool Polytope::contains(const std::vector<Rational>& x) const {
  if (x.size() != vars.size()) throw std::invalid_argument("point dimension mismatch");
  for (const auto& v : x)
    if (v < 0) return false;
  for (const auto& r : rows) {
    Rational s = 0;
    for (size_t j = 0; j < x.size(); ++j) s += r.coef[j] * x[j];
    if (s > r.rhs) return false;
  }
  return true;
}

Polytope Polytope::substitute(const std::string& var, const std::map<std::string, Rational>& expr,
                              const Rational& constant) const {
  int k = index_of(var);
  std::vector<Rational> e(vars.size(), 0);
  for (const auto& [name, c] : expr) {
    int j = index_of(name);
    if (j == k) throw std::invalid_argument("substitution refers to its own variable");
    e[j] += c;
  }
  Polytope out;
  for (size_t j = 0; j < vars.size(); ++j)
    if (static_cast<int>(j) != k) out.vars.push_back(vars[j]);
  auto drop = [&](const std::vector<Rational>& full) {
    std::vector<Rational> r;
    for (size_t j = 0; j < full.size(); ++j)
      if (static_cast<int>(j) != k) r.push_back(full[j]);
    return r;
  };
  for (const auto& row : rows) {
    std::vector<Rational> c = row.coef;
    Rational a = c[k];
    for (size_t j = 0; j < c.size(); ++j) c[j] += a * e[j];
    out.rows.push_back({drop(c), row.rhs - a * constant});
  }
  std::vector<Rational> nonneg(vars.size(), 0);
  for (size_t j = 0; j < vars.size(); ++j) nonneg[j] = -e[j];
  out.rows.push_back({drop(nonneg), constant});
  return out;
}

Polytope Polytope::with_sum_variable(const std::string& name, const std::map<std::string, Rational>& expr) const {
  if (std::find(vars.begin(), vars.end(), name) != vars.end())
    throw std::invalid_argument("duplicate rate variable: " + name);
  Polytope out = *this;
  out.vars.push_back(name);
  for (auto& r : out.rows) r.coef.push_back(0);
  std::map<std::string, Rational> up = {{name, 1}}, down = {{name, -1}};
  for (const auto& [v, c] : expr) {
    up[v] -= c;
    down[v] += c;
  }
  out.add(up, 0);
  out.add(down, 0);
  return out;
}

std::string serialize(const Polytope& p) {
  std::ostringstream os;
  os << "vars";
  for (const auto& v : p.vars) os << ' ' << v;
  os << '\n';
  for (const auto& r : p.rows) {
    for (size_t j = 0; j < r.coef.size(); ++j) os << (j ? " " : "") << to_string(r.coef[j]);
    os << " <= " << to_string(r.rhs) << '\n';
  }
  return os.str();
}

Polytope parse_polytope(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  Polytope p;
  bool header = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string tok;
    if (!header) {
      ls >> tok;
      if (tok != "vars") throw std::invalid_argument("polytope text must start with 'vars'");
      while (ls >> tok) p.vars.push_back(tok);
      header = true;
      continue;
    }
    LinIneq row;
    bool seen_le = false;
    while (ls >> tok) {
      if (tok == "<=") {
        seen_le = true;
        if (!(ls >> tok)) throw std::invalid_argument("missing right-hand side");
        row.rhs = parse_rational(tok);
        break;
      }
      row.coef.push_back(parse_rational(tok));
    }
    if (!seen_le || row.coef.size() != p.vars.size()) throw std::invalid_argument("malformed inequality: " + line);
    p.rows.push_back(std::move(row));
  }
  if (!header) throw std::invalid_argument("empty polytope text");
  return p;
}

namespace {

gf2::BitMatrix stack(const AuxSpec& spec, const std::vector<std::string>& names) {
  gf2::BitMatrix m(0, spec.base_bits);
  for (const auto& n : names) {
    auto it = spec.gen.find(n);
    if (it == spec.gen.end()) throw std::invalid_argument("unknown auxiliary variable: " + n);
    m = m.vstack(it->second);
  }
  return m;
}

}  // namespace

int ldm_mutual_info(const AuxSpec& spec, const std::vector<std::string>& targets, const std::string& output,
                    const std::vector<std::string>& conditioning) {
  std::vector<std::string> ab = targets;
  ab.insert(ab.end(), conditioning.begin(), conditioning.end());
  std::vector<std::string> yb = {output};
  yb.insert(yb.end(), conditioning.begin(), conditioning.end());
  std::vector<std::string> yab = {output};
  yab.insert(yab.end(), ab.begin(), ab.end());
  return gf2::rank(stack(spec, yb)) - gf2::rank(stack(spec, conditioning)) - gf2::rank(stack(spec, yab)) +
         gf2::rank(stack(spec, ab));
}

AuxSpec symmetric_aux(int n_d, int n_i) {
  if (n_d < 0 || n_i < 0) throw std::invalid_argument("negative LDM exponent");
  const int n = std::max(n_d, n_i);
  const int s = std::max(n_d - n_i, 0);
  const std::vector<int> sizes = {n, n, s, n, n, n, s, n};  // Vp1 W1 U1 V1 Vp2 W2 U2 V2
  std::vector<int> off(9, 0);
  for (int k = 0; k < 8; ++k) off[k + 1] = off[k] + sizes[k];
  const int N = off[8];
  auto lift = [&](int k) {
    gf2::BitMatrix m(n, N);
    bool bottom = sizes[k] == s && (k == 2 || k == 6);
    for (int i = 0; i < sizes[k]; ++i) m.set(bottom ? n - s + i : i, off[k] + i, true);
    return m;
  };
  AuxSpec spec;
  spec.base_bits = N;
  std::array<gf2::BitMatrix, 2> xu, v;
  for (int i = 0; i < 2; ++i) {
    auto vp = lift(4 * i), w = lift(4 * i + 1), u = lift(4 * i + 2);
    v[i] = lift(4 * i + 3);
    auto xw = vp ^ w;
    xu[i] = xw ^ u;
    std::string tag = std::to_string(i + 1);
    spec.gen["XVp" + tag] = vp;
    spec.gen["XW" + tag] = xw;
    spec.gen["XU" + tag] = xu[i];
  }
  gf2::BitMatrix gd = gf2::shift_matrix(n, n - n_d), gi = gf2::shift_matrix(n, n - n_i);
  std::array<gf2::BitMatrix, 2> xv = {gf2::BitMatrix(n, N), gf2::BitMatrix(n, N)};
  if (n_d != n_i) {
    auto block = gd.hstack(gi).vstack(gi.hstack(gd));
    auto inv = gf2::inverse(block);
    if (!inv) throw std::logic_error("block channel matrix unexpectedly singular");
    auto xv_all = *inv * v[0].vstack(v[1]);
    gf2::BitMatrix top(n, N), bot(n, N);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < N; ++c) {
        top.set(r, c, xv_all.get(r, c));
        bot.set(r, c, xv_all.get(n + r, c));
      }
    xv = {top, bot};
  } else {
    v = {gf2::BitMatrix(n, N), gf2::BitMatrix(n, N)};
  }
  spec.gen["V1"] = v[0];
  spec.gen["V2"] = v[1];
  auto x1 = xu[0] ^ xv[0], x2 = xu[1] ^ xv[1];
  spec.gen["Y3"] = (gd * x1) ^ (gi * x2);
  spec.gen["Y4"] = (gd * x2) ^ (gi * x1);
  return spec;
}

Polytope virtual_constraints_sym(const LdmSymParams& p, const Rational& bp_ss, const Rational& bp_sd) {
  Polytope poly;
  poly.vars = {"R_W1", "R_U1", "R_V1", "R_V1p", "R_W2", "R_U2", "R_V2", "R_V2p"};
  AuxSpec spec = symmetric_aux(p.n_d, p.n_i);
  const std::vector<std::vector<std::string>> own_sets = {{"XU"},       {"XW", "XU"},        {"XVp", "XW", "XU"},
                                                          {"V"},        {"V", "XU"},         {"V", "XW", "XU"},
                                                          {"V", "XVp", "XW", "XU"}};
  const std::map<std::string, std::string> rate = {{"XVp", "R_V#p"}, {"XW", "R_W#"}, {"XU", "R_U#"}, {"V", "R_V#"}};
  for (int i = 1; i <= 2; ++i) {
    int j = 3 - i;
    std::string ti = std::to_string(i), tj = std::to_string(j);
    auto name = [&](const std::string& base, const std::string& tag) { return base + tag; };
    auto rname = [&](const std::string& base, const std::string& tag) {
      std::string r = rate.at(base);
      r.replace(r.find('#'), 1, tag);
      return r;
    };
    std::string y = i == 1 ? "Y3" : "Y4";
    for (bool with_w_other : {false, true}) {
      for (const auto& own : own_sets) {
        std::vector<std::string> targets, cond;
        std::map<std::string, Rational> terms;
        if (with_w_other) {
          targets.push_back(name("XW", tj));
          terms[rname("XW", tj)] += 1;
        }
        for (const auto& a : own) {
          targets.push_back(name(a, ti));
          terms[rname(a, ti)] += 1;
        }
        for (const std::string a : {"XVp", "XW", "XU", "V"})
          if (std::find(own.begin(), own.end(), a) == own.end()) cond.push_back(name(a, ti));
        if (!with_w_other) cond.push_back(name("XW", tj));
        cond.push_back(name("XVp", tj));
        poly.add(terms, ldm_mutual_info(spec, targets, y, cond));
      }
    }
  }
  for (int i = 1; i <= 2; ++i) {
    std::string t = std::to_string(i);
    poly.add({{"R_V" + t, 1}}, bp_ss);
    poly.add({{"R_V" + t + "p", 1}}, bp_sd);
  }
  return poly;
}

Polytope virtual_constraints_cog(const LdmCogParams& p, const Rational& bp_12) {
  Polytope poly;
  poly.vars = {"R_W1", "R_U1", "R_V1", "R_W2", "R_U2"};
  const int k = realizable_k(p);
  const int n1 = p.n1, n2 = p.n2, a1 = p.a1, a2 = p.a2;
  poly.add({{"R_W1", 1}, {"R_U1", 1}, {"R_V1", 1}, {"R_W2", 1}}, std::max(a1, n1));
  poly.add({{"R_U1", 1}, {"R_V1", 1}, {"R_W2", 1}}, std::max(a1, k));
  poly.add({{"R_W1", 1}, {"R_U1", 1}, {"R_V1", 1}}, std::max(n1, k));
  poly.add({{"R_W1", 1}, {"R_U1", 1}}, n1);
  poly.add({{"R_U1", 1}, {"R_W2", 1}}, std::max(n1 - a2, a1));
  poly.add({{"R_U1", 1}, {"R_V1", 1}}, k);
  poly.add({{"R_U1", 1}}, std::max(n1 - a2, 0));
  poly.add({{"R_V1", 1}}, bp_12);
  poly.add({{"R_W1", 1}, {"R_W2", 1}, {"R_U2", 1}}, std::max(a2, n2));
  poly.add({{"R_W1", 1}, {"R_U2", 1}}, std::max(n2 - a1, a2));
  poly.add({{"R_W2", 1}, {"R_U2", 1}}, n2);
  poly.add({{"R_U2", 1}}, std::max(n2 - a1, 0));
  return poly;
}

namespace {

void normalize(LinIneq& r) {
  Rational scale = 0;
  for (const auto& c : r.coef)
    if (abs(c) > scale) scale = abs(c);
  if (scale == 0) return;
  for (auto& c : r.coef) c /= scale;
  r.rhs /= scale;
}

LpResult<Rational> lp_max(const std::vector<LinIneq>& rows, const std::vector<Rational>& obj, int skip = -1) {
  std::vector<std::vector<Rational>> A;
  std::vector<Rational> b;
  for (int i = 0; i < static_cast<int>(rows.size()); ++i) {
    if (i == skip) continue;
    A.push_back(rows[i].coef);
    b.push_back(rows[i].rhs);
  }
  return simplex_max<Rational>(A, b, obj);
}

Polytope empty_like(const Polytope& p) {
  Polytope out;
  out.vars = p.vars;
  out.rows.push_back({std::vector<Rational>(p.vars.size(), 0), -1});
  return out;
}

}  // namespace

Polytope prune_redundant(const Polytope& p) {
  std::vector<LinIneq> rows;
  for (auto r : p.rows) {
    bool any_pos = false, all_zero = true;
    for (const auto& c : r.coef) {
      if (c > 0) any_pos = true;
      if (c != 0) all_zero = false;
    }
    if (all_zero) {
      if (r.rhs < 0) return empty_like(p);
      continue;
    }
    if (!any_pos && r.rhs >= 0) continue;  // implied by nonnegativity
    normalize(r);
    bool merged = false;
    for (auto& q : rows)
      if (q.coef == r.coef) {
        if (r.rhs < q.rhs) q.rhs = r.rhs;
        merged = true;
        break;
      }
    if (!merged) rows.push_back(std::move(r));
  }
  for (size_t i = 0; i < rows.size();) {
    auto res = lp_max(rows, rows[i].coef, static_cast<int>(i));
    if (res.status == LpStatus::Infeasible) return empty_like(p);
    if (res.status == LpStatus::Optimal && res.value <= rows[i].rhs) {
      rows.erase(rows.begin() + static_cast<long>(i));
    } else {
      ++i;
    }
  }
  if (!rows.empty()) {
    auto feas = lp_max(rows, std::vector<Rational>(p.vars.size(), 0));
    if (feas.status == LpStatus::Infeasible) return empty_like(p);
  }
  Polytope out;
  out.vars = p.vars;
  out.rows = std::move(rows);
  return out;
}

Polytope fourier_motzkin(const Polytope& p, const std::vector<std::string>& eliminate, const FmOptions& opt) {
  Polytope cur = p;
  for (const auto& name : eliminate) {
    const int k = cur.index_of(name);
    std::vector<LinIneq> pos, neg, keep;
    for (const auto& r : cur.rows) {
      if (r.coef[k] > 0)
        pos.push_back(r);
      else if (r.coef[k] < 0)
        neg.push_back(r);
      else
        keep.push_back(r);
    }
    LinIneq nonneg{std::vector<Rational>(cur.vars.size(), 0), 0};
    nonneg.coef[k] = -1;
    neg.push_back(nonneg);
    if (keep.size() + pos.size() * neg.size() > opt.guard)
      throw FmBlowup("Fourier-Motzkin inequality count exceeds guard " + std::to_string(opt.guard));
    for (const auto& a : pos)
      for (const auto& b : neg) {
        Rational fa = -b.coef[k], fb = a.coef[k];
        LinIneq r{std::vector<Rational>(cur.vars.size(), 0), fa * a.rhs + fb * b.rhs};
        for (size_t j = 0; j < r.coef.size(); ++j) r.coef[j] = fa * a.coef[j] + fb * b.coef[j];
        keep.push_back(std::move(r));
      }
    Polytope next;
    for (size_t j = 0; j < cur.vars.size(); ++j)
      if (static_cast<int>(j) != k) next.vars.push_back(cur.vars[j]);
    for (auto& r : keep) {
      r.coef.erase(r.coef.begin() + k);
      next.rows.push_back(std::move(r));
    }
    cur = prune_redundant(next);
  }
  return cur;
}

Rational max_weighted_rate(const Polytope& p, const std::map<std::string, Rational>& weights) {
  std::vector<Rational> obj(p.vars.size(), 0);
  for (const auto& [name, w] : weights) obj[p.index_of(name)] += w;
  auto res = lp_max(p.rows, obj);
  if (res.status == LpStatus::Unbounded) throw Unbounded("weighted rate is unbounded on this polytope");
  if (res.status == LpStatus::Infeasible) throw Infeasible("polytope is empty");
  return res.value;
}

bool same_polytope(const Polytope& a, const Polytope& b) {
  if (a.vars.size() != b.vars.size()) return false;
  std::vector<int> perm(b.vars.size());
  for (size_t j = 0; j < b.vars.size(); ++j) perm[j] = a.index_of(b.vars[j]);
  std::vector<LinIneq> brows;
  for (const auto& r : b.rows) {
    LinIneq q{std::vector<Rational>(a.vars.size(), 0), r.rhs};
    for (size_t j = 0; j < r.coef.size(); ++j) q.coef[perm[j]] = r.coef[j];
    brows.push_back(std::move(q));
  }
  auto implied = [](const std::vector<LinIneq>& sys, const LinIneq& r) {
    auto res = lp_max(sys, r.coef);
    if (res.status == LpStatus::Infeasible) return true;
    return res.status == LpStatus::Optimal && res.value <= r.rhs;
  };
  auto feasible = [](const std::vector<LinIneq>& sys, size_t n) {
    return lp_max(sys, std::vector<Rational>(n, 0)).status != LpStatus::Infeasible;
  };
  bool fa = feasible(a.rows, a.vars.size()), fb = feasible(brows, a.vars.size());
  if (fa != fb) return false;
  if (!fa) return true;
  for (const auto& r : a.rows)
    if (!implied(brows, r)) return false;
  for (const auto& r : brows)
    if (!implied(a.rows, r)) return false;
  return true;
}

Rational closed_form_sum_virtual(int n_d, int n_i, const Rational& bp_ss, const Rational& bp_sd) {
  if (n_d == n_i) throw std::invalid_argument("closed-form virtual sum rate needs n_d != n_i");
  if (n_i < n_d) {
    if (bp_sd != 0) throw std::invalid_argument("closed-form virtual sum rate for n_i < n_d needs bp_sd = 0");
    Rational a = n_d, b = Rational(n_d) - ratio(n_i, 2) + bp_ss / 2, c = std::max(n_i, n_d - n_i) + bp_ss;
    return 2 * rmin(a, rmin(b, c));
  }
  Rational a = n_d + bp_ss, b = (n_i + bp_ss + bp_sd) / 2, c = n_i;
  return 2 * rmin(a, rmin(b, c));
}

Rational fm_sum_rate_sym(const LdmSymParams& p, const Rational& bp_ss, const Rational& bp_sd, const FmOptions& opt) {
  Polytope poly = virtual_constraints_sym(p, bp_ss, bp_sd);
  for (const std::string base : {"R_W", "R_U", "R_V"}) poly = poly.substitute(base + "2", {{base + "1", 1}}, 0);
  poly = poly.substitute("R_V2p", {{"R_V1p", 1}}, 0);
  poly = poly.with_sum_variable("R1", {{"R_W1", 1}, {"R_U1", 1}, {"R_V1", 1}, {"R_V1p", 1}});
  auto proj = fourier_motzkin(poly, {"R_W1", "R_U1", "R_V1", "R_V1p"}, opt);
  return 2 * max_weighted_rate(proj, {{"R1", 1}});
}

Rational fm_cog_rate(const LdmCogParams& p, const Rational& bp_12, const FmOptions& opt) {
  Polytope poly = virtual_constraints_cog(p, bp_12);
  poly = poly.substitute("R_W1", {{"R_U1", -1}, {"R_V1", -1}}, p.n1);
  poly = poly.with_sum_variable("R2", {{"R_W2", 1}, {"R_U2", 1}});
  auto proj = fourier_motzkin(poly, {"R_U1", "R_V1", "R_W2", "R_U2"}, opt);
  return max_weighted_rate(proj, {{"R2", 1}});
}

std::array<int, 4> cog_v(const LdmCogParams& p) {
  auto pos = [](int x) { return std::max(x, 0); };
  return {p.n2, std::max(p.n2, p.a2) - std::min(p.a2, p.n1), pos(p.a1 - p.n1) + pos(p.n2 - p.a1),
          pos(p.a1 - p.n1) - std::min(p.a2, p.n1) + std::max(p.n2 - p.a1, p.a2)};
}

}  // namespace hdcoop
