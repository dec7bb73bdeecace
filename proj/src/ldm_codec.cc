#include "hdcoop/ldm_codec.hpp"

#include <algorithm>
#include <mutex>
#include <ostream>

#include "hdcoop/rate_region.hpp"

namespace hdcoop {

using gf2::BitMatrix;
using gf2::BitVector;

namespace {

int width_of(const LdmSymParams& p) { return std::max(p.n_d, p.n_i); }

BitVector shift_down(const BitVector& x, int k) {
  BitVector y(x.size(), 0);
  for (size_t j = 0; j + k < x.size(); ++j) y[j + k] = x[j];
  return y;
}

// Image of an input-space vector at a receiver with gain exponent g.
BitVector seen(const BitVector& x, int n, int g) { return shift_down(x, n - g); }

BitVector combine(const std::vector<BitVector>& gens, const BitVector& bits, int n) {
  if (gens.size() != bits.size()) throw std::invalid_argument("message length does not match allocation");
  BitVector acc(n, 0);
  for (size_t k = 0; k < gens.size(); ++k)
    if (bits[k]) gf2::xor_into(acc, gens[k]);
  return acc;
}

BitMatrix zf_inverse(const LdmSymParams& p) {
  int n = width_of(p);
  if (p.n_d == p.n_i) throw SingularChannel("zero forcing needs n_d != n_i");
  auto gd = gf2::shift_matrix(n, n - p.n_d), gi = gf2::shift_matrix(n, n - p.n_i);
  auto inv = gf2::inverse(gd.hstack(gi).vstack(gi.hstack(gd)));
  if (!inv) throw SingularChannel("block channel matrix is singular");
  return *inv;
}

struct DestSystem {
  BitMatrix m;
  int n_own = 0, n_int = 0;
  int w_o = 0;  // leading interference columns that belong to the other source's public message
};

DestSystem dest_system(const LdmSymParams& p, const SlotCode& code, int dest) {
  int n = code.n, o = 1 - dest;
  std::vector<BitVector> cols;
  const auto& own = code.src[dest];
  for (const auto* group : {&own.w, &own.u, &own.vp})
    for (const auto& g : *group) cols.push_back(seen(g, n, p.n_d));
  for (const auto& t : own.v) cols.push_back(t);
  int n_own = static_cast<int>(cols.size());
  for (const auto& g : code.src[o].w) cols.push_back(seen(g, n, p.n_i));
  for (const auto& g : code.src[o].u) cols.push_back(seen(g, n, p.n_i));
  DestSystem s;
  s.m = BitMatrix::from_columns(n, cols);
  s.n_own = n_own;
  s.n_int = static_cast<int>(cols.size()) - n_own;
  s.w_o = static_cast<int>(code.src[o].w.size());
  return s;
}

bool dest_ok(const DestSystem& s) {
  int ri = gf2::rank(s.m.columns(s.n_own, s.n_int));
  return gf2::rank(s.m) == s.n_own + ri;
}

BitVector random_bits(int k, std::mt19937_64& rng) {
  BitVector b(k);
  for (auto& x : b) x = static_cast<std::uint8_t>(rng() & 1u);
  return b;
}

BitVector random_masked(int n, int lo, int hi, std::mt19937_64& rng) {
  BitVector b(n, 0);
  for (int j = lo; j < hi; ++j) b[j] = static_cast<std::uint8_t>(rng() & 1u);
  return b;
}

BitVector unit(int n, int j) {
  BitVector b(n, 0);
  b[j] = 1;
  return b;
}

}  // namespace

std::pair<BitVector, BitVector> zero_forcing_precode_sym(const LdmSymParams& p, const BitVector& v1,
                                                         const BitVector& v2) {
  int n = width_of(p);
  if (static_cast<int>(v1.size()) != n || static_cast<int>(v2.size()) != n)
    throw std::invalid_argument("zero forcing: target width mismatch");
  auto inv = zf_inverse(p);
  BitVector t = v1;
  t.insert(t.end(), v2.begin(), v2.end());
  auto x = inv.apply(t);
  return {BitVector(x.begin(), x.begin() + n), BitVector(x.begin() + n, x.end())};
}

namespace {

struct CogBlocks {
  int m;
  BitMatrix g3, g4;
};

CogBlocks cog_blocks(const LdmCogParams& p) {
  int m = std::max({p.n1, p.n2, p.a1, p.a2});
  auto s = [&](int g) { return gf2::shift_matrix(m, m - g); };
  return {m, s(p.n1).hstack(s(p.a1)), s(p.a2).hstack(s(p.n2))};
}

}  // namespace

int realizable_k(const LdmCogParams& p) {
  if (p.n1 + p.n2 != p.a1 + p.a2)
    return std::max({0, p.n1 - std::max(p.a2 - p.n2, 0), p.a1 - std::max(p.n2 - p.a2, 0)});
  // Aligned exponents: the closed form overstates; compute the reachable subspace directly.
  auto b = cog_blocks(p);
  std::vector<BitVector> reach;
  for (const auto& z : gf2::kernel(b.g4)) reach.push_back(b.g3.apply(z));
  int base = gf2::rank(BitMatrix::from_columns(b.m, reach));
  int k = 0;
  while (k < b.m) {
    reach.push_back(unit(b.m, b.m - 1 - k));
    if (gf2::rank(BitMatrix::from_columns(b.m, reach)) != base) break;
    ++k;
  }
  return k;
}

std::pair<BitVector, BitVector> zero_forcing_precode_cog(const LdmCogParams& p, const BitVector& v1) {
  auto b = cog_blocks(p);
  if (static_cast<int>(v1.size()) != b.m) throw std::invalid_argument("zero forcing: target width mismatch");
  BitVector rhs = v1;
  rhs.resize(2 * b.m, 0);
  auto x = gf2::solve(b.g3.vstack(b.g4), rhs);
  if (!x) throw InfeasibleAllocation("cooperative private vector is not realizable with cancellation");
  return {BitVector(x->begin(), x->begin() + b.m), BitVector(x->begin() + b.m, x->end())};
}

bool decodable(const LdmSymParams& p, const SlotCode& code) {
  return dest_ok(dest_system(p, code, 0)) && dest_ok(dest_system(p, code, 1));
}

std::optional<SlotCode> layout_code(const LdmSymParams& p, const SlotPair& counts) {
  const int n = width_of(p), nd = p.n_d, ni = p.n_i;
  SlotCode code;
  code.n = n;
  for (int i = 0; i < 2; ++i) {
    const auto& c = counts[i];
    if (c.w < 0 || c.u < 0 || c.v < 0 || c.vp < 0) return std::nullopt;
    if (c.v > 0 && nd == ni) return std::nullopt;
    if (c.w + c.vp > nd || c.u > std::max(nd - ni, 0) || nd - c.u < c.w + c.vp) return std::nullopt;
    auto& s = code.src[i];
    for (int j = 0; j < c.w; ++j) s.w.push_back(unit(n, j));
    for (int j = 0; j < c.vp; ++j) s.vp.push_back(unit(n, c.w + j));
    for (int j = 0; j < c.u; ++j) s.u.push_back(unit(n, nd - 1 - j));
  }
  for (int d = 0; d < 2; ++d) {
    std::vector<bool> used(n, false);
    auto mark = [&](const std::vector<BitVector>& gens, int g) {
      for (const auto& x : gens) {
        auto y = seen(x, n, g);
        for (int j = 0; j < n; ++j)
          if (y[j]) used[j] = true;
      }
    };
    mark(code.src[d].w, nd);
    mark(code.src[d].u, nd);
    mark(code.src[d].vp, nd);
    mark(code.src[1 - d].w, ni);
    mark(code.src[1 - d].u, ni);
    for (int j = n - 1; j >= 0 && static_cast<int>(code.src[d].v.size()) < counts[d].v; --j)
      if (!used[j]) code.src[d].v.push_back(unit(n, j));
    if (static_cast<int>(code.src[d].v.size()) < counts[d].v) return std::nullopt;
  }
  if (!decodable(p, code)) return std::nullopt;
  return code;
}

SlotCode layout_code(const LdmSymParams& p, const MessageAllocation& alloc, int slot) {
  if (slot < 0 || slot >= static_cast<int>(alloc.pattern.size()))
    throw std::invalid_argument("slot index outside the allocation pattern");
  auto c = layout_code(p, alloc.pattern[slot]);
  if (!c) throw InfeasibleAllocation("allocation does not fit the level layout");
  return *c;
}

std::optional<SlotCode> design_slot_code(const LdmSymParams& p, const SlotPair& counts, int tries) {
  if (counts[1] < counts[0]) {
    auto c = design_slot_code(p, {counts[1], counts[0]}, tries);
    if (!c) return std::nullopt;
    return c->swapped();
  }
  if (auto c = layout_code(p, counts)) return c;
  const int n = width_of(p), nd = p.n_d, ni = p.n_i;
  for (const auto& c : counts) {
    if (c.v > 0 && nd == ni) return std::nullopt;
    if ((c.w > 0 || c.vp > 0) && nd == 0) return std::nullopt;
    if (c.u > 0 && nd <= ni) return std::nullopt;
  }
  std::uint64_t seed = 0x9e3779b97f4a7c15ULL ^ (static_cast<std::uint64_t>(nd) << 8) ^ static_cast<std::uint64_t>(ni);
  for (const auto& c : counts)
    for (int x : {c.w, c.u, c.v, c.vp}) seed = seed * 1000003ULL + static_cast<std::uint64_t>(x);
  std::mt19937_64 rng(seed);
  for (int t = 0; t < tries; ++t) {
    SlotCode code;
    code.n = n;
    for (int i = 0; i < 2; ++i) {
      auto& s = code.src[i];
      for (int k = 0; k < counts[i].w; ++k) s.w.push_back(random_masked(n, 0, nd, rng));
      for (int k = 0; k < counts[i].u; ++k) s.u.push_back(random_masked(n, ni, nd, rng));
      for (int k = 0; k < counts[i].vp; ++k) s.vp.push_back(random_masked(n, 0, nd, rng));
      for (int k = 0; k < counts[i].v; ++k) s.v.push_back(random_masked(n, 0, n, rng));
    }
    if (decodable(p, code)) return code;
  }
  return std::nullopt;
}

SlotMessages random_messages(const SlotCode& code, std::mt19937_64& rng) {
  SlotMessages m;
  for (int i = 0; i < 2; ++i) {
    auto c = code.src[i].counts();
    m[i] = {random_bits(c.w, rng), random_bits(c.u, rng), random_bits(c.v, rng), random_bits(c.vp, rng)};
  }
  return m;
}

BitVector encode_source(const LdmSymParams& p, const SlotCode& code, int source, const SourceMessage& own,
                        const BitVector& other_v) {
  const int n = code.n, o = 1 - source;
  const auto& s = code.src[source];
  BitVector x = combine(s.w, own.w, n);
  gf2::xor_into(x, combine(s.u, own.u, n));
  gf2::xor_into(x, combine(s.vp, own.vp, n));
  if (!s.v.empty() || !code.src[o].v.empty()) {
    BitVector t_own = combine(s.v, own.v, n), t_other = combine(code.src[o].v, other_v, n);
    auto xv = source == 0 ? zero_forcing_precode_sym(p, t_own, t_other) : zero_forcing_precode_sym(p, t_other, t_own);
    gf2::xor_into(x, source == 0 ? xv.first : xv.second);
  }
  return x;
}

std::pair<BitVector, BitVector> encode_virtual_sym(const LdmSymParams& p, const SlotCode& code,
                                                   const SlotMessages& m) {
  return {encode_source(p, code, 0, m[0], m[1].v), encode_source(p, code, 1, m[1], m[0].v)};
}

std::optional<Decoded> decode_virtual(const LdmSymParams& p, const SlotCode& code, int dest,
                                      const BitVector& received, const BitVector& other_vp) {
  const int n = code.n, o = 1 - dest;
  if (static_cast<int>(received.size()) != n) throw std::invalid_argument("received width mismatch");
  BitVector y = received;
  gf2::xor_into(y, seen(combine(code.src[o].vp, other_vp, n), n, p.n_i));
  auto sys = dest_system(p, code, dest);
  if (!dest_ok(sys)) return std::nullopt;
  auto z = gf2::solve(sys.m, y);
  if (!z) return std::nullopt;
  auto c = code.src[dest].counts();
  Decoded d;
  int at = 0;
  auto take = [&](int k) {
    BitVector b(z->begin() + at, z->begin() + at + k);
    at += k;
    return b;
  };
  d.own.w = take(c.w);
  d.own.u = take(c.u);
  d.own.vp = take(c.vp);
  d.own.v = take(c.v);
  BitVector w_other = take(sys.w_o);
  bool unique_w = true;
  for (const auto& k : gf2::kernel(sys.m))
    for (int j = 0; j < sys.w_o; ++j)
      if (k[sys.n_own + j]) unique_w = false;
  if (unique_w) d.other_w = w_other;
  return d;
}

std::optional<Ambiguity> find_ambiguity(const LdmSymParams& p, const SlotCode& code, std::uint64_t seed,
                                        bool with_other_public) {
  std::mt19937_64 rng(seed);
  for (int dest = 0; dest < 2; ++dest) {
    auto sys = dest_system(p, code, dest);
    for (const auto& z : gf2::kernel(sys.m)) {
      bool own_part = false;
      for (int j = 0; j < sys.n_own + (with_other_public ? sys.w_o : 0); ++j)
        if (z[j]) own_part = true;
      if (!own_part) continue;
      Ambiguity amb;
      amb.dest = dest;
      amb.a = random_messages(code, rng);
      amb.b = amb.a;
      auto& own = amb.b[dest];
      auto& other = amb.b[1 - dest];
      int at = 0;
      for (auto* field : {&own.w, &own.u, &own.vp, &own.v, &other.w, &other.u})
        for (auto& bit : *field) bit ^= z[at++];
      auto xa = encode_virtual_sym(p, code, amb.a), xb = encode_virtual_sym(p, code, amb.b);
      auto map = transfer(p, Mode::A);
      auto ya = apply_channel(map, xa.first, xa.second), yb = apply_channel(map, xb.first, xb.second);
      bool differs = !(amb.a[dest] == amb.b[dest]) || (with_other_public && amb.a[1 - dest].w != amb.b[1 - dest].w);
      if (ya[2 + dest] == yb[2 + dest] && differs && amb.a[1 - dest].vp == amb.b[1 - dest].vp)
        return amb;
    }
  }
  return std::nullopt;
}

std::vector<SlotPair> feasible_slot_tuples(int n_d, int n_i) {
  const int n = std::max(n_d, n_i), s = std::max(n_d - n_i, 0), vmax = n_d != n_i ? n : 0;
  Polytope poly = virtual_constraints_sym({n_d, n_i, 0}, n, n);
  std::vector<std::pair<std::vector<int>, int>> rows;
  for (const auto& r : poly.rows) {
    std::vector<int> c;
    for (const auto& q : r.coef) c.push_back(static_cast<int>(q.get_num().get_si()));
    rows.push_back({c, static_cast<int>(r.rhs.get_num().get_si())});
  }
  std::vector<SlotPair> out;
  int t[8];
  const int hi[8] = {n, s, vmax, n, n, s, vmax, n};
  auto ok = [&]() {
    for (const auto& [c, b] : rows) {
      int acc = 0;
      for (int j = 0; j < 8; ++j) acc += c[j] * t[j];
      if (acc > b) return false;
    }
    return true;
  };
  for (t[0] = 0; t[0] <= hi[0]; ++t[0])
    for (t[1] = 0; t[1] <= hi[1]; ++t[1])
      for (t[2] = 0; t[2] <= hi[2]; ++t[2])
        for (t[3] = 0; t[3] <= hi[3]; ++t[3]) {
          if (t[0] + t[1] + t[3] > n_d) continue;
          for (t[4] = 0; t[4] <= hi[4]; ++t[4])
            for (t[5] = 0; t[5] <= hi[5]; ++t[5])
              for (t[6] = 0; t[6] <= hi[6]; ++t[6])
                for (t[7] = 0; t[7] <= hi[7]; ++t[7]) {
                  if (t[4] + t[5] + t[7] > n_d) continue;
                  if (ok()) out.push_back({SlotCounts{t[0], t[1], t[2], t[3]}, SlotCounts{t[4], t[5], t[6], t[7]}});
                }
        }
  return out;
}

const SlotMenu& slot_menu(int n_d, int n_i) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, SlotMenu> cache;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find({n_d, n_i});
    if (it != cache.end()) return it->second;
  }
  LdmSymParams p{n_d, n_i, 0};
  auto tuples = feasible_slot_tuples(n_d, n_i);
  std::stable_sort(tuples.begin(), tuples.end(), [](const SlotPair& a, const SlotPair& b) {
    return a[0].total() + a[1].total() > b[0].total() + b[1].total();
  });
  SlotMenu menu;
  menu.n_d = n_d;
  menu.n_i = n_i;
  std::map<std::pair<int, int>, int> best_possible;
  for (const auto& t : tuples) {
    std::pair<int, int> key{t[0].v + t[1].v, t[0].vp + t[1].vp};
    if (menu.best.count(key)) continue;
    if (auto code = design_slot_code(p, t)) menu.best[key] = {t, t[0].total() + t[1].total(), *code};
  }
  // drop entries dominated by a cheaper key
  for (auto it = menu.best.begin(); it != menu.best.end();) {
    bool dominated = false;
    for (const auto& [k, e] : menu.best)
      if (k != it->first && k.first <= it->first.first && k.second <= it->first.second && e.sum >= it->second.sum)
        dominated = true;
    it = dominated ? menu.best.erase(it) : std::next(it);
  }
  std::lock_guard<std::mutex> lock(mu);
  return cache.emplace(std::make_pair(n_d, n_i), std::move(menu)).first->second;
}

std::optional<VirtualPlan> plan_virtual(int n_d, int n_i, long l_a, long v_budget, long vp_budget) {
  if (l_a < 0 || l_a % 2) throw std::invalid_argument("mode-A slot count must be even");
  VirtualPlan plan;
  if (l_a == 0) return plan;
  const auto& menu = slot_menu(n_d, n_i);
  std::vector<const MenuEntry*> entries;
  for (const auto& [k, e] : menu.best) entries.push_back(&e);
  if (entries.empty()) return std::nullopt;
  const long pairs = l_a / 2;
  using State = std::pair<long, long>;
  struct Cell {
    long sum;
    State prev;
    int entry;
  };
  std::vector<std::map<State, Cell>> layer(pairs + 1);
  layer[0][{0, 0}] = {0, {0, 0}, -1};
  for (long t = 0; t < pairs; ++t) {
    for (const auto& [st, cell] : layer[t]) {
      for (int e = 0; e < static_cast<int>(entries.size()); ++e) {
        const auto& c = entries[e]->counts;
        long v = st.first + c[0].v + c[1].v, vp = st.second + c[0].vp + c[1].vp;
        if (v > v_budget || vp > vp_budget) continue;
        long s = cell.sum + 2L * entries[e]->sum;
        auto it = layer[t + 1].find({v, vp});
        if (it == layer[t + 1].end() || it->second.sum < s) layer[t + 1][{v, vp}] = {s, st, e};
      }
    }
  }
  if (layer[pairs].empty()) return std::nullopt;
  auto best = std::max_element(layer[pairs].begin(), layer[pairs].end(),
                               [](const auto& a, const auto& b) { return a.second.sum < b.second.sum; });
  plan.total_bits = best->second.sum;
  State st = best->first;
  std::vector<int> chosen;
  for (long t = pairs; t > 0; --t) {
    const auto& cell = layer[t].at(st);
    chosen.push_back(cell.entry);
    st = cell.prev;
  }
  std::reverse(chosen.begin(), chosen.end());
  for (int e : chosen) {
    const auto& c = entries[e]->counts;
    plan.pattern.push_back(c);
    plan.pattern.push_back({c[1], c[0]});
  }
  return plan;
}

RegionAllocation region_allocation(const LdmSymParams& p, const ExtRational& delta) {
  const int nd = p.n_d, ni = p.n_i, nc = p.n_c;
  RegionAllocation a;
  if (nd == ni || nc <= nd || delta.infinite) {
    a.label = "no-cooperation";
    return a;
  }
  a.cooperative = true;
  const Rational& d = delta.value;
  if (d == 0) {
    a.label = "listen-and-relay-only";
    if (ni < nd)
      a.delta_r = 0;
    else if (ni <= nc)
      a.delta_r = rmin(ratio(nc - nd, 2), Rational(ni - nd));
    else
      a.delta_r = rmin(Rational(nc - nd), ratio(ni - nd, 2));
    return a;
  }
  if (ni < nd) {
    a.label = "weak/pipe";
    a.bp_ss = Rational(nc - nd) / d;
  } else if (ni <= nc) {
    if (Rational(nc - nd) <= d * ni) {
      a.label = "strong-coop/pipe";
      a.bp_ss = Rational(nc - nd) / d;
    } else {
      a.label = "strong-coop/pipe+relay";
      a.bp_ss = ni;
      a.delta_r = rmin((Rational(nc - nd) - d * ni) / 2, Rational(ni - nd));
    }
  } else {
    if (Rational(ni - nd) <= d * ni || Rational(nc - nd) <= d * (ni - nd)) {
      a.label = "strong-int/pipes";
      a.bp_ss = Rational(nc - nd) / d;
      a.bp_sd = Rational(ni - nc) / d;
    } else {
      a.label = "strong-int/pipes+relay";
      a.bp_ss = ni - nd;
      a.bp_sd = nd;
      a.delta_r = rmin(Rational(nc - nd) - d * (ni - nd), (Rational(ni - nd) - d * ni) / 2);
    }
  }
  for (auto* q : {&a.bp_ss, &a.bp_sd, &a.delta_r}) q->canonicalize();
  return a;
}

bool mode_b_feasible(const LdmSymParams& p, const ExtRational& delta, const Rational& bp_ss, const Rational& bp_sd,
                     const Rational& delta_r) {
  if (bp_ss < 0 || bp_sd < 0 || delta_r < 0) return false;
  if (delta.infinite) return bp_ss == 0 && bp_sd == 0 && delta_r == 0;
  const Rational& d = delta.value;
  Rational to_src = d * bp_ss + delta_r, to_dst = d * bp_sd + delta_r;
  return to_src <= std::max(p.n_c - p.n_d, 0) && to_dst <= std::max(p.n_i - p.n_d, 0) &&
         to_src + to_dst <= std::max(std::max(p.n_i, p.n_c) - p.n_d, 0);
}

Rational allocation_sum_rate(const LdmSymParams& p, const ExtRational& delta, const RegionAllocation& a) {
  Rational ifc = p.n_d == p.n_i ? Rational(p.n_d) : closed_form_sum_virtual(p.n_d, p.n_i, 0, 0);
  if (delta.infinite) return ifc;
  if (!a.cooperative) {
    // pure listening slots carry only direct data when cooperation is off
    Rational rv = ifc;
    return (delta.value * rv + 2 * p.n_d) / (2 + delta.value);
  }
  Rational rv = delta.value == 0 ? Rational(0) : closed_form_sum_virtual(p.n_d, p.n_i, a.bp_ss, a.bp_sd);
  Rational r = (delta.value * rv + 2 * p.n_d + 2 * a.delta_r) / (2 + delta.value);
  r.canonicalize();
  return r;
}

std::optional<HalfDuplexPlan> plan_halfduplex(const LdmSymParams& p, const ExtRational& delta,
                                              const RegionAllocation& a) {
  if (!mode_b_feasible(p, delta, a.bp_ss, a.bp_sd, a.delta_r)) return std::nullopt;
  auto finish = [&](long l_a, long l_b, const VirtualPlan& vp) {
    HalfDuplexPlan h;
    h.schedule = delta.infinite ? Schedule::symmetric(delta, l_a, 0) : Schedule::symmetric(delta, l_a, l_b);
    h.alloc.pattern = vp.pattern;
    h.alloc.bp_ss = a.bp_ss;
    h.alloc.bp_sd = a.bp_sd;
    h.alloc.delta_r = a.delta_r;
    h.alloc.r_1b = l_b > 0 ? p.n_d : 0;
    h.alloc.r_2c = h.alloc.r_1b;
    return h;
  };
  if (delta.infinite) {
    auto vp = plan_virtual(p.n_d, p.n_i, 2, 0, 0);
    if (!vp) return std::nullopt;
    return finish(2, 0, *vp);
  }
  const Rational& d = delta.value;
  if (d == 0) {
    long l_b = a.delta_r.get_den().get_si();
    return finish(0, l_b, VirtualPlan{});
  }
  Rational target = closed_form_sum_virtual(p.n_d, p.n_i, a.bp_ss, a.bp_sd);
  for (long mult = 1; mult <= 8; ++mult) {
    long l_a = 2 * d.get_num().get_si() * mult, l_b = 2 * d.get_den().get_si() * mult;
    Rational vb = l_a * a.bp_ss, pb = l_a * a.bp_sd, rb = l_b * a.delta_r, tb = l_a * target;
    if (vb.get_den() != 1 || pb.get_den() != 1 || rb.get_den() != 1 || tb.get_den() != 1) continue;
    auto vp = plan_virtual(p.n_d, p.n_i, l_a, vb.get_num().get_si(), pb.get_num().get_si());
    if (vp && vp->total_bits == tb.get_num().get_si()) return finish(l_a, l_b, *vp);
  }
  return std::nullopt;
}

namespace {

struct Band {
  int a = 0, b = 0;
};

// Per-slot split of two listening-phase streams over the band below the direct-data levels.
std::vector<Band> spread(long total_a, long total_b, long l_b, int cap_a, int cap_b, int cap_tot) {
  std::vector<Band> out(l_b);
  if (l_b == 0) {
    if (total_a || total_b) throw InfeasibleAllocation("listening-phase bits without listening slots");
    return out;
  }
  long rem_b = total_b;
  for (long k = 0; k < l_b; ++k) {
    out[k].a = static_cast<int>(total_a / l_b + (k < total_a % l_b ? 1 : 0));
    if (out[k].a > cap_a || out[k].a > cap_tot) throw InfeasibleAllocation("listening-phase link overloaded");
    long b = std::min<long>({cap_b, cap_tot - out[k].a, rem_b});
    out[k].b = static_cast<int>(b);
    rem_b -= b;
  }
  if (rem_b > 0) throw InfeasibleAllocation("listening-phase band cannot carry the pre-shared stream");
  return out;
}

class Stream {
 public:
  void append(const BitVector& b) { bits_.insert(bits_.end(), b.begin(), b.end()); }
  BitVector take(size_t k) {
    if (pos_ + k > bits_.size()) throw std::logic_error("stream underrun");
    BitVector out(bits_.begin() + static_cast<long>(pos_), bits_.begin() + static_cast<long>(pos_ + k));
    pos_ += k;
    return out;
  }
  const BitVector& all() const { return bits_; }

 private:
  BitVector bits_;
  size_t pos_ = 0;
};

void trace_line(std::ostream* os, long slot, Mode m, int node, const BitVector& y) {
  if (os) *os << slot << ' ' << mode_char(m) << ' ' << node << ' ' << gf2::to_hex(y) << '\n';
}

}  // namespace

SimResult run_halfduplex_sim(const LdmSymParams& p, const Schedule& sched, const MessageAllocation& alloc,
                             long num_blocks, const SimOptions& opt) {
  if (num_blocks <= 0) throw std::invalid_argument("num_blocks must be positive");
  const long l_a = sched.l_a, l_b = sched.l_b;
  if (sched.l_c != l_b) throw std::invalid_argument("symmetric schedule needs L_B = L_C");
  if (static_cast<long>(alloc.pattern.size()) != l_a)
    throw std::invalid_argument("allocation pattern length must equal L_A");
  if (!mode_b_feasible(p, sched.delta, alloc.bp_ss, alloc.bp_sd, alloc.delta_r))
    throw InfeasibleAllocation("listening-phase constraints violated");
  Rational relay_q = l_b * alloc.delta_r;
  if (relay_q.get_den() != 1) throw InfeasibleAllocation("relay load per block is not integral");
  const long relay = relay_q.get_num().get_si();
  std::array<long, 2> v_tot{0, 0}, vp_tot{0, 0};
  long pattern_bits = 0;
  for (const auto& sp : alloc.pattern)
    for (int i = 0; i < 2; ++i) {
      v_tot[i] += sp[i].v;
      vp_tot[i] += sp[i].vp;
      pattern_bits += sp[i].total();
    }
  for (int i = 0; i < 2; ++i)
    if (Rational(v_tot[i]) > l_a * alloc.bp_ss || Rational(vp_tot[i]) > l_a * alloc.bp_sd)
      throw InfeasibleAllocation("pattern exceeds the bit-pipe budget");
  const int direct = l_b > 0 ? p.n_d : 0;
  if (l_b > 0 && (alloc.r_1b != direct || alloc.r_2c != direct))
    throw InfeasibleAllocation("direct listening-phase rate must equal n_d");

  std::map<SlotPair, SlotCode> codes;
  std::vector<const SlotCode*> slot_code(l_a);
  for (long t = 0; t < l_a; ++t) {
    const auto& c = alloc.pattern[t];
    auto it = codes.find(c);
    if (it == codes.end()) {
      auto code = design_slot_code(p, c);
      if (!code) throw InfeasibleAllocation("no decodable slot code for a pattern entry");
      it = codes.emplace(c, *code).first;
    }
    slot_code[t] = &it->second;
  }

  const int m = std::max({p.n_d, p.n_i, p.n_c});
  const int cap_src = std::max(p.n_c - p.n_d, 0), cap_dst = std::max(p.n_i - p.n_d, 0);
  const int cap_tot = std::max(std::max(p.n_i, p.n_c) - p.n_d, 0);
  const bool src_first = p.n_c <= p.n_i;
  std::array<std::vector<Band>, 2> band;
  if (l_b > 0)
    for (int i = 0; i < 2; ++i) band[i] = spread(v_tot[i] + relay, vp_tot[i] + relay, l_b, cap_src, cap_dst, cap_tot);
  const auto map_a = transfer(p, Mode::A);
  const std::array<TransferMap, 2> map_bc = {transfer(p, Mode::B), transfer(p, Mode::C)};

  std::mt19937_64 rng(opt.seed);
  SimResult res;
  res.blocks = num_blocks;
  std::array<long, 2> delivered{0, 0};
  std::array<BitVector, 2> relay_truth_prev, relay_held_prev;  // user i bits, and the other source's copy
  long slot = 0;

  for (long blk = 0; blk < num_blocks; ++blk) {
    std::array<BitVector, 2> v_bits, vp_bits, relay_new;
    std::array<BitVector, 2> v_known_by_other, vp_known_at_other_dest, relay_held, relay_at_dest;
    for (int i = 0; i < 2; ++i) {
      v_bits[i] = random_bits(static_cast<int>(v_tot[i]), rng);
      vp_bits[i] = random_bits(static_cast<int>(vp_tot[i]), rng);
      relay_new[i] = random_bits(blk + 1 < num_blocks ? static_cast<int>(relay) : 0, rng);
    }
    // listening phases: B (source 1 talks), then C (source 2 talks)
    for (int s = 0; s < 2 && l_b > 0; ++s) {
      const int o = 1 - s;
      const Mode mode = s == 0 ? Mode::B : Mode::C;
      Stream to_src, to_dst;
      to_src.append(v_bits[s]);
      to_src.append(relay_new[s]);
      to_dst.append(vp_bits[s]);
      to_dst.append(relay_held_prev[o]);
      // idle relay capacity in the first and last blocks is zero-filled
      to_src.append(BitVector(v_tot[s] + relay - to_src.all().size(), 0));
      to_dst.append(BitVector(vp_tot[s] + relay - to_dst.all().size(), 0));
      Stream got_src, got_dst;
      for (long k = 0; k < l_b; ++k, ++slot) {
        BitVector x(m, 0);
        BitVector d = random_bits(direct, rng);
        for (int j = 0; j < direct; ++j) x[j] = d[j];
        const int a = band[s][k].a, b = band[s][k].b;
        BitVector sa = to_src.take(a), sb = to_dst.take(b);
        int at_src = src_first ? p.n_d : p.n_d + b, at_dst = src_first ? p.n_d + a : p.n_d;
        for (int j = 0; j < a; ++j) x[at_src + j] = sa[j];
        for (int j = 0; j < b; ++j) x[at_dst + j] = sb[j];
        BitVector zero(m, 0);
        auto y = s == 0 ? apply_channel(map_bc[s], x, zero) : apply_channel(map_bc[s], zero, x);
        const int listener = o, own_dest = 2 + s, other_dest = 2 + o;
        trace_line(opt.trace, slot, mode, listener + 1, y[listener]);
        trace_line(opt.trace, slot, mode, own_dest + 1, y[own_dest]);
        trace_line(opt.trace, slot, mode, other_dest + 1, y[other_dest]);
        auto read = [&](const BitVector& yy, int gain, int level, int count) {
          BitVector out(count);
          for (int j = 0; j < count; ++j) {
            int lv = level + j;
            out[j] = lv < gain ? yy[lv + m - gain] : 0;
          }
          return out;
        };
        BitVector dd = read(y[own_dest], p.n_d, 0, direct);
        ++res.messages;
        if (dd == d)
          delivered[s] += direct;
        else
          ++res.errors;
        got_src.append(read(y[listener], p.n_c, at_src, a));
        got_dst.append(read(y[other_dest], p.n_i, at_dst, b));
      }
      v_known_by_other[s] = got_src.take(v_tot[s]);
      relay_held[s] = got_src.take(relay_new[s].size());
      vp_known_at_other_dest[s] = got_dst.take(vp_tot[s]);
      relay_at_dest[o] = got_dst.take(relay_held_prev[o].size());
    }
    for (int i = 0; i < 2; ++i) {
      if (!relay_truth_prev[i].empty()) {
        ++res.messages;
        if (relay_at_dest[i] == relay_truth_prev[i])
          delivered[i] += static_cast<long>(relay_truth_prev[i].size());
        else
          ++res.errors;
      }
    }
    // mode A
    std::array<Stream, 2> v_src, vp_src, v_other_copy, vp_dest_copy;
    for (int i = 0; i < 2; ++i) {
      v_src[i].append(v_bits[i]);
      vp_src[i].append(vp_bits[i]);
      v_other_copy[i].append(l_b > 0 ? v_known_by_other[i] : v_bits[i]);
      vp_dest_copy[i].append(l_b > 0 ? vp_known_at_other_dest[i] : vp_bits[i]);
    }
    for (long t = 0; t < l_a; ++t, ++slot) {
      const SlotCode& code = *slot_code[t];
      SlotMessages msg;
      std::array<BitVector, 2> v_seen_by_other, vp_at_other_dest;
      for (int i = 0; i < 2; ++i) {
        auto c = code.src[i].counts();
        msg[i].w = random_bits(c.w, rng);
        msg[i].u = random_bits(c.u, rng);
        msg[i].v = v_src[i].take(c.v);
        msg[i].vp = vp_src[i].take(c.vp);
        v_seen_by_other[i] = v_other_copy[i].take(c.v);
        vp_at_other_dest[i] = vp_dest_copy[i].take(c.vp);
      }
      BitVector x1 = encode_source(p, code, 0, msg[0], v_seen_by_other[1]);
      BitVector x2 = encode_source(p, code, 1, msg[1], v_seen_by_other[0]);
      auto y = apply_channel(map_a, x1, x2);
      for (int d = 0; d < 2; ++d) {
        trace_line(opt.trace, slot, Mode::A, 3 + d, y[2 + d]);
        ++res.messages;
        auto dec = decode_virtual(p, code, d, y[2 + d], vp_at_other_dest[1 - d]);
        if (dec && dec->own == msg[d])
          delivered[d] += code.src[d].counts().total();
        else
          ++res.errors;
      }
    }
    relay_truth_prev = relay_new;
    relay_held_prev = relay_held;
  }
  const long per_block = l_a + 2 * l_b;
  res.total_slots = per_block * num_blocks;
  res.r1 = ratio(delivered[0], res.total_slots);
  res.r2 = ratio(delivered[1], res.total_slots);
  res.sum = res.r1 + res.r2;
  res.nominal_sum = ratio(pattern_bits + 2 * l_b * direct + 2 * relay, per_block);
  res.relay_deficit = ratio(relay, per_block * num_blocks);
  return res;
}

}  // namespace hdcoop
