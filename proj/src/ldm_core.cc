#include "hdcoop/ldm_core.hpp"

#include <algorithm>
#include <stdexcept>

namespace hdcoop {

char mode_char(Mode m) { return m == Mode::A ? 'A' : m == Mode::B ? 'B' : 'C'; }

Schedule Schedule::symmetric(const ExtRational& delta, long l_a, long l_b) {
  if (l_a < 0 || l_b < 0) throw std::invalid_argument("schedule: negative slot count");
  if (delta.infinite ? l_b != 0 : (l_b == 0 ? l_a != 0 || delta.value != 0 : ratio(l_a, l_b) != delta.value))
    throw std::invalid_argument("schedule: slot counts do not realize delta");
  return {delta, l_a, l_b, l_b};
}

Schedule Schedule::cognitive(const ExtRational& delta, long l_a, long l_b) {
  if (l_a < 0 || l_b < 0) throw std::invalid_argument("schedule: negative slot count");
  if (delta.infinite ? l_a != 0 : (l_a == 0 ? l_b != 0 || delta.value != 0 : ratio(l_b, l_a) != delta.value))
    throw std::invalid_argument("schedule: slot counts do not realize delta");
  return {delta, l_a, l_b, 0};
}

namespace {

gf2::BitMatrix gain(int m, int n) { return gf2::shift_matrix(m, m - n); }

TransferMap blank(int m) {
  TransferMap t;
  t.width = m;
  for (auto& r : t.factor)
    for (auto& f : r) f = gf2::BitMatrix(m, m);
  return t;
}

}  // namespace

TransferMap transfer(const LdmSymParams& p, Mode mode) {
  if (p.n_d < 0 || p.n_i < 0 || p.n_c < 0) throw std::invalid_argument("negative LDM exponent");
  if (mode == Mode::A) {
    int m = std::max(p.n_d, p.n_i);
    auto t = blank(m);
    t.factor[2] = {gain(m, p.n_d), gain(m, p.n_i)};
    t.factor[3] = {gain(m, p.n_i), gain(m, p.n_d)};
    return t;
  }
  int m = std::max({p.n_d, p.n_i, p.n_c});
  auto t = blank(m);
  int s = mode == Mode::B ? 0 : 1;
  int listener = mode == Mode::B ? 1 : 0;
  t.factor[listener][s] = gain(m, p.n_c);
  t.factor[2][s] = gain(m, s == 0 ? p.n_d : p.n_i);
  t.factor[3][s] = gain(m, s == 0 ? p.n_i : p.n_d);
  return t;
}

TransferMap transfer(const LdmCogParams& p, Mode mode) {
  if (p.n1 < 0 || p.n2 < 0 || p.a1 < 0 || p.a2 < 0 || p.beta < 0)
    throw std::invalid_argument("negative LDM exponent");
  if (mode == Mode::C) throw std::invalid_argument("mode C is invalid for the one-way cooperative channel");
  if (mode == Mode::A) {
    int m = std::max({p.n1, p.n2, p.a1, p.a2});
    auto t = blank(m);
    t.factor[2] = {gain(m, p.n1), gain(m, p.a1)};
    t.factor[3] = {gain(m, p.a2), gain(m, p.n2)};
    return t;
  }
  int m = std::max({p.n1, p.n2, p.a1, p.a2, p.beta});
  auto t = blank(m);
  t.factor[1][0] = gain(m, p.beta);
  t.factor[2][0] = gain(m, p.n1);
  t.factor[3][0] = gain(m, p.a2);
  return t;
}

std::array<gf2::BitVector, 4> apply_channel(const TransferMap& map, const gf2::BitVector& x1,
                                            const gf2::BitVector& x2) {
  if (static_cast<int>(x1.size()) != map.width || static_cast<int>(x2.size()) != map.width)
    throw std::invalid_argument("apply_channel: input width mismatch");
  std::array<gf2::BitVector, 4> y;
  for (int r = 0; r < 4; ++r) {
    y[r] = map.factor[r][0].apply(x1);
    gf2::xor_into(y[r], map.factor[r][1].apply(x2));
  }
  return y;
}

}  // namespace hdcoop
