#pragma once

#include <array>

#include "hdcoop/gf2.hpp"
#include "hdcoop/rational.hpp"

namespace hdcoop {

struct LdmSymParams {
  int n_d = 0, n_i = 0, n_c = 0;
};

// Source 1 is the primary. a1: source 2 -> destination 3, a2: source 1 -> destination 4,
// beta: source 1 -> source 2.
struct LdmCogParams {
  int n1 = 0, n2 = 0, a1 = 0, a2 = 0, beta = 0;
};

enum class Mode { A, B, C };
char mode_char(Mode m);

// Symmetric: delta = L_A / L_B with L_B = L_C. Cognitive: delta = L_B / L_A, L_C = 0.
struct Schedule {
  ExtRational delta;
  long l_a = 0, l_b = 0, l_c = 0;

  static Schedule symmetric(const ExtRational& delta, long l_a, long l_b);
  static Schedule cognitive(const ExtRational& delta, long l_a, long l_b);
};

// factor[r][s] maps source s+1's input to receiver r+1's output; receivers are nodes 1..4.
struct TransferMap {
  int width = 0;
  std::array<std::array<gf2::BitMatrix, 2>, 4> factor;
};

TransferMap transfer(const LdmSymParams& p, Mode mode);
TransferMap transfer(const LdmCogParams& p, Mode mode);

std::array<gf2::BitVector, 4> apply_channel(const TransferMap& map, const gf2::BitVector& x1,
                                            const gf2::BitVector& x2);

}  // namespace hdcoop
