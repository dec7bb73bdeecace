#pragma once

#include <map>
#include <string>
#include <vector>

#include "hdcoop/gf2.hpp"
#include "hdcoop/ldm_core.hpp"
#include "hdcoop/rational.hpp"

namespace hdcoop {

struct LinIneq {
  std::vector<Rational> coef;  // one per polytope variable
  Rational rhs;                // coef . x <= rhs
};

// All variables are implicitly nonnegative.
struct Polytope {
  std::vector<std::string> vars;
  std::vector<LinIneq> rows;

  int index_of(const std::string& name) const;
  void add(const std::map<std::string, Rational>& terms, const Rational& rhs);
  bool contains(const std::vector<Rational>& x) const;
  // Replace x[var] by sum(expr[j] x[j]) + constant, keeping var's nonnegativity as a row.
  Polytope substitute(const std::string& var, const std::map<std::string, Rational>& expr,
                      const Rational& constant) const;
  // Append a fresh variable defined by name = sum(expr).
  Polytope with_sum_variable(const std::string& name, const std::map<std::string, Rational>& expr) const;
};

std::string serialize(const Polytope& p);
Polytope parse_polytope(const std::string& text);

// Linear images of independent uniform base bits.
struct AuxSpec {
  int base_bits = 0;
  std::map<std::string, gf2::BitMatrix> gen;
};

int ldm_mutual_info(const AuxSpec& spec, const std::vector<std::string>& targets, const std::string& output,
                    const std::vector<std::string>& conditioning);

// Auxiliaries for the symmetric virtual channel: XVp{i}, XW{i}, XU{i}, V{i}, Y3, Y4.
AuxSpec symmetric_aux(int n_d, int n_i);

// Variables R_W1 R_U1 R_V1 R_V1p R_W2 R_U2 R_V2 R_V2p.
Polytope virtual_constraints_sym(const LdmSymParams& p, const Rational& bp_ss, const Rational& bp_sd);
// Variables R_W1 R_U1 R_V1 R_W2 R_U2.
Polytope virtual_constraints_cog(const LdmCogParams& p, const Rational& bp_12);

struct FmOptions {
  size_t guard = 20000;
};
struct FmBlowup : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Polytope prune_redundant(const Polytope& p);
Polytope fourier_motzkin(const Polytope& p, const std::vector<std::string>& eliminate, const FmOptions& opt = {});

struct Unbounded : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct Infeasible : std::runtime_error {
  using std::runtime_error::runtime_error;
};
Rational max_weighted_rate(const Polytope& p, const std::map<std::string, Rational>& weights);

// Both sides are polytopes over the same variable names (order may differ).
bool same_polytope(const Polytope& a, const Polytope& b);

// n_i < n_d requires bp_sd = 0.
Rational closed_form_sum_virtual(int n_d, int n_i, const Rational& bp_ss, const Rational& bp_sd);

// Max sum rate of the symmetric system with symmetric rate ties, by elimination down to the sum.
Rational fm_sum_rate_sym(const LdmSymParams& p, const Rational& bp_ss, const Rational& bp_sd,
                         const FmOptions& opt = {});
// Max R2 with R1 pinned to n1, by elimination down to R2.
Rational fm_cog_rate(const LdmCogParams& p, const Rational& bp_12, const FmOptions& opt = {});

// Cognitive IFC quantities v1..v4.
std::array<int, 4> cog_v(const LdmCogParams& p);

}  // namespace hdcoop
