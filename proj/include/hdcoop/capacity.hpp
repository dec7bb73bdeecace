#pragma once

#include <array>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hdcoop/ldm_core.hpp"
#include "hdcoop/rational.hpp"

namespace hdcoop {

// Bound (b + a*delta) / (d0 + d1*delta). infinite: +inf for every finite delta (dropped from the min).
struct FracBound {
  Rational a = 0, b = 0;
  bool infinite = false;
};

struct DeltaOptResult {
  ExtRational delta_star;
  bool any_delta = false;  // the min is constant in delta
  Rational value = 0;
  std::vector<int> active;
};

// Exact max over delta in [0, inf] of min_i bound_i, by enumerating pairwise crossings.
// Ties: constant -> any; else infinity if optimal; else the smallest optimal delta.
DeltaOptResult maxmin_fractional(const std::vector<FracBound>& bounds, const Rational& d0, const Rational& d1);
Rational eval_fractional(const FracBound& f, const ExtRational& delta, const Rational& d0, const Rational& d1);

// Exponent forms of the bound families; nullopt exponent means infinity.
// equal_form selects the n_d = n_i branch of the fourth sum bound.
std::vector<FracBound> sum_bounds(const Rational& nd, const Rational& ni, const std::optional<Rational>& nc,
                                  bool equal_form);  // over (2 + delta)
std::vector<FracBound> cog_bounds(const Rational& n1, const Rational& n2, const Rational& a1, const Rational& a2,
                                  const std::optional<Rational>& beta);  // over (1 + delta)
std::array<Rational, 4> cog_v_exponents(const Rational& n1, const Rational& n2, const Rational& a1, const Rational& a2);

std::vector<FracBound> ldm_sum_bounds(const LdmSymParams& p);
DeltaOptResult ldm_sum_capacity(const LdmSymParams& p);

int ifc_cog_capacity(int n1, int n2, int a1, int a2);
std::vector<FracBound> ldm_cog_bounds(const LdmCogParams& p);

struct InternalInconsistency : std::logic_error {
  using std::logic_error::logic_error;
};

struct CogCapacity {
  DeltaOptResult maxmin;
  Rational interpretation = 0;  // max(C_IFC, C_Z / (1 + delta0))
  std::optional<Rational> delta0;
  bool identity_checked = false;
  Rational value = 0;
  ExtRational delta_star;
};
CogCapacity ldm_cog_capacity(const LdmCogParams& p);

// ---- Gaussian ----

struct GaussSymParams {
  double snr = 1, inr = 1, cnr = 1, theta = 0;
};
struct GaussCogParams {
  double snr1 = 1, snr2 = 1, inr1 = 1, inr2 = 1, cnr = 1, theta = 0, r0 = 0;
};

struct GridOptions {
  int points = 512;
  double lo_log2 = -10, hi_log2 = 10;
  double tol = 1e-6;
  bool refine = true;
};

struct RealDeltaOpt {
  double delta_star = 0;  // may be +inf
  double value = 0;
  std::vector<int> active;
};

std::vector<double> delta_grid(const GridOptions& g);  // 0, log grid, +inf
// Max over delta of min_i f(delta)_i on the grid, refined by golden section around the best interior point.
RealDeltaOpt optimize_delta(const std::function<std::vector<double>(double)>& bounds, const GridOptions& g = {});

double log2p(double v);
int ldm_level(double gain);  // floor(log2 gain)^+

double beta1_sym(double x, double y, double theta);
double beta2_sym(double x, double y, double theta);
double beta1_cog(const GaussCogParams& p);
double beta2_cog(const GaussCogParams& p);

std::array<double, 4> gauss_sum_u(const GaussSymParams& p, double delta);
std::array<double, 4> gauss_sum_u_ldm(const GaussSymParams& p, double delta);  // u1'..u4'
std::array<double, 5> gauss_sum_ldm_terms(const GaussSymParams& p, double delta);
std::array<double, 4> gauss_sum_outer_terms(const GaussSymParams& p, double delta);

struct PowerSplitSym {
  double sw = 0, su = 0, svp = 0, sxv = 0;
};
// Symmetric Gaussian virtual channel: max sum rate of the mode-A system with bit-pipes.
double gauss_virtual_sum(const GaussSymParams& p, const PowerSplitSym& s, double bp_ss, double bp_sd);
double gauss_hk_rate(const GaussSymParams& p);

enum class SymRegion { NoCooperation = 1, WeakInterference = 2, CoopAboveInterference = 3, CoopBelowInterference = 4, ComparableGains = 5 };
SymRegion classify_region(const GaussSymParams& p);
std::string region_name(SymRegion r);
std::optional<double> gauss_region_rate(const GaussSymParams& p, double delta);

struct GaussSumResult {
  double c_bar = 0, c_bar_ldm = 0, achievable = 0, outer = 0;
  double delta_c_bar = 0, delta_outer = 0, delta_achievable = 0;
  SymRegion region = SymRegion::NoCooperation;
  bool cooperation = false;
};
GaussSumResult gaussian_sum_inner_outer(const GaussSymParams& p, const GridOptions& g = {});

std::array<double, 4> gauss_cog_u(const GaussCogParams& p, double delta);
std::array<double, 4> gauss_cog_ldm_terms(const GaussCogParams& p, double delta);
std::optional<double> gauss_cog_lower_at(const GaussCogParams& p, double delta);

struct CogBoundsResult {
  double c_bar_r0 = 0, lower = 0, ldm_link = 0;
  double delta_c_bar = 0, delta_lower = 0;
  bool lower_asserted = false;
};
CogBoundsResult gaussian_cog_bounds(const GaussCogParams& p, const GridOptions& g = {});

// Terms whose maxima bound the gap arithmetic.
double gap_term_power(double delta);   // delta/(2+delta) log2((2+delta)/delta)
double gap_term_listen(double delta);  // 1/(2+delta) log2(2+delta)

}  // namespace hdcoop
