#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hdcoop/capacity.hpp"
#include "hdcoop/ldm_codec.hpp"
#include "hdcoop/rational.hpp"

namespace hdcoop {

// Exponent or gain value; infinite only where a key admits it (beta).
struct GridValue {
  double real = 0;
  std::optional<Rational> exact;  // set for plain decimals and fractions
  bool infinite = false;
};
std::string to_string(const GridValue& v);

// key=range text: one "key = item[, item...]" per line, '#' comments, optional [section] lines.
// item: number, p/q, inf, pi, pi/k, k*pi/m, "lo:step:hi" (inclusive), or "10^lo:step:hi".
struct SweepSpec {
  std::map<std::string, std::vector<GridValue>> values;
  bool has(const std::string& key) const { return values.count(key) > 0; }
  const std::vector<GridValue>& at(const std::string& key) const;
};
SweepSpec parse_sweep(const std::string& text);
SweepSpec load_sweep(const std::string& path);
std::vector<GridValue> parse_values(const std::string& item);

struct AlignmentRequired : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// beta nullopt means infinity. aligned is consulted only at alpha = 1, where it is required.
Rational gdof_sum(const Rational& alpha, const std::optional<Rational>& beta, std::optional<bool> aligned = {});
Rational gdof_cog(const Rational& n2, const Rational& alpha1, const Rational& alpha2,
                  const std::optional<Rational>& beta);

struct GapConstants {
  double sym_lower = 17, sym_upper = 7, ldm_upper = 10, ldm_lower = 7;
  double cog_lower = 23, cog_ldm = 13;
};

struct SymGapPoint {
  GaussSymParams params;
  GaussSumResult result;
  std::array<double, 5> margins{};
};
struct CogGapPoint {
  GaussCogParams params;
  CogBoundsResult result;
  std::array<double, 3> margins{};
};

struct Violation {
  std::string family;  // "sym" or "cog"
  size_t index = 0;
  std::string check;
  double margin = 0;
  std::string context;
};

struct GapGrid {
  std::vector<GaussSymParams> sym;
  std::vector<GaussCogParams> cog;
  std::string description;
};
// Sections [sym] and [cog] prefix their keys; bare keys serve both families.
extern const char* kDefaultGapGrid;
GapGrid default_gap_grid();
GapGrid gap_grid_from(const SweepSpec& spec);

struct GapReport {
  std::string grid;
  std::vector<SymGapPoint> sym;
  std::vector<CogGapPoint> cog;
  std::vector<Violation> violations;
  double max_sym_gap = 0;  // largest c_bar - achievable
};

extern const std::array<const char*, 5> kSymChecks;
extern const std::array<const char*, 3> kCogChecks;

GapReport verify_gaps(const GapGrid& grid, const GapConstants& k = {}, const GridOptions& opt = {},
                      double tol = 1e-6, unsigned threads = 0);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};
std::string to_csv(const Table& t);
std::string to_json(const Table& t, const std::string& kind);
std::string report_json(const GapReport& r);

struct UnknownKind : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// sum_gdof keys: alpha, beta, aligned (0/1, default 0).
// cog_gdof keys: alpha1, beta, n2, alpha2.
Table emit_figure_data(const std::string& kind, const SweepSpec& sweep);
Table gap_margin_table(const GapReport& r);
SweepSpec default_figure_sweep(const std::string& kind);

// Exact LDM sum capacity reproduced by simulation at the optimal schedule.
struct LdmSimCheck {
  DeltaOptResult capacity;
  ExtRational delta;  // schedule used: delta* (infinity when cooperation is off or any delta is optimal)
  RegionAllocation allocation;
  std::optional<HalfDuplexPlan> plan;
  SimResult sim;
  Rational nominal = 0;
  bool exact = false;  // sum + 2 * relay deficit == capacity, no decode errors
};
LdmSimCheck check_ldm_point(const LdmSymParams& p, long min_messages = 100, std::uint64_t seed = 1);

}  // namespace hdcoop
