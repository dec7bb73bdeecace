#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hdcoop/gf2.hpp"
#include "hdcoop/ldm_core.hpp"
#include "hdcoop/rational.hpp"

namespace hdcoop {

struct SingularChannel : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InfeasibleAllocation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bits per mode-A slot for one source: public, private, cooperative private, pre-shared public.
struct SlotCounts {
  int w = 0, u = 0, v = 0, vp = 0;
  int total() const { return w + u + v + vp; }
  auto operator<=>(const SlotCounts&) const = default;
};
using SlotPair = std::array<SlotCounts, 2>;

// Generator columns for one source. w, u, vp live in the source's input space;
// v holds target vectors as they must appear at the source's own destination.
struct SourceCode {
  std::vector<gf2::BitVector> w, u, vp, v;
  SlotCounts counts() const {
    return {static_cast<int>(w.size()), static_cast<int>(u.size()), static_cast<int>(v.size()),
            static_cast<int>(vp.size())};
  }
};

struct SlotCode {
  int n = 0;  // input width max(n_d, n_i)
  std::array<SourceCode, 2> src;
  SlotCode swapped() const { return {n, {src[1], src[0]}}; }
  SlotPair counts() const { return {src[0].counts(), src[1].counts()}; }
};

struct SourceMessage {
  gf2::BitVector w, u, v, vp;
  bool operator==(const SourceMessage&) const = default;
};
using SlotMessages = std::array<SourceMessage, 2>;

// pattern: the mode-A slot allocations of one block in order (length L_A).
struct MessageAllocation {
  std::vector<SlotPair> pattern;
  Rational bp_ss = 0, bp_sd = 0, bp_12 = 0;
  Rational delta_r = 0;
  Rational r_1b = 0, r_2c = 0;
};

std::pair<gf2::BitVector, gf2::BitVector> zero_forcing_precode_sym(const LdmSymParams& p, const gf2::BitVector& v1,
                                                                   const gf2::BitVector& v2);
int realizable_k(const LdmCogParams& p);
std::pair<gf2::BitVector, gf2::BitVector> zero_forcing_precode_cog(const LdmCogParams& p, const gf2::BitVector& v1);

// Literal level layout: W then V' from the top, U from the bottom of the private band,
// V on free levels of the own destination. nullopt if it does not fit or is not decodable.
std::optional<SlotCode> layout_code(const LdmSymParams& p, const SlotPair& counts);
SlotCode layout_code(const LdmSymParams& p, const MessageAllocation& alloc, int slot = 0);
bool decodable(const LdmSymParams& p, const SlotCode& code);
// Layout first, then seeded random generators. Deterministic in (p, counts).
std::optional<SlotCode> design_slot_code(const LdmSymParams& p, const SlotPair& counts, int tries = 400);

SlotMessages random_messages(const SlotCode& code, std::mt19937_64& rng);

gf2::BitVector encode_source(const LdmSymParams& p, const SlotCode& code, int source, const SourceMessage& own,
                             const gf2::BitVector& other_v);
std::pair<gf2::BitVector, gf2::BitVector> encode_virtual_sym(const LdmSymParams& p, const SlotCode& code,
                                                             const SlotMessages& m);

struct Decoded {
  SourceMessage own;
  std::optional<gf2::BitVector> other_w;
};
// dest 0 is node 3 (source 1's destination). other_vp: the pre-shared V' bits of the other source.
std::optional<Decoded> decode_virtual(const LdmSymParams& p, const SlotCode& code, int dest,
                                      const gf2::BitVector& received, const gf2::BitVector& other_vp);

struct Ambiguity {
  int dest = 0;
  SlotMessages a, b;
};
// Two message tuples with different intended messages and identical observations at one destination.
// with_other_public: a difference in the other source's public bits also counts.
std::optional<Ambiguity> find_ambiguity(const LdmSymParams& p, const SlotCode& code, std::uint64_t seed = 1,
                                        bool with_other_public = false);

struct MenuEntry {
  SlotPair counts;
  int sum = 0;
  SlotCode code;
};
// Best achievable slot-pair total keyed by (v1+v2, vp1+vp2).
struct SlotMenu {
  int n_d = 0, n_i = 0;
  std::map<std::pair<int, int>, MenuEntry> best;
};
const SlotMenu& slot_menu(int n_d, int n_i);

// Integer slot tuples allowed by the rank-evaluated virtual-channel constraints (bit-pipes unconstrained).
std::vector<SlotPair> feasible_slot_tuples(int n_d, int n_i);

// Time-sharing over swapped slot pairs, maximizing bits under per-direction pipe budgets.
struct VirtualPlan {
  std::vector<SlotPair> pattern;
  long total_bits = 0;
};
std::optional<VirtualPlan> plan_virtual(int n_d, int n_i, long l_a, long v_budget, long vp_budget);

struct RegionAllocation {
  bool cooperative = false;
  std::string label;
  Rational bp_ss = 0, bp_sd = 0, delta_r = 0;
};
RegionAllocation region_allocation(const LdmSymParams& p, const ExtRational& delta);
bool mode_b_feasible(const LdmSymParams& p, const ExtRational& delta, const Rational& bp_ss, const Rational& bp_sd,
                     const Rational& delta_r);
// Nominal sum rate of a region allocation: (delta R_virtual + 2 n_d + 2 delta_r) / (2 + delta).
Rational allocation_sum_rate(const LdmSymParams& p, const ExtRational& delta, const RegionAllocation& a);

struct HalfDuplexPlan {
  Schedule schedule;
  MessageAllocation alloc;
};
std::optional<HalfDuplexPlan> plan_halfduplex(const LdmSymParams& p, const ExtRational& delta,
                                              const RegionAllocation& a);

struct SimOptions {
  std::uint64_t seed = 1;
  std::ostream* trace = nullptr;
};

struct SimResult {
  long blocks = 0;
  long total_slots = 0;
  long errors = 0;
  long messages = 0;
  Rational r1 = 0, r2 = 0, sum = 0;
  Rational nominal_sum = 0;    // per-block rate without relay losses
  Rational relay_deficit = 0;  // per user
};

SimResult run_halfduplex_sim(const LdmSymParams& p, const Schedule& schedule, const MessageAllocation& alloc,
                             long num_blocks, const SimOptions& opt = {});

}  // namespace hdcoop
