#pragma once

#include <cstdint>
#include <vector>

#include "beliefwin/arena.hpp"
#include "beliefwin/bitset.hpp"

namespace beliefwin {

/// Which states must share a decision: under kPerfect every P1 state chooses
/// for itself; under kBelief all P1 states of one belief class must agree,
/// which is what a strategy that only sees the belief can actually play.
enum class EquivalenceMode : std::uint8_t { kPerfect, kBelief };

struct SolveOptions {
  /// Run the sweep kernels with OpenMP.  The serial path executes the very
  /// same sweeps and is kept as the reference for differential testing.
  bool parallel = true;
};

struct SolveStats {
  std::uint32_t outer_iterations = 0;
  std::uint64_t inner_sweeps = 0;
  /// |Y| after each outer iteration; antitone by construction.
  std::vector<std::size_t> outer_sizes;
};

/// Result of the nested fixed point.  `level_of[q]` is the first inner round
/// in which q was attracted (0 for the final state, kNoLevel outside the win
/// set); the cumulative level sets of the terminating inner run can be
/// rematerialised from it.
struct SolveResult {
  static constexpr std::uint32_t kNoLevel = static_cast<std::uint32_t>(-1);

  Bitset win;
  std::vector<std::uint32_t> level_of;
  std::uint32_t num_levels = 0;  // K+1 cumulative sets R_0..R_K
  SolveStats stats;

  std::vector<Bitset> cumulative_levels() const;
};

/// Winning certificate: the claimed win set together with the attractor
/// levels that witness progress towards the final state; level_of follows
/// the SolveResult convention.  Checkable against the arena by an
/// implementation-independent verifier.
struct Certificate {
  Bitset win;
  std::vector<std::uint32_t> level_of;
  std::uint32_t num_levels = 0;

  static Certificate from_result(const SolveResult& r) {
    return Certificate{r.win, r.level_of, r.num_levels};
  }
};

/// Actions of P1 state q whose nature successor lies in Y, as a bitset over
/// flattened (control, query) action ids.
Bitset allow(const Arena& arena, std::uint32_t q, const Bitset& Y);

/// Intersection of `allow` over all members of a belief class: the actions
/// the class can commit to without any member leaving Y.
Bitset allow_class(const Arena& arena, std::uint32_t cls, const Bitset& Y);

/// One-step attractor layers, restricted to candidates in Y (callers keep
/// R as a subset of Y).  Each returns the set of states newly justified:
///   prog1: P1 states with an equivalence-respecting action into R,
///   prog2: P2 states whose every attack leads into R,
///   progN: nature states with support inside Y and positive mass on R.
Bitset prog1(const Arena& arena, const Bitset& R, const Bitset& Y,
             EquivalenceMode mode);
Bitset prog2(const Arena& arena, const Bitset& R, const Bitset& Y);
Bitset progN(const Arena& arena, const Bitset& R, const Bitset& Y);

/// Almost-sure reachability of the final state under the given equivalence:
/// the greatest fixed point over Y of the least fixed point over R, seeded
/// with R_0 = {final}.  Y0 must contain the final state.
SolveResult asw(const Arena& arena, EquivalenceMode mode, const Bitset& Y0,
                const SolveOptions& opts = {});

/// Two-pass pipeline: the perfect-observation solve bounds what any sensing
/// strategy could achieve, its complement is where the attacker wins with
/// positive probability, and the belief-level solve runs inside the
/// perfect-observation win set.
struct PipelineResult {
  SolveResult perfect;
  Bitset win2_positive;
  SolveResult belief;
};
PipelineResult solve_pipeline(const Arena& arena, const SolveOptions& opts = {});

}  // namespace beliefwin
