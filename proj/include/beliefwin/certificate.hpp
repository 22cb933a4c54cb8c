#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "beliefwin/arena.hpp"
#include "beliefwin/solve.hpp"
#include "beliefwin/strategy.hpp"

namespace beliefwin {

struct Violation {
  std::uint32_t state;
  std::string obligation;  // "closure", "progress", "level-shape", "uniformity"
  std::string witness;     // offending edge / action / attack
};

struct Verdict {
  bool pass = true;
  std::vector<Violation> violations;
};

/// Checks a claimed belief-level winning certificate against the arena and
/// the strategy, without re-running the solver:
///   shape:      level 0 is exactly the final state and levels are within
///               bounds and only assigned inside the win set;
///   closure:    every strategy action from a winning P1 state, every attack
///               from a winning P2 state and every nature edge from a winning
///               nature state stays inside the win set, and every winning P1
///               state has a strategy entry for its belief;
///   progress:   every winning state has a level and one step of its kind
///               reaches a strictly smaller level (P1: some strategy action;
///               P2: all attacks; nature: some edge);
///   uniformity: all members of one belief class are certified against the
///               same entry (inherent in belief-keyed lookup, checked via
///               class consistency of win membership).
Verdict check_certificate(const Arena& arena, const Certificate& cert,
                          const StrategyTable& strategy, bool parallel = true);

/// Checks that the complement of a perfect-observation win set is a trap for
/// P1: from every losing P1 state all actions stay losing, every losing
/// nature state keeps positive mass on losing states, and every losing P2
/// state has an attack that stays losing.
Verdict check_unwinnable(const Arena& arena, const Bitset& perfect_win,
                         bool parallel = true);

}  // namespace beliefwin
