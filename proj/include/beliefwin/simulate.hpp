#pragma once

#include <cstdint>
#include <vector>

#include "beliefwin/arena.hpp"
#include "beliefwin/strategy.hpp"

namespace beliefwin {

enum class Outcome : std::uint8_t { kReachedGoal, kTimeout, kNoAction };

const char* outcome_name(Outcome o);

/// One full alternation of a played episode: from state `state` with belief
/// `belief`, P1 played (control, query), nature sampled `next`, and (when
/// `next` is not a goal) P2 answered with `attack`.
struct PlayStep {
  StateIndex state;
  Bitset belief;
  ControlIndex control;
  QueryIndex query;
  StateIndex next;
  AttackIndex attack;   // undefined when next is a goal state
  bool next_is_goal;
};

struct Play {
  std::vector<PlayStep> steps;
  Outcome outcome;
  /// Steps taken: the step index on which the goal was entered, the horizon
  /// on timeout, or the step on which the strategy had no entry.
  std::uint32_t length;
};

enum class PolicyKind : std::uint8_t {
  kNoAttack,        // always plays the no-attack action
  kUniform,         // uniform over the attack alphabet
  kGreedyCoarsen,   // keeps the belief as coarse as possible
  kArenaAdversary,  // escapes the win set when any attack can
};

/// Attack policy for P2.  kArenaAdversary consults the arena and a win set:
/// at each P2 state it plays the first attack whose successor leaves the win
/// set and falls back to greedy coarsening when none does.  kNoAttack
/// requires the alphabet to contain the no-attack action.
struct AttackerPolicy {
  PolicyKind kind = PolicyKind::kNoAttack;
  const Arena* arena = nullptr;   // kArenaAdversary only
  const Bitset* win = nullptr;    // kArenaAdversary only
};

/// One attack decision: the sampled successor is `next`, the belief already
/// advanced by P1's control is `advanced`, and `query` is pending.  Exposed
/// so policies can be probed at specific game positions.
AttackIndex choose_attack(const ValidatedSpec& spec,
                          const AttackerPolicy& policy, StateIndex next,
                          const Bitset& advanced, QueryIndex query, Rng& rng);

/// Plays one episode from (initial, observation) under the strategy table
/// against the attack policy.  Every step asserts that the true state stays
/// inside the tracked belief; a violation would be a semantics bug and
/// throws std::logic_error.
Play run_episode(const ValidatedSpec& spec, const StrategyTable& table,
                 const AttackerPolicy& policy, std::uint64_t seed,
                 std::uint32_t horizon, StateIndex initial,
                 const Bitset& observation);

/// Default horizon: 20 * |states| * |queries|.
std::uint32_t default_horizon(const ValidatedSpec& spec);

struct EpisodeConfig {
  std::uint64_t master_seed = 0;
  std::uint32_t episodes = 1;
  std::uint32_t horizon = 0;  // 0 -> default_horizon(spec)
  StateIndex initial = 0;
  Bitset observation;         // empty -> {initial}
  bool parallel = true;
};

struct EpisodeRecord {
  std::uint32_t episode;
  std::uint64_t seed;
  Outcome outcome;
  std::uint32_t length;
};

struct ReachStats {
  std::uint64_t episodes = 0;
  std::uint64_t reached = 0;
  std::uint64_t timeout = 0;
  std::uint64_t no_action = 0;
  double frequency = 0.0;   // reached / episodes
  double mean_steps = 0.0;  // over successful episodes
};

/// Runs config.episodes independent episodes (episode i seeded with
/// derive_seed(master_seed, i)) and aggregates counts; order-independent, so
/// the parallel and serial paths agree bitwise.  Rejects episodes == 0.
/// When `records` is non-null it receives one row per episode, in episode
/// order.
ReachStats estimate_reach(const ValidatedSpec& spec, const StrategyTable& table,
                          const AttackerPolicy& policy,
                          const EpisodeConfig& config,
                          std::vector<EpisodeRecord>* records = nullptr);

}  // namespace beliefwin
