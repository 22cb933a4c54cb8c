#include "beliefwin/simulate.hpp"

#include <stdexcept>
#include <string>

#include "beliefwin/rng.hpp"

namespace beliefwin {

const char* outcome_name(Outcome o) {
  switch (o) {
    case Outcome::kReachedGoal: return "reached_goal";
    case Outcome::kTimeout: return "timeout";
    case Outcome::kNoAction: return "no_action";
  }
  return "unknown";
}

std::uint32_t default_horizon(const ValidatedSpec& spec) {
  return static_cast<std::uint32_t>(20 * spec.num_states() * spec.num_queries());
}

namespace {

StateIndex sample_successor(const ValidatedSpec& spec, StateIndex s,
                            ControlIndex a, Rng& rng) {
  const auto& row = spec.row(s, a);
  const double u = rng.next_double();
  double acc = 0.0;
  for (const auto& e : row.entries) {
    acc += e.prob;
    if (u < acc) return e.state;
  }
  return row.entries.back().state;  // guard against rounding at u ~ 1
}

AttackIndex greedy_coarsen(const ValidatedSpec& spec, StateIndex next,
                           const Bitset& advanced, QueryIndex query) {
  AttackIndex best = 0;
  std::size_t best_size = 0;
  for (AttackIndex b = 0; b < spec.num_attacks(); ++b) {
    Bitset refined = advanced;
    refined &= observe(spec, next, query, b);
    const std::size_t size = refined.count();
    if (size > best_size) {  // strict: ties keep the earliest attack
      best_size = size;
      best = b;
    }
  }
  return best;
}

}  // namespace

AttackIndex choose_attack(const ValidatedSpec& spec, const AttackerPolicy& policy,
                          StateIndex next, const Bitset& advanced,
                          QueryIndex query, Rng& rng) {
  switch (policy.kind) {
    case PolicyKind::kNoAttack: {
      auto b = spec.no_attack();
      if (!b)
        throw std::invalid_argument(
            "no-attack policy requires the no-attack action in the alphabet");
      return *b;
    }
    case PolicyKind::kUniform:
      return rng.bounded(static_cast<std::uint32_t>(spec.num_attacks()));
    case PolicyKind::kGreedyCoarsen:
      return greedy_coarsen(spec, next, advanced, query);
    case PolicyKind::kArenaAdversary: {
      if (!policy.arena || !policy.win)
        throw std::invalid_argument("arena adversary needs an arena and a win set");
      const std::uint32_t p2 = policy.arena->find_p2(next, advanced, query);
      if (p2 != Arena::npos32) {
        for (AttackIndex b = 0; b < spec.num_attacks(); ++b)
          if (!policy.win->test(policy.arena->p2_successor(p2, b))) return b;
      }
      // No escape from the win set (or off-arena play): degrade the belief.
      return greedy_coarsen(spec, next, advanced, query);
    }
  }
  throw std::logic_error("unreachable attack policy kind");
}

Play run_episode(const ValidatedSpec& spec, const StrategyTable& table,
                 const AttackerPolicy& policy, std::uint64_t seed,
                 std::uint32_t horizon, StateIndex initial,
                 const Bitset& observation) {
  if (!observation.test(initial))
    throw std::invalid_argument("run_episode: initial state not in observation");

  Play play;
  if (spec.goal().test(initial)) {
    play.outcome = Outcome::kReachedGoal;
    play.length = 0;
    return play;
  }

  Rng rng(seed);
  StateIndex s = initial;
  Bitset belief = observation;

  for (std::uint32_t k = 0; k < horizon; ++k) {
    const StrategyTable::Entry* entry = table.lookup(belief);
    if (!entry) {
      play.outcome = Outcome::kNoAction;
      play.length = k;
      return play;
    }
    const ActionPair action =
        entry->actions[rng.bounded(static_cast<std::uint32_t>(entry->actions.size()))];

    const StateIndex next = sample_successor(spec, s, action.control, rng);
    Bitset advanced = spec.post_belief(belief, action.control);

    PlayStep step;
    step.state = s;
    step.belief = belief;
    step.control = action.control;
    step.query = action.query;
    step.next = next;
    step.next_is_goal = spec.goal().test(next);

    if (step.next_is_goal) {
      step.attack = 0;
      play.steps.push_back(std::move(step));
      play.outcome = Outcome::kReachedGoal;
      play.length = k + 1;
      return play;
    }

    const AttackIndex attack =
        choose_attack(spec, policy, next, advanced, action.query, rng);
    step.attack = attack;
    play.steps.push_back(std::move(step));

    advanced &= observe(spec, next, action.query, attack);
    if (!advanced.test(next))
      throw std::logic_error(
          "episode invariant broken: true state left the belief at step " +
          std::to_string(k));
    s = next;
    belief = std::move(advanced);
  }

  play.outcome = Outcome::kTimeout;
  play.length = horizon;
  return play;
}

ReachStats estimate_reach(const ValidatedSpec& spec, const StrategyTable& table,
                          const AttackerPolicy& policy,
                          const EpisodeConfig& config,
                          std::vector<EpisodeRecord>* records) {
  if (config.episodes == 0)
    throw std::invalid_argument("estimate_reach: episodes must be positive");
  // Fail policy misconfiguration before the episode loop so it surfaces as
  // invalid_argument instead of a swallowed per-episode error.
  if (policy.kind == PolicyKind::kNoAttack && !spec.no_attack())
    throw std::invalid_argument(
        "the no-attack policy needs the no-attack action in the alphabet");
  if (policy.kind == PolicyKind::kArenaAdversary &&
      (policy.arena == nullptr || policy.win == nullptr))
    throw std::invalid_argument("arena adversary needs an arena and a win set");
  const std::uint32_t horizon =
      config.horizon ? config.horizon : default_horizon(spec);
  Bitset observation = config.observation;
  if (observation.size() == 0) {
    observation = Bitset(spec.num_states());
    observation.set(config.initial);
  }

  std::vector<EpisodeRecord> rows(config.episodes);
  std::string error;
  const std::int64_t n = config.episodes;
#pragma omp parallel for schedule(dynamic, 8) if (config.parallel)
  for (std::int64_t i = 0; i < n; ++i) {
    const std::uint64_t seed = derive_seed(config.master_seed,
                                           static_cast<std::uint64_t>(i));
    try {
      Play play = run_episode(spec, table, policy, seed, horizon,
                              config.initial, observation);
      rows[i] = {static_cast<std::uint32_t>(i), seed, play.outcome, play.length};
    } catch (const std::exception& e) {
#pragma omp critical
      if (error.empty()) error = e.what();
      rows[i] = {static_cast<std::uint32_t>(i), seed, Outcome::kNoAction, 0};
    }
  }
  if (!error.empty()) throw std::logic_error(error);

  ReachStats stats;
  stats.episodes = config.episodes;
  std::uint64_t reached_steps = 0;
  for (const EpisodeRecord& r : rows) {
    switch (r.outcome) {
      case Outcome::kReachedGoal:
        ++stats.reached;
        reached_steps += r.length;
        break;
      case Outcome::kTimeout: ++stats.timeout; break;
      case Outcome::kNoAction: ++stats.no_action; break;
    }
  }
  stats.frequency = static_cast<double>(stats.reached) / stats.episodes;
  stats.mean_steps =
      stats.reached ? static_cast<double>(reached_steps) / stats.reached : 0.0;
  if (records) *records = std::move(rows);
  return stats;
}

}  // namespace beliefwin
