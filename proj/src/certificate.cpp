#include "beliefwin/certificate.hpp"

#include <string>

namespace beliefwin {

namespace {

constexpr std::uint32_t kNoLevel = SolveResult::kNoLevel;

std::string action_witness(const ValidatedSpec& spec, const ActionPair& a) {
  std::string out = spec.action_name(a.control) + ",{";
  bool first = true;
  for (SensorIndex i : spec.query_sensors(a.query)) {
    if (!first) out += ',';
    first = false;
    out += spec.sensor_name(i);
  }
  return out + "}";
}

std::string attack_witness(const ValidatedSpec& spec, AttackIndex b) {
  std::string out = "{";
  bool first = true;
  for (SensorIndex i : spec.attack_sensors(b)) {
    if (!first) out += ',';
    first = false;
    out += spec.sensor_name(i);
  }
  return out + "}";
}

/// Closure + progress obligations for one winning state.  With a null sink
/// this is a pure predicate; with a sink it emits one violation per broken
/// obligation.
bool check_win_state(const Arena& arena, const Certificate& cert,
                     const StrategyTable& strategy, std::uint32_t q,
                     std::vector<Violation>* sink) {
  const ValidatedSpec& spec = arena.spec();
  const ArenaState& st = arena.state(q);
  const std::uint32_t own_level = cert.level_of[q];
  bool ok = true;
  auto report = [&](const char* obligation, std::string witness) {
    ok = false;
    if (sink) sink->push_back({q, obligation, std::move(witness)});
  };

  if (own_level == kNoLevel || own_level >= cert.num_levels) {
    report("level-shape", "winning state carries no attractor level");
    return ok;
  }

  switch (st.kind) {
    case StateKind::kFinal:
      if (own_level != 0) report("level-shape", "final state not on level 0");
      break;

    case StateKind::kP1: {
      const StrategyTable::Entry* entry =
          strategy.lookup(arena.belief_of(q));
      if (!entry) {
        report("closure", "no strategy entry for this belief");
        break;
      }
      bool progress = false;
      for (const ActionPair& a : entry->actions) {
        const std::uint32_t succ =
            arena.p1_successor(q, arena.action_id(a.control, a.query));
        if (!cert.win.test(succ))
          report("closure", "strategy action " + action_witness(spec, a) +
                                " leaves the win set");
        else if (cert.level_of[succ] < own_level)
          progress = true;
      }
      if (!progress)
        report("progress", "no strategy action decreases the attractor level");
      break;
    }

    case StateKind::kP2: {
      for (AttackIndex b = 0; b < spec.num_attacks(); ++b) {
        const std::uint32_t succ = arena.p2_successor(q, b);
        if (!cert.win.test(succ))
          report("closure", "attack " + attack_witness(spec, b) +
                                " escapes the win set");
        else if (cert.level_of[succ] >= own_level)
          report("progress", "attack " + attack_witness(spec, b) +
                                 " does not decrease the attractor level");
      }
      break;
    }

    case StateKind::kNature: {
      bool progress = false;
      for (const NatureEdge& e : arena.nature_edges(q)) {
        if (!cert.win.test(e.target)) {
          report("closure", "edge to " + arena.state_label(e.target) +
                                " leaves the win set");
        } else if (cert.level_of[e.target] < own_level) {
          progress = true;
        }
      }
      if (!progress)
        report("progress", "no outcome decreases the attractor level");
      break;
    }
  }
  return ok;
}

/// One-step trap obligations for one losing state of the perfect-observation
/// game: no defender choice may re-enter the win set for P1, nature must
/// keep some mass outside, and the attacker must have a staying attack.
bool check_losing_state(const Arena& arena, const Bitset& win, std::uint32_t q,
                        std::vector<Violation>* sink) {
  const ValidatedSpec& spec = arena.spec();
  const ArenaState& st = arena.state(q);
  bool ok = true;
  auto report = [&](const char* obligation, std::string witness) {
    ok = false;
    if (sink) sink->push_back({q, obligation, std::move(witness)});
  };

  switch (st.kind) {
    case StateKind::kFinal:
      report("trap", "final state marked losing");
      break;
    case StateKind::kP1: {
      const std::size_t na = arena.num_p1_actions();
      for (std::uint32_t act = 0; act < na; ++act)
        if (win.test(arena.p1_successor(q, act)))
          report("trap",
                 "action " +
                     action_witness(
                         spec,
                         {static_cast<ControlIndex>(act / spec.num_queries()),
                          static_cast<QueryIndex>(act % spec.num_queries())}) +
                     " re-enters the win set");
      break;
    }
    case StateKind::kP2: {
      bool can_stay = false;
      for (AttackIndex b = 0; b < spec.num_attacks(); ++b)
        if (!win.test(arena.p2_successor(q, b))) {
          can_stay = true;
          break;
        }
      if (!can_stay)
        report("trap", "every attack falls into the win set");
      break;
    }
    case StateKind::kNature: {
      bool mass_outside = false;
      for (const NatureEdge& e : arena.nature_edges(q))
        if (!win.test(e.target)) {
          mass_outside = true;
          break;
        }
      if (!mass_outside)
        report("trap", "all outcomes lie in the win set");
      break;
    }
  }
  return ok;
}

}  // namespace

Verdict check_certificate(const Arena& arena, const Certificate& cert,
                          const StrategyTable& strategy, bool parallel) {
  Verdict verdict;
  const std::size_t n = arena.size();

  if (cert.win.size() != n || cert.level_of.size() != n) {
    verdict.pass = false;
    verdict.violations.push_back(
        {0, "level-shape", "certificate does not match the arena size"});
    return verdict;
  }
  if (!cert.win.test(arena.final_state()))
    verdict.violations.push_back(
        {arena.final_state(), "level-shape", "final state not in the win set"});
  for (std::uint32_t q = 0; q < n; ++q) {
    if (cert.level_of[q] == 0 && q != arena.final_state())
      verdict.violations.push_back(
          {q, "level-shape", "level 0 must contain only the final state"});
    if (cert.level_of[q] != kNoLevel && !cert.win.test(q))
      verdict.violations.push_back(
          {q, "level-shape", "attractor level assigned outside the win set"});
  }

  // A strategy that only sees beliefs cannot treat two states of one class
  // differently, so a class may not straddle the win boundary.
  for (std::uint32_t cls = 0; cls < arena.num_belief_classes(); ++cls) {
    bool some_in = false, some_out = false;
    for (std::uint32_t member : arena.class_members(cls))
      (cert.win.test(member) ? some_in : some_out) = true;
    if (some_in && some_out)
      verdict.violations.push_back({arena.class_members(cls)[0], "uniformity",
                                    "belief class straddles the win boundary"});
  }

  std::vector<std::uint8_t> bad(n, 0);
  const std::int64_t nn = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic, 256) if (parallel)
  for (std::int64_t q = 0; q < nn; ++q) {
    if (!cert.win.test(q)) continue;
    if (!check_win_state(arena, cert, strategy, static_cast<std::uint32_t>(q),
                         nullptr))
      bad[q] = 1;
  }
  for (std::uint32_t q = 0; q < n; ++q)
    if (bad[q])
      check_win_state(arena, cert, strategy, q, &verdict.violations);

  verdict.pass = verdict.violations.empty();
  return verdict;
}

Verdict check_unwinnable(const Arena& arena, const Bitset& perfect_win,
                         bool parallel) {
  Verdict verdict;
  const std::size_t n = arena.size();
  if (perfect_win.size() != n) {
    verdict.pass = false;
    verdict.violations.push_back(
        {0, "trap", "win set does not match the arena size"});
    return verdict;
  }

  std::vector<std::uint8_t> bad(n, 0);
  const std::int64_t nn = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic, 256) if (parallel)
  for (std::int64_t q = 0; q < nn; ++q) {
    if (perfect_win.test(q)) continue;
    if (!check_losing_state(arena, perfect_win, static_cast<std::uint32_t>(q),
                            nullptr))
      bad[q] = 1;
  }
  for (std::uint32_t q = 0; q < n; ++q)
    if (bad[q])
      check_losing_state(arena, perfect_win, q, &verdict.violations);

  verdict.pass = verdict.violations.empty();
  return verdict;
}

}  // namespace beliefwin
