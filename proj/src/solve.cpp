#include "beliefwin/solve.hpp"

#include <cstdint>
#include <stdexcept>

namespace beliefwin {

namespace {

/// allow_class for every class, flattened to one bit row per class.  Under
/// kPerfect every P1 state is its own class (indexed by P1 ordinal).
struct ClassTable {
  std::size_t words_per_row = 0;
  std::vector<std::uint64_t> bits;

  bool allowed(std::uint32_t cls, std::uint32_t act) const {
    return (bits[cls * words_per_row + (act >> 6)] >> (act & 63)) & 1u;
  }
};

}  // namespace

Bitset allow(const Arena& arena, std::uint32_t q, const Bitset& Y) {
  if (arena.state(q).kind != StateKind::kP1)
    throw std::invalid_argument("allow: not a P1 state");
  const std::size_t na = arena.num_p1_actions();
  Bitset out(na);
  for (std::uint32_t act = 0; act < na; ++act)
    if (Y.test(arena.p1_successor(q, act))) out.set(act);
  return out;
}

Bitset allow_class(const Arena& arena, std::uint32_t cls, const Bitset& Y) {
  Bitset out(arena.num_p1_actions());
  out.fill();
  for (std::uint32_t member : arena.class_members(cls))
    out &= allow(arena, member, Y);
  return out;
}

namespace {

/// Evaluates the one-step justification for q (of any kind) against frozen R.
/// Candidates are assumed to lie in Y; nature support safety re-checks Y.
bool justified(const Arena& arena, std::uint32_t q, const Bitset& R,
               const Bitset& Y, const ClassTable& classes,
               EquivalenceMode mode) {
  const ArenaState& st = arena.state(q);
  switch (st.kind) {
    case StateKind::kFinal:
      return true;
    case StateKind::kP1: {
      const std::uint32_t cls = mode == EquivalenceMode::kBelief
                                    ? arena.class_of(q)
                                    : st.ordinal;
      const std::size_t na = arena.num_p1_actions();
      for (std::uint32_t act = 0; act < na; ++act)
        if (classes.allowed(cls, act) && R.test(arena.p1_successor(q, act)))
          return true;
      return false;
    }
    case StateKind::kP2: {
      const std::size_t nb = arena.spec().num_attacks();
      for (std::uint32_t b = 0; b < nb; ++b)
        if (!R.test(arena.p2_successor(q, b))) return false;
      return true;
    }
    case StateKind::kNature: {
      bool hits_r = false;
      for (const NatureEdge& e : arena.nature_edges(q)) {
        if (!Y.test(e.target)) return false;
        if (R.test(e.target)) hits_r = true;
      }
      return hits_r;
    }
  }
  return false;
}

ClassTable build_class_table(const Arena& arena, const Bitset& Y,
                             EquivalenceMode mode, bool parallel) {
  ClassTable table;
  const std::size_t na = arena.num_p1_actions();
  table.words_per_row = (na + 63) / 64;

  if (mode == EquivalenceMode::kPerfect) {
    // One class per P1 state: row = that state's allow bits.
    const std::int64_t n = static_cast<std::int64_t>(arena.size());
    table.bits.assign(arena.num_p1_states() * table.words_per_row, 0ull);
#pragma omp parallel for schedule(dynamic, 64) if (parallel)
    for (std::int64_t q = 0; q < n; ++q) {
      const ArenaState& st = arena.state(static_cast<std::uint32_t>(q));
      if (st.kind != StateKind::kP1) continue;
      std::uint64_t* row = table.bits.data() + st.ordinal * table.words_per_row;
      for (std::uint32_t act = 0; act < na; ++act)
        if (Y.test(arena.p1_successor(static_cast<std::uint32_t>(q), act)))
          row[act >> 6] |= 1ull << (act & 63);
    }
    return table;
  }

  const std::int64_t nc = static_cast<std::int64_t>(arena.num_belief_classes());
  table.bits.assign(arena.num_belief_classes() * table.words_per_row, 0ull);
#pragma omp parallel for schedule(dynamic, 16) if (parallel)
  for (std::int64_t cls = 0; cls < nc; ++cls) {
    std::uint64_t* row = table.bits.data() + cls * table.words_per_row;
    for (std::uint32_t act = 0; act < na; ++act) {
      bool ok = true;
      for (std::uint32_t member :
           arena.class_members(static_cast<std::uint32_t>(cls))) {
        if (!Y.test(arena.p1_successor(member, act))) {
          ok = false;
          break;
        }
      }
      if (ok) row[act >> 6] |= 1ull << (act & 63);
    }
  }
  return table;
}

/// One Jacobi sweep: justification is evaluated against the frozen R, new
/// states are collected word-parallel and merged afterwards, so the result
/// is independent of scheduling.
bool sweep(const Arena& arena, const Bitset& Y, const ClassTable& classes,
           EquivalenceMode mode, Bitset& R, std::vector<std::uint32_t>& level_of,
           std::uint32_t level, std::vector<std::uint64_t>& adds,
           bool parallel) {
  const std::int64_t nwords = static_cast<std::int64_t>(R.num_words());
  const std::size_t n = arena.size();

#pragma omp parallel for schedule(dynamic, 4) if (parallel)
  for (std::int64_t wi = 0; wi < nwords; ++wi) {
    std::uint64_t candidates = Y.word(wi) & ~R.word(wi);
    std::uint64_t found = 0;
    while (candidates) {
      const int bit = std::countr_zero(candidates);
      candidates &= candidates - 1;
      const std::size_t q = (static_cast<std::size_t>(wi) << 6) + bit;
      if (q >= n) break;
      if (justified(arena, static_cast<std::uint32_t>(q), R, Y, classes, mode))
        found |= 1ull << bit;
    }
    adds[wi] = found;
  }

  bool any = false;
  for (std::int64_t wi = 0; wi < nwords; ++wi) {
    std::uint64_t found = adds[wi];
    if (!found) continue;
    any = true;
    R.set_word(wi, R.word(wi) | found);
    while (found) {
      const int bit = std::countr_zero(found);
      found &= found - 1;
      level_of[(static_cast<std::size_t>(wi) << 6) + bit] = level;
    }
  }
  return any;
}

}  // namespace

Bitset prog1(const Arena& arena, const Bitset& R, const Bitset& Y,
             EquivalenceMode mode) {
  ClassTable classes = build_class_table(arena, Y, mode, false);
  Bitset out(arena.size());
  for (std::uint32_t q = 0; q < arena.size(); ++q)
    if (Y.test(q) && arena.state(q).kind == StateKind::kP1 &&
        justified(arena, q, R, Y, classes, mode))
      out.set(q);
  return out;
}

Bitset prog2(const Arena& arena, const Bitset& R, const Bitset& Y) {
  ClassTable classes;  // unused for P2
  Bitset out(arena.size());
  for (std::uint32_t q = 0; q < arena.size(); ++q)
    if (Y.test(q) && arena.state(q).kind == StateKind::kP2 &&
        justified(arena, q, R, Y, classes, EquivalenceMode::kPerfect))
      out.set(q);
  return out;
}

Bitset progN(const Arena& arena, const Bitset& R, const Bitset& Y) {
  ClassTable classes;  // unused for nature
  Bitset out(arena.size());
  for (std::uint32_t q = 0; q < arena.size(); ++q)
    if (Y.test(q) && arena.state(q).kind == StateKind::kNature &&
        justified(arena, q, R, Y, classes, EquivalenceMode::kPerfect))
      out.set(q);
  return out;
}

std::vector<Bitset> SolveResult::cumulative_levels() const {
  std::vector<Bitset> out(num_levels, Bitset(win.size()));
  for (std::size_t q = 0; q < level_of.size(); ++q)
    if (level_of[q] != kNoLevel)
      for (std::uint32_t k = level_of[q]; k < num_levels; ++k) out[k].set(q);
  return out;
}

SolveResult asw(const Arena& arena, EquivalenceMode mode, const Bitset& Y0,
                const SolveOptions& opts) {
  if (Y0.size() != arena.size())
    throw std::invalid_argument("asw: Y0 does not match the arena");
  if (!Y0.test(arena.final_state()))
    throw std::invalid_argument("asw: Y0 must contain the final state");

  SolveResult result;
  Bitset Y = Y0;
  std::vector<std::uint64_t> adds(Y.num_words(), 0ull);

  while (true) {
    ++result.stats.outer_iterations;
    // Least fixed point: attract towards the final state inside Y, with the
    // per-class action sets frozen against the current Y.
    ClassTable classes = build_class_table(arena, Y, mode, opts.parallel);
    Bitset R(arena.size());
    R.set(arena.final_state());
    result.level_of.assign(arena.size(), SolveResult::kNoLevel);
    result.level_of[arena.final_state()] = 0;
    std::uint32_t level = 0;
    while (true) {
      ++result.stats.inner_sweeps;
      if (!sweep(arena, Y, classes, mode, R, result.level_of, level + 1, adds,
                 opts.parallel))
        break;
      ++level;
    }
    result.num_levels = level + 1;
    result.stats.outer_sizes.push_back(R.count());
    // Greatest fixed point: keep only what the inner pass retained.
    if (R == Y) {
      result.win = std::move(R);
      break;
    }
    Y = std::move(R);
  }
  return result;
}

PipelineResult solve_pipeline(const Arena& arena, const SolveOptions& opts) {
  PipelineResult out;
  Bitset everything(arena.size());
  everything.fill();
  out.perfect = asw(arena, EquivalenceMode::kPerfect, everything, opts);

  // Determinacy of the perfect-observation game: outside its win set the
  // attacker reaches a positive probability of trapping the defender.
  out.win2_positive = out.perfect.win;
  out.win2_positive.complement();

  // The belief-level game is played inside what perfect observation can
  // defend; the final state is trivially perfect-winning, so the seed is
  // well-formed.
  out.belief = asw(arena, EquivalenceMode::kBelief, out.perfect.win, opts);
  return out;
}

}  // namespace beliefwin
