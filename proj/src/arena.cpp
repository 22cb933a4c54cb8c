#include "beliefwin/arena.hpp"

#include <cassert>
#include <deque>
#include <ostream>
#include <sstream>

#include "beliefwin/rng.hpp"

namespace beliefwin {

NatureStateDesc p1_step(const ValidatedSpec& spec, const P1StateDesc& q,
                        ControlIndex control, QueryIndex query) {
  return NatureStateDesc{q.s, spec.post_belief(q.belief, control), control, query};
}

std::vector<NatureOutcome> nature_step(const ValidatedSpec& spec,
                                       const NatureStateDesc& q) {
  const auto& row = spec.row(q.s, q.control);
  std::vector<NatureOutcome> out;
  out.reserve(row.entries.size());
  double goal_mass = 0.0;
  for (const auto& e : row.entries)
    if (spec.goal().test(e.state)) goal_mass += e.prob;
  if (goal_mass > 0.0)
    out.push_back({true, P2StateDesc{0, Bitset(), 0}, goal_mass});
  for (const auto& e : row.entries) {
    if (spec.goal().test(e.state)) continue;
    out.push_back({false, P2StateDesc{e.state, q.belief, q.query}, e.prob});
  }
  return out;
}

P1StateDesc p2_step(const ValidatedSpec& spec, const P2StateDesc& q,
                    AttackIndex attack) {
  Bitset refined = q.belief;
  refined &= observe(spec, q.s, q.query, attack);
  return P1StateDesc{q.s, std::move(refined)};
}

// ------------------------------------------------------------------ Arena ---

std::size_t Arena::NodeKeyHash::operator()(const NodeKey& k) const {
  return static_cast<std::size_t>(mix64(k.lo) ^ (mix64(k.hi) * 0x9e3779b97f4a7c15ull));
}

Arena::NodeKey Arena::make_key(StateKind kind, StateIndex s, std::uint32_t belief,
                               std::uint16_t control, std::uint16_t query) const {
  NodeKey k;
  k.lo = static_cast<std::uint64_t>(s) |
         (static_cast<std::uint64_t>(belief) << 32);
  k.hi = static_cast<std::uint64_t>(kind) |
         (static_cast<std::uint64_t>(control) << 8) |
         (static_cast<std::uint64_t>(query) << 24);
  return k;
}

std::span<const NatureEdge> Arena::nature_edges(std::uint32_t q) const {
  const std::uint32_t ord = states_[q].ordinal;
  return {nature_edges_.data() + nature_edges_off_[ord],
          nature_edges_off_[ord + 1] - nature_edges_off_[ord]};
}

std::uint32_t Arena::find_p1(StateIndex s, const Bitset& belief) const {
  auto bit = belief_ids_.find(belief);
  if (bit == belief_ids_.end()) return npos32;
  auto it = index_.find(make_key(StateKind::kP1, s, bit->second, 0, 0));
  return it == index_.end() ? npos32 : it->second;
}

std::uint32_t Arena::find_p2(StateIndex s, const Bitset& belief,
                             QueryIndex query) const {
  auto bit = belief_ids_.find(belief);
  if (bit == belief_ids_.end()) return npos32;
  auto it = index_.find(make_key(StateKind::kP2, s, bit->second, 0,
                                 static_cast<std::uint16_t>(query)));
  return it == index_.end() ? npos32 : it->second;
}

std::uint32_t Arena::find_nature(StateIndex s, const Bitset& belief,
                                 ControlIndex a, QueryIndex query) const {
  auto bit = belief_ids_.find(belief);
  if (bit == belief_ids_.end()) return npos32;
  auto it = index_.find(make_key(StateKind::kNature, s, bit->second,
                                 static_cast<std::uint16_t>(a),
                                 static_cast<std::uint16_t>(query)));
  return it == index_.end() ? npos32 : it->second;
}

std::string Arena::state_label(std::uint32_t q) const {
  const ArenaState& st = states_[q];
  if (st.kind == StateKind::kFinal) return "final";
  std::ostringstream out;
  out << '(' << spec_->state_name(st.s) << "|{";
  bool first = true;
  beliefs_[st.belief].for_each([&](std::size_t s) {
    if (!first) out << ',';
    first = false;
    out << spec_->state_name(static_cast<StateIndex>(s));
  });
  out << '}';
  if (st.kind == StateKind::kNature)
    out << '|' << spec_->action_name(st.control) << ",Q" << st.query;
  if (st.kind == StateKind::kP2) out << "|Q" << st.query;
  out << ')';
  return out.str();
}

void Arena::to_dot(std::ostream& out) const {
  out << "digraph arena {\n  rankdir=LR;\n";
  for (std::uint32_t q = 0; q < states_.size(); ++q) {
    const char* shape = nullptr;
    switch (states_[q].kind) {
      case StateKind::kP1: shape = "ellipse"; break;
      case StateKind::kNature: shape = "diamond"; break;
      case StateKind::kP2: shape = "box"; break;
      case StateKind::kFinal: shape = "doublecircle"; break;
    }
    out << "  q" << q << " [shape=" << shape << ",label=\"" << state_label(q)
        << "\"];\n";
  }
  for (std::uint32_t q = 0; q < states_.size(); ++q) {
    const ArenaState& st = states_[q];
    switch (st.kind) {
      case StateKind::kP1:
        for (std::uint32_t a = 0; a < spec_->num_actions(); ++a)
          for (std::uint32_t s = 0; s < spec_->num_queries(); ++s)
            out << "  q" << q << " -> q" << p1_successor(q, action_id(a, s))
                << " [label=\"" << spec_->action_name(a) << ",Q" << s
                << "\"];\n";
        break;
      case StateKind::kNature:
        for (const NatureEdge& e : nature_edges(q))
          out << "  q" << q << " -> q" << e.target << " [label=\"" << e.prob
              << "\"];\n";
        break;
      case StateKind::kP2:
        for (std::uint32_t b = 0; b < spec_->num_attacks(); ++b) {
          out << "  q" << q << " -> q" << p2_successor(q, b) << " [label=\"{";
          bool first = true;
          for (SensorIndex i : spec_->attack_sensors(b)) {
            if (!first) out << ',';
            first = false;
            out << spec_->sensor_name(i);
          }
          out << "}\"];\n";
        }
        break;
      case StateKind::kFinal:
        out << "  q" << q << " -> q" << q << " [label=\"1\"];\n";
        break;
    }
  }
  out << "}\n";
}

Arena build_arena(std::shared_ptr<const ValidatedSpec> spec,
                  const ArenaOptions& opts) {
  Arena arena;
  arena.spec_ = spec;
  const ValidatedSpec& g = *spec;

  auto intern_belief = [&](const Bitset& belief) -> std::uint32_t {
    auto it = arena.belief_ids_.find(belief);
    if (it != arena.belief_ids_.end()) return it->second;
    std::uint32_t id = static_cast<std::uint32_t>(arena.beliefs_.size());
    arena.beliefs_.push_back(belief);
    arena.belief_ids_.emplace(belief, id);
    return id;
  };

  std::deque<std::uint32_t> queue;
  auto intern_state = [&](StateKind kind, StateIndex s, std::uint32_t belief,
                          std::uint16_t control,
                          std::uint16_t query) -> std::uint32_t {
    auto key = arena.make_key(kind, s, belief, control, query);
    auto it = arena.index_.find(key);
    if (it != arena.index_.end()) return it->second;
    if (arena.states_.size() >= opts.max_states)
      throw ArenaTooLarge(opts.max_states);
    // The true state must never fall out of the tracked belief.
    if ((kind == StateKind::kP1 || kind == StateKind::kP2) &&
        !arena.beliefs_[belief].test(s))
      throw std::logic_error("arena construction: state " + g.state_name(s) +
                             " escaped its belief");
    std::uint32_t id = static_cast<std::uint32_t>(arena.states_.size());
    std::uint32_t ordinal = 0;
    switch (kind) {
      case StateKind::kP1: ordinal = static_cast<std::uint32_t>(arena.p1_count_++); break;
      case StateKind::kNature: ordinal = static_cast<std::uint32_t>(arena.nature_count_++); break;
      case StateKind::kP2: ordinal = static_cast<std::uint32_t>(arena.p2_count_++); break;
      case StateKind::kFinal: break;
    }
    arena.states_.push_back({kind, s, belief, control, query, ordinal});
    arena.index_.emplace(key, id);
    if (kind != StateKind::kFinal) queue.push_back(id);
    return id;
  };

  Bitset b0 = g.initial_observation();
  arena.initial_ =
      intern_state(StateKind::kP1, g.initial_state(), intern_belief(b0), 0, 0);
  arena.final_ = intern_state(StateKind::kFinal, 0, 0, 0, 0);
  arena.nature_edges_off_.push_back(0);

  while (!queue.empty()) {
    const std::uint32_t id = queue.front();
    queue.pop_front();
    // Copy: intern_state may reallocate states_.
    const ArenaState st = arena.states_[id];
    switch (st.kind) {
      case StateKind::kP1: {
        const P1StateDesc desc{st.s, arena.beliefs_[st.belief]};
        assert(arena.p1_edges_.size() == st.ordinal * arena.num_p1_actions());
        for (ControlIndex a = 0; a < g.num_actions(); ++a) {
          for (QueryIndex qu = 0; qu < g.num_queries(); ++qu) {
            NatureStateDesc nat = p1_step(g, desc, a, qu);
            arena.p1_edges_.push_back(intern_state(
                StateKind::kNature, nat.s, intern_belief(nat.belief),
                static_cast<std::uint16_t>(a), static_cast<std::uint16_t>(qu)));
          }
        }
        break;
      }
      case StateKind::kNature: {
        const NatureStateDesc desc{st.s, arena.beliefs_[st.belief], st.control,
                                   st.query};
        for (const NatureOutcome& o : nature_step(g, desc)) {
          std::uint32_t target =
              o.to_final ? arena.final_
                         : intern_state(StateKind::kP2, o.p2.s, st.belief, 0,
                                        st.query);
          arena.nature_edges_.push_back({target, o.prob});
        }
        arena.nature_edges_off_.push_back(
            static_cast<std::uint32_t>(arena.nature_edges_.size()));
        break;
      }
      case StateKind::kP2: {
        const P2StateDesc desc{st.s, arena.beliefs_[st.belief], st.query};
        assert(arena.p2_edges_.size() == st.ordinal * g.num_attacks());
        for (AttackIndex b = 0; b < g.num_attacks(); ++b) {
          P1StateDesc next = p2_step(g, desc, b);
          arena.p2_edges_.push_back(intern_state(
              StateKind::kP1, next.s, intern_belief(next.belief), 0, 0));
        }
        break;
      }
      case StateKind::kFinal:
        break;
    }
  }

  // Belief classes over reachable P1 states, ids in first-encounter order.
  arena.class_of_.assign(arena.beliefs_.size(), Arena::npos32);
  std::vector<std::vector<std::uint32_t>> members;
  for (std::uint32_t q = 0; q < arena.states_.size(); ++q) {
    if (arena.states_[q].kind != StateKind::kP1) continue;
    std::uint32_t bid = arena.states_[q].belief;
    if (arena.class_of_[bid] == Arena::npos32) {
      arena.class_of_[bid] = static_cast<std::uint32_t>(members.size());
      arena.class_beliefs_.push_back(bid);
      members.emplace_back();
    }
    members[arena.class_of_[bid]].push_back(q);
  }
  arena.class_members_off_.push_back(0);
  for (auto& m : members) {
    arena.class_members_.insert(arena.class_members_.end(), m.begin(), m.end());
    arena.class_members_off_.push_back(arena.class_members_.size());
  }

  return arena;
}

}  // namespace beliefwin
