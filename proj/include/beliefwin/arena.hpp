#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "beliefwin/bitset.hpp"
#include "beliefwin/model.hpp"
#include "beliefwin/observe.hpp"

namespace beliefwin {

/// The augmented game alternates three kinds of decision states plus one
/// absorbing goal state:
///   P1      (s, B):          the defender picks a control and a sensor query;
///   Nature  (s, B', a, q):   the environment samples the successor state;
///   P2      (s', B', q):     the attacker picks a sensor set to jam;
///   Final:                   entered as soon as the sampled state is a goal.
enum class StateKind : std::uint8_t { kP1, kNature, kP2, kFinal };

struct P1StateDesc {
  StateIndex s;
  Bitset belief;
};
struct NatureStateDesc {
  StateIndex s;
  Bitset belief;  // already advanced by the chosen control
  ControlIndex control;
  QueryIndex query;
};
struct P2StateDesc {
  StateIndex s;
  Bitset belief;
  QueryIndex query;
};

/// One sampled outcome of a nature state: either the final state (goal mass)
/// or a P2 state for a non-goal successor.
struct NatureOutcome {
  bool to_final;
  P2StateDesc p2;  // meaningful when !to_final
  double prob;
};

/// P1 commits (a, q): the state is resampled later, the belief advances now.
NatureStateDesc p1_step(const ValidatedSpec& spec, const P1StateDesc& q,
                        ControlIndex control, QueryIndex query);

/// Splits the transition distribution from (s, a): all goal mass is collected
/// on the final state, every non-goal successor keeps its probability.
std::vector<NatureOutcome> nature_step(const ValidatedSpec& spec,
                                       const NatureStateDesc& q);

/// P2 jams `attack`; the belief is refined by the surviving readings.
P1StateDesc p2_step(const ValidatedSpec& spec, const P2StateDesc& q,
                    AttackIndex attack);

struct ArenaState {
  StateKind kind;
  StateIndex s;            // undefined for kFinal
  std::uint32_t belief;    // belief pool id; undefined for kFinal
  std::uint16_t control;   // kNature only
  std::uint16_t query;     // kNature and kP2
  std::uint32_t ordinal;   // index within its kind, in creation order
};

struct NatureEdge {
  std::uint32_t target;
  double prob;
};

class ArenaTooLarge : public std::runtime_error {
 public:
  explicit ArenaTooLarge(std::size_t limit)
      : std::runtime_error("arena exceeds " + std::to_string(limit) +
                           " states"),
        limit(limit) {}
  std::size_t limit;
};

struct ArenaOptions {
  /// Hard cap on materialised arena states; exceeded -> ArenaTooLarge.
  std::size_t max_states = 10'000'000;
};

/// Reachable fragment of the augmented game, explored breadth-first from
/// (initial_state, initial_observation).  Numbering is deterministic: states
/// get ids in creation order, P1 actions are expanded control-major, nature
/// outcomes goal-mass first then by successor index, attacks in declaration
/// order.  Rebuilding from the same spec reproduces ids bit for bit.
class Arena {
 public:
  const ValidatedSpec& spec() const { return *spec_; }
  std::shared_ptr<const ValidatedSpec> spec_ptr() const { return spec_; }

  std::size_t size() const { return states_.size(); }
  const ArenaState& state(std::uint32_t q) const { return states_[q]; }
  std::uint32_t initial() const { return initial_; }
  std::uint32_t final_state() const { return final_; }

  std::size_t num_p1_states() const { return p1_count_; }
  std::size_t num_nature_states() const { return nature_count_; }
  std::size_t num_p2_states() const { return p2_count_; }

  const Bitset& belief(std::uint32_t pool_id) const { return beliefs_[pool_id]; }
  const Bitset& belief_of(std::uint32_t q) const {
    return beliefs_[states_[q].belief];
  }

  /// P1 actions are pairs (control, query) flattened control-major.
  std::size_t num_p1_actions() const {
    return spec_->num_actions() * spec_->num_queries();
  }
  std::uint32_t action_id(ControlIndex a, QueryIndex q) const {
    return static_cast<std::uint32_t>(a * spec_->num_queries() + q);
  }
  std::uint32_t p1_successor(std::uint32_t q, std::uint32_t action) const {
    return p1_edges_[states_[q].ordinal * num_p1_actions() + action];
  }
  std::span<const NatureEdge> nature_edges(std::uint32_t q) const;
  std::uint32_t p2_successor(std::uint32_t q, AttackIndex b) const {
    return p2_edges_[states_[q].ordinal * spec_->num_attacks() + b];
  }

  /// Reachable P1 states sharing a belief form one class; class ids follow
  /// first-encounter order.
  std::size_t num_belief_classes() const { return class_members_off_.size() - 1; }
  std::uint32_t class_of(std::uint32_t p1_state) const {
    return class_of_[states_[p1_state].belief];
  }
  std::span<const std::uint32_t> class_members(std::uint32_t cls) const {
    return {class_members_.data() + class_members_off_[cls],
            class_members_off_[cls + 1] - class_members_off_[cls]};
  }
  std::uint32_t class_belief(std::uint32_t cls) const { return class_beliefs_[cls]; }

  /// Lookup of materialised states; npos32 when absent.
  static constexpr std::uint32_t npos32 = static_cast<std::uint32_t>(-1);
  std::uint32_t find_p1(StateIndex s, const Bitset& belief) const;
  std::uint32_t find_p2(StateIndex s, const Bitset& belief, QueryIndex query) const;
  std::uint32_t find_nature(StateIndex s, const Bitset& belief, ControlIndex a,
                            QueryIndex query) const;

  std::string state_label(std::uint32_t q) const;
  /// Graphviz export; node ids are q<N> with N the arena index.
  void to_dot(std::ostream& out) const;

  friend Arena build_arena(std::shared_ptr<const ValidatedSpec> spec,
                           const ArenaOptions& opts);

 private:
  std::shared_ptr<const ValidatedSpec> spec_;
  std::vector<ArenaState> states_;
  std::vector<Bitset> beliefs_;
  std::uint32_t initial_ = 0;
  std::uint32_t final_ = 0;
  std::size_t p1_count_ = 0, nature_count_ = 0, p2_count_ = 0;

  std::vector<std::uint32_t> p1_edges_;            // p1 ordinal * actions
  std::vector<std::uint32_t> nature_edges_off_;    // CSR over nature ordinals
  std::vector<NatureEdge> nature_edges_;
  std::vector<std::uint32_t> p2_edges_;            // p2 ordinal * attacks

  std::vector<std::uint32_t> class_of_;            // belief pool id -> class
  std::vector<std::uint32_t> class_beliefs_;       // class -> belief pool id
  std::vector<std::uint32_t> class_members_;       // CSR of P1 state indices
  std::vector<std::size_t> class_members_off_;

  struct NodeKey {
    std::uint64_t lo, hi;  // lo: s | belief<<32; hi: kind | control<<8 | query<<24
    bool operator==(const NodeKey&) const = default;
  };
  struct NodeKeyHash {
    std::size_t operator()(const NodeKey& k) const;
  };
  std::unordered_map<NodeKey, std::uint32_t, NodeKeyHash> index_;
  std::unordered_map<Bitset, std::uint32_t, BitsetHash> belief_ids_;

  NodeKey make_key(StateKind kind, StateIndex s, std::uint32_t belief,
                   std::uint16_t control, std::uint16_t query) const;
};

/// Explores the reachable arena.  Verifies on the fly that every created
/// P1/P2 state satisfies s in B (the belief never loses the true state); a
/// violation is a construction bug and aborts with std::logic_error.
Arena build_arena(std::shared_ptr<const ValidatedSpec> spec,
                  const ArenaOptions& opts = {});

}  // namespace beliefwin
