#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "beliefwin/arena.hpp"
#include "beliefwin/manifest.hpp"
#include "beliefwin/rng.hpp"
#include "beliefwin/solve.hpp"

namespace beliefwin {

struct ActionPair {
  ControlIndex control;
  QueryIndex query;
  friend bool operator==(const ActionPair&, const ActionPair&) = default;
};

class UnknownBelief : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Belief-keyed randomized control-and-sensing strategy.  Each entry holds
/// the full set of actions that keep every state of the belief inside the
/// win set; `act` randomizes uniformly over them.  Entries are kept sorted
/// by belief (as sorted state-index sequences) for stable serialization.
class StrategyTable {
 public:
  struct Entry {
    Bitset belief;
    std::vector<ActionPair> actions;  // sorted by (control, query)
    friend bool operator==(const Entry&, const Entry&) = default;
  };

  explicit StrategyTable(std::size_t num_states = 0) : num_states_(num_states) {}

  std::size_t num_states() const { return num_states_; }
  std::size_t size() const { return entries_.size(); }
  const std::vector<Entry>& entries() const { return entries_; }
  const Entry* lookup(const Bitset& belief) const;

  /// Inserts an entry (beliefs must be unique); used by extraction and the
  /// strategy-file loader.
  void insert(Bitset belief, std::vector<ActionPair> actions);

  friend bool operator==(const StrategyTable& a, const StrategyTable& b) {
    return a.num_states_ == b.num_states_ && a.entries_ == b.entries_;
  }

 private:
  std::size_t num_states_;
  std::vector<Entry> entries_;
  std::unordered_map<Bitset, std::size_t, BitsetHash> index_;
};

/// Builds the table from a belief-level solve: one entry per belief class
/// that intersects the win set, holding allow_class against the win set.
/// An empty entry for an intersecting class signals a solver bug and throws
/// std::logic_error.
StrategyTable extract(const Arena& arena, const SolveResult& belief_result);

/// Uniform draw among the entry's actions.  Throws UnknownBelief when the
/// table has no entry for the given belief.
ActionPair act(const StrategyTable& table, const Bitset& belief, Rng& rng);

/// On-disk form of a solved strategy: provenance, the belief-keyed table and
/// the winning certificate.  Beliefs are serialized as sorted state-name
/// arrays and queries as sorted sensor-name arrays, so output is stable and
/// diffable.
struct StrategyDocument {
  RunManifest manifest;
  StrategyTable table;
  Certificate certificate;
  std::size_t arena_states = 0;
};

std::string strategy_to_json(const ValidatedSpec& spec,
                             const StrategyDocument& doc);
/// Parses and resolves a strategy document against `spec`.  Throws
/// ParseError on malformed or unresolvable content (unknown names, a query
/// not in the alphabet, out-of-range certificate indices, missing fields).
StrategyDocument strategy_from_json(const ValidatedSpec& spec,
                                    const std::string& json_text);

}  // namespace beliefwin
