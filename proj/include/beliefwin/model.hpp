#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "beliefwin/bitset.hpp"

namespace beliefwin {

using StateIndex = std::uint32_t;
using ControlIndex = std::uint32_t;
using SensorIndex = std::uint32_t;
using QueryIndex = std::uint32_t;
using AttackIndex = std::uint32_t;

/// Raw, possibly inconsistent description of a control-and-sensing game as it
/// comes out of a spec file.  Everything is by name; `validate` resolves names
/// and checks the structural invariants.
struct GameSpec {
  struct Sensor {
    std::string name;
    std::vector<std::string> coverage;
  };
  struct Successor {
    std::string state;
    double prob = 0.0;
  };
  struct Transition {
    std::string from;
    std::string action;
    std::vector<Successor> to;
  };

  std::vector<std::string> states;
  std::vector<std::string> actions;
  std::vector<Sensor> sensors;
  std::vector<std::vector<std::string>> queries;
  /// Attack alphabet; an empty inner list is the no-attack action.
  std::vector<std::vector<std::string>> attacks;
  std::vector<Transition> transitions;
  std::string initial_state;
  /// Empty means "defaults to {initial_state}".
  std::vector<std::string> initial_observation;
  std::vector<std::string> goal;
};

enum class DiagnosticCode {
  kEmptyAlphabet,
  kDuplicateName,
  kUnknownState,
  kUnknownAction,
  kUnknownSensor,
  kDuplicateQuery,
  kDuplicateAttack,
  kMissingNoAttack,
  kNonTotalTransition,
  kDuplicateTransition,
  kBadDistribution,
  kInitialStateNotInObservation,
  kGoalOutsideStateSpace,
};

struct Diagnostic {
  DiagnosticCode code;
  std::string where;    // e.g. "transitions[s0,a2]"
  std::string message;  // human-readable detail
};

const char* diagnostic_code_name(DiagnosticCode code);

struct ValidateOptions {
  /// The no-attack action must be part of the attack alphabet unless a
  /// sensitivity study deliberately removes it.
  bool require_no_attack = true;
};

/// Immutable, index-resolved game model.  Transition rows are total over
/// states x actions, probabilities sum to 1 (1e-9 tolerance), successors are
/// sorted by state index, and per-row supports are precomputed.
class ValidatedSpec {
 public:
  struct SuccessorEntry {
    StateIndex state;
    double prob;
  };
  struct Row {
    std::vector<SuccessorEntry> entries;
    Bitset support;  // over states
  };

  std::size_t num_states() const { return state_names_.size(); }
  std::size_t num_actions() const { return action_names_.size(); }
  std::size_t num_sensors() const { return sensor_names_.size(); }
  std::size_t num_queries() const { return query_sensors_.size(); }
  std::size_t num_attacks() const { return attack_sensors_.size(); }

  const std::string& state_name(StateIndex s) const { return state_names_[s]; }
  const std::string& action_name(ControlIndex a) const { return action_names_[a]; }
  const std::string& sensor_name(SensorIndex i) const { return sensor_names_[i]; }
  std::optional<StateIndex> find_state(const std::string& name) const;
  std::optional<ControlIndex> find_action(const std::string& name) const;
  std::optional<SensorIndex> find_sensor(const std::string& name) const;

  /// Coverage of sensor i as a state set.
  const Bitset& coverage(SensorIndex i) const { return coverage_[i]; }
  /// Sensors of query q / attack b, ascending by sensor index.
  const std::vector<SensorIndex>& query_sensors(QueryIndex q) const {
    return query_sensors_[q];
  }
  const std::vector<SensorIndex>& attack_sensors(AttackIndex b) const {
    return attack_sensors_[b];
  }
  const Bitset& query_mask(QueryIndex q) const { return query_masks_[q]; }
  const Bitset& attack_mask(AttackIndex b) const { return attack_masks_[b]; }
  /// Resolves a sensor set to its query index, if the alphabet contains it.
  std::optional<QueryIndex> find_query(const Bitset& sensors) const;

  /// Index of the no-attack action, if present.
  std::optional<AttackIndex> no_attack() const { return no_attack_; }

  StateIndex initial_state() const { return initial_state_; }
  const Bitset& initial_observation() const { return initial_observation_; }
  const Bitset& goal() const { return goal_; }

  const Row& row(StateIndex s, ControlIndex a) const {
    return rows_[s * num_actions() + a];
  }
  /// Support of the transition distribution from (s, a).
  const Bitset& post(StateIndex s, ControlIndex a) const {
    return row(s, a).support;
  }
  /// Union of post over a non-empty belief.  Throws std::invalid_argument on
  /// an empty belief.
  Bitset post_belief(const Bitset& belief, ControlIndex a) const;

  /// Checks every structural invariant of `raw`.  On success returns the
  /// resolved model; on failure returns nullopt and appends one diagnostic
  /// per violated constraint.
  static std::optional<ValidatedSpec> validate(const GameSpec& raw,
                                               std::vector<Diagnostic>& diags,
                                               const ValidateOptions& opts = {});

 private:
  std::vector<std::string> state_names_;
  std::vector<std::string> action_names_;
  std::vector<std::string> sensor_names_;
  std::vector<Bitset> coverage_;
  std::vector<std::vector<SensorIndex>> query_sensors_;
  std::vector<std::vector<SensorIndex>> attack_sensors_;
  std::vector<Bitset> query_masks_;
  std::vector<Bitset> attack_masks_;
  std::optional<AttackIndex> no_attack_;
  std::vector<Row> rows_;
  StateIndex initial_state_ = 0;
  Bitset initial_observation_;
  Bitset goal_;
};

/// Thrown when a spec or strategy file cannot be parsed at all (I/O error,
/// malformed JSON, missing or mistyped fields).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

GameSpec load_game_spec(std::istream& in, const std::string& origin = "<stream>");
GameSpec load_game_spec_file(const std::string& path);
std::string game_spec_to_json(const GameSpec& spec);

}  // namespace beliefwin
