#pragma once

#include <cstdint>

#include "beliefwin/model.hpp"

namespace beliefwin {

/// Parameters for random game generation (property tests, fuzzing and
/// benchmarks).  All draws derive from `seed`, so a config identifies its
/// game exactly.
struct SpecGenConfig {
  std::uint64_t seed = 0;
  std::uint32_t min_states = 2;
  std::uint32_t max_states = 6;
  std::uint32_t max_actions = 2;
  std::uint32_t max_sensors = 3;
  std::uint32_t max_queries = 3;
  std::uint32_t max_attacks = 3;   // including the no-attack action
  double edge_density = 0.5;       // chance a state joins a transition support
  double goal_density = 0.3;       // chance a state is a goal
};

/// Generates a syntactically valid game: total transitions with normalised
/// strictly-positive probabilities, deduplicated query and attack alphabets
/// always containing the no-attack action, and an initial observation that
/// contains the initial state.
GameSpec generate_spec(const SpecGenConfig& config);

}  // namespace beliefwin
