#include "beliefwin/spec_gen.hpp"

#include <set>
#include <string>
#include <vector>

#include "beliefwin/rng.hpp"

namespace beliefwin {

namespace {

std::vector<std::string> numbered(const char* prefix, std::uint32_t count) {
  std::vector<std::string> names;
  names.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i)
    names.push_back(prefix + std::to_string(i));
  return names;
}

/// Random subset of `names`, each member kept with probability `density`.
std::vector<std::string> random_subset(Rng& rng,
                                       const std::vector<std::string>& names,
                                       double density) {
  std::vector<std::string> out;
  for (const std::string& n : names)
    if (rng.next_double() < density) out.push_back(n);
  return out;
}

}  // namespace

GameSpec generate_spec(const SpecGenConfig& config) {
  Rng rng(config.seed);
  GameSpec spec;

  const std::uint32_t span = config.max_states - config.min_states + 1;
  const std::uint32_t num_states =
      config.min_states + static_cast<std::uint32_t>(rng.bounded(span));
  const std::uint32_t num_actions =
      1 + static_cast<std::uint32_t>(rng.bounded(config.max_actions));
  const std::uint32_t num_sensors =
      1 + static_cast<std::uint32_t>(rng.bounded(config.max_sensors));

  spec.states = numbered("s", num_states);
  spec.actions = numbered("a", num_actions);

  const std::vector<std::string> sensor_names = numbered("g", num_sensors);
  for (const std::string& name : sensor_names)
    spec.sensors.push_back({name, random_subset(rng, spec.states, 0.5)});

  // Queries and attacks are sets of sensors; duplicates (as sets) would be
  // rejected by validation, so draws that repeat an earlier mask are dropped.
  auto draw_sensor_sets = [&](std::uint32_t want, bool seed_with_empty) {
    std::vector<std::vector<std::string>> sets;
    std::set<std::uint64_t> seen;
    if (seed_with_empty) {
      sets.push_back({});
      seen.insert(0);
    }
    for (std::uint32_t attempt = 0; attempt < 4 * want && sets.size() < want;
         ++attempt) {
      std::uint64_t mask = 0;
      std::vector<std::string> members;
      for (std::uint32_t i = 0; i < num_sensors; ++i)
        if (rng.bounded(2) == 1) {
          mask |= std::uint64_t{1} << i;
          members.push_back(sensor_names[i]);
        }
      if (seen.insert(mask).second) sets.push_back(std::move(members));
    }
    return sets;
  };

  const std::uint32_t num_queries =
      1 + static_cast<std::uint32_t>(rng.bounded(config.max_queries));
  spec.queries = draw_sensor_sets(num_queries, /*seed_with_empty=*/false);
  if (spec.queries.empty()) spec.queries.push_back({});

  const std::uint32_t num_attacks =
      1 + static_cast<std::uint32_t>(rng.bounded(config.max_attacks));
  spec.attacks = draw_sensor_sets(num_attacks, /*seed_with_empty=*/true);

  for (std::uint32_t s = 0; s < num_states; ++s) {
    for (std::uint32_t a = 0; a < num_actions; ++a) {
      std::vector<StateIndex> support;
      for (std::uint32_t t = 0; t < num_states; ++t)
        if (rng.next_double() < config.edge_density) support.push_back(t);
      if (support.empty())
        support.push_back(static_cast<StateIndex>(rng.bounded(num_states)));

      std::vector<std::uint64_t> weights(support.size());
      std::uint64_t total = 0;
      for (std::uint64_t& w : weights) {
        w = 1 + rng.bounded(1000);
        total += w;
      }
      GameSpec::Transition tr;
      tr.from = spec.states[s];
      tr.action = spec.actions[a];
      for (std::size_t i = 0; i < support.size(); ++i)
        tr.to.push_back({spec.states[support[i]],
                         static_cast<double>(weights[i]) /
                             static_cast<double>(total)});
      spec.transitions.push_back(std::move(tr));
    }
  }

  spec.goal = random_subset(rng, spec.states, config.goal_density);
  spec.initial_state = spec.states[0];
  spec.initial_observation.push_back(spec.states[0]);
  for (std::uint32_t s = 1; s < num_states; ++s)
    if (rng.bounded(2) == 1)
      spec.initial_observation.push_back(spec.states[s]);

  return spec;
}

}  // namespace beliefwin
