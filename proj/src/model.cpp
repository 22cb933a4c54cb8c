#include "beliefwin/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"

namespace beliefwin {

namespace {

using NameMap = std::unordered_map<std::string, std::uint32_t>;

NameMap index_names(const std::vector<std::string>& names) {
  NameMap map;
  for (std::uint32_t i = 0; i < names.size(); ++i) map.emplace(names[i], i);
  return map;
}

constexpr double kProbTolerance = 1e-9;

}  // namespace

const char* diagnostic_code_name(DiagnosticCode code) {
  switch (code) {
    case DiagnosticCode::kEmptyAlphabet: return "EmptyAlphabet";
    case DiagnosticCode::kDuplicateName: return "DuplicateName";
    case DiagnosticCode::kUnknownState: return "UnknownState";
    case DiagnosticCode::kUnknownAction: return "UnknownAction";
    case DiagnosticCode::kUnknownSensor: return "UnknownSensor";
    case DiagnosticCode::kDuplicateQuery: return "DuplicateQuery";
    case DiagnosticCode::kDuplicateAttack: return "DuplicateAttack";
    case DiagnosticCode::kMissingNoAttack: return "MissingNoAttack";
    case DiagnosticCode::kNonTotalTransition: return "NonTotalTransition";
    case DiagnosticCode::kDuplicateTransition: return "DuplicateTransition";
    case DiagnosticCode::kBadDistribution: return "BadDistribution";
    case DiagnosticCode::kInitialStateNotInObservation:
      return "InitialStateNotInObservation";
    case DiagnosticCode::kGoalOutsideStateSpace: return "GoalOutsideStateSpace";
  }
  return "Unknown";
}

std::optional<StateIndex> ValidatedSpec::find_state(const std::string& name) const {
  for (std::uint32_t i = 0; i < state_names_.size(); ++i)
    if (state_names_[i] == name) return i;
  return std::nullopt;
}

std::optional<ControlIndex> ValidatedSpec::find_action(const std::string& name) const {
  for (std::uint32_t i = 0; i < action_names_.size(); ++i)
    if (action_names_[i] == name) return i;
  return std::nullopt;
}

std::optional<SensorIndex> ValidatedSpec::find_sensor(const std::string& name) const {
  for (std::uint32_t i = 0; i < sensor_names_.size(); ++i)
    if (sensor_names_[i] == name) return i;
  return std::nullopt;
}

std::optional<QueryIndex> ValidatedSpec::find_query(const Bitset& sensors) const {
  for (std::uint32_t q = 0; q < query_masks_.size(); ++q)
    if (query_masks_[q] == sensors) return q;
  return std::nullopt;
}

Bitset ValidatedSpec::post_belief(const Bitset& belief, ControlIndex a) const {
  if (belief.none())
    throw std::invalid_argument("post_belief: empty belief");
  Bitset out(num_states());
  belief.for_each([&](std::size_t s) {
    out |= post(static_cast<StateIndex>(s), a);
  });
  return out;
}

std::optional<ValidatedSpec> ValidatedSpec::validate(
    const GameSpec& raw, std::vector<Diagnostic>& diags,
    const ValidateOptions& opts) {
  const std::size_t before = diags.size();
  auto fail = [&](DiagnosticCode code, std::string where, std::string message) {
    diags.push_back({code, std::move(where), std::move(message)});
  };

  auto check_unique = [&](const std::vector<std::string>& names,
                          const char* what) {
    std::unordered_set<std::string> seen;
    for (const auto& n : names)
      if (!seen.insert(n).second)
        fail(DiagnosticCode::kDuplicateName, what, "duplicate name '" + n + "'");
  };

  if (raw.states.empty())
    fail(DiagnosticCode::kEmptyAlphabet, "states", "no states declared");
  if (raw.actions.empty())
    fail(DiagnosticCode::kEmptyAlphabet, "actions", "no control actions declared");
  if (raw.queries.empty())
    fail(DiagnosticCode::kEmptyAlphabet, "queries", "no sensor queries declared");
  if (raw.attacks.empty())
    fail(DiagnosticCode::kEmptyAlphabet, "attacks", "no attack actions declared");
  check_unique(raw.states, "states");
  check_unique(raw.actions, "actions");
  {
    std::vector<std::string> sensor_names;
    for (const auto& s : raw.sensors) sensor_names.push_back(s.name);
    check_unique(sensor_names, "sensors");
  }
  if (diags.size() != before) return std::nullopt;

  ValidatedSpec out;
  out.state_names_ = raw.states;
  out.action_names_ = raw.actions;
  const NameMap states = index_names(raw.states);
  const NameMap actions = index_names(raw.actions);

  auto resolve_state = [&](const std::string& name, const std::string& where,
                           DiagnosticCode code =
                               DiagnosticCode::kUnknownState) -> std::optional<StateIndex> {
    auto it = states.find(name);
    if (it == states.end()) {
      fail(code, where, "unknown state '" + name + "'");
      return std::nullopt;
    }
    return it->second;
  };

  const std::size_t n = raw.states.size();

  // Sensors and their coverages.
  for (const auto& sensor : raw.sensors) {
    out.sensor_names_.push_back(sensor.name);
    Bitset cov(n);
    for (const auto& name : sensor.coverage)
      if (auto s = resolve_state(name, "sensors[" + sensor.name + "]"))
        cov.set(*s);
    out.coverage_.push_back(std::move(cov));
  }
  const NameMap sensors = index_names(out.sensor_names_);

  // Query and attack alphabets: resolved to ascending sensor-index lists,
  // set-equal duplicates rejected.
  auto resolve_sensor_sets =
      [&](const std::vector<std::vector<std::string>>& sets, const char* what,
          DiagnosticCode dup_code, std::vector<std::vector<SensorIndex>>& lists,
          std::vector<Bitset>& masks) {
        for (std::size_t k = 0; k < sets.size(); ++k) {
          Bitset mask(out.sensor_names_.size());
          std::vector<SensorIndex> list;
          for (const auto& name : sets[k]) {
            auto it = sensors.find(name);
            if (it == sensors.end()) {
              fail(DiagnosticCode::kUnknownSensor,
                   std::string(what) + "[" + std::to_string(k) + "]",
                   "unknown sensor '" + name + "'");
              continue;
            }
            if (!mask.test(it->second)) {
              mask.set(it->second);
              list.push_back(it->second);
            }
          }
          std::sort(list.begin(), list.end());
          for (std::size_t j = 0; j < masks.size(); ++j)
            if (masks[j] == mask)
              fail(dup_code, std::string(what) + "[" + std::to_string(k) + "]",
                   "duplicates entry " + std::to_string(j));
          lists.push_back(std::move(list));
          masks.push_back(std::move(mask));
        }
      };
  resolve_sensor_sets(raw.queries, "queries", DiagnosticCode::kDuplicateQuery,
                      out.query_sensors_, out.query_masks_);
  resolve_sensor_sets(raw.attacks, "attacks", DiagnosticCode::kDuplicateAttack,
                      out.attack_sensors_, out.attack_masks_);
  for (std::uint32_t b = 0; b < out.attack_masks_.size(); ++b)
    if (out.attack_masks_[b].none()) out.no_attack_ = b;
  if (opts.require_no_attack && !out.no_attack_)
    fail(DiagnosticCode::kMissingNoAttack, "attacks",
         "the attack alphabet does not contain the no-attack action");

  // Transition rows: exactly one per (state, action), each a distribution.
  const std::size_t na = raw.actions.size();
  out.rows_.assign(n * na, Row{});
  std::vector<bool> seen(n * na, false);
  for (const auto& t : raw.transitions) {
    auto s = resolve_state(t.from, "transitions[" + t.from + "," + t.action + "]");
    auto a_it = actions.find(t.action);
    if (a_it == actions.end())
      fail(DiagnosticCode::kUnknownAction,
           "transitions[" + t.from + "," + t.action + "]",
           "unknown action '" + t.action + "'");
    if (!s || a_it == actions.end()) continue;
    const std::string where = "transitions[" + t.from + "," + t.action + "]";
    const std::size_t idx = *s * na + a_it->second;
    if (seen[idx]) {
      fail(DiagnosticCode::kDuplicateTransition, where, "row declared twice");
      continue;
    }
    seen[idx] = true;

    Row row;
    row.support = Bitset(n);
    double sum = 0.0;
    bool ok = true;
    for (const auto& succ : t.to) {
      auto s2 = resolve_state(succ.state, where);
      if (!s2) {
        ok = false;
        continue;
      }
      if (!(succ.prob > 0.0) || succ.prob > 1.0 + kProbTolerance) {
        fail(DiagnosticCode::kBadDistribution, where,
             "probability " + std::to_string(succ.prob) + " to '" + succ.state +
                 "' outside (0, 1]");
        ok = false;
        continue;
      }
      if (row.support.test(*s2)) {
        fail(DiagnosticCode::kBadDistribution, where,
             "successor '" + succ.state + "' listed twice");
        ok = false;
        continue;
      }
      row.support.set(*s2);
      row.entries.push_back({*s2, succ.prob});
      sum += succ.prob;
    }
    if (ok && std::abs(sum - 1.0) > kProbTolerance) {
      fail(DiagnosticCode::kBadDistribution, where,
           "probabilities sum to " + std::to_string(sum));
      ok = false;
    }
    if (ok) {
      std::sort(row.entries.begin(), row.entries.end(),
                [](const SuccessorEntry& x, const SuccessorEntry& y) {
                  return x.state < y.state;
                });
      out.rows_[idx] = std::move(row);
    }
  }
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t a = 0; a < na; ++a)
      if (!seen[s * na + a])
        fail(DiagnosticCode::kNonTotalTransition,
             "transitions[" + raw.states[s] + "," + raw.actions[a] + "]",
             "no distribution declared");

  // Initial state, initial observation, goal.
  out.initial_observation_ = Bitset(n);
  out.goal_ = Bitset(n);
  if (auto s0 = resolve_state(raw.initial_state, "initial_state"))
    out.initial_state_ = *s0;
  if (raw.initial_observation.empty()) {
    if (auto s0 = resolve_state(raw.initial_state, "initial_state"))
      out.initial_observation_.set(*s0);
  } else {
    for (const auto& name : raw.initial_observation)
      if (auto s = resolve_state(name, "initial_observation"))
        out.initial_observation_.set(*s);
    auto s0 = states.find(raw.initial_state);
    if (s0 != states.end() && !out.initial_observation_.test(s0->second))
      fail(DiagnosticCode::kInitialStateNotInObservation, "initial_observation",
           "initial state '" + raw.initial_state +
               "' not contained in the initial observation");
  }
  for (const auto& name : raw.goal)
    if (auto s = resolve_state(name, "goal", DiagnosticCode::kGoalOutsideStateSpace))
      out.goal_.set(*s);

  if (diags.size() != before) return std::nullopt;
  return out;
}

// ----------------------------------------------------------------- JSON ---

namespace {

using nlohmann::json;

std::vector<std::string> string_list(const json& j, const std::string& where) {
  if (!j.is_array()) throw ParseError(where + ": expected an array of strings");
  std::vector<std::string> out;
  for (const auto& e : j) {
    if (!e.is_string()) throw ParseError(where + ": expected an array of strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

const json& require(const json& j, const char* key, const std::string& origin) {
  auto it = j.find(key);
  if (it == j.end())
    throw ParseError(origin + ": missing required field '" + key + "'");
  return *it;
}

}  // namespace

GameSpec load_game_spec(std::istream& in, const std::string& origin) {
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(origin + ": " + e.what());
  }
  if (!j.is_object()) throw ParseError(origin + ": top level is not an object");

  GameSpec spec;
  try {
    spec.states = string_list(require(j, "states", origin), "states");
    spec.actions = string_list(require(j, "actions", origin), "actions");
    for (const auto& s : require(j, "sensors", origin)) {
      GameSpec::Sensor sensor;
      sensor.name = require(s, "name", origin + ": sensors").get<std::string>();
      sensor.coverage = string_list(require(s, "coverage", origin + ": sensors"),
                                    "sensors[" + sensor.name + "].coverage");
      spec.sensors.push_back(std::move(sensor));
    }
    for (const auto& q : require(j, "queries", origin))
      spec.queries.push_back(string_list(q, "queries"));
    for (const auto& b : require(j, "attacks", origin))
      spec.attacks.push_back(string_list(b, "attacks"));
    for (const auto& t : require(j, "transitions", origin)) {
      GameSpec::Transition tr;
      tr.from = require(t, "from", origin + ": transitions").get<std::string>();
      tr.action = require(t, "action", origin + ": transitions").get<std::string>();
      for (const auto& succ : require(t, "to", origin + ": transitions")) {
        GameSpec::Successor e;
        e.state = require(succ, "state", origin + ": transitions").get<std::string>();
        const json& p = require(succ, "prob", origin + ": transitions");
        if (!p.is_number())
          throw ParseError(origin + ": transition probability is not a number");
        e.prob = p.get<double>();
        tr.to.push_back(std::move(e));
      }
      spec.transitions.push_back(std::move(tr));
    }
    spec.initial_state = require(j, "initial_state", origin).get<std::string>();
    if (j.contains("initial_observation"))
      spec.initial_observation =
          string_list(j["initial_observation"], "initial_observation");
    spec.goal = string_list(require(j, "goal", origin), "goal");
  } catch (const json::exception& e) {
    throw ParseError(origin + ": " + e.what());
  }
  return spec;
}

GameSpec load_game_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  return load_game_spec(in, path);
}

std::string game_spec_to_json(const GameSpec& spec) {
  json j;
  j["states"] = spec.states;
  j["actions"] = spec.actions;
  j["sensors"] = json::array();
  for (const auto& s : spec.sensors)
    j["sensors"].push_back({{"name", s.name}, {"coverage", s.coverage}});
  j["queries"] = spec.queries;
  j["attacks"] = spec.attacks;
  j["transitions"] = json::array();
  for (const auto& t : spec.transitions) {
    json row;
    row["from"] = t.from;
    row["action"] = t.action;
    row["to"] = json::array();
    for (const auto& e : t.to)
      row["to"].push_back({{"state", e.state}, {"prob", e.prob}});
    j["transitions"].push_back(std::move(row));
  }
  j["initial_state"] = spec.initial_state;
  if (!spec.initial_observation.empty())
    j["initial_observation"] = spec.initial_observation;
  j["goal"] = spec.goal;
  return j.dump(2) + "\n";
}

}  // namespace beliefwin
