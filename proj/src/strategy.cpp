#include "beliefwin/strategy.hpp"

#include <algorithm>

#include "json.hpp"

namespace beliefwin {

namespace {

/// Entry order: lexicographic over the beliefs' sorted state-index arrays,
/// mirroring the serialized sorted state-name arrays.
bool belief_less(const Bitset& a, const Bitset& b) {
  const auto ia = a.to_indices();
  const auto ib = b.to_indices();
  return std::lexicographical_compare(ia.begin(), ia.end(), ib.begin(), ib.end());
}

}  // namespace

const StrategyTable::Entry* StrategyTable::lookup(const Bitset& belief) const {
  auto it = index_.find(belief);
  return it == index_.end() ? nullptr : &entries_[it->second];
}

void StrategyTable::insert(Bitset belief, std::vector<ActionPair> actions) {
  if (index_.count(belief))
    throw std::logic_error("strategy table: duplicate belief entry");
  auto pos = std::lower_bound(
      entries_.begin(), entries_.end(), belief,
      [](const Entry& e, const Bitset& b) { return belief_less(e.belief, b); });
  entries_.insert(pos, Entry{std::move(belief), std::move(actions)});
  index_.clear();
  for (std::size_t i = 0; i < entries_.size(); ++i)
    index_.emplace(entries_[i].belief, i);
}

StrategyTable extract(const Arena& arena, const SolveResult& belief_result) {
  const ValidatedSpec& spec = arena.spec();
  StrategyTable table(spec.num_states());
  const std::size_t nq = spec.num_queries();

  for (std::uint32_t cls = 0; cls < arena.num_belief_classes(); ++cls) {
    bool intersects = false;
    for (std::uint32_t member : arena.class_members(cls))
      if (belief_result.win.test(member)) {
        intersects = true;
        break;
      }
    if (!intersects) continue;

    Bitset mask = allow_class(arena, cls, belief_result.win);
    std::vector<ActionPair> actions;
    mask.for_each([&](std::size_t act) {
      actions.push_back({static_cast<ControlIndex>(act / nq),
                         static_cast<QueryIndex>(act % nq)});
    });
    if (actions.empty())
      throw std::logic_error(
          "strategy extraction: winning belief class without a joint action "
          "(solver bug)");
    table.insert(arena.belief(arena.class_belief(cls)), std::move(actions));
  }
  return table;
}

ActionPair act(const StrategyTable& table, const Bitset& belief, Rng& rng) {
  const StrategyTable::Entry* entry = table.lookup(belief);
  if (!entry) throw UnknownBelief("no strategy entry for the given belief");
  return entry->actions[rng.bounded(static_cast<std::uint32_t>(entry->actions.size()))];
}

// ----------------------------------------------------------------- JSON ---

namespace {

using nlohmann::json;

json manifest_to_json(const RunManifest& m) {
  json j;
  j["spec_path"] = m.spec_path;
  j["spec_hash"] = m.spec_hash;
  j["tool"] = m.tool;
  j["tool_version"] = m.tool_version;
  j["mode"] = m.mode;
  j["seeds"] = json::object();
  for (const auto& [k, v] : m.seeds) j["seeds"][k] = v;
  j["generated_at"] = m.generated_at;
  return j;
}

RunManifest manifest_from_json(const json& j) {
  RunManifest m;
  m.spec_path = j.value("spec_path", "");
  m.spec_hash = j.at("spec_hash").get<std::string>();
  m.tool = j.value("tool", "");
  m.tool_version = j.value("tool_version", "");
  m.mode = j.value("mode", "");
  if (j.contains("seeds"))
    for (auto it = j["seeds"].begin(); it != j["seeds"].end(); ++it)
      m.seeds[it.key()] = it.value().get<std::uint64_t>();
  m.generated_at = j.value("generated_at", "");
  return m;
}

std::vector<std::string> sorted_state_names(const ValidatedSpec& spec,
                                            const Bitset& states) {
  std::vector<std::string> out;
  states.for_each([&](std::size_t s) {
    out.push_back(spec.state_name(static_cast<StateIndex>(s)));
  });
  return out;  // index order; names within one spec follow declaration order
}

}  // namespace

std::string strategy_to_json(const ValidatedSpec& spec,
                             const StrategyDocument& doc) {
  json j;
  j["format"] = "strategy/1";
  j["manifest"] = manifest_to_json(doc.manifest);
  j["default_distribution"] = "uniform";

  j["beliefs"] = json::array();
  for (const auto& entry : doc.table.entries()) {
    json e;
    e["states"] = sorted_state_names(spec, entry.belief);
    e["actions"] = json::array();
    for (const ActionPair& a : entry.actions) {
      json act;
      act["control"] = spec.action_name(a.control);
      act["query"] = json::array();
      for (SensorIndex i : spec.query_sensors(a.query))
        act["query"].push_back(spec.sensor_name(i));
      e["actions"].push_back(std::move(act));
    }
    j["beliefs"].push_back(std::move(e));
  }

  json cert;
  cert["arena_states"] = doc.arena_states;
  cert["win"] = json::array();
  doc.certificate.win.for_each([&](std::size_t q) { cert["win"].push_back(q); });
  json levels = json::array();
  for (std::uint32_t k = 0; k < doc.certificate.num_levels; ++k)
    levels.push_back(json::array());
  for (std::size_t q = 0; q < doc.certificate.level_of.size(); ++q) {
    const std::uint32_t k = doc.certificate.level_of[q];
    if (k != SolveResult::kNoLevel && k < doc.certificate.num_levels)
      levels[k].push_back(q);
  }
  cert["levels"] = std::move(levels);
  j["certificate"] = std::move(cert);

  return j.dump(2) + "\n";
}

StrategyDocument strategy_from_json(const ValidatedSpec& spec,
                                    const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("strategy: ") + e.what());
  }

  StrategyDocument doc;
  try {
    if (j.value("format", "") != "strategy/1")
      throw ParseError("strategy: unknown or missing format tag");
    doc.manifest = manifest_from_json(j.at("manifest"));
    if (j.value("default_distribution", "") != "uniform")
      throw ParseError("strategy: unsupported default_distribution");

    doc.table = StrategyTable(spec.num_states());
    for (const auto& e : j.at("beliefs")) {
      Bitset belief(spec.num_states());
      for (const auto& name : e.at("states")) {
        auto s = spec.find_state(name.get<std::string>());
        if (!s)
          throw ParseError("strategy: unknown state '" +
                           name.get<std::string>() + "'");
        belief.set(*s);
      }
      std::vector<ActionPair> actions;
      for (const auto& a : e.at("actions")) {
        auto control = spec.find_action(a.at("control").get<std::string>());
        if (!control)
          throw ParseError("strategy: unknown control action '" +
                           a.at("control").get<std::string>() + "'");
        Bitset sensors(spec.num_sensors());
        for (const auto& name : a.at("query")) {
          bool found = false;
          for (SensorIndex i = 0; i < spec.num_sensors(); ++i)
            if (spec.sensor_name(i) == name.get<std::string>()) {
              sensors.set(i);
              found = true;
              break;
            }
          if (!found)
            throw ParseError("strategy: unknown sensor '" +
                             name.get<std::string>() + "'");
        }
        auto query = spec.find_query(sensors);
        if (!query)
          throw ParseError("strategy: query not in the declared alphabet");
        actions.push_back({*control, *query});
      }
      if (actions.empty())
        throw ParseError("strategy: belief entry with no actions");
      doc.table.insert(std::move(belief), std::move(actions));
    }

    const json& cert = j.at("certificate");
    doc.arena_states = cert.at("arena_states").get<std::size_t>();
    doc.certificate.win = Bitset(doc.arena_states);
    for (const auto& q : cert.at("win")) {
      const std::size_t idx = q.get<std::size_t>();
      if (idx >= doc.arena_states)
        throw ParseError("strategy: certificate win index out of range");
      doc.certificate.win.set(idx);
    }
    const json& levels = cert.at("levels");
    doc.certificate.num_levels = static_cast<std::uint32_t>(levels.size());
    doc.certificate.level_of.assign(doc.arena_states, SolveResult::kNoLevel);
    for (std::uint32_t k = 0; k < levels.size(); ++k)
      for (const auto& q : levels[k]) {
        const std::size_t idx = q.get<std::size_t>();
        if (idx >= doc.arena_states)
          throw ParseError("strategy: certificate level index out of range");
        if (doc.certificate.level_of[idx] != SolveResult::kNoLevel)
          throw ParseError("strategy: certificate state assigned two levels");
        doc.certificate.level_of[idx] = k;
      }
  } catch (const json::exception& e) {
    throw ParseError(std::string("strategy: ") + e.what());
  }
  return doc;
}

}  // namespace beliefwin
