#include "beliefwin/model.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "test_support.hpp"

using namespace beliefwin;
using namespace beliefwin::test;

namespace {

std::vector<Diagnostic> diagnose(const GameSpec& raw,
                                 const ValidateOptions& opts = {}) {
  std::vector<Diagnostic> diags;
  CHECK_FALSE(ValidatedSpec::validate(raw, diags, opts).has_value());
  REQUIRE_FALSE(diags.empty());
  return diags;
}

bool has_code(const std::vector<Diagnostic>& diags, DiagnosticCode code) {
  return std::any_of(diags.begin(), diags.end(),
                     [&](const Diagnostic& d) { return d.code == code; });
}

}  // namespace

TEST_CASE("bundled scenario files match the programmatic fixture") {
  for (int scenario : {1, 2, 3}) {
    const GameSpec from_file = load_game_spec_file(
        spec_path("case" + std::to_string(scenario) + ".json"));
    const GameSpec built = make_example_spec(scenario);
    CHECK(from_file.states == built.states);
    CHECK(from_file.actions == built.actions);
    REQUIRE(from_file.sensors.size() == built.sensors.size());
    for (std::size_t i = 0; i < built.sensors.size(); ++i) {
      CHECK(from_file.sensors[i].name == built.sensors[i].name);
      CHECK(from_file.sensors[i].coverage == built.sensors[i].coverage);
    }
    CHECK(from_file.queries == built.queries);
    CHECK(from_file.attacks == built.attacks);
    CHECK(from_file.initial_state == built.initial_state);
    CHECK(from_file.initial_observation == built.initial_observation);
    CHECK(from_file.goal == built.goal);
    REQUIRE(from_file.transitions.size() == built.transitions.size());
    for (std::size_t i = 0; i < built.transitions.size(); ++i) {
      CHECK(from_file.transitions[i].from == built.transitions[i].from);
      CHECK(from_file.transitions[i].action == built.transitions[i].action);
      REQUIRE(from_file.transitions[i].to.size() ==
              built.transitions[i].to.size());
      for (std::size_t k = 0; k < built.transitions[i].to.size(); ++k) {
        CHECK(from_file.transitions[i].to[k].state ==
              built.transitions[i].to[k].state);
        CHECK(from_file.transitions[i].to[k].prob ==
              doctest::Approx(built.transitions[i].to[k].prob).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("validated fixture resolves names and supports") {
  auto spec = make_validated(make_example_spec(1));
  CHECK(spec->num_states() == 8);
  CHECK(spec->num_actions() == 4);
  CHECK(spec->num_sensors() == 5);
  CHECK(spec->num_queries() == 4);
  CHECK(spec->num_attacks() == 1);
  CHECK(spec->find_state("s6") == StateIndex{6});
  CHECK_FALSE(spec->find_state("s8").has_value());
  CHECK(spec->initial_state() == 0);
  CHECK(spec->goal().to_indices() == std::vector<std::size_t>{4});
  CHECK(spec->initial_observation().to_indices() ==
        std::vector<std::size_t>{0});
  CHECK(spec->no_attack() == AttackIndex{0});

  // Frozen one-step supports from the model's transition table.
  CHECK(spec->post(0, 0) == belief_of(*spec, {"s0", "s1", "s2"}));
  CHECK(spec->post(6, 0) == belief_of(*spec, {"s0", "s1", "s2", "s7"}));
  CHECK(spec->post(4, 2) == belief_of(*spec, {"s4"}));

  CHECK(spec->post_belief(belief_of(*spec, {"s6"}), 0) ==
        belief_of(*spec, {"s0", "s1", "s2", "s7"}));
  CHECK(spec->post_belief(belief_of(*spec, {"s1", "s2"}), 0) ==
        belief_of(*spec, {"s4", "s5"}));
  CHECK_THROWS_AS((void)spec->post_belief(Bitset(8), 0),
                  std::invalid_argument);
}

TEST_CASE("transition rows are sorted and normalised") {
  auto spec = make_validated(make_example_spec(3));
  for (StateIndex s = 0; s < spec->num_states(); ++s)
    for (ControlIndex a = 0; a < spec->num_actions(); ++a) {
      const auto& row = spec->row(s, a);
      REQUIRE_FALSE(row.entries.empty());
      double sum = 0.0;
      for (std::size_t i = 0; i < row.entries.size(); ++i) {
        if (i) CHECK(row.entries[i - 1].state < row.entries[i].state);
        CHECK(row.entries[i].prob > 0.0);
        sum += row.entries[i].prob;
        CHECK(row.support.test(row.entries[i].state));
      }
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
      CHECK(row.support.count() == row.entries.size());
    }
}

TEST_CASE("query resolution by sensor set") {
  auto spec = make_validated(make_example_spec(1));
  Bitset mask(spec->num_sensors());
  mask.set(*spec->find_sensor("B"));
  mask.set(*spec->find_sensor("E"));
  CHECK(spec->find_query(mask) == QueryIndex{3});
  mask.set(*spec->find_sensor("A"));
  CHECK_FALSE(spec->find_query(mask).has_value());
}

TEST_CASE("validation rejects structural defects") {
  const GameSpec good = make_example_spec(1);

  SUBCASE("duplicate state name") {
    GameSpec bad = good;
    bad.states.push_back("s3");
    CHECK(has_code(diagnose(bad), DiagnosticCode::kDuplicateName));
  }
  SUBCASE("unknown state in sensor coverage") {
    GameSpec bad = good;
    bad.sensors[0].coverage.push_back("nowhere");
    CHECK(has_code(diagnose(bad), DiagnosticCode::kUnknownState));
  }
  SUBCASE("unknown sensor in a query") {
    GameSpec bad = good;
    bad.queries.push_back({"Z"});
    CHECK(has_code(diagnose(bad), DiagnosticCode::kUnknownSensor));
  }
  SUBCASE("duplicate query as a set") {
    GameSpec bad = good;
    bad.queries.push_back({"B", "A"});  // same set as ["A","B"]
    CHECK(has_code(diagnose(bad), DiagnosticCode::kDuplicateQuery));
  }
  SUBCASE("duplicate attack as a set") {
    GameSpec bad = make_example_spec(2);
    bad.attacks.push_back({"B"});
    CHECK(has_code(diagnose(bad), DiagnosticCode::kDuplicateAttack));
  }
  SUBCASE("missing no-attack action") {
    GameSpec bad = make_example_spec(2);
    bad.attacks.erase(bad.attacks.begin());
    CHECK(has_code(diagnose(bad), DiagnosticCode::kMissingNoAttack));

    ValidateOptions opts;
    opts.require_no_attack = false;
    std::vector<Diagnostic> diags;
    auto spec = ValidatedSpec::validate(bad, diags, opts);
    CHECK(spec.has_value());
    CHECK_FALSE(spec->no_attack().has_value());
  }
  SUBCASE("missing transition row") {
    GameSpec bad = good;
    bad.transitions.pop_back();
    CHECK(has_code(diagnose(bad), DiagnosticCode::kNonTotalTransition));
  }
  SUBCASE("row declared twice") {
    GameSpec bad = good;
    bad.transitions.push_back(bad.transitions.front());
    CHECK(has_code(diagnose(bad), DiagnosticCode::kDuplicateTransition));
  }
  SUBCASE("probabilities must sum to one") {
    GameSpec bad = good;
    bad.transitions[3].to[0].prob = 0.5;  // s0,a3 -> s3 with mass 0.5
    CHECK(has_code(diagnose(bad), DiagnosticCode::kBadDistribution));
  }
  SUBCASE("non-positive probability") {
    GameSpec bad = good;
    bad.transitions[3].to[0].prob = 0.0;
    CHECK(has_code(diagnose(bad), DiagnosticCode::kBadDistribution));
  }
  SUBCASE("successor listed twice") {
    GameSpec bad = good;
    bad.transitions[3].to = {{"s3", 0.5}, {"s3", 0.5}};
    CHECK(has_code(diagnose(bad), DiagnosticCode::kBadDistribution));
  }
  SUBCASE("initial state outside its observation") {
    GameSpec bad = good;
    bad.initial_observation = {"s1", "s2"};
    CHECK(has_code(diagnose(bad),
                   DiagnosticCode::kInitialStateNotInObservation));
  }
  SUBCASE("unknown goal state") {
    GameSpec bad = good;
    bad.goal.push_back("paradise");
    CHECK(has_code(diagnose(bad), DiagnosticCode::kGoalOutsideStateSpace));
  }
  SUBCASE("empty alphabets") {
    GameSpec bad = good;
    bad.queries.clear();
    CHECK(has_code(diagnose(bad), DiagnosticCode::kEmptyAlphabet));
  }
}

TEST_CASE("empty initial observation defaults to the initial state") {
  GameSpec raw = make_example_spec(1);
  raw.initial_observation.clear();
  auto spec = make_validated(raw);
  CHECK(spec->initial_observation().to_indices() ==
        std::vector<std::size_t>{0});
}

TEST_CASE("loader reports malformed documents") {
  auto load_text = [](const std::string& text) {
    std::istringstream in(text);
    return load_game_spec(in, "test");
  };
  CHECK_THROWS_AS((void)load_text("not json at all"), ParseError);
  CHECK_THROWS_AS((void)load_text("[1,2,3]"), ParseError);
  CHECK_THROWS_AS((void)load_text("{\"states\": [\"s0\"]}"), ParseError);
  CHECK_THROWS_AS(
      (void)load_text(
          "{\"states\": [\"s0\"], \"actions\": 7, \"sensors\": [],"
          " \"queries\": [], \"attacks\": [], \"transitions\": [],"
          " \"initial_state\": \"s0\", \"goal\": []}"),
      ParseError);
  CHECK_THROWS_AS((void)load_game_spec_file("/no/such/file.json"), ParseError);
}

TEST_CASE("serialisation round-trip is byte-stable") {
  const GameSpec spec = load_game_spec_file(spec_path("case2.json"));
  const std::string once = game_spec_to_json(spec);
  std::istringstream in(once);
  const std::string twice = game_spec_to_json(load_game_spec(in, "roundtrip"));
  CHECK(once == twice);
}
