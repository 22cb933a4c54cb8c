// End-to-end tests that drive the installed binary through a shell, checking
// exit codes, stdout/stderr contracts and on-disk artifacts.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include "doctest.h"
#include "json.hpp"

#include "beliefwin/rng.hpp"
#include "test_support.hpp"

namespace {

using nlohmann::json;

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE_MESSAGE(bool(in), "cannot open ", path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  REQUIRE_MESSAGE(bool(out), "cannot write ", path);
  out << text;
}

/// Runs the CLI through /bin/sh.  `env_prefix` may carry VAR=value
/// assignments; stdout and stderr are captured into scratch files.
CliResult run_cli(const std::string& args, const std::string& env_prefix = "") {
  static int serial = 0;
  const std::string tag = std::to_string(serial++);
  const std::string out_path = "cli_stdout_" + tag + ".txt";
  const std::string err_path = "cli_stderr_" + tag + ".txt";

  std::string cmd;
  if (!env_prefix.empty()) cmd += env_prefix + " ";
  cmd += "'";
  cmd += BELIEFWIN_CLI_PATH;
  cmd += "' " + args + " > " + out_path + " 2> " + err_path;

  const int status = std::system(cmd.c_str());
  CliResult result;
  REQUIRE(status != -1);
  REQUIRE(WIFEXITED(status));
  result.code = WEXITSTATUS(status);
  result.out = slurp(out_path);
  result.err = slurp(err_path);
  std::remove(out_path.c_str());
  std::remove(err_path.c_str());
  return result;
}

std::string spec(const char* name) {
  return beliefwin::test::spec_path(name);
}

}  // namespace

TEST_CASE("validate accepts the bundled specs") {
  for (const char* name : {"case1.json", "case2.json", "case3.json"}) {
    const CliResult r = run_cli("validate '" + spec(name) + "'");
    CAPTURE(name);
    CHECK(r.code == 0);
    const json doc = json::parse(r.out);
    CHECK(doc.at("valid") == true);
    CHECK(doc.at("diagnostics").empty());
    CHECK(doc.at("spec_hash").get<std::string>().rfind("fnv1a64:", 0) == 0);
  }
}

TEST_CASE("validate rejects broken input with exit code 1") {
  SUBCASE("probabilities that do not sum to one") {
    json doc = json::parse(slurp(spec("case1.json")));
    doc["transitions"][0]["to"][0]["prob"] = 0.9;
    spit("cli_broken_spec.json", doc.dump(2) + "\n");
    const CliResult r = run_cli("validate cli_broken_spec.json");
    CHECK(r.code == 1);
    const json report = json::parse(r.out);
    CHECK(report.at("valid") == false);
    CHECK(!report.at("diagnostics").empty());
    std::remove("cli_broken_spec.json");
  }
  SUBCASE("unparsable file") {
    spit("cli_garbage.json", "this is not json\n");
    const CliResult r = run_cli("validate cli_garbage.json");
    CHECK(r.code == 1);
    CHECK(json::parse(r.out).at("valid") == false);
    std::remove("cli_garbage.json");
  }
  SUBCASE("missing file") {
    const CliResult r = run_cli("validate cli_no_such_file.json");
    CHECK(r.code == 1);
  }
}

TEST_CASE("solve emits a strategy document and a report") {
  const CliResult r = run_cli("solve '" + spec("case1.json") +
                              "' --out cli_strat1.json --report cli_rep1.json");
  REQUIRE(r.code == 0);

  const json strat = json::parse(slurp("cli_strat1.json"));
  CHECK(strat.at("format") == "strategy/1");
  CHECK(!strat.at("beliefs").empty());
  CHECK(strat.at("manifest").at("mode") == "belief");

  const json report = json::parse(slurp("cli_rep1.json"));
  CHECK(report.at("arena").at("states").get<std::size_t>() > 0);
  CHECK(report.at("belief").at("initial_winning") == true);
  CHECK(report.at("perfect").at("initial_winning") == true);

  // The hash in the strategy manifest matches what validate computes.
  const CliResult v = run_cli("validate '" + spec("case1.json") + "'");
  CHECK(strat.at("manifest").at("spec_hash") ==
        json::parse(v.out).at("spec_hash"));

  // Singleton-belief winners for the weakest attacker.
  const std::vector<std::string> expected = {"s0", "s1", "s2", "s6", "s7"};
  CHECK(report.at("winning_singleton_initials").get<std::vector<std::string>>() ==
        expected);
}

TEST_CASE("solve distinguishes winning and losing initial beliefs") {
  // Under the full attack alphabet s6 is no longer a winning start.
  CHECK(run_cli("solve '" + spec("case2.json") + "' --initial s6 --out cli_tmp_a.json").code == 0);
  CHECK(run_cli("solve '" + spec("case3.json") + "' --initial s6 --out cli_tmp_b.json").code == 3);
  CHECK(run_cli("solve '" + spec("case1.json") + "' --initial s3 --out cli_tmp_c.json").code == 3);
  std::remove("cli_tmp_a.json");
  std::remove("cli_tmp_b.json");
  std::remove("cli_tmp_c.json");
}

TEST_CASE("arena state cap: flag beats environment beats default") {
  CHECK(run_cli("solve '" + spec("case2.json") + "' --max-states 3").code == 4);
  CHECK(run_cli("solve '" + spec("case2.json") + "'",
                "BELIEF_ARENA_MAX_STATES=3").code == 4);
  CHECK(run_cli("solve '" + spec("case2.json") + "' --max-states 1000000 --out cli_tmp_d.json",
                "BELIEF_ARENA_MAX_STATES=3").code == 0);
  CHECK(run_cli("export-dot '" + spec("case2.json") + "' --out cli_tmp_e.dot",
                "BELIEF_ARENA_MAX_STATES=3").code == 4);
  std::remove("cli_tmp_d.json");
  std::remove("cli_tmp_e.dot");
}

TEST_CASE("simulate reports statistics and writes per-episode CSV") {
  REQUIRE(run_cli("solve '" + spec("case2.json") + "' --out cli_strat2.json").code == 0);

  const CliResult r = run_cli("simulate '" + spec("case2.json") +
                              "' cli_strat2.json --policy greedy-coarsen "
                              "--episodes 50 --seed 11 --csv cli_eps.csv");
  REQUIRE(r.code == 0);
  const json stats = json::parse(r.out);
  CHECK(stats.at("episodes") == 50);
  CHECK(stats.at("reached_goal") == 50);
  CHECK(stats.at("no_action") == 0);
  CHECK(stats.at("frequency") == 1.0);
  CHECK(stats.at("policy") == "greedy-coarsen");

  std::istringstream csv(slurp("cli_eps.csv"));
  std::string line;
  REQUIRE(bool(std::getline(csv, line)));
  CHECK(line == "episode,seed,outcome,steps");
  std::size_t rows = 0;
  while (std::getline(csv, line)) {
    CHECK(line.find("reached_goal") != std::string::npos);
    if (rows == 0) {
      // episode,seed,...: the seed column carries the derived per-episode seed.
      const auto first_comma = line.find(',');
      const auto second_comma = line.find(',', first_comma + 1);
      const std::string seed_text =
          line.substr(first_comma + 1, second_comma - first_comma - 1);
      CHECK(seed_text == std::to_string(beliefwin::derive_seed(11, 0)));
    }
    ++rows;
  }
  CHECK(rows == 50);
  std::remove("cli_eps.csv");
}

TEST_CASE("simulate honours --initial and the arena adversary") {
  REQUIRE(run_cli("solve '" + spec("case2.json") +
                  "' --initial s6 --out cli_strat2_s6.json").code == 0);
  const CliResult r = run_cli("simulate '" + spec("case2.json") +
                              "' cli_strat2_s6.json --initial s6 "
                              "--policy arena-adversary --episodes 40 --seed 3");
  REQUIRE(r.code == 0);
  const json stats = json::parse(r.out);
  CHECK(stats.at("initial") == "s6");
  CHECK(stats.at("reached_goal") == 40);
  std::remove("cli_strat2_s6.json");
}

TEST_CASE("simulate and certify refuse a strategy for a different spec") {
  REQUIRE(run_cli("solve '" + spec("case2.json") + "' --out cli_strat2x.json").code == 0);
  CHECK(run_cli("simulate '" + spec("case3.json") + "' cli_strat2x.json --episodes 5").code == 5);
  CHECK(run_cli("certify '" + spec("case3.json") + "' cli_strat2x.json").code == 5);
  std::remove("cli_strat2x.json");
}

TEST_CASE("certify verifies solver output and rejects corruption") {
  REQUIRE(run_cli("solve '" + spec("case1.json") + "' --out cli_strat1c.json").code == 0);

  SUBCASE("a fresh certificate verifies") {
    const CliResult r = run_cli("certify '" + spec("case1.json") + "' cli_strat1c.json");
    CHECK(r.code == 0);
    const json verdict = json::parse(r.out);
    CHECK(verdict.at("pass") == true);
    CHECK(verdict.at("violations").empty());
  }
  SUBCASE("dropping a winning state breaks the certificate") {
    json doc = json::parse(slurp("cli_strat1c.json"));
    auto& win = doc["certificate"]["win"];
    REQUIRE(win.size() > 1);
    win.erase(win.size() - 1);
    spit("cli_strat1_bad.json", doc.dump(2) + "\n");
    const CliResult r = run_cli("certify '" + spec("case1.json") + "' cli_strat1_bad.json");
    CHECK(r.code == 2);
    const json verdict = json::parse(r.out);
    CHECK(verdict.at("pass") == false);
    CHECK(!verdict.at("violations").empty());
    std::remove("cli_strat1_bad.json");
  }
  SUBCASE("a structurally broken document is invalid, not a failed check") {
    json doc = json::parse(slurp("cli_strat1c.json"));
    doc["certificate"].erase("levels");
    spit("cli_strat1_mangled.json", doc.dump(2) + "\n");
    CHECK(run_cli("certify '" + spec("case1.json") + "' cli_strat1_mangled.json").code == 1);
    std::remove("cli_strat1_mangled.json");
  }
  std::remove("cli_strat1c.json");
}

TEST_CASE("export-dot emits a well-formed digraph") {
  const CliResult r = run_cli("export-dot '" + spec("case1.json") + "'");
  CHECK(r.code == 0);
  CHECK(r.out.rfind("digraph arena {", 0) == 0);
  CHECK(r.out.find("final") != std::string::npos);
  // One shape per player kind.
  CHECK(r.out.find("shape=ellipse") != std::string::npos);
  CHECK(r.out.find("shape=diamond") != std::string::npos);
  CHECK(r.out.find("shape=box") != std::string::npos);
  CHECK(r.out.find("shape=doublecircle") != std::string::npos);
}

TEST_CASE("outputs are byte-stable when SOURCE_DATE_EPOCH pins the clock") {
  const std::string env = "SOURCE_DATE_EPOCH=1700000000";
  REQUIRE(run_cli("solve '" + spec("case3.json") +
                  "' --out cli_stable_a.json --report cli_rep_a.json", env).code == 0);
  REQUIRE(run_cli("solve '" + spec("case3.json") +
                  "' --out cli_stable_b.json --report cli_rep_b.json", env).code == 0);
  CHECK(slurp("cli_stable_a.json") == slurp("cli_stable_b.json"));
  CHECK(slurp("cli_rep_a.json") == slurp("cli_rep_b.json"));
  for (const char* f : {"cli_stable_a.json", "cli_stable_b.json",
                        "cli_rep_a.json", "cli_rep_b.json"})
    std::remove(f);
}

TEST_CASE("flag misuse is rejected before any file is touched") {
  // Nonexistent paths on purpose: a parse-time usage error must fire before
  // the spec or strategy file is ever opened.
  const CliResult policy =
      run_cli("simulate nosuch_spec.json nosuch_strategy.json --policy bogus");
  CHECK(policy.code != 0);
  CHECK(policy.out.empty());
  CHECK(policy.err.find("--policy") != std::string::npos);
  CHECK(policy.err.find("arena-adversary") != std::string::npos);

  const CliResult initial = run_cli("solve nosuch_spec.json --initial ''");
  CHECK(initial.code != 0);
  CHECK(initial.out.empty());
  CHECK(initial.err.find("--initial") != std::string::npos);
  CHECK(initial.err.find("non-empty") != std::string::npos);
}
