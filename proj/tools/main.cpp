// Command-line front end: validate game specs, synthesise belief-based
// control-and-sensing strategies, replay them against attack policies,
// check winning certificates, and export the augmented game as Graphviz.
//
// Exit codes: 0 success (solve: initial belief is winning), 1 invalid spec
// or malformed document, 2 certificate verification failed, 3 initial belief
// not winning, 4 arena exceeds the state cap, 5 strategy/spec hash mismatch.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "beliefwin/arena.hpp"
#include "beliefwin/certificate.hpp"
#include "beliefwin/manifest.hpp"
#include "beliefwin/model.hpp"
#include "beliefwin/simulate.hpp"
#include "beliefwin/solve.hpp"
#include "beliefwin/strategy.hpp"

namespace {

using namespace beliefwin;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitInvalidSpec = 1;
constexpr int kExitCertificateFailed = 2;
constexpr int kExitNotWinning = 3;
constexpr int kExitArenaTooLarge = 4;
constexpr int kExitHashMismatch = 5;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text))
    throw ParseError(path + ": cannot write file");
}

/// Options shared by every arena-building subcommand.
struct ArenaFlags {
  std::size_t max_states = ArenaOptions{}.max_states;
  CLI::Option* opt = nullptr;

  void attach(CLI::App* cmd) {
    opt = cmd->add_option(
        "--max-states", max_states,
        "Abort if the arena would exceed this many states "
        "(default: BELIEF_ARENA_MAX_STATES or 10000000)");
  }

  /// Explicit flag beats the environment beats the built-in default.
  ArenaOptions resolve() const {
    ArenaOptions out;
    if (opt && opt->count() > 0) {
      out.max_states = max_states;
      return out;
    }
    if (const char* env = std::getenv("BELIEF_ARENA_MAX_STATES")) {
      char* end = nullptr;
      const unsigned long long v = std::strtoull(env, &end, 10);
      if (end != env && *end == '\0' && v > 0) {
        out.max_states = static_cast<std::size_t>(v);
        return out;
      }
      std::cerr << "warning: ignoring malformed BELIEF_ARENA_MAX_STATES\n";
    }
    return out;
  }
};

struct LoadedSpec {
  std::shared_ptr<const ValidatedSpec> spec;
  std::string bytes;  // exact file contents, for hashing
};

/// Reads, parses and validates a spec file; optionally pins a different
/// initial state (with the singleton observation {state}).  Diagnostics go
/// to stderr; a null result means exit kExitInvalidSpec.
std::optional<LoadedSpec> load_spec(const std::string& path,
                                    bool allow_missing_no_attack,
                                    const std::string& initial_override) {
  LoadedSpec out;
  out.bytes = read_file(path);
  std::istringstream in(out.bytes);
  GameSpec raw = load_game_spec(in, path);
  if (!initial_override.empty()) {
    raw.initial_state = initial_override;
    raw.initial_observation = {initial_override};
  }

  ValidateOptions opts;
  opts.require_no_attack = !allow_missing_no_attack;
  std::vector<Diagnostic> diags;
  auto spec = ValidatedSpec::validate(raw, diags, opts);
  for (const Diagnostic& d : diags)
    std::cerr << path << ": " << diagnostic_code_name(d.code) << " at "
              << d.where << ": " << d.message << "\n";
  if (!spec) return std::nullopt;
  out.spec = std::make_shared<const ValidatedSpec>(std::move(*spec));
  return out;
}

std::string spec_hash_of(const std::string& bytes) {
  return "fnv1a64:" + fnv1a64_hex(bytes);
}

/// Non-goal model states whose singleton belief is materialised and winning.
std::vector<std::string> winning_singleton_initials(const Arena& arena,
                                                    const Bitset& win) {
  const ValidatedSpec& spec = arena.spec();
  std::vector<std::string> out;
  for (StateIndex s = 0; s < spec.num_states(); ++s) {
    Bitset singleton(spec.num_states());
    singleton.set(s);
    const std::uint32_t q = arena.find_p1(s, singleton);
    if (q != Arena::npos32 && win.test(q)) out.push_back(spec.state_name(s));
  }
  return out;
}

// ------------------------------------------------------------- validate ---

struct ValidateCmd {
  std::string spec_path;
  bool allow_missing_no_attack = false;
};

int run_validate(const ValidateCmd& o) {
  json result;
  result["valid"] = false;
  result["diagnostics"] = json::array();
  try {
    const std::string bytes = read_file(o.spec_path);
    std::istringstream in(bytes);
    const GameSpec raw = load_game_spec(in, o.spec_path);

    ValidateOptions opts;
    opts.require_no_attack = !o.allow_missing_no_attack;
    std::vector<Diagnostic> diags;
    const auto spec = ValidatedSpec::validate(raw, diags, opts);
    for (const Diagnostic& d : diags) {
      result["diagnostics"].push_back({{"code", diagnostic_code_name(d.code)},
                                       {"where", d.where},
                                       {"message", d.message}});
      std::cerr << o.spec_path << ": " << diagnostic_code_name(d.code)
                << " at " << d.where << ": " << d.message << "\n";
    }
    result["valid"] = spec.has_value();
    if (spec) result["spec_hash"] = spec_hash_of(bytes);
    std::cout << result.dump(2) << "\n";
    return spec ? kExitOk : kExitInvalidSpec;
  } catch (const ParseError& e) {
    result["diagnostics"].push_back(
        {{"code", "ParseError"}, {"where", o.spec_path}, {"message", e.what()}});
    std::cout << result.dump(2) << "\n";
    std::cerr << e.what() << "\n";
    return kExitInvalidSpec;
  }
}

// ---------------------------------------------------------------- solve ---

struct SolveCmd {
  std::string spec_path;
  std::string initial;
  std::string out_path;
  std::string report_path;
  std::string dot_path;
  bool serial = false;
  bool allow_missing_no_attack = false;
  ArenaFlags arena_flags;
};

json solve_report(const Arena& arena, const PipelineResult& r,
                  const StrategyTable& table, const RunManifest& manifest) {
  json report;
  report["manifest"] = {{"spec_path", manifest.spec_path},
                        {"spec_hash", manifest.spec_hash},
                        {"tool", manifest.tool},
                        {"tool_version", manifest.tool_version},
                        {"mode", manifest.mode},
                        {"generated_at", manifest.generated_at}};
  report["arena"] = {{"states", arena.size()},
                     {"p1_states", arena.num_p1_states()},
                     {"nature_states", arena.num_nature_states()},
                     {"p2_states", arena.num_p2_states()},
                     {"belief_classes", arena.num_belief_classes()}};
  const auto pass = [&](const SolveResult& s) {
    return json{{"win_states", s.win.count()},
                {"levels", s.num_levels},
                {"outer_iterations", s.stats.outer_iterations},
                {"inner_sweeps", s.stats.inner_sweeps},
                {"initial_winning", s.win.test(arena.initial())}};
  };
  report["perfect"] = pass(r.perfect);
  report["belief"] = pass(r.belief);
  report["win2_positive_states"] = r.win2_positive.count();
  report["winning_singleton_initials"] =
      winning_singleton_initials(arena, r.belief.win);
  report["strategy_entries"] = table.size();
  return report;
}

int run_solve(const SolveCmd& o) {
  const auto loaded =
      load_spec(o.spec_path, o.allow_missing_no_attack, o.initial);
  if (!loaded) return kExitInvalidSpec;

  const Arena arena = build_arena(loaded->spec, o.arena_flags.resolve());
  SolveOptions sopts;
  sopts.parallel = !o.serial;
  const PipelineResult r = solve_pipeline(arena, sopts);
  const StrategyTable table = extract(arena, r.belief);

  StrategyDocument doc;
  doc.manifest = RunManifest::for_spec(o.spec_path, loaded->bytes);
  doc.manifest.mode = "belief";
  doc.table = table;
  doc.certificate = Certificate::from_result(r.belief);
  doc.arena_states = arena.size();

  const std::string text = strategy_to_json(*loaded->spec, doc);
  if (o.out_path.empty())
    std::cout << text;
  else
    write_file(o.out_path, text);

  if (!o.report_path.empty())
    write_file(o.report_path,
               solve_report(arena, r, table, doc.manifest).dump(2) + "\n");

  if (!o.dot_path.empty()) {
    std::ostringstream dot;
    arena.to_dot(dot);
    write_file(o.dot_path, dot.str());
  }

  const bool winning = r.belief.win.test(arena.initial());
  std::cerr << "arena: " << arena.size() << " states, "
            << arena.num_belief_classes() << " belief classes\n"
            << "strategy: " << table.size() << " belief entries\n"
            << "initial belief " << arena.state_label(arena.initial())
            << (winning ? " is" : " is NOT") << " almost-surely winning\n";
  return winning ? kExitOk : kExitNotWinning;
}

// ------------------------------------------------------------- simulate ---

struct SimulateCmd {
  std::string spec_path;
  std::string strategy_path;
  std::string policy = "uniform";
  std::uint32_t episodes = 1000;
  std::uint32_t horizon = 0;
  std::uint64_t seed = 0;
  std::string initial;
  std::string csv_path;
  bool serial = false;
  bool allow_missing_no_attack = false;
  ArenaFlags arena_flags;
};

PolicyKind policy_from_name(const std::string& name) {
  if (name == "no-attack") return PolicyKind::kNoAttack;
  if (name == "uniform") return PolicyKind::kUniform;
  if (name == "greedy-coarsen") return PolicyKind::kGreedyCoarsen;
  if (name == "arena-adversary") return PolicyKind::kArenaAdversary;
  throw std::invalid_argument("unknown attack policy '" + name + "'");
}

int run_simulate(const SimulateCmd& o) {
  const auto loaded =
      load_spec(o.spec_path, o.allow_missing_no_attack, o.initial);
  if (!loaded) return kExitInvalidSpec;
  const ValidatedSpec& spec = *loaded->spec;

  const StrategyDocument doc =
      strategy_from_json(spec, read_file(o.strategy_path));
  const std::string expected = spec_hash_of(loaded->bytes);
  if (doc.manifest.spec_hash != expected) {
    std::cerr << "strategy was produced for " << doc.manifest.spec_hash
              << " but " << o.spec_path << " hashes to " << expected << "\n";
    return kExitHashMismatch;
  }

  // The arena adversary needs the solved game to know where it can escape.
  const PolicyKind kind = policy_from_name(o.policy);
  AttackerPolicy policy;
  policy.kind = kind;
  std::optional<Arena> arena;
  std::optional<PipelineResult> pipeline;
  SolveOptions sopts;
  sopts.parallel = !o.serial;
  if (kind == PolicyKind::kArenaAdversary) {
    arena.emplace(build_arena(loaded->spec, o.arena_flags.resolve()));
    pipeline.emplace(solve_pipeline(*arena, sopts));
    policy.arena = &*arena;
    policy.win = &pipeline->belief.win;
  }

  EpisodeConfig config;
  config.master_seed = o.seed;
  config.episodes = o.episodes;
  config.horizon = o.horizon;
  config.initial = spec.initial_state();
  config.observation = spec.initial_observation();
  config.parallel = !o.serial;

  std::vector<EpisodeRecord> records;
  const ReachStats stats = estimate_reach(spec, doc.table, policy, config,
                                          o.csv_path.empty() ? nullptr
                                                             : &records);

  if (!o.csv_path.empty()) {
    std::ostringstream csv;
    csv << "episode,seed,outcome,steps\n";
    for (const EpisodeRecord& r : records)
      csv << r.episode << ',' << r.seed << ',' << outcome_name(r.outcome)
          << ',' << r.length << "\n";
    write_file(o.csv_path, csv.str());
  }

  json result;
  result["spec_hash"] = expected;
  result["policy"] = o.policy;
  result["master_seed"] = o.seed;
  result["episodes"] = stats.episodes;
  result["horizon"] = config.horizon ? config.horizon : default_horizon(spec);
  result["initial"] = spec.state_name(config.initial);
  result["reached_goal"] = stats.reached;
  result["timeout"] = stats.timeout;
  result["no_action"] = stats.no_action;
  result["frequency"] = stats.frequency;
  result["mean_steps"] = stats.mean_steps;
  std::cout << result.dump(2) << "\n";
  return kExitOk;
}

// -------------------------------------------------------------- certify ---

struct CertifyCmd {
  std::string spec_path;
  std::string strategy_path;
  bool serial = false;
  bool allow_missing_no_attack = false;
  ArenaFlags arena_flags;
};

int run_certify(const CertifyCmd& o) {
  const auto loaded = load_spec(o.spec_path, o.allow_missing_no_attack, "");
  if (!loaded) return kExitInvalidSpec;
  const ValidatedSpec& spec = *loaded->spec;

  const StrategyDocument doc =
      strategy_from_json(spec, read_file(o.strategy_path));
  const std::string expected = spec_hash_of(loaded->bytes);
  if (doc.manifest.spec_hash != expected) {
    std::cerr << "strategy was produced for " << doc.manifest.spec_hash
              << " but " << o.spec_path << " hashes to " << expected << "\n";
    return kExitHashMismatch;
  }

  const Arena arena = build_arena(loaded->spec, o.arena_flags.resolve());
  const Verdict verdict =
      check_certificate(arena, doc.certificate, doc.table, !o.serial);

  json result;
  result["pass"] = verdict.pass;
  result["arena_states"] = arena.size();
  result["win_states"] = doc.certificate.win.count();
  result["violations"] = json::array();
  for (const Violation& v : verdict.violations) {
    result["violations"].push_back({{"state", v.state},
                                    {"label", v.state < arena.size()
                                                  ? arena.state_label(v.state)
                                                  : "out-of-range"},
                                    {"obligation", v.obligation},
                                    {"witness", v.witness}});
    std::cerr << "violation at " << v.state << " ("
              << (v.state < arena.size() ? arena.state_label(v.state)
                                         : "out-of-range")
              << "): " << v.obligation << ": " << v.witness << "\n";
  }
  std::cout << result.dump(2) << "\n";
  if (verdict.pass)
    std::cerr << "certificate verified: " << doc.certificate.win.count()
              << " winning states, " << doc.certificate.num_levels
              << " levels\n";
  return verdict.pass ? kExitOk : kExitCertificateFailed;
}

// ----------------------------------------------------------- export-dot ---

struct ExportDotCmd {
  std::string spec_path;
  std::string out_path;
  std::string initial;
  bool allow_missing_no_attack = false;
  ArenaFlags arena_flags;
};

int run_export_dot(const ExportDotCmd& o) {
  const auto loaded =
      load_spec(o.spec_path, o.allow_missing_no_attack, o.initial);
  if (!loaded) return kExitInvalidSpec;

  const Arena arena = build_arena(loaded->spec, o.arena_flags.resolve());
  std::ostringstream dot;
  arena.to_dot(dot);
  if (o.out_path.empty())
    std::cout << dot.str();
  else
    write_file(o.out_path, dot.str());
  std::cerr << "arena: " << arena.size() << " states\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Belief-based winning strategies under sensor jamming"};
  app.require_subcommand(1);

  const auto non_empty_state = [](const std::string& v) {
    return v.empty() ? std::string("state name must be non-empty")
                     : std::string();
  };

  ValidateCmd validate_cmd;
  CLI::App* validate = app.add_subcommand(
      "validate", "Check a game spec and report diagnostics");
  validate->add_option("spec", validate_cmd.spec_path, "Game spec (JSON)")
      ->required();
  validate->add_flag("--allow-missing-no-attack",
                     validate_cmd.allow_missing_no_attack,
                     "Accept an attack alphabet without the no-attack action");

  SolveCmd solve_cmd;
  CLI::App* solve = app.add_subcommand(
      "solve", "Synthesise a belief-based almost-surely winning strategy");
  solve->add_option("spec", solve_cmd.spec_path, "Game spec (JSON)")
      ->required();
  solve->add_option("--initial", solve_cmd.initial,
                    "Start from this state with the singleton observation")
      ->check(non_empty_state);
  solve->add_option("--out", solve_cmd.out_path,
                    "Write the strategy document here (default: stdout)");
  solve->add_option("--report", solve_cmd.report_path,
                    "Write a solve report (JSON) here");
  solve->add_option("--arena-dot", solve_cmd.dot_path,
                    "Write the explored arena as Graphviz here");
  solve->add_flag("--serial", solve_cmd.serial, "Disable parallel kernels");
  solve->add_flag("--allow-missing-no-attack",
                  solve_cmd.allow_missing_no_attack,
                  "Accept an attack alphabet without the no-attack action");
  solve_cmd.arena_flags.attach(solve);

  SimulateCmd simulate_cmd;
  CLI::App* simulate = app.add_subcommand(
      "simulate", "Replay a solved strategy against an attack policy");
  simulate->add_option("spec", simulate_cmd.spec_path, "Game spec (JSON)")
      ->required();
  simulate->add_option("strategy", simulate_cmd.strategy_path,
                       "Strategy document produced by solve")
      ->required();
  simulate->add_option("--policy", simulate_cmd.policy,
                       "Attack policy: no-attack, uniform, greedy-coarsen, "
                       "arena-adversary (default: uniform)")
      ->check(CLI::IsMember(
          {"no-attack", "uniform", "greedy-coarsen", "arena-adversary"}));
  simulate->add_option("--episodes", simulate_cmd.episodes,
                       "Number of independent episodes (default: 1000)");
  simulate->add_option("--horizon", simulate_cmd.horizon,
                       "Step cap per episode (default: 20*|S|*|Queries|)");
  simulate->add_option("--seed", simulate_cmd.seed,
                       "Master seed; episode i uses a seed derived from it");
  simulate->add_option("--initial", simulate_cmd.initial,
                       "Start from this state with the singleton observation")
      ->check(non_empty_state);
  simulate->add_option("--csv", simulate_cmd.csv_path,
                       "Write one CSV row per episode here");
  simulate->add_flag("--serial", simulate_cmd.serial,
                     "Disable parallel episode execution");
  simulate->add_flag("--allow-missing-no-attack",
                     simulate_cmd.allow_missing_no_attack,
                     "Accept an attack alphabet without the no-attack action");
  simulate_cmd.arena_flags.attach(simulate);

  CertifyCmd certify_cmd;
  CLI::App* certify = app.add_subcommand(
      "certify", "Verify a strategy document's winning certificate");
  certify->add_option("spec", certify_cmd.spec_path, "Game spec (JSON)")
      ->required();
  certify->add_option("strategy", certify_cmd.strategy_path,
                      "Strategy document produced by solve")
      ->required();
  certify->add_flag("--serial", certify_cmd.serial,
                    "Disable parallel checking");
  certify->add_flag("--allow-missing-no-attack",
                    certify_cmd.allow_missing_no_attack,
                    "Accept an attack alphabet without the no-attack action");
  certify_cmd.arena_flags.attach(certify);

  ExportDotCmd export_cmd;
  CLI::App* export_dot = app.add_subcommand(
      "export-dot", "Write the explored arena as a Graphviz digraph");
  export_dot->add_option("spec", export_cmd.spec_path, "Game spec (JSON)")
      ->required();
  export_dot->add_option("--out", export_cmd.out_path,
                         "Output path (default: stdout)");
  export_dot->add_option("--initial", export_cmd.initial,
                         "Start from this state with the singleton observation")
      ->check(non_empty_state);
  export_dot->add_flag("--allow-missing-no-attack",
                       export_cmd.allow_missing_no_attack,
                       "Accept an attack alphabet without the no-attack action");
  export_cmd.arena_flags.attach(export_dot);

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) return run_validate(validate_cmd);
    if (solve->parsed()) return run_solve(solve_cmd);
    if (simulate->parsed()) return run_simulate(simulate_cmd);
    if (certify->parsed()) return run_certify(certify_cmd);
    if (export_dot->parsed()) return run_export_dot(export_cmd);
  } catch (const ArenaTooLarge& e) {
    std::cerr << e.what() << " (raise --max-states or BELIEF_ARENA_MAX_STATES)\n";
    return kExitArenaTooLarge;
  } catch (const ParseError& e) {
    std::cerr << e.what() << "\n";
    return kExitInvalidSpec;
  } catch (const std::invalid_argument& e) {
    std::cerr << e.what() << "\n";
    return kExitInvalidSpec;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInvalidSpec;
  }
  return kExitOk;
}
