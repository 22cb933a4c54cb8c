// Times the OpenMP sweep kernels against the serial reference path on a
// family of generated games and checks that both compute identical win sets.

#include <chrono>
#include <cstdio>
#include <memory>
#include <stdexcept>
#include <vector>

#include "CLI11.hpp"

#include "beliefwin/arena.hpp"
#include "beliefwin/model.hpp"
#include "beliefwin/solve.hpp"
#include "beliefwin/spec_gen.hpp"

namespace {

using namespace beliefwin;
using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start)
      .count();
}

std::shared_ptr<const ValidatedSpec> make_game(const SpecGenConfig& config) {
  std::vector<Diagnostic> diags;
  auto spec = ValidatedSpec::validate(generate_spec(config), diags);
  if (!spec) throw std::logic_error("generated spec failed validation");
  return std::make_shared<const ValidatedSpec>(std::move(*spec));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Benchmark parallel vs serial solve sweeps on generated games"};
  std::uint64_t first_seed = 100;
  std::uint32_t games = 5;
  std::uint32_t repeats = 3;
  SpecGenConfig base;
  base.min_states = 6;
  base.max_states = 9;
  base.max_actions = 3;
  base.max_sensors = 5;
  base.max_queries = 4;
  base.max_attacks = 4;
  app.add_option("--first-seed", first_seed, "Seed of the first game");
  app.add_option("--games", games, "Number of generated games");
  app.add_option("--repeats", repeats, "Timed repetitions per configuration");
  app.add_option("--max-states", base.max_states, "Model states per game (max)");
  app.add_option("--max-actions", base.max_actions, "Actions per game (max)");
  app.add_option("--max-sensors", base.max_sensors, "Sensors per game (max)");
  app.add_option("--max-queries", base.max_queries, "Queries per game (max)");
  app.add_option("--max-attacks", base.max_attacks, "Attacks per game (max)");
  CLI11_PARSE(app, argc, argv);

  std::printf("%8s %10s %9s %10s %12s %12s %8s %6s\n", "seed", "arena",
              "classes", "build(ms)", "parallel(ms)", "serial(ms)", "speedup",
              "agree");

  bool all_agree = true;
  for (std::uint32_t i = 0; i < games; ++i) {
    SpecGenConfig config = base;
    config.seed = first_seed + i;
    const auto spec = make_game(config);

    const auto t_build = Clock::now();
    const Arena arena = build_arena(spec);
    const double build_ms = ms_since(t_build);

    const auto time_pipeline = [&](bool parallel) {
      SolveOptions opts;
      opts.parallel = parallel;
      double best = -1.0;
      PipelineResult result;
      for (std::uint32_t r = 0; r < repeats; ++r) {
        const auto t = Clock::now();
        result = solve_pipeline(arena, opts);
        const double elapsed = ms_since(t);
        if (best < 0.0 || elapsed < best) best = elapsed;
      }
      return std::pair<double, PipelineResult>(best, std::move(result));
    };

    const auto [par_ms, par] = time_pipeline(true);
    const auto [ser_ms, ser] = time_pipeline(false);
    const bool agree = par.perfect.win == ser.perfect.win &&
                       par.belief.win == ser.belief.win &&
                       par.win2_positive == ser.win2_positive;
    all_agree = all_agree && agree;

    std::printf("%8llu %10zu %9zu %10.2f %12.3f %12.3f %8.2f %6s\n",
                static_cast<unsigned long long>(config.seed), arena.size(),
                arena.num_belief_classes(), build_ms, par_ms, ser_ms,
                par_ms > 0.0 ? ser_ms / par_ms : 0.0, agree ? "yes" : "NO");
  }

  if (!all_agree) {
    std::fprintf(stderr, "parallel and serial sweeps disagree\n");
    return 1;
  }
  return 0;
}
