#include "beliefwin/solve.hpp"

#include <set>
#include <vector>

#include "beliefwin/spec_gen.hpp"
#include "doctest.h"
#include "reference_solver.hpp"
#include "test_support.hpp"

using namespace beliefwin;
using namespace beliefwin::test;

namespace {

/// Non-goal model states whose singleton-belief P1 state is materialised and
/// winning under the belief equivalence.
std::set<std::string> winning_singletons(const Arena& arena,
                                         const SolveResult& belief) {
  const ValidatedSpec& spec = arena.spec();
  std::set<std::string> out;
  for (StateIndex s = 0; s < spec.num_states(); ++s) {
    Bitset singleton(spec.num_states());
    singleton.set(s);
    const std::uint32_t q = arena.find_p1(s, singleton);
    if (q != Arena::npos32 && belief.win.test(q))
      out.insert(spec.state_name(s));
  }
  return out;
}

}  // namespace

TEST_CASE("winning singleton beliefs match the worked scenarios") {
  // Scenario 1 (no jamming) and 2 (attacks {B},{E}) admit the same winning
  // initial states; scenario 3 (every single-sensor attack) loses s6, whose
  // only useful move can always be coarsened into the fatal {s1,s2} class.
  const std::set<std::string> rich = {"s0", "s1", "s2", "s6", "s7"};
  const std::set<std::string> poor = {"s0", "s1", "s2", "s7"};

  for (int scenario : {1, 2, 3}) {
    CAPTURE(scenario);
    const Arena arena =
        build_arena(make_validated(make_example_spec(scenario)));
    const PipelineResult r = solve_pipeline(arena);
    CHECK(winning_singletons(arena, r.belief) == (scenario == 3 ? poor : rich));
    CHECK(r.belief.win.test(arena.initial()));
  }
}

TEST_CASE("engine agrees with the set-based oracle on the bundled scenarios") {
  for (int scenario : {1, 2, 3}) {
    CAPTURE(scenario);
    const Arena arena =
        build_arena(make_validated(make_example_spec(scenario)));
    const PipelineResult r = solve_pipeline(arena);
    const RefPipeline ref = ref_pipeline(arena);
    CHECK(as_set(r.perfect.win) == ref.perfect);
    CHECK(as_set(r.belief.win) == ref.belief);

    // Scan order must not matter to the fixed point.
    const RefPipeline rev = ref_pipeline(arena, /*reverse_order=*/true);
    CHECK(ref.perfect == rev.perfect);
    CHECK(ref.belief == rev.belief);
  }
}

TEST_CASE("engine agrees with the set-based oracle on random games") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    CAPTURE(seed);
    SpecGenConfig config;
    config.seed = seed;
    const Arena arena = build_arena(make_validated(generate_spec(config)));
    const PipelineResult r = solve_pipeline(arena);
    const RefPipeline ref = ref_pipeline(arena, /*reverse_order=*/(seed & 1));
    CHECK(as_set(r.perfect.win) == ref.perfect);
    CHECK(as_set(r.belief.win) == ref.belief);
  }
}

TEST_CASE("parallel and serial sweeps produce identical results") {
  SolveOptions serial;
  serial.parallel = false;
  for (int scenario : {1, 2, 3}) {
    const Arena arena =
        build_arena(make_validated(make_example_spec(scenario)));
    const PipelineResult par = solve_pipeline(arena);
    const PipelineResult ser = solve_pipeline(arena, serial);
    CHECK(par.perfect.win == ser.perfect.win);
    CHECK(par.belief.win == ser.belief.win);
    CHECK(par.belief.level_of == ser.belief.level_of);
    CHECK(par.belief.num_levels == ser.belief.num_levels);
  }
}

TEST_CASE("allowed actions respect the belief class") {
  const Arena arena = build_arena(make_validated(make_example_spec(1)));
  const ValidatedSpec& spec = arena.spec();
  const PipelineResult r = solve_pipeline(arena);

  // With every restriction lifted, each of the 16 action pairs is allowed.
  Bitset everything(arena.size());
  everything.fill();
  const std::uint32_t q1 =
      arena.find_p1(1, belief_of(spec, {"s1"}));
  REQUIRE(q1 != Arena::npos32);
  CHECK(allow(arena, q1, everything).count() == arena.num_p1_actions());

  // The class {s1,s2} has no joint action that keeps both members winning:
  // whatever the pair plays, one of them feeds the failure sink.
  const std::uint32_t q12 = arena.find_p1(1, belief_of(spec, {"s1", "s2"}));
  REQUIRE(q12 != Arena::npos32);
  CHECK(allow_class(arena, arena.class_of(q12), r.belief.win).none());

  // Its perfect-mode counterpart may pick per-state actions and stays won.
  CHECK(r.perfect.win.test(q12));
  CHECK_FALSE(r.belief.win.test(q12));
}

TEST_CASE("one-step operators reproduce the attractor layers") {
  const Arena arena = build_arena(make_validated(make_example_spec(2)));
  const SolveResult r = solve_pipeline(arena).belief;
  const std::vector<Bitset> cum = r.cumulative_levels();
  REQUIRE(r.num_levels >= 4);

  auto layer = [&](std::uint32_t level, StateKind kind) {
    Bitset out(arena.size());
    for (std::uint32_t q = 0; q < arena.size(); ++q)
      if (r.level_of[q] == level && arena.state(q).kind == kind) out.set(q);
    return out;
  };

  // progN against R_0 = {final} yields exactly the level-1 nature states.
  Bitset expect = layer(1, StateKind::kNature);
  CHECK(progN(arena, cum[0], r.win) == expect);

  // prog1 against R_1 yields exactly the level-2 P1 states.
  expect = layer(2, StateKind::kP1);
  CHECK(prog1(arena, cum[1], r.win, EquivalenceMode::kBelief) == expect);

  // prog2 against R_2 yields exactly the level-3 P2 states.
  expect = layer(3, StateKind::kP2);
  CHECK(prog2(arena, cum[2], r.win) == expect);
}

TEST_CASE("levels are well-formed") {
  for (int scenario : {1, 2, 3}) {
    const Arena arena =
        build_arena(make_validated(make_example_spec(scenario)));
    const SolveResult r = solve_pipeline(arena).belief;

    // Level 0 holds exactly the final state.
    const std::vector<Bitset> cum = r.cumulative_levels();
    REQUIRE(cum.size() == r.num_levels);
    CHECK(cum[0].to_indices() ==
          std::vector<std::size_t>{arena.final_state()});

    // Cumulative levels grow strictly up to the win set.
    for (std::size_t k = 1; k < cum.size(); ++k) {
      CHECK(cum[k - 1].is_subset_of(cum[k]));
      CHECK(cum[k - 1].count() < cum[k].count());
    }
    CHECK(cum.back() == r.win);

    // Levels exist exactly inside the win set.
    for (std::uint32_t q = 0; q < arena.size(); ++q)
      CHECK((r.level_of[q] != SolveResult::kNoLevel) == r.win.test(q));
  }
}

TEST_CASE("a P1 state sits one level above its best nature successor") {
  const Arena arena = build_arena(make_validated(make_example_spec(1)));
  const ValidatedSpec& spec = arena.spec();
  const SolveResult r = solve_pipeline(arena).belief;

  // From {s1} action a0 drives straight to the goal: its nature state is
  // attracted in round 1 and the P1 state follows in round 2.
  const std::uint32_t p1 = arena.find_p1(1, belief_of(spec, {"s1"}));
  const std::uint32_t nature =
      arena.find_nature(1, belief_of(spec, {"s4"}), 0, 0);
  REQUIRE(p1 != Arena::npos32);
  REQUIRE(nature != Arena::npos32);
  CHECK(r.level_of[nature] == 1);
  CHECK(r.level_of[p1] == 2);
}

TEST_CASE("pipeline facts on the hardest scenario") {
  const Arena arena = build_arena(make_validated(make_example_spec(3)));
  const ValidatedSpec& spec = arena.spec();
  const PipelineResult r = solve_pipeline(arena);

  // Belief-level winning is dominated by perfect-observation winning.
  CHECK(r.belief.win.is_subset_of(r.perfect.win));

  // win2_positive is exactly the complement of the perfect-observation win.
  Bitset complement = r.perfect.win;
  complement.complement();
  CHECK(r.win2_positive == complement);

  // Under perfect observation, winning depends only on the model state.
  const std::set<StateIndex> mdp_winning = {0, 1, 2, 6, 7};
  for (std::uint32_t q = 0; q < arena.size(); ++q)
    if (arena.state(q).kind == StateKind::kP1)
      CHECK(r.perfect.win.test(q) ==
            (mdp_winning.count(arena.state(q).s) != 0));

  // Every arena state stuck in the failure sink s5 loses outright.
  for (std::uint32_t q = 0; q < arena.size(); ++q)
    if (arena.state(q).kind != StateKind::kFinal && arena.state(q).s == 5)
      CHECK(r.win2_positive.test(q));

  // The attacker can coarsen query 0 from the wide belief into the fatal
  // {s1,s2} class, so that P2 state is perfect-winning yet belief-losing.
  const std::uint32_t p2 =
      arena.find_p2(1, belief_of(spec, {"s0", "s1", "s2", "s7"}), 0);
  REQUIRE(p2 != Arena::npos32);
  CHECK(r.perfect.win.test(p2));
  CHECK_FALSE(r.belief.win.test(p2));

  // Consequently s6's only forward move is dead under the belief semantics.
  const std::uint32_t nature =
      arena.find_nature(6, belief_of(spec, {"s0", "s1", "s2", "s7"}), 0, 0);
  REQUIRE(nature != Arena::npos32);
  CHECK_FALSE(r.belief.win.test(nature));
}

TEST_CASE("solver statistics describe the outer iteration") {
  const Arena arena = build_arena(make_validated(make_example_spec(1)));
  const PipelineResult r = solve_pipeline(arena);

  // The belief pass starts from the perfect-observation win set, which is a
  // strict over-approximation here, so at least one shrinking iteration plus
  // the confirming one must happen.
  CHECK(r.belief.stats.outer_iterations >= 2);
  CHECK(r.belief.stats.outer_sizes.size() == r.belief.stats.outer_iterations);
  for (std::size_t i = 1; i < r.belief.stats.outer_sizes.size(); ++i)
    CHECK(r.belief.stats.outer_sizes[i - 1] >= r.belief.stats.outer_sizes[i]);
  CHECK(r.belief.stats.outer_sizes.back() == r.belief.win.count());
  CHECK(r.belief.stats.inner_sweeps > 0);
}

TEST_CASE("solving inside an existing fixed point is idempotent") {
  const Arena arena = build_arena(make_validated(make_example_spec(2)));
  const PipelineResult r = solve_pipeline(arena);
  const SolveResult again =
      asw(arena, EquivalenceMode::kPerfect, r.perfect.win);
  CHECK(again.win == r.perfect.win);
  CHECK(again.stats.outer_iterations == 1);
}

TEST_CASE("asw validates its starting set") {
  const Arena arena = build_arena(make_validated(make_example_spec(1)));
  Bitset wrong_size(arena.size() + 1);
  wrong_size.fill();
  CHECK_THROWS_AS((void)asw(arena, EquivalenceMode::kPerfect, wrong_size),
                  std::invalid_argument);

  Bitset no_final(arena.size());
  no_final.fill();
  no_final.reset(arena.final_state());
  CHECK_THROWS_AS((void)asw(arena, EquivalenceMode::kPerfect, no_final),
                  std::invalid_argument);
}

TEST_CASE("winning sets are invariant under support-preserving jitter") {
  for (int scenario : {1, 2, 3}) {
    const Arena base =
        build_arena(make_validated(make_example_spec(scenario)));
    const PipelineResult r0 = solve_pipeline(base);
    for (std::uint64_t seed : {7u, 8u, 9u}) {
      const Arena jittered = build_arena(make_validated(
          perturb_probabilities(make_example_spec(scenario), seed)));
      REQUIRE(jittered.size() == base.size());
      const PipelineResult r1 = solve_pipeline(jittered);
      CHECK(r1.perfect.win == r0.perfect.win);
      CHECK(r1.belief.win == r0.belief.win);
    }
  }
}
