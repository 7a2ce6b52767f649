#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bidmdp/approx_solver.hpp"
#include "bidmdp/bellman.hpp"
#include "bidmdp/exact_solver.hpp"
#include "bidmdp/linear.hpp"
#include "bidmdp/mdp.hpp"
#include "bidmdp/special_solvers.hpp"
#include "bidmdp/staircase.hpp"

#include "corpus.hpp"
#include "oracles.hpp"

using namespace bidmdp;

namespace {

const std::string kDataDir = BIDMDP_TEST_DATA_DIR;

Rational rat(const char* text) { return Rational::parse(text).value(); }

Point pt(const char* B, const char* p) { return Point{rat(B), rat(p)}; }

Mdp load(const char* file) { return parse_mdp_file(kDataDir + "/" + file); }

ProblemInstance query(const Mdp& mdp, const char* vertex, const char* B, const char* p) {
  return ProblemInstance{mdp, mdp.find(vertex).value(), rat(B), rat(p)};
}

}  // namespace

TEST_CASE("exact decision on the cyclic arena: frozen witnesses") {
  const Mdp cycle4 = load("cycle4.mdp");

  // A query safely inside the second iterate certifies by containment.
  const Decision reach = alg_exact(query(cycle4, "a", "3/5", "2/5"));
  CHECK(reach.outcome == Outcome::ReachWins);
  CHECK(reach.witness == WitnessKind::Containment);
  CHECK(reach.witness_iteration == 2);
  CHECK(reach.witness_corner.value() == pt("1/2", "1/2"));

  // The mirrored query is separated once the decaying cutoff crosses the
  // certified distance 1/10.
  const Decision safe = alg_exact(query(cycle4, "a", "2/5", "3/5"));
  CHECK(safe.outcome == Outcome::SafetyWins);
  CHECK(safe.witness == WitnessKind::DistanceCutoff);
  CHECK(safe.witness_iteration == 12271);
  CHECK(safe.witness_distance.value() == Rational(1, 10));
  CHECK(safe.witness_cutoff.value() < Rational(1, 10));
  CHECK(distance_cutoff(safe.witness_iteration - 1, cycle4) >= Rational(1, 10));

  // The distance hint sizes the iteration budget to exactly this regime.
  const long hinted = convergence_bound(Rational(1, 10), cycle4);
  CHECK(hinted >= 12271);
  CHECK(hinted <= 12272);
  ExactOptions opts;
  opts.distance_hint = Rational(1, 10);
  const Decision hinted_run = alg_exact(query(cycle4, "a", "2/5", "3/5"), opts);
  CHECK(hinted_run.outcome == Outcome::SafetyWins);
}

TEST_CASE("exact decision: working-precision envelopes agree with exact sets") {
  const Mdp cycle4 = load("cycle4.mdp");
  const Mdp dag9 = load("dag9.mdp");

  struct Case {
    const Mdp* mdp;
    const char* vertex;
    const char* B;
    const char* p;
  };
  const std::vector<Case> battery = {
      {&cycle4, "a", "3/5", "2/5"}, {&cycle4, "a", "1/2", "1/2"},
      {&cycle4, "a", "7/8", "1/4"}, {&cycle4, "b", "1/4", "1/4"},
      {&dag9, "a", "1/4", "1/8"},   {&dag9, "a", "1/8", "1/4"},
      {&dag9, "a", "3/4", "1/2"},   {&dag9, "a", "1/2", "3/4"},
      {&dag9, "a", "7/8", "3/4"},   {&dag9, "d", "1/2", "1/2"},
  };
  for (const Case& c : battery) {
    ExactOptions exact_opts;
    exact_opts.precision_bits = 0;
    exact_opts.max_iterations = 300;
    const Decision pure = alg_exact(query(*c.mdp, c.vertex, c.B, c.p), exact_opts);

    ExactOptions grid_opts;  // default 64-bit working precision
    grid_opts.max_iterations = 500'000;
    const Decision snapped = alg_exact(query(*c.mdp, c.vertex, c.B, c.p), grid_opts);

    if (pure.outcome != Outcome::Unknown && snapped.outcome != Outcome::Unknown) {
      CHECK(pure.outcome == snapped.outcome);
    }
  }

  // Acyclic arenas reach an exact fixpoint: non-membership there is a
  // definitive safety win in pure-exact mode.
  ExactOptions exact_opts;
  exact_opts.precision_bits = 0;
  const Decision stab = alg_exact(query(dag9, "a", "1/2", "3/4"), exact_opts);
  CHECK(stab.outcome == Outcome::SafetyWins);
  CHECK(stab.witness == WitnessKind::Stabilized);
  CHECK(stab.iterations_used <= 12);

  // (2/3, 2/3) sits 1/12 away from the limiting reach set (nearest corner
  // (3/4, 3/4)), so the cutoff 2 e^{-i/4096} fires at ceil(4096 ln 24).
  const Decision off_diag = alg_exact(query(cycle4, "a", "2/3", "2/3"));
  CHECK(off_diag.outcome == Outcome::SafetyWins);
  CHECK(off_diag.witness == WitnessKind::DistanceCutoff);
  CHECK(off_diag.witness_iteration == 13018);
  CHECK(off_diag.witness_distance.has_value());
  CHECK(*off_diag.witness_distance <= rat("1/12"));
  CHECK(*off_diag.witness_distance >= rat("1/12") - Rational(mpz_class(1), mpz_class(1) << 60));

  // A non-dyadic point exactly on the value boundary stays inside the
  // snapped outer envelope and outside the inner one forever: once the
  // grid envelopes reach their fixpoint the run reports Unknown honestly
  // (and quickly) instead of fabricating a separation.  Pure-exact mode
  // decides the same query by plain containment.
  const Mdp third = parse_mdp_string(
      "control a -> b\nrandom b -> t:1/3 d:2/3\nrandom t -> t:1\n"
      "random d -> d:1\ntarget t\ninit a\n");
  const Decision boundary = alg_exact(query(third, "b", "0", "1/3"));
  CHECK(boundary.outcome == Outcome::Unknown);
  CHECK(!boundary.note.empty());
  CHECK(boundary.iterations_used < 1000);
  const Decision boundary_exact = alg_exact(query(third, "b", "0", "1/3"), exact_opts);
  CHECK(boundary_exact.outcome == Outcome::ReachWins);

  // Resource caps surface as Unknown with the dedicated witness kind.
  ExactOptions tiny;
  tiny.corner_cap = 4;
  const Decision capped = alg_exact(query(cycle4, "a", "2/5", "3/5"), tiny);
  CHECK(capped.outcome == Outcome::Unknown);
  CHECK(capped.witness == WitnessKind::ResourceLimit);

  CHECK_THROWS_AS(
      alg_exact(ProblemInstance{cycle4, 0, Rational(2), Rational(1, 2)}),
      std::invalid_argument);
}

TEST_CASE("grid snapping: containment, error bound, idempotence") {
  CHECK_THROWS_AS(Grid(Rational(2, 3)), std::invalid_argument);
  CHECK_THROWS_AS(Grid(Rational(0)), std::invalid_argument);
  CHECK_THROWS_AS(Grid(Rational(-1, 4)), std::invalid_argument);

  const Grid quarter(Rational(1, 4));
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const Mdp mdp = testsupport::random_mdp(seed);
    for (Objective objective : {Objective::Reach, Objective::Safe}) {
      for (const auto& map : iterate(mdp, objective, 3)) {
        for (const auto& set : map.sets) {
          const StaircaseSet over = grid_overapprox(set, quarter);
          const StaircaseSet under = grid_underapprox(set, quarter);
          CHECK(set.subset_of(over));
          CHECK(under.subset_of(set));
          if (!set.is_empty() && !over.is_empty()) {
            CHECK(hausdorff(over, set) <= quarter.alpha);
          }
          CHECK(grid_overapprox(over, quarter) == over);    // idempotent
          CHECK(grid_underapprox(under, quarter) == under);
          CHECK(over.direction() == set.direction());
        }
      }
    }
  }
}

TEST_CASE("abstract safety iteration over-approximates the exact maps") {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const Mdp mdp = testsupport::random_mdp(seed);
    const Grid grid(Rational(1, 4));
    const auto exact = iterate(mdp, Objective::Safe, 6);
    const auto abstract = abstract_safety_trace(mdp, grid, 6);
    REQUIRE(abstract.size() == exact.size());
    for (std::size_t i = 0; i < exact.size(); ++i) {
      for (std::size_t v = 0; v < mdp.size(); ++v) {
        CHECK(exact[i].sets[v].subset_of(abstract[i].sets[v]));
        CHECK(hausdorff(abstract[i].sets[v], exact[i].sets[v]) <=
              grid.alpha * Rational(static_cast<long>(i) + 1));
      }
    }
    // The single-map variant agrees with the trace tail.
    CHECK(equal_sets(abstract_safety_iterate(mdp, grid, 6), abstract.back()));
  }
}

TEST_CASE("approximate decision procedure") {
  const Mdp cycle4 = load("cycle4.mdp");

  const ApproxDecision reach = alg_approx(query(cycle4, "a", "3/5", "2/5"));
  CHECK(reach.decision.outcome == Outcome::ReachWins);
  CHECK(!reach.rounds.empty());
  for (const ApproxRound& round : reach.rounds) {
    // Round h runs n abstract steps on the 1/(n 2^h) grid.
    CHECK(round.alpha == Rational(mpz_class(1), mpz_class(round.n) * (mpz_class(1) << round.h)));
    CHECK(round.n >= 1);
  }

  // A pure auction arena decides the safety side within a few rounds.
  const Mdp pure = parse_mdp_string(
      "control a -> t s\nrandom t -> t:1\nrandom s -> s:1\ntarget t\ninit a\n");
  const ApproxDecision safe = alg_approx(query(pure, "a", "1/4", "3/4"));
  CHECK(safe.decision.outcome == Outcome::SafetyWins);
  CHECK(safe.decision.witness == WitnessKind::DistanceCutoff);
  CHECK(safe.rounds.size() <= 6);

  // Exactly on the threshold diagonal nothing can ever fire; the rounds
  // exhaust honestly.
  ApproxOptions few;
  few.max_rounds = 4;
  const ApproxDecision boundary = alg_approx(query(cycle4, "a", "2/3", "2/3"), few);
  CHECK(boundary.decision.outcome == Outcome::Unknown);
  CHECK(boundary.rounds.size() == 4);
  CHECK(!boundary.decision.note.empty());
}

TEST_CASE("acyclic limit solver: frozen values and boundary dichotomy") {
  const Mdp dag9 = load("dag9.mdp");
  const auto [rstar, sstar] = solve_acyclic(dag9);
  const auto a = static_cast<std::size_t>(dag9.find("a").value());

  CHECK(rstar.sets[a].corners() ==
        std::vector<Point>{pt("0", "0"), pt("1/4", "1/8"), pt("5/8", "3/8"),
                           pt("3/4", "1/2"), pt("7/8", "3/4"), pt("1", "1")});
  CHECK(sstar.sets[a].corners() ==
        std::vector<Point>{pt("1/4", "0"), pt("5/8", "1/8"), pt("3/4", "3/8"),
                           pt("7/8", "1/2"), pt("1", "3/4")});

  // Both maps are fixpoints of the one-step operator.
  CHECK(equal_sets(step(rstar, dag9), rstar));
  CHECK(equal_sets(step(sstar, dag9), sstar));

  // Interior queries on both sides of the threshold.
  CHECK(decide_acyclic(query(dag9, "a", "751/1000", "499/1000")).outcome ==
        Outcome::ReachWins);
  CHECK(decide_acyclic(query(dag9, "a", "749/1000", "501/1000")).outcome ==
        Outcome::SafetyWins);
  CHECK(!decide_acyclic(query(dag9, "a", "751/1000", "499/1000")).boundary_case);

  // Exactly on a shared-boundary corner both membership conditions hold;
  // the reachability side takes precedence and the flag reports it.
  const ExactDecision corner = decide_acyclic(query(dag9, "a", "3/4", "1/2"));
  CHECK(corner.outcome == Outcome::ReachWins);
  CHECK(corner.boundary_case);

  // Budget 1 is special-cased: winning requires a strictly cheaper point.
  CHECK(decide_acyclic(query(dag9, "a", "1", "1")).outcome == Outcome::SafetyWins);
  const ExactDecision rich = decide_acyclic(query(dag9, "a", "1", "3/4"));
  CHECK(rich.outcome == Outcome::ReachWins);
  CHECK(rich.boundary_case);

  CHECK_THROWS_AS(solve_acyclic(load("cycle4.mdp")), std::invalid_argument);
  CHECK_THROWS_AS(decide_acyclic(query(load("cycle4.mdp"), "a", "1/2", "1/2")),
                  std::invalid_argument);
}

TEST_CASE("tree certificates match the acyclic decision") {
  const Mdp pure = parse_mdp_string(
      "control a -> t s\nrandom t -> t:1\nrandom s -> s:1\ntarget t\ninit a\n");

  const auto feasible = [&](const char* B, const char* p) {
    return tree_certificate(query(pure, "a", B, p), Objective::Reach).has_value();
  };
  CHECK(feasible("3/5", "1"));
  CHECK(!feasible("2/5", "1"));
  CHECK(feasible("1/2", "1"));  // exactly on the threshold corner
  CHECK(!feasible("2/5", "1"));

  // The certificate validates, and corrupting it does not.
  const auto cert = tree_certificate(query(pure, "a", "3/5", "1"), Objective::Reach);
  REQUIRE(cert.has_value());
  CHECK(check_certificate(*cert, query(pure, "a", "3/5", "1"), Objective::Reach));
  Certificate broken = *cert;
  broken.points[static_cast<std::size_t>(pure.find("a").value())].p = Rational(2);
  CHECK(!check_certificate(broken, query(pure, "a", "3/5", "1"), Objective::Reach));

  // The safety player certifies the mirror side.
  CHECK(tree_certificate(query(pure, "a", "2/5", "1"), Objective::Safe).has_value());

  // Agreement with the acyclic solver across a small sweep, boundary
  // points included.
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const Mdp tree = testsupport::random_tree(seed);
    const auto [rstar, sstar] = solve_acyclic(tree);
    testsupport::Rng rng(seed ^ 0xbeefULL);
    for (int k = 0; k < 12; ++k) {
      const auto v = static_cast<VertexId>(rng.below(tree.size()));
      Point q{Rational(static_cast<long>(rng.below(17)), 16),
              Rational(static_cast<long>(rng.below(17)), 16)};
      const auto& corners = rstar.sets[static_cast<std::size_t>(v)].corners();
      if (k % 3 == 0 && !corners.empty()) {
        q = corners[rng.below(corners.size())];  // exact boundary point
      }
      const ProblemInstance inst{tree, v, q.B, q.p};
      const bool has_cert = tree_certificate(inst, Objective::Reach).has_value();
      const bool reach_wins = decide_acyclic(inst).outcome == Outcome::ReachWins;
      CHECK(has_cert == reach_wins);
    }
  }

  CHECK_THROWS_AS(tree_certificate(query(load("dag9.mdp"), "a", "1/2", "1/2"),
                                   Objective::Reach),
                  std::invalid_argument);
  TreeSearchOptions capped;
  capped.max_choice_vectors = 1;
  CHECK_THROWS_AS(tree_certificate(query(pure, "a", "3/5", "1"), Objective::Reach, capped),
                  ResourceLimitError);
}

TEST_CASE("exact linear feasibility") {
  {
    LinearSystem sys(1);
    sys.add_range(0, Rational(1, 2), Rational(3, 4));
    const auto solution = linear_feasibility(sys);
    REQUIRE(solution.has_value());
    CHECK((*solution)[0] >= Rational(1, 2));
    CHECK((*solution)[0] <= Rational(3, 4));
  }
  {
    LinearSystem sys(1);
    sys.add_lt({{0, Rational(1)}}, Rational(0));
    sys.add_le({{0, Rational(-1)}}, Rational(0));  // x < 0 and x >= 0
    CHECK(!linear_feasibility(sys).has_value());
  }
  {
    LinearSystem sys(2);
    sys.add_eq({{0, Rational(1)}, {1, Rational(1)}}, Rational(1));
    sys.add_eq({{0, Rational(1)}, {1, Rational(-1)}}, Rational(0));
    const auto solution = linear_feasibility(sys);
    REQUIRE(solution.has_value());
    CHECK((*solution)[0] == Rational(1, 2));
    CHECK((*solution)[1] == Rational(1, 2));
  }
  {
    LinearSystem sys(1);
    sys.add_lt({{0, Rational(1)}}, Rational(1));
    sys.add_le({{0, Rational(-1)}}, Rational(-1));  // x < 1 and x >= 1
    CHECK(!linear_feasibility(sys).has_value());
  }
}

TEST_CASE("pure-graph degeneration has two-corner product form") {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const Mdp dag = testsupport::random_pure_dag(seed);
    const auto [rstar, sstar] = solve_acyclic(dag);
    const auto thresholds = testsupport::average_rule_thresholds(dag);
    for (std::size_t v = 0; v < dag.size(); ++v) {
      const StaircaseSet& set = rstar.sets[v];
      CHECK(set.corner_count() <= 2);
      CHECK(set.min_B_at(Rational(1)).value() == thresholds[v]);
    }
  }
}
