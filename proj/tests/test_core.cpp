#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "bidmdp/bellman.hpp"
#include "bidmdp/exact_solver.hpp"
#include "bidmdp/mdp.hpp"
#include "bidmdp/numeric_bounds.hpp"
#include "bidmdp/rational.hpp"
#include "bidmdp/staircase.hpp"

#include "corpus.hpp"
#include "oracles.hpp"

using namespace bidmdp;

namespace {

const std::string kDataDir = BIDMDP_TEST_DATA_DIR;

Rational rat(const char* text) { return Rational::parse(text).value(); }

Point pt(const char* B, const char* p) { return Point{rat(B), rat(p)}; }

Mdp load(const char* file) { return parse_mdp_file(kDataDir + "/" + file); }

}  // namespace

TEST_CASE("rational parsing, formatting and arithmetic") {
  CHECK(rat("3/4") == Rational(3, 4));
  CHECK(rat("-3/4") == Rational(-3, 4));
  CHECK(rat("0.25") == Rational(1, 4));
  CHECK(rat("7") == Rational(7));
  CHECK(!Rational::parse("").has_value());
  CHECK(!Rational::parse("1/0").has_value());
  CHECK(!Rational::parse("x").has_value());
  CHECK(!Rational::parse("1/2/3").has_value());

  CHECK(Rational(6, 8) == Rational(3, 4));  // canonical form
  CHECK(Rational(1, 2) + Rational(1, 3) == Rational(5, 6));
  CHECK(Rational(1, 2) * Rational(2, 3) == Rational(1, 3));
  CHECK(Rational(1, 2) - Rational(3, 4) == Rational(-1, 4));
  CHECK(Rational(1, 2) / Rational(1, 4) == Rational(2));
  CHECK(Rational(7, 8).halved() == Rational(7, 16));
  CHECK(Rational::average(Rational(1, 4), Rational(3, 4)) == Rational(1, 2));
  CHECK(Rational(3, 4).str() == "3/4");
  CHECK(Rational(2).str() == "2");
  CHECK(Rational(2).frac() == "2/1");
  CHECK(Rational(0).frac() == "0/1");
  CHECK(Rational(3, 4).to_double() == doctest::Approx(0.75));
  CHECK_THROWS_AS(Rational(mpz_class(1), mpz_class(0)), std::invalid_argument);
}

TEST_CASE("rational grid rounding") {
  const mpz_class n(8);
  CHECK(Rational(5, 16).floor_to_grid(n) == Rational(2, 8));
  CHECK(Rational(5, 16).ceil_to_grid(n) == Rational(3, 8));
  CHECK(Rational(3, 8).floor_to_grid(n) == Rational(3, 8));  // already on grid
  CHECK(Rational(3, 8).ceil_to_grid(n) == Rational(3, 8));
  CHECK(Rational(0).floor_to_grid(n) == Rational(0));
  CHECK(Rational(1).ceil_to_grid(n) == Rational(1));

  // Property on a seeded sample: floor <= x <= ceil, both on the grid,
  // within one cell of x.
  testsupport::Rng rng(42);
  for (int k = 0; k < 200; ++k) {
    const Rational x(static_cast<long>(rng.below(1000)), static_cast<long>(1 + rng.below(999)));
    const mpz_class g(static_cast<long>(1 + rng.below(64)));
    const Rational lo = x.floor_to_grid(g);
    const Rational hi = x.ceil_to_grid(g);
    CHECK(lo <= x);
    CHECK(x <= hi);
    CHECK((lo * Rational(g)).is_integer());
    CHECK((hi * Rational(g)).is_integer());
    CHECK(hi - lo <= Rational(mpz_class(1), g));
  }
}

TEST_CASE("staircase canonicalization") {
  const auto dc = StaircaseSet::from_corners(
      {pt("1/2", "1/4"), pt("1/4", "1/2"), pt("3/4", "3/4"), pt("1/2", "1/4")},
      Direction::DownwardClosed);
  CHECK(dc.corners() == std::vector<Point>{pt("1/4", "1/2"), pt("3/4", "3/4")});

  const auto uc = StaircaseSet::from_corners(
      {pt("1/2", "1/4"), pt("1/4", "1/2"), pt("3/4", "3/4")}, Direction::UpwardClosed);
  CHECK(uc.corners() == std::vector<Point>{pt("1/2", "1/4"), pt("3/4", "3/4")});

  CHECK_THROWS_AS(StaircaseSet::from_corners({Point{Rational(3, 2), Rational(1, 2)}},
                                             Direction::DownwardClosed),
                  std::invalid_argument);

  CHECK(StaircaseSet::from_corners({}, Direction::DownwardClosed).is_empty());
  CHECK(StaircaseSet::full(Direction::DownwardClosed).corners() ==
        std::vector<Point>{pt("0", "1")});
  CHECK(StaircaseSet::full(Direction::UpwardClosed).corners() ==
        std::vector<Point>{pt("1", "0")});
}

TEST_CASE("membership, distance and sections agree with scan oracles") {
  // Hand shapes first.
  const auto stairs = StaircaseSet::from_corners(
      {pt("0", "0"), pt("1/2", "1/2"), pt("3/4", "3/4"), pt("1", "1")},
      Direction::DownwardClosed);
  CHECK(stairs.contains(pt("1/2", "1/2")));
  CHECK(stairs.contains(pt("9/10", "1/10")));
  CHECK(!stairs.contains(pt("2/5", "3/5")));
  CHECK(stairs.distance(pt("2/5", "3/5")).value() == Rational(1, 10));
  CHECK(stairs.distance(pt("1/2", "1/2")).value() == Rational(0));
  CHECK(stairs.max_p_at(rat("5/8")).value() == Rational(1, 2));
  CHECK(stairs.max_p_at(rat("1")).value() == Rational(1));
  CHECK(stairs.min_B_at(rat("5/8")).value() == Rational(3, 4));
  CHECK(stairs.min_B_at(rat("0")).value() == Rational(0));

  const auto upper = StaircaseSet::from_corners(
      {pt("1/4", "0"), pt("5/8", "1/8"), pt("3/4", "3/8"), pt("7/8", "1/2"), pt("1", "3/4")},
      Direction::UpwardClosed);
  CHECK(upper.min_p_at(rat("1/2")).value() == Rational(1, 8));
  CHECK(upper.min_p_at(rat("1/5")).value() == Rational(0));
  CHECK(upper.max_B_at(rat("1/8")).value() == Rational(5, 8));
  CHECK(upper.max_B_at(rat("1")).value() == Rational(1));
  CHECK(StaircaseSet::empty(Direction::DownwardClosed).distance(pt("1/2", "1/2")) ==
        std::nullopt);

  // Property sweep: sets produced by value iteration on random arenas,
  // probed on a 9x9 rational grid, against the independent scan oracles.
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const Mdp mdp = testsupport::random_mdp(seed);
    for (Objective objective : {Objective::Reach, Objective::Safe}) {
      const auto trace = iterate(mdp, objective, 4);
      for (const auto& map : trace) {
        for (const auto& set : map.sets) {
          for (int bi = 0; bi <= 8; ++bi) {
            for (int pi = 0; pi <= 8; ++pi) {
              const Point q{Rational(bi, 8), Rational(pi, 8)};
              CHECK(set.contains(q) == testsupport::contains_oracle(set, q));
              const auto d = set.distance(q);
              const auto od = testsupport::distance_oracle(set, q);
              CHECK(d.has_value() == od.has_value());
              if (d && od) {
                CHECK(*d == *od);
                CHECK(d->is_zero() == set.contains(q));
              }
            }
          }
        }
      }
    }
  }
}

TEST_CASE("value iteration is monotone and subset_of is consistent") {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const Mdp mdp = testsupport::random_mdp(seed);
    const auto reach = iterate(mdp, Objective::Reach, 5);
    const auto safe = iterate(mdp, Objective::Safe, 5);
    for (std::size_t v = 0; v < mdp.size(); ++v) {
      for (std::size_t i = 0; i + 1 < reach.size(); ++i) {
        CHECK(reach[i].sets[v].subset_of(reach[i + 1].sets[v]));  // grows
        CHECK(safe[i + 1].sets[v].subset_of(safe[i].sets[v]));    // shrinks
        CHECK(reach[i].sets[v].subset_of(reach[i].sets[v]));      // reflexive
      }
    }
  }
}

TEST_CASE("union, hausdorff, complements and coverage") {
  const auto rect = StaircaseSet::from_corners({pt("0", "1/2")}, Direction::DownwardClosed);
  const auto ell = StaircaseSet::from_corners({pt("0", "0"), pt("1", "1")},
                                              Direction::DownwardClosed);
  const auto joined = set_union(rect, ell);
  CHECK(joined.corners() == std::vector<Point>{pt("0", "1/2"), pt("1", "1")});

  CHECK(hausdorff(rect, StaircaseSet::full(Direction::DownwardClosed)) == Rational(1, 2));
  CHECK(hausdorff(rect, rect) == Rational(0));
  CHECK(hausdorff(rect, StaircaseSet::from_corners({pt("0", "3/4")},
                                                   Direction::DownwardClosed)) ==
        Rational(1, 4));
  CHECK_THROWS_AS(hausdorff(rect, StaircaseSet::empty(Direction::DownwardClosed)),
                  std::invalid_argument);

  // Complement of the upper-left L (target safety start) is the full square.
  const auto target_safe = StaircaseSet::from_corners({pt("0", "0"), pt("1", "1")},
                                                      Direction::UpwardClosed);
  CHECK(complement_closure(target_safe) == StaircaseSet::full(Direction::DownwardClosed));
  CHECK(complement_closure(StaircaseSet::full(Direction::UpwardClosed)).is_empty());

  const auto mid = StaircaseSet::from_corners({pt("1/2", "1/2")}, Direction::UpwardClosed);
  CHECK(complement_closure(mid).corners() ==
        std::vector<Point>{pt("0", "1/2"), pt("1/2", "1")});

  CHECK(complement_to_reach(mid, ell).corners() ==
        std::vector<Point>{pt("0", "1/2"), pt("1/2", "1")});

  // Coverage: iterated pairs on the cyclic arena jointly cover the square.
  const Mdp cycle4 = load("cycle4.mdp");
  const auto rtrace = iterate(cycle4, Objective::Reach, 3);
  const auto strace = iterate(cycle4, Objective::Safe, 3);
  for (std::size_t i = 0; i < rtrace.size(); ++i) {
    for (std::size_t v = 0; v < cycle4.size(); ++v) {
      CHECK(union_cover_check(rtrace[i].sets[v], strace[i].sets[v], Rational(1, 16)));
    }
  }
  // A pair of bare Ls leaves the interior uncovered.
  CHECK(!union_cover_check(ell, target_safe, Rational(1, 16)));
}

TEST_CASE("arena parsing, validation and classification") {
  const Mdp dag9 = load("dag9.mdp");
  CHECK(dag9.size() == 9);
  CHECK(classify(dag9) == StructureClass::Acyclic);
  CHECK(dag9.find("a").has_value());
  CHECK(dag9.is_target(dag9.find("t").value()));
  CHECK(dag9.is_sink(dag9.find("l1").value()));
  CHECK(!dag9.is_sink(dag9.find("d").value()));
  CHECK(dag9.initial == dag9.find("a"));
  CHECK(min_probability(dag9) == Rational(1, 2));

  const Mdp cycle4 = load("cycle4.mdp");
  CHECK(classify(cycle4) == StructureClass::General);
  CHECK(min_probability(cycle4) == Rational(1, 2));
  CHECK_THROWS_AS(topological_order(cycle4), std::invalid_argument);

  // Round trip through the text form.
  CHECK(parse_mdp_string(serialize(dag9)) == dag9);
  CHECK(parse_mdp_string(serialize(cycle4)) == cycle4);

  // Reverse topological order puts every vertex after its successors.
  const auto order = topological_order(dag9);
  std::vector<int> position(dag9.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    position[static_cast<std::size_t>(order[i])] = static_cast<int>(i);
  }
  for (std::size_t v = 0; v < dag9.size(); ++v) {
    for (VertexId u : dag9.vertices[v].succ) {
      if (static_cast<std::size_t>(u) == v) {
        continue;
      }
      CHECK(position[static_cast<std::size_t>(u)] < position[v]);
    }
  }

  // Pure auction arena: minimum probability falls back to 1/2.
  const Mdp pure = parse_mdp_string(
      "control a -> t s\nrandom t -> t:1\nrandom s -> s:1\ntarget t\ninit a\n");
  CHECK(min_probability(pure) == Rational(1, 2));
  CHECK(classify(pure) == StructureClass::Tree);

  CHECK_THROWS_AS(parse_mdp_string("frobnicate a -> b\n"), ParseError);
  CHECK_THROWS_AS(parse_mdp_string("control a -> nowhere\ninit a\n"), ParseError);
  CHECK_THROWS_AS(
      parse_mdp_string("random a -> a:1/2 b:1/4\ncontrol b -> a\ninit a\n"),
      std::invalid_argument);  // probabilities do not sum to one (validation)
}

TEST_CASE("corpus generators produce valid arenas of the right shape") {
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    const Mdp mdp = testsupport::random_mdp(seed);
    CHECK(validate(mdp).empty());
    CHECK(mdp.size() >= 2);
    CHECK(mdp.size() <= 6);
    CHECK(!mdp.targets().empty());
    for (const auto& vertex : mdp.vertices) {
      for (const Rational& prob : vertex.prob) {
        CHECK(prob.den() <= 8);
      }
    }

    const Mdp tree = testsupport::random_tree(seed);
    CHECK(validate(tree).empty());
    CHECK(tree.size() <= 10);
    CHECK(classify(tree) == StructureClass::Tree);
    CHECK(!tree.targets().empty());

    const Mdp dag = testsupport::random_pure_dag(seed);
    CHECK(validate(dag).empty());
    CHECK(classify(dag) == StructureClass::Acyclic);
    for (const auto& vertex : dag.vertices) {
      if (vertex.kind == VertexKind::Random) {
        CHECK(vertex.succ.size() == 1);  // point-mass sinks only
      }
    }
  }
}

TEST_CASE("initial maps and one-step operators") {
  const Mdp cycle4 = load("cycle4.mdp");
  const auto ra = initial_reach(cycle4);
  const auto sa = initial_safe(cycle4);
  const auto vid = [&](const char* name) {
    return static_cast<std::size_t>(cycle4.find(name).value());
  };
  CHECK(ra.sets[vid("c")].corners() == std::vector<Point>{pt("0", "1")});
  CHECK(ra.sets[vid("a")].corners() == std::vector<Point>{pt("0", "0"), pt("1", "1")});
  CHECK(sa.sets[vid("c")].corners() == std::vector<Point>{pt("0", "0"), pt("1", "1")});
  CHECK(sa.sets[vid("a")].corners() == std::vector<Point>{pt("1", "0")});

  // One step: only the coin vertex b sees the target yet.
  const auto r1 = step(ra, cycle4);
  CHECK(r1.sets[vid("b")].corners() == std::vector<Point>{pt("0", "1/2"), pt("1", "1")});
  CHECK(r1.sets[vid("a")].corners() == std::vector<Point>{pt("0", "0"), pt("1", "1")});
  CHECK(r1.sets[vid("c")] == ra.sets[vid("c")]);  // sinks keep their set
  CHECK(r1.sets[vid("d")] == ra.sets[vid("d")]);

  // The same shapes straight from the operators.
  const auto ell = StaircaseSet::from_corners({pt("0", "0"), pt("1", "1")},
                                              Direction::DownwardClosed);
  const auto full = StaircaseSet::full(Direction::DownwardClosed);
  const auto mixed = apply_random(
      {{Rational(1, 2), &ell}, {Rational(1, 2), &full}});
  CHECK(mixed.corners() == std::vector<Point>{pt("0", "1/2"), pt("1", "1")});

  const auto b1 = StaircaseSet::from_corners({pt("0", "1/2"), pt("1", "1")},
                                             Direction::DownwardClosed);
  const auto priced = apply_control({&b1, &ell});
  CHECK(priced.corners() ==
        std::vector<Point>{pt("0", "0"), pt("1/2", "1/2"), pt("1", "1")});

  // equal_sets ignores the iteration stamp.
  ValueMap relabeled = ra;
  relabeled.iteration = 99;
  CHECK(equal_sets(relabeled, ra));
  CHECK(!equal_sets(r1, ra));

  CHECK_THROWS_AS(iterate(cycle4, Objective::Reach, 10, /*corner_cap=*/8),
                  ResourceLimitError);
}

TEST_CASE("certified transcendental bounds") {
  const Mdp cycle4 = load("cycle4.mdp");
  CHECK(distance_cutoff(0, cycle4) == Rational(2));
  CHECK(distance_cutoff(100, cycle4) <= distance_cutoff(50, cycle4));
  CHECK(distance_cutoff(50, cycle4) <= distance_cutoff(0, cycle4));
  CHECK_THROWS_AS(distance_cutoff(-1, cycle4), std::invalid_argument);

  CHECK(convergence_bound(Rational(1, 2), cycle4) == 5679);
  const Mdp trivial = parse_mdp_string("random t -> t:1\ntarget t\ninit t\n");
  CHECK(convergence_bound(Rational(1, 2), trivial) == 23);
  CHECK_THROWS_AS(convergence_bound(Rational(0), cycle4), std::invalid_argument);
  CHECK_THROWS_AS(convergence_bound(Rational(2), cycle4), std::invalid_argument);

  // Upper-bound property against the double-precision reference, with a
  // tolerance wide enough to absorb double rounding.
  for (int k = 1; k <= 64; ++k) {
    const Rational q(k, 8);
    if (q >= Rational(1)) {
      const double u = bounds::ln_upper(q).to_double();
      const double ref = std::log(q.to_double());
      CHECK(u >= ref - 1e-12);
      CHECK(u <= ref + 1e-6);
    }
    const double e = bounds::exp_neg_upper(Rational(k, 8)).to_double();
    const double eref = std::exp(-q.to_double());
    CHECK(e >= eref - 1e-12);
    CHECK(e <= eref + 1e-6);

    const Rational s = bounds::sqrt_upper(Rational(k, 8));
    CHECK(s * s >= Rational(k, 8));  // exact upper bound
    CHECK(s.to_double() <= std::sqrt(q.to_double()) + 1e-6);
  }
  CHECK_THROWS_AS(bounds::ln_upper(Rational(1, 2)), std::invalid_argument);
  CHECK_THROWS_AS(bounds::exp_neg_upper(Rational(-1)), std::invalid_argument);
  CHECK_THROWS_AS(bounds::sqrt_upper(Rational(-1)), std::invalid_argument);
}
