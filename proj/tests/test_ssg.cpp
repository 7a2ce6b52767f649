#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

#include "bidmdp/mdp.hpp"
#include "bidmdp/ssg.hpp"

#include "corpus.hpp"
#include "oracles.hpp"

using namespace bidmdp;

namespace {

Rational rat(const char* text) { return Rational::parse(text).value(); }

Rational oracle_value(const Ssg& game) {
  return testsupport::dag_ssg_values(game)[static_cast<std::size_t>(game.initial.value())];
}

}  // namespace

TEST_CASE("game parsing, sink canonicalization and round trips") {
  const auto suite = testsupport::alternating_ssg_suite();
  REQUIRE(suite.size() == 5);
  for (const auto& entry : suite) {
    CHECK(validate_ssg(entry.game).empty());
    CHECK(validate_alternation(entry.game).empty());
    CHECK(parse_ssg_string(serialize(entry.game)) == entry.game);
    CHECK(oracle_value(entry.game) == entry.value);
  }

  // Sinks are canonicalized to point-mass random vertices on parse, no
  // matter how they were declared.
  const Ssg owned_sink = parse_ssg_string(
      "p1 a -> r\nrandom r -> t:1/2 s:1/2\np0 s -> s\nrandom t -> t:1\n"
      "target t\ninit a\n");
  const VertexId s = owned_sink.find("s").value();
  CHECK(owned_sink.vertices[static_cast<std::size_t>(s)].kind == SsgKind::Random);
  CHECK(owned_sink.is_sink(s));
  CHECK(owned_sink.vertices[static_cast<std::size_t>(s)].prob ==
        std::vector<Rational>{Rational(1)});

  // A target with outgoing edges is rewritten as a self-loop.
  const Ssg live_target = parse_ssg_string(
      "p1 a -> r\nrandom r -> t:1\np0 t -> a\ntarget t\ninit a\n");
  const VertexId t = live_target.find("t").value();
  CHECK(live_target.is_sink(t));
  CHECK(live_target.is_target(t));

  CHECK(to_string(SsgKind::PlayerZero) == "p0");
  CHECK(to_string(SsgKind::PlayerOne) == "p1");
  CHECK(to_string(SsgKind::Random) == "random");

  CHECK_THROWS_AS(parse_ssg_string("p2 a -> b\n"), ParseError);
  CHECK_THROWS_AS(parse_ssg_string("p1 a -> nowhere\ninit a\n"), ParseError);
}

TEST_CASE("alternation discipline: detection and repair") {
  // Player 1 handing directly to Player 0 breaks the cycle.
  const std::string broken_text =
      "p1 a -> b\np0 b -> r\nrandom r -> t:1\nrandom t -> t:1\ntarget t\ninit a\n";
  const Ssg broken = parse_ssg_string(broken_text);
  CHECK(!validate_alternation(broken).empty());

  const Ssg fixed = enforce_alternation(broken);
  CHECK(validate_alternation(fixed).empty());
  CHECK(validate_ssg(fixed).empty());
  // Pass-through insertion preserves the game value.
  CHECK(oracle_value(fixed) == oracle_value(broken));
  CHECK(oracle_value(fixed) == Rational(1));

  // Already-alternating games come back unchanged.
  const auto suite = testsupport::alternating_ssg_suite();
  for (const auto& entry : suite) {
    CHECK(enforce_alternation(entry.game) == entry.game);
  }
}

TEST_CASE("reduction to the bidding arena") {
  const auto suite = testsupport::alternating_ssg_suite();
  const Ssg& game = suite.front().game;  // p1 a, p0 b, five coins

  const Mdp arena = reduce(game);
  // |V| + |V0| + |V1| vertices: one escape sink per owned vertex.
  CHECK(arena.size() == game.size() + 2);

  const auto a_escape = arena.find("a'");
  const auto b_escape = arena.find("b'");
  REQUIRE(a_escape.has_value());
  REQUIRE(b_escape.has_value());
  // Player 1 escapes into a target, Player 0 into a dead sink.
  CHECK(arena.is_target(*a_escape));
  CHECK(!arena.is_target(*b_escape));
  CHECK(arena.is_sink(*a_escape));
  CHECK(arena.is_sink(*b_escape));

  // Ownership is erased and the escape edge is appended.
  const VertexId a = arena.find("a").value();
  const VertexId b = arena.find("b").value();
  CHECK(arena.vertices[static_cast<std::size_t>(a)].kind == VertexKind::Control);
  CHECK(arena.vertices[static_cast<std::size_t>(b)].kind == VertexKind::Control);
  const auto& a_succ = arena.vertices[static_cast<std::size_t>(a)].succ;
  const auto& b_succ = arena.vertices[static_cast<std::size_t>(b)].succ;
  CHECK(std::find(a_succ.begin(), a_succ.end(), *a_escape) != a_succ.end());
  CHECK(std::find(b_succ.begin(), b_succ.end(), *b_escape) != b_succ.end());

  CHECK(validate(arena).empty());
  // The reduction of a dag game stays loop-free; this one is even a tree.
  CHECK(classify(arena) == StructureClass::Tree);

  // The reduction refuses non-alternating input instead of normalizing.
  const Ssg broken = parse_ssg_string(
      "p1 a -> b\np0 b -> r\nrandom r -> t:1\nrandom t -> t:1\ntarget t\ninit a\n");
  CHECK_THROWS_AS(reduce(broken), std::invalid_argument);
}

TEST_CASE("value bracketing through the bidding reduction") {
  const auto suite = testsupport::alternating_ssg_suite();
  for (const auto& entry : suite) {
    const SsgValueBracket bracket = ssg_value_via_bidding(entry.game, rat("1/16"));
    CHECK(!bracket.exhausted);
    CHECK(bracket.hi - bracket.lo <= rat("1/16"));
    CHECK(bracket.lo <= entry.value);
    CHECK(entry.value <= bracket.hi);
    // Acyclic games stabilize, so the bracket collapses to the exact value.
    CHECK(bracket.exact);
    CHECK(bracket.lo == entry.value);
  }

  // Cyclic coin game: value 1/2, still exact through stabilization at the
  // reduced arena.
  const Ssg coin = parse_ssg_string(
      "p1 a -> c\nrandom c -> t:1/2 s:1/2\nrandom t -> t:1\nrandom s -> s:1\n"
      "target t\ninit a\n");
  const SsgValueBracket coin_bracket = ssg_value_via_bidding(coin, rat("1/16"));
  CHECK(coin_bracket.lo == rat("1/2"));
  CHECK(coin_bracket.hi == rat("1/2"));

  // Starved budgets report exhaustion honestly with a still-sound bracket.
  SsgValueOptions starved;
  starved.max_iterations = 1;
  const SsgValueBracket rough = ssg_value_via_bidding(suite[3].game, rat("1/16"), starved);
  CHECK(rough.exhausted);
  CHECK(rough.lo <= suite[3].value);
  CHECK(suite[3].value <= rough.hi);
}

TEST_CASE("classical value iteration oracle") {
  const auto suite = testsupport::alternating_ssg_suite();
  for (const auto& entry : suite) {
    const SsgValueBounds bounds = brute_force_ssg_value(entry.game, 64);
    CHECK(bounds.lo == entry.value);
    CHECK(bounds.hi == entry.value);
  }

  // A cyclic game converges from both sides without stabilizing exactly.
  const Ssg loop = parse_ssg_string(
      "p0 a -> r\nrandom r -> a:1/2 t:1/2\nrandom t -> t:1\ntarget t\ninit a\n");
  const SsgValueBounds bounds = brute_force_ssg_value(loop, 64);
  CHECK(bounds.hi == Rational(1));
  CHECK(bounds.lo < bounds.hi);
  CHECK(bounds.hi - bounds.lo <= Rational(mpz_class(1), mpz_class(mpz_class(1) << 31)));
}
