#pragma once
/// Simple stochastic games, their even-alternation normal form, and the
/// reduction that turns value computation into bidding-threshold queries
/// at budget one third.

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bidmdp/bellman.hpp"
#include "bidmdp/mdp.hpp"
#include "bidmdp/rational.hpp"

namespace bidmdp {

/// Vertex ownership: Player 0 maximizes the probability of reaching the
/// target set, Player 1 minimizes it, random vertices sample a fixed
/// distribution.
enum class SsgKind { PlayerZero, PlayerOne, Random };

std::string to_string(SsgKind kind);

struct Ssg {
  struct Vertex {
    std::string name;
    SsgKind kind = SsgKind::Random;
    std::vector<VertexId> succ;
    std::vector<Rational> prob; ///< parallel to succ at random vertices

    bool operator==(const Vertex& o) const;
  };

  std::vector<Vertex> vertices;
  std::vector<bool> target;
  std::optional<VertexId> initial;

  std::size_t size() const { return vertices.size(); }
  std::optional<VertexId> find(std::string_view name) const;
  const std::string& name(VertexId v) const { return vertices.at(static_cast<std::size_t>(v)).name; }
  bool is_target(VertexId v) const { return target.at(static_cast<std::size_t>(v)); }
  /// A sink is a vertex whose only edge is its self-loop.
  bool is_sink(VertexId v) const;
  bool operator==(const Ssg& o) const;
};

/// Parses the game format: `p0|p1 NAME -> SUCC...`, `random NAME ->
/// SUCC:PROB...`, `target NAME...`, `init NAME`, `#` comments.  Applies
/// normalize_sinks and rejects structurally invalid games.
Ssg parse_ssg(std::istream& in);
Ssg parse_ssg_string(const std::string& text);
Ssg parse_ssg_file(const std::string& path);

std::string serialize(const Ssg& ssg);

/// Rewrites every target as a self-loop and canonicalizes every sink to
/// a point-mass random vertex.  Value-preserving; keeps the alternation
/// discipline indifferent to how a play ends.
Ssg normalize_sinks(Ssg ssg);

/// Structural checks (successor lists, distributions, table sizes);
/// returns human-readable violations, empty when well formed.
std::vector<std::string> validate_ssg(const Ssg& ssg);

/// Checks the even-alternation discipline: along every path from the
/// initial vertex the ownership cycles Player 1, random, Player 0,
/// random; sinks are exempt.  Empty result means alternating.
std::vector<std::string> validate_alternation(const Ssg& ssg);

/// Inserts single-successor pass-through vertices (point-mass random,
/// single-choice player) until the alternation discipline holds.  Game
/// values are preserved; already-alternating input comes back unchanged
/// up to sink canonicalization.
Ssg enforce_alternation(Ssg raw);

/// Builds the bidding arena of an alternating game: ownership is erased
/// to plain control vertices, every Player 0 vertex gains a fresh
/// non-target sink successor, and every Player 1 vertex gains a fresh
/// target sink successor.  The result has exactly |V| + |V0| + |V1|
/// vertices.  Throws std::invalid_argument on non-alternating input
/// (run enforce_alternation first; this step never normalizes silently).
Mdp reduce(const Ssg& ssg);

struct SsgValueBracket {
  Rational lo;             ///< certified lower bound on the game value
  Rational hi;             ///< certified upper bound
  bool exact = false;      ///< safety maps stabilized; lo == hi is the value
  bool exhausted = false;  ///< a query hit its budget before the width goal
  long iterations_used = 0;
};

struct SsgValueOptions {
  long max_iterations = 1024; ///< per-phase iteration budget on the arena
  long bisection_cap = 64;
  std::size_t corner_cap = kDefaultCornerCap;
};

/// Brackets the game value through the bidding reduction: with budget
/// exactly one third, the value equals the least p such that (1/3, p)
/// lies in the limiting safety set at the initial vertex.  When the
/// safety maps stabilize the value is exact; otherwise the bracket
/// combines the monotone lower bound of the last map with bisection over
/// decided threshold queries, reporting exhaustion honestly rather than
/// widening.
SsgValueBracket ssg_value_via_bidding(const Ssg& ssg, const Rational& precision,
                                      const SsgValueOptions& options = {});

/// Classical min-max value iteration on the game itself (the testing
/// oracle): `lo` rises from the all-zero start, `hi` falls from the
/// all-one start; vertices with no path to a target stay at zero.
struct SsgValueBounds {
  Rational lo;
  Rational hi;
};

SsgValueBounds brute_force_ssg_value(const Ssg& ssg, long iterations);

} // namespace bidmdp
