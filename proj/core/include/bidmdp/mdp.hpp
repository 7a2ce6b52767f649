#pragma once

// Arena model for bidding reachability games played on MDPs. Control
// vertices sell the next move at auction; random vertices sample it from a
// rational-valued distribution. This module owns the text format, structural
// validation, and graph-shape classification used to pick solvers.

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "bidmdp/rational.hpp"

namespace bidmdp {

using VertexId = int;

enum class VertexKind { Control, Random };

/// Graph shape with sink self-loops ignored. Tree implies Acyclic.
enum class StructureClass { General, Acyclic, Tree };

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ": " + message),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

struct Mdp {
  struct Vertex {
    std::string name;
    VertexKind kind = VertexKind::Control;
    std::vector<VertexId> succ;   // declaration order
    std::vector<Rational> prob;   // parallel to succ; empty for Control

    bool operator==(const Vertex& o) const;
  };

  std::vector<Vertex> vertices;
  std::vector<bool> target;  // indexed by VertexId
  std::optional<VertexId> initial;

  std::size_t size() const { return vertices.size(); }
  std::optional<VertexId> find(std::string_view name) const;
  const std::string& name(VertexId v) const { return vertices.at(v).name; }
  bool is_target(VertexId v) const { return target.at(v); }
  /// A sink's only successor is itself.
  bool is_sink(VertexId v) const;
  std::vector<VertexId> targets() const;

  bool operator==(const Mdp& o) const;
};

/// Parses the line-oriented arena format, applies normalize_targets, then
/// validates. Throws ParseError for syntax problems and
/// std::invalid_argument listing the violations for semantic ones.
Mdp parse_mdp(std::istream& in);
Mdp parse_mdp_string(const std::string& text);
Mdp parse_mdp_file(const std::string& path);

/// Every violated structural invariant, as human-readable descriptions;
/// empty means valid.
std::vector<std::string> validate(const Mdp& mdp);

/// Replaces each target's outgoing edges with a self-loop; idempotent.
Mdp normalize_targets(Mdp mdp);

/// Least transition probability of the arena; 1/2 by convention when there
/// is no randomness (no random vertices, or point-mass distributions only).
Rational min_probability(const Mdp& mdp);

StructureClass classify(const Mdp& mdp);

/// Reverse topological order (sinks first, every vertex after its
/// successors) of the graph without sink self-loops; deterministic.
/// Throws std::invalid_argument("graph is cyclic") on cyclic arenas.
std::vector<VertexId> topological_order(const Mdp& mdp);

/// Round-trippable text form: parse_mdp_string(serialize(m)) == m for every
/// valid normalized arena.
std::string serialize(const Mdp& mdp);

/// A solver query: does the reachability player win from `vertex` with
/// budget B and probability target p?
struct ProblemInstance {
  Mdp mdp;
  VertexId vertex = 0;
  Rational budget;
  Rational probability;
};

/// Throws std::invalid_argument unless the vertex exists and both budget
/// and probability lie in [0,1].
void validate_instance(const ProblemInstance& instance);

}  // namespace bidmdp
