#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "bidmdp/bellman.hpp"
#include "bidmdp/exact_solver.hpp"
#include "bidmdp/mdp.hpp"
#include "bidmdp/staircase.hpp"

namespace bidmdp {

/// Witness that a query point lies in the limit set of one player: a
/// per-vertex point assignment plus the discrete choices (doubling /
/// escape successor per control vertex, disjunct per constrained leaf)
/// under which the assignment satisfies the exact linear constraint
/// system of the tree characterization.
struct Certificate {
  enum class LeafChoice {
    None,       ///< vertex carries no disjunctive constraint
    BudgetOne,  ///< B_z = 1 chosen (reachability system, non-target sink)
    ProbZero,   ///< p_z = 0 chosen (reachability system, non-target sink)
    BudgetZero, ///< B_z = 0 chosen (safety system, target sink)
    ProbOne,    ///< p_z = 1 chosen (safety system, target sink)
  };

  Objective player = Objective::Reach;
  /// (B_u, p_u) per vertex; vertices outside the queried subtree are
  /// unconstrained and default to (0, 0).
  std::vector<Point> points;
  /// Chosen successor per control vertex (nullopt elsewhere): the
  /// doubling successor u- for Reach, the escape successor for Safe.
  std::vector<std::optional<VertexId>> chosen;
  /// Chosen disjunct per constrained leaf (None elsewhere).
  std::vector<LeafChoice> leaf_choice;
};

/// Definitive answer for acyclic arenas; evidence is the stabilized
/// value-map pair.
struct ExactDecision {
  Outcome outcome = Outcome::Unknown; ///< ReachWins or SafetyWins, never Unknown
  /// True when the query sits exactly on the shared boundary (both
  /// players' membership conditions hold); the outcome then follows the
  /// boundary tie-break of the finite-horizon characterization.
  bool boundary_case = false;
  ValueMap rval; ///< stabilized reachability map (= the limit)
  ValueMap sval; ///< stabilized safety map (= the limit)
};

/// Exact limit sets for acyclic arenas: |V| value-iteration steps
/// suffice, after which the maps are a fixpoint of the one-step
/// operator.  Throws std::invalid_argument on cyclic inputs.
std::pair<ValueMap, ValueMap> solve_acyclic(const Mdp& mdp);

/// Always-terminating decision for acyclic arenas, exact even on
/// threshold boundary points:
///   ReachWins  iff some B' <= B with B' < 1 has (B', p) in rval*(v);
///   SafetyWins iff some B' > B has (B', p) in sval*(v), or B = 1 and
///               (1, p) in sval*(v).
/// Both can hold on the boundary; ReachWins takes precedence and
/// boundary_case is set.  Throws std::invalid_argument on cyclic inputs.
ExactDecision decide_acyclic(const ProblemInstance& instance);

struct TreeSearchOptions {
  /// Upper bound on the number of discrete choice vectors to try.
  std::size_t max_choice_vectors = std::size_t(1) << 20;
};

/// Search for a certificate that `player` wins the query carried by
/// `instance`, over the subtree rooted at the queried vertex.  The
/// discrete choices are enumerated deterministically (control vertices
/// in sinks-first topological order, successors in declaration order,
/// constrained leaves in vertex order) and each candidate is tested by
/// exact linear feasibility; the first feasible assignment wins.
/// Returns nullopt when every choice vector is infeasible.  Throws
/// std::invalid_argument unless the arena is a tree, and
/// ResourceLimitError when the choice space exceeds the cap.
std::optional<Certificate> tree_certificate(const ProblemInstance& instance, Objective player,
                                            const TreeSearchOptions& options = {});

/// Re-validate every constraint of the tree characterization against a
/// certificate, with exact arithmetic.  The doubling/escape companion
/// value at a control vertex u is re-derived as 2 B_u - B_chosen.
bool check_certificate(const Certificate& certificate, const ProblemInstance& instance,
                       Objective player);

} // namespace bidmdp
