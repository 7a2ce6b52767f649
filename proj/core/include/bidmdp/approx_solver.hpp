#pragma once

#include <optional>
#include <vector>

#include "bidmdp/bellman.hpp"
#include "bidmdp/exact_solver.hpp"
#include "bidmdp/mdp.hpp"
#include "bidmdp/rational.hpp"
#include "bidmdp/staircase.hpp"

namespace bidmdp {

/// Uniform grid of resolution alpha = 1/inverse over [0,1]^2.
struct Grid {
  /// Throws std::invalid_argument unless alpha is the reciprocal of a
  /// positive integer.
  explicit Grid(const Rational& alpha);

  Rational alpha;
  mpz_class inverse; ///< 1/alpha, the number of cells per axis
};

/// Outward snap of a staircase set to the grid: every corner moves to
/// the nearest grid point that enlarges the set (budgets relax toward
/// the winning side, probabilities toward the losing side).  The result
/// contains the input and adds at most alpha per axis.
StaircaseSet grid_overapprox(const StaircaseSet& set, const Grid& grid);

/// Inward snap of a staircase set to the grid: the mirror image of
/// grid_overapprox.  Every corner moves to the nearest grid point that
/// shrinks the set, so the result is contained in the input and removes
/// at most alpha per axis.
StaircaseSet grid_underapprox(const StaircaseSet& set, const Grid& grid);

/// n steps of grid-abstracted safety iteration: each exact one-step
/// update is followed by an outward snap, so every abstract map
/// over-approximates its exact counterpart.  Returns the final map.
ValueMap abstract_safety_iterate(const Mdp& mdp, const Grid& grid, long n,
                                 std::size_t corner_cap = kDefaultCornerCap);

/// Same, returning all maps 0..n (used by diagnostics and tests).
std::vector<ValueMap> abstract_safety_trace(const Mdp& mdp, const Grid& grid, long n,
                                            std::size_t corner_cap = kDefaultCornerCap);

/// One refinement round of the approximate decision procedure.
struct ApproxRound {
  int h = 0;            ///< refinement index; target precision 2^-h
  long n = 0;           ///< abstract iterations executed this round
  Rational alpha;       ///< grid resolution used this round
  Outcome outcome = Outcome::Unknown;
};

struct ApproxOptions {
  int max_rounds = 12;
  std::size_t corner_cap = kDefaultCornerCap;
};

struct ApproxDecision {
  Decision decision;
  std::vector<ApproxRound> rounds;
};

/// Grid-abstracted decision procedure.  Round h runs n_h abstract safety
/// iterations on a 2^-h-calibrated grid, derives an under-approximation
/// of the reachability set from the abstract safety set's complement,
/// and applies two sound tests:
///
///   (3) the derived reachability set contains (B, p)        -> ReachWins
///   (4) dist((B, p), derived set) >= 2 * 2^-h               -> SafetyWins
///
/// Rounds continue with doubled precision until a test fires or
/// max_rounds is reached (Unknown).  Decides every query at L-infinity
/// distance > 0 from the threshold, given enough rounds.
ApproxDecision alg_approx(const ProblemInstance& instance, const ApproxOptions& options = {});

} // namespace bidmdp
