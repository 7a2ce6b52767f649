#pragma once

// One-step value-set operators and the bounded-horizon value-iteration
// driver. Reachability sets are downward-closed and grow; safety sets are
// upward-closed and shrink. Random vertices average successor probability
// levels; control vertices price the move auction by averaging the budget
// requirements of the best and worst successors.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "bidmdp/mdp.hpp"
#include "bidmdp/staircase.hpp"

namespace bidmdp {

enum class Objective { Reach, Safe };

/// Per-vertex value sets at one iteration.
struct ValueMap {
  Objective objective = Objective::Reach;
  int iteration = 0;
  std::vector<StaircaseSet> sets;  // indexed by VertexId

  bool operator==(const ValueMap& o) const {
    return objective == o.objective && iteration == o.iteration &&
           sets == o.sets;
  }
};

/// True iff the two maps carry identical per-vertex sets (iteration indices
/// may differ); the stabilization test.
bool equal_sets(const ValueMap& a, const ValueMap& b);

/// Thrown when a configurable resource cap (corner budget, search space)
/// is exhausted; carries how far the computation got.
class ResourceLimitError : public std::runtime_error {
 public:
  ResourceLimitError(const std::string& message, long reached_iteration)
      : std::runtime_error(message + " (reached iteration " +
                           std::to_string(reached_iteration) + ")"),
        reached_iteration_(reached_iteration) {}
  long reached_iteration() const { return reached_iteration_; }

 private:
  long reached_iteration_;
};

inline constexpr std::size_t kDefaultCornerCap = 2'000'000;

/// Iteration-0 reachability sets: full square at targets, otherwise the
/// bottom-right L (any budget achieves probability 0; budget 1 achieves 1).
ValueMap initial_reach(const Mdp& mdp);

/// Iteration-0 safety sets: top-left L at targets (budget 0, or probability
/// bound 1, is unavoidable), otherwise the full square.
ValueMap initial_safe(const Mdp& mdp);

struct WeightedSet {
  Rational weight;          // positive, weights sum to 1
  const StaircaseSet* set;  // non-owning
};

/// Random-vertex operator: per budget the achievable probabilities are the
/// convex combination of the extreme achievable probability per successor.
/// All sets must share a direction; an empty successor set yields the empty
/// set.
StaircaseSet apply_random(const std::vector<WeightedSet>& successors);

/// Control-vertex operator: per probability level p, with L(p) the least
/// (Reach) or greatest (Safe) workable budget per successor, the result's
/// budget frontier at p is the average of the best and worst successors'
/// L(p). Successor collection must be non-empty and share a direction.
StaircaseSet apply_control(const std::vector<const StaircaseSet*>& successors);

/// One synchronous step: sinks (hence targets) keep their set, control and
/// random vertices apply their operator to the previous map.
ValueMap step(const ValueMap& previous, const Mdp& mdp);

/// Full trace of iterations 0..n. Throws ResourceLimitError when the total
/// number of stored corners exceeds corner_cap.
std::vector<ValueMap> iterate(const Mdp& mdp, Objective objective, int n,
                              std::size_t corner_cap = kDefaultCornerCap);

}  // namespace bidmdp
