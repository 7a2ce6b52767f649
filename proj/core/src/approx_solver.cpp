#include "bidmdp/approx_solver.hpp"

#include <algorithm>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "bidmdp/numeric_bounds.hpp"

namespace bidmdp {

namespace {

Rational rational_pow(const Rational& base, int exponent) {
  Rational result(1);
  for (int k = 0; k < exponent; ++k) {
    result *= base;
  }
  return result;
}

StaircaseSet snap_corner_stream(const StaircaseSet& set, const Grid& grid, bool outward) {
  std::vector<Point> snapped;
  snapped.reserve(set.corners().size());
  const bool reach = set.direction() == Direction::DownwardClosed;
  // Outward snapping relaxes budgets toward the winning side (floor for
  // reach, ceil for safety); inward snapping does the opposite.
  const bool floor_budget = (reach == outward);
  for (const Point& c : set.corners()) {
    if (floor_budget) {
      snapped.push_back({c.B.floor_to_grid(grid.inverse), c.p.ceil_to_grid(grid.inverse)});
    } else {
      snapped.push_back({c.B.ceil_to_grid(grid.inverse), c.p.floor_to_grid(grid.inverse)});
    }
  }
  return StaircaseSet::from_sorted(std::move(snapped), set.direction());
}

ValueMap snap_map(ValueMap map, const Grid& grid) {
  for (auto& set : map.sets) {
    set = snap_corner_stream(set, grid, /*outward=*/true);
  }
  return map;
}

std::size_t total_corners(const ValueMap& map) {
  std::size_t total = 0;
  for (const auto& set : map.sets) {
    total += set.corners().size();
  }
  return total;
}

} // namespace

Grid::Grid(const Rational& a) : alpha(a) {
  if (!(alpha > Rational(0)) || alpha > Rational(1) || alpha.num() != 1) {
    throw std::invalid_argument("Grid: resolution must be the reciprocal of a positive integer");
  }
  inverse = alpha.den();
}

StaircaseSet grid_overapprox(const StaircaseSet& set, const Grid& grid) {
  return snap_corner_stream(set, grid, /*outward=*/true);
}

StaircaseSet grid_underapprox(const StaircaseSet& set, const Grid& grid) {
  return snap_corner_stream(set, grid, /*outward=*/false);
}

ValueMap abstract_safety_iterate(const Mdp& mdp, const Grid& grid, long n,
                                 std::size_t corner_cap) {
  if (n < 0) {
    throw std::invalid_argument("abstract_safety_iterate: negative iteration count");
  }
  ValueMap current = snap_map(initial_safe(mdp), grid);
  for (long i = 0; i < n; ++i) {
    ValueMap next = snap_map(step(current, mdp), grid);
    if (equal_sets(next, current)) {
      // Fixpoint of the snapped update: every later map is identical, so
      // the n-step map has already been computed.
      current.iteration = static_cast<int>(
          std::min<long>(n, std::numeric_limits<int>::max()));
      return current;
    }
    current = std::move(next);
    current.iteration = static_cast<int>(i + 1);
    const std::size_t corners = total_corners(current);
    if (corners > corner_cap) {
      std::ostringstream msg;
      msg << "abstract map at iteration " << (i + 1) << " holds " << corners
          << " corners > cap " << corner_cap;
      throw ResourceLimitError(msg.str(), i + 1);
    }
  }
  return current;
}

std::vector<ValueMap> abstract_safety_trace(const Mdp& mdp, const Grid& grid, long n,
                                            std::size_t corner_cap) {
  if (n < 0) {
    throw std::invalid_argument("abstract_safety_trace: negative iteration count");
  }
  std::vector<ValueMap> trace;
  trace.reserve(static_cast<std::size_t>(n) + 1);
  trace.push_back(snap_map(initial_safe(mdp), grid));
  std::size_t stored = total_corners(trace.back());
  for (long i = 0; i < n; ++i) {
    ValueMap next = snap_map(step(trace.back(), mdp), grid);
    next.iteration = static_cast<int>(i + 1);
    stored += total_corners(next);
    if (stored > corner_cap) {
      std::ostringstream msg;
      msg << "abstract trace through iteration " << (i + 1) << " holds " << stored
          << " corners > cap " << corner_cap;
      throw ResourceLimitError(msg.str(), i + 1);
    }
    trace.push_back(std::move(next));
  }
  return trace;
}

ApproxDecision alg_approx(const ProblemInstance& instance, const ApproxOptions& options) {
  validate_instance(instance);
  const Mdp& mdp = instance.mdp;
  const auto v = static_cast<std::size_t>(instance.vertex);
  const Point query{instance.budget, instance.probability};

  const int n_vertices = static_cast<int>(mdp.size());
  const Rational decay = rational_pow(min_probability(mdp), 2 * n_vertices);
  const ValueMap reach_init = initial_reach(mdp);

  ApproxDecision result;
  long total_steps = 0;

  for (int h = 0; h < options.max_rounds; ++h) {
    const mpz_class precision_inverse = mpz_class(1) << static_cast<unsigned>(h);
    const Rational eps_bar(mpz_class(1), precision_inverse);

    // Iteration budget for this round's precision; the h = 0 budget is
    // formally zero (ln 1 = 0) and is clamped to one step so the round
    // still performs work.
    const Rational log_term = bounds::ln_upper(Rational(precision_inverse));
    const mpz_class raw_budget = (Rational(4L * n_vertices) * log_term / decay).ceil_int();
    if (!raw_budget.fits_slong_p()) {
      result.decision.outcome = Outcome::Unknown;
      result.decision.witness = WitnessKind::ResourceLimit;
      result.decision.iterations_used = total_steps;
      result.decision.note = "round iteration budget exceeds long range";
      return result;
    }
    const long n = std::max(1L, raw_budget.get_si());

    // Grid resolution 1 / ceil(n / eps_bar) = 1 / (n * 2^h).
    const Grid grid(Rational(mpz_class(1), mpz_class(n) * precision_inverse));

    ApproxRound round;
    round.h = h;
    round.n = n;
    round.alpha = grid.alpha;

    ValueMap abs_safe;
    try {
      abs_safe = abstract_safety_iterate(mdp, grid, n, options.corner_cap);
    } catch (const ResourceLimitError& err) {
      round.outcome = Outcome::Unknown;
      result.rounds.push_back(round);
      result.decision.outcome = Outcome::Unknown;
      result.decision.witness = WitnessKind::ResourceLimit;
      result.decision.iterations_used = total_steps + err.reached_iteration();
      result.decision.note = err.what();
      return result;
    }
    total_steps += n;

    // The abstract safety set over-approximates sval^n, so the closure of
    // its complement under-approximates the reachable region.
    const StaircaseSet abs_reach = complement_to_reach(abs_safe.sets[v], reach_init.sets[v]);

    // Test (3): membership in an under-approximation of rval^n.
    if (abs_reach.contains(query)) {
      round.outcome = Outcome::ReachWins;
      result.rounds.push_back(round);
      result.decision.outcome = Outcome::ReachWins;
      result.decision.witness = WitnessKind::Containment;
      result.decision.iterations_used = total_steps;
      result.decision.witness_iteration = h;
      return result;
    }

    // Test (4): the derived set sits within 2 * eps_bar of the true limit,
    // so a larger separation certifies a safety win.
    const std::optional<Rational> dist = abs_reach.distance(query);
    const Rational threshold = Rational(2) * eps_bar;
    if (!dist || *dist >= threshold) {
      round.outcome = Outcome::SafetyWins;
      result.rounds.push_back(round);
      result.decision.outcome = Outcome::SafetyWins;
      result.decision.witness = WitnessKind::DistanceCutoff;
      result.decision.iterations_used = total_steps;
      result.decision.witness_iteration = h;
      result.decision.witness_distance = dist;
      result.decision.witness_cutoff = threshold;
      return result;
    }

    round.outcome = Outcome::Unknown;
    result.rounds.push_back(round);
  }

  result.decision.outcome = Outcome::Unknown;
  result.decision.witness = WitnessKind::None;
  result.decision.iterations_used = total_steps;
  result.decision.note = "refinement rounds exhausted without certifying either player";
  return result;
}

} // namespace bidmdp
