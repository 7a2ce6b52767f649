#include "bidmdp/exact_solver.hpp"

#include <optional>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "bidmdp/approx_solver.hpp"
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

/// delta_min^(2|V|) / (4|V|): the per-iteration decay rate of the cutoff.
Rational decay_rate(const Mdp& mdp) {
  const int n = static_cast<int>(mdp.size());
  return rational_pow(min_probability(mdp), 2 * n) / Rational(4L * n);
}

/// Corner whose quadrant covers `q`, assuming set.contains(q).
Point covering_corner(const StaircaseSet& set, const Point& q) {
  const auto& cs = set.corners();
  if (set.direction() == Direction::DownwardClosed) {
    // Last corner with B <= q.B; among those it has the largest p.
    std::size_t lo = 0;
    std::size_t hi = cs.size();
    while (lo + 1 < hi) {
      const std::size_t mid = lo + (hi - lo) / 2;
      if (cs[mid].B <= q.B) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return cs[lo];
  }
  // Upward closed: first corner with B >= q.B has the smallest p.
  std::size_t lo = 0;
  std::size_t hi = cs.size() - 1;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (cs[mid].B >= q.B) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return cs[lo];
}

std::size_t total_corners(const ValueMap& map) {
  std::size_t total = 0;
  for (const auto& set : map.sets) {
    total += set.corners().size();
  }
  return total;
}

ValueMap snap_map(ValueMap map, const Grid& grid, bool outward) {
  for (auto& set : map.sets) {
    set = outward ? grid_overapprox(set, grid) : grid_underapprox(set, grid);
  }
  return map;
}

} // namespace

std::string to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::ReachWins: return "ReachWins";
    case Outcome::SafetyWins: return "SafetyWins";
    case Outcome::Unknown: return "Unknown";
  }
  return "Unknown";
}

std::string to_string(WitnessKind kind) {
  switch (kind) {
    case WitnessKind::None: return "none";
    case WitnessKind::Containment: return "containment";
    case WitnessKind::DistanceCutoff: return "distance-cutoff";
    case WitnessKind::Stabilized: return "stabilized";
    case WitnessKind::ResourceLimit: return "resource-limit";
  }
  return "none";
}

long convergence_bound(const Rational& epsilon, const Mdp& mdp) {
  if (!(epsilon > Rational(0)) || epsilon > Rational(1)) {
    throw std::invalid_argument("convergence_bound: epsilon must lie in (0, 1]");
  }
  const int n = static_cast<int>(mdp.size());
  const Rational log_term = bounds::ln_upper(Rational(2) / epsilon);
  const Rational bound =
      Rational(4L * n) * log_term / rational_pow(min_probability(mdp), 2 * n);
  const mpz_class iterations = bound.ceil_int();
  if (!iterations.fits_slong_p()) {
    throw std::overflow_error("convergence_bound: iteration bound exceeds long range");
  }
  return iterations.get_si();
}

Rational distance_cutoff(long i, const Mdp& mdp) {
  if (i < 0) {
    throw std::invalid_argument("distance_cutoff: iteration index must be nonnegative");
  }
  return Rational(2) * bounds::exp_neg_upper(Rational(i) * decay_rate(mdp));
}

Decision alg_exact(const ProblemInstance& instance, const ExactOptions& options) {
  validate_instance(instance);
  if (options.precision_bits < 0 || options.precision_bits > 16384) {
    throw std::invalid_argument("alg_exact: precision_bits must lie in [0, 16384]");
  }
  const Mdp& mdp = instance.mdp;
  const std::size_t vi = static_cast<std::size_t>(instance.vertex);
  const Point query{instance.budget, instance.probability};

  const long iteration_budget = options.distance_hint
                                    ? convergence_bound(*options.distance_hint, mdp)
                                    : options.max_iterations;

  const Rational rate = decay_rate(mdp);
  const auto cutoff_at = [&rate](long j) {
    return Rational(2) * bounds::exp_neg_upper(Rational(j) * rate);
  };

  std::optional<Grid> grid;
  if (options.precision_bits > 0) {
    grid.emplace(Rational(mpz_class(1),
                          mpz_class(mpz_class(1) << options.precision_bits)));
  }

  // `outer` contains the exact i-th reach map; `inner` (present only when
  // snapping) is contained in it.  Both invariants are preserved by one
  // exact step followed by the matching directional snap, because the
  // step operator is monotone under set inclusion.
  ValueMap outer = initial_reach(mdp);
  std::optional<ValueMap> inner;
  if (grid) {
    inner = snap_map(outer, *grid, /*outward=*/false);
    outer = snap_map(std::move(outer), *grid, /*outward=*/true);
  }
  bool outer_fixed = false;
  bool inner_fixed = false;

  Decision decision;
  for (long i = 0;; ++i) {
    const StaircaseSet& contain_view = inner ? inner->sets[vi] : outer.sets[vi];
    const StaircaseSet& distance_view = outer.sets[vi];

    // Test (1): membership in the under-approximation certifies
    // membership in rval^i, hence a reachability win at horizon i.
    if (contain_view.contains(query)) {
      decision.outcome = Outcome::ReachWins;
      decision.witness = WitnessKind::Containment;
      decision.iterations_used = i;
      decision.witness_iteration = i;
      decision.witness_corner = covering_corner(contain_view, query);
      return decision;
    }

    // Test (2): the distance to the over-approximation never exceeds the
    // distance to rval^i, so beating the cutoff with it is still sound:
    // once the query is farther from rval^i than the maps can still
    // move, no later iterate can absorb it.
    const std::optional<Rational> dist = distance_view.distance(query);
    if (!dist || *dist > cutoff_at(i)) {
      decision.outcome = Outcome::SafetyWins;
      decision.witness = WitnessKind::DistanceCutoff;
      decision.iterations_used = i;
      decision.witness_iteration = i;
      decision.witness_distance = dist;
      decision.witness_cutoff = cutoff_at(i);
      return decision;
    }

    if (i >= iteration_budget) {
      decision.outcome = Outcome::Unknown;
      decision.witness = WitnessKind::None;
      decision.iterations_used = i;
      decision.note = "iteration budget exhausted without certifying either player";
      return decision;
    }

    // Both envelopes at fixpoints of the snapped update: the maps can
    // never change again, so only the shrinking cutoff can still fire.
    if (outer_fixed && inner_fixed) {
      if (*dist == Rational(0)) {
        // Query inside the outer fixpoint but outside the inner one: it
        // sits within the snapping band around the threshold, where this
        // precision cannot separate the players.
        decision.outcome = Outcome::Unknown;
        decision.witness = WitnessKind::None;
        decision.iterations_used = i;
        std::ostringstream msg;
        msg << "maps stabilized at 2^-" << options.precision_bits
            << " precision without separating the query; rerun with "
               "precision_bits=0 for exact sets";
        decision.note = msg.str();
        return decision;
      }
      // Jump to the first index whose cutoff drops below the (now
      // constant) distance — where the plain loop would have fired.
      // The cutoff is monotone non-increasing, so binary search applies.
      if (!(*dist > cutoff_at(iteration_budget))) {
        decision.outcome = Outcome::Unknown;
        decision.witness = WitnessKind::None;
        decision.iterations_used = iteration_budget;
        decision.note = "iteration budget exhausted without certifying either player";
        return decision;
      }
      long lo = i;                 // cutoff(lo) >= dist: test (2) just failed
      long hi = iteration_budget;  // cutoff(hi) <  dist
      while (lo + 1 < hi) {
        const long mid = lo + (hi - lo) / 2;
        if (*dist > cutoff_at(mid)) {
          hi = mid;
        } else {
          lo = mid;
        }
      }
      decision.outcome = Outcome::SafetyWins;
      decision.witness = WitnessKind::DistanceCutoff;
      decision.iterations_used = hi;
      decision.witness_iteration = hi;
      decision.witness_distance = dist;
      decision.witness_cutoff = cutoff_at(hi);
      std::ostringstream msg;
      msg << "maps stabilized at iteration " << i
          << "; cutoff crossed the certified separation at iteration " << hi;
      decision.note = msg.str();
      return decision;
    }

    if (!outer_fixed) {
      ValueMap next = step(outer, mdp);
      if (equal_sets(next, outer)) {
        // Exact fixpoint: `outer` contains every iterate and is closed,
        // so it contains the limit set; non-membership is definitive.
        // (Without snapping, membership would have fired test (1).)
        if (!grid || !outer.sets[vi].contains(query)) {
          decision.outcome = Outcome::SafetyWins;
          decision.witness = WitnessKind::Stabilized;
          decision.iterations_used = i + 1;
          decision.witness_iteration = i;
          decision.note = "value iteration stabilized; query lies outside the limit set";
          return decision;
        }
        outer_fixed = true;
      } else {
        if (grid) {
          next = snap_map(std::move(next), *grid, /*outward=*/true);
        }
        const std::size_t corners = total_corners(next);
        if (corners > options.corner_cap) {
          std::ostringstream msg;
          msg << "corner cap exceeded at iteration " << (i + 1) << ": " << corners
              << " corners > cap " << options.corner_cap;
          decision.outcome = Outcome::Unknown;
          decision.witness = WitnessKind::ResourceLimit;
          decision.iterations_used = i + 1;
          decision.note = msg.str();
          return decision;
        }
        if (grid && equal_sets(next, outer)) {
          // Fixpoint of the snapped update: still an over-approximation
          // of every subsequent iterate, so the distance test keeps its
          // meaning, but membership is no longer conclusive.
          outer_fixed = true;
        } else {
          outer = std::move(next);
          outer.iteration = static_cast<int>(i + 1);
        }
      }
    }

    if (inner && !inner_fixed) {
      ValueMap next = snap_map(step(*inner, mdp), *grid, /*outward=*/false);
      const std::size_t corners = total_corners(next);
      if (corners > options.corner_cap) {
        std::ostringstream msg;
        msg << "corner cap exceeded at iteration " << (i + 1) << ": " << corners
            << " corners > cap " << options.corner_cap;
        decision.outcome = Outcome::Unknown;
        decision.witness = WitnessKind::ResourceLimit;
        decision.iterations_used = i + 1;
        decision.note = msg.str();
        return decision;
      }
      if (equal_sets(next, *inner)) {
        inner_fixed = true;
      } else {
        *inner = std::move(next);
        inner->iteration = static_cast<int>(i + 1);
      }
    }
  }
}

} // namespace bidmdp
