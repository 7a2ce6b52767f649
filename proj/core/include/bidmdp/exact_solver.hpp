#pragma once

#include <optional>
#include <string>

#include "bidmdp/bellman.hpp"
#include "bidmdp/mdp.hpp"
#include "bidmdp/rational.hpp"
#include "bidmdp/staircase.hpp"

namespace bidmdp {

/// Semi-decision procedure on exact value sets.
///
/// Iterates the reachability sets rval^0, rval^1, ... and, at every
/// iteration i, applies two sound tests against the query point (B, p):
///
///   (1) containment:  (B, p) in rval^i(v)         -> ReachWins
///   (2) separation:   dist((B, p), rval^i(v)) > cutoff(i) -> SafetyWins
///
/// where cutoff(i) is a certified rational upper bound on the
/// convergence-rate envelope 2 * exp(-i * d^(2|V|) / (4|V|)) with d the
/// minimum positive transition probability.  Both tests are checked in
/// that order at each iteration.  Queries exactly on the threshold
/// boundary are never decided (the loop runs to its iteration budget and
/// reports Unknown).
///
/// A third, opportunistic test costs little and is also sound: if the
/// iteration reaches a fixpoint (step leaves the map unchanged), the
/// limit set has been computed exactly, so non-containment at that point
/// is a definitive safety win.
///
/// By default the two tests run against a pair of grid-snapped envelopes
/// bracketing the exact iterates (see ExactOptions::precision_bits):
/// containment is checked on the inner envelope, separation on the outer
/// one, so every returned decision remains sound.  When both envelopes
/// reach fixpoints of the snapped update, the maps can never change
/// again; the procedure then jumps directly to the first iteration index
/// whose cutoff falls below the (now constant) certified distance, which
/// is the index at which the plain loop would have fired.

enum class Outcome {
  ReachWins,
  SafetyWins,
  Unknown,
};

std::string to_string(Outcome outcome);

/// How a decision was certified (or why it was not reached).
enum class WitnessKind {
  None,           ///< no decision (iteration budget exhausted)
  Containment,    ///< query point inside rval^i
  DistanceCutoff, ///< distance from rval^i exceeds the shrinking cutoff
  Stabilized,     ///< value iteration reached a fixpoint; membership is exact
  ResourceLimit,  ///< corner budget exceeded before any test fired
};

std::string to_string(WitnessKind kind);

/// Result record for alg_exact (and reused by the approximate solver).
struct Decision {
  Outcome outcome = Outcome::Unknown;
  WitnessKind witness = WitnessKind::None;
  /// Number of value-iteration steps performed.
  long iterations_used = 0;
  /// Iteration index at which the winning test fired (-1 if none).
  long witness_iteration = -1;
  /// For Containment: the staircase corner whose quadrant covers the query.
  std::optional<Point> witness_corner;
  /// For DistanceCutoff: the certified distance and the cutoff it beat.
  std::optional<Rational> witness_distance;
  std::optional<Rational> witness_cutoff;
  /// Free-form diagnostics (resource limits, hints).
  std::string note;
};

/// Iteration budget sufficient to decide every query at L-infinity
/// distance >= epsilon from the threshold:
///
///   n = ceil(4 |V| * ln(2 / epsilon) * delta_min^(-2 |V|))
///
/// computed with a certified upper bound on ln, so the returned budget
/// is never too small.  Throws std::invalid_argument unless
/// 0 < epsilon <= 1, and std::overflow_error if the bound does not fit
/// in a long.
long convergence_bound(const Rational& epsilon, const Mdp& mdp);

/// Certified rational upper bound on 2 * exp(-i * delta_min^(2|V|) / (4|V|)).
/// Monotone non-increasing in i; distance_cutoff(0, mdp) == 2 exactly.
/// Throws std::invalid_argument if i < 0.
Rational distance_cutoff(long i, const Mdp& mdp);

struct ExactOptions {
  /// Hard iteration budget; Unknown once exhausted.
  long max_iterations = 1'000'000;
  /// If set, overrides max_iterations with convergence_bound(hint, mdp):
  /// enough iterations to decide any query at least that far from the
  /// threshold.
  std::optional<Rational> distance_hint;
  /// Maximum corners in the current per-vertex map (the procedure keeps
  /// only the latest map, not the whole trace).  Exceeding it yields
  /// Unknown with a ResourceLimit witness.
  std::size_t corner_cap = kDefaultCornerCap;
  /// Working precision of the iterated maps.  When positive, the exact
  /// iterates are bracketed between two maps snapped to the dyadic grid
  /// of resolution 2^-precision_bits: an inner under-approximation
  /// (sound for the containment test) and an outer over-approximation
  /// (sound for the separation test and for fixpoint detection).  This
  /// keeps every coordinate at a bounded bit size across thousands of
  /// iterations; the only cost is that queries within about
  /// iterations * 2^-precision_bits of the threshold may come back
  /// Unknown instead of being decided.  Set to 0 to iterate the exact
  /// sets, whose coordinates can grow without bound on cyclic arenas.
  int precision_bits = 64;
};

/// Decide whether the reachability player wins the query carried by
/// `instance`.  Sound for every answer it returns; complete for queries
/// off the threshold boundary given a sufficient iteration budget.
Decision alg_exact(const ProblemInstance& instance, const ExactOptions& options = {});

} // namespace bidmdp
