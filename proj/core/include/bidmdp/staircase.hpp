#pragma once

// Staircase value sets: closed subsets of the unit square [0,1]^2 that are
// downward- or upward-closed under the order (B,p) < (B',p') iff B >= B' and
// p <= p'. Every such set is the closure of finitely many corner points and
// is represented canonically by its minimal antichain of corners, sorted by
// strictly increasing budget B and strictly increasing probability p:
// maximal points for downward-closed sets, minimal points for upward-closed
// sets. All queries are exact rational computations; point-to-set distance
// uses the fact that the set is a union of per-corner quadrants.

#include <cstddef>
#include <optional>
#include <vector>

#include "bidmdp/rational.hpp"

namespace bidmdp {

struct Point {
  Rational B;  // budget coordinate
  Rational p;  // probability coordinate

  bool operator==(const Point& o) const { return B == o.B && p == o.p; }
  bool operator!=(const Point& o) const { return !(*this == o); }
};

enum class Direction { DownwardClosed, UpwardClosed };

class StaircaseSet {
 public:
  /// Canonicalizes an arbitrary corner collection: dominated points and
  /// duplicates are removed, the rest sorted. Points outside [0,1]^2 are
  /// rejected with std::invalid_argument. An empty input yields the
  /// explicit empty set.
  static StaircaseSet from_corners(std::vector<Point> corners, Direction dir);

  /// Canonicalizes a stream whose budgets are already non-decreasing (the
  /// form produced by the one-step operators); linear time.
  static StaircaseSet from_sorted(std::vector<Point> corners, Direction dir);

  static StaircaseSet empty(Direction dir) { return StaircaseSet(dir); }

  /// The full square: corner (0,1) downward, (1,0) upward.
  static StaircaseSet full(Direction dir);

  Direction direction() const { return dir_; }
  const std::vector<Point>& corners() const { return corners_; }
  std::size_t corner_count() const { return corners_.size(); }
  bool is_empty() const { return corners_.empty(); }

  bool operator==(const StaircaseSet& o) const {
    return dir_ == o.dir_ && corners_ == o.corners_;
  }
  bool operator!=(const StaircaseSet& o) const { return !(*this == o); }

  /// Exact membership in the closed set.
  bool contains(const Point& q) const;

  /// Exact L_infinity distance from q to the set; std::nullopt when the set
  /// is empty (infinite distance). Zero iff contains(q).
  std::optional<Rational> distance(const Point& q) const;

  /// True iff this set is a subset of other (same direction required).
  bool subset_of(const StaircaseSet& other) const;

  // Section queries along one axis; std::nullopt when the section is empty.
  /// Downward-closed: greatest p with (B,p) in the set.
  std::optional<Rational> max_p_at(const Rational& B) const;
  /// Downward-closed: least B with (B,p) in the set.
  std::optional<Rational> min_B_at(const Rational& p) const;
  /// Upward-closed: least p with (B,p) in the set.
  std::optional<Rational> min_p_at(const Rational& B) const;
  /// Upward-closed: greatest B with (B,p) in the set.
  std::optional<Rational> max_B_at(const Rational& p) const;

 private:
  explicit StaircaseSet(Direction dir) : dir_(dir) {}

  Direction dir_;
  std::vector<Point> corners_;  // canonical: strictly increasing in B and p
};

/// Exact symmetric Hausdorff distance under L_infinity. Both sets must share
/// a direction and be non-empty (std::invalid_argument otherwise). The
/// supremum is attained at a corner of one of the sets.
Rational hausdorff(const StaircaseSet& a, const StaircaseSet& b);

/// Union of two same-direction sets, canonicalized.
StaircaseSet set_union(const StaircaseSet& a, const StaircaseSet& b);

/// Topological closure of the complement of an upward-closed set within the
/// unit square; the result is downward-closed.
StaircaseSet complement_closure(const StaircaseSet& upward);

/// The downward-closed set (closure of [0,1]^2 minus abs_sval) united with
/// rval0; the derived reachability approximant of the abstraction round.
StaircaseSet complement_to_reach(const StaircaseSet& abs_sval,
                                 const StaircaseSet& rval0);

/// True iff r (downward-closed) and s (upward-closed) jointly cover the unit
/// square. The authoritative test is exact (closure of the complement of s
/// must be inside r); a grid scan at the given resolution (1/resolution
/// steps) double-checks it.
bool union_cover_check(const StaircaseSet& r, const StaircaseSet& s,
                       const Rational& resolution);

}  // namespace bidmdp
