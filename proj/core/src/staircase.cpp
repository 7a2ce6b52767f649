#include "bidmdp/staircase.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

namespace bidmdp {

namespace {

const Rational kZero(0);
const Rational kOne(1);

void check_in_unit_square(const Point& pt) {
  if (pt.B < kZero || pt.B > kOne || pt.p < kZero || pt.p > kOne) {
    throw std::invalid_argument("staircase corner outside the unit square");
  }
}

Rational positive_part(const Rational& a) { return a.sign() > 0 ? a : kZero; }

}  // namespace

StaircaseSet StaircaseSet::from_sorted(std::vector<Point> corners,
                                       Direction dir) {
  StaircaseSet out(dir);
  out.corners_.reserve(corners.size());
  auto& stack = out.corners_;
  for (Point& next : corners) {
    check_in_unit_square(next);
    if (!stack.empty() && next.B < stack.back().B) {
      throw std::invalid_argument("from_sorted requires non-decreasing budgets");
    }
    if (dir == Direction::DownwardClosed) {
      // Keep maximal points: drop anything with equal budget and lower p,
      // then drop the newcomer if an earlier corner already dominates it.
      while (!stack.empty() && stack.back().B == next.B &&
             next.p >= stack.back().p) {
        stack.pop_back();
      }
      if (!stack.empty() && stack.back().p >= next.p) continue;
    } else {
      // Keep minimal points: a later corner with lower-or-equal p makes
      // earlier ones redundant; an earlier corner with equal budget and
      // lower-or-equal p makes the newcomer redundant.
      while (!stack.empty() && next.p <= stack.back().p) {
        stack.pop_back();
      }
      if (!stack.empty() && stack.back().B == next.B) continue;
    }
    stack.push_back(std::move(next));
  }
  return out;
}

StaircaseSet StaircaseSet::from_corners(std::vector<Point> corners,
                                        Direction dir) {
  for (const Point& pt : corners) check_in_unit_square(pt);
  std::sort(corners.begin(), corners.end(), [](const Point& a, const Point& b) {
    const int c = a.B.cmp(b.B);
    if (c != 0) return c < 0;
    return a.p < b.p;
  });
  return from_sorted(std::move(corners), dir);
}

StaircaseSet StaircaseSet::full(Direction dir) {
  StaircaseSet out(dir);
  if (dir == Direction::DownwardClosed) {
    out.corners_.push_back({kZero, kOne});
  } else {
    out.corners_.push_back({kOne, kZero});
  }
  return out;
}

namespace {

/// Index of the last corner with corner.B <= B, or -1.
long last_budget_le(const std::vector<Point>& corners, const Rational& B) {
  long lo = 0, hi = static_cast<long>(corners.size()) - 1, ans = -1;
  while (lo <= hi) {
    const long mid = (lo + hi) / 2;
    if (corners[static_cast<size_t>(mid)].B <= B) {
      ans = mid;
      lo = mid + 1;
    } else {
      hi = mid - 1;
    }
  }
  return ans;
}

/// Index of the first corner with corner.B >= B, or corners.size().
long first_budget_ge(const std::vector<Point>& corners, const Rational& B) {
  long lo = 0, hi = static_cast<long>(corners.size()) - 1;
  long ans = static_cast<long>(corners.size());
  while (lo <= hi) {
    const long mid = (lo + hi) / 2;
    if (corners[static_cast<size_t>(mid)].B >= B) {
      ans = mid;
      hi = mid - 1;
    } else {
      lo = mid + 1;
    }
  }
  return ans;
}

/// Index of the first corner with corner.p >= p, or corners.size().
long first_prob_ge(const std::vector<Point>& corners, const Rational& p) {
  long lo = 0, hi = static_cast<long>(corners.size()) - 1;
  long ans = static_cast<long>(corners.size());
  while (lo <= hi) {
    const long mid = (lo + hi) / 2;
    if (corners[static_cast<size_t>(mid)].p >= p) {
      ans = mid;
      hi = mid - 1;
    } else {
      lo = mid + 1;
    }
  }
  return ans;
}

/// Index of the last corner with corner.p <= p, or -1.
long last_prob_le(const std::vector<Point>& corners, const Rational& p) {
  long lo = 0, hi = static_cast<long>(corners.size()) - 1, ans = -1;
  while (lo <= hi) {
    const long mid = (lo + hi) / 2;
    if (corners[static_cast<size_t>(mid)].p <= p) {
      ans = mid;
      lo = mid + 1;
    } else {
      hi = mid - 1;
    }
  }
  return ans;
}

}  // namespace

bool StaircaseSet::contains(const Point& q) const {
  if (corners_.empty()) return false;
  if (dir_ == Direction::DownwardClosed) {
    const long idx = last_budget_le(corners_, q.B);
    return idx >= 0 && corners_[static_cast<size_t>(idx)].p >= q.p;
  }
  const long idx = first_budget_ge(corners_, q.B);
  return idx < static_cast<long>(corners_.size()) &&
         corners_[static_cast<size_t>(idx)].p <= q.p;
}

std::optional<Rational> StaircaseSet::max_p_at(const Rational& B) const {
  if (dir_ != Direction::DownwardClosed) {
    throw std::logic_error("max_p_at requires a downward-closed set");
  }
  const long idx = last_budget_le(corners_, B);
  if (idx < 0) return std::nullopt;
  return corners_[static_cast<size_t>(idx)].p;
}

std::optional<Rational> StaircaseSet::min_B_at(const Rational& p) const {
  if (dir_ != Direction::DownwardClosed) {
    throw std::logic_error("min_B_at requires a downward-closed set");
  }
  const long idx = first_prob_ge(corners_, p);
  if (idx >= static_cast<long>(corners_.size())) return std::nullopt;
  return corners_[static_cast<size_t>(idx)].B;
}

std::optional<Rational> StaircaseSet::min_p_at(const Rational& B) const {
  if (dir_ != Direction::UpwardClosed) {
    throw std::logic_error("min_p_at requires an upward-closed set");
  }
  const long idx = first_budget_ge(corners_, B);
  if (idx >= static_cast<long>(corners_.size())) return std::nullopt;
  return corners_[static_cast<size_t>(idx)].p;
}

std::optional<Rational> StaircaseSet::max_B_at(const Rational& p) const {
  if (dir_ != Direction::UpwardClosed) {
    throw std::logic_error("max_B_at requires an upward-closed set");
  }
  const long idx = last_prob_le(corners_, p);
  if (idx < 0) return std::nullopt;
  return corners_[static_cast<size_t>(idx)].B;
}

std::optional<Rational> StaircaseSet::distance(const Point& q) const {
  if (corners_.empty()) return std::nullopt;
  if (contains(q)) return kZero;

  // The set is a union of axis-aligned quadrants, one per corner g; the
  // L_infinity distance to a single quadrant is the larger of the two
  // coordinate overshoots. Along the corner list one overshoot grows while
  // the other shrinks, so their maximum is unimodal: locate the crossover
  // by binary search and take the best of the two neighbouring corners.
  const auto toward = [&](const Point& g) {
    // Overshoot that grows with the corner index.
    return dir_ == Direction::DownwardClosed ? positive_part(g.B - q.B)
                                             : positive_part(g.p - q.p);
  };
  const auto away = [&](const Point& g) {
    // Overshoot that shrinks with the corner index.
    return dir_ == Direction::DownwardClosed ? positive_part(q.p - g.p)
                                             : positive_part(q.B - g.B);
  };

  // First index where the growing overshoot has caught up.
  long lo = 0, hi = static_cast<long>(corners_.size()) - 1;
  long crossover = static_cast<long>(corners_.size());
  while (lo <= hi) {
    const long mid = (lo + hi) / 2;
    const Point& g = corners_[static_cast<size_t>(mid)];
    if (toward(g) >= away(g)) {
      crossover = mid;
      hi = mid - 1;
    } else {
      lo = mid + 1;
    }
  }

  const auto quadrant_distance = [&](long idx) {
    const Point& g = corners_[static_cast<size_t>(idx)];
    return max(toward(g), away(g));
  };
  std::optional<Rational> best;
  for (const long idx : {crossover - 1, crossover}) {
    if (idx < 0 || idx >= static_cast<long>(corners_.size())) continue;
    const Rational d = quadrant_distance(idx);
    if (!best || d < *best) best = d;
  }
  return best;
}

bool StaircaseSet::subset_of(const StaircaseSet& other) const {
  if (dir_ != other.dir_) {
    throw std::invalid_argument("subset_of requires matching directions");
  }
  for (const Point& g : corners_) {
    if (!other.contains(g)) return false;
  }
  return true;
}

Rational hausdorff(const StaircaseSet& a, const StaircaseSet& b) {
  if (a.direction() != b.direction()) {
    throw std::invalid_argument("hausdorff requires matching directions");
  }
  if (a.is_empty() || b.is_empty()) {
    throw std::invalid_argument("hausdorff requires non-empty sets");
  }
  // sup_{x in A} d(x, B) is attained at a corner of A: moving a point toward
  // A's extremal frontier never decreases its distance to the other set.
  const auto directed = [](const StaircaseSet& from, const StaircaseSet& to) {
    Rational worst(0);
    for (const Point& g : from.corners()) {
      const Rational d = *to.distance(g);
      if (d > worst) worst = d;
    }
    return worst;
  };
  return max(directed(a, b), directed(b, a));
}

StaircaseSet set_union(const StaircaseSet& a, const StaircaseSet& b) {
  if (a.direction() != b.direction()) {
    throw std::invalid_argument("set_union requires matching directions");
  }
  std::vector<Point> merged;
  merged.reserve(a.corner_count() + b.corner_count());
  std::merge(a.corners().begin(), a.corners().end(), b.corners().begin(),
             b.corners().end(), std::back_inserter(merged),
             [](const Point& x, const Point& y) { return x.B < y.B; });
  return StaircaseSet::from_sorted(std::move(merged), a.direction());
}

StaircaseSet complement_closure(const StaircaseSet& upward) {
  if (upward.direction() != Direction::UpwardClosed) {
    throw std::invalid_argument(
        "complement_closure requires an upward-closed set");
  }
  if (upward.is_empty()) return StaircaseSet::full(Direction::DownwardClosed);

  // For corners (b_0,p_0) < ... < (b_{m-1},p_{m-1}) the complement of the
  // union of quadrants {B <= b_k, p >= p_k} consists of vertical slabs: for
  // budgets in (b_{k-1}, b_k] exactly the probabilities below p_k survive,
  // and everything to the right of b_{m-1} survives. Taking the closure
  // turns each slab into a corner.
  const auto& cs = upward.corners();
  std::vector<Point> out;
  out.reserve(cs.size() + 1);
  for (size_t k = 0; k < cs.size(); ++k) {
    if (cs[k].p.sign() <= 0) continue;  // empty slab
    out.push_back({k == 0 ? kZero : cs[k - 1].B, cs[k].p});
  }
  if (cs.back().B < kOne) out.push_back({cs.back().B, kOne});
  return StaircaseSet::from_sorted(std::move(out), Direction::DownwardClosed);
}

StaircaseSet complement_to_reach(const StaircaseSet& abs_sval,
                                 const StaircaseSet& rval0) {
  if (rval0.direction() != Direction::DownwardClosed) {
    throw std::invalid_argument(
        "complement_to_reach requires a downward-closed base set");
  }
  return set_union(complement_closure(abs_sval), rval0);
}

bool union_cover_check(const StaircaseSet& r, const StaircaseSet& s,
                       const Rational& resolution) {
  if (r.direction() != Direction::DownwardClosed ||
      s.direction() != Direction::UpwardClosed) {
    throw std::invalid_argument(
        "union_cover_check expects a downward- and an upward-closed set");
  }
  if (resolution.sign() <= 0 || resolution > kOne) {
    throw std::invalid_argument("union_cover_check resolution must be in (0,1]");
  }

  const bool exact = complement_closure(s).subset_of(r);

  // Redundant safeguard: scan the grid of the requested resolution.
  std::vector<Rational> ticks;
  for (Rational t(0); t < kOne; t += resolution) ticks.push_back(t);
  ticks.push_back(kOne);
  bool grid = true;
  for (const Rational& B : ticks) {
    for (const Rational& p : ticks) {
      const Point q{B, p};
      if (!r.contains(q) && !s.contains(q)) {
        grid = false;
        break;
      }
    }
    if (!grid) break;
  }
  // Full coverage implies grid coverage; the converse may fail on gaps
  // thinner than the grid, which the exact test catches.
  return exact && grid;
}

}  // namespace bidmdp
