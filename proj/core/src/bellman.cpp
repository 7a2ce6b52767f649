#include "bidmdp/bellman.hpp"

#include <utility>

namespace bidmdp {

namespace {

const Rational kZero(0);
const Rational kOne(1);

Direction direction_of(Objective objective) {
  return objective == Objective::Reach ? Direction::DownwardClosed
                                       : Direction::UpwardClosed;
}

Direction common_direction(const std::vector<const StaircaseSet*>& sets) {
  const Direction dir = sets.front()->direction();
  for (const StaircaseSet* s : sets) {
    if (s->direction() != dir) {
      throw std::invalid_argument("successor sets with mixed directions");
    }
  }
  return dir;
}

/// Downward-closed reading: on each budget interval between successor corner
/// budgets, every successor contributes its greatest achievable probability;
/// the results are mixed by the distribution weights.
StaircaseSet random_reach(const std::vector<WeightedSet>& succ) {
  const size_t k = succ.size();
  // Sections are non-empty only from the largest first-corner budget on.
  size_t lead = 0;
  for (size_t j = 1; j < k; ++j) {
    if (succ[j].set->corners().front().B > succ[lead].set->corners().front().B) {
      lead = j;
    }
  }
  const Rational& start = succ[lead].set->corners().front().B;

  std::vector<size_t> cur(k, 0);
  Rational level;
  for (size_t j = 0; j < k; ++j) {
    const auto& cs = succ[j].set->corners();
    size_t idx = 0;
    while (idx + 1 < cs.size() && cs[idx + 1].B <= start) ++idx;
    cur[j] = idx;
    level += succ[j].weight * cs[idx].p;
  }

  std::vector<Point> out;
  out.push_back({start, level});
  std::vector<size_t> advancing;
  for (;;) {
    // Next breakpoint: the least unprocessed successor corner budget.
    advancing.clear();
    const Rational* next = nullptr;
    for (size_t j = 0; j < k; ++j) {
      const auto& cs = succ[j].set->corners();
      if (cur[j] + 1 >= cs.size()) continue;
      const Rational& candidate = cs[cur[j] + 1].B;
      if (!next) {
        next = &candidate;
        advancing.assign(1, j);
      } else {
        const int c = candidate.cmp(*next);
        if (c < 0) {
          next = &candidate;
          advancing.assign(1, j);
        } else if (c == 0) {
          advancing.push_back(j);
        }
      }
    }
    if (!next) break;
    const Rational breakpoint = *next;  // copy before pointers move
    for (size_t j : advancing) {
      const auto& cs = succ[j].set->corners();
      level += succ[j].weight * (cs[cur[j] + 1].p - cs[cur[j]].p);
      ++cur[j];
    }
    out.push_back({breakpoint, level});
  }
  return StaircaseSet::from_sorted(std::move(out), Direction::DownwardClosed);
}

/// Upward-closed reading: on each left-open budget interval every successor
/// contributes its least required probability; sections exist only up to the
/// smallest last-corner budget.
StaircaseSet random_safe(const std::vector<WeightedSet>& succ) {
  const size_t k = succ.size();
  size_t bound = 0;
  for (size_t j = 1; j < k; ++j) {
    if (succ[j].set->corners().back().B < succ[bound].set->corners().back().B) {
      bound = j;
    }
  }
  const Rational& stop = succ[bound].set->corners().back().B;

  std::vector<size_t> cur(k, 0);
  Rational level;
  for (size_t j = 0; j < k; ++j) {
    level += succ[j].weight * succ[j].set->corners().front().p;
  }

  std::vector<Point> out;
  std::vector<size_t> advancing;
  for (;;) {
    // Next unprocessed corner budget across successors, up to `stop`.
    const Rational* next = nullptr;
    advancing.clear();
    for (size_t j = 0; j < k; ++j) {
      const auto& cs = succ[j].set->corners();
      const size_t idx = cur[j];
      if (idx >= cs.size()) continue;
      const Rational& candidate = cs[idx].B;
      if (!next) {
        next = &candidate;
        advancing.assign(1, j);
      } else {
        const int c = candidate.cmp(*next);
        if (c < 0) {
          next = &candidate;
          advancing.assign(1, j);
        } else if (c == 0) {
          advancing.push_back(j);
        }
      }
    }
    if (!next || *next > stop) break;
    const Rational breakpoint = *next;
    out.push_back({breakpoint, level});
    // The set's requirement changes just above this breakpoint: successors
    // whose corner we passed now demand their next, higher probability.
    for (size_t j : advancing) {
      const auto& cs = succ[j].set->corners();
      if (cur[j] + 1 < cs.size()) {
        level += succ[j].weight * (cs[cur[j] + 1].p - cs[cur[j]].p);
      }
      ++cur[j];
    }
  }
  return StaircaseSet::from_sorted(std::move(out), Direction::UpwardClosed);
}

/// Reach control: per probability level the auction costs the midpoint of
/// the cheapest successor (move there on a win) and the most demanding one
/// (could be forced there on a loss).
StaircaseSet control_reach(const std::vector<const StaircaseSet*>& succ) {
  const size_t k = succ.size();
  // Levels above some successor's top are unreachable for the mix.
  size_t bound = 0;
  for (size_t j = 1; j < k; ++j) {
    if (succ[j]->corners().back().p < succ[bound]->corners().back().p) {
      bound = j;
    }
  }
  const Rational& stop = succ[bound]->corners().back().p;

  std::vector<size_t> cur(k, 0);
  std::vector<Point> out;
  for (;;) {
    const Rational* next = nullptr;
    for (size_t j = 0; j < k; ++j) {
      const auto& cs = succ[j]->corners();
      if (cur[j] >= cs.size()) continue;
      const Rational& candidate = cs[cur[j]].p;
      if (!next || candidate < *next) next = &candidate;
    }
    if (!next || *next > stop) break;
    const Rational level = *next;
    // Align every successor to its first corner at or above this level.
    const Rational* lo = nullptr;
    const Rational* hi = nullptr;
    for (size_t j = 0; j < k; ++j) {
      const auto& cs = succ[j]->corners();
      while (cur[j] < cs.size() && cs[cur[j]].p < level) ++cur[j];
      const Rational& B = cs[cur[j]].B;
      if (!lo || B < *lo) lo = &B;
      if (!hi || B > *hi) hi = &B;
    }
    out.push_back({Rational::average(*lo, *hi), level});
    // Advance past this level so the merge progresses.
    for (size_t j = 0; j < k; ++j) {
      const auto& cs = succ[j]->corners();
      if (cur[j] < cs.size() && cs[cur[j]].p == level) ++cur[j];
    }
  }
  return StaircaseSet::from_sorted(std::move(out), Direction::DownwardClosed);
}

/// Safe control: dual reading; per probability level the safety player can
/// defend the midpoint of the most defensible successor and the least one.
StaircaseSet control_safe(const std::vector<const StaircaseSet*>& succ) {
  const size_t k = succ.size();
  // Sections exist only from the largest first-corner level on.
  size_t lead = 0;
  for (size_t j = 1; j < k; ++j) {
    if (succ[j]->corners().front().p > succ[lead]->corners().front().p) {
      lead = j;
    }
  }
  const Rational& start = succ[lead]->corners().front().p;

  std::vector<size_t> cur(k, 0);
  std::vector<Point> out;
  bool first = true;
  for (;;) {
    Rational level;
    if (first) {
      level = start;
    } else {
      const Rational* next = nullptr;
      for (size_t j = 0; j < k; ++j) {
        const auto& cs = succ[j]->corners();
        if (cur[j] + 1 >= cs.size()) continue;
        const Rational& candidate = cs[cur[j] + 1].p;
        if (!next || candidate < *next) next = &candidate;
      }
      if (!next) break;
      level = *next;
    }
    // Align to the last corner at or below the level.
    const Rational* lo = nullptr;
    const Rational* hi = nullptr;
    for (size_t j = 0; j < k; ++j) {
      const auto& cs = succ[j]->corners();
      while (cur[j] + 1 < cs.size() && cs[cur[j] + 1].p <= level) ++cur[j];
      const Rational& B = cs[cur[j]].B;
      if (!lo || B > *lo) lo = &B;  // most defensible successor
      if (!hi || B < *hi) hi = &B;  // least defensible successor
    }
    out.push_back({Rational::average(*lo, *hi), level});
    first = false;
  }
  return StaircaseSet::from_sorted(std::move(out), Direction::UpwardClosed);
}

}  // namespace

bool equal_sets(const ValueMap& a, const ValueMap& b) {
  return a.objective == b.objective && a.sets == b.sets;
}

ValueMap initial_reach(const Mdp& mdp) {
  ValueMap out;
  out.objective = Objective::Reach;
  out.iteration = 0;
  out.sets.reserve(mdp.size());
  for (size_t v = 0; v < mdp.size(); ++v) {
    if (mdp.is_target(static_cast<VertexId>(v))) {
      out.sets.push_back(StaircaseSet::full(Direction::DownwardClosed));
    } else {
      out.sets.push_back(StaircaseSet::from_corners(
          {{kZero, kZero}, {kOne, kOne}}, Direction::DownwardClosed));
    }
  }
  return out;
}

ValueMap initial_safe(const Mdp& mdp) {
  ValueMap out;
  out.objective = Objective::Safe;
  out.iteration = 0;
  out.sets.reserve(mdp.size());
  for (size_t v = 0; v < mdp.size(); ++v) {
    if (mdp.is_target(static_cast<VertexId>(v))) {
      out.sets.push_back(StaircaseSet::from_corners(
          {{kZero, kZero}, {kOne, kOne}}, Direction::UpwardClosed));
    } else {
      out.sets.push_back(StaircaseSet::full(Direction::UpwardClosed));
    }
  }
  return out;
}

StaircaseSet apply_random(const std::vector<WeightedSet>& successors) {
  if (successors.empty()) {
    throw std::invalid_argument("apply_random requires successors");
  }
  std::vector<const StaircaseSet*> sets;
  sets.reserve(successors.size());
  Rational total;
  for (const WeightedSet& w : successors) {
    if (w.weight.sign() <= 0) {
      throw std::invalid_argument("apply_random weights must be positive");
    }
    total += w.weight;
    sets.push_back(w.set);
  }
  if (total != kOne) {
    throw std::invalid_argument("apply_random weights must sum to 1");
  }
  const Direction dir = common_direction(sets);
  for (const StaircaseSet* s : sets) {
    if (s->is_empty()) return StaircaseSet::empty(dir);
  }
  return dir == Direction::DownwardClosed ? random_reach(successors)
                                          : random_safe(successors);
}

StaircaseSet apply_control(
    const std::vector<const StaircaseSet*>& successors) {
  if (successors.empty()) {
    throw std::invalid_argument("apply_control requires successors");
  }
  const Direction dir = common_direction(successors);
  for (const StaircaseSet* s : successors) {
    if (s->is_empty()) return StaircaseSet::empty(dir);
  }
  return dir == Direction::DownwardClosed ? control_reach(successors)
                                          : control_safe(successors);
}

ValueMap step(const ValueMap& previous, const Mdp& mdp) {
  if (previous.sets.size() != mdp.size()) {
    throw std::invalid_argument("value map does not match the arena");
  }
  ValueMap out;
  out.objective = previous.objective;
  out.iteration = previous.iteration + 1;
  out.sets.reserve(mdp.size());
  for (size_t v = 0; v < mdp.size(); ++v) {
    const VertexId id = static_cast<VertexId>(v);
    const auto& vertex = mdp.vertices[v];
    if (mdp.is_target(id) || mdp.is_sink(id)) {
      out.sets.push_back(previous.sets[v]);  // operator is the identity
      continue;
    }
    StaircaseSet next = StaircaseSet::empty(direction_of(previous.objective));
    if (vertex.kind == VertexKind::Random) {
      std::vector<WeightedSet> weighted;
      weighted.reserve(vertex.succ.size());
      for (size_t s = 0; s < vertex.succ.size(); ++s) {
        weighted.push_back({vertex.prob[s], &previous.sets[vertex.succ[s]]});
      }
      next = apply_random(weighted);
    } else {
      std::vector<const StaircaseSet*> sets;
      sets.reserve(vertex.succ.size());
      for (VertexId s : vertex.succ) sets.push_back(&previous.sets[s]);
      next = apply_control(sets);
    }
    if (next.is_empty()) {
      throw std::logic_error("value iteration produced an empty set");
    }
    out.sets.push_back(std::move(next));
  }
  return out;
}

std::vector<ValueMap> iterate(const Mdp& mdp, Objective objective, int n,
                              std::size_t corner_cap) {
  if (n < 0) throw std::invalid_argument("iterate requires n >= 0");
  std::vector<ValueMap> trace;
  trace.reserve(static_cast<size_t>(n) + 1);
  trace.push_back(objective == Objective::Reach ? initial_reach(mdp)
                                                : initial_safe(mdp));
  std::size_t stored_corners = 0;
  for (const StaircaseSet& s : trace.back().sets) stored_corners += s.corner_count();
  for (int i = 1; i <= n; ++i) {
    trace.push_back(step(trace.back(), mdp));
    for (const StaircaseSet& s : trace.back().sets) {
      stored_corners += s.corner_count();
    }
    if (stored_corners > corner_cap) {
      throw ResourceLimitError("corner cap exceeded", i);
    }
  }
  return trace;
}

}  // namespace bidmdp
