#include "bidmdp/policy.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>

#include "bidmdp/numeric_bounds.hpp"

namespace bidmdp {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Distance (in edges) from every vertex to the target set, following
/// edges forward; -1 when no target is reachable.
std::vector<long> distance_to_targets(const Mdp& mdp) {
  std::vector<long> dist(mdp.size(), -1);
  std::vector<std::vector<VertexId>> preds(mdp.size());
  for (std::size_t u = 0; u < mdp.size(); ++u) {
    for (const VertexId w : mdp.vertices[u].succ) {
      if (static_cast<std::size_t>(w) != u) {
        preds[static_cast<std::size_t>(w)].push_back(static_cast<VertexId>(u));
      }
    }
  }
  std::queue<VertexId> frontier;
  for (std::size_t u = 0; u < mdp.size(); ++u) {
    if (mdp.is_target(static_cast<VertexId>(u))) {
      dist[u] = 0;
      frontier.push(static_cast<VertexId>(u));
    }
  }
  while (!frontier.empty()) {
    const VertexId w = frontier.front();
    frontier.pop();
    for (const VertexId u : preds[static_cast<std::size_t>(w)]) {
      if (dist[static_cast<std::size_t>(u)] < 0) {
        dist[static_cast<std::size_t>(u)] = dist[static_cast<std::size_t>(w)] + 1;
        frontier.push(u);
      }
    }
  }
  return dist;
}

/// Successor minimizing (toward) or maximizing (away) the BFS distance;
/// unreachable counts as infinite; ties break to the lowest id.
VertexId heuristic_move(const Mdp& mdp, const std::vector<long>& dist, VertexId v, bool toward) {
  const auto& succ = mdp.vertices[static_cast<std::size_t>(v)].succ;
  const auto rank = [&](VertexId w) {
    const long d = dist[static_cast<std::size_t>(w)];
    return d < 0 ? std::numeric_limits<long>::max() : d;
  };
  VertexId best = succ.front();
  for (const VertexId w : succ) {
    const long rw = rank(w);
    const long rb = rank(best);
    if ((toward ? rw < rb : rw > rb) || (rw == rb && w < best)) {
      best = w;
    }
  }
  return best;
}

/// Successors paired with their distribution weight, ordered by vertex id
/// (the deterministic order used for surplus/deficit redistribution).
std::vector<std::pair<VertexId, Rational>> weighted_by_id(const Mdp::Vertex& vx) {
  std::vector<std::pair<VertexId, Rational>> out;
  out.reserve(vx.succ.size());
  for (std::size_t k = 0; k < vx.succ.size(); ++k) {
    out.emplace_back(vx.succ[k], vx.prob[k]);
  }
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

/// Policy tracking (budget, probability, horizon) down a reachability
/// trace, per the constructive soundness argument: bid half the spread
/// between the cheapest and the dearest successor at the tracked
/// probability level, step the horizon down after every move.
class TrackedReachPolicy final : public Policy {
 public:
  TrackedReachPolicy(const std::vector<ValueMap>& trace, const ProblemInstance& instance)
      : Policy(Objective::Reach),
        mdp_(instance.mdp),
        trace_(trace),
        dist_(distance_to_targets(instance.mdp)) {
    const VertexId v = instance.vertex;
    if (mdp_.is_target(v)) {
      trivial_ = true;
      return;
    }
    for (std::size_t i = 0; i < trace_.size(); ++i) {
      const auto least = trace_[i].sets[static_cast<std::size_t>(v)].min_B_at(instance.probability);
      if (least && *least < instance.budget) {
        start_B_ = *least;
        start_p_ = instance.probability;
        start_h_ = static_cast<long>(i);
        reset(0);
        return;
      }
    }
    throw std::invalid_argument(
        "extract_reach_policy: no trace map contains the query with strict budget slack");
  }

  void reset(std::uint64_t) override {
    B_ = start_B_;
    p_ = start_p_;
    h_ = start_h_;
    vacuous_ = trivial_;
  }

  BidAction decide(VertexId v, const Rational&, long) override {
    const auto bounds = control_bounds(v);
    if (!bounds) {
      return {Rational(0), heuristic_move(mdp_, dist_, v, /*toward=*/true)};
    }
    return {(bounds->hi - bounds->lo).halved(), bounds->best};
  }

  void observe_control(VertexId v, bool won, VertexId) override {
    const auto bounds = control_bounds(v);
    if (!bounds) {
      return;
    }
    B_ = won ? bounds->lo : bounds->hi;
    h_ -= 1;
  }

  void observe_random(VertexId v, VertexId moved_to) override {
    if (vacuous_ || h_ <= 0 || p_.is_zero()) {
      return;
    }
    const auto& prev = trace_[static_cast<std::size_t>(h_ - 1)].sets;
    const auto weighted = weighted_by_id(mdp_.vertices[static_cast<std::size_t>(v)]);

    // Start from each successor's ceiling at the tracked budget, then
    // shave the surplus off in id order so the weighted sum is exactly
    // the tracked probability.
    Rational surplus(0);
    std::vector<Rational> share(weighted.size());
    for (std::size_t k = 0; k < weighted.size(); ++k) {
      const auto cap = prev[static_cast<std::size_t>(weighted[k].first)].max_p_at(B_);
      if (!cap) {
        vacuous_ = true;
        return;
      }
      share[k] = *cap;
      surplus += weighted[k].second * *cap;
    }
    surplus -= p_;
    if (surplus < Rational(0)) {
      vacuous_ = true; // tracked point left the map; give up the guarantee
      return;
    }
    for (std::size_t k = 0; k < weighted.size() && !(surplus == Rational(0)); ++k) {
      const Rational reducible = min(share[k], surplus / weighted[k].second);
      share[k] -= reducible;
      surplus -= weighted[k].second * reducible;
    }
    for (std::size_t k = 0; k < weighted.size(); ++k) {
      if (weighted[k].first == moved_to) {
        p_ = share[k];
        break;
      }
    }
    h_ -= 1;
  }

  std::unique_ptr<Policy> clone() const override {
    return std::make_unique<TrackedReachPolicy>(*this);
  }

 private:
  struct Bounds {
    Rational lo;
    Rational hi;
    VertexId best = 0;
  };

  /// Cheapest/dearest successor budgets at the tracked probability, from
  /// the previous map; nullopt when the policy is in its vacuous mode.
  std::optional<Bounds> control_bounds(VertexId v) {
    if (vacuous_ || h_ <= 0 || p_.is_zero()) {
      return std::nullopt;
    }
    const auto& prev = trace_[static_cast<std::size_t>(h_ - 1)].sets;
    const auto& succ = mdp_.vertices[static_cast<std::size_t>(v)].succ;
    std::optional<Bounds> bounds;
    for (const VertexId w : succ) {
      const auto least = prev[static_cast<std::size_t>(w)].min_B_at(p_);
      if (!least) {
        vacuous_ = true;
        return std::nullopt;
      }
      if (!bounds) {
        bounds = Bounds{*least, *least, w};
      } else {
        if (*least < bounds->lo) {
          bounds->lo = *least;
          bounds->best = w;
        }
        if (bounds->hi < *least) {
          bounds->hi = *least;
        }
      }
    }
    return bounds;
  }

  Mdp mdp_;
  std::vector<ValueMap> trace_;
  std::vector<long> dist_;
  bool trivial_ = false;
  Rational start_B_;
  Rational start_p_;
  long start_h_ = 0;
  Rational B_;
  Rational p_;
  long h_ = 0;
  bool vacuous_ = false;
};

/// Dual construction for the safety player: bid half the spread between
/// the most and least defensible successors, escape to the former on a
/// win; at random vertices redistribute the tracked probability across
/// successor floors.  In stabilized mode the maps are a fixpoint and the
/// horizon never counts down (acyclic arenas only).
class TrackedSafetyPolicy final : public Policy {
 public:
  TrackedSafetyPolicy(std::vector<ValueMap> maps, bool stabilized,
                      const ProblemInstance& instance)
      : Policy(Objective::Safe),
        mdp_(instance.mdp),
        maps_(std::move(maps)),
        stabilized_(stabilized),
        dist_(distance_to_targets(instance.mdp)) {
    const auto& final_map = maps_.back().sets[static_cast<std::size_t>(instance.vertex)];
    const auto most = final_map.max_B_at(instance.probability);
    if (!most || !(instance.budget < *most)) {
      throw std::invalid_argument(
          "extract_safety_policy: final map lacks the query with strict budget slack");
    }
    start_B_ = *most;
    start_p_ = instance.probability;
    start_h_ = static_cast<long>(maps_.size()) - 1;
    reset(0);
  }

  void reset(std::uint64_t) override {
    B_ = start_B_;
    p_ = start_p_;
    h_ = start_h_;
    vacuous_ = false;
  }

  BidAction decide(VertexId v, const Rational&, long) override {
    const auto bounds = control_bounds(v);
    if (!bounds) {
      return {Rational(0), heuristic_move(mdp_, dist_, v, /*toward=*/false)};
    }
    return {(bounds->most - bounds->least).halved(), bounds->escape};
  }

  void observe_control(VertexId v, bool won, VertexId) override {
    const auto bounds = control_bounds(v);
    if (!bounds) {
      return;
    }
    B_ = won ? bounds->most : bounds->least;
    advance();
  }

  void observe_random(VertexId v, VertexId moved_to) override {
    if (out_of_horizon()) {
      return;
    }
    const auto& level = current_sets();
    const auto weighted = weighted_by_id(mdp_.vertices[static_cast<std::size_t>(v)]);

    // Start from each successor's floor at the tracked budget, then pour
    // the deficit back in id order so the weighted sum is exactly the
    // tracked probability.
    Rational deficit = p_;
    std::vector<Rational> share(weighted.size());
    for (std::size_t k = 0; k < weighted.size(); ++k) {
      const auto floor = level[static_cast<std::size_t>(weighted[k].first)].min_p_at(B_);
      if (!floor) {
        vacuous_ = true;
        return;
      }
      share[k] = *floor;
      deficit -= weighted[k].second * *floor;
    }
    if (deficit < Rational(0)) {
      vacuous_ = true;
      return;
    }
    for (std::size_t k = 0; k < weighted.size() && !(deficit == Rational(0)); ++k) {
      const Rational headroom = Rational(1) - share[k];
      const Rational add = min(headroom, deficit / weighted[k].second);
      share[k] += add;
      deficit -= weighted[k].second * add;
    }
    for (std::size_t k = 0; k < weighted.size(); ++k) {
      if (weighted[k].first == moved_to) {
        p_ = share[k];
        break;
      }
    }
    advance();
  }

  std::unique_ptr<Policy> clone() const override {
    return std::make_unique<TrackedSafetyPolicy>(*this);
  }

 private:
  struct Bounds {
    Rational most;  ///< max over successors of the defensible budget
    Rational least; ///< min over successors
    VertexId escape = 0;
  };

  bool out_of_horizon() {
    return vacuous_ || (!stabilized_ && h_ <= 0);
  }

  const std::vector<StaircaseSet>& current_sets() const {
    if (stabilized_) {
      return maps_.back().sets;
    }
    return maps_[static_cast<std::size_t>(h_ - 1)].sets;
  }

  void advance() {
    if (!stabilized_) {
      h_ -= 1;
    }
  }

  std::optional<Bounds> control_bounds(VertexId v) {
    if (out_of_horizon()) {
      return std::nullopt;
    }
    const auto& level = current_sets();
    const auto& succ = mdp_.vertices[static_cast<std::size_t>(v)].succ;
    std::optional<Bounds> bounds;
    for (const VertexId w : succ) {
      const auto most = level[static_cast<std::size_t>(w)].max_B_at(p_);
      if (!most) {
        vacuous_ = true;
        return std::nullopt;
      }
      if (!bounds) {
        bounds = Bounds{*most, *most, w};
      } else {
        if (bounds->most < *most) {
          bounds->most = *most;
          bounds->escape = w;
        }
        if (*most < bounds->least) {
          bounds->least = *most;
        }
      }
    }
    return bounds;
  }

  Mdp mdp_;
  std::vector<ValueMap> maps_;
  bool stabilized_ = false;
  std::vector<long> dist_;
  Rational start_B_;
  Rational start_p_;
  long start_h_ = 0;
  Rational B_;
  Rational p_;
  long h_ = 0;
  bool vacuous_ = false;
};

/// Scripted opponents: a fixed bid rule plus BFS-guided movement.
class HeuristicAdversary final : public Policy {
 public:
  HeuristicAdversary(AdversaryKind kind, Objective role, const Mdp& mdp, std::uint64_t seed)
      : Policy(role), kind_(kind), mdp_(mdp), dist_(distance_to_targets(mdp)), seed_(seed) {}

  void reset(std::uint64_t trial) override { trial_ = trial; }

  BidAction decide(VertexId v, const Rational& own_budget, long step) override {
    Rational bid(0);
    switch (kind_) {
      case AdversaryKind::AllIn:
        bid = own_budget;
        break;
      case AdversaryKind::Zero:
        break;
      case AdversaryKind::UniformRandomBid: {
        const std::uint64_t word =
            counter_word(seed_, trial_, static_cast<std::uint64_t>(step), 0);
        bid = own_budget * Rational(mpz_class(word), mpz_class(1) << 64);
        break;
      }
      case AdversaryKind::ValueGuided:
        break; // handled by the wrapped extraction, never here
    }
    return {bid, heuristic_move(mdp_, dist_, v, role() == Objective::Reach)};
  }

  void observe_control(VertexId, bool, VertexId) override {}
  void observe_random(VertexId, VertexId) override {}

  std::unique_ptr<Policy> clone() const override {
    return std::make_unique<HeuristicAdversary>(*this);
  }

 private:
  AdversaryKind kind_;
  Mdp mdp_;
  std::vector<long> dist_;
  std::uint64_t seed_ = 0;
  std::uint64_t trial_ = 0;
};

} // namespace

std::uint64_t counter_word(std::uint64_t seed, std::uint64_t trial, std::uint64_t step,
                           std::uint64_t draw) {
  std::uint64_t h = splitmix(seed ^ 0x243F6A8885A308D3ull);
  h = splitmix(h ^ trial);
  h = splitmix(h ^ step);
  h = splitmix(h ^ draw);
  return h;
}

std::size_t CounterRandomSource::sample(const Mdp& mdp, VertexId v, long step) {
  const auto& vx = mdp.vertices[static_cast<std::size_t>(v)];
  if (vx.kind != VertexKind::Random) {
    throw std::invalid_argument("CounterRandomSource: vertex is not random");
  }
  if (vx.succ.size() == 1) {
    return 0;
  }
  // Scale the distribution to a common integer denominator, then draw a
  // uniform integer below it by rejection over counter words.
  mpz_class denom(1);
  for (const Rational& p : vx.prob) {
    mpz_lcm(denom.get_mpz_t(), denom.get_mpz_t(), p.den().get_mpz_t());
  }
  std::vector<mpz_class> cumulative(vx.prob.size());
  mpz_class running(0);
  for (std::size_t k = 0; k < vx.prob.size(); ++k) {
    running += vx.prob[k].num() * (denom / vx.prob[k].den());
    cumulative[k] = running;
  }
  const std::size_t bits = mpz_sizeinbase(denom.get_mpz_t(), 2);
  const std::size_t words = (bits + 63) / 64;
  std::uint64_t draw = 0;
  for (;;) {
    mpz_class r(0);
    for (std::size_t w = 0; w < words; ++w) {
      mpz_mul_2exp(r.get_mpz_t(), r.get_mpz_t(), 64);
      r += mpz_class(counter_word(seed_, trial_, static_cast<std::uint64_t>(step), draw++));
    }
    mpz_fdiv_r_2exp(r.get_mpz_t(), r.get_mpz_t(), bits);
    if (r < denom) {
      for (std::size_t k = 0; k < cumulative.size(); ++k) {
        if (r < cumulative[k]) {
          return k;
        }
      }
      return cumulative.size() - 1; // unreachable: weights sum to denom
    }
  }
}

std::size_t ScriptedRandomSource::sample(const Mdp& mdp, VertexId v, long) {
  if (next_ >= script_.size()) {
    throw std::out_of_range("ScriptedRandomSource: script exhausted");
  }
  const std::size_t idx = script_[next_++];
  if (idx >= mdp.vertices[static_cast<std::size_t>(v)].succ.size()) {
    throw std::out_of_range("ScriptedRandomSource: successor index out of range");
  }
  return idx;
}

std::string to_string(PlayOutcome outcome) {
  switch (outcome) {
    case PlayOutcome::ReachedT: return "ReachedT";
    case PlayOutcome::Absorbed: return "Absorbed";
    case PlayOutcome::HorizonCap: return "HorizonCap";
  }
  return "HorizonCap";
}

std::string to_string(AdversaryKind kind) {
  switch (kind) {
    case AdversaryKind::AllIn: return "all-in";
    case AdversaryKind::Zero: return "zero";
    case AdversaryKind::UniformRandomBid: return "uniform-random-bid";
    case AdversaryKind::ValueGuided: return "value-guided";
  }
  return "all-in";
}

std::unique_ptr<Policy> extract_reach_policy(const std::vector<ValueMap>& trace,
                                             const ProblemInstance& instance) {
  validate_instance(instance);
  if (trace.empty()) {
    throw std::invalid_argument("extract_reach_policy: empty trace");
  }
  for (const ValueMap& map : trace) {
    if (map.objective != Objective::Reach || map.sets.size() != instance.mdp.size()) {
      throw std::invalid_argument("extract_reach_policy: trace is not a reachability trace");
    }
  }
  return std::make_unique<TrackedReachPolicy>(trace, instance);
}

std::unique_ptr<Policy> extract_safety_policy(const std::vector<ValueMap>& trace,
                                              const ProblemInstance& instance) {
  validate_instance(instance);
  if (trace.empty()) {
    throw std::invalid_argument("extract_safety_policy: empty trace");
  }
  for (const ValueMap& map : trace) {
    if (map.objective != Objective::Safe || map.sets.size() != instance.mdp.size()) {
      throw std::invalid_argument("extract_safety_policy: trace is not a safety trace");
    }
  }
  return std::make_unique<TrackedSafetyPolicy>(trace, /*stabilized=*/false, instance);
}

std::unique_ptr<Policy> extract_safety_policy_stabilized(const ValueMap& limit,
                                                         const ProblemInstance& instance) {
  validate_instance(instance);
  if (limit.objective != Objective::Safe || limit.sets.size() != instance.mdp.size()) {
    throw std::invalid_argument("extract_safety_policy_stabilized: not a safety map");
  }
  if (classify(instance.mdp) == StructureClass::General) {
    throw std::invalid_argument(
        "extract_safety_policy_stabilized: stabilized safety play is supported on acyclic "
        "arenas only");
  }
  std::vector<ValueMap> maps;
  maps.push_back(limit);
  return std::make_unique<TrackedSafetyPolicy>(std::move(maps), /*stabilized=*/true, instance);
}

PlayRecord play(const Mdp& mdp, Policy& reach, Policy& safe, const ProblemInstance& instance,
                RandomSource& randomness, long max_steps) {
  validate_instance(instance);
  if (reach.role() != Objective::Reach || safe.role() != Objective::Safe) {
    throw std::invalid_argument("play: policies passed in the wrong roles");
  }

  PlayRecord record;
  VertexId v = instance.vertex;
  Rational budget = instance.budget;
  record.path.push_back(v);

  for (long step = 0; step < max_steps; ++step) {
    if (mdp.is_target(v) || mdp.is_sink(v)) {
      break;
    }
    const auto& vx = mdp.vertices[static_cast<std::size_t>(v)];
    PlayStep entry;
    entry.vertex = v;

    if (vx.kind == VertexKind::Control) {
      entry.auctioned = true;
      const BidAction reach_action = reach.decide(v, budget, step);
      const BidAction safe_action = safe.decide(v, Rational(1) - budget, step);
      entry.reach_bid = reach_action.bid;
      entry.safe_bid = safe_action.bid;

      const bool reach_legal =
          !(reach_action.bid < Rational(0)) && !(budget < reach_action.bid);
      const bool safe_legal = !(safe_action.bid < Rational(0)) &&
                              !(Rational(1) - budget < safe_action.bid);

      bool reach_won = false;
      Rational payment(0);
      if (reach_legal && safe_legal) {
        reach_won = !(reach_action.bid < safe_action.bid); // ties favor reach
        payment = reach_won ? reach_action.bid : safe_action.bid;
      } else if (reach_legal) {
        reach_won = true;
        payment = reach_action.bid;
        entry.forfeit = true;
      } else if (safe_legal) {
        reach_won = false;
        payment = safe_action.bid;
        entry.forfeit = true;
      } else {
        reach_won = true; // both illegal: reach's tie advantage, no transfer
        entry.forfeit = true;
      }

      VertexId moved = reach_won ? reach_action.move : safe_action.move;
      if (std::find(vx.succ.begin(), vx.succ.end(), moved) == vx.succ.end()) {
        moved = vx.succ.front();
        entry.forfeit = true;
      }

      budget = reach_won ? budget - payment : budget + payment;
      entry.reach_won = reach_won;
      entry.moved_to = moved;
      entry.reach_budget_after = budget;

      reach.observe_control(v, reach_won, moved);
      safe.observe_control(v, !reach_won, moved);
      v = moved;
    } else {
      const std::size_t idx = randomness.sample(mdp, v, step);
      if (idx >= vx.succ.size()) {
        throw std::out_of_range("play: sampled successor index out of range");
      }
      const VertexId moved = vx.succ[idx];
      entry.moved_to = moved;
      entry.reach_budget_after = budget;
      reach.observe_random(v, moved);
      safe.observe_random(v, moved);
      v = moved;
    }

    record.steps.push_back(std::move(entry));
    record.path.push_back(v);
  }

  if (mdp.is_target(v)) {
    record.outcome = PlayOutcome::ReachedT;
  } else if (mdp.is_sink(v)) {
    record.outcome = PlayOutcome::Absorbed;
  } else {
    record.outcome = PlayOutcome::HorizonCap;
  }
  record.final_reach_budget = budget;
  return record;
}

PlayRecord play(const Mdp& mdp, Policy& reach, Policy& safe, const ProblemInstance& instance,
                std::uint64_t rng_seed, long max_steps) {
  CounterRandomSource randomness(rng_seed, 0);
  return play(mdp, reach, safe, instance, randomness, max_steps);
}

MonteCarloResult monte_carlo(const Mdp& mdp, const Policy& reach, const Policy& safe,
                             const ProblemInstance& instance, long trials, std::uint64_t seed,
                             long max_steps) {
  if (trials < 1) {
    throw std::invalid_argument("monte_carlo: trials must be positive");
  }

  long workers = 1;
  if (const char* env = std::getenv("BIDGAME_THREADS")) {
    workers = std::strtol(env, nullptr, 10);
  } else {
    workers = static_cast<long>(std::thread::hardware_concurrency());
  }
  workers = std::max(1L, std::min(workers, trials));

  std::vector<long> hits(static_cast<std::size_t>(workers), 0);
  const auto run_range = [&](long worker) {
    auto reach_copy = reach.clone();
    auto safe_copy = safe.clone();
    long count = 0;
    for (long t = worker; t < trials; t += workers) {
      reach_copy->reset(static_cast<std::uint64_t>(t));
      safe_copy->reset(static_cast<std::uint64_t>(t));
      CounterRandomSource randomness(seed, static_cast<std::uint64_t>(t));
      const PlayRecord record =
          play(mdp, *reach_copy, *safe_copy, instance, randomness, max_steps);
      if (record.outcome == PlayOutcome::ReachedT) {
        ++count;
      }
    }
    hits[static_cast<std::size_t>(worker)] = count;
  };

  if (workers == 1) {
    run_range(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (long w = 0; w < workers; ++w) {
      pool.emplace_back(run_range, w);
    }
    for (auto& thread : pool) {
      thread.join();
    }
  }

  long total = 0;
  for (const long h : hits) {
    total += h;
  }

  MonteCarloResult result;
  result.trials = trials;
  result.frequency = Rational(total, trials);
  // 99% two-sided normal quantile, rounded up.
  const Rational z(25759, 10000);
  const Rational variance_term =
      result.frequency * (Rational(1) - result.frequency) / Rational(trials);
  result.half_width = z * bounds::sqrt_upper(variance_term);
  return result;
}

std::unique_ptr<Policy> make_adversary(AdversaryKind kind, Objective role, const Mdp& mdp,
                                       std::uint64_t seed,
                                       const std::vector<ValueMap>* safety_trace,
                                       const ProblemInstance* instance) {
  if (kind == AdversaryKind::ValueGuided) {
    if (role != Objective::Safe || safety_trace == nullptr || instance == nullptr) {
      throw std::invalid_argument(
          "make_adversary: value-guided play needs the Safe role, a safety trace, and an "
          "instance");
    }
    try {
      return extract_safety_policy(*safety_trace, *instance);
    } catch (const std::invalid_argument&) {
      // No extraction slack at this query: fall back to a legal opponent.
      return std::make_unique<HeuristicAdversary>(AdversaryKind::Zero, role, mdp, seed);
    }
  }
  return std::make_unique<HeuristicAdversary>(kind, role, mdp, seed);
}

} // namespace bidmdp
