#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "bidmdp/bellman.hpp"
#include "bidmdp/mdp.hpp"
#include "bidmdp/rational.hpp"

namespace bidmdp {

/// Deterministic counter-based generator: every output word is a pure
/// function of (seed, trial, step, draw), so plays are reproducible and
/// trials are independent under any execution order.
std::uint64_t counter_word(std::uint64_t seed, std::uint64_t trial, std::uint64_t step,
                           std::uint64_t draw);

/// What a policy proposes at a control vertex: an amount from its own
/// budget and the successor to take if the bid wins.
struct BidAction {
  Rational bid;
  VertexId move = 0;
};

/// A player strategy with compressed internal state (tracked budget,
/// requested probability, horizon counter).  The referee drives it:
/// decide() is polled at control vertices, observe_* reports what
/// actually happened so the state can advance.
class Policy {
 public:
  explicit Policy(Objective role) : role_(role) {}
  virtual ~Policy() = default;

  Objective role() const { return role_; }

  /// Restart for a fresh play; `trial` keys any internal randomness.
  virtual void reset(std::uint64_t trial) = 0;
  virtual BidAction decide(VertexId v, const Rational& own_budget, long step) = 0;
  /// `won` is from this policy's perspective; `moved_to` is where the
  /// auction winner sent the token.
  virtual void observe_control(VertexId v, bool won, VertexId moved_to) = 0;
  virtual void observe_random(VertexId v, VertexId moved_to) = 0;
  virtual std::unique_ptr<Policy> clone() const = 0;

 private:
  Objective role_;
};

/// Source of outcomes at random vertices; swap in a scripted source to
/// replay a fixed branch sequence.
class RandomSource {
 public:
  virtual ~RandomSource() = default;
  /// Index into succ(v), sampled from the vertex distribution.
  virtual std::size_t sample(const Mdp& mdp, VertexId v, long step) = 0;
};

/// Exact sampling of the rational distribution by rejection over
/// counter-generated words.
class CounterRandomSource : public RandomSource {
 public:
  CounterRandomSource(std::uint64_t seed, std::uint64_t trial) : seed_(seed), trial_(trial) {}
  std::size_t sample(const Mdp& mdp, VertexId v, long step) override;

 private:
  std::uint64_t seed_ = 0;
  std::uint64_t trial_ = 0;
};

/// Replays a fixed queue of successor indices (for deterministic tests);
/// throws std::out_of_range when the script is exhausted.
class ScriptedRandomSource : public RandomSource {
 public:
  explicit ScriptedRandomSource(std::vector<std::size_t> script) : script_(std::move(script)) {}
  std::size_t sample(const Mdp& mdp, VertexId v, long step) override;

 private:
  std::vector<std::size_t> script_;
  std::size_t next_ = 0;
};

enum class PlayOutcome {
  ReachedT,   ///< token entered the target set
  Absorbed,   ///< token entered a non-target sink
  HorizonCap, ///< step budget exhausted
};

std::string to_string(PlayOutcome outcome);

/// One transcript entry; budgets sum to 1 after every step.
struct PlayStep {
  VertexId vertex = 0;
  bool auctioned = false; ///< control step (bids below are meaningful)
  Rational reach_bid;
  Rational safe_bid;
  bool reach_won = false;
  bool forfeit = false; ///< an illegal bid or move was demoted, not obeyed
  VertexId moved_to = 0;
  Rational reach_budget_after;
};

struct PlayRecord {
  std::vector<VertexId> path; ///< visited vertices, starting vertex first
  std::vector<PlayStep> steps;
  PlayOutcome outcome = PlayOutcome::HorizonCap;
  Rational final_reach_budget;
};

/// Reachability policy extracted from a reach-map trace (maps 0..n).
/// Requires some map i in the trace to contain (B', p) with B' strictly
/// below the instance budget (strict slack); targets extract trivially.
/// Throws std::invalid_argument when the precondition fails.  The
/// returned policy keeps pointers into neither argument.
std::unique_ptr<Policy> extract_reach_policy(const std::vector<ValueMap>& trace,
                                             const ProblemInstance& instance);

/// Safety policy for the finite horizon h = trace.size() - 1: requires
/// (B', p) in the final map at the queried vertex with B' strictly above
/// the instance budget.  The guarantee is about the first h steps.
std::unique_ptr<Policy> extract_safety_policy(const std::vector<ValueMap>& trace,
                                              const ProblemInstance& instance);

/// Safety policy driven by a stabilized (fixpoint) safety map; supported
/// for acyclic arenas only, where the limit is exactly computable and
/// plays are finite.  Throws std::invalid_argument otherwise.
std::unique_ptr<Policy> extract_safety_policy_stabilized(const ValueMap& limit,
                                                         const ProblemInstance& instance);

/// Referee one play from the instance's vertex and budget split.  Ties
/// go to the reachability player; an illegal bid (negative or above the
/// bidder's budget) forfeits that auction; an illegal move is redirected
/// to the first successor.  Policies are NOT reset here.
PlayRecord play(const Mdp& mdp, Policy& reach, Policy& safe, const ProblemInstance& instance,
                RandomSource& randomness, long max_steps);

/// Same, sampling with the counter generator under (rng_seed, trial 0).
PlayRecord play(const Mdp& mdp, Policy& reach, Policy& safe, const ProblemInstance& instance,
                std::uint64_t rng_seed, long max_steps);

struct MonteCarloResult {
  Rational frequency;  ///< fraction of trials that reached the target
  Rational half_width; ///< 99% normal-approximation half-width (upper bound)
  long trials = 0;
};

/// Seeded independent plays; trial t uses randomness (seed, t) and both
/// policies reset(t).  Worker parallelism is capped by the
/// BIDGAME_THREADS environment variable; results do not depend on the
/// worker count.
MonteCarloResult monte_carlo(const Mdp& mdp, const Policy& reach, const Policy& safe,
                             const ProblemInstance& instance, long trials, std::uint64_t seed,
                             long max_steps = 10'000);

enum class AdversaryKind { AllIn, Zero, UniformRandomBid, ValueGuided };

std::string to_string(AdversaryKind kind);

/// Test-harness opponents.  AllIn bids its whole budget, Zero bids
/// nothing, UniformRandomBid bids a counter-seeded dyadic fraction of
/// its budget; all three move toward (Reach role) or away from (Safe
/// role) the target set by BFS distance.  ValueGuided wraps
/// extract_safety_policy over the supplied safety trace (Safe role
/// only), degrading to Zero-style play when the extraction slack is
/// unavailable.
std::unique_ptr<Policy> make_adversary(AdversaryKind kind, Objective role, const Mdp& mdp,
                                       std::uint64_t seed = 0,
                                       const std::vector<ValueMap>* safety_trace = nullptr,
                                       const ProblemInstance* instance = nullptr);

} // namespace bidmdp
