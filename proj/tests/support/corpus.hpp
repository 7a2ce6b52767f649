#pragma once

// Seeded, platform-independent generators for the randomized test corpora,
// plus the hand-built alternating stochastic games with known values.
// Every generator is a pure function of its seed.

#include <cstdint>
#include <vector>

#include "bidmdp/mdp.hpp"
#include "bidmdp/rational.hpp"
#include "bidmdp/ssg.hpp"

namespace testsupport {

/// SplitMix64 stream; fully specified, so corpora are identical on every
/// platform and toolchain.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next();
  /// Uniform-ish draw in [0, n); 0 when n == 0.  The modulo bias is
  /// irrelevant for corpus generation.
  std::uint64_t below(std::uint64_t n);
  /// True with probability num/den.
  bool chance(std::uint64_t num, std::uint64_t den);

 private:
  std::uint64_t state_;
};

/// Random arena with 2..max_vertices vertices, at least one target and at
/// least one non-target vertex, out-degrees at most 3, and every transition
/// probability a fraction with denominator at most max_denominator.
bidmdp::Mdp random_mdp(std::uint64_t seed, int max_vertices = 6,
                       int max_denominator = 8);

/// Random tree-shaped arena (classify == Tree) with 4..max_vertices
/// vertices; leaves are target or dead sinks, interior vertices are auction
/// or coin vertices with small out-degree.
bidmdp::Mdp random_tree(std::uint64_t seed, int max_vertices = 10);

/// Random acyclic arena with no genuine randomness: every interior vertex
/// is an auction vertex with forward edges, and the only random vertices
/// are the point-mass target and dead sinks.
bidmdp::Mdp random_pure_dag(std::uint64_t seed, int max_vertices = 10);

/// A stochastic game together with its exact value at the initial vertex.
struct SsgCase {
  bidmdp::Ssg game;
  bidmdp::Rational value;
};

/// Five hand-built games obeying the even-alternation discipline, acyclic
/// up to sink self-loops, with values {1, 0, 1/2, 2/3, 3/4}.
std::vector<SsgCase> alternating_ssg_suite();

}  // namespace testsupport
