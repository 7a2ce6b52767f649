// Microbenchmarks for the hot paths: staircase canonicalization, membership
// and distance probes, full Bellman steps on a cyclic arena, and the
// acyclic decision procedure.

#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "bidmdp/bellman.hpp"
#include "bidmdp/exact_solver.hpp"
#include "bidmdp/mdp.hpp"
#include "bidmdp/special_solvers.hpp"
#include "bidmdp/staircase.hpp"

namespace {

using namespace bidmdp;

const std::string kDataDir = BIDMDP_BENCH_DATA_DIR;

Mdp load(const char* file) { return parse_mdp_file(kDataDir + "/" + file); }

// A noisy diagonal point cloud: half the points are dominated and must be
// pruned, so canonicalization does real work.
std::vector<Point> noisy_diagonal(int n) {
  std::vector<Point> points;
  points.reserve(static_cast<std::size_t>(2 * n));
  for (int k = 0; k <= n; ++k) {
    points.push_back(Point{Rational(k, n), Rational(k, n)});
    if (k > 0) {
      points.push_back(Point{Rational(k, n), Rational(k - 1, n)});  // dominated
    }
  }
  return points;
}

void BM_canonicalize(benchmark::State& state) {
  const auto points = noisy_diagonal(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        StaircaseSet::from_corners(points, Direction::DownwardClosed));
  }
}
BENCHMARK(BM_canonicalize)->Arg(64)->Arg(256)->Arg(1024);

void BM_membership(benchmark::State& state) {
  const auto set = StaircaseSet::from_corners(
      noisy_diagonal(static_cast<int>(state.range(0))), Direction::DownwardClosed);
  const Point probe{Rational(1, 3), Rational(1, 3)};
  for (auto _ : state) {
    benchmark::DoNotOptimize(set.contains(probe));
  }
}
BENCHMARK(BM_membership)->Arg(64)->Arg(1024);

void BM_distance(benchmark::State& state) {
  const auto set = StaircaseSet::from_corners(
      noisy_diagonal(static_cast<int>(state.range(0))), Direction::DownwardClosed);
  const Point probe{Rational(1, 5), Rational(4, 5)};
  for (auto _ : state) {
    benchmark::DoNotOptimize(set.distance(probe));
  }
}
BENCHMARK(BM_distance)->Arg(64)->Arg(1024);

void BM_bellman_step(benchmark::State& state) {
  const Mdp arena = load("cycle4.mdp");
  const auto trace =
      iterate(arena, Objective::Reach, static_cast<int>(state.range(0)));
  const ValueMap& late = trace.back();
  for (auto _ : state) {
    benchmark::DoNotOptimize(step(late, arena));
  }
}
BENCHMARK(BM_bellman_step)->Arg(8)->Arg(32)->Arg(128);

void BM_solve_acyclic(benchmark::State& state) {
  const Mdp arena = load("dag9.mdp");
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_acyclic(arena));
  }
}
BENCHMARK(BM_solve_acyclic)->Unit(benchmark::kMicrosecond);

void BM_decide_acyclic(benchmark::State& state) {
  const Mdp arena = load("dag9.mdp");
  const ProblemInstance instance{arena, arena.find("a").value(), Rational(3, 4),
                                 Rational(1, 2)};
  for (auto _ : state) {
    benchmark::DoNotOptimize(decide_acyclic(instance));
  }
}
BENCHMARK(BM_decide_acyclic)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
