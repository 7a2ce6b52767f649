#include "corpus.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <string>

namespace testsupport {

using bidmdp::Mdp;
using bidmdp::Rational;
using bidmdp::Ssg;

std::uint64_t Rng::next() {
  state_ += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t Rng::below(std::uint64_t n) { return n == 0 ? 0 : next() % n; }

bool Rng::chance(std::uint64_t num, std::uint64_t den) { return below(den) < num; }

namespace {

std::string vertex_name(std::size_t index) { return "v" + std::to_string(index); }

/// k distinct draws from [0, n).
std::vector<std::size_t> distinct_picks(Rng& rng, std::size_t k, std::size_t n) {
  std::set<std::size_t> chosen;
  while (chosen.size() < std::min(k, n)) {
    chosen.insert(static_cast<std::size_t>(rng.below(n)));
  }
  return {chosen.begin(), chosen.end()};
}

/// Positive weights over k successors summing to a denominator <= max_den.
void append_distribution(std::ostringstream& out, Rng& rng,
                         const std::vector<std::string>& names, int max_den) {
  const std::size_t k = names.size();
  const std::uint64_t den =
      std::max<std::uint64_t>(k, 2 + rng.below(static_cast<std::uint64_t>(max_den) - 1));
  std::vector<std::uint64_t> weight(k, 1);
  for (std::uint64_t extra = den - k; extra > 0; --extra) {
    weight[static_cast<std::size_t>(rng.below(k))]++;
  }
  for (std::size_t j = 0; j < k; ++j) {
    out << ' ' << names[j] << ':' << weight[j] << '/' << den;
  }
}

}  // namespace

Mdp random_mdp(std::uint64_t seed, int max_vertices, int max_denominator) {
  Rng rng(seed * 0x9e3779b97f4a7c15ULL + 0x1234567ULL);
  const std::size_t n = 2 + static_cast<std::size_t>(
                                rng.below(static_cast<std::uint64_t>(max_vertices) - 1));

  // Targets: one, occasionally two, never all vertices.
  std::set<std::size_t> targets;
  targets.insert(static_cast<std::size_t>(rng.below(n)));
  if (n >= 3 && rng.chance(1, 4)) {
    targets.insert(static_cast<std::size_t>(rng.below(n)));
  }
  while (targets.size() >= n) {
    targets.erase(targets.begin());
  }

  std::ostringstream text;
  for (std::size_t v = 0; v < n; ++v) {
    if (targets.count(v) != 0) {
      text << "random " << vertex_name(v) << " -> " << vertex_name(v) << ":1\n";
      continue;
    }
    const bool control = rng.chance(1, 2);
    const std::size_t out_degree = 1 + static_cast<std::size_t>(rng.below(std::min<std::uint64_t>(3, n)));
    const std::vector<std::size_t> succ = distinct_picks(rng, out_degree, n);
    std::vector<std::string> names;
    names.reserve(succ.size());
    for (std::size_t s : succ) {
      names.push_back(vertex_name(s));
    }
    if (control) {
      text << "control " << vertex_name(v) << " ->";
      for (const auto& name : names) {
        text << ' ' << name;
      }
      text << '\n';
    } else {
      text << "random " << vertex_name(v) << " ->";
      append_distribution(text, rng, names, max_denominator);
      text << '\n';
    }
  }
  for (std::size_t v : targets) {
    text << "target " << vertex_name(v) << '\n';
  }

  // Prefer a non-target initial vertex so queries there are non-trivial.
  std::size_t initial = static_cast<std::size_t>(rng.below(n));
  while (targets.count(initial) != 0) {
    initial = (initial + 1) % n;
  }
  text << "init " << vertex_name(initial) << '\n';
  return bidmdp::parse_mdp_string(text.str());
}

Mdp random_tree(std::uint64_t seed, int max_vertices) {
  Rng rng(seed * 0xd1342543de82ef95ULL + 0xabcdefULL);
  const std::size_t n =
      4 + static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(max_vertices) - 3));

  // Shape: vertex 0 is the root; every later vertex picks a parent with
  // spare child capacity (2 for auction vertices, 3 for coin vertices).
  std::vector<bool> control(n);
  for (std::size_t v = 0; v < n; ++v) {
    control[v] = rng.chance(1, 2);
  }
  std::vector<std::vector<std::size_t>> children(n);
  for (std::size_t v = 1; v < n; ++v) {
    std::size_t parent = static_cast<std::size_t>(rng.below(v));
    const auto capacity = [&](std::size_t u) -> std::size_t { return control[u] ? 2 : 3; };
    while (children[parent].size() >= capacity(parent)) {
      parent = (parent + 1) % v;
    }
    children[parent].push_back(v);
  }

  // Leaves become target or dead sinks; make sure one target exists.
  std::vector<std::size_t> leaves;
  for (std::size_t v = 0; v < n; ++v) {
    if (children[v].empty()) {
      leaves.push_back(v);
    }
  }
  std::set<std::size_t> targets;
  for (std::size_t leaf : leaves) {
    if (rng.chance(1, 2)) {
      targets.insert(leaf);
    }
  }
  if (targets.empty()) {
    targets.insert(leaves.back());
  }

  std::ostringstream text;
  for (std::size_t v = 0; v < n; ++v) {
    if (children[v].empty()) {
      text << "random " << vertex_name(v) << " -> " << vertex_name(v) << ":1\n";
      continue;
    }
    std::vector<std::string> names;
    names.reserve(children[v].size());
    for (std::size_t c : children[v]) {
      names.push_back(vertex_name(c));
    }
    if (control[v]) {
      text << "control " << vertex_name(v) << " ->";
      for (const auto& name : names) {
        text << ' ' << name;
      }
      text << '\n';
    } else {
      text << "random " << vertex_name(v) << " ->";
      append_distribution(text, rng, names, 8);
      text << '\n';
    }
  }
  for (std::size_t v : targets) {
    text << "target " << vertex_name(v) << '\n';
  }
  text << "init " << vertex_name(0) << '\n';
  return bidmdp::parse_mdp_string(text.str());
}

Mdp random_pure_dag(std::uint64_t seed, int max_vertices) {
  Rng rng(seed * 0xaf251af3b0f025b5ULL + 0x777ULL);
  const std::size_t interior =
      3 + static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(max_vertices) - 4));

  // Interior auction vertices v0..v{interior-1} point forward, possibly at
  // the shared target "goal" or dead sink "trap".
  std::ostringstream text;
  for (std::size_t v = 0; v < interior; ++v) {
    // Candidate successors: later interior vertices, then goal, then trap.
    const std::size_t later = interior - v - 1;
    const std::size_t candidates = later + 2;
    const std::size_t out_degree =
        1 + static_cast<std::size_t>(rng.below(std::min<std::uint64_t>(3, candidates)));
    const std::vector<std::size_t> picks = distinct_picks(rng, out_degree, candidates);
    text << "control " << vertex_name(v) << " ->";
    for (std::size_t pick : picks) {
      if (pick < later) {
        text << ' ' << vertex_name(v + 1 + pick);
      } else if (pick == later) {
        text << " goal";
      } else {
        text << " trap";
      }
    }
    text << '\n';
  }
  text << "random goal -> goal:1\n";
  text << "random trap -> trap:1\n";
  text << "target goal\n";
  text << "init " << vertex_name(0) << '\n';
  return bidmdp::parse_mdp_string(text.str());
}

std::vector<SsgCase> alternating_ssg_suite() {
  std::vector<SsgCase> suite;

  // Forced chain into the target: value 1 (the maximizer picks the branch
  // that reaches it surely).
  suite.push_back({bidmdp::parse_ssg_string("p1 a -> r1\n"
                                            "random r1 -> b:1\n"
                                            "p0 b -> r2 r3\n"
                                            "random r2 -> t:1\n"
                                            "random r3 -> s:1\n"
                                            "random t -> t:1\n"
                                            "random s -> s:1\n"
                                            "target t\n"
                                            "init a\n"),
                   Rational(1)});

  // The minimizer chooses between a sure win and a sure loss: value 0.
  suite.push_back({bidmdp::parse_ssg_string("p1 a -> r1 r4\n"
                                            "random r1 -> b:1\n"
                                            "p0 b -> r2\n"
                                            "random r2 -> t:1\n"
                                            "random r4 -> c:1\n"
                                            "p0 c -> r5\n"
                                            "random r5 -> s:1\n"
                                            "random t -> t:1\n"
                                            "random s -> s:1\n"
                                            "target t\n"
                                            "init a\n"),
                   Rational(0)});

  // The minimizer picks a fair coin over a 2/3 coin: value 1/2.
  suite.push_back({bidmdp::parse_ssg_string("p1 a -> r1 r2\n"
                                            "random r1 -> t:1/2 s:1/2\n"
                                            "random r2 -> b:1\n"
                                            "p0 b -> r3\n"
                                            "random r3 -> t:2/3 s:1/3\n"
                                            "random t -> t:1\n"
                                            "random s -> s:1\n"
                                            "target t\n"
                                            "init a\n"),
                   Rational(1, 2)});

  // The maximizer picks a 2/3 coin over a 1/3 coin: value 2/3.
  suite.push_back({bidmdp::parse_ssg_string("p1 a -> r0\n"
                                            "random r0 -> b:1\n"
                                            "p0 b -> r1 r2\n"
                                            "random r1 -> t:2/3 s:1/3\n"
                                            "random r2 -> t:1/3 s:2/3\n"
                                            "random t -> t:1\n"
                                            "random s -> s:1\n"
                                            "target t\n"
                                            "init a\n"),
                   Rational(2, 3)});

  // The maximizer picks a 3/4 coin over a fair coin: value 3/4.
  suite.push_back({bidmdp::parse_ssg_string("p1 a -> r0\n"
                                            "random r0 -> b:1\n"
                                            "p0 b -> r1 r2\n"
                                            "random r1 -> t:1/2 s:1/2\n"
                                            "random r2 -> t:3/4 s:1/4\n"
                                            "random t -> t:1\n"
                                            "random s -> s:1\n"
                                            "target t\n"
                                            "init a\n"),
                   Rational(3, 4)});

  return suite;
}

}  // namespace testsupport
