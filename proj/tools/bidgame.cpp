// bidgame: command-line frontend for the bidmdp solver library.
//
// Subcommands:
//   solve       decide a (vertex, budget, probability) query
//   iterate     dump value-iteration corner lists as CSV / SVG panels
//   simulate    play extracted policies against an adversary (JSON lines)
//   verify      Monte-Carlo check of an extracted policy vs. the adversary suite
//   reduce-ssg  compile a turn-based stochastic game into a bidding arena
//   ssg-value   bracket the value of a stochastic game via the reduction
//
// Exit codes: 0 = decided / all checks passed, 1 = input error,
// 2 = undecided (Unknown outcome, resource cap, or failed verification).

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "bidmdp/approx_solver.hpp"
#include "bidmdp/bellman.hpp"
#include "bidmdp/exact_solver.hpp"
#include "bidmdp/mdp.hpp"
#include "bidmdp/policy.hpp"
#include "bidmdp/rational.hpp"
#include "bidmdp/render.hpp"
#include "bidmdp/special_solvers.hpp"
#include "bidmdp/ssg.hpp"
#include "bidmdp/staircase.hpp"

namespace {

using bidmdp::Mdp;
using bidmdp::Outcome;
using bidmdp::ProblemInstance;
using bidmdp::Rational;
using bidmdp::ValueMap;
using ordered_json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Rational parse_rational_flag(const std::string& text, const char* flag) {
  auto value = Rational::parse(text);
  if (!value) {
    throw std::invalid_argument(std::string("invalid rational for ") + flag + ": '" + text +
                                "' (use a/b or a decimal string)");
  }
  return *value;
}

ProblemInstance make_instance(Mdp mdp, const std::string& vertex_name, const std::string& budget,
                              const std::string& prob) {
  ProblemInstance instance;
  if (!vertex_name.empty()) {
    auto v = mdp.find(vertex_name);
    if (!v) {
      throw std::invalid_argument("unknown vertex '" + vertex_name + "'");
    }
    instance.vertex = *v;
  } else if (mdp.initial) {
    instance.vertex = *mdp.initial;
  } else {
    throw std::invalid_argument("no --vertex given and the arena declares no init vertex");
  }
  instance.budget = parse_rational_flag(budget, "--budget");
  instance.probability = parse_rational_flag(prob, "--prob");
  instance.mdp = std::move(mdp);
  validate_instance(instance);
  return instance;
}

ordered_json point_json(const bidmdp::Point& pt) {
  return ordered_json{{"B", pt.B.frac()}, {"p", pt.p.frac()}};
}

ordered_json witness_json(const bidmdp::Decision& d) {
  ordered_json w;
  w["kind"] = to_string(d.witness);
  if (d.witness_iteration >= 0) {
    w["iteration"] = d.witness_iteration;
  }
  if (d.witness_corner) {
    w["corner"] = point_json(*d.witness_corner);
  }
  if (d.witness_distance) {
    w["distance"] = d.witness_distance->frac();
  }
  if (d.witness_cutoff) {
    w["cutoff"] = d.witness_cutoff->frac();
  }
  return w;
}

std::size_t map_corners(const ValueMap& map) {
  std::size_t total = 0;
  for (const auto& set : map.sets) {
    total += set.corners().size();
  }
  return total;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::invalid_argument("cannot open output file '" + path + "'");
  }
  out << content;
  if (!out) {
    throw std::invalid_argument("failed while writing '" + path + "'");
  }
}

// ---------------------------------------------------------------- solve

struct SolveArgs {
  std::string input;
  std::string vertex;
  std::string budget;
  std::string prob;
  std::string method = "auto";
  long iterations = 1'000'000;
  int max_rounds = 12;
  std::size_t corner_cap = bidmdp::kDefaultCornerCap;
  int precision_bits = 64;
};

int run_solve(const SolveArgs& args) {
  Mdp mdp = bidmdp::parse_mdp_file(args.input);
  const ProblemInstance instance =
      make_instance(std::move(mdp), args.vertex, args.budget, args.prob);

  std::string method = args.method;
  if (method == "auto") {
    switch (bidmdp::classify(instance.mdp)) {
      case bidmdp::StructureClass::Tree: method = "tree"; break;
      case bidmdp::StructureClass::Acyclic: method = "acyclic"; break;
      case bidmdp::StructureClass::General: method = "approx"; break;
    }
  }

  const auto t0 = Clock::now();
  ordered_json out;
  Outcome outcome = Outcome::Unknown;

  if (method == "exact") {
    bidmdp::ExactOptions options;
    options.max_iterations = args.iterations;
    options.corner_cap = args.corner_cap;
    options.precision_bits = args.precision_bits;
    const bidmdp::Decision d = bidmdp::alg_exact(instance, options);
    outcome = d.outcome;
    out["outcome"] = to_string(d.outcome);
    out["method"] = method;
    out["iterations"] = d.iterations_used;
    out["witness"] = witness_json(d);
    if (!d.note.empty()) {
      out["note"] = d.note;
    }
  } else if (method == "approx") {
    bidmdp::ApproxOptions options;
    options.max_rounds = args.max_rounds;
    options.corner_cap = args.corner_cap;
    const bidmdp::ApproxDecision ad = bidmdp::alg_approx(instance, options);
    outcome = ad.decision.outcome;
    long iterations = 0;
    ordered_json rounds = ordered_json::array();
    for (const auto& round : ad.rounds) {
      iterations += round.n;
      rounds.push_back(ordered_json{{"h", round.h},
                                    {"iterations", round.n},
                                    {"alpha", round.alpha.frac()},
                                    {"outcome", to_string(round.outcome)}});
    }
    out["outcome"] = to_string(ad.decision.outcome);
    out["method"] = method;
    out["iterations"] = iterations;
    out["witness"] = witness_json(ad.decision);
    out["rounds"] = std::move(rounds);
    if (!ad.decision.note.empty()) {
      out["note"] = ad.decision.note;
    }
  } else if (method == "acyclic") {
    const bidmdp::ExactDecision ed = bidmdp::decide_acyclic(instance);
    outcome = ed.outcome;
    out["outcome"] = to_string(ed.outcome);
    out["method"] = method;
    out["iterations"] = ed.rval.iteration;
    out["witness"] =
        ordered_json{{"kind", "stabilized-limit"}, {"boundary_case", ed.boundary_case}};
  } else if (method == "tree") {
    out["method"] = method;
    try {
      auto reach_cert = bidmdp::tree_certificate(instance, bidmdp::Objective::Reach);
      if (reach_cert) {
        outcome = Outcome::ReachWins;
        out["outcome"] = to_string(outcome);
        out["witness"] = ordered_json{
            {"kind", "tree-certificate"},
            {"player", "reach"},
            {"root_point", point_json(reach_cert->points[instance.vertex])}};
      } else {
        auto safe_cert = bidmdp::tree_certificate(instance, bidmdp::Objective::Safe);
        if (safe_cert) {
          outcome = Outcome::SafetyWins;
          out["outcome"] = to_string(outcome);
          out["witness"] = ordered_json{
              {"kind", "tree-certificate"},
              {"player", "safe"},
              {"root_point", point_json(safe_cert->points[instance.vertex])}};
        } else {
          out["outcome"] = to_string(Outcome::Unknown);
          out["witness"] = ordered_json{{"kind", "none"}};
          out["note"] = "no feasible certificate found for either player";
        }
      }
      // Reorder: outcome first for a stable record shape.
      ordered_json reordered;
      reordered["outcome"] = out["outcome"];
      reordered["method"] = method;
      reordered["iterations"] = 0;
      reordered["witness"] = out["witness"];
      if (out.contains("note")) {
        reordered["note"] = out["note"];
      }
      out = std::move(reordered);
    } catch (const bidmdp::ResourceLimitError& e) {
      outcome = Outcome::Unknown;
      out = ordered_json{{"outcome", to_string(outcome)},
                         {"method", method},
                         {"iterations", 0},
                         {"witness", ordered_json{{"kind", "resource-limit"}}},
                         {"note", e.what()}};
    }
  } else {
    throw std::invalid_argument("unknown method '" + method +
                                "' (expected exact, approx, acyclic, tree, or auto)");
  }

  out["wall_time_seconds"] = seconds_since(t0);
  std::cout << out.dump(2) << "\n";
  return outcome == Outcome::Unknown ? 2 : 0;
}

// -------------------------------------------------------------- iterate

struct IterateArgs {
  std::string input;
  long iterations = 0;
  std::string csv_path;
  std::string svg_path;
  std::size_t corner_cap = bidmdp::kDefaultCornerCap;
};

int run_iterate(const IterateArgs& args) {
  const Mdp mdp = bidmdp::parse_mdp_file(args.input);
  if (args.iterations < 0) {
    throw std::invalid_argument("--iterations must be nonnegative");
  }

  std::vector<ValueMap> maps;
  std::string csv = bidmdp::csv_header() + "\n";
  std::size_t stored = 0;
  bool capped = false;
  long capped_at = 0;

  ValueMap reach = bidmdp::initial_reach(mdp);
  ValueMap safe = bidmdp::initial_safe(mdp);
  const auto push = [&](const ValueMap& map) {
    bidmdp::append_csv_rows(csv, mdp, map);
    stored += map_corners(map);
    maps.push_back(map);
  };
  push(reach);
  push(safe);

  for (long i = 1; i <= args.iterations; ++i) {
    reach = bidmdp::step(reach, mdp);
    reach.iteration = static_cast<int>(i);
    safe = bidmdp::step(safe, mdp);
    safe.iteration = static_cast<int>(i);
    if (stored + map_corners(reach) + map_corners(safe) > args.corner_cap) {
      capped = true;
      capped_at = i;
      break;
    }
    push(reach);
    push(safe);
  }

  if (!args.csv_path.empty()) {
    write_text_file(args.csv_path, csv);
  }
  if (!args.svg_path.empty()) {
    write_text_file(args.svg_path, bidmdp::render_svg(mdp, maps));
  }
  if (args.csv_path.empty() && args.svg_path.empty()) {
    std::cout << csv;
  }
  if (capped) {
    std::cerr << "warning: corner cap (" << args.corner_cap << ") exceeded at iteration "
              << capped_at << "; wrote a partial dump up to iteration " << (capped_at - 1)
              << "\n";
    return 2;
  }
  return 0;
}

// ---------------------------------------------------- simulate / verify

struct PlayArgs {
  std::string input;
  std::string vertex;
  std::string budget;
  std::string prob;
  long iterations = 64;
  long trials = 1;
  std::uint64_t seed = 0;
  long max_rounds = 10'000;
  std::size_t corner_cap = bidmdp::kDefaultCornerCap;
};

struct PreparedPlay {
  ProblemInstance instance;
  std::vector<ValueMap> reach_trace;
  std::vector<ValueMap> safety_trace;
  std::unique_ptr<bidmdp::Policy> reach_policy;
};

PreparedPlay prepare_play(const PlayArgs& args) {
  Mdp mdp = bidmdp::parse_mdp_file(args.input);
  PreparedPlay prep;
  prep.instance = make_instance(std::move(mdp), args.vertex, args.budget, args.prob);
  if (args.iterations < 0) {
    throw std::invalid_argument("--iterations must be nonnegative");
  }
  prep.reach_trace = bidmdp::iterate(prep.instance.mdp, bidmdp::Objective::Reach,
                                     static_cast<int>(args.iterations), args.corner_cap);
  prep.safety_trace = bidmdp::iterate(prep.instance.mdp, bidmdp::Objective::Safe,
                                      static_cast<int>(args.iterations), args.corner_cap);
  try {
    prep.reach_policy = bidmdp::extract_reach_policy(prep.reach_trace, prep.instance);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(
        std::string("extract requires a ReachWins decision with strict budget slack within "
                    "the iterated horizon: ") +
        e.what());
  }
  return prep;
}

ordered_json play_json(const Mdp& mdp, long trial, const bidmdp::PlayRecord& record) {
  ordered_json steps = ordered_json::array();
  for (const auto& s : record.steps) {
    ordered_json js;
    js["vertex"] = mdp.name(s.vertex);
    js["auctioned"] = s.auctioned;
    if (s.auctioned) {
      js["reach_bid"] = s.reach_bid.frac();
      js["safe_bid"] = s.safe_bid.frac();
      js["reach_won"] = s.reach_won;
    }
    if (s.forfeit) {
      js["forfeit"] = true;
    }
    js["moved_to"] = mdp.name(s.moved_to);
    js["reach_budget_after"] = s.reach_budget_after.frac();
    steps.push_back(std::move(js));
  }
  ordered_json path = ordered_json::array();
  for (const auto v : record.path) {
    path.push_back(mdp.name(v));
  }
  return ordered_json{{"trial", trial},
                      {"outcome", to_string(record.outcome)},
                      {"path", std::move(path)},
                      {"final_reach_budget", record.final_reach_budget.frac()},
                      {"steps", std::move(steps)}};
}

int run_simulate(const PlayArgs& args) {
  PreparedPlay prep = prepare_play(args);
  const auto adversary =
      bidmdp::make_adversary(bidmdp::AdversaryKind::ValueGuided, bidmdp::Objective::Safe,
                             prep.instance.mdp, args.seed, &prep.safety_trace, &prep.instance);
  for (long t = 0; t < args.trials; ++t) {
    auto reach = prep.reach_policy->clone();
    auto safe = adversary->clone();
    reach->reset(static_cast<std::uint64_t>(t));
    safe->reset(static_cast<std::uint64_t>(t));
    bidmdp::CounterRandomSource rng(args.seed, static_cast<std::uint64_t>(t));
    const bidmdp::PlayRecord record =
        bidmdp::play(prep.instance.mdp, *reach, *safe, prep.instance, rng, args.max_rounds);
    std::cout << play_json(prep.instance.mdp, t, record).dump() << "\n";
  }
  return 0;
}

int run_verify(const PlayArgs& args) {
  PreparedPlay prep = prepare_play(args);
  const bidmdp::AdversaryKind kinds[] = {
      bidmdp::AdversaryKind::AllIn, bidmdp::AdversaryKind::Zero,
      bidmdp::AdversaryKind::UniformRandomBid, bidmdp::AdversaryKind::ValueGuided};

  std::cout << std::left << std::setw(18) << "adversary" << std::right << std::setw(9)
            << "trials" << std::setw(12) << "frequency" << std::setw(12) << "half-width"
            << std::setw(12) << "required" << std::setw(9) << "verdict" << "\n";
  bool all_passed = true;
  for (const auto kind : kinds) {
    const auto adversary =
        bidmdp::make_adversary(kind, bidmdp::Objective::Safe, prep.instance.mdp, args.seed,
                               &prep.safety_trace, &prep.instance);
    const bidmdp::MonteCarloResult mc =
        bidmdp::monte_carlo(prep.instance.mdp, *prep.reach_policy, *adversary, prep.instance,
                            args.trials, args.seed, args.max_rounds);
    const Rational required = prep.instance.probability - Rational(3) * mc.half_width;
    const bool passed = !(mc.frequency < required);
    all_passed = all_passed && passed;
    std::cout << std::left << std::setw(18) << to_string(kind) << std::right << std::setw(9)
              << mc.trials << std::setw(12) << std::fixed << std::setprecision(5)
              << mc.frequency.to_double() << std::setw(12) << mc.half_width.to_double()
              << std::setw(12) << required.to_double() << std::setw(9)
              << (passed ? "pass" : "FAIL") << "\n";
  }
  std::cout << (all_passed ? "all checks passed" : "some checks FAILED") << "\n";
  return all_passed ? 0 : 2;
}

// ------------------------------------------------- reduce-ssg / ssg-value

struct SsgArgs {
  std::string input;
  bool normalize = false;
  std::string precision = "1/16";
  long iterations = 1024;
  std::size_t corner_cap = bidmdp::kDefaultCornerCap;
};

bidmdp::Ssg load_ssg(const SsgArgs& args) {
  bidmdp::Ssg ssg = bidmdp::parse_ssg_file(args.input);
  if (args.normalize) {
    ssg = bidmdp::enforce_alternation(std::move(ssg));
  } else {
    const auto violations = bidmdp::validate_alternation(ssg);
    if (!violations.empty()) {
      std::ostringstream msg;
      msg << "game does not alternate (pass --normalize to repair):";
      for (const auto& v : violations) {
        msg << "\n  " << v;
      }
      throw std::invalid_argument(msg.str());
    }
  }
  return ssg;
}

int run_reduce(const SsgArgs& args) {
  const bidmdp::Ssg ssg = load_ssg(args);
  std::cout << bidmdp::serialize(bidmdp::reduce(ssg));
  return 0;
}

int run_ssg_value(const SsgArgs& args) {
  const bidmdp::Ssg ssg = load_ssg(args);
  const Rational precision = parse_rational_flag(args.precision, "--precision");
  bidmdp::SsgValueOptions options;
  options.max_iterations = args.iterations;
  options.corner_cap = args.corner_cap;
  const auto t0 = Clock::now();
  const bidmdp::SsgValueBracket bracket = bidmdp::ssg_value_via_bidding(ssg, precision, options);
  ordered_json out{{"lo", bracket.lo.frac()},
                   {"hi", bracket.hi.frac()},
                   {"width", (bracket.hi - bracket.lo).frac()},
                   {"exact", bracket.exact},
                   {"exhausted", bracket.exhausted},
                   {"iterations", bracket.iterations_used},
                   {"wall_time_seconds", seconds_since(t0)}};
  std::cout << out.dump(2) << "\n";
  return bracket.exhausted ? 2 : 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"bidgame: solver toolkit for bidding reachability games on MDP arenas"};
  app.require_subcommand(1);

  SolveArgs solve_args;
  auto* solve = app.add_subcommand("solve", "Decide a (vertex, budget, probability) query");
  solve->add_option("--input", solve_args.input, "Arena file")->required();
  solve->add_option("--vertex", solve_args.vertex, "Query vertex (default: init vertex)");
  solve->add_option("--budget", solve_args.budget, "Reach player's budget (rational)")
      ->required();
  solve->add_option("--prob", solve_args.prob, "Required reach probability (rational)")
      ->required();
  solve
      ->add_option("--method", solve_args.method,
                   "exact | approx | acyclic | tree | auto (default auto)")
      ->check(CLI::IsMember({"exact", "approx", "acyclic", "tree", "auto"}));
  solve->add_option("--iterations", solve_args.iterations,
                    "Iteration budget for --method exact");
  solve->add_option("--max-rounds", solve_args.max_rounds,
                    "Refinement rounds for --method approx");
  solve->add_option("--corner-cap", solve_args.corner_cap, "Corner budget per value map");
  solve->add_option("--precision-bits", solve_args.precision_bits,
                    "Dyadic working precision for --method exact (0 = exact sets)");

  IterateArgs iterate_args;
  auto* iterate = app.add_subcommand("iterate", "Dump value-iteration corners as CSV / SVG");
  iterate->add_option("--input", iterate_args.input, "Arena file")->required();
  iterate->add_option("--iterations", iterate_args.iterations, "Number of steps")->required();
  iterate->add_option("--csv", iterate_args.csv_path, "Write corner rows to this CSV file");
  iterate->add_option("--svg", iterate_args.svg_path, "Render staircase panels to this SVG file");
  iterate->add_option("--corner-cap", iterate_args.corner_cap,
                      "Total corner budget across the dumped trace");

  PlayArgs simulate_args;
  auto* simulate =
      app.add_subcommand("simulate", "Play an extracted policy; one JSON line per trial");
  simulate->add_option("--input", simulate_args.input, "Arena file")->required();
  simulate->add_option("--vertex", simulate_args.vertex, "Query vertex (default: init vertex)");
  simulate->add_option("--budget", simulate_args.budget, "Reach player's budget")->required();
  simulate->add_option("--prob", simulate_args.prob, "Required reach probability")->required();
  simulate->add_option("--iterations", simulate_args.iterations,
                       "Value-iteration horizon for policy extraction (default 64)");
  simulate->add_option("--trials", simulate_args.trials, "Number of plays (default 1)");
  simulate->add_option("--seed", simulate_args.seed, "Randomness seed (default 0)");
  simulate->add_option("--max-rounds", simulate_args.max_rounds,
                       "Step cap per play (default 10000)");
  simulate->add_option("--corner-cap", simulate_args.corner_cap, "Corner budget for the trace");

  PlayArgs verify_args;
  verify_args.trials = 10'000;
  auto* verify = app.add_subcommand(
      "verify", "Monte-Carlo check of an extracted policy against the adversary suite");
  verify->add_option("--input", verify_args.input, "Arena file")->required();
  verify->add_option("--vertex", verify_args.vertex, "Query vertex (default: init vertex)");
  verify->add_option("--budget", verify_args.budget, "Reach player's budget")->required();
  verify->add_option("--prob", verify_args.prob, "Required reach probability")->required();
  verify->add_option("--iterations", verify_args.iterations,
                     "Value-iteration horizon for policy extraction (default 64)");
  verify->add_option("--trials", verify_args.trials, "Trials per adversary (default 10000)");
  verify->add_option("--seed", verify_args.seed, "Randomness seed (default 0)");
  verify->add_option("--max-rounds", verify_args.max_rounds, "Step cap per play (default 10000)");
  verify->add_option("--corner-cap", verify_args.corner_cap, "Corner budget for the trace");

  SsgArgs reduce_args;
  auto* reduce = app.add_subcommand(
      "reduce-ssg", "Compile a turn-based stochastic game into a bidding arena");
  reduce->add_option("--input", reduce_args.input, "Stochastic game file")->required();
  reduce->add_flag("--normalize", reduce_args.normalize,
                   "Insert dummy vertices to repair strict alternation first");

  SsgArgs value_args;
  auto* ssg_value =
      app.add_subcommand("ssg-value", "Bracket a stochastic game's value via the reduction");
  ssg_value->add_option("--input", value_args.input, "Stochastic game file")->required();
  ssg_value->add_flag("--normalize", value_args.normalize,
                      "Insert dummy vertices to repair strict alternation first");
  ssg_value->add_option("--precision", value_args.precision,
                        "Target bracket width (rational, default 1/16)");
  ssg_value->add_option("--iterations", value_args.iterations,
                        "Value-iteration budget (default 1024)");
  ssg_value->add_option("--corner-cap", value_args.corner_cap, "Corner budget per value map");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (solve->parsed()) return run_solve(solve_args);
    if (iterate->parsed()) return run_iterate(iterate_args);
    if (simulate->parsed()) return run_simulate(simulate_args);
    if (verify->parsed()) return run_verify(verify_args);
    if (reduce->parsed()) return run_reduce(reduce_args);
    if (ssg_value->parsed()) return run_ssg_value(value_args);
  } catch (const bidmdp::ResourceLimitError& e) {
    std::cerr << "undecided: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
