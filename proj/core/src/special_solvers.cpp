#include "bidmdp/special_solvers.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "bidmdp/linear.hpp"

namespace bidmdp {

namespace {

/// Vertices reachable from `root`, self-loops ignored.
std::vector<VertexId> subtree_vertices(const Mdp& mdp, VertexId root) {
  std::vector<bool> seen(mdp.size(), false);
  std::vector<VertexId> stack{root};
  std::vector<VertexId> out;
  seen[static_cast<std::size_t>(root)] = true;
  while (!stack.empty()) {
    const VertexId u = stack.back();
    stack.pop_back();
    out.push_back(u);
    for (const VertexId w : mdp.vertices[static_cast<std::size_t>(u)].succ) {
      if (w != u && !seen[static_cast<std::size_t>(w)]) {
        seen[static_cast<std::size_t>(w)] = true;
        stack.push_back(w);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// One discrete choice digit: a control vertex picking a successor, or a
/// constrained leaf picking a disjunct.
struct ChoiceDigit {
  VertexId vertex = 0;
  bool is_leaf = false;
  std::size_t cardinality = 0;
};

struct TreeSystem {
  std::vector<VertexId> vertices;       ///< subtree, ascending
  std::vector<ChoiceDigit> digits;      ///< odometer, last digit fastest
  std::vector<std::size_t> var_B;       ///< per mdp vertex, index of B_u (or npos)
  std::vector<std::size_t> var_p;
  std::vector<std::size_t> var_aux;     ///< per control vertex, companion bound
  std::size_t num_vars = 0;
};

constexpr std::size_t kNoVar = static_cast<std::size_t>(-1);

TreeSystem layout_system(const Mdp& mdp, VertexId root, Objective player) {
  TreeSystem sys;
  sys.vertices = subtree_vertices(mdp, root);
  sys.var_B.assign(mdp.size(), kNoVar);
  sys.var_p.assign(mdp.size(), kNoVar);
  sys.var_aux.assign(mdp.size(), kNoVar);
  for (const VertexId u : sys.vertices) {
    sys.var_B[static_cast<std::size_t>(u)] = sys.num_vars++;
    sys.var_p[static_cast<std::size_t>(u)] = sys.num_vars++;
  }
  std::vector<bool> in_subtree(mdp.size(), false);
  for (const VertexId u : sys.vertices) {
    in_subtree[static_cast<std::size_t>(u)] = true;
  }
  // Control digits in sinks-first topological order.
  for (const VertexId u : topological_order(mdp)) {
    const auto& vx = mdp.vertices[static_cast<std::size_t>(u)];
    if (in_subtree[static_cast<std::size_t>(u)] && vx.kind == VertexKind::Control &&
        !mdp.is_sink(u)) {
      sys.var_aux[static_cast<std::size_t>(u)] = sys.num_vars++;
      sys.digits.push_back({u, false, vx.succ.size()});
    }
  }
  // Constrained-leaf digits in vertex order: non-target sinks for the
  // reachability system, target sinks for the safety system.
  for (const VertexId u : sys.vertices) {
    if (!mdp.is_sink(u)) {
      continue;
    }
    const bool constrained =
        player == Objective::Reach ? !mdp.is_target(u) : mdp.is_target(u);
    if (constrained) {
      sys.digits.push_back({u, true, 2});
    }
  }
  return sys;
}

LinearSystem build_system(const Mdp& mdp, const TreeSystem& sys, const Point& query,
                          Objective player, VertexId root,
                          const std::vector<std::size_t>& choice) {
  LinearSystem lin(sys.num_vars);
  const Rational zero(0);
  const Rational one(1);

  for (const VertexId u : sys.vertices) {
    lin.add_range(sys.var_B[static_cast<std::size_t>(u)], zero, one);
    lin.add_range(sys.var_p[static_cast<std::size_t>(u)], zero, one);
  }

  // Root conditions mirror the boundary-exact membership test.
  const std::size_t rb = sys.var_B[static_cast<std::size_t>(root)];
  const std::size_t rp = sys.var_p[static_cast<std::size_t>(root)];
  if (player == Objective::Reach) {
    lin.add_le({{rb, one}}, query.B);           // B_root <= B
    lin.add_lt({{rb, one}}, one);               // B_root < 1
    lin.add_le({{rp, Rational(-1)}}, -query.p); // p_root >= p
  } else {
    if (query.B < one) {
      lin.add_lt({{rb, Rational(-1)}}, -query.B); // B_root > B
    } else {
      lin.add_eq({{rb, one}}, one);
    }
    lin.add_le({{rp, one}}, query.p); // p_root <= p
  }

  std::size_t digit_index = 0;
  for (const ChoiceDigit& digit : sys.digits) {
    const auto u = static_cast<std::size_t>(digit.vertex);
    const std::size_t pick = choice[digit_index++];
    if (digit.is_leaf) {
      if (player == Objective::Reach) {
        // Non-target sink: B_z = 1 or p_z = 0.
        if (pick == 0) {
          lin.add_eq({{sys.var_B[u], one}}, one);
        } else {
          lin.add_eq({{sys.var_p[u], one}}, zero);
        }
      } else {
        // Target sink: B_z = 0 or p_z = 1.
        if (pick == 0) {
          lin.add_eq({{sys.var_B[u], one}}, zero);
        } else {
          lin.add_eq({{sys.var_p[u], one}}, one);
        }
      }
      continue;
    }
    const auto& vx = mdp.vertices[u];
    const auto chosen = static_cast<std::size_t>(vx.succ[pick]);
    const std::size_t aux = sys.var_aux[u];
    lin.add_range(aux, zero, one);
    // 2 B_u = B_chosen + companion.
    lin.add_eq({{sys.var_B[u], Rational(2)}, {sys.var_B[chosen], Rational(-1)}, {aux, Rational(-1)}},
               zero);
    for (const VertexId w : vx.succ) {
      const auto wi = static_cast<std::size_t>(w);
      if (player == Objective::Reach) {
        // p_u <= p_w, companion >= B_w.
        lin.add_le({{sys.var_p[u], one}, {sys.var_p[wi], Rational(-1)}}, zero);
        lin.add_le({{sys.var_B[wi], one}, {aux, Rational(-1)}}, zero);
      } else {
        // p_u >= p_w, companion <= B_w.
        lin.add_le({{sys.var_p[wi], one}, {sys.var_p[u], Rational(-1)}}, zero);
        lin.add_le({{aux, one}, {sys.var_B[wi], Rational(-1)}}, zero);
      }
    }
  }

  for (const VertexId v : sys.vertices) {
    const auto u = static_cast<std::size_t>(v);
    const auto& vx = mdp.vertices[u];
    if (vx.kind != VertexKind::Random || mdp.is_sink(v)) {
      continue;
    }
    // p_u = sum of delta-weighted successor probabilities.
    LinearSystem::Terms expectation{{sys.var_p[u], Rational(-1)}};
    for (std::size_t k = 0; k < vx.succ.size(); ++k) {
      const auto wi = static_cast<std::size_t>(vx.succ[k]);
      expectation.push_back({sys.var_p[wi], vx.prob[k]});
    }
    lin.add_eq(expectation, zero);
    for (const VertexId w : vx.succ) {
      const auto wi = static_cast<std::size_t>(w);
      if (player == Objective::Reach) {
        // B_u >= B_w.
        lin.add_le({{sys.var_B[wi], one}, {sys.var_B[u], Rational(-1)}}, zero);
      } else {
        lin.add_le({{sys.var_B[u], one}, {sys.var_B[wi], Rational(-1)}}, zero);
      }
    }
  }

  return lin;
}

} // namespace

std::pair<ValueMap, ValueMap> solve_acyclic(const Mdp& mdp) {
  const StructureClass structure = classify(mdp);
  if (structure == StructureClass::General) {
    throw std::invalid_argument("solve_acyclic: arena is cyclic");
  }
  ValueMap rval = initial_reach(mdp);
  ValueMap sval = initial_safe(mdp);
  const long n = static_cast<long>(mdp.size());
  for (long i = 0; i < n; ++i) {
    rval = step(rval, mdp);
    rval.iteration = static_cast<int>(i + 1);
    sval = step(sval, mdp);
    sval.iteration = static_cast<int>(i + 1);
  }
  return {std::move(rval), std::move(sval)};
}

ExactDecision decide_acyclic(const ProblemInstance& instance) {
  validate_instance(instance);
  auto [rval, sval] = solve_acyclic(instance.mdp);
  const auto v = static_cast<std::size_t>(instance.vertex);
  const Rational& B = instance.budget;
  const Rational& p = instance.probability;

  // Least budget winning at probability p for the reachability player.
  const std::optional<Rational> beta = rval.sets[v].min_B_at(p);
  const bool reach_wins = beta && *beta < Rational(1) && *beta <= B;

  // Greatest budget still defensible at probability p for safety.
  const std::optional<Rational> gamma = sval.sets[v].max_B_at(p);
  const bool safety_wins =
      gamma && (B < *gamma || (B == Rational(1) && *gamma == Rational(1)));

  ExactDecision decision;
  decision.rval = std::move(rval);
  decision.sval = std::move(sval);
  decision.boundary_case = reach_wins && safety_wins;
  if (reach_wins) {
    decision.outcome = Outcome::ReachWins;
  } else if (safety_wins) {
    decision.outcome = Outcome::SafetyWins;
  } else {
    throw std::logic_error("decide_acyclic: neither membership condition holds");
  }
  return decision;
}

std::optional<Certificate> tree_certificate(const ProblemInstance& instance, Objective player,
                                            const TreeSearchOptions& options) {
  validate_instance(instance);
  const Mdp& mdp = instance.mdp;
  if (classify(mdp) != StructureClass::Tree) {
    throw std::invalid_argument("tree_certificate: arena is not a tree");
  }
  const VertexId root = instance.vertex;
  const Point query{instance.budget, instance.probability};
  const TreeSystem sys = layout_system(mdp, root, player);

  std::size_t space = 1;
  for (const ChoiceDigit& digit : sys.digits) {
    if (space > options.max_choice_vectors / digit.cardinality) {
      std::ostringstream msg;
      msg << "tree certificate search space exceeds cap of " << options.max_choice_vectors
          << " choice vectors";
      throw ResourceLimitError(msg.str(), 0);
    }
    space *= digit.cardinality;
  }

  std::vector<std::size_t> choice(sys.digits.size(), 0);
  for (std::size_t tried = 0; tried < space; ++tried) {
    const LinearSystem lin = build_system(mdp, sys, query, player, root, choice);
    if (const auto assignment = linear_feasibility(lin)) {
      Certificate cert;
      cert.player = player;
      cert.points.assign(mdp.size(), Point{Rational(0), Rational(0)});
      cert.chosen.assign(mdp.size(), std::nullopt);
      cert.leaf_choice.assign(mdp.size(), Certificate::LeafChoice::None);
      for (const VertexId u : sys.vertices) {
        const auto ui = static_cast<std::size_t>(u);
        cert.points[ui] = {(*assignment)[sys.var_B[ui]], (*assignment)[sys.var_p[ui]]};
      }
      std::size_t digit_index = 0;
      for (const ChoiceDigit& digit : sys.digits) {
        const auto ui = static_cast<std::size_t>(digit.vertex);
        const std::size_t pick = choice[digit_index++];
        if (digit.is_leaf) {
          if (player == Objective::Reach) {
            cert.leaf_choice[ui] = pick == 0 ? Certificate::LeafChoice::BudgetOne
                                             : Certificate::LeafChoice::ProbZero;
          } else {
            cert.leaf_choice[ui] = pick == 0 ? Certificate::LeafChoice::BudgetZero
                                             : Certificate::LeafChoice::ProbOne;
          }
        } else {
          cert.chosen[ui] = mdp.vertices[ui].succ[pick];
        }
      }
      return cert;
    }
    // Advance the odometer, last digit fastest.
    for (std::size_t d = choice.size(); d-- > 0;) {
      if (++choice[d] < sys.digits[d].cardinality) {
        break;
      }
      choice[d] = 0;
    }
  }
  return std::nullopt;
}

bool check_certificate(const Certificate& certificate, const ProblemInstance& instance,
                       Objective player) {
  validate_instance(instance);
  const Mdp& mdp = instance.mdp;
  if (certificate.player != player || certificate.points.size() != mdp.size()) {
    return false;
  }
  const Rational zero(0);
  const Rational one(1);
  const std::vector<VertexId> vertices = subtree_vertices(mdp, instance.vertex);

  const auto in_range = [&](const Rational& x) { return !(x < zero) && !(one < x); };

  for (const VertexId v : vertices) {
    const auto u = static_cast<std::size_t>(v);
    const Point& pt = certificate.points[u];
    if (!in_range(pt.B) || !in_range(pt.p)) {
      return false;
    }
  }

  const Point& root = certificate.points[static_cast<std::size_t>(instance.vertex)];
  if (player == Objective::Reach) {
    if (instance.budget < root.B || !(root.B < one) || root.p < instance.probability) {
      return false;
    }
  } else {
    const bool above = instance.budget < root.B;
    const bool saturated = instance.budget == one && root.B == one;
    if ((!above && !saturated) || instance.probability < root.p) {
      return false;
    }
  }

  for (const VertexId v : vertices) {
    const auto u = static_cast<std::size_t>(v);
    const auto& vx = mdp.vertices[u];
    const Point& pt = certificate.points[u];

    if (mdp.is_sink(v)) {
      const bool constrained =
          player == Objective::Reach ? !mdp.is_target(v) : mdp.is_target(v);
      if (!constrained) {
        continue;
      }
      const bool holds = player == Objective::Reach ? (pt.B == one || pt.p == zero)
                                                    : (pt.B == zero || pt.p == one);
      if (!holds) {
        return false;
      }
      continue;
    }

    if (vx.kind == VertexKind::Control) {
      const auto& chosen = certificate.chosen[u];
      if (!chosen) {
        return false;
      }
      const auto& succ = vx.succ;
      if (std::find(succ.begin(), succ.end(), *chosen) == succ.end()) {
        return false;
      }
      const Rational companion =
          Rational(2) * pt.B - certificate.points[static_cast<std::size_t>(*chosen)].B;
      if (!in_range(companion)) {
        return false;
      }
      for (const VertexId w : succ) {
        const Point& pw = certificate.points[static_cast<std::size_t>(w)];
        if (player == Objective::Reach) {
          if (pw.p < pt.p || companion < pw.B) {
            return false;
          }
        } else {
          if (pt.p < pw.p || pw.B < companion) {
            return false;
          }
        }
      }
      continue;
    }

    // Random vertex: exact expectation and budget domination.
    Rational expectation(0);
    for (std::size_t k = 0; k < vx.succ.size(); ++k) {
      const Point& pw = certificate.points[static_cast<std::size_t>(vx.succ[k])];
      expectation += vx.prob[k] * pw.p;
      if (player == Objective::Reach) {
        if (pt.B < pw.B) {
          return false;
        }
      } else {
        if (pw.B < pt.B) {
          return false;
        }
      }
    }
    if (!(expectation == pt.p)) {
      return false;
    }
  }
  return true;
}

} // namespace bidmdp
