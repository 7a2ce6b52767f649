#include "bidmdp/ssg.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "bidmdp/exact_solver.hpp"

namespace bidmdp {

namespace {

bool valid_name(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
                    c == '\'' || c == '.' || c == '-';
    if (!ok) return false;
  }
  return s != "->";
}

std::vector<std::string> tokenize(std::string_view line) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) tokens.emplace_back(line.substr(i, j - i));
    i = j;
  }
  return tokens;
}

/// Alternation phases: 0 = Player 1, 1 = random, 2 = Player 0, 3 = random.
constexpr int kPhases = 4;

bool kind_admits_phase(SsgKind kind, int phase) {
  switch (kind) {
    case SsgKind::PlayerOne: return phase == 0;
    case SsgKind::Random: return phase == 1 || phase == 3;
    case SsgKind::PlayerZero: return phase == 2;
  }
  return false;
}

SsgKind phase_kind(int phase) {
  switch (phase) {
    case 0: return SsgKind::PlayerOne;
    case 2: return SsgKind::PlayerZero;
    default: return SsgKind::Random;
  }
}

std::size_t total_corners(const ValueMap& map) {
  std::size_t total = 0;
  for (const StaircaseSet& set : map.sets) total += set.corner_count();
  return total;
}

} // namespace

std::string to_string(SsgKind kind) {
  switch (kind) {
    case SsgKind::PlayerZero: return "p0";
    case SsgKind::PlayerOne: return "p1";
    case SsgKind::Random: return "random";
  }
  return "random";
}

bool Ssg::Vertex::operator==(const Vertex& o) const {
  return name == o.name && kind == o.kind && succ == o.succ && prob == o.prob;
}

bool Ssg::operator==(const Ssg& o) const {
  return vertices == o.vertices && target == o.target && initial == o.initial;
}

std::optional<VertexId> Ssg::find(std::string_view name) const {
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    if (vertices[i].name == name) return static_cast<VertexId>(i);
  }
  return std::nullopt;
}

bool Ssg::is_sink(VertexId v) const {
  const auto& succ = vertices.at(static_cast<std::size_t>(v)).succ;
  return succ.size() == 1 && succ[0] == v;
}

Ssg parse_ssg(std::istream& in) {
  struct PendingVertex {
    std::string name;
    SsgKind kind = SsgKind::Random;
    std::vector<std::string> succ_names;
    std::vector<Rational> probs;
    int line = 0;
  };
  std::vector<PendingVertex> pending;
  std::map<std::string, VertexId> declared;
  std::vector<std::pair<std::string, int>> target_names;
  std::optional<std::pair<std::string, int>> init_name;

  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (const std::size_t hash = raw.find('#'); hash != std::string::npos) {
      raw.erase(hash);
    }
    const std::vector<std::string> tokens = tokenize(raw);
    if (tokens.empty()) continue;
    const std::string& keyword = tokens[0];

    if (keyword == "p0" || keyword == "p1" || keyword == "random") {
      if (tokens.size() < 4 || tokens[2] != "->") {
        throw ParseError(line_no, "expected '" + keyword + " NAME -> SUCCESSORS'");
      }
      const std::string& name = tokens[1];
      if (!valid_name(name)) {
        throw ParseError(line_no, "invalid vertex name '" + name + "'");
      }
      if (declared.count(name)) {
        throw ParseError(line_no, "duplicate declaration of vertex '" + name + "'");
      }
      PendingVertex v;
      v.name = name;
      v.kind = keyword == "p0"   ? SsgKind::PlayerZero
               : keyword == "p1" ? SsgKind::PlayerOne
                                 : SsgKind::Random;
      v.line = line_no;
      for (std::size_t t = 3; t < tokens.size(); ++t) {
        const std::string& tok = tokens[t];
        if (v.kind != SsgKind::Random) {
          if (!valid_name(tok)) {
            throw ParseError(line_no, "invalid successor name '" + tok + "'");
          }
          v.succ_names.push_back(tok);
        } else {
          const std::size_t colon = tok.rfind(':');
          if (colon == std::string::npos) {
            throw ParseError(line_no,
                             "random successor '" + tok + "' must have the form NAME:PROB");
          }
          const std::string succ = tok.substr(0, colon);
          const std::string prob_text = tok.substr(colon + 1);
          if (!valid_name(succ)) {
            throw ParseError(line_no, "invalid successor name '" + succ + "'");
          }
          const auto prob = Rational::parse(prob_text);
          if (!prob) {
            throw ParseError(line_no, "malformed probability '" + prob_text + "'");
          }
          v.succ_names.push_back(succ);
          v.probs.push_back(*prob);
        }
      }
      for (std::size_t a = 0; a < v.succ_names.size(); ++a) {
        for (std::size_t b = a + 1; b < v.succ_names.size(); ++b) {
          if (v.succ_names[a] == v.succ_names[b]) {
            throw ParseError(line_no, "duplicate successor '" + v.succ_names[a] + "'");
          }
        }
      }
      declared.emplace(name, static_cast<VertexId>(pending.size()));
      pending.push_back(std::move(v));
    } else if (keyword == "target") {
      if (tokens.size() < 2) throw ParseError(line_no, "expected 'target NAME'");
      for (std::size_t t = 1; t < tokens.size(); ++t) {
        target_names.emplace_back(tokens[t], line_no);
      }
    } else if (keyword == "init") {
      if (tokens.size() != 2) throw ParseError(line_no, "expected 'init NAME'");
      if (init_name) throw ParseError(line_no, "duplicate init declaration");
      init_name = {tokens[1], line_no};
    } else {
      throw ParseError(line_no, "unknown keyword '" + keyword + "'");
    }
  }

  Ssg ssg;
  ssg.vertices.reserve(pending.size());
  for (const PendingVertex& v : pending) {
    Ssg::Vertex out;
    out.name = v.name;
    out.kind = v.kind;
    out.prob = v.probs;
    for (const std::string& succ : v.succ_names) {
      const auto it = declared.find(succ);
      if (it == declared.end()) {
        throw ParseError(v.line, "undeclared successor '" + succ + "'");
      }
      out.succ.push_back(it->second);
    }
    ssg.vertices.push_back(std::move(out));
  }
  ssg.target.assign(ssg.vertices.size(), false);
  for (const auto& [name, line] : target_names) {
    const auto it = declared.find(name);
    if (it == declared.end()) {
      throw ParseError(line, "undeclared target '" + name + "'");
    }
    ssg.target[static_cast<std::size_t>(it->second)] = true;
  }
  if (init_name) {
    const auto it = declared.find(init_name->first);
    if (it == declared.end()) {
      throw ParseError(init_name->second, "undeclared init vertex '" + init_name->first + "'");
    }
    ssg.initial = it->second;
  }

  ssg = normalize_sinks(std::move(ssg));
  if (const auto violations = validate_ssg(ssg); !violations.empty()) {
    std::string message = "invalid game:";
    for (const std::string& v : violations) message += "\n  " + v;
    throw ParseError(0, message);
  }
  return ssg;
}

Ssg parse_ssg_string(const std::string& text) {
  std::istringstream in(text);
  return parse_ssg(in);
}

Ssg parse_ssg_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open '" + path + "'");
  }
  return parse_ssg(in);
}

std::string serialize(const Ssg& ssg) {
  std::ostringstream out;
  for (const auto& v : ssg.vertices) {
    out << to_string(v.kind) << ' ' << v.name << " ->";
    for (std::size_t k = 0; k < v.succ.size(); ++k) {
      out << ' ' << ssg.name(v.succ[k]);
      if (v.kind == SsgKind::Random) out << ':' << v.prob[k].str();
    }
    out << '\n';
  }
  for (std::size_t i = 0; i < ssg.target.size(); ++i) {
    if (ssg.target[i]) out << "target " << ssg.vertices[i].name << '\n';
  }
  if (ssg.initial) out << "init " << ssg.name(*ssg.initial) << '\n';
  return out.str();
}

Ssg normalize_sinks(Ssg ssg) {
  for (std::size_t i = 0; i < ssg.vertices.size(); ++i) {
    auto& v = ssg.vertices[i];
    const bool target = i < ssg.target.size() && ssg.target[i];
    const bool self_loop_only =
        v.succ.size() == 1 && v.succ[0] == static_cast<VertexId>(i);
    if (!target && !self_loop_only) continue;
    v.kind = SsgKind::Random;
    v.succ.assign(1, static_cast<VertexId>(i));
    v.prob.assign(1, Rational(1));
  }
  return ssg;
}

std::vector<std::string> validate_ssg(const Ssg& ssg) {
  std::vector<std::string> violations;
  const Rational one(1);
  for (std::size_t i = 0; i < ssg.vertices.size(); ++i) {
    const auto& v = ssg.vertices[i];
    if (v.succ.empty()) {
      violations.push_back("vertex '" + v.name + "' has no successors");
      continue;
    }
    for (VertexId s : v.succ) {
      if (s < 0 || static_cast<std::size_t>(s) >= ssg.vertices.size()) {
        violations.push_back("vertex '" + v.name + "' has an out-of-range successor id");
      }
    }
    if (v.kind == SsgKind::Random) {
      if (v.prob.size() != v.succ.size()) {
        violations.push_back("vertex '" + v.name + "' has a distribution/successor mismatch");
        continue;
      }
      Rational sum;
      bool positive = true;
      for (const Rational& p : v.prob) {
        if (p.sign() <= 0) positive = false;
        sum += p;
      }
      if (!positive) {
        violations.push_back("distribution at vertex '" + v.name +
                             "' has a non-positive probability");
      }
      if (sum != one) {
        violations.push_back("distribution at vertex '" + v.name + "' sums to " + sum.str());
      }
    } else if (!v.prob.empty()) {
      violations.push_back("player vertex '" + v.name + "' carries probabilities");
    }
  }
  if (ssg.target.size() != ssg.vertices.size()) {
    violations.push_back("target table size differs from vertex count");
  }
  if (ssg.initial && (*ssg.initial < 0 ||
                      static_cast<std::size_t>(*ssg.initial) >= ssg.vertices.size())) {
    violations.push_back("init vertex id out of range");
  }
  return violations;
}

std::vector<std::string> validate_alternation(const Ssg& ssg) {
  std::vector<std::string> violations;
  if (!ssg.initial) {
    violations.push_back("the alternation discipline needs an initial vertex");
    return violations;
  }
  const VertexId init = *ssg.initial;
  if (ssg.is_sink(init)) {
    return violations; // the play never leaves the initial vertex
  }
  if (ssg.vertices[static_cast<std::size_t>(init)].kind != SsgKind::PlayerOne) {
    violations.push_back("initial vertex '" + ssg.name(init) + "' is not owned by Player 1");
    return violations;
  }

  std::vector<int> phase(ssg.size(), -1);
  phase[static_cast<std::size_t>(init)] = 0;
  std::queue<VertexId> frontier;
  frontier.push(init);
  while (!frontier.empty()) {
    const VertexId u = frontier.front();
    frontier.pop();
    const int a = phase[static_cast<std::size_t>(u)];
    for (const VertexId w : ssg.vertices[static_cast<std::size_t>(u)].succ) {
      if (ssg.is_sink(w)) continue;
      const int entry = (a + 1) % kPhases;
      const auto& wx = ssg.vertices[static_cast<std::size_t>(w)];
      if (!kind_admits_phase(wx.kind, entry)) {
        violations.push_back("edge '" + ssg.name(u) + "' -> '" + wx.name +
                             "' breaks the Player-1, random, Player-0, random order");
        continue;
      }
      int& assigned = phase[static_cast<std::size_t>(w)];
      if (assigned == -1) {
        assigned = entry;
        frontier.push(w);
      } else if (assigned != entry) {
        violations.push_back("vertex '" + wx.name + "' is entered at inconsistent phases");
      }
    }
  }
  return violations;
}

Ssg enforce_alternation(Ssg raw) {
  raw = normalize_sinks(std::move(raw));
  if (const auto violations = validate_ssg(raw); !violations.empty()) {
    std::string message = "enforce_alternation: structurally invalid game:";
    for (const std::string& v : violations) message += "\n  " + v;
    throw std::invalid_argument(message);
  }
  if (!raw.initial) {
    throw std::invalid_argument("enforce_alternation: the game needs an initial vertex");
  }

  std::set<std::string> taken;
  for (const auto& v : raw.vertices) taken.insert(v.name);
  const auto fresh_name = [&taken](std::string base) {
    while (taken.count(base)) base += '\'';
    taken.insert(base);
    return base;
  };
  const auto add_dummy = [&raw, &fresh_name](int phase, const std::string& base) {
    Ssg::Vertex dummy;
    dummy.name = fresh_name(base);
    dummy.kind = phase_kind(phase);
    if (dummy.kind == SsgKind::Random) dummy.prob.assign(1, Rational(1));
    raw.vertices.push_back(std::move(dummy));
    raw.target.push_back(false);
    return static_cast<VertexId>(raw.vertices.size() - 1);
  };
  /// Chain of `length` pass-through dummies with phases entry_phase,
  /// entry_phase+1, ...; returns the head; the tail points at `w`.
  const auto add_chain = [&](int entry_phase, int length, VertexId w,
                             const std::string& base) {
    VertexId head = w;
    for (int k = length - 1; k >= 0; --k) {
      const VertexId d =
          add_dummy((entry_phase + k) % kPhases, base + "-pad" + std::to_string(k));
      raw.vertices[static_cast<std::size_t>(d)].succ.assign(1, head);
      head = d;
    }
    return head;
  };

  std::vector<int> phase(raw.size(), -1);
  std::queue<VertexId> frontier;

  // Anchor the initial vertex at phase 0, prepending an entry chain when
  // it is not a Player-1 vertex.
  const VertexId old_init = *raw.initial;
  if (!raw.is_sink(old_init)) {
    const SsgKind init_kind = raw.vertices[static_cast<std::size_t>(old_init)].kind;
    int init_phase = 0;
    if (init_kind == SsgKind::Random) init_phase = 1;
    if (init_kind == SsgKind::PlayerZero) init_phase = 2;
    if (init_phase != 0) {
      const VertexId head =
          add_chain(0, init_phase, old_init, raw.name(old_init) + "-entry");
      raw.initial = head;
    }
    phase.resize(raw.size(), -1);
    phase[static_cast<std::size_t>(old_init)] = init_phase;
    frontier.push(old_init);
  }

  while (!frontier.empty()) {
    const VertexId u = frontier.front();
    frontier.pop();
    const int a = phase[static_cast<std::size_t>(u)];
    // add_chain may reallocate the vertex table, so index fresh each time.
    const std::size_t degree = raw.vertices[static_cast<std::size_t>(u)].succ.size();
    for (std::size_t k = 0; k < degree; ++k) {
      const VertexId w = raw.vertices[static_cast<std::size_t>(u)].succ[k];
      if (raw.is_sink(w)) continue;
      const SsgKind w_kind = raw.vertices[static_cast<std::size_t>(w)].kind;
      const int entry = (a + 1) % kPhases;
      int b = phase[static_cast<std::size_t>(w)];
      if (b == -1) {
        // First visit: give w the admissible phase needing the shortest pad.
        int best_gap = kPhases;
        for (int cand = 0; cand < kPhases; ++cand) {
          if (!kind_admits_phase(w_kind, cand)) continue;
          const int gap = ((cand - entry) % kPhases + kPhases) % kPhases;
          if (gap < best_gap) {
            best_gap = gap;
            b = cand;
          }
        }
        phase[static_cast<std::size_t>(w)] = b;
        frontier.push(w);
      }
      const int gap = ((b - entry) % kPhases + kPhases) % kPhases;
      if (gap > 0) {
        const VertexId head = add_chain(entry, gap, w, raw.name(u) + "-" + raw.name(w));
        raw.vertices[static_cast<std::size_t>(u)].succ[k] = head;
      }
    }
  }
  return raw;
}

Mdp reduce(const Ssg& input) {
  Ssg ssg = normalize_sinks(input);
  if (const auto violations = validate_ssg(ssg); !violations.empty()) {
    std::string message = "reduce: structurally invalid game:";
    for (const std::string& v : violations) message += "\n  " + v;
    throw std::invalid_argument(message);
  }
  if (const auto violations = validate_alternation(ssg); !violations.empty()) {
    std::string message = "reduce: the game is not alternation-normal:";
    for (const std::string& v : violations) message += "\n  " + v;
    throw std::invalid_argument(message);
  }

  std::set<std::string> taken;
  for (const auto& v : ssg.vertices) taken.insert(v.name);
  const auto fresh_name = [&taken](std::string base) {
    while (taken.count(base)) base += '\'';
    taken.insert(base);
    return base;
  };

  Mdp arena;
  arena.vertices.reserve(ssg.size());
  for (const auto& v : ssg.vertices) {
    Mdp::Vertex out;
    out.name = v.name;
    out.kind = v.kind == SsgKind::Random ? VertexKind::Random : VertexKind::Control;
    out.succ = v.succ;
    out.prob = v.prob;
    arena.vertices.push_back(std::move(out));
  }
  arena.target = ssg.target;
  arena.initial = ssg.initial;

  // Ownership is erased by the escape edges: Player 0 may always give up
  // into a fresh losing sink, Player 1 into a fresh winning sink.
  const std::size_t original = ssg.size();
  for (std::size_t i = 0; i < original; ++i) {
    const SsgKind kind = ssg.vertices[i].kind;
    if (kind == SsgKind::Random) continue;
    Mdp::Vertex sink;
    sink.name = fresh_name(ssg.vertices[i].name + "'");
    sink.kind = VertexKind::Random;
    const VertexId id = static_cast<VertexId>(arena.vertices.size());
    sink.succ.assign(1, id);
    sink.prob.assign(1, Rational(1));
    arena.vertices.push_back(std::move(sink));
    arena.target.push_back(kind == SsgKind::PlayerOne);
    arena.vertices[i].succ.push_back(id);
  }

  arena = normalize_targets(std::move(arena));
  if (const auto violations = validate(arena); !violations.empty()) {
    std::string message = "reduce: produced an invalid arena:"; // internal error
    for (const std::string& v : violations) message += "\n  " + v;
    throw std::logic_error(message);
  }
  return arena;
}

SsgValueBracket ssg_value_via_bidding(const Ssg& ssg, const Rational& precision,
                                      const SsgValueOptions& options) {
  if (precision.sign() <= 0) {
    throw std::invalid_argument("ssg_value_via_bidding: precision must be positive");
  }
  const Mdp arena = reduce(ssg);
  if (!arena.initial) {
    throw std::invalid_argument("ssg_value_via_bidding: the game needs an initial vertex");
  }
  const VertexId v = *arena.initial;
  const Rational budget(1, 3);

  SsgValueBracket out;
  out.lo = Rational(0);
  out.hi = Rational(1);

  // First pass: drive the safety maps toward their limit.  They shrink
  // monotonically, so stabilization identifies the limit exactly and the
  // final map's section is a certified lower bound either way.
  ValueMap current = initial_safe(arena);
  for (long i = 1; i <= options.max_iterations; ++i) {
    ValueMap next = step(current, arena);
    out.iterations_used = i;
    if (equal_sets(next, current)) {
      const auto least = next.sets[static_cast<std::size_t>(v)].min_p_at(budget);
      out.lo = out.hi = least ? *least : Rational(1);
      out.exact = true;
      return out;
    }
    current = std::move(next);
    if (total_corners(current) > options.corner_cap) {
      out.exhausted = true;
      break;
    }
  }
  if (const auto least = current.sets[static_cast<std::size_t>(v)].min_p_at(budget)) {
    out.lo = max(out.lo, *least);
  }

  // Second pass: bisect over p with full threshold queries; every decided
  // query moves one end of the bracket soundly.
  ExactOptions query;
  query.max_iterations = options.max_iterations;
  query.corner_cap = options.corner_cap;
  for (long b = 0; b < options.bisection_cap && precision < out.hi - out.lo; ++b) {
    const Rational mid = Rational::average(out.lo, out.hi);
    ProblemInstance instance{arena, v, budget, mid};
    const Decision decision = alg_exact(instance, query);
    out.iterations_used += decision.iterations_used;
    if (decision.outcome == Outcome::ReachWins) {
      out.lo = mid;
    } else if (decision.outcome == Outcome::SafetyWins) {
      out.hi = mid;
    } else {
      out.exhausted = true;
      break;
    }
  }
  return out;
}

SsgValueBounds brute_force_ssg_value(const Ssg& input, long iterations) {
  const Ssg ssg = normalize_sinks(input);
  if (const auto violations = validate_ssg(ssg); !violations.empty()) {
    std::string message = "brute_force_ssg_value: structurally invalid game:";
    for (const std::string& v : violations) message += "\n  " + v;
    throw std::invalid_argument(message);
  }
  if (!ssg.initial) {
    throw std::invalid_argument("brute_force_ssg_value: the game needs an initial vertex");
  }

  // Vertices with no path to a target have value zero; pinning them lets
  // the all-one start descend past cycles Player 1 would spin forever.
  std::vector<bool> can_reach(ssg.size(), false);
  {
    std::vector<std::vector<VertexId>> preds(ssg.size());
    for (std::size_t u = 0; u < ssg.size(); ++u) {
      for (const VertexId w : ssg.vertices[u].succ) {
        preds[static_cast<std::size_t>(w)].push_back(static_cast<VertexId>(u));
      }
    }
    std::queue<VertexId> frontier;
    for (std::size_t u = 0; u < ssg.size(); ++u) {
      if (ssg.target[u]) {
        can_reach[u] = true;
        frontier.push(static_cast<VertexId>(u));
      }
    }
    while (!frontier.empty()) {
      const VertexId w = frontier.front();
      frontier.pop();
      for (const VertexId u : preds[static_cast<std::size_t>(w)]) {
        if (!can_reach[static_cast<std::size_t>(u)]) {
          can_reach[static_cast<std::size_t>(u)] = true;
          frontier.push(u);
        }
      }
    }
  }

  const auto sweep = [&ssg](const std::vector<Rational>& x) {
    std::vector<Rational> next(x.size());
    for (std::size_t u = 0; u < ssg.size(); ++u) {
      if (ssg.target[u]) {
        next[u] = Rational(1);
        continue;
      }
      const auto& vx = ssg.vertices[u];
      switch (vx.kind) {
        case SsgKind::PlayerZero: {
          Rational best = x[static_cast<std::size_t>(vx.succ[0])];
          for (const VertexId w : vx.succ) best = max(best, x[static_cast<std::size_t>(w)]);
          next[u] = best;
          break;
        }
        case SsgKind::PlayerOne: {
          Rational worst = x[static_cast<std::size_t>(vx.succ[0])];
          for (const VertexId w : vx.succ) worst = min(worst, x[static_cast<std::size_t>(w)]);
          next[u] = worst;
          break;
        }
        case SsgKind::Random: {
          Rational sum;
          for (std::size_t k = 0; k < vx.succ.size(); ++k) {
            sum += vx.prob[k] * x[static_cast<std::size_t>(vx.succ[k])];
          }
          next[u] = sum;
          break;
        }
      }
    }
    return next;
  };

  std::vector<Rational> rising(ssg.size(), Rational(0));
  std::vector<Rational> falling(ssg.size(), Rational(1));
  for (std::size_t u = 0; u < ssg.size(); ++u) {
    if (ssg.target[u]) {
      rising[u] = Rational(1);
    } else if (!can_reach[u]) {
      falling[u] = Rational(0);
    }
  }
  for (long it = 0; it < iterations; ++it) {
    rising = sweep(rising);
    falling = sweep(falling);
  }
  const std::size_t init = static_cast<std::size_t>(*ssg.initial);
  return {rising[init], falling[init]};
}

} // namespace bidmdp
