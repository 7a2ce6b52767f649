#include "bidmdp/mdp.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <queue>
#include <set>
#include <sstream>
#include <utility>

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
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) {
      ++i;
    }
    size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) {
      ++j;
    }
    if (j > i) tokens.emplace_back(line.substr(i, j - i));
    i = j;
  }
  return tokens;
}

}  // namespace

bool Mdp::Vertex::operator==(const Vertex& o) const {
  return name == o.name && kind == o.kind && succ == o.succ && prob == o.prob;
}

bool Mdp::operator==(const Mdp& o) const {
  return vertices == o.vertices && target == o.target && initial == o.initial;
}

std::optional<VertexId> Mdp::find(std::string_view name) const {
  for (size_t i = 0; i < vertices.size(); ++i) {
    if (vertices[i].name == name) return static_cast<VertexId>(i);
  }
  return std::nullopt;
}

bool Mdp::is_sink(VertexId v) const {
  const auto& succ = vertices.at(v).succ;
  return succ.size() == 1 && succ[0] == v;
}

std::vector<VertexId> Mdp::targets() const {
  std::vector<VertexId> out;
  for (size_t i = 0; i < target.size(); ++i) {
    if (target[i]) out.push_back(static_cast<VertexId>(i));
  }
  return out;
}

Mdp parse_mdp(std::istream& in) {
  struct PendingVertex {
    std::string name;
    VertexKind kind;
    std::vector<std::string> succ_names;
    std::vector<Rational> probs;
    int line;
  };
  std::vector<PendingVertex> pending;
  std::map<std::string, int, std::less<>> declared;  // name -> pending index
  std::vector<std::pair<std::string, int>> target_names;
  std::optional<std::pair<std::string, int>> init_name;

  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (const size_t hash = raw.find('#'); hash != std::string::npos) {
      raw.erase(hash);
    }
    const std::vector<std::string> tokens = tokenize(raw);
    if (tokens.empty()) continue;
    const std::string& keyword = tokens[0];

    if (keyword == "control" || keyword == "random") {
      if (tokens.size() < 4 || tokens[2] != "->") {
        throw ParseError(line_no,
                         "expected '" + keyword + " NAME -> SUCCESSORS'");
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
      v.kind = keyword == "control" ? VertexKind::Control : VertexKind::Random;
      v.line = line_no;
      for (size_t t = 3; t < tokens.size(); ++t) {
        const std::string& tok = tokens[t];
        if (v.kind == VertexKind::Control) {
          if (!valid_name(tok)) {
            throw ParseError(line_no, "invalid successor name '" + tok + "'");
          }
          v.succ_names.push_back(tok);
        } else {
          const size_t colon = tok.rfind(':');
          if (colon == std::string::npos) {
            throw ParseError(line_no, "random successor '" + tok +
                                          "' must have the form NAME:PROB");
          }
          const std::string succ = tok.substr(0, colon);
          const std::string prob_text = tok.substr(colon + 1);
          if (!valid_name(succ)) {
            throw ParseError(line_no, "invalid successor name '" + succ + "'");
          }
          const auto prob = Rational::parse(prob_text);
          if (!prob) {
            throw ParseError(line_no,
                             "malformed probability '" + prob_text + "'");
          }
          v.succ_names.push_back(succ);
          v.probs.push_back(*prob);
        }
      }
      for (size_t a = 0; a < v.succ_names.size(); ++a) {
        for (size_t b = a + 1; b < v.succ_names.size(); ++b) {
          if (v.succ_names[a] == v.succ_names[b]) {
            throw ParseError(line_no,
                             "duplicate successor '" + v.succ_names[a] + "'");
          }
        }
      }
      declared.emplace(name, static_cast<int>(pending.size()));
      pending.push_back(std::move(v));
    } else if (keyword == "target") {
      if (tokens.size() < 2) throw ParseError(line_no, "expected 'target NAME'");
      for (size_t t = 1; t < tokens.size(); ++t) {
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

  Mdp mdp;
  mdp.vertices.reserve(pending.size());
  for (const PendingVertex& v : pending) {
    Mdp::Vertex out;
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
    mdp.vertices.push_back(std::move(out));
  }
  mdp.target.assign(mdp.vertices.size(), false);
  for (const auto& [name, line] : target_names) {
    const auto it = declared.find(name);
    if (it == declared.end()) {
      throw ParseError(line, "undeclared target '" + name + "'");
    }
    mdp.target[it->second] = true;
  }
  if (init_name) {
    const auto it = declared.find(init_name->first);
    if (it == declared.end()) {
      throw ParseError(init_name->second,
                       "undeclared init vertex '" + init_name->first + "'");
    }
    mdp.initial = it->second;
  }

  mdp = normalize_targets(std::move(mdp));
  if (const auto violations = validate(mdp); !violations.empty()) {
    std::string message = "invalid arena:";
    for (const std::string& v : violations) message += "\n  " + v;
    throw std::invalid_argument(message);
  }
  return mdp;
}

Mdp parse_mdp_string(const std::string& text) {
  std::istringstream in(text);
  return parse_mdp(in);
}

Mdp parse_mdp_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open arena file '" + path + "'");
  return parse_mdp(in);
}

std::vector<std::string> validate(const Mdp& mdp) {
  std::vector<std::string> violations;
  const Rational one(1);
  for (size_t i = 0; i < mdp.vertices.size(); ++i) {
    const auto& v = mdp.vertices[i];
    if (v.succ.empty()) {
      violations.push_back("vertex '" + v.name + "' has no successors");
      continue;
    }
    for (VertexId s : v.succ) {
      if (s < 0 || static_cast<size_t>(s) >= mdp.vertices.size()) {
        violations.push_back("vertex '" + v.name +
                             "' has an out-of-range successor id");
      }
    }
    if (v.kind == VertexKind::Random) {
      if (v.prob.size() != v.succ.size()) {
        violations.push_back("vertex '" + v.name +
                             "' has a distribution/successor mismatch");
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
        violations.push_back("distribution at vertex '" + v.name +
                             "' sums to " + sum.str());
      }
    } else if (!v.prob.empty()) {
      violations.push_back("control vertex '" + v.name +
                           "' carries probabilities");
    }
  }
  for (size_t i = 0; i < mdp.target.size() && i < mdp.vertices.size(); ++i) {
    if (mdp.target[i] && !mdp.is_sink(static_cast<VertexId>(i))) {
      violations.push_back("target '" + mdp.vertices[i].name +
                           "' is not a sink");
    }
  }
  if (mdp.target.size() != mdp.vertices.size()) {
    violations.push_back("target table size differs from vertex count");
  }
  if (mdp.initial &&
      (*mdp.initial < 0 ||
       static_cast<size_t>(*mdp.initial) >= mdp.vertices.size())) {
    violations.push_back("init vertex id out of range");
  }
  return violations;
}

Mdp normalize_targets(Mdp mdp) {
  for (size_t i = 0; i < mdp.vertices.size() && i < mdp.target.size(); ++i) {
    if (!mdp.target[i]) continue;
    auto& v = mdp.vertices[i];
    v.succ.assign(1, static_cast<VertexId>(i));
    if (v.kind == VertexKind::Random) {
      v.prob.assign(1, Rational(1));
    } else {
      v.prob.clear();
    }
  }
  return mdp;
}

Rational min_probability(const Mdp& mdp) {
  std::optional<Rational> least;
  for (const auto& v : mdp.vertices) {
    if (v.kind != VertexKind::Random) continue;
    for (const Rational& p : v.prob) {
      if (!least || p < *least) least = p;
    }
  }
  // No randomness at all, or point masses only: 1/2 by convention.
  if (!least || *least == Rational(1)) return Rational(1, 2);
  return *least;
}

namespace {

/// Successors with sink self-loops dropped.
std::vector<std::vector<VertexId>> loopless_successors(const Mdp& mdp) {
  std::vector<std::vector<VertexId>> out(mdp.size());
  for (size_t i = 0; i < mdp.size(); ++i) {
    for (VertexId s : mdp.vertices[i].succ) {
      if (s != static_cast<VertexId>(i)) out[i].push_back(s);
    }
  }
  return out;
}

}  // namespace

std::vector<VertexId> topological_order(const Mdp& mdp) {
  const auto succ = loopless_successors(mdp);
  std::vector<int> indegree(mdp.size(), 0);
  for (const auto& list : succ) {
    for (VertexId s : list) ++indegree[s];
  }
  // Kahn's algorithm with smallest-id selection for determinism.
  std::set<VertexId> ready;
  for (size_t i = 0; i < mdp.size(); ++i) {
    if (indegree[i] == 0) ready.insert(static_cast<VertexId>(i));
  }
  std::vector<VertexId> forward;
  forward.reserve(mdp.size());
  while (!ready.empty()) {
    const VertexId v = *ready.begin();
    ready.erase(ready.begin());
    forward.push_back(v);
    for (VertexId s : succ[v]) {
      if (--indegree[s] == 0) ready.insert(s);
    }
  }
  if (forward.size() != mdp.size()) {
    throw std::invalid_argument("graph is cyclic");
  }
  std::reverse(forward.begin(), forward.end());
  return forward;
}

StructureClass classify(const Mdp& mdp) {
  try {
    topological_order(mdp);
  } catch (const std::invalid_argument&) {
    return StructureClass::General;
  }
  const auto succ = loopless_successors(mdp);
  std::vector<int> indegree(mdp.size(), 0);
  for (const auto& list : succ) {
    for (VertexId s : list) ++indegree[s];
  }
  int roots = 0;
  bool tree = true;
  for (size_t i = 0; i < mdp.size(); ++i) {
    if (indegree[i] == 0) {
      ++roots;
    } else if (indegree[i] != 1) {
      tree = false;
    }
  }
  if (tree && roots == 1) return StructureClass::Tree;
  return StructureClass::Acyclic;
}

std::string serialize(const Mdp& mdp) {
  std::ostringstream out;
  for (const auto& v : mdp.vertices) {
    out << (v.kind == VertexKind::Control ? "control " : "random ") << v.name
        << " ->";
    for (size_t s = 0; s < v.succ.size(); ++s) {
      out << ' ' << mdp.vertices[v.succ[s]].name;
      if (v.kind == VertexKind::Random) out << ':' << v.prob[s].str();
    }
    out << '\n';
  }
  for (VertexId t : mdp.targets()) out << "target " << mdp.name(t) << '\n';
  if (mdp.initial) out << "init " << mdp.name(*mdp.initial) << '\n';
  return out.str();
}

void validate_instance(const ProblemInstance& instance) {
  if (instance.vertex < 0 ||
      static_cast<size_t>(instance.vertex) >= instance.mdp.size()) {
    throw std::invalid_argument("query vertex out of range");
  }
  const Rational zero(0), one(1);
  if (instance.budget < zero || instance.budget > one) {
    throw std::invalid_argument("budget must lie in [0,1]");
  }
  if (instance.probability < zero || instance.probability > one) {
    throw std::invalid_argument("probability must lie in [0,1]");
  }
}

}  // namespace bidmdp
