#include "bidmdp/linear.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace bidmdp {

void LinearSystem::add(const Terms& terms, Relation relation, const Rational& rhs) {
  Constraint c;
  c.coeffs.assign(num_vars_, Rational(0));
  for (const auto& [var, coeff] : terms) {
    if (var >= num_vars_) {
      throw std::out_of_range("LinearSystem: variable index out of range");
    }
    c.coeffs[var] += coeff;
  }
  c.relation = relation;
  c.rhs = rhs;
  constraints_.push_back(std::move(c));
}

void LinearSystem::add_range(std::size_t var, const Rational& lo, const Rational& hi) {
  add_le({{var, Rational(-1)}}, -lo); // -x <= -lo  <=>  x >= lo
  add_le({{var, Rational(1)}}, hi);
}

namespace {

using Relation = LinearSystem::Relation;

struct Row {
  std::vector<Rational> coeffs;
  bool strict = false; ///< meaningful for inequalities only
  Relation relation = Relation::Le;
  Rational rhs;
};

/// Lexicographic order so duplicate inequalities can be pruned.
struct RowLess {
  bool operator()(const Row& a, const Row& b) const {
    if (a.strict != b.strict) {
      return a.strict < b.strict;
    }
    for (std::size_t i = 0; i < a.coeffs.size(); ++i) {
      if (a.coeffs[i] < b.coeffs[i]) return true;
      if (b.coeffs[i] < a.coeffs[i]) return false;
    }
    return a.rhs < b.rhs;
  }
};

bool all_zero(const std::vector<Rational>& coeffs) {
  return std::all_of(coeffs.begin(), coeffs.end(),
                     [](const Rational& c) { return c == Rational(0); });
}

/// Constant constraint "0 (rel) rhs": true iff satisfied.
bool constant_holds(const Row& row) {
  if (row.relation == Relation::Eq) {
    return row.rhs == Rational(0);
  }
  return row.strict ? Rational(0) < row.rhs : !(row.rhs < Rational(0));
}

/// Scale so the first nonzero coefficient has absolute value 1
/// (canonical form for duplicate pruning).
void normalize(Row& row) {
  for (const Rational& c : row.coeffs) {
    if (!(c == Rational(0))) {
      const Rational scale = Rational(1) / abs(c);
      for (Rational& x : row.coeffs) {
        x *= scale;
      }
      row.rhs *= scale;
      return;
    }
  }
}

/// One variable elimination recorded for witness back-substitution.
struct Elimination {
  std::size_t var = 0;
  bool by_equality = false;
  /// Equality case: var = (rhs - sum coeffs*x) / pivot.
  Row expression;
  Rational pivot;
  /// Inequality case: the bounding rows at elimination time.
  std::vector<Row> lowers;
  std::vector<Row> uppers;
};

/// rhs - sum_{j != var} coeffs[j] * assignment[j], all of which are set.
Rational residual(const Row& row, std::size_t var, const std::vector<Rational>& assignment) {
  Rational value = row.rhs;
  for (std::size_t j = 0; j < row.coeffs.size(); ++j) {
    if (j != var && !(row.coeffs[j] == Rational(0))) {
      value -= row.coeffs[j] * assignment[j];
    }
  }
  return value;
}

} // namespace

std::optional<std::vector<Rational>> linear_feasibility(const LinearSystem& system) {
  const std::size_t n = system.variables();

  std::vector<Row> rows;
  rows.reserve(system.constraints().size());
  for (const auto& c : system.constraints()) {
    Row row;
    row.coeffs = c.coeffs;
    row.relation = c.relation == Relation::Eq ? Relation::Eq : Relation::Le;
    row.strict = c.relation == Relation::Lt;
    row.rhs = c.rhs;
    rows.push_back(std::move(row));
  }

  std::vector<Elimination> trail;
  std::vector<bool> eliminated(n, false);

  // Phase 1: substitute equalities away, one pivot per equality.
  for (bool progress = true; progress;) {
    progress = false;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].relation != Relation::Eq) {
        continue;
      }
      if (all_zero(rows[r].coeffs)) {
        if (!constant_holds(rows[r])) {
          return std::nullopt;
        }
        rows.erase(rows.begin() + static_cast<std::ptrdiff_t>(r));
        progress = true;
        break;
      }
      std::size_t pivot_var = 0;
      while (rows[r].coeffs[pivot_var] == Rational(0)) {
        ++pivot_var;
      }
      Elimination elim;
      elim.var = pivot_var;
      elim.by_equality = true;
      elim.expression = rows[r];
      elim.pivot = rows[r].coeffs[pivot_var];
      const Row pivot_row = rows[r];
      rows.erase(rows.begin() + static_cast<std::ptrdiff_t>(r));
      for (Row& other : rows) {
        const Rational factor = other.coeffs[pivot_var] / elim.pivot;
        if (factor == Rational(0)) {
          continue;
        }
        for (std::size_t j = 0; j < n; ++j) {
          other.coeffs[j] -= factor * pivot_row.coeffs[j];
        }
        other.rhs -= factor * pivot_row.rhs;
      }
      eliminated[pivot_var] = true;
      trail.push_back(std::move(elim));
      progress = true;
      break;
    }
  }

  // Phase 2: Fourier-Motzkin over the remaining variables.
  for (std::size_t var = 0; var < n; ++var) {
    if (eliminated[var]) {
      continue;
    }
    Elimination elim;
    elim.var = var;

    std::vector<Row> rest;
    for (Row& row : rows) {
      const Rational& a = row.coeffs[var];
      if (a == Rational(0)) {
        rest.push_back(std::move(row));
      } else if (Rational(0) < a) {
        elim.uppers.push_back(std::move(row)); // a x + ... <= rhs bounds x above
      } else {
        elim.lowers.push_back(std::move(row)); // negative coefficient bounds x below
      }
    }

    std::set<Row, RowLess> fresh;
    for (const Row& lo : elim.lowers) {
      for (const Row& up : elim.uppers) {
        // Combine so that var cancels: up/scale_up + lo/(-scale_lo).
        Row merged;
        merged.coeffs.assign(n, Rational(0));
        merged.relation = Relation::Le;
        merged.strict = lo.strict || up.strict;
        const Rational up_scale = Rational(1) / up.coeffs[var];
        const Rational lo_scale = Rational(-1) / lo.coeffs[var];
        for (std::size_t j = 0; j < n; ++j) {
          merged.coeffs[j] = up.coeffs[j] * up_scale + lo.coeffs[j] * lo_scale;
        }
        merged.rhs = up.rhs * up_scale + lo.rhs * lo_scale;
        if (all_zero(merged.coeffs)) {
          if (!constant_holds(merged)) {
            return std::nullopt;
          }
          continue;
        }
        normalize(merged);
        fresh.insert(std::move(merged));
      }
    }

    rows = std::move(rest);
    rows.insert(rows.end(), fresh.begin(), fresh.end());
    eliminated[var] = true;
    trail.push_back(std::move(elim));
  }

  // Whatever survives has no variables left.
  for (const Row& row : rows) {
    if (!constant_holds(row)) {
      return std::nullopt;
    }
  }

  // Back-substitute in reverse elimination order.
  std::vector<Rational> assignment(n, Rational(0));
  for (auto it = trail.rbegin(); it != trail.rend(); ++it) {
    const Elimination& elim = *it;
    if (elim.by_equality) {
      assignment[elim.var] = residual(elim.expression, elim.var, assignment) / elim.pivot;
      continue;
    }
    std::optional<Rational> lo;
    std::optional<Rational> hi;
    bool lo_strict = false;
    bool hi_strict = false;
    for (const Row& row : elim.lowers) {
      const Rational bound = residual(row, elim.var, assignment) / row.coeffs[elim.var];
      if (!lo || *lo < bound || (*lo == bound && row.strict)) {
        if (!lo || *lo < bound) {
          lo = bound;
          lo_strict = row.strict;
        } else {
          lo_strict = true;
        }
      }
    }
    for (const Row& row : elim.uppers) {
      const Rational bound = residual(row, elim.var, assignment) / row.coeffs[elim.var];
      if (!hi || bound < *hi || (*hi == bound && row.strict)) {
        if (!hi || bound < *hi) {
          hi = bound;
          hi_strict = row.strict;
        } else {
          hi_strict = true;
        }
      }
    }
    if (lo && hi) {
      // Feasibility of the projected system guarantees lo <= hi, with
      // strictness only when the interval is non-degenerate.
      assignment[elim.var] = (*lo == *hi) ? *lo : Rational::average(*lo, *hi);
    } else if (lo) {
      assignment[elim.var] = lo_strict ? *lo + Rational(1) : *lo;
    } else if (hi) {
      assignment[elim.var] = hi_strict ? *hi - Rational(1) : *hi;
    } else {
      assignment[elim.var] = Rational(0);
    }
  }

  return assignment;
}

} // namespace bidmdp
