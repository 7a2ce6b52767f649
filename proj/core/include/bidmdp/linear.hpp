#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "bidmdp/rational.hpp"

namespace bidmdp {

/// Conjunction of exact rational linear constraints over indexed
/// variables.  Supports equalities and (possibly strict) inequalities.
class LinearSystem {
 public:
  enum class Relation { Eq, Le, Lt };

  struct Constraint {
    std::vector<Rational> coeffs; ///< dense, one entry per variable
    Relation relation = Relation::Le;
    Rational rhs;
  };

  explicit LinearSystem(std::size_t variables) : num_vars_(variables) {}

  std::size_t variables() const { return num_vars_; }
  const std::vector<Constraint>& constraints() const { return constraints_; }

  using Terms = std::vector<std::pair<std::size_t, Rational>>;

  /// sum(terms) == rhs
  void add_eq(const Terms& terms, const Rational& rhs) { add(terms, Relation::Eq, rhs); }
  /// sum(terms) <= rhs
  void add_le(const Terms& terms, const Rational& rhs) { add(terms, Relation::Le, rhs); }
  /// sum(terms) < rhs
  void add_lt(const Terms& terms, const Rational& rhs) { add(terms, Relation::Lt, rhs); }
  /// lo <= x_var <= hi
  void add_range(std::size_t var, const Rational& lo, const Rational& hi);

  void add(const Terms& terms, Relation relation, const Rational& rhs);

 private:
  std::size_t num_vars_ = 0;
  std::vector<Constraint> constraints_;
};

/// Exact satisfiability by equality elimination followed by
/// Fourier-Motzkin projection; no floating point anywhere.  Returns a
/// satisfying assignment (indexed by variable) or nullopt if the system
/// is infeasible.
std::optional<std::vector<Rational>> linear_feasibility(const LinearSystem& system);

} // namespace bidmdp
