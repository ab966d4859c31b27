#pragma once

#include <optional>

#include "pmv/exact.hpp"

namespace pmv {

/// maximize objective · x subject to
///   leq_rows · x ≤ leq_rhs,  eq_rows · x = eq_rhs,
///   lower ≤ x ≤ upper (componentwise, either side optional).
/// An empty objective means a pure feasibility problem.
struct LinearProgram {
  std::size_t n = 0;
  std::vector<Vec> leq_rows;
  Vec leq_rhs;
  std::vector<Vec> eq_rows;
  Vec eq_rhs;
  Vec objective;
  std::vector<std::optional<Rational>> lower, upper;

  explicit LinearProgram(std::size_t vars = 0)
      : n(vars), lower(vars), upper(vars) {}

  void add_leq(Vec row, Rational rhs);
  void add_eq(Vec row, Rational rhs);
  void set_lower(std::size_t j, Rational v);
  void set_upper(std::size_t j, Rational v);
  /// Sets lower bound 0 for all variables in [from, to).
  void set_nonneg(std::size_t from, std::size_t to);
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  Rational value;  // valid when Optimal
  Vec x;           // valid when Optimal
};

/// Exact two-phase primal simplex with Bland's anti-cycling rule.
LpResult lp_solve(const LinearProgram& p);

enum class IlpStatus { Feasible, Infeasible, Exhausted };

struct IlpResult {
  IlpStatus status = IlpStatus::Infeasible;
  Vec x;           // valid when Feasible
  long nodes = 0;  // LP relaxations solved
};

/// Depth-first branch and bound on the variables flagged in `integral`
/// (every flagged variable must carry finite lower and upper bounds;
/// throws PmvError otherwise). Branches on the variable whose relaxation
/// value has the largest fractional part. Gives up with Exhausted once
/// `node_budget` relaxations have been solved.
IlpResult ilp_feasible(const LinearProgram& p,
                       const std::vector<bool>& integral,
                       long node_budget = 1000000);

}  // namespace pmv
