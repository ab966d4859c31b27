#include "pmv/lp.hpp"

#include <algorithm>

namespace pmv {

void LinearProgram::add_leq(Vec row, Rational rhs) {
  if (row.size() != n) throw PmvError("add_leq: row size mismatch");
  leq_rows.push_back(std::move(row));
  leq_rhs.push_back(std::move(rhs));
}

void LinearProgram::add_eq(Vec row, Rational rhs) {
  if (row.size() != n) throw PmvError("add_eq: row size mismatch");
  eq_rows.push_back(std::move(row));
  eq_rhs.push_back(std::move(rhs));
}

void LinearProgram::set_lower(std::size_t j, Rational v) {
  lower.at(j) = std::move(v);
}

void LinearProgram::set_upper(std::size_t j, Rational v) {
  upper.at(j) = std::move(v);
}

void LinearProgram::set_nonneg(std::size_t from, std::size_t to) {
  for (std::size_t j = from; j < to; ++j) lower.at(j) = Rational(0);
}

namespace {

// Substitution of an original variable into nonnegative simplex variables.
struct VarMap {
  enum class Kind { Shifted, Mirrored, Free } kind;
  std::size_t col = 0;   // primary nonnegative column
  std::size_t col2 = 0;  // negative part for Free
  Rational base;         // x = base + u (Shifted), x = base - u (Mirrored)
};

struct Tableau {
  std::size_t cols = 0;
  std::vector<Vec> a;  // m x cols
  Vec rhs;             // m, kept >= 0
  std::vector<std::size_t> basis;

  void pivot(std::size_t row, std::size_t col, Vec& zrow, Rational& zval) {
    Rational inv = 1 / a[row][col];
    for (auto& v : a[row]) v *= inv;
    rhs[row] *= inv;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (i == row || a[i][col] == 0) continue;
      Rational f = a[i][col];
      for (std::size_t j = 0; j < cols; ++j) a[i][j] -= f * a[row][j];
      rhs[i] -= f * rhs[row];
    }
    if (zrow[col] != 0) {
      Rational f = zrow[col];
      for (std::size_t j = 0; j < cols; ++j) zrow[j] -= f * a[row][j];
      zval += f * rhs[row];
    }
    basis[row] = col;
  }

  // Maximizes the objective whose reduced-cost row is zrow (zval is the
  // current objective value). Bland's rule. Returns false on unbounded.
  bool simplex(Vec& zrow, Rational& zval) {
    for (;;) {
      std::size_t enter = cols;
      for (std::size_t j = 0; j < cols; ++j)
        if (zrow[j] > 0) {
          enter = j;
          break;
        }
      if (enter == cols) return true;
      std::size_t leave = a.size();
      Rational best;
      for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i][enter] <= 0) continue;
        Rational ratio = rhs[i] / a[i][enter];
        if (leave == a.size() || ratio < best ||
            (ratio == best && basis[i] < basis[leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (leave == a.size()) return false;
      pivot(leave, enter, zrow, zval);
    }
  }
};

Vec reduced_costs(const Tableau& t, const Vec& c, Rational& zval) {
  Vec zrow = c;
  zval = 0;
  for (std::size_t i = 0; i < t.a.size(); ++i) {
    const Rational& cb = c[t.basis[i]];
    if (cb == 0) continue;
    for (std::size_t j = 0; j < t.cols; ++j) zrow[j] -= cb * t.a[i][j];
    zval += cb * t.rhs[i];
  }
  return zrow;
}

}  // namespace

LpResult lp_solve(const LinearProgram& p) {
  // Substitute every variable into nonnegative simplex columns.
  std::vector<VarMap> vm(p.n);
  std::size_t ncols = 0;
  std::vector<std::pair<std::size_t, Rational>> range_rows;  // u_col <= cap
  for (std::size_t j = 0; j < p.n; ++j) {
    const auto& lo = p.lower[j];
    const auto& hi = p.upper[j];
    if (lo && hi && *hi < *lo) return {LpStatus::Infeasible, {}, {}};
    if (lo) {
      vm[j] = {VarMap::Kind::Shifted, ncols++, 0, *lo};
      if (hi) range_rows.emplace_back(vm[j].col, *hi - *lo);
    } else if (hi) {
      vm[j] = {VarMap::Kind::Mirrored, ncols++, 0, *hi};
    } else {
      vm[j] = {VarMap::Kind::Free, ncols, ncols + 1, Rational(0)};
      ncols += 2;
    }
  }

  const std::size_t n_leq = p.leq_rows.size() + range_rows.size();
  const std::size_t m = n_leq + p.eq_rows.size();
  const std::size_t nslack = n_leq;

  Tableau t;
  t.cols = ncols + nslack;  // artificials appended later
  t.a.assign(m, zeros(t.cols));
  t.rhs = zeros(m);
  t.basis.assign(m, std::size_t(0));

  auto fill_row = [&](std::size_t i, const Vec& row, const Rational& rhs) {
    Rational adj = rhs;
    for (std::size_t j = 0; j < p.n; ++j) {
      const Rational& c = row[j];
      if (c == 0) continue;
      switch (vm[j].kind) {
        case VarMap::Kind::Shifted:
          t.a[i][vm[j].col] += c;
          adj -= c * vm[j].base;
          break;
        case VarMap::Kind::Mirrored:
          t.a[i][vm[j].col] -= c;
          adj -= c * vm[j].base;
          break;
        case VarMap::Kind::Free:
          t.a[i][vm[j].col] += c;
          t.a[i][vm[j].col2] -= c;
          break;
      }
    }
    t.rhs[i] = adj;
  };

  std::size_t r = 0;
  for (std::size_t i = 0; i < p.leq_rows.size(); ++i, ++r) {
    fill_row(r, p.leq_rows[i], p.leq_rhs[i]);
    t.a[r][ncols + r] = 1;  // slack
  }
  for (const auto& [col, cap] : range_rows) {
    t.a[r] = zeros(t.cols);
    t.a[r][col] = 1;
    t.rhs[r] = cap;
    t.a[r][ncols + r] = 1;
    ++r;
  }
  for (std::size_t i = 0; i < p.eq_rows.size(); ++i, ++r)
    fill_row(r, p.eq_rows[i], p.eq_rhs[i]);

  // Normalize to rhs >= 0 and give every row a basic column: the slack
  // where it still has coefficient +1, an artificial otherwise.
  std::vector<std::size_t> artificial_rows;
  for (std::size_t i = 0; i < m; ++i) {
    bool neg = t.rhs[i] < 0;
    if (neg) {
      for (auto& v : t.a[i]) v = -v;
      t.rhs[i] = -t.rhs[i];
    }
    bool slack_ok = i < nslack && !neg;
    if (slack_ok)
      t.basis[i] = ncols + i;
    else
      artificial_rows.push_back(i);
  }
  std::size_t nart = artificial_rows.size();
  if (nart > 0) {
    std::size_t art0 = t.cols;
    t.cols += nart;
    for (auto& row : t.a) row.resize(t.cols, Rational(0));
    for (std::size_t k = 0; k < nart; ++k) {
      t.a[artificial_rows[k]][art0 + k] = 1;
      t.basis[artificial_rows[k]] = art0 + k;
    }
    // Phase 1: maximize -sum(artificials).
    Vec c1 = zeros(t.cols);
    for (std::size_t k = 0; k < nart; ++k) c1[art0 + k] = -1;
    Rational zval;
    Vec zrow = reduced_costs(t, c1, zval);
    t.simplex(zrow, zval);  // bounded below by construction
    if (zval != 0) return {LpStatus::Infeasible, {}, {}};
    // Pivot leftover artificials out of the basis, dropping redundant rows.
    for (std::size_t i = 0; i < t.a.size();) {
      if (t.basis[i] < art0) {
        ++i;
        continue;
      }
      std::size_t col = art0;
      for (std::size_t j = 0; j < art0; ++j)
        if (t.a[i][j] != 0) {
          col = j;
          break;
        }
      if (col < art0) {
        Vec dummy = zeros(t.cols);
        Rational dz;
        t.pivot(i, col, dummy, dz);
        ++i;
      } else {
        t.a.erase(t.a.begin() + i);
        t.rhs.erase(t.rhs.begin() + i);
        t.basis.erase(t.basis.begin() + i);
      }
    }
    // Remove artificial columns.
    for (auto& row : t.a) row.resize(art0);
    t.cols = art0;
  }

  // Phase 2.
  Vec c2 = zeros(t.cols);
  if (!p.objective.empty()) {
    if (p.objective.size() != p.n)
      throw PmvError("lp_solve: objective size mismatch");
    for (std::size_t j = 0; j < p.n; ++j) {
      const Rational& c = p.objective[j];
      if (c == 0) continue;
      switch (vm[j].kind) {
        case VarMap::Kind::Shifted:
          c2[vm[j].col] += c;
          break;
        case VarMap::Kind::Mirrored:
          c2[vm[j].col] -= c;
          break;
        case VarMap::Kind::Free:
          c2[vm[j].col] += c;
          c2[vm[j].col2] -= c;
          break;
      }
    }
  }
  Rational zval;
  Vec zrow = reduced_costs(t, c2, zval);
  if (!t.simplex(zrow, zval)) return {LpStatus::Unbounded, {}, {}};

  Vec u = zeros(t.cols);
  for (std::size_t i = 0; i < t.a.size(); ++i) u[t.basis[i]] = t.rhs[i];
  Vec x(p.n);
  for (std::size_t j = 0; j < p.n; ++j) {
    switch (vm[j].kind) {
      case VarMap::Kind::Shifted:
        x[j] = vm[j].base + u[vm[j].col];
        break;
      case VarMap::Kind::Mirrored:
        x[j] = vm[j].base - u[vm[j].col];
        break;
      case VarMap::Kind::Free:
        x[j] = u[vm[j].col] - u[vm[j].col2];
        break;
    }
  }
  Rational value = p.objective.empty() ? Rational(0) : dot(p.objective, x);
  return {LpStatus::Optimal, value, std::move(x)};
}

IlpResult ilp_feasible(const LinearProgram& p,
                       const std::vector<bool>& integral, long node_budget) {
  if (integral.size() != p.n)
    throw PmvError("ilp_feasible: integral mask size mismatch");
  for (std::size_t j = 0; j < p.n; ++j)
    if (integral[j] && (!p.lower[j] || !p.upper[j]))
      throw PmvError(
          "ilp_feasible: integral variable " + std::to_string(j) +
          " needs finite lower and upper bounds");

  struct Node {
    std::vector<std::optional<Rational>> lower, upper;
  };
  std::vector<Node> stack{{p.lower, p.upper}};
  LinearProgram q = p;
  q.objective.clear();

  IlpResult out;
  while (!stack.empty()) {
    if (out.nodes >= node_budget) {
      out.status = IlpStatus::Exhausted;
      return out;
    }
    Node nd = std::move(stack.back());
    stack.pop_back();
    q.lower = nd.lower;
    q.upper = nd.upper;
    ++out.nodes;
    LpResult rel = lp_solve(q);
    if (rel.status != LpStatus::Optimal) continue;

    std::size_t branch_var = p.n;
    Rational best_frac = 0;
    for (std::size_t j = 0; j < p.n; ++j) {
      if (!integral[j] || is_integer(rel.x[j])) continue;
      Rational frac = rel.x[j] - floor_rat(rel.x[j]);
      if (branch_var == p.n || frac > best_frac) {
        branch_var = j;
        best_frac = frac;
      }
    }
    if (branch_var == p.n) {
      out.status = IlpStatus::Feasible;
      out.x = std::move(rel.x);
      return out;
    }
    Rational fl = floor_rat(rel.x[branch_var]);
    Node up = nd;  // x_j >= floor + 1
    up.lower[branch_var] = fl + 1;
    Node down = std::move(nd);  // x_j <= floor
    down.upper[branch_var] = fl;
    stack.push_back(std::move(up));
    stack.push_back(std::move(down));  // floor branch explored first
  }
  out.status = IlpStatus::Infeasible;
  return out;
}

}  // namespace pmv
