#include "pmv/polyhedra.hpp"

#include "pmv/lp.hpp"
#include "pmv/settings.hpp"

namespace pmv {

Polyhedron intersect(const Polyhedron& p, const Polyhedron& q) {
  if (p.A.rows() == 0) return q;
  if (q.A.rows() == 0) return p;
  if (p.dim() != q.dim())
    throw PmvError("intersect: ambient dimension mismatch");
  Polyhedron out = p;
  for (std::size_t i = 0; i < q.A.rows(); ++i) {
    out.A.append_row(q.A.row(i));
    out.b.push_back(q.b[i]);
  }
  return out;
}

bool contains(const Polyhedron& p, const Vec& x) {
  if (x.size() != p.dim()) throw PmvError("contains: dimension mismatch");
  for (std::size_t i = 0; i < p.A.rows(); ++i)
    if (dot(p.A.row(i), x) > p.b[i]) return false;
  return true;
}

Polyhedron characteristic_cone(const Polyhedron& p) {
  Polyhedron out;
  out.A = p.A;
  out.b = Vec(p.A.rows(), Rational(0));
  return out;
}

std::vector<std::size_t> implicit_equalities(const Polyhedron& cone) {
  for (const auto& bi : cone.b)
    if (bi != 0) throw PmvError("implicit_equalities: not a cone");
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < cone.A.rows(); ++i) {
    LinearProgram lp(cone.dim());
    for (std::size_t r = 0; r < cone.A.rows(); ++r)
      lp.add_leq(cone.A.row(r), Rational(0));
    lp.add_leq(cone.A.row(i), Rational(-1));
    if (lp_solve(lp).status == LpStatus::Infeasible) out.push_back(i);
  }
  return out;
}

std::size_t cone_dimension(const Polyhedron& cone) {
  auto idx = implicit_equalities(cone);
  if (idx.empty()) return cone.dim();
  Matrix eq(0, cone.dim());
  for (auto i : idx) eq.append_row(cone.A.row(i));
  return cone.dim() - rank(eq);
}

LiftedCone build_cone(const PmvSetting& s, ConeKind kind,
                      const std::optional<Rational>& budget) {
  const std::size_t q = s.q;
  const std::size_t k = kind == ConeKind::Zero ? 0 : s.ops.rows();
  LiftedCone lc;
  lc.q = q;
  lc.k = k;
  lc.A = Matrix(0, q + k);

  auto pad = [&](const Vec& xpart, const Vec& opart) {
    Vec row = zeros(q + k);
    for (std::size_t j = 0; j < q; ++j) row[j] = xpart[j];
    for (std::size_t j = 0; j < k; ++j) row[q + j] = opart[j];
    return row;
  };

  // A_S x <= 0.
  for (std::size_t i = 0; i < s.source.A.rows(); ++i) {
    lc.A.append_row(pad(s.source.A.row(i), zeros(k)));
    lc.b.push_back(Rational(0));
  }
  if (kind == ConeKind::Zero) {
    for (std::size_t i = 0; i < s.target.A.rows(); ++i) {
      lc.A.append_row(pad(s.target.A.row(i), zeros(k)));
      lc.b.push_back(Rational(0));
    }
    return lc;
  }

  // A_T (x + oᵀO) <= 0: o-part of row i is A_T_i · Oᵀ, i.e. per op r the
  // value a_i · O_r.
  for (std::size_t i = 0; i < s.target.A.rows(); ++i) {
    Vec a = s.target.A.row(i);
    Vec opart(k);
    for (std::size_t r = 0; r < k; ++r) opart[r] = dot(a, s.ops.row(r));
    lc.A.append_row(pad(a, opart));
    lc.b.push_back(Rational(0));
  }
  // o >= 0.
  for (std::size_t r = 0; r < k; ++r) {
    Vec opart = zeros(k);
    opart[r] = -1;
    lc.A.append_row(pad(zeros(q), opart));
    lc.b.push_back(Rational(0));
  }
  if (kind == ConeKind::Budget) {
    if (!budget) throw PmvError("build_cone: Budget needs a budget");
    lc.A.append_row(pad(zeros(q), s.costs));
    lc.b.push_back(*budget);
  }
  return lc;
}

Polyhedron cone_zero(const PmvSetting& s) {
  LiftedCone lc = build_cone(s, ConeKind::Zero);
  Polyhedron p;
  p.A = lc.A;
  p.b = lc.b;
  return p;
}

std::size_t projected_dimension(const LiftedCone& lc) {
  const std::size_t q = lc.q;
  // LP over (x, o) with the unit box on x so every direction has a
  // bounded optimum; o stays free of artificial bounds (objectives touch
  // only x, and the cone keeps o >= 0 rows when present).
  auto base = [&]() {
    LinearProgram lp(lc.q + lc.k);
    for (std::size_t i = 0; i < lc.A.rows(); ++i)
      lp.add_leq(lc.A.row(i), lc.b[i]);
    for (std::size_t j = 0; j < q; ++j) {
      lp.set_lower(j, Rational(-1));
      lp.set_upper(j, Rational(1));
    }
    return lp;
  };

  std::vector<Vec> span;  // projected points spanning the found subspace
  bool grew = true;
  while (grew && span.size() < q) {
    grew = false;
    for (const Vec& a : orthogonal_complement(span, q)) {
      for (int sign : {1, -1}) {
        LinearProgram lp = base();
        lp.objective = zeros(lc.q + lc.k);
        for (std::size_t j = 0; j < q; ++j)
          lp.objective[j] = Rational(sign) * a[j];
        LpResult r = lp_solve(lp);
        if (r.status != LpStatus::Optimal)
          throw PmvError("projected_dimension: unexpected LP status");
        if (r.value > 0) {
          span.push_back(Vec(r.x.begin(), r.x.begin() + q));
          grew = true;
          break;
        }
      }
      if (grew) break;
    }
  }
  return span.size();
}

BudgetThreshold min_budget(const PmvSetting& s,
                           const std::vector<Vec>& pi_vertices,
                           BudgetKind kind) {
  if (pi_vertices.empty()) throw PmvError("min_budget: empty vertex list");
  for (const auto& v : pi_vertices)
    if (v.size() != s.q) throw PmvError("min_budget: vertex dimension mismatch");
  const std::size_t k = s.ops.rows();
  const std::size_t nv = pi_vertices.size();

  // Shared o-part coefficients of the target rows.
  auto target_opart = [&](std::size_t i) {
    Vec a = s.target.A.row(i);
    Vec opart(k);
    for (std::size_t r = 0; r < k; ++r) opart[r] = dot(a, s.ops.row(r));
    return opart;
  };

  if (kind == BudgetKind::Touch) {
    // Variables: α (nv, simplex) then o (k, >= 0). x = Σ α_j π_j.
    LinearProgram lp(nv + k);
    lp.set_nonneg(0, nv + k);
    Vec simplex = zeros(nv + k);
    for (std::size_t j = 0; j < nv; ++j) simplex[j] = 1;
    lp.add_eq(simplex, Rational(1));
    auto mix_coeff = [&](const Vec& a) {
      Vec row = zeros(nv + k);
      for (std::size_t j = 0; j < nv; ++j) row[j] = dot(a, pi_vertices[j]);
      return row;
    };
    for (std::size_t i = 0; i < s.source.A.rows(); ++i)
      lp.add_leq(mix_coeff(s.source.A.row(i)), Rational(0));
    for (std::size_t i = 0; i < s.target.A.rows(); ++i) {
      Vec row = mix_coeff(s.target.A.row(i));
      Vec opart = target_opart(i);
      for (std::size_t r = 0; r < k; ++r) row[nv + r] = opart[r];
      lp.add_leq(row, Rational(0));
    }
    lp.objective = zeros(nv + k);  // maximize −c·o ⇔ minimize c·o
    for (std::size_t r = 0; r < k; ++r) lp.objective[nv + r] = -s.costs[r];
    LpResult r = lp_solve(lp);
    BudgetThreshold out;
    if (r.status != LpStatus::Optimal) return out;  // Infinite
    out.value = -r.value;
    out.alpha = Vec(r.x.begin(), r.x.begin() + nv);
    out.ops = Vec(r.x.begin() + nv, r.x.end());
    return out;
  }

  // Cover: per vertex the o-only LP; x-terms of each row become constants.
  BudgetThreshold out;
  out.value = Rational(0);
  for (std::size_t j = 0; j < nv; ++j) {
    const Vec& pi = pi_vertices[j];
    bool in_source_cone = true;
    for (std::size_t i = 0; i < s.source.A.rows() && in_source_cone; ++i)
      if (dot(s.source.A.row(i), pi) > 0) in_source_cone = false;
    if (!in_source_cone) return BudgetThreshold{};  // Infinite
    LinearProgram lp(k);
    lp.set_nonneg(0, k);
    for (std::size_t i = 0; i < s.target.A.rows(); ++i)
      lp.add_leq(target_opart(i), -dot(s.target.A.row(i), pi));
    lp.objective = Vec(k);
    for (std::size_t r = 0; r < k; ++r) lp.objective[r] = -s.costs[r];
    LpResult r = lp_solve(lp);
    if (r.status != LpStatus::Optimal) return BudgetThreshold{};  // Infinite
    if (-r.value > *out.value) {
      out.value = -r.value;
      out.ops = r.x;
      out.vertex = j;
    }
  }
  return out;
}

}  // namespace pmv
