#pragma once

#include <optional>

#include "pmv/exact.hpp"

namespace pmv {

struct PmvSetting;  // settings.hpp

/// H-representation { x : A x <= b }.
struct Polyhedron {
  Matrix A;
  Vec b;

  std::size_t dim() const { return A.cols(); }
  bool operator==(const Polyhedron&) const = default;
};

/// Appends every row of q to p (same ambient dimension).
Polyhedron intersect(const Polyhedron& p, const Polyhedron& q);

/// true iff A x <= b holds exactly.
bool contains(const Polyhedron& p, const Vec& x);

/// { x : A x <= 0 } — the recession cone of p.
Polyhedron characteristic_cone(const Polyhedron& p);

/// Indices of rows a_i with a_i·x = 0 forced on the whole cone (all b
/// must be zero). Decided per row by LP feasibility of {Ax <= 0, a_i·x <= -1}.
std::vector<std::size_t> implicit_equalities(const Polyhedron& cone);

/// dim(cone) = ambient dim − rank of the implicit-equality rows.
std::size_t cone_dimension(const Polyhedron& cone);

enum class ConeKind { Zero, Infinity, Budget };

/// Constraint system over (x, o) ∈ R^q × R^k whose projection onto x is
/// the cone of interest. Zero has k = 0; Budget carries the one
/// inhomogeneous row c·o <= B.
struct LiftedCone {
  Matrix A;
  Vec b;
  std::size_t q = 0;
  std::size_t k = 0;
};

/// Zero: rows of (H_S)<=0 and (H_T)<=0 on x alone.
/// Infinity: A_S x <= 0, A_T(x + oᵀO) <= 0, o >= 0.
/// Budget: Infinity plus c·o <= B (B required).
LiftedCone build_cone(const PmvSetting& s, ConeKind kind,
                      const std::optional<Rational>& budget = std::nullopt);

/// Convenience: build_cone(…, Zero) as a plain polyhedron.
Polyhedron cone_zero(const PmvSetting& s);

/// Dimension of the projection of the lifted cone onto its x block,
/// computed by growing a set V of independent projected points: each
/// round maximizes ±a·x over the cone intersected with the unit box on
/// x, for every basis vector a of span(V)^⊥, until no direction moves.
std::size_t projected_dimension(const LiftedCone& lc);

enum class BudgetKind { Touch, Cover };

/// Minimal budget for CH(Π) to touch (some point) or be covered by
/// (every vertex) the budgeted cone; nullopt value means Infinite.
struct BudgetThreshold {
  std::optional<Rational> value;
  Vec alpha;                     // Touch: mixture over Π vertices
  Vec ops;                       // fractional operation counts
  std::size_t vertex = 0;        // Cover: index attaining the max
  bool infinite() const { return !value.has_value(); }
};

/// Touch: min c·o over { α simplex, Σαπ ∈ (H_S)<=0, Σαπ + oᵀO ∈ (H_T)<=0,
/// o >= 0 }. Cover: max over vertices π_j of the same LP with x fixed to
/// π_j; Infinite if any vertex is infeasible.
BudgetThreshold min_budget(const PmvSetting& s,
                           const std::vector<Vec>& pi_vertices,
                           BudgetKind kind);

}  // namespace pmv
