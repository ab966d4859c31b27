#include "pmv/classify.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "pmv/lp.hpp"
#include "pmv/parallel.hpp"

namespace pmv {

using nlohmann::json;

namespace {

Rational ceil_rat(const Rational& r) { return -floor_rat(-r); }

Rational rational_pow(const Rational& base, unsigned long e) {
  // base canonical ⇒ num^e, den^e stay coprime.
  mpz_class num, den;
  mpz_pow_ui(num.get_mpz_t(), base.get_num().get_mpz_t(), e);
  mpz_pow_ui(den.get_mpz_t(), base.get_den().get_mpz_t(), e);
  Rational out(num);
  out /= Rational(den);
  return out;
}

void validate_pi(const std::vector<Vec>& pi, std::size_t q) {
  if (pi.empty()) throw PmvError("classify: empty vertex set for Π");
  for (const auto& v : pi) {
    if (v.size() != q)
      throw PmvError("classify: Π vertex dimension != setting dimension");
    Rational sum(0);
    for (const auto& e : v) {
      if (e < 0) throw PmvError("classify: Π vertex has a negative entry");
      sum += e;
    }
    if (sum != 1) throw PmvError("classify: Π vertex does not sum to 1");
  }
}

/// ILP deciding SuS_{n,B} = ∅ on {x ∈ Z^q, 0 ≤ x ≤ n, Σx = n, A_S x ≤ b_S,
/// o ∈ Z^k, 0 ≤ o ≤ ⌈B⌉, c·o ≤ B, A_T(x + oᵀO) ≤ b_T}.
IlpResult sus_ilp(const PmvSetting& s, long n, const Rational& B,
                  long node_budget) {
  const std::size_t q = s.q, k = s.ops.rows();
  LinearProgram p(q + k);
  for (std::size_t j = 0; j < q; ++j) {
    p.set_lower(j, Rational(0));
    p.set_upper(j, Rational(n));
  }
  Rational ob = ceil_rat(B);
  for (std::size_t r = 0; r < k; ++r) {
    p.set_lower(q + r, Rational(0));
    p.set_upper(q + r, ob);
  }
  {
    Vec ones = zeros(q + k);
    for (std::size_t j = 0; j < q; ++j) ones[j] = 1;
    p.add_eq(std::move(ones), Rational(n));
  }
  for (std::size_t i = 0; i < s.source.A.rows(); ++i) {
    Vec row = zeros(q + k);
    for (std::size_t j = 0; j < q; ++j) row[j] = s.source.A.at(i, j);
    p.add_leq(std::move(row), s.source.b[i]);
  }
  {
    Vec row = zeros(q + k);
    for (std::size_t r = 0; r < k; ++r) row[q + r] = s.costs[r];
    p.add_leq(std::move(row), B);
  }
  for (std::size_t i = 0; i < s.target.A.rows(); ++i) {
    Vec a = s.target.A.row(i);
    Vec row = zeros(q + k);
    for (std::size_t j = 0; j < q; ++j) row[j] = a[j];
    for (std::size_t r = 0; r < k; ++r) row[q + r] = dot(a, s.ops.row(r));
    p.add_leq(std::move(row), s.target.b[i]);
  }
  return ilp_feasible(p, std::vector<bool>(q + k, true), node_budget);
}

/// α-mixture coefficients of a q-row: coefficient j is row · π_j.
Vec mixture_row(const Vec& a, const std::vector<Vec>& pi) {
  Vec out(pi.size());
  for (std::size_t j = 0; j < pi.size(); ++j) out[j] = dot(a, pi[j]);
  return out;
}

/// α with Σαπ ∈ Cone₀, or nullopt if CH(Π) ∩ Cone₀ = ∅.
std::optional<Vec> hull_meets_cone_zero(const PmvSetting& s,
                                        const std::vector<Vec>& pi) {
  const std::size_t nv = pi.size();
  LinearProgram lp(nv);
  lp.set_nonneg(0, nv);
  lp.add_eq(Vec(nv, Rational(1)), Rational(1));
  for (std::size_t i = 0; i < s.source.A.rows(); ++i)
    lp.add_leq(mixture_row(s.source.A.row(i), pi), Rational(0));
  for (std::size_t i = 0; i < s.target.A.rows(); ++i)
    lp.add_leq(mixture_row(s.target.A.row(i), pi), Rational(0));
  LpResult r = lp_solve(lp);
  if (r.status == LpStatus::Optimal) return r.x;
  return std::nullopt;
}

/// α with Σαπ in the projected unlimited-operations cone, or nullopt.
std::optional<Vec> hull_meets_cone_inf(const PmvSetting& s,
                                       const std::vector<Vec>& pi) {
  const std::size_t nv = pi.size(), k = s.ops.rows();
  LinearProgram lp(nv + k);
  lp.set_nonneg(0, nv + k);
  {
    Vec row = zeros(nv + k);
    for (std::size_t j = 0; j < nv; ++j) row[j] = 1;
    lp.add_eq(std::move(row), Rational(1));
  }
  for (std::size_t i = 0; i < s.source.A.rows(); ++i) {
    Vec row = zeros(nv + k);
    Vec mix = mixture_row(s.source.A.row(i), pi);
    for (std::size_t j = 0; j < nv; ++j) row[j] = mix[j];
    lp.add_leq(std::move(row), Rational(0));
  }
  for (std::size_t i = 0; i < s.target.A.rows(); ++i) {
    Vec a = s.target.A.row(i);
    Vec row = zeros(nv + k);
    Vec mix = mixture_row(a, pi);
    for (std::size_t j = 0; j < nv; ++j) row[j] = mix[j];
    for (std::size_t r = 0; r < k; ++r) row[nv + r] = dot(a, s.ops.row(r));
    lp.add_leq(std::move(row), Rational(0));
  }
  LpResult r = lp_solve(lp);
  if (r.status != LpStatus::Optimal) return std::nullopt;
  return Vec(r.x.begin(), r.x.begin() + nv);
}

bool vertex_in_cone_zero(const PmvSetting& s, const Vec& v) {
  for (std::size_t i = 0; i < s.source.A.rows(); ++i)
    if (dot(s.source.A.row(i), v) > 0) return false;
  for (std::size_t i = 0; i < s.target.A.rows(); ++i)
    if (dot(s.target.A.row(i), v) > 0) return false;
  return true;
}

bool vertex_in_cone_inf(const PmvSetting& s, const Vec& v) {
  for (std::size_t i = 0; i < s.source.A.rows(); ++i)
    if (dot(s.source.A.row(i), v) > 0) return false;
  const std::size_t k = s.ops.rows();
  LinearProgram lp(k);
  lp.set_nonneg(0, k);
  for (std::size_t i = 0; i < s.target.A.rows(); ++i) {
    Vec a = s.target.A.row(i);
    Vec row(k);
    for (std::size_t r = 0; r < k; ++r) row[r] = dot(a, s.ops.row(r));
    lp.add_leq(std::move(row), -dot(a, v));
  }
  return lp_solve(lp).status == LpStatus::Optimal;
}

struct Dims {
  std::size_t d0 = 0, dInf = 0;
};

Dims setting_dims(const PmvSetting& s) {
  Dims d;
  d.d0 = cone_dimension(cone_zero(s));
  d.dInf = projected_dimension(build_cone(s, ConeKind::Infinity));
  if (d.dInf < d.d0 || d.dInf > s.q)
    throw PmvError("classify: cone dimensions inconsistent");
  return d;
}

std::string pt_sqrt_bound(std::size_t dDelta, std::size_t q_minus_d0) {
  std::ostringstream os;
  os << "Θ(min{B+1,√n}^{" << dDelta << "}/(√n)^{" << q_minus_d0 << "})";
  return os.str();
}

std::string poly_bound(double expo) {
  std::ostringstream os;
  os << "Θ((1/√n)^{" << expo << "})";
  return os.str();
}

/// min{2·log(B+1)/log n, 1} saturates iff (B+1)² ≥ n.
bool lambda_saturated(long n, const Rational& B) {
  return (B + 1) * (B + 1) >= Rational(n);
}

/// sign(2L − r) with L = log(B+1)/log n, valid when 2L < 1 (unsaturated).
int compare_2l(const Rational& r, long n, const Rational& B) {
  if (r < 0) return 1;
  if (r >= 1) return -1;
  if (!r.get_num().fits_ulong_p() || !r.get_den().fits_ulong_p())
    throw PmvError("compare_weights: exponent ratio out of range");
  unsigned long p = r.get_num().get_ui();
  unsigned long sden = r.get_den().get_ui();
  Rational lhs = rational_pow(B + 1, 2 * sden);
  mpz_class npow;
  mpz_ui_pow_ui(npow.get_mpz_t(), static_cast<unsigned long>(n), p);
  return cmp(lhs, Rational(npow));
}

int sign_of(long v) { return v > 0 ? 1 : v < 0 ? -1 : 0; }

}  // namespace

int compare_weights(const Weight& a, const Weight& b, long n,
                    const Rational& B) {
  auto rank = [](Weight::Kind k) {
    switch (k) {
      case Weight::Kind::NegInfinity: return 0;
      case Weight::Kind::ExpCase: return 1;
      case Weight::Kind::Poly: return 2;
    }
    return 0;
  };
  if (rank(a.kind) != rank(b.kind)) return rank(a.kind) < rank(b.kind) ? -1 : 1;
  if (a.kind != Weight::Kind::Poly) return 0;
  if (lambda_saturated(n, B))
    return sign_of((a.d0 + a.dDelta) - (b.d0 + b.dDelta));
  long delta0 = a.d0 - b.d0;
  long deltaD = a.dDelta - b.dDelta;
  if (deltaD == 0) return sign_of(delta0);
  // w_a − w_b = Δ0 + 2L·ΔΔ = ΔΔ·(2L − (−Δ0/ΔΔ)).
  int c = compare_2l(rat(-delta0, deltaD), n, B);
  return deltaD > 0 ? c : -c;
}

double weight_value(const Weight& w, long n, const Rational& B) {
  switch (w.kind) {
    case Weight::Kind::NegInfinity:
      return -std::numeric_limits<double>::infinity();
    case Weight::Kind::ExpCase:
      if (n < 2) return -std::numeric_limits<double>::infinity();
      return -2.0 * static_cast<double>(n) / std::log(static_cast<double>(n));
    case Weight::Kind::Poly: {
      double lambda = 1.0;
      if (!lambda_saturated(n, B))
        lambda = 2.0 * std::log(mpq_get_d(B.get_mpq_t()) + 1.0) /
                 std::log(static_cast<double>(n));
      return static_cast<double>(w.d0) +
             static_cast<double>(w.dDelta) * lambda;
    }
  }
  return 0.0;
}

ConditionReport check_conditions(const PmvSetting& s,
                                 const std::vector<Vec>& pi_vertices, long n,
                                 const Rational& B,
                                 const ClassifyOptions& opts) {
  if (n < 1) throw PmvError("check_conditions: n must be at least 1");
  if (B < 0) throw PmvError("check_conditions: B must be nonnegative");
  validate_pi(pi_vertices, s.q);

  ConditionReport cr;
  IlpResult c1 = sus_ilp(s, n, B, opts.ilp_node_budget);
  switch (c1.status) {
    case IlpStatus::Feasible:
      cr.c1 = false;
      cr.sus_x = Vec(c1.x.begin(), c1.x.begin() + s.q);
      cr.sus_o = Vec(c1.x.begin() + s.q, c1.x.end());
      break;
    case IlpStatus::Infeasible:
      cr.c1 = true;
      break;
    case IlpStatus::Exhausted:
      cr.c1_determined = false;
      break;
  }

  cr.cone_inf_mixture = hull_meets_cone_inf(s, pi_vertices);
  cr.c2 = !cr.cone_inf_mixture.has_value();
  cr.cone_zero_mixture = hull_meets_cone_zero(s, pi_vertices);
  cr.c3 = !cr.cone_zero_mixture.has_value();

  for (std::size_t j = 0; j < pi_vertices.size(); ++j)
    if (!vertex_in_cone_inf(s, pi_vertices[j])) {
      cr.c4 = true;
      cr.cone_inf_escape = j;
      break;
    }
  for (std::size_t j = 0; j < pi_vertices.size(); ++j)
    if (!vertex_in_cone_zero(s, pi_vertices[j])) {
      cr.c5 = true;
      cr.cone_zero_escape = j;
      break;
    }

  // Cone₀ ⊆ Cone∞ forces both implications; a violation is a solver bug.
  if ((cr.c2 && !cr.c3) || (cr.c4 && !cr.c5))
    throw PmvError("check_conditions: condition logic violated");
  return cr;
}

ClassificationResult classify_single(const PmvSetting& s,
                                     const std::vector<Vec>& pi_vertices,
                                     long n, const Rational& B, Mode mode,
                                     const ClassifyOptions& opts) {
  ClassificationResult res;
  res.mode = mode;
  res.conditions = check_conditions(s, pi_vertices, n, B, opts);
  const ConditionReport& cr = res.conditions;

  if (!cr.c1_determined) {
    res.kind = LikelihoodCase::Undetermined;
    res.note = "ILP node budget exhausted while deciding whether any "
               "unstable size-n histogram exists";
    res.symbolic_bound = "undetermined";
    return res;
  }
  if (cr.c1) {
    res.kind = LikelihoodCase::Zero;
    res.symbolic_bound = "0";
    return res;
  }
  const bool exponential = mode == Mode::Sup ? cr.c2 : cr.c4;
  if (exponential) {
    res.kind = LikelihoodCase::Exponential;
    res.symbolic_bound = "exp(-Θ(n))";
    return res;
  }
  const bool pt_sqrt = mode == Mode::Sup ? !cr.c3 : !cr.c5;
  if (pt_sqrt) {
    Dims d = setting_dims(s);
    res.kind = LikelihoodCase::PTSqrtN;
    res.d0 = d.d0;
    res.dInf = d.dInf;
    res.dDelta = d.dInf - d.d0;
    res.symbolic_bound = pt_sqrt_bound(res.dDelta, s.q - res.d0);
    return res;
  }

  // Phase transition at B = Θ(n): compare against the budget threshold.
  BudgetThreshold th = min_budget(
      s, pi_vertices, mode == Mode::Sup ? BudgetKind::Touch : BudgetKind::Cover);
  res.threshold = th;
  if (th.infinite()) {
    // Unreachable when the earlier conditions placed us here; stay honest.
    res.kind = LikelihoodCase::Undetermined;
    res.note = "budget threshold is infinite in the linear-phase regime";
    res.symbolic_bound = "undetermined";
    return res;
  }
  res.kind = LikelihoodCase::PTLinearN;
  Rational diff = B - *th.value * Rational(n);
  Rational band = opts.knife_band * Rational(n);
  if (diff <= -band) {
    res.subcase = PTLinearSubcase::BelowThreshold;
    res.symbolic_bound = "exp(-Θ(n))";
  } else if (diff >= band) {
    res.subcase = PTLinearSubcase::AboveThreshold;
    Dims d = setting_dims(s);
    res.d0 = d.d0;
    res.dInf = d.dInf;
    res.dDelta = d.dInf - d.d0;
    res.poly_exponent = static_cast<double>(s.q - d.dInf);
    res.symbolic_bound = poly_bound(res.poly_exponent);
  } else {
    res.subcase = PTLinearSubcase::Knife;
    res.symbolic_bound = "undetermined (inside the knife band around the threshold)";
    res.note = "B within the ρ·n exclusion band of threshold·n";
  }
  return res;
}

namespace {

struct SettingAnalysis {
  bool undetermined = false;  // C1 ILP exhausted
  bool empty = false;         // SuS = ∅
  bool hull_meets_zero = false;
  std::optional<Rational> touch;  // nullopt = Infinite
  Dims dims;
  bool dims_known = false;
};

SettingAnalysis analyze_setting(const PmvSetting& s,
                                const std::vector<Vec>& pi, long n,
                                const Rational& B,
                                const ClassifyOptions& opts) {
  SettingAnalysis a;
  IlpResult c1 = sus_ilp(s, n, B, opts.ilp_node_budget);
  if (c1.status == IlpStatus::Exhausted) {
    a.undetermined = true;
    return a;
  }
  a.empty = c1.status == IlpStatus::Infeasible;
  a.hull_meets_zero = hull_meets_cone_zero(s, pi).has_value();
  if (!a.empty && a.hull_meets_zero) {
    a.dims = setting_dims(s);
    a.dims_known = true;
  }
  BudgetThreshold th = min_budget(s, pi, BudgetKind::Touch);
  a.touch = th.value;
  return a;
}

/// Decides whether some point of CH(Π) lies strictly outside every cone
/// in `cones` (each given as its defining rows). Exact arithmetic for a
/// single vertex; otherwise a DFS over per-cone violated-row choices
/// with margin a·χ ≥ 1/M. lp_calls counts against the budget.
bool hull_point_escapes(const std::vector<std::vector<Vec>>& cones,
                        const std::vector<Vec>& pi, long big_m,
                        long& lp_budget, bool& exhausted) {
  if (cones.empty()) return true;
  if (pi.size() == 1) {
    for (const auto& rows : cones) {
      bool outside = false;
      for (const auto& a : rows)
        if (dot(a, pi[0]) > 0) {
          outside = true;
          break;
        }
      if (!outside) return false;
    }
    return true;
  }

  const std::size_t nv = pi.size();
  const Rational margin = rat(1, big_m);
  auto solve_with = [&](const std::vector<const Vec*>& chosen)
      -> std::optional<bool> {
    if (--lp_budget < 0) return std::nullopt;
    LinearProgram lp(nv);
    lp.set_nonneg(0, nv);
    lp.add_eq(Vec(nv, Rational(1)), Rational(1));
    for (const Vec* a : chosen) {
      Vec row = mixture_row(*a, pi);
      for (auto& e : row) e = -e;
      lp.add_leq(std::move(row), -margin);  // a·χ ≥ 1/M
    }
    return lp_solve(lp).status == LpStatus::Optimal;
  };

  // Per cone, keep only rows violable somewhere on CH(Π).
  std::vector<std::vector<const Vec*>> usable(cones.size());
  for (std::size_t c = 0; c < cones.size(); ++c) {
    for (const auto& a : cones[c]) {
      auto ok = solve_with({&a});
      if (!ok) {
        exhausted = true;
        return false;
      }
      if (*ok) usable[c].push_back(&a);
    }
    if (usable[c].empty()) return false;  // cone covers the whole hull
  }
  std::vector<std::size_t> order(cones.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return usable[x].size() < usable[y].size();
  });

  std::vector<const Vec*> chosen;
  std::function<std::optional<bool>(std::size_t)> dfs =
      [&](std::size_t depth) -> std::optional<bool> {
    if (depth == order.size()) return true;
    for (const Vec* a : usable[order[depth]]) {
      chosen.push_back(a);
      auto feasible = solve_with(chosen);
      if (!feasible) return std::nullopt;
      if (*feasible) {
        auto deeper = dfs(depth + 1);
        if (!deeper) return std::nullopt;
        if (*deeper) return true;
      }
      chosen.pop_back();
    }
    return false;
  };
  auto out = dfs(0);
  if (!out) {
    exhausted = true;
    return false;
  }
  return *out;
}

std::vector<Vec> cone_zero_rows(const PmvSetting& s) {
  std::vector<Vec> rows;
  for (std::size_t i = 0; i < s.source.A.rows(); ++i)
    rows.push_back(s.source.A.row(i));
  for (std::size_t i = 0; i < s.target.A.rows(); ++i)
    rows.push_back(s.target.A.row(i));
  return rows;
}

}  // namespace

ClassificationResult classify_multi(const SettingFamily& family,
                                    const std::vector<Vec>& pi_vertices,
                                    long n, const Rational& B, Mode mode,
                                    const ClassifyOptions& opts) {
  if (family.settings.empty()) throw PmvError("classify_multi: empty family");
  const std::size_t q = family.settings.front().q;
  for (const auto& s : family.settings)
    if (s.q != q) throw PmvError("classify_multi: mixed ambient dimensions");
  if (n < 1) throw PmvError("classify_multi: n must be at least 1");
  if (B < 0) throw PmvError("classify_multi: B must be nonnegative");
  validate_pi(pi_vertices, q);

  ClassificationResult res;
  res.mode = mode;

  std::vector<SettingAnalysis> an(family.settings.size());
  parallel_for(family.settings.size(), [&](std::size_t i) {
    an[i] = analyze_setting(family.settings[i], pi_vertices, n, B, opts);
  });

  for (std::size_t i = 0; i < an.size(); ++i) {
    if (an[i].undetermined) {
      res.kind = LikelihoodCase::Undetermined;
      res.note = "ILP node budget exhausted on setting '" +
                 family.settings[i].name + "'";
      res.symbolic_bound = "undetermined";
      return res;
    }
    // The weight calculus needs B below the linear-phase threshold.
    if (an[i].touch && *an[i].touch > 0 &&
        B >= *an[i].touch * Rational(n)) {
      res.kind = LikelihoodCase::Undetermined;
      res.note = "B exceeds the linear-phase threshold of setting '" +
                 family.settings[i].name +
                 "'; the weight formula needs B below it";
      res.symbolic_bound = "undetermined";
      return res;
    }
  }

  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < an.size(); ++i)
    if (!an[i].empty) active.push_back(i);
  if (active.empty()) {
    res.kind = LikelihoodCase::Zero;
    res.symbolic_bound = "0";
    return res;
  }

  auto finish_poly = [&](const Weight& w) {
    res.kind = LikelihoodCase::PolyExponent;
    res.weight = w;
    res.poly_exponent = static_cast<double>(q) - weight_value(w, n, B);
    res.symbolic_bound = poly_bound(res.poly_exponent);
  };

  if (mode == Mode::Sup) {
    Weight best{Weight::Kind::NegInfinity, 0, 0};
    for (std::size_t i : active) {
      Weight w;
      if (an[i].hull_meets_zero)
        w = Weight{Weight::Kind::Poly, static_cast<long>(an[i].dims.d0),
                   static_cast<long>(an[i].dims.dInf - an[i].dims.d0)};
      else
        w = Weight{Weight::Kind::ExpCase, 0, 0};
      if (compare_weights(w, best, n, B) > 0) best = w;
    }
    if (best.kind == Weight::Kind::ExpCase) {
      res.kind = LikelihoodCase::Exponential;
      res.symbolic_bound = "exp(-Θ(n))";
      res.weight = best;
      return res;
    }
    finish_poly(best);
    return res;
  }

  // Inf: w_min = min over π ∈ CH(Π) of max over settings of w(π, i).
  // Scan candidate values ascending; the answer is the first v such that
  // some hull point avoids every cone whose weight exceeds v.
  std::vector<std::pair<Weight, std::size_t>> polys;  // weight, setting
  for (std::size_t i : active)
    if (an[i].hull_meets_zero)
      polys.emplace_back(
          Weight{Weight::Kind::Poly, static_cast<long>(an[i].dims.d0),
                 static_cast<long>(an[i].dims.dInf - an[i].dims.d0)},
          i);
  std::sort(polys.begin(), polys.end(),
            [&](const auto& a, const auto& b) {
              return compare_weights(a.first, b.first, n, B) < 0;
            });

  long lp_budget = opts.enumeration_budget;
  bool exhausted = false;
  auto escape_from = [&](const Weight& v, bool include_equal) {
    // Cones of settings whose weight is > v (or ≥ v when include_equal).
    std::vector<std::vector<Vec>> cones;
    for (const auto& [w, i] : polys) {
      int c = compare_weights(w, v, n, B);
      if (c > 0 || (include_equal && c == 0))
        cones.push_back(cone_zero_rows(family.settings[i]));
    }
    return hull_point_escapes(cones, pi_vertices, opts.big_m, lp_budget,
                              exhausted);
  };

  // Candidate ExpCase: escape every poly-weighted cone.
  if (escape_from(Weight{Weight::Kind::ExpCase, 0, 0}, true)) {
    if (exhausted) {
      res.kind = LikelihoodCase::Undetermined;
      res.note = "row-choice enumeration budget exhausted (inf weight scan)";
      res.symbolic_bound = "undetermined";
      return res;
    }
    res.kind = LikelihoodCase::Exponential;
    res.symbolic_bound = "exp(-Θ(n))";
    res.weight = Weight{Weight::Kind::ExpCase, 0, 0};
    if (pi_vertices.size() > 1)
      res.note = "strict cone escape certified with margin 1/" +
                 std::to_string(opts.big_m);
    return res;
  }
  if (exhausted) {
    res.kind = LikelihoodCase::Undetermined;
    res.note = "row-choice enumeration budget exhausted (inf weight scan)";
    res.symbolic_bound = "undetermined";
    return res;
  }
  for (const auto& [w, i] : polys) {
    if (escape_from(w, false)) {
      if (exhausted) break;
      finish_poly(w);
      if (pi_vertices.size() > 1)
        res.note = "strict cone escape certified with margin 1/" +
                   std::to_string(opts.big_m);
      return res;
    }
    if (exhausted) break;
  }
  if (exhausted) {
    res.kind = LikelihoodCase::Undetermined;
    res.note = "row-choice enumeration budget exhausted (inf weight scan)";
    res.symbolic_bound = "undetermined";
    return res;
  }
  // Last candidate always succeeds (no cones left to avoid).
  throw PmvError("classify_multi: inf weight scan reached an impossible state");
}

ClassificationResult classify_psi(const PmvSetting& s,
                                  const std::vector<Vec>& pi_vertices,
                                  const Rational& psi, long n,
                                  const Rational& B,
                                  const ClassifyOptions& opts) {
  if (psi <= 0 || psi > 1)
    throw PmvError("classify_psi: psi must lie in (0, 1]");
  if (n < 1) throw PmvError("classify_psi: n must be at least 1");
  if (B < 0) throw PmvError("classify_psi: B must be nonnegative");
  validate_pi(pi_vertices, s.q);

  ClassificationResult res;
  res.mode = Mode::Sup;
  res.note = "sup and inf coincide for a positive rewrite fraction";

  // Theorem precondition: B ≤ C₁·√n ⟺ B² ≤ C₁²·n.
  if (B * B > opts.psi_budget_c1 * opts.psi_budget_c1 * Rational(n)) {
    res.kind = LikelihoodCase::Undetermined;
    res.note = "B exceeds C₁·√n; the positive-ψ table does not apply";
    res.symbolic_bound = "undetermined";
    return res;
  }

  IlpResult c1 = sus_ilp(s, n, B, opts.ilp_node_budget);
  if (c1.status == IlpStatus::Exhausted) {
    res.conditions.c1_determined = false;
    res.kind = LikelihoodCase::Undetermined;
    res.note = "ILP node budget exhausted while deciding whether any "
               "unstable size-n histogram exists";
    res.symbolic_bound = "undetermined";
    return res;
  }
  if (c1.status == IlpStatus::Infeasible) {
    res.conditions.c1 = true;
    res.kind = LikelihoodCase::Zero;
    res.symbolic_bound = "0";
    return res;
  }
  res.conditions.c1 = false;
  res.conditions.sus_x = Vec(c1.x.begin(), c1.x.begin() + s.q);
  res.conditions.sus_o = Vec(c1.x.begin() + s.q, c1.x.end());

  // CH(Π) ∩ nbhd_ψ(Cone₀): χ = Σαπ + κᵀM with the single-unit transfer
  // rows M, Σκ ≤ ψ, χ ≥ 0, χ ∈ Cone₀.
  const std::size_t q = s.q, nv = pi_vertices.size();
  const std::size_t kt = q * (q - 1);
  std::vector<std::pair<std::size_t, std::size_t>> transfers;
  transfers.reserve(kt);
  for (std::size_t i = 0; i < q; ++i)
    for (std::size_t j = 0; j < q; ++j)
      if (i != j) transfers.emplace_back(i, j);

  LinearProgram lp(nv + kt);
  lp.set_nonneg(0, nv + kt);
  {
    Vec row = zeros(nv + kt);
    for (std::size_t j = 0; j < nv; ++j) row[j] = 1;
    lp.add_eq(std::move(row), Rational(1));
  }
  {
    Vec row = zeros(nv + kt);
    for (std::size_t t = 0; t < kt; ++t) row[nv + t] = 1;
    lp.add_leq(std::move(row), psi);
  }
  // χ_c coefficients: Σ_j α_j π_j[c] + Σ_t κ_t·(±1).
  auto chi_leq = [&](const Vec& a, const Rational& rhs) {
    Vec row = zeros(nv + kt);
    Vec mix = mixture_row(a, pi_vertices);
    for (std::size_t j = 0; j < nv; ++j) row[j] = mix[j];
    for (std::size_t t = 0; t < kt; ++t)
      row[nv + t] = a[transfers[t].second] - a[transfers[t].first];
    lp.add_leq(std::move(row), rhs);
  };
  for (std::size_t i = 0; i < s.source.A.rows(); ++i)
    chi_leq(s.source.A.row(i), Rational(0));
  for (std::size_t i = 0; i < s.target.A.rows(); ++i)
    chi_leq(s.target.A.row(i), Rational(0));
  for (std::size_t c = 0; c < q; ++c) {
    Vec unit = zeros(q);
    unit[c] = -1;
    chi_leq(unit, Rational(0));  // χ_c ≥ 0
  }

  if (lp_solve(lp).status == LpStatus::Optimal) {
    res.kind = LikelihoodCase::ThetaOne;
    res.symbolic_bound = "Θ(1)";
  } else {
    res.kind = LikelihoodCase::Exponential;
    res.symbolic_bound = "exp(-Θ(n))";
  }
  return res;
}

ActivationGraph activation_graph(const SettingFamily& family,
                                 const std::vector<Vec>& pi_vertices, long n,
                                 const Rational& B,
                                 const ClassifyOptions& opts) {
  if (family.settings.empty())
    throw PmvError("activation_graph: empty family");
  const std::size_t q = family.settings.front().q;
  validate_pi(pi_vertices, q);

  ActivationGraph g;
  g.n = n;
  g.B = B;
  const std::size_t ns = family.settings.size();
  std::vector<SettingAnalysis> an(ns);
  parallel_for(ns, [&](std::size_t i) {
    an[i] = analyze_setting(family.settings[i], pi_vertices, n, B, opts);
    if (an[i].undetermined)
      throw PmvError("activation_graph: ILP budget exhausted on setting '" +
                     family.settings[i].name + "'");
  });

  g.vertex_weights.assign(pi_vertices.size(), std::vector<Weight>(ns));
  for (std::size_t j = 0; j < pi_vertices.size(); ++j)
    for (std::size_t i = 0; i < ns; ++i) {
      const auto& s = family.settings[i];
      Weight w{Weight::Kind::NegInfinity, 0, 0};
      if (!an[i].empty) {
        if (vertex_in_cone_zero(s, pi_vertices[j])) {
          if (!an[i].dims_known) {
            an[i].dims = setting_dims(s);
            an[i].dims_known = true;
          }
          w = Weight{Weight::Kind::Poly, static_cast<long>(an[i].dims.d0),
                     static_cast<long>(an[i].dims.dInf - an[i].dims.d0)};
        } else {
          w = Weight{Weight::Kind::ExpCase, 0, 0};
        }
      }
      g.vertex_weights[j][i] = w;
    }

  g.sup_weights.resize(ns);
  for (std::size_t i = 0; i < ns; ++i) {
    if (an[i].empty)
      g.sup_weights[i] = Weight{Weight::Kind::NegInfinity, 0, 0};
    else if (an[i].hull_meets_zero)
      g.sup_weights[i] =
          Weight{Weight::Kind::Poly, static_cast<long>(an[i].dims.d0),
                 static_cast<long>(an[i].dims.dInf - an[i].dims.d0)};
    else
      g.sup_weights[i] = Weight{Weight::Kind::ExpCase, 0, 0};
  }
  return g;
}

std::string mode_name(Mode mode) { return mode == Mode::Sup ? "sup" : "inf"; }

std::string case_name(LikelihoodCase c) {
  switch (c) {
    case LikelihoodCase::Zero: return "zero";
    case LikelihoodCase::Exponential: return "exponential";
    case LikelihoodCase::PTSqrtN: return "pt-sqrt-n";
    case LikelihoodCase::PTLinearN: return "pt-linear-n";
    case LikelihoodCase::PolyExponent: return "poly-exponent";
    case LikelihoodCase::ThetaOne: return "theta-1";
    case LikelihoodCase::Undetermined: return "undetermined";
  }
  return "?";
}

std::string subcase_name(PTLinearSubcase c) {
  switch (c) {
    case PTLinearSubcase::BelowThreshold: return "below-threshold";
    case PTLinearSubcase::AboveThreshold: return "above-threshold";
    case PTLinearSubcase::Knife: return "knife";
  }
  return "?";
}

std::string classification_to_json(const ClassificationResult& r) {
  json j;
  j["case"] = case_name(r.kind);
  j["mode"] = mode_name(r.mode);
  j["symbolic_bound"] = r.symbolic_bound;
  if (r.kind == LikelihoodCase::PTSqrtN ||
      (r.kind == LikelihoodCase::PTLinearN &&
       r.subcase == PTLinearSubcase::AboveThreshold)) {
    j["d0"] = r.d0;
    j["dDelta"] = r.dDelta;
    j["dInf"] = r.dInf;
  }
  if (r.kind == LikelihoodCase::PTLinearN) {
    j["subcase"] = subcase_name(r.subcase);
    if (r.threshold) {
      j["threshold"] =
          r.threshold->infinite() ? "infinite" : to_string(*r.threshold->value);
    }
  }
  if (r.kind == LikelihoodCase::PolyExponent) {
    j["poly_exponent"] = r.poly_exponent;
    if (r.weight) {
      json w;
      w["kind"] = r.weight->kind == Weight::Kind::Poly ? "poly"
                  : r.weight->kind == Weight::Kind::ExpCase ? "exp-case"
                                                            : "neg-infinity";
      w["d0"] = r.weight->d0;
      w["dDelta"] = r.weight->dDelta;
      j["weight"] = w;
    }
  }
  json c;
  c["c1"] = r.conditions.c1;
  c["c2"] = r.conditions.c2;
  c["c3"] = r.conditions.c3;
  c["c4"] = r.conditions.c4;
  c["c5"] = r.conditions.c5;
  c["c1_determined"] = r.conditions.c1_determined;
  if (r.conditions.sus_x) {
    json arr = json::array();
    for (const auto& e : *r.conditions.sus_x) arr.push_back(to_string(e));
    c["sus_x"] = arr;
  }
  if (r.conditions.sus_o) {
    json arr = json::array();
    for (const auto& e : *r.conditions.sus_o) arr.push_back(to_string(e));
    c["sus_o"] = arr;
  }
  j["conditions"] = c;
  if (!r.note.empty()) j["note"] = r.note;
  return j.dump(2);
}

}  // namespace pmv
