#include "pmv/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <optional>
#include <utility>

#include "pmv/lp.hpp"
#include "pmv/parallel.hpp"

namespace pmv {

namespace {

// SplitMix64 output finalizer; also used to derive stream keys.
std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

long to_long_exact(const Rational& r, const char* what) {
  if (r.get_den() != 1) throw PmvError(std::string(what) + ": not an integer");
  if (!r.get_num().fits_slong_p())
    throw PmvError(std::string(what) + ": out of long range");
  return r.get_num().get_si();
}

// lcm of the denominators of row, rhs, and extras (values that must
// become integral under the same row scaling).
mpz_class denominator_lcm(const Vec& row, const Rational& rhs,
                          const Vec& extras) {
  mpz_class m = 1;
  auto fold = [&m](const Rational& v) {
    mpz_class d = v.get_den();
    mpz_lcm(m.get_mpz_t(), m.get_mpz_t(), d.get_mpz_t());
  };
  for (const Rational& v : row) fold(v);
  fold(rhs);
  for (const Rational& v : extras) fold(v);
  return m;
}

// All o in Z^k>=0 with c.o <= B, lexicographic. false once out would
// exceed cap (out is then partial and must be discarded).
bool enumerate_combos(const Vec& costs, const Rational& B, std::size_t cap,
                      std::vector<std::vector<long>>& out) {
  std::vector<long> cur(costs.size(), 0);
  bool ok = true;
  std::function<void(std::size_t, const Rational&)> rec =
      [&](std::size_t idx, const Rational& left) {
        if (!ok) return;
        if (idx == costs.size()) {
          if (out.size() >= cap) {
            ok = false;
            return;
          }
          out.push_back(cur);
          return;
        }
        for (long c = 0;; ++c) {
          Rational used = Rational(c) * costs[idx];
          if (used > left) break;
          cur[idx] = c;
          rec(idx + 1, left - used);
          if (!ok) return;
        }
        cur[idx] = 0;
      };
  rec(0, B);
  return ok;
}

// Exact o-only reach check for one setting at a fixed histogram:
// exists o >= 0 integer, c.o <= B, A_T(x + o^T O) <= b_T.
bool reach_ilp_single(const PmvSetting& s, const Rational& B,
                      const HistL& hist) {
  const std::size_t q = s.q;
  const std::size_t k = s.ops.rows();
  Vec x(q);
  for (std::size_t j = 0; j < q; ++j) x[j] = Rational(hist[j]);
  LinearProgram p(k);
  p.set_nonneg(0, k);
  for (std::size_t r = 0; r < k; ++r) p.set_upper(r, floor_rat(B / s.costs[r]));
  p.add_leq(s.costs, B);
  for (std::size_t i = 0; i < s.target.A.rows(); ++i) {
    Vec a = s.target.A.row(i);
    Vec row(k);
    for (std::size_t r = 0; r < k; ++r) row[r] = dot(a, s.ops.row(r));
    p.add_leq(std::move(row), s.target.b[i] - dot(a, x));
  }
  auto res = ilp_feasible(p, std::vector<bool>(k, true), 100000);
  if (res.status == IlpStatus::Exhausted)
    throw PmvError("membership fast path: ILP node budget exhausted");
  return res.status == IlpStatus::Feasible;
}

}  // namespace

std::uint64_t SplitMix64::next() {
  state += 0x9E3779B97F4A7C15ULL;
  return mix64(state);
}

double SplitMix64::next_unit() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

SplitMix64 trial_stream(std::uint64_t seed, std::uint64_t trial) {
  // Finalizing the trial index before mixing with the seed starts each
  // trial at a well-separated position of the shared state orbit.
  return SplitMix64{mix64(seed ^ mix64(trial + 0x9E3779B97F4A7C15ULL))};
}

VoterAssignment round_mixture(const Vec& alpha, long n) {
  if (n < 0) throw PmvError("round_mixture: n must be nonnegative");
  validate_distribution(alpha, /*allow_zero=*/true);
  VoterAssignment va;
  va.alpha = alpha;
  va.vertex_of.reserve(static_cast<std::size_t>(n));
  long used = 0;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    long count;
    if (i + 1 == alpha.size()) {
      count = n - used;  // remainder lands on the last vertex
    } else {
      count = to_long_exact(floor_rat(Rational(n) * alpha[i]), "round_mixture");
    }
    used += count;
    va.vertex_of.insert(va.vertex_of.end(), static_cast<std::size_t>(count), i);
  }
  return va;
}

HistogramSampler::HistogramSampler(const std::vector<Vec>& pi_vertices) {
  if (pi_vertices.empty())
    throw PmvError("sampler: needs at least one distribution");
  q_ = pi_vertices.front().size();
  cdf_.reserve(pi_vertices.size());
  for (const Vec& pi : pi_vertices) {
    if (pi.size() != q_)
      throw PmvError("sampler: inconsistent distribution dimensions");
    validate_distribution(pi, /*allow_zero=*/true);
    std::vector<double> c(q_);
    Rational acc = 0;
    for (std::size_t j = 0; j < q_; ++j) {
      acc += pi[j];
      c[j] = mpq_get_d(acc.get_mpq_t());
    }
    c.back() = 1.0;  // acc is exactly 1; forcing it closes any fp gap
    cdf_.push_back(std::move(c));
  }
}

HistL HistogramSampler::sample(const VoterAssignment& assign,
                               SplitMix64& rng) const {
  HistL h(q_, 0);
  for (std::size_t v : assign.vertex_of) {
    if (v >= cdf_.size()) throw PmvError("sample: vertex index out of range");
    const std::vector<double>& c = cdf_[v];
    double u = rng.next_unit();
    std::size_t j = 0;
    while (j + 1 < q_ && u >= c[j]) ++j;
    ++h[j];
  }
  return h;
}

void wilson_interval(long successes, long trials, double& lo, double& hi) {
  if (trials <= 0) {
    lo = 0.0;
    hi = 1.0;
    return;
  }
  constexpr double z = 1.959963984540054;
  const double t = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / t;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / t;
  const double center = p + z2 / (2.0 * t);
  const double half = std::sqrt(p * (1.0 - p) / t + z2 / (4.0 * t * t)) * z;
  lo = std::max(0.0, (center - half) / denom);
  hi = std::min(1.0, (center + half) / denom);
  // The edge bounds are exactly 0 and 1; don't leak rounding residue.
  if (successes == 0) lo = 0.0;
  if (successes == trials) hi = 1.0;
}

EstimateResult estimate(const TrialPredicate& pred,
                        const VoterAssignment& assign,
                        const HistogramSampler& sampler, long trials,
                        std::uint64_t seed) {
  if (!pred) throw PmvError("estimate: empty predicate");
  if (trials <= 0) throw PmvError("estimate: trials must be positive");
  std::vector<unsigned char> hit(static_cast<std::size_t>(trials), 0);
  parallel_for(static_cast<std::size_t>(trials), [&](std::size_t i) {
    SplitMix64 rng = trial_stream(seed, static_cast<std::uint64_t>(i));
    HistL h = sampler.sample(assign, rng);
    bool ok;
    try {
      ok = pred(h);
    } catch (const std::exception& e) {
      throw PmvError("estimate: predicate failed on trial " +
                     std::to_string(i) + " of seed " + std::to_string(seed) +
                     ": " + e.what());
    }
    hit[i] = ok ? 1 : 0;
  });
  EstimateResult r;
  r.trials = trials;
  r.successes = std::accumulate(hit.begin(), hit.end(), 0L);
  r.p_hat = static_cast<double>(r.successes) / static_cast<double>(trials);
  wilson_interval(r.successes, r.trials, r.ci_low, r.ci_high);
  r.seed = seed;
  r.n = static_cast<long>(assign.vertex_of.size());
  return r;
}

FamilyMembership::FamilyMembership(const SettingFamily& family,
                                   const Rational& B)
    : b_(B) {
  if (B < 0) throw PmvError("membership: budget must be nonnegative");
  constexpr std::size_t kComboCap = 20000;
  for (const PmvSetting& s : family.settings) {
    Fast f;
    f.s = &s;
    const std::size_t q = s.q;
    const std::size_t k = s.ops.rows();
    for (std::size_t i = 0; i < s.source.A.rows(); ++i) {
      Vec row = s.source.A.row(i);
      Rational m(denominator_lcm(row, s.source.b[i], {}));
      Row r;
      r.a.resize(q);
      for (std::size_t j = 0; j < q; ++j)
        r.a[j] = to_long_exact(row[j] * m, "membership source row");
      r.rhs = to_long_exact(s.source.b[i] * m, "membership source rhs");
      f.source.push_back(std::move(r));
    }
    // Target rows scale together with their per-operation dots so combo
    // shifts stay in long arithmetic.
    std::vector<Vec> op_dots(s.target.A.rows());
    for (std::size_t i = 0; i < s.target.A.rows(); ++i) {
      Vec row = s.target.A.row(i);
      Vec dots(k);
      for (std::size_t r = 0; r < k; ++r) dots[r] = dot(row, s.ops.row(r));
      Rational m(denominator_lcm(row, s.target.b[i], dots));
      Row tr;
      tr.a.resize(q);
      for (std::size_t j = 0; j < q; ++j)
        tr.a[j] = to_long_exact(row[j] * m, "membership target row");
      tr.rhs = to_long_exact(s.target.b[i] * m, "membership target rhs");
      f.target.push_back(std::move(tr));
      for (Rational& d : dots) d *= m;
      op_dots[i] = std::move(dots);
    }
    std::vector<std::vector<long>> combos;
    if (enumerate_combos(s.costs, B, kComboCap, combos)) {
      f.enumerated = true;
      f.combo_shift.reserve(combos.size());
      for (const std::vector<long>& o : combos) {
        std::vector<long> shift(f.target.size(), 0);
        for (std::size_t i = 0; i < f.target.size(); ++i) {
          Rational acc = 0;
          for (std::size_t r = 0; r < k; ++r)
            if (o[r] != 0) acc += Rational(o[r]) * op_dots[i][r];
          shift[i] = to_long_exact(acc, "membership shift");
        }
        f.combo_shift.push_back(std::move(shift));
      }
    } else {
      // Sound prescreen bound: one budget unit on operation r reduces
      // target row i by at most max(0, -t_{i,r})/c_r.
      f.max_reduction.resize(f.target.size());
      for (std::size_t i = 0; i < f.target.size(); ++i) {
        Rational best = 0;
        for (std::size_t r = 0; r < k; ++r) {
          Rational red = -op_dots[i][r] / s.costs[r];
          if (red > best) best = red;
        }
        f.max_reduction[i] = B * best;
      }
    }
    settings_.push_back(std::move(f));
  }
}

bool FamilyMembership::operator()(const HistL& hist) const {
  for (const Fast& f : settings_) {
    const std::size_t q = f.s->q;
    if (hist.size() != q)
      throw PmvError("membership: histogram dimension mismatch");
    bool inside = true;
    for (const Row& r : f.source) {
      long acc = 0;
      for (std::size_t j = 0; j < q; ++j) acc += r.a[j] * hist[j];
      if (acc > r.rhs) {
        inside = false;
        break;
      }
    }
    if (!inside) continue;
    std::vector<long> base(f.target.size());
    for (std::size_t i = 0; i < f.target.size(); ++i) {
      long acc = 0;
      for (std::size_t j = 0; j < q; ++j) acc += f.target[i].a[j] * hist[j];
      base[i] = acc;
    }
    if (f.enumerated) {
      for (const std::vector<long>& shift : f.combo_shift) {
        bool all = true;
        for (std::size_t i = 0; i < base.size(); ++i) {
          if (base[i] + shift[i] > f.target[i].rhs) {
            all = false;
            break;
          }
        }
        if (all) return true;
      }
      continue;
    }
    bool possible = true;
    for (std::size_t i = 0; i < base.size(); ++i) {
      long deficit = base[i] - f.target[i].rhs;
      if (deficit > 0 && Rational(deficit) > f.max_reduction[i]) {
        possible = false;
        break;
      }
    }
    if (possible && reach_ilp_single(*f.s, b_, hist)) return true;
  }
  return false;
}

bool data_adversary_feasible(const HistL& hist, const SettingFamily& family,
                             const Rational& B, const Rational& psi,
                             long node_budget) {
  if (psi < 0) throw PmvError("data adversary: psi must be nonnegative");
  if (B < 0) throw PmvError("data adversary: budget must be nonnegative");
  long n = 0;
  for (long v : hist) {
    if (v < 0) throw PmvError("data adversary: negative histogram entry");
    n += v;
  }
  const Rational cap = floor_rat(psi * Rational(n));
  for (const PmvSetting& s : family.settings) {
    const std::size_t q = s.q;
    if (hist.size() != q)
      throw PmvError("data adversary: histogram dimension mismatch");
    const std::size_t k = s.ops.rows();
    Vec x(q);
    for (std::size_t j = 0; j < q; ++j) x[j] = Rational(hist[j]);

    // Variables: one transfer count per ordered type pair, then o.
    std::vector<std::pair<std::size_t, std::size_t>> moves;
    for (std::size_t i = 0; i < q; ++i)
      for (std::size_t j = 0; j < q; ++j)
        if (i != j) moves.emplace_back(i, j);
    const std::size_t nm = moves.size();
    LinearProgram p(nm + k);
    p.set_nonneg(0, nm + k);
    for (std::size_t t = 0; t < nm; ++t)
      p.set_upper(t, std::min(Rational(hist[moves[t].first]), cap));
    for (std::size_t r = 0; r < k; ++r)
      p.set_upper(nm + r, floor_rat(B / s.costs[r]));

    {
      Vec row(nm + k, 0);
      for (std::size_t t = 0; t < nm; ++t) row[t] = 1;
      p.add_leq(std::move(row), cap);  // total rewrites <= floor(psi n)
    }
    for (std::size_t i = 0; i < q; ++i) {
      Vec row(nm + k, 0);
      for (std::size_t t = 0; t < nm; ++t)
        if (moves[t].first == i) row[t] = 1;
      p.add_leq(std::move(row), Rational(hist[i]));  // per-type availability
    }
    // chi = x + transfers; A_S chi <= b_S.
    for (std::size_t i = 0; i < s.source.A.rows(); ++i) {
      Vec a = s.source.A.row(i);
      Vec row(nm + k, 0);
      for (std::size_t t = 0; t < nm; ++t)
        row[t] = a[moves[t].second] - a[moves[t].first];
      p.add_leq(std::move(row), s.source.b[i] - dot(a, x));
    }
    {
      Vec row(nm + k, 0);
      for (std::size_t r = 0; r < k; ++r) row[nm + r] = s.costs[r];
      p.add_leq(std::move(row), B);
    }
    // A_T (chi + o^T O) <= b_T.
    for (std::size_t i = 0; i < s.target.A.rows(); ++i) {
      Vec a = s.target.A.row(i);
      Vec row(nm + k, 0);
      for (std::size_t t = 0; t < nm; ++t)
        row[t] = a[moves[t].second] - a[moves[t].first];
      for (std::size_t r = 0; r < k; ++r) row[nm + r] = dot(a, s.ops.row(r));
      p.add_leq(std::move(row), s.target.b[i] - dot(a, x));
    }

    auto res = ilp_feasible(p, std::vector<bool>(nm + k, true), node_budget);
    if (res.status == IlpStatus::Exhausted)
      throw PmvError("data adversary: ILP node budget exhausted");
    if (res.status == IlpStatus::Feasible) return true;
  }
  return false;
}

std::vector<Vec> sup_adversary_mixtures(const SettingFamily& family,
                                        const std::vector<Vec>& pi_vertices) {
  if (pi_vertices.empty()) throw PmvError("sup adversary: empty vertex list");
  const std::size_t nv = pi_vertices.size();
  std::vector<Vec> out;
  auto push_unique = [&out](const Vec& v) {
    for (const Vec& w : out)
      if (w == v) return;
    out.push_back(v);
  };
  // Witness mixtures alpha with sum(alpha pi) inside a setting's Cone0.
  for (const PmvSetting& s : family.settings) {
    LinearProgram p(nv);
    p.set_nonneg(0, nv);
    p.add_eq(Vec(nv, 1), 1);
    auto add_cone_rows = [&](const Polyhedron& poly) {
      for (std::size_t i = 0; i < poly.A.rows(); ++i) {
        Vec a = poly.A.row(i);
        Vec row(nv);
        for (std::size_t v = 0; v < nv; ++v) row[v] = dot(a, pi_vertices[v]);
        p.add_leq(std::move(row), 0);
      }
    };
    add_cone_rows(s.source);
    add_cone_rows(s.target);
    auto res = lp_solve(p);
    if (res.status == LpStatus::Optimal) push_unique(res.x);
  }
  if (nv <= 4) {
    // 1/8-step grid over the mixture simplex.
    std::vector<long> comp(nv, 0);
    std::function<void(std::size_t, long)> rec = [&](std::size_t idx,
                                                     long left) {
      if (idx + 1 == nv) {
        comp[idx] = left;
        Vec a(nv);
        for (std::size_t i = 0; i < nv; ++i) a[i] = rat(comp[i], 8);
        push_unique(a);
        return;
      }
      for (long c = 0; c <= left; ++c) {
        comp[idx] = c;
        rec(idx + 1, left - c);
      }
    };
    rec(0, 8);
  } else {
    for (std::size_t v = 0; v < nv; ++v) {
      Vec a(nv, 0);
      a[v] = 1;
      push_unique(a);
    }
  }
  return out;
}

std::vector<ScanRecord> scan(
    const SettingFamily& family, const std::vector<Vec>& pi_vertices,
    const ScanConfig& cfg,
    const std::function<void(const ScanRecord&)>& on_record) {
  if (cfg.n_values.empty() || cfg.b_values.empty())
    throw PmvError("scan: empty grid");
  if (cfg.trials <= 0) throw PmvError("scan: trials must be positive");
  HistogramSampler sampler(pi_vertices);
  Vec alpha = cfg.alpha;
  if (alpha.empty()) {
    alpha = Vec(pi_vertices.size(), 0);
    alpha[0] = 1;
  }
  if (alpha.size() != pi_vertices.size())
    throw PmvError("scan: mixture length must match the vertex count");
  const long max_trials =
      cfg.max_trials > 0 ? cfg.max_trials : 64 * cfg.trials;
  const std::string setting_label =
      family.settings.size() == 1
          ? family.settings.front().name
          : "union-" + std::to_string(family.settings.size());
  std::vector<ScanRecord> records;
  std::uint64_t point_index = 0;
  for (long n : cfg.n_values) {
    VoterAssignment assign = round_mixture(alpha, n);
    for (const Rational& B : cfg.b_values) {
      const std::uint64_t point_seed =
          mix64(cfg.seed ^ mix64(point_index + 0x6C62272E07BB0142ULL));
      std::optional<FamilyMembership> fm;
      TrialPredicate pred;
      if (cfg.psi == 0) {
        fm.emplace(family, B);
        pred = [&fm](const HistL& h) { return (*fm)(h); };
      } else {
        const Rational psi = cfg.psi;
        pred = [&family, B, psi](const HistL& h) {
          return data_adversary_feasible(h, family, B, psi);
        };
      }
      long t = cfg.trials;
      // Extending the trial range is consistent under per-trial
      // substreams, so a rerun at 2t reproduces the first t outcomes.
      EstimateResult est = estimate(pred, assign, sampler, t, point_seed);
      while (cfg.min_successes > 0 && est.successes < cfg.min_successes &&
             t < max_trials) {
        t = std::min(2 * t, max_trials);
        est = estimate(pred, assign, sampler, t, point_seed);
      }
      est.n = n;
      est.B = B;
      est.psi = cfg.psi;
      est.setting = setting_label;
      est.problem = problem_name(family.problem);
      est.rule = family.rule.name;
      ScanRecord rec{n, B, std::move(est)};
      if (on_record) on_record(rec);
      records.push_back(std::move(rec));
      ++point_index;
    }
  }
  return records;
}

SlopeFit fit_slope(const std::vector<ScanRecord>& records, ScanAxis axis,
                   long min_successes) {
  std::vector<double> xs, ys;
  for (const ScanRecord& r : records) {
    if (r.est.successes < min_successes || r.est.successes <= 0) continue;
    double x;
    if (axis == ScanAxis::N) {
      x = std::log(static_cast<double>(r.n));
    } else {
      if (r.B <= 0) throw PmvError("fit_slope: B axis needs positive budgets");
      x = std::log(mpq_get_d(r.B.get_mpq_t()));
    }
    xs.push_back(x);
    ys.push_back(std::log(r.est.p_hat));
  }
  const std::size_t k = xs.size();
  if (k < 3)
    throw PmvError(
        "fit_slope: need at least 3 grid points meeting the success floor");
  double xbar = 0, ybar = 0;
  for (std::size_t i = 0; i < k; ++i) {
    xbar += xs[i];
    ybar += ys[i];
  }
  xbar /= static_cast<double>(k);
  ybar /= static_cast<double>(k);
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < k; ++i) {
    sxx += (xs[i] - xbar) * (xs[i] - xbar);
    sxy += (xs[i] - xbar) * (ys[i] - ybar);
  }
  if (sxx == 0) throw PmvError("fit_slope: degenerate axis values");
  SlopeFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = ybar - fit.slope * xbar;
  double ss = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const double res = ys[i] - (fit.intercept + fit.slope * xs[i]);
    ss += res * res;
  }
  fit.stderr_slope = std::sqrt(ss / static_cast<double>(k - 2) / sxx);
  fit.points_used = static_cast<long>(k);
  return fit;
}

namespace {

std::string fmt_double(double v) {
  char b[64];
  std::snprintf(b, sizeof b, "%.12g", v);
  return b;
}

}  // namespace

std::string scan_csv_header() {
  return "n,B,psi,trials,successes,p_hat,ci_low,ci_high,seed,setting,problem,"
         "rule\n";
}

std::string scan_csv_row(const ScanRecord& r) {
  std::string s;
  s += std::to_string(r.n);
  s += ',';
  s += to_string(r.B);
  s += ',';
  s += to_string(r.est.psi);
  s += ',';
  s += std::to_string(r.est.trials);
  s += ',';
  s += std::to_string(r.est.successes);
  s += ',';
  s += fmt_double(r.est.p_hat);
  s += ',';
  s += fmt_double(r.est.ci_low);
  s += ',';
  s += fmt_double(r.est.ci_high);
  s += ',';
  s += std::to_string(r.est.seed);
  s += ',';
  s += r.est.setting;
  s += ',';
  s += r.est.problem;
  s += ',';
  s += r.est.rule;
  s += '\n';
  return s;
}

}  // namespace pmv
