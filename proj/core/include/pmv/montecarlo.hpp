#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "pmv/oracles.hpp"
#include "pmv/settings.hpp"

namespace pmv {

/// Counter-derived SplitMix64 stream. Per-trial substreams come from
/// trial_stream(seed, trial), so trials are order-independent and safe
/// to evaluate concurrently; extending a run with fresh trial indices
/// reproduces the prefix exactly.
struct SplitMix64 {
  std::uint64_t state = 0;
  std::uint64_t next();
  double next_unit();  // [0, 1), 53-bit
};

SplitMix64 trial_stream(std::uint64_t seed, std::uint64_t trial);

/// Per-voter choice of Π vertex, length n, with the mixture it rounds.
struct VoterAssignment {
  std::vector<std::size_t> vertex_of;
  Vec alpha;
};

/// β_i = ⌊n·α_i⌋ copies of vertex i, remainder on the last vertex.
VoterAssignment round_mixture(const Vec& alpha, long n);

/// Categorical sampling tables: exact-rational CDF breakpoints per Π
/// vertex converted to double once at construction.
class HistogramSampler {
 public:
  explicit HistogramSampler(const std::vector<Vec>& pi_vertices);
  std::size_t dim() const { return q_; }
  /// One histogram of assign.vertex_of.size() independent draws.
  HistL sample(const VoterAssignment& assign, SplitMix64& rng) const;

 private:
  std::size_t q_ = 0;
  std::vector<std::vector<double>> cdf_;
};

struct EstimateResult {
  long trials = 0;
  long successes = 0;
  double p_hat = 0.0, ci_low = 0.0, ci_high = 0.0;  // Wilson, 95%
  std::uint64_t seed = 0;
  long n = 0;
  Rational B;
  Rational psi;  // 0 unless the data-adversary predicate is in play
  std::string setting, problem, rule;
};

/// 95% Wilson score interval (z = 1.959963984540054).
void wilson_interval(long successes, long trials, double& lo, double& hi);

using TrialPredicate = std::function<bool(const HistL&)>;

/// Estimates Pr[pred(histogram)] over `trials` independent PMV draws on
/// deterministic per-trial substreams; trials run concurrently. A
/// predicate failure aborts with the offending trial index in the
/// message.
EstimateResult estimate(const TrialPredicate& pred,
                        const VoterAssignment& assign,
                        const HistogramSampler& sampler, long trials,
                        std::uint64_t seed);

/// Membership in the family's unstable set compiled for per-trial speed:
/// integer row arithmetic, full operation-combination enumeration for
/// small budgets, and a sound per-row deficit prescreen before the exact
/// ILP fallback otherwise. operator() agrees with oracles::membership.
class FamilyMembership {
 public:
  FamilyMembership(const SettingFamily& family, const Rational& B);
  bool operator()(const HistL& hist) const;

 private:
  struct Row {
    std::vector<long> a;
    long rhs = 0;
  };
  struct Fast {
    const PmvSetting* s = nullptr;
    std::vector<Row> source, target;
    // Enumerated path: per combo, the per-target-row shifts.
    bool enumerated = false;
    std::vector<std::vector<long>> combo_shift;  // [combo][target row]
    // Prescreen path: B·(best per-unit-cost reduction) per target row.
    std::vector<Rational> max_reduction;
  };
  Rational b_;
  std::vector<Fast> settings_;
};

/// Can a rewrite of at most ⌊ψ·n⌋ sampled votes (single-unit transfers
/// bounded by per-type availability) land hist in the family's unstable
/// set at budget B? ψ = 0 degenerates to plain membership.
bool data_adversary_feasible(const HistL& hist, const SettingFamily& family,
                             const Rational& B, const Rational& psi,
                             long node_budget = 1000000);

/// Candidate sup-adversary mixtures over the Π vertices: the Cone₀
/// witness mixture of every setting whose hull section is nonempty,
/// plus a 1/8-step grid over the simplex (small vertex counts), plus
/// the plain vertices. Deduplicated, deterministic order.
std::vector<Vec> sup_adversary_mixtures(const SettingFamily& family,
                                        const std::vector<Vec>& pi_vertices);

struct ScanRecord {
  long n = 0;
  Rational B;
  EstimateResult est;
};

struct ScanConfig {
  std::vector<long> n_values;
  std::vector<Rational> b_values;
  Rational psi;            // 0 = membership predicate
  long trials = 100000;    // per grid point, before adaptation
  long min_successes = 0;  // > 0: double trials until reached (or cap)
  long max_trials = 0;     // 0 = 64 × trials
  std::uint64_t seed = 0;
  Vec alpha;  // mixture over Π vertices; empty = point mass on vertex 0
};

/// Row-per-grid-point estimates, deterministic at fixed config. The
/// optional on_record callback streams rows as points finish (in grid
/// order).
std::vector<ScanRecord> scan(
    const SettingFamily& family, const std::vector<Vec>& pi_vertices,
    const ScanConfig& cfg,
    const std::function<void(const ScanRecord&)>& on_record = nullptr);

enum class ScanAxis { N, B };

struct SlopeFit {
  double slope = 0.0, intercept = 0.0, stderr_slope = 0.0;
  long points_used = 0;
};

/// Least squares of log p̂ against log n (or log B) over the records
/// with successes ≥ min_successes (estimator stability floor).
/// Throws unless at least 3 usable points remain.
SlopeFit fit_slope(const std::vector<ScanRecord>& records, ScanAxis axis,
                   long min_successes = 25);

/// CSV with header n,B,psi,trials,successes,p_hat,ci_low,ci_high,seed,
/// setting,problem,rule — byte-stable for fixed inputs.
std::string scan_csv_header();
std::string scan_csv_row(const ScanRecord& r);

}  // namespace pmv
