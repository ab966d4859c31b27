#pragma once

#include <optional>

#include "pmv/polyhedra.hpp"
#include "pmv/settings.hpp"

namespace pmv {

enum class Mode { Sup, Inf };

/// The five emptiness/containment conditions driving the likelihood
/// tables, plus LP/ILP witnesses where available. Logic guaranteed:
/// C2 ⇒ C3 and C4 ⇒ C5 (Cone₀ ⊆ Cone∞).
struct ConditionReport {
  bool c1 = false;  // SuS_{n,B} = ∅ (no unstable integer histogram)
  bool c2 = false;  // CH(Π) ∩ Cone∞ = ∅
  bool c3 = false;  // CH(Π) ∩ Cone₀ = ∅
  bool c4 = false;  // CH(Π) ⊄ Cone∞ (some vertex escapes)
  bool c5 = false;  // CH(Π) ⊄ Cone₀
  bool c1_determined = true;  // false iff the ILP ran out of nodes

  std::optional<Vec> sus_x, sus_o;        // ¬C1 witness
  std::optional<Vec> cone_inf_mixture;    // ¬C2: α with Σαπ ∈ Cone∞
  std::optional<Vec> cone_zero_mixture;   // ¬C3: α with Σαπ ∈ Cone₀
  std::optional<std::size_t> cone_inf_escape;   // C4: escaping vertex
  std::optional<std::size_t> cone_zero_escape;  // C5: escaping vertex
};

/// One vertex–setting weight of the activation structure:
/// NegInfinity when the setting has empty SuS, ExpCase for the symbolic
/// −2n/log n weight, Poly for d₀ + dΔ·min{2·log(B+1)/log n, 1}.
struct Weight {
  enum class Kind { NegInfinity, ExpCase, Poly };
  Kind kind = Kind::NegInfinity;
  long d0 = 0;
  long dDelta = 0;
};

/// Exact three-way comparison at the given (n, B): −1 / 0 / +1.
/// Poly-vs-Poly reduces to integer power comparisons, never floats.
int compare_weights(const Weight& a, const Weight& b, long n,
                    const Rational& B);

/// Float rendering for reports (NegInfinity → −inf; ExpCase → −2n/ln n).
double weight_value(const Weight& w, long n, const Rational& B);

/// Per-setting weight summaries over the Π vertices at fixed (n, B).
struct ActivationGraph {
  long n = 0;
  Rational B;
  /// vertex_weights[j][i]: weight of (π_j, setting_i).
  std::vector<std::vector<Weight>> vertex_weights;
  /// Per-setting sup over the whole hull (not just vertices).
  std::vector<Weight> sup_weights;
};

enum class LikelihoodCase {
  Zero,
  Exponential,
  PTSqrtN,
  PTLinearN,
  PolyExponent,
  ThetaOne,
  Undetermined
};

enum class PTLinearSubcase { BelowThreshold, AboveThreshold, Knife };

struct ClassificationResult {
  LikelihoodCase kind = LikelihoodCase::Undetermined;
  Mode mode = Mode::Sup;

  // PTSqrtN payload (also d_inf for the PT-n poly subcase).
  std::size_t d0 = 0, dDelta = 0, dInf = 0;

  // PTLinearN payload.
  std::optional<BudgetThreshold> threshold;
  PTLinearSubcase subcase = PTLinearSubcase::Knife;

  // PolyExponent payload: exponent q − w on 1/√n, and the winning weight.
  double poly_exponent = 0.0;
  std::optional<Weight> weight;

  std::string symbolic_bound;
  ConditionReport conditions;
  std::string note;  // Undetermined reason, margins, partial bounds
};

struct ClassifyOptions {
  Rational knife_band{1, 10};   // ρ: Knife iff |B − t·n| < ρ·n, strictly
  long ilp_node_budget = 1000000;
  long big_m = 1000000;         // strict-outside margin a·π ≥ 1/M
  Rational psi_budget_c1{1};    // classify_psi requires B ≤ C₁·√n
  long enumeration_budget = 200000;  // LP calls for the inf pattern scan
};

/// Decides C1 by bounded ILP (x ≤ n·1, o ≤ ⌈B⌉·1), C2/C3 by mixture LP,
/// C4/C5 by per-vertex membership. Throws on invalid n, B or Π.
ConditionReport check_conditions(const PmvSetting& s,
                                 const std::vector<Vec>& pi_vertices, long n,
                                 const Rational& B,
                                 const ClassifyOptions& opts = {});

/// Single-setting likelihood table: Zero iff C1; Exponential iff C2
/// (sup) / C4 (inf); PT-√n with exponents (d₀, dΔ) iff ¬C3 (sup) / ¬C5
/// (inf); otherwise PT-n split against the Touch (sup) / Cover (inf)
/// budget threshold with the knife band ρ reported as Knife.
ClassificationResult classify_single(const PmvSetting& s,
                                     const std::vector<Vec>& pi_vertices,
                                     long n, const Rational& B, Mode mode,
                                     const ClassifyOptions& opts = {});

/// Multi-setting likelihood: w_max (sup) maximizes the per-setting sup
/// weights; w_min (inf) minimizes over realizable cone-membership
/// patterns of points of CH(Π). Requires B below every strictly
/// positive per-setting Touch threshold times n (else Undetermined).
ClassificationResult classify_multi(const SettingFamily& family,
                                    const std::vector<Vec>& pi_vertices,
                                    long n, const Rational& B, Mode mode,
                                    const ClassifyOptions& opts = {});

/// Data-adversary variant (rewrite budget a ψ fraction of the votes):
/// Zero iff C1; Exponential iff CH(Π) misses the ψ-neighborhood of
/// Cone₀ (LP over mixtures and single-unit transfers); else Θ(1).
/// Requires B ≤ C₁·√n (else Undetermined). Sup and Inf coincide.
ClassificationResult classify_psi(const PmvSetting& s,
                                  const std::vector<Vec>& pi_vertices,
                                  const Rational& psi, long n,
                                  const Rational& B,
                                  const ClassifyOptions& opts = {});

/// Weights of every (vertex, setting) pair plus per-setting sup weights.
ActivationGraph activation_graph(const SettingFamily& family,
                                 const std::vector<Vec>& pi_vertices, long n,
                                 const Rational& B,
                                 const ClassifyOptions& opts = {});

std::string mode_name(Mode mode);
std::string case_name(LikelihoodCase c);
std::string subcase_name(PTLinearSubcase c);

/// Full JSON rendering: case, mode, exponents, threshold, conditions,
/// symbolic bound, note.
std::string classification_to_json(const ClassificationResult& r);

}  // namespace pmv
