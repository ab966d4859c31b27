#pragma once

#include <optional>

#include "pmv/elections.hpp"
#include "pmv/polyhedra.hpp"

namespace pmv {

enum class VoteOpKind { Change, Motivated, AddOnly, DeleteOnly, Generalized };

/// Rows of O: one histogram delta per allowed vote operation.
struct VoteOperations {
  VoteOpKind kind = VoteOpKind::Change;
  Matrix O;
  std::vector<std::string> labels;
};

/// Change: any R -> R'. Motivated(a,b): sources ranked b above a, any
/// target. AddOnly/DeleteOnly: +R / -R. Generalized: change + add + delete.
VoteOperations vote_ops(VoteOpKind kind, int m, int a = 0, int b = 0);

/// One instability setting <H_S, H_T, O, c>: histograms in the source
/// polyhedron that some priced operation combination within budget can
/// move into the target polyhedron.
struct PmvSetting {
  std::string name;
  std::size_t q = 0;
  Polyhedron source, target;
  Matrix ops;  // k x q
  std::vector<std::string> op_labels;
  Vec costs;   // k, strictly positive, min exactly 1
};

/// Throws PmvError unless shapes agree, costs are strictly positive and
/// the cheapest operation costs exactly 1.
void validate_setting(const PmvSetting& s);

enum class Problem {
  CM,
  MoV,
  CML,
  CCAV,
  CCDV,
  DCAV,
  DCDV,
  ECCAV,
  ECCDV,
  EDCAV,
  EDCDV,
  CB,
  DB,
  ECB,
  EDB
};

Problem problem_by_name(const std::string& name);
std::string problem_name(Problem x);
bool problem_needs_target(Problem x);  // control and bribery variants

struct SettingFamily {
  Problem problem = Problem::CM;
  VotingRule rule;
  std::vector<PmvSetting> settings;
};

/// Two-coordinate worked example: H_S = {x1 <= x2}, H_T = {x2 - x1 <= -1},
/// one unit-cost transfer op (+1, -1).
PmvSetting toy_setting();

/// Fixed-pair constructions used by the rate theorems (alternative a the
/// current winner, b the challenger; both default to the 1 -> 2 pair).
PmvSetting build_cm_scoring(const VotingRule& scoring, int a, int b);
PmvSetting build_cml_scoring(const VotingRule& scoring, int a, int b);
PmvSetting build_cm_pairwise(const VotingRule& rule);
PmvSetting build_cm_stv(int m);
enum class Parity { Odd, Even };
PmvSetting build_cm_copeland(const Rational& alpha, Parity parity, int m);

/// Models problem X under the rule as a union of settings. Scoring rules
/// support every problem via exact winner regions; maximin/ranked
/// pairs/Schulze/STV/Copeland support CM, MoV and the e-control variants
/// via the representative constructions above. `d` is the distinguished
/// alternative for control/bribery (default 1; default 2 for e-control
/// under non-scoring rules). `prices` applies to bribery families and
/// must align with vote_ops(Generalized, m).
SettingFamily build_family(Problem x, const VotingRule& rule, int d = 0,
                           const std::optional<Vec>& prices = std::nullopt);

/// JSON round trip. Rationals serialize as canonical "p" / "p/q" strings.
std::string setting_to_json(const PmvSetting& s);
PmvSetting setting_from_json(const std::string& text);
std::string family_to_json(const SettingFamily& f);
SettingFamily family_from_json(const std::string& text);

/// Π vertex list: {"vertices": [["1/2","1/2"], …]}.
std::string pi_to_json(const std::vector<Vec>& vertices);
std::vector<Vec> pi_from_json(const std::string& text);

}  // namespace pmv
