#include "pmv/settings.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <map>

namespace pmv {

using nlohmann::json;

VoteOperations vote_ops(VoteOpKind kind, int m, int a, int b) {
  const auto& rs = all_rankings(m);
  const std::size_t q = rs.size();
  VoteOperations out;
  out.kind = kind;

  auto prefers = [&](std::size_t i) {
    // true iff ranking i puts b above a
    for (int alt : rs[i]) {
      if (alt == b) return true;
      if (alt == a) return false;
    }
    return false;
  };
  auto add_change = [&](std::size_t src, std::size_t dst) {
    Vec row = zeros(q);
    row[src] = -1;
    row[dst] = 1;
    out.O.append_row(row);
    out.labels.push_back(ranking_name(rs[src]) + " -> " + ranking_name(rs[dst]));
  };
  auto add_add = [&](std::size_t r) {
    Vec row = zeros(q);
    row[r] = 1;
    out.O.append_row(row);
    out.labels.push_back("+" + ranking_name(rs[r]));
  };
  auto add_delete = [&](std::size_t r) {
    Vec row = zeros(q);
    row[r] = -1;
    out.O.append_row(row);
    out.labels.push_back("-" + ranking_name(rs[r]));
  };

  switch (kind) {
    case VoteOpKind::Change:
      for (std::size_t s = 0; s < q; ++s)
        for (std::size_t d = 0; d < q; ++d)
          if (s != d) add_change(s, d);
      break;
    case VoteOpKind::Motivated:
      if (a == b || a < 1 || b < 1 || a > m || b > m)
        throw PmvError("vote_ops: Motivated needs distinct alternatives a, b");
      for (std::size_t s = 0; s < q; ++s) {
        if (!prefers(s)) continue;
        for (std::size_t d = 0; d < q; ++d)
          if (s != d) add_change(s, d);
      }
      break;
    case VoteOpKind::AddOnly:
      for (std::size_t r = 0; r < q; ++r) add_add(r);
      break;
    case VoteOpKind::DeleteOnly:
      for (std::size_t r = 0; r < q; ++r) add_delete(r);
      break;
    case VoteOpKind::Generalized:
      for (std::size_t s = 0; s < q; ++s)
        for (std::size_t d = 0; d < q; ++d)
          if (s != d) add_change(s, d);
      for (std::size_t r = 0; r < q; ++r) add_add(r);
      for (std::size_t r = 0; r < q; ++r) add_delete(r);
      break;
  }
  if (out.O.rows() == 0) out.O = Matrix(0, q);
  return out;
}

void validate_setting(const PmvSetting& s) {
  if (s.q == 0) throw PmvError("setting '" + s.name + "': q must be positive");
  if (s.source.A.cols() != s.q || s.target.A.cols() != s.q)
    throw PmvError("setting '" + s.name + "': polyhedra dimension mismatch");
  if (s.source.A.rows() != s.source.b.size() ||
      s.target.A.rows() != s.target.b.size())
    throw PmvError("setting '" + s.name + "': rhs length mismatch");
  if (s.ops.rows() == 0 || s.ops.cols() != s.q)
    throw PmvError("setting '" + s.name + "': operation matrix shape");
  if (s.costs.size() != s.ops.rows() || s.op_labels.size() != s.ops.rows())
    throw PmvError("setting '" + s.name + "': costs/labels length mismatch");
  Rational mn;
  bool first = true;
  for (const auto& c : s.costs) {
    if (c <= 0)
      throw PmvError("setting '" + s.name + "': costs must be strictly positive");
    if (first || c < mn) mn = c;
    first = false;
  }
  if (mn != 1)
    throw PmvError("setting '" + s.name +
                   "': cheapest operation must cost exactly 1, got " +
                   to_string(mn));
}

namespace {

const std::map<std::string, Problem>& problem_names() {
  static const std::map<std::string, Problem> names = {
      {"cm", Problem::CM},       {"mov", Problem::MoV},
      {"cml", Problem::CML},     {"ccav", Problem::CCAV},
      {"ccdv", Problem::CCDV},   {"dcav", Problem::DCAV},
      {"dcdv", Problem::DCDV},   {"e-ccav", Problem::ECCAV},
      {"e-ccdv", Problem::ECCDV},{"e-dcav", Problem::EDCAV},
      {"e-dcdv", Problem::EDCDV},{"cb", Problem::CB},
      {"db", Problem::DB},       {"e-cb", Problem::ECB},
      {"e-db", Problem::EDB},
  };
  return names;
}

}  // namespace

Problem problem_by_name(const std::string& name) {
  std::string k = name;
  std::transform(k.begin(), k.end(), k.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  auto it = problem_names().find(k);
  if (it == problem_names().end())
    throw PmvError("unknown problem '" + name + "'");
  return it->second;
}

std::string problem_name(Problem x) {
  for (const auto& [k, v] : problem_names())
    if (v == x) return k;
  return "?";
}

bool problem_needs_target(Problem x) {
  switch (x) {
    case Problem::CM:
    case Problem::MoV:
    case Problem::CML:
      return false;
    default:
      return true;
  }
}

PmvSetting toy_setting() {
  PmvSetting s;
  s.name = "toy";
  s.q = 2;
  s.source.A = Matrix::from_rows({{Rational(1), Rational(-1)}});
  s.source.b = {Rational(0)};
  s.target.A = Matrix::from_rows({{Rational(-1), Rational(1)}});
  s.target.b = {Rational(-1)};
  s.ops = Matrix::from_rows({{Rational(1), Rational(-1)}});
  s.op_labels = {"2 -> 1"};
  s.costs = {Rational(1)};
  validate_setting(s);
  return s;
}

namespace {

Polyhedron nonneg_rows(std::size_t q) {
  Polyhedron p;
  p.A = Matrix(0, q);
  for (std::size_t i = 0; i < q; ++i) {
    Vec row = zeros(q);
    row[i] = -1;
    p.A.append_row(row);
    p.b.push_back(Rational(0));
  }
  return p;
}

void add_row(Polyhedron& p, Vec row, Rational rhs) {
  p.A.append_row(std::move(row));
  p.b.push_back(std::move(rhs));
}

void append_nonneg(Polyhedron& p, std::size_t q) {
  Polyhedron nn = nonneg_rows(q);
  p = intersect(p, nn);
}

/// { x >= 0 : w is the (lexicographically tie-broken) scoring winner }.
Polyhedron scoring_winner_region(const VotingRule& rule, int w) {
  const std::size_t q = factorial(rule.m);
  Polyhedron p;
  p.A = Matrix(0, q);
  for (int i = 1; i <= rule.m; ++i) {
    if (i == w) continue;
    add_row(p, score_diff_vector(rule.scores, i, w, rule.m),
            Rational(i < w ? -1 : 0));
  }
  append_nonneg(p, q);
  return p;
}

bool is_veto_like(const VotingRule& rule) {
  // Veto up to affine rescaling: all but the last score equal.
  return rule.scores.front() == rule.scores[rule.m - 2];
}

PmvSetting assemble(std::string name, Polyhedron src, Polyhedron tgt,
                    VoteOperations ops, std::optional<Vec> prices = {}) {
  PmvSetting s;
  s.name = std::move(name);
  s.q = src.A.cols();
  s.source = std::move(src);
  s.target = std::move(tgt);
  s.ops = std::move(ops.O);
  s.op_labels = std::move(ops.labels);
  if (prices) {
    s.costs = std::move(*prices);
  } else {
    s.costs = Vec(s.ops.rows(), Rational(1));
  }
  validate_setting(s);
  return s;
}

}  // namespace

PmvSetting build_cm_scoring(const VotingRule& scoring, int a, int b) {
  if (scoring.family != VotingRule::Family::Scoring)
    throw PmvError("build_cm_scoring: needs a positional scoring rule");
  const int m = scoring.m;
  if (a == b || a < 1 || b < 1 || a > m || b > m)
    throw PmvError("build_cm_scoring: bad pair");
  const std::size_t q = factorial(m);

  // Source: a wins with b the strict runner-up.
  Polyhedron src;
  src.A = Matrix(0, q);
  add_row(src, score_diff_vector(scoring.scores, b, a, m),
          Rational(b < a ? -1 : 0));
  for (int i = 1; i <= m; ++i) {
    if (i == a || i == b) continue;
    add_row(src, score_diff_vector(scoring.scores, i, b, m), Rational(-1));
  }
  append_nonneg(src, q);

  // Target: b beats everyone strictly.
  Polyhedron tgt;
  tgt.A = Matrix(0, q);
  for (int i = 1; i <= m; ++i) {
    if (i == b) continue;
    add_row(tgt, score_diff_vector(scoring.scores, i, b, m), Rational(-1));
  }
  append_nonneg(tgt, q);

  return assemble("cm-" + scoring.name + "-" + std::to_string(a) + "to" +
                      std::to_string(b),
                  std::move(src), std::move(tgt),
                  vote_ops(VoteOpKind::Motivated, m, a, b));
}

PmvSetting build_cml_scoring(const VotingRule& scoring, int a, int b) {
  if (scoring.family != VotingRule::Family::Scoring)
    throw PmvError("build_cml_scoring: needs a positional scoring rule");
  if (is_veto_like(scoring))
    throw PmvError("build_cml_scoring: the veto-like score vector is excluded");
  const int m = scoring.m;
  if (a == b || a < 1 || b < 1 || a > m || b > m)
    throw PmvError("build_cml_scoring: bad pair");
  const std::size_t q = factorial(m);

  // Source: a wins and b is the strict loser.
  Polyhedron src;
  src.A = Matrix(0, q);
  for (int i = 1; i <= m; ++i) {
    if (i == a) continue;
    add_row(src, score_diff_vector(scoring.scores, i, a, m),
            Rational(i < a ? -1 : 0));
  }
  for (int i = 1; i <= m; ++i) {
    if (i == a || i == b) continue;
    add_row(src, score_diff_vector(scoring.scores, b, i, m), Rational(-1));
  }
  append_nonneg(src, q);

  Polyhedron tgt = scoring_winner_region(scoring, b);
  return assemble("cml-" + scoring.name + "-" + std::to_string(a) + "to" +
                      std::to_string(b),
                  std::move(src), std::move(tgt),
                  vote_ops(VoteOpKind::Motivated, m, a, b));
}

PmvSetting build_cm_pairwise(const VotingRule& rule) {
  switch (rule.family) {
    case VotingRule::Family::Maximin:
    case VotingRule::Family::RankedPairs:
    case VotingRule::Family::Schulze:
      break;
    default:
      throw PmvError("build_cm_pairwise: needs maximin, ranked pairs, or Schulze");
  }
  const int m = rule.m;
  if (m < 3) throw PmvError("build_cm_pairwise: needs m >= 3");
  const std::size_t q = factorial(m);

  auto edge_rows = [&](Polyhedron& p) {
    // Cycle 1 -> 2 -> 3 -> 1 strict, and 1,2,3 all beat every i >= 4.
    add_row(p, pair_diff_vector(2, 1, m), Rational(-1));
    add_row(p, pair_diff_vector(3, 2, m), Rational(-1));
    add_row(p, pair_diff_vector(1, 3, m), Rational(-1));
    for (int j = 1; j <= 3; ++j)
      for (int i = 4; i <= m; ++i)
        add_row(p, pair_diff_vector(i, j, m), Rational(-1));
    // w(1,i) strictly exceeds w(1,2) for i >= 4.
    for (int i = 4; i <= m; ++i)
      add_row(p, sub(pair_diff_vector(1, 2, m), pair_diff_vector(1, i, m)),
              Rational(-1));
  };

  Polyhedron src;
  src.A = Matrix(0, q);
  edge_rows(src);
  // w(2,3) > w(1,2) >= w(3,1).
  add_row(src, sub(pair_diff_vector(1, 2, m), pair_diff_vector(2, 3, m)),
          Rational(-1));
  add_row(src, sub(pair_diff_vector(3, 1, m), pair_diff_vector(1, 2, m)),
          Rational(0));
  append_nonneg(src, q);

  Polyhedron tgt;
  tgt.A = Matrix(0, q);
  edge_rows(tgt);
  // w(2,3) > w(3,1) > w(1,2).
  add_row(tgt, sub(pair_diff_vector(3, 1, m), pair_diff_vector(2, 3, m)),
          Rational(-1));
  add_row(tgt, sub(pair_diff_vector(1, 2, m), pair_diff_vector(3, 1, m)),
          Rational(-1));
  append_nonneg(tgt, q);

  return assemble("cm-" + rule.name, std::move(src), std::move(tgt),
                  vote_ops(VoteOpKind::Motivated, m, 1, 2));
}

PmvSetting build_cm_stv(int m) {
  if (m < 3) throw PmvError("build_cm_stv: needs m >= 3");
  const std::size_t q = factorial(m);

  // Elimination chain: in round i (1-based), alternative m+1-i has the
  // strictly lowest plurality score among the remaining ones and drops.
  auto chain_rows = [&](Polyhedron& p) {
    for (int i = 1; i <= m - 4; ++i) {
      std::vector<int> removed;
      for (int r = m + 2 - i; r <= m; ++r) removed.push_back(r);
      int dropping = m + 1 - i;
      for (int j = 1; j <= m - i; ++j) {
        if (j == dropping) continue;
        add_row(p, stv_score_diff_vector(removed, dropping, j, m),
                Rational(-1));
      }
    }
  };
  std::vector<int> b3;  // eliminated before the three-way round
  for (int r = 4; r <= m; ++r) b3.push_back(r);
  auto with1 = b3;
  with1.push_back(1);
  auto with2 = b3;
  with2.push_back(2);

  Polyhedron src;
  src.A = Matrix(0, q);
  chain_rows(src);
  // Round with {1,2,3}: 3 strictly highest, 2 no higher than 1 (so 2 drops),
  // then 1 beats 3 head to head; 2 would also beat 3 had 1 dropped.
  add_row(src, stv_score_diff_vector(b3, 2, 1, m), Rational(0));
  add_row(src, stv_score_diff_vector(b3, 1, 3, m), Rational(-1));
  add_row(src, stv_score_diff_vector(with1, 3, 2, m), Rational(-1));
  add_row(src, stv_score_diff_vector(with2, 3, 1, m), Rational(-1));
  append_nonneg(src, q);

  Polyhedron tgt;
  tgt.A = Matrix(0, q);
  chain_rows(tgt);
  // Round with {1,2,3}: 1 strictly lowest and drops, then 2 beats 3.
  add_row(tgt, stv_score_diff_vector(b3, 1, 2, m), Rational(-1));
  add_row(tgt, stv_score_diff_vector(b3, 1, 3, m), Rational(-1));
  add_row(tgt, stv_score_diff_vector(with1, 3, 2, m), Rational(-1));
  append_nonneg(tgt, q);

  return assemble("cm-stv", std::move(src), std::move(tgt),
                  vote_ops(VoteOpKind::Motivated, m, 1, 2));
}

PmvSetting build_cm_copeland(const Rational& alpha, Parity parity, int m) {
  if (alpha < 0 || alpha > 1)
    throw PmvError("build_cm_copeland: alpha must be in [0,1]");
  if (m < 3) throw PmvError("build_cm_copeland: needs m >= 3");
  const std::size_t q = factorial(m);

  auto base_rows = [&](Polyhedron& p, const std::vector<std::pair<int, int>>&
                                          strict_edges) {
    for (auto [a, b] : strict_edges)
      add_row(p, pair_diff_vector(b, a, m), Rational(-1));
    for (int j = 1; j <= 3; ++j)
      for (int i = 4; i <= m; ++i)
        add_row(p, pair_diff_vector(i, j, m), Rational(-1));
  };

  Polyhedron src, tgt;
  src.A = Matrix(0, q);
  tgt.A = Matrix(0, q);
  const bool odd = parity == Parity::Odd;
  if (odd) {
    base_rows(src, {{1, 3}, {3, 2}, {2, 1}});
    base_rows(tgt, {{1, 3}, {2, 3}, {2, 1}});
  } else if (alpha > 0) {
    base_rows(src, {{1, 3}, {3, 2}, {2, 1}});
    base_rows(tgt, {{1, 3}, {2, 1}});
    add_row(tgt, pair_diff_vector(3, 2, m), Rational(0));  // 2 ties-or-beats 3
  } else {
    base_rows(src, {{1, 3}, {2, 1}});
    add_row(src, pair_diff_vector(2, 3, m), Rational(0));  // 3 ties-or-beats 2
    base_rows(tgt, {{1, 3}, {2, 3}, {2, 1}});
  }
  append_nonneg(src, q);
  append_nonneg(tgt, q);

  return assemble("cm-copeland:" + to_string(alpha) +
                      (odd ? "-odd" : "-even"),
                  std::move(src), std::move(tgt),
                  vote_ops(VoteOpKind::Motivated, m, 1, 2));
}

namespace {

/// Relabels alternatives by the permutation perm (1-based: alternative i
/// becomes perm[i-1]) — a coordinate permutation of histogram space.
PmvSetting relabel_setting(const PmvSetting& s, const std::vector<int>& perm,
                           int m) {
  const auto& rs = all_rankings(m);
  std::vector<std::size_t> colmap(rs.size());
  for (std::size_t i = 0; i < rs.size(); ++i) {
    std::vector<int> renamed(rs[i].size());
    for (std::size_t p = 0; p < rs[i].size(); ++p)
      renamed[p] = perm[rs[i][p] - 1];
    colmap[i] = ranking_index(renamed);
  }
  auto permute_matrix = [&](const Matrix& a) {
    Matrix out(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
      for (std::size_t j = 0; j < a.cols(); ++j)
        out.at(i, colmap[j]) = a.at(i, j);
    return out;
  };
  PmvSetting out = s;
  out.source.A = permute_matrix(s.source.A);
  out.target.A = permute_matrix(s.target.A);
  out.ops = permute_matrix(s.ops);
  // Regenerate labels from the permuted rows.
  for (std::size_t i = 0; i < out.ops.rows(); ++i) {
    std::size_t src = rs.size(), dst = rs.size();
    for (std::size_t j = 0; j < rs.size(); ++j) {
      if (out.ops.at(i, j) == -1) src = j;
      if (out.ops.at(i, j) == 1) dst = j;
    }
    if (src < rs.size() && dst < rs.size())
      out.op_labels[i] = ranking_name(rs[src]) + " -> " + ranking_name(rs[dst]);
    else if (dst < rs.size())
      out.op_labels[i] = "+" + ranking_name(rs[dst]);
    else if (src < rs.size())
      out.op_labels[i] = "-" + ranking_name(rs[src]);
  }
  return out;
}

PmvSetting with_ops(PmvSetting s, VoteOperations ops, std::string name) {
  s.ops = std::move(ops.O);
  s.op_labels = std::move(ops.labels);
  s.costs = Vec(s.ops.rows(), Rational(1));
  s.name = std::move(name);
  validate_setting(s);
  return s;
}

SettingFamily scoring_family(Problem x, const VotingRule& rule, int d,
                             const std::optional<Vec>& prices) {
  const int m = rule.m;
  const std::size_t q = factorial(m);
  SettingFamily fam;
  fam.problem = x;
  fam.rule = rule;

  auto region = [&](int w) { return scoring_winner_region(rule, w); };
  Polyhedron orthant = nonneg_rows(q);
  auto ops_of = [&](VoteOpKind k, int a, int b) { return vote_ops(k, m, a, b); };
  auto px = [&](Problem) { return problem_name(x); };

  auto priced = [&](VoteOpKind k) -> std::optional<Vec> {
    if (k != VoteOpKind::Generalized || !prices) return std::nullopt;
    return prices;
  };
  auto push = [&](std::string name, Polyhedron src, Polyhedron tgt,
                  VoteOpKind k, int a = 0, int b = 0) {
    fam.settings.push_back(assemble(std::move(name), std::move(src),
                                    std::move(tgt), ops_of(k, a, b),
                                    priced(k)));
  };

  switch (x) {
    case Problem::CM:
      for (int a = 1; a <= m; ++a)
        for (int b = 1; b <= m; ++b)
          if (a != b)
            push(px(x) + "-" + rule.name + "-" + std::to_string(a) + "to" +
                     std::to_string(b),
                 region(a), region(b), VoteOpKind::Motivated, a, b);
      break;
    case Problem::MoV:
      for (int a = 1; a <= m; ++a)
        for (int b = 1; b <= m; ++b)
          if (a != b)
            push(px(x) + "-" + rule.name + "-" + std::to_string(a) + "to" +
                     std::to_string(b),
                 region(a), region(b), VoteOpKind::Change);
      break;
    case Problem::CML:
      if (is_veto_like(rule))
        throw PmvError("build_family: CML excludes the veto-like score vector");
      for (int a = 1; a <= m; ++a)
        for (int b = 1; b <= m; ++b)
          if (a != b)
            fam.settings.push_back(build_cml_scoring(rule, a, b));
      break;
    case Problem::CCAV:
      push(px(x) + "-" + rule.name + "-d" + std::to_string(d), orthant,
           region(d), VoteOpKind::AddOnly);
      break;
    case Problem::CCDV:
      push(px(x) + "-" + rule.name + "-d" + std::to_string(d), orthant,
           region(d), VoteOpKind::DeleteOnly);
      break;
    case Problem::DCAV:
      for (int b = 1; b <= m; ++b)
        if (b != d)
          push(px(x) + "-" + rule.name + "-to" + std::to_string(b), orthant,
               region(b), VoteOpKind::AddOnly);
      break;
    case Problem::DCDV:
      for (int b = 1; b <= m; ++b)
        if (b != d)
          push(px(x) + "-" + rule.name + "-to" + std::to_string(b), orthant,
               region(b), VoteOpKind::DeleteOnly);
      break;
    case Problem::ECCAV:
    case Problem::ECCDV: {
      VoteOpKind k =
          x == Problem::ECCAV ? VoteOpKind::AddOnly : VoteOpKind::DeleteOnly;
      for (int a = 1; a <= m; ++a)
        if (a != d)
          push(px(x) + "-" + rule.name + "-" + std::to_string(a) + "to" +
                   std::to_string(d),
               region(a), region(d), k);
      break;
    }
    case Problem::EDCAV:
    case Problem::EDCDV: {
      VoteOpKind k =
          x == Problem::EDCAV ? VoteOpKind::AddOnly : VoteOpKind::DeleteOnly;
      for (int b = 1; b <= m; ++b)
        if (b != d)
          push(px(x) + "-" + rule.name + "-" + std::to_string(d) + "to" +
                   std::to_string(b),
               region(d), region(b), k);
      break;
    }
    case Problem::CB:
      push(px(x) + "-" + rule.name + "-d" + std::to_string(d), orthant,
           region(d), VoteOpKind::Generalized);
      break;
    case Problem::DB:
      for (int b = 1; b <= m; ++b)
        if (b != d)
          push(px(x) + "-" + rule.name + "-to" + std::to_string(b), orthant,
               region(b), VoteOpKind::Generalized);
      break;
    case Problem::ECB:
      for (int a = 1; a <= m; ++a)
        if (a != d)
          push(px(x) + "-" + rule.name + "-" + std::to_string(a) + "to" +
                   std::to_string(d),
               region(a), region(d), VoteOpKind::Generalized);
      break;
    case Problem::EDB:
      for (int b = 1; b <= m; ++b)
        if (b != d)
          push(px(x) + "-" + rule.name + "-" + std::to_string(d) + "to" +
                   std::to_string(b),
               region(d), region(b), VoteOpKind::Generalized);
      break;
  }
  return fam;
}

SettingFamily nonscoring_family(Problem x, const VotingRule& rule, int d) {
  const int m = rule.m;
  SettingFamily fam;
  fam.problem = x;
  fam.rule = rule;

  // Representative source/target pairs with winners (1, 2).
  std::vector<std::pair<PmvSetting, std::string>> bases;
  switch (rule.family) {
    case VotingRule::Family::Maximin:
    case VotingRule::Family::RankedPairs:
    case VotingRule::Family::Schulze:
      bases.emplace_back(build_cm_pairwise(rule), "");
      break;
    case VotingRule::Family::Stv:
      bases.emplace_back(build_cm_stv(m), "");
      break;
    case VotingRule::Family::Copeland:
      if (problem_needs_target(x)) {
        if (rule.alpha == 0)
          throw PmvError(
              "build_family: e-control under Copeland with alpha = 0 is "
              "excluded");
        bases.emplace_back(build_cm_copeland(rule.alpha, Parity::Even, m),
                           "-evensplit");
        bases.emplace_back(build_cm_copeland(Rational(0), Parity::Even, m),
                           "-eventie");
      } else {
        bases.emplace_back(build_cm_copeland(rule.alpha, Parity::Odd, m),
                           "-odd");
        bases.emplace_back(build_cm_copeland(rule.alpha, Parity::Even, m),
                           "-even");
      }
      break;
    default:
      throw PmvError("build_family: unsupported rule family");
  }

  auto orient = [&](const PmvSetting& base, bool source_is_d)
      -> std::pair<Polyhedron, Polyhedron> {
    // base has winners (1, 2); produce (winner d, other) or (other, winner d).
    PmvSetting relabeled = base;
    if (d >= 3) {
      std::vector<int> perm(m);
      for (int i = 0; i < m; ++i) perm[i] = i + 1;
      std::swap(perm[1], perm[d - 1]);
      relabeled = relabel_setting(base, perm, m);
    }
    bool d_is_first = d == 1;  // winner-1 polyhedron is the d side
    if (source_is_d == d_is_first)
      return {relabeled.source, relabeled.target};
    return {relabeled.target, relabeled.source};
  };

  switch (x) {
    case Problem::CM:
      for (auto& [base, suffix] : bases) {
        base.name = problem_name(x) + "-" + rule.name + suffix;
        fam.settings.push_back(base);
      }
      break;
    case Problem::MoV:
      for (auto& [base, suffix] : bases)
        fam.settings.push_back(
            with_ops(base, vote_ops(VoteOpKind::Change, m),
                     problem_name(x) + "-" + rule.name + suffix));
      break;
    case Problem::ECCAV:
    case Problem::ECCDV:
    case Problem::EDCAV:
    case Problem::EDCDV: {
      bool add = x == Problem::ECCAV || x == Problem::EDCAV;
      bool constructive = x == Problem::ECCAV || x == Problem::ECCDV;
      VoteOpKind k = add ? VoteOpKind::AddOnly : VoteOpKind::DeleteOnly;
      for (auto& [base, suffix] : bases) {
        auto [src, tgt] = orient(base, /*source_is_d=*/!constructive);
        PmvSetting s = base;
        s.source = std::move(src);
        s.target = std::move(tgt);
        fam.settings.push_back(
            with_ops(s, vote_ops(k, m),
                     problem_name(x) + "-" + rule.name + "-d" +
                         std::to_string(d) + suffix));
      }
      break;
    }
    default:
      throw PmvError("build_family: problem '" + problem_name(x) +
                     "' is only supported for positional scoring rules");
  }
  return fam;
}

}  // namespace

SettingFamily build_family(Problem x, const VotingRule& rule, int d,
                           const std::optional<Vec>& prices) {
  if (d == 0)
    d = (rule.family != VotingRule::Family::Scoring &&
         problem_needs_target(x))
            ? 2
            : 1;
  if (problem_needs_target(x) && (d < 1 || d > rule.m))
    throw PmvError("build_family: distinguished alternative out of range");
  if (prices && rule.family != VotingRule::Family::Scoring)
    throw PmvError("build_family: prices apply to scoring bribery families");
  SettingFamily fam = rule.family == VotingRule::Family::Scoring
                          ? scoring_family(x, rule, d, prices)
                          : nonscoring_family(x, rule, d);
  if (fam.settings.empty())
    throw PmvError("build_family: empty family");
  return fam;
}

namespace {

json vec_to_json(const Vec& v) {
  json a = json::array();
  for (const auto& r : v) a.push_back(to_string(r));
  return a;
}

Vec vec_from_json(const json& a) {
  Vec v;
  for (const auto& e : a) v.push_back(parse_rational(e.get<std::string>()));
  return v;
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) rows.push_back(vec_to_json(m.row(i)));
  return rows;
}

Matrix matrix_from_json(const json& a, std::size_t cols) {
  Matrix m(0, cols);
  for (const auto& row : a) m.append_row(vec_from_json(row));
  return m;
}

json setting_to_json_obj(const PmvSetting& s) {
  json j;
  j["name"] = s.name;
  j["q"] = s.q;
  j["A_S"] = matrix_to_json(s.source.A);
  j["b_S"] = vec_to_json(s.source.b);
  j["A_T"] = matrix_to_json(s.target.A);
  j["b_T"] = vec_to_json(s.target.b);
  j["ops"] = matrix_to_json(s.ops);
  j["op_labels"] = s.op_labels;
  j["costs"] = vec_to_json(s.costs);
  return j;
}

PmvSetting setting_from_json_obj(const json& j) {
  PmvSetting s;
  s.name = j.at("name").get<std::string>();
  s.q = j.at("q").get<std::size_t>();
  s.source.A = matrix_from_json(j.at("A_S"), s.q);
  s.source.b = vec_from_json(j.at("b_S"));
  s.target.A = matrix_from_json(j.at("A_T"), s.q);
  s.target.b = vec_from_json(j.at("b_T"));
  s.ops = matrix_from_json(j.at("ops"), s.q);
  s.op_labels = j.at("op_labels").get<std::vector<std::string>>();
  s.costs = vec_from_json(j.at("costs"));
  validate_setting(s);
  return s;
}

json rule_to_json(const VotingRule& r) {
  json j;
  j["name"] = r.name;
  j["m"] = r.m;
  return j;
}

VotingRule rule_from_json(const json& j) {
  return rule_by_name(j.at("name").get<std::string>(), j.at("m").get<int>());
}

}  // namespace

std::string setting_to_json(const PmvSetting& s) {
  return setting_to_json_obj(s).dump(2);
}

PmvSetting setting_from_json(const std::string& text) {
  return setting_from_json_obj(json::parse(text));
}

std::string family_to_json(const SettingFamily& f) {
  json j;
  j["problem"] = problem_name(f.problem);
  j["rule"] = rule_to_json(f.rule);
  json arr = json::array();
  for (const auto& s : f.settings) arr.push_back(setting_to_json_obj(s));
  j["settings"] = arr;
  return j.dump(2);
}

SettingFamily family_from_json(const std::string& text) {
  json j = json::parse(text);
  SettingFamily f;
  f.problem = problem_by_name(j.at("problem").get<std::string>());
  f.rule = rule_from_json(j.at("rule"));
  for (const auto& s : j.at("settings"))
    f.settings.push_back(setting_from_json_obj(s));
  if (f.settings.empty()) throw PmvError("family_from_json: empty family");
  return f;
}

std::string pi_to_json(const std::vector<Vec>& vertices) {
  json j;
  json arr = json::array();
  for (const auto& v : vertices) arr.push_back(vec_to_json(v));
  j["vertices"] = arr;
  return j.dump(2);
}

std::vector<Vec> pi_from_json(const std::string& text) {
  json j = json::parse(text);
  std::vector<Vec> out;
  for (const auto& v : j.at("vertices")) out.push_back(vec_from_json(v));
  if (out.empty()) throw PmvError("pi_from_json: no vertices");
  return out;
}

}  // namespace pmv
