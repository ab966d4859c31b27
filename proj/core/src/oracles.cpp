#include "pmv/oracles.hpp"

#include <algorithm>
#include <functional>

#include "pmv/lp.hpp"

namespace pmv {

namespace {

void check_caps(const Profile& p, long B, const OracleCaps& caps,
                const char* who) {
  if (p.n() > caps.max_n || p.m > caps.max_m || B > caps.max_b)
    throw PmvError(std::string(who) +
                   ": instance exceeds the exhaustive-search caps (n ≤ " +
                   std::to_string(caps.max_n) + ", m ≤ " +
                   std::to_string(caps.max_m) + ", B ≤ " +
                   std::to_string(caps.max_b) + "); raise them to force");
}

/// Walks every multiset over q types with the given remaining total,
/// entries capped by bound (nullptr = no per-type cap).
void multiset_walk(std::size_t q, const HistL* bound, HistL& cur,
                   const std::function<bool(const HistL&)>& fn,
                   std::size_t from, long left, bool& stop) {
  if (stop) return;
  long cap = left;
  if (bound && (*bound)[from] < cap) cap = (*bound)[from];
  // Last type must absorb the remainder.
  if (from == q - 1) {
    if (left <= cap) {
      cur[from] = left;
      if (fn(cur)) stop = true;
      cur[from] = 0;
    }
    return;
  }
  for (long c = 0; c <= cap && !stop; ++c) {
    cur[from] = c;
    multiset_walk(q, bound, cur, fn, from + 1, left - c, stop);
  }
  cur[from] = 0;
}

/// fn returns true to stop the search; returns whether it stopped.
bool enumerate_multisets(std::size_t q, long size, const HistL* bound,
                         const std::function<bool(const HistL&)>& fn) {
  if (size < 0) return false;
  HistL cur(q, 0);
  bool stop = false;
  multiset_walk(q, bound, cur, fn, 0, size, stop);
  return stop;
}

/// pos[i][a] = position (0 = top) of alternative a in ranking i.
std::vector<std::vector<int>> position_table(int m) {
  const auto& rs = all_rankings(m);
  std::vector<std::vector<int>> pos(rs.size(), std::vector<int>(m + 1, 0));
  for (std::size_t i = 0; i < rs.size(); ++i)
    for (int p = 0; p < m; ++p) pos[i][rs[i][p]] = p;
  return pos;
}

HistL apply_delta(const HistL& hist, const HistL& removed,
                  const HistL& added) {
  HistL y = hist;
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += added[i] - removed[i];
  return y;
}

}  // namespace

OracleAnswer cm(const VotingRule& rule, const Profile& p, long B,
                const OracleCaps& caps) {
  if (B < 0) throw PmvError("cm: B must be nonnegative");
  check_caps(p, B, caps, "cm");
  OracleAnswer ans;
  if (B == 0) return ans;
  const std::size_t q = p.hist.size();
  const int w_old = winner(rule, p.hist);
  auto pos = position_table(p.m);

  // Voters already seeing their favorite win never join a coalition.
  HistL coalition_bound = p.hist;
  for (std::size_t i = 0; i < q; ++i)
    if (pos[i][w_old] == 0) coalition_bound[i] = 0;

  for (long s = 1; s <= B && !ans.success; ++s) {
    enumerate_multisets(q, s, &coalition_bound, [&](const HistL& removed) {
      return enumerate_multisets(q, s, nullptr, [&](const HistL& added) {
        HistL y = apply_delta(p.hist, removed, added);
        int w = winner(rule, y);
        if (w == w_old) return false;
        for (std::size_t i = 0; i < q; ++i)
          if (removed[i] > 0 && pos[i][w] >= pos[i][w_old]) return false;
        ans.success = true;
        ans.witness = OracleWitness{removed, added, Rational(s)};
        return true;
      });
    });
  }
  return ans;
}

OracleAnswer mov(const VotingRule& rule, const Profile& p, long B,
                 const OracleCaps& caps) {
  if (B < 0) throw PmvError("mov: B must be nonnegative");
  check_caps(p, B, caps, "mov");
  OracleAnswer ans;
  const std::size_t q = p.hist.size();
  const int w_old = winner(rule, p.hist);
  for (long s = 1; s <= B && !ans.success; ++s) {
    enumerate_multisets(q, s, &p.hist, [&](const HistL& removed) {
      return enumerate_multisets(q, s, nullptr, [&](const HistL& added) {
        HistL y = apply_delta(p.hist, removed, added);
        if (winner(rule, y) == w_old) return false;
        ans.success = true;
        ans.witness = OracleWitness{removed, added, Rational(s)};
        return true;
      });
    });
  }
  return ans;
}

OracleAnswer control(Problem x, const VotingRule& rule, const Profile& p,
                     int d, long B, const OracleCaps& caps) {
  if (B < 0) throw PmvError("control: B must be nonnegative");
  check_caps(p, B, caps, "control");
  if (d < 1 || d > rule.m)
    throw PmvError("control: distinguished alternative out of range");

  bool adding, constructive, evariant;
  switch (x) {
    case Problem::CCAV:  adding = true;  constructive = true;  evariant = false; break;
    case Problem::CCDV:  adding = false; constructive = true;  evariant = false; break;
    case Problem::DCAV:  adding = true;  constructive = false; evariant = false; break;
    case Problem::DCDV:  adding = false; constructive = false; evariant = false; break;
    case Problem::ECCAV: adding = true;  constructive = true;  evariant = true;  break;
    case Problem::ECCDV: adding = false; constructive = true;  evariant = true;  break;
    case Problem::EDCAV: adding = true;  constructive = false; evariant = true;  break;
    case Problem::EDCDV: adding = false; constructive = false; evariant = true;  break;
    default:
      throw PmvError("control: not a control problem");
  }

  OracleAnswer ans;
  const std::size_t q = p.hist.size();
  const int w_old = winner(rule, p.hist);
  const bool goal_holds = constructive ? w_old == d : w_old != d;
  if (evariant && goal_holds) return ans;  // goal must fail beforehand

  const HistL zero(q, 0);
  auto check = [&](const HistL& removed, const HistL& added, long s) {
    HistL y = apply_delta(p.hist, removed, added);
    int w = winner(rule, y);
    if (constructive ? w != d : w == d) return false;
    ans.success = true;
    ans.witness = OracleWitness{removed, added, Rational(s)};
    return true;
  };
  for (long s = 0; s <= B && !ans.success; ++s) {
    if (adding)
      enumerate_multisets(q, s, nullptr,
                          [&](const HistL& added) { return check(zero, added, s); });
    else
      enumerate_multisets(q, s, &p.hist, [&](const HistL& removed) {
        return check(removed, zero, s);
      });
  }
  return ans;
}

PriceTable unit_prices(int m) {
  const std::size_t q = all_rankings(m).size();
  PriceTable t;
  t.m = m;
  t.change.assign(q, std::vector<std::optional<Rational>>(q, Rational(1)));
  for (std::size_t i = 0; i < q; ++i) t.change[i][i] = std::nullopt;
  t.add.assign(q, Rational(1));
  t.del.assign(q, Rational(1));
  return t;
}

namespace {

void validate_prices(const PriceTable& t, std::size_t q) {
  if (t.change.size() != q || t.add.size() != q || t.del.size() != q)
    throw PmvError("bribery: price table size mismatch");
  auto pos = [](const std::optional<Rational>& r) {
    return !r || *r > 0;
  };
  for (std::size_t i = 0; i < q; ++i) {
    if (t.change[i].size() != q)
      throw PmvError("bribery: price table size mismatch");
    if (!pos(t.add[i]) || !pos(t.del[i]))
      throw PmvError("bribery: finite prices must be strictly positive");
    for (std::size_t j = 0; j < q; ++j)
      if (!pos(t.change[i][j]))
        throw PmvError("bribery: finite prices must be strictly positive");
  }
}

/// Feasibility of turning hist into y at cost ≤ B: integer counts of
/// priced operations, each voter moved at most once.
std::optional<OracleWitness> reach_ilp(const HistL& hist, const HistL& y,
                                       const PriceTable& prices,
                                       const Rational& B, long maxadd) {
  const std::size_t q = hist.size();
  struct Op {
    enum class Kind { Change, Add, Del } kind;
    std::size_t src = 0, dst = 0;
    Rational price;
  };
  std::vector<Op> ops;
  for (std::size_t r = 0; r < q; ++r)
    for (std::size_t d2 = 0; d2 < q; ++d2)
      if (r != d2 && prices.change[r][d2] && hist[r] > 0)
        ops.push_back({Op::Kind::Change, r, d2, *prices.change[r][d2]});
  for (std::size_t j = 0; j < q; ++j)
    if (prices.add[j] && maxadd > 0)
      ops.push_back({Op::Kind::Add, 0, j, *prices.add[j]});
  for (std::size_t r = 0; r < q; ++r)
    if (prices.del[r] && hist[r] > 0)
      ops.push_back({Op::Kind::Del, r, 0, *prices.del[r]});
  if (ops.empty()) {
    if (y != hist) return std::nullopt;
    return OracleWitness{HistL(q, 0), HistL(q, 0), Rational(0)};
  }

  LinearProgram p(ops.size());
  for (std::size_t v = 0; v < ops.size(); ++v) {
    p.set_lower(v, Rational(0));
    long ub = ops[v].kind == Op::Kind::Add ? maxadd
                                           : hist[ops[v].src];
    p.set_upper(v, Rational(ub));
  }
  // Each original vote is moved away at most once.
  for (std::size_t r = 0; r < q; ++r) {
    Vec row = zeros(ops.size());
    bool any = false;
    for (std::size_t v = 0; v < ops.size(); ++v)
      if (ops[v].kind != Op::Kind::Add && ops[v].src == r) {
        row[v] = 1;
        any = true;
      }
    if (any) p.add_leq(std::move(row), Rational(hist[r]));
  }
  // Net balance per type.
  for (std::size_t j = 0; j < q; ++j) {
    Vec row = zeros(ops.size());
    for (std::size_t v = 0; v < ops.size(); ++v) {
      long coeff = 0;
      if (ops[v].kind != Op::Kind::Add && ops[v].src == j) coeff -= 1;
      if (ops[v].kind != Op::Kind::Del && ops[v].dst == j) coeff += 1;
      row[v] = Rational(coeff);
    }
    p.add_eq(std::move(row), Rational(y[j] - hist[j]));
  }
  {
    Vec row(ops.size());
    for (std::size_t v = 0; v < ops.size(); ++v) row[v] = ops[v].price;
    p.add_leq(std::move(row), B);
  }
  IlpResult r = ilp_feasible(p, std::vector<bool>(ops.size(), true), 100000);
  if (r.status == IlpStatus::Exhausted)
    throw PmvError("bribery: ILP node budget exhausted");
  if (r.status != IlpStatus::Feasible) return std::nullopt;

  OracleWitness w;
  w.removed.assign(q, 0);
  w.added.assign(q, 0);
  w.cost = 0;
  for (std::size_t v = 0; v < ops.size(); ++v) {
    long c = r.x[v].get_num().get_si();  // integral, denominator 1
    if (c == 0) continue;
    w.cost += ops[v].price * Rational(c);
    if (ops[v].kind != Op::Kind::Add) w.removed[ops[v].src] += c;
    if (ops[v].kind != Op::Kind::Del) w.added[ops[v].dst] += c;
  }
  return w;
}

}  // namespace

OracleAnswer bribery(Problem x, const VotingRule& rule, const Profile& p,
                     int d, const PriceTable& prices, const Rational& B,
                     const OracleCaps& caps) {
  if (B < 0) throw PmvError("bribery: B must be nonnegative");
  if (B > caps.max_b || p.n() > caps.max_n || p.m > caps.max_m)
    throw PmvError("bribery: instance exceeds the exhaustive-search caps; "
                   "raise them to force");
  bool constructive, evariant;
  switch (x) {
    case Problem::CB:  constructive = true;  evariant = false; break;
    case Problem::DB:  constructive = false; evariant = false; break;
    case Problem::ECB: constructive = true;  evariant = true;  break;
    case Problem::EDB: constructive = false; evariant = true;  break;
    default:
      throw PmvError("bribery: not a bribery problem");
  }
  if (d < 1 || d > rule.m)
    throw PmvError("bribery: distinguished alternative out of range");
  const std::size_t q = p.hist.size();
  validate_prices(prices, q);

  OracleAnswer ans;
  const int w_old = winner(rule, p.hist);
  const bool goal_holds = constructive ? w_old == d : w_old != d;
  if (evariant && goal_holds) return ans;

  auto budgeted_count = [&](const std::optional<Rational>& cheapest) {
    if (!cheapest) return 0L;
    return floor_rat(B / *cheapest).get_num().get_si();
  };
  std::optional<Rational> min_add, min_del;
  for (std::size_t j = 0; j < q; ++j) {
    if (prices.add[j] && (!min_add || *prices.add[j] < *min_add))
      min_add = prices.add[j];
    if (prices.del[j] && (!min_del || *prices.del[j] < *min_del))
      min_del = prices.del[j];
  }
  const long maxadd = budgeted_count(min_add);
  const long maxdel = std::min(p.n(), budgeted_count(min_del));

  for (long ny = p.n() - maxdel; ny <= p.n() + maxadd && !ans.success; ++ny) {
    enumerate_multisets(q, ny, nullptr, [&](const HistL& y) {
      int w = winner(rule, y);
      if (constructive ? w != d : w == d) return false;
      auto witness = reach_ilp(p.hist, y, prices, B, maxadd);
      if (!witness) return false;
      ans.success = true;
      ans.witness = std::move(witness);
      return true;
    });
  }
  return ans;
}

bool membership(const HistL& hist, const SettingFamily& family,
                const Rational& B, long node_budget) {
  if (B < 0) throw PmvError("membership: B must be nonnegative");
  Vec x(hist.size());
  for (std::size_t i = 0; i < hist.size(); ++i) x[i] = Rational(hist[i]);
  for (long h : hist)
    if (h < 0) throw PmvError("membership: negative histogram entry");

  for (const auto& s : family.settings) {
    if (s.q != x.size())
      throw PmvError("membership: histogram dimension mismatch");
    bool in_source = true;
    for (std::size_t i = 0; i < s.source.A.rows() && in_source; ++i)
      if (dot(s.source.A.row(i), x) > s.source.b[i]) in_source = false;
    if (!in_source) continue;

    const std::size_t k = s.ops.rows();
    LinearProgram p(k);
    Rational ob = -floor_rat(-B);  // ⌈B⌉; each cost ≥ 1 bounds every count
    for (std::size_t r = 0; r < k; ++r) {
      p.set_lower(r, Rational(0));
      p.set_upper(r, ob);
    }
    {
      Vec row(k);
      for (std::size_t r = 0; r < k; ++r) row[r] = s.costs[r];
      p.add_leq(std::move(row), B);
    }
    for (std::size_t i = 0; i < s.target.A.rows(); ++i) {
      Vec a = s.target.A.row(i);
      Vec row(k);
      for (std::size_t r = 0; r < k; ++r) row[r] = dot(a, s.ops.row(r));
      p.add_leq(std::move(row), s.target.b[i] - dot(a, x));
    }
    IlpResult r = ilp_feasible(p, std::vector<bool>(k, true), node_budget);
    if (r.status == IlpStatus::Exhausted)
      throw PmvError("membership: ILP node budget exhausted");
    if (r.status == IlpStatus::Feasible) return true;
  }
  return false;
}

OracleAnswer run_query(const InfluenceQuery& q, const OracleCaps& caps) {
  auto int_budget = [&]() {
    if (!is_integer(q.budget) || q.budget < 0)
      throw PmvError("oracle: this problem needs a nonnegative integer B");
    return q.budget.get_num().get_si();
  };
  switch (q.problem) {
    case Problem::CM:
      return cm(q.rule, q.profile, int_budget(), caps);
    case Problem::MoV:
      return mov(q.rule, q.profile, int_budget(), caps);
    case Problem::CML:
      throw PmvError("oracle: no brute-force decider is defined for cml");
    case Problem::CCAV:
    case Problem::CCDV:
    case Problem::DCAV:
    case Problem::DCDV:
    case Problem::ECCAV:
    case Problem::ECCDV:
    case Problem::EDCAV:
    case Problem::EDCDV: {
      if (!q.d) throw PmvError("oracle: control needs -d");
      return control(q.problem, q.rule, q.profile, *q.d, int_budget(), caps);
    }
    case Problem::CB:
    case Problem::DB:
    case Problem::ECB:
    case Problem::EDB: {
      if (!q.d) throw PmvError("oracle: bribery needs -d");
      PriceTable prices = q.prices ? *q.prices : unit_prices(q.rule.m);
      return bribery(q.problem, q.rule, q.profile, *q.d, prices, q.budget,
                     caps);
    }
  }
  throw PmvError("oracle: unknown problem");
}

}  // namespace pmv
