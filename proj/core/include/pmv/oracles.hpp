#pragma once

#include <optional>

#include "pmv/elections.hpp"
#include "pmv/settings.hpp"

namespace pmv {

/// Exhaustive-search guardrails. The brute-force deciders refuse larger
/// inputs (override knowingly); the ILP membership check has no caps.
struct OracleCaps {
  long max_n = 12;
  int max_m = 4;
  long max_b = 6;
};

/// Replayable certificate: final histogram = original − removed + added.
struct OracleWitness {
  HistL removed;  // multiset of vote types taken out (changed away/deleted)
  HistL added;    // multiset of vote types put in (changed to/added)
  Rational cost;
};

struct OracleAnswer {
  bool success = false;
  std::optional<OracleWitness> witness;
};

/// Coalitional manipulation: some coalition of at most B voters rewrites
/// its ballots so that every member strictly prefers the new winner to
/// the old one. B must be a nonnegative integer count.
OracleAnswer cm(const VotingRule& rule, const Profile& p, long B,
                const OracleCaps& caps = {});

/// Winner changeability: at most B voters rewrite arbitrarily and the
/// winner changes (no preference requirement).
OracleAnswer mov(const VotingRule& rule, const Profile& p, long B,
                 const OracleCaps& caps = {});

/// Control by adding/deleting up to B votes. Constructive variants make
/// d the winner, destructive ones dethrone d; e-variants additionally
/// require the goal to fail on the original profile.
OracleAnswer control(Problem x, const VotingRule& rule, const Profile& p,
                     int d, long B, const OracleCaps& caps = {});

/// Anonymous price table over single-vote operations; nullopt = forbidden.
/// Finite prices must be strictly positive.
struct PriceTable {
  int m = 0;
  std::vector<std::vector<std::optional<Rational>>> change;  // [src][dst]
  std::vector<std::optional<Rational>> add, del;
};

/// Every operation priced 1.
PriceTable unit_prices(int m);

/// Bribery within budget B: reach any profile whose winner satisfies the
/// goal, paying per changed/added/deleted vote. Each voter is moved at
/// most once (original ranking → final ranking at the listed price).
OracleAnswer bribery(Problem x, const VotingRule& rule, const Profile& p,
                     int d, const PriceTable& prices, const Rational& B,
                     const OracleCaps& caps = {});

/// true iff some setting of the family contains hist in its source
/// polyhedron and an integer operation vector of cost ≤ B lands it in
/// the target polyhedron. Throws if the ILP node budget runs out.
bool membership(const HistL& hist, const SettingFamily& family,
                const Rational& B, long node_budget = 1000000);

/// CLI-facing bundle dispatching to the deciders above.
struct InfluenceQuery {
  Problem problem = Problem::CM;
  VotingRule rule;
  Profile profile;
  Rational budget;
  std::optional<int> d;
  std::optional<PriceTable> prices;  // bribery only; defaults to unit prices
};

OracleAnswer run_query(const InfluenceQuery& q, const OracleCaps& caps = {});

}  // namespace pmv
