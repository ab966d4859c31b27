#include <functional>

#include "doctest.h"
#include "pmv/oracles.hpp"

using namespace pmv;

namespace {

Profile profile_of(int m, std::initializer_list<std::pair<const char*, long>> vs) {
  Profile p;
  p.m = m;
  p.hist.assign(static_cast<std::size_t>(factorial(m)), 0);
  for (const auto& [name, count] : vs)
    p.hist[ranking_index(parse_ranking(name, m))] += count;
  return p;
}

/// Replays a witness and checks it proves what the answer claims.
HistL replay(const Profile& p, const OracleWitness& w) {
  REQUIRE(w.removed.size() == p.hist.size());
  REQUIRE(w.added.size() == p.hist.size());
  HistL y = p.hist;
  for (std::size_t i = 0; i < y.size(); ++i) {
    CHECK(w.removed[i] >= 0);
    CHECK(w.added[i] >= 0);
    CHECK(w.removed[i] <= p.hist[i]);
    y[i] += w.added[i] - w.removed[i];
  }
  return y;
}

/// Enumerates every histogram of total n over q types.
void each_hist(std::size_t q, long n, const std::function<void(const HistL&)>& fn,
               HistL& cur, std::size_t from) {
  if (from == q - 1) {
    cur[from] = n;
    fn(cur);
    cur[from] = 0;
    return;
  }
  for (long c = 0; c <= n; ++c) {
    cur[from] = c;
    each_hist(q, n - c, fn, cur, from + 1);
  }
  cur[from] = 0;
}

void for_each_profile(int m, long n, const std::function<void(const HistL&)>& fn) {
  HistL cur(static_cast<std::size_t>(factorial(m)), 0);
  each_hist(cur.size(), n, fn, cur, 0);
}

}  // namespace

TEST_CASE("manipulation needs motivated voters, winner change does not") {
  // Plurality winner is 1 on two tops against one each for 2 and 3. No
  // single voter who dislikes 1 can dethrone it, but a supporter of 1
  // could — which counts for winner change, not for manipulation.
  Profile p = profile_of(3, {{"1>2>3", 2}, {"2>3>1", 1}, {"3>2>1", 1}});

  OracleAnswer m1 = cm(plurality(3), p, 1);
  CHECK_FALSE(m1.success);

  OracleAnswer v1 = mov(plurality(3), p, 1);
  REQUIRE(v1.success);
  HistL y = replay(p, *v1.witness);
  CHECK(winner(plurality(3), y) != winner(plurality(3), p.hist));
  CHECK(v1.witness->cost <= 1);

  // Under Borda the same profile elects 2, and one voter preferring 1
  // forces a three-way tie that the lexicographic rule breaks to 1.
  CHECK(winner(borda(3), p.hist) == 2);
  OracleAnswer b1 = cm(borda(3), p, 1);
  REQUIRE(b1.success);
  HistL z = replay(p, *b1.witness);
  int w_new = winner(borda(3), z);
  CHECK(w_new == 1);
  const auto& rs = all_rankings(3);
  for (std::size_t i = 0; i < rs.size(); ++i) {
    if (b1.witness->removed[i] == 0) continue;
    int pos_new = -1, pos_old = -1;
    for (int pos = 0; pos < 3; ++pos) {
      if (rs[i][pos] == w_new) pos_new = pos;
      if (rs[i][pos] == 2) pos_old = pos;
    }
    CHECK(pos_new < pos_old);  // every coalition member gains
  }

  CHECK_FALSE(cm(borda(3), p, 0).success);
  CHECK_FALSE(mov(plurality(3), p, 0).success);
}

TEST_CASE("control by adding and deleting votes") {
  Profile p = profile_of(3, {{"2>1>3", 1}});

  // One added vote ties the tops and the tie breaks toward 1.
  OracleAnswer add1 = control(Problem::CCAV, plurality(3), p, 1, 1);
  REQUIRE(add1.success);
  HistL y = replay(p, *add1.witness);
  CHECK(winner(plurality(3), y) == 1);
  CHECK_FALSE(control(Problem::CCAV, plurality(3), p, 1, 0).success);

  // The distinguished alternative already wins: plain control succeeds
  // with zero additions, the exact variant refuses.
  OracleAnswer trivial = control(Problem::CCAV, plurality(3), p, 2, 1);
  REQUIRE(trivial.success);
  CHECK(trivial.witness->cost == 0);
  CHECK_FALSE(control(Problem::ECCAV, plurality(3), p, 2, 1).success);
  CHECK(control(Problem::ECCAV, plurality(3), p, 1, 1).success);

  // Deleting one of two votes for the leader only reaches a tie that
  // still breaks its way; deleting both dethrones it.
  Profile q = profile_of(3, {{"1>2>3", 2}, {"2>1>3", 1}});
  CHECK_FALSE(control(Problem::DCDV, plurality(3), q, 1, 1).success);
  OracleAnswer del2 = control(Problem::DCDV, plurality(3), q, 1, 2);
  REQUIRE(del2.success);
  HistL z = replay(q, *del2.witness);
  CHECK(winner(plurality(3), z) != 1);

  CHECK_THROWS_AS(control(Problem::CM, plurality(3), p, 1, 1), PmvError);
  CHECK_THROWS_AS(control(Problem::CCAV, plurality(3), p, 5, 1), PmvError);
}

TEST_CASE("bribery respects prices and rational budgets") {
  Profile p = profile_of(3, {{"2>1>3", 1}});

  // Unit prices: a single change (or deletion) dethrones 2.
  OracleAnswer db = bribery(Problem::DB, plurality(3), p, 2, unit_prices(3),
                            rat(1));
  REQUIRE(db.success);
  CHECK(db.witness->cost <= 1);
  HistL y = replay(p, *db.witness);
  CHECK(winner(plurality(3), y) != 2);

  // Half a unit buys nothing.
  CHECK_FALSE(bribery(Problem::DB, plurality(3), p, 2, unit_prices(3),
                      rat(1, 2))
                  .success);

  // Forbidding every operation that touches the lone vote — and pricing
  // additions out of reach — makes the same instance hopeless.
  const std::size_t q6 = 6;
  PriceTable gated;
  gated.m = 3;
  gated.change.assign(q6, std::vector<std::optional<Rational>>(q6,
                                                               std::nullopt));
  gated.add.assign(q6, Rational(3));
  gated.del.assign(q6, std::nullopt);
  CHECK_FALSE(
      bribery(Problem::DB, plurality(3), p, 2, gated, rat(1)).success);

  // Constructive bribery: one paid change elects 1; already-winning
  // alternatives cost nothing, but the exact variant refuses them.
  Profile r = profile_of(3, {{"2>1>3", 1}, {"2>3>1", 1}});
  OracleAnswer cb =
      bribery(Problem::CB, plurality(3), r, 1, unit_prices(3), rat(1));
  REQUIRE(cb.success);
  CHECK(winner(plurality(3), replay(r, *cb.witness)) == 1);
  OracleAnswer free =
      bribery(Problem::CB, plurality(3), r, 2, unit_prices(3), rat(0));
  REQUIRE(free.success);
  CHECK(free.witness->cost == 0);
  CHECK_FALSE(
      bribery(Problem::ECB, plurality(3), r, 2, unit_prices(3), rat(1))
          .success);

  PriceTable bad = unit_prices(3);
  bad.add[0] = rat(0);
  CHECK_THROWS_AS(bribery(Problem::DB, plurality(3), p, 2, bad, rat(1)),
                  PmvError);
}

TEST_CASE("a winner-change witness is also a destructive bribe") {
  // With unit prices, any s ≤ B vote rewrites cost s, so mov(B) implies
  // db(B) against the sitting winner. Exhaust n = 3 under two rules.
  for (const VotingRule& rule : {plurality(3), borda(3)}) {
    for_each_profile(3, 3, [&](const HistL& h) {
      Profile p{3, h};
      OracleAnswer v = mov(rule, p, 1);
      if (!v.success) return;
      int d = winner(rule, p.hist);
      CHECK(bribery(Problem::DB, rule, p, d, unit_prices(3), rat(1)).success);
    });
  }
}

TEST_CASE("the exhaustive caps refuse oversized instances") {
  auto throws_mentioning_caps = [](const std::function<void()>& fn) {
    try {
      fn();
    } catch (const PmvError& e) {
      return std::string(e.what()).find("caps") != std::string::npos;
    }
    return false;
  };
  Profile big = profile_of(3, {{"1>2>3", 13}});
  CHECK(throws_mentioning_caps([&] { cm(plurality(3), big, 1); }));
  Profile small = profile_of(3, {{"1>2>3", 3}});
  CHECK(throws_mentioning_caps([&] { mov(plurality(3), small, 7); }));
  OracleCaps tight{2, 3, 1};
  CHECK(throws_mentioning_caps([&] { cm(plurality(3), small, 1, tight); }));
  OracleCaps roomy{20, 4, 6};
  CHECK_NOTHROW(cm(plurality(3), big, 1, roomy));
}

TEST_CASE("family membership solves the lifted reachability problem") {
  SettingFamily fam;
  fam.problem = Problem::MoV;
  fam.rule = plurality(2);
  fam.settings = {toy_setting()};

  CHECK(membership({1, 1}, fam, rat(1)));        // one transfer flips it
  CHECK_FALSE(membership({0, 2}, fam, rat(1)));  // needs two transfers
  CHECK(membership({0, 2}, fam, rat(3)));
  CHECK_FALSE(membership({2, 0}, fam, rat(1)));  // not in the source

  CHECK_THROWS_AS(membership({1, 1}, fam, rat(-1)), PmvError);
  CHECK_THROWS_AS(membership({-1, 1}, fam, rat(1)), PmvError);
  CHECK_THROWS_AS(membership({1, 1, 1}, fam, rat(1)), PmvError);
}

TEST_CASE("membership agrees with the brute-force deciders on small n") {
  SettingFamily cm_fam = build_family(Problem::CM, plurality(3));
  SettingFamily mov_fam = build_family(Problem::MoV, plurality(3));
  for_each_profile(3, 3, [&](const HistL& h) {
    Profile p{3, h};
    CHECK(membership(h, cm_fam, rat(1)) == cm(plurality(3), p, 1).success);
    CHECK(membership(h, mov_fam, rat(1)) == mov(plurality(3), p, 1).success);
  });
}

TEST_CASE("query dispatch mirrors the direct calls") {
  Profile p = profile_of(3, {{"1>2>3", 2}, {"2>3>1", 1}, {"3>2>1", 1}});

  InfluenceQuery q;
  q.problem = Problem::MoV;
  q.rule = plurality(3);
  q.profile = p;
  q.budget = rat(1);
  CHECK(run_query(q).success == mov(plurality(3), p, 1).success);

  q.budget = rat(3, 2);  // vote-count problems need integer budgets
  CHECK_THROWS_AS(run_query(q), PmvError);

  q.problem = Problem::CML;
  q.budget = rat(1);
  CHECK_THROWS_AS(run_query(q), PmvError);

  q.problem = Problem::CCAV;
  CHECK_THROWS_AS(run_query(q), PmvError);  // missing d
  q.d = 1;
  CHECK(run_query(q).success ==
        control(Problem::CCAV, plurality(3), p, 1, 1).success);

  q.problem = Problem::DB;
  q.budget = rat(1);
  CHECK(run_query(q).success ==
        bribery(Problem::DB, plurality(3), p, 1, unit_prices(3), rat(1))
            .success);
}
