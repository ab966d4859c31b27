#include "doctest.h"
#include "pmv/elections.hpp"

using namespace pmv;

namespace {

// Histogram from (ranking name, count) pairs, m alternatives.
HistL hist_of(int m, std::initializer_list<std::pair<const char*, long>> vs) {
  HistL h(static_cast<std::size_t>(factorial(m)), 0);
  for (const auto& [name, count] : vs)
    h[ranking_index(parse_ranking(name, m))] += count;
  return h;
}

}  // namespace

TEST_CASE("all_rankings is lexicographic and indexed consistently") {
  const auto& r3 = all_rankings(3);
  REQUIRE(r3.size() == 6);
  CHECK(ranking_name(r3[0]) == "1>2>3");
  CHECK(ranking_name(r3[1]) == "1>3>2");
  CHECK(ranking_name(r3[2]) == "2>1>3");
  CHECK(ranking_name(r3[3]) == "2>3>1");
  CHECK(ranking_name(r3[4]) == "3>1>2");
  CHECK(ranking_name(r3[5]) == "3>2>1");
  for (std::size_t i = 0; i < r3.size(); ++i) CHECK(ranking_index(r3[i]) == i);
  CHECK(factorial(4) == 24);
  CHECK(all_rankings(4).size() == 24);
}

TEST_CASE("parse_ranking roundtrips and validates") {
  CHECK(parse_ranking("2>3>1", 3) == std::vector<int>{2, 3, 1});
  CHECK_THROWS_AS(parse_ranking("1>2", 3), PmvError);
  CHECK_THROWS_AS(parse_ranking("1>1>2", 3), PmvError);
  CHECK_THROWS_AS(parse_ranking("1>2>4", 3), PmvError);
}

TEST_CASE("parse_profile supports counts, blanks and comments") {
  Profile p = parse_profile("# two alike\n2: 1>2>3\n\n3>2>1\n", 3);
  CHECK(p.n() == 3);
  CHECK(p.hist[0] == 2);
  CHECK(p.hist[5] == 1);
  Profile q = parse_profile(format_profile(p), 3);
  CHECK(q.hist == p.hist);
}

TEST_CASE("distribution validation") {
  CHECK_NOTHROW(validate_distribution(uniform_distribution(3)));
  CHECK_THROWS_AS(validate_distribution({rat(1, 2), rat(1, 3)}), PmvError);
  CHECK_THROWS_AS(validate_distribution({rat(1), rat(0)}), PmvError);
  CHECK_NOTHROW(validate_distribution({rat(1), rat(0)}, true));
}

TEST_CASE("positional scoring winners with lexicographic ties") {
  HistL h = hist_of(3, {{"1>2>3", 2}, {"2>3>1", 1}, {"3>2>1", 1}});
  CHECK(winner(plurality(3), h) == 1);  // tops 2/1/1
  CHECK(winner(borda(3), h) == 2);      // scores 4/5/3
  CHECK(winner(veto(3), h) == 2);       // vetoes: 1 twice, 3 once, 2 never

  // Perfect tie: everything breaks to alternative 1.
  HistL tie = hist_of(3, {{"1>2>3", 1}, {"2>3>1", 1}, {"3>1>2", 1}});
  CHECK(winner(plurality(3), tie) == 1);
  CHECK(winner(borda(3), tie) == 1);
}

TEST_CASE("margin is antisymmetric and counts pairwise preferences") {
  HistL h = hist_of(3, {{"1>2>3", 2}, {"2>3>1", 1}, {"3>2>1", 1}});
  CHECK(margin(h, 1, 2, 3) == 0);   // 2 vs 2
  CHECK(margin(h, 2, 3, 3) == 2);   // 3 vs 1
  CHECK(margin(h, 1, 3, 3) == 0);
  CHECK(margin(h, 3, 2, 3) == -2);
}

TEST_CASE("Condorcet-consistent rules on a cyclic profile") {
  // 1 beats 2 (5:4), 2 beats 3 (6:3), 3 beats 1 (5:4) — a cycle.
  HistL cyc = hist_of(3, {{"1>2>3", 3}, {"2>3>1", 3}, {"3>1>2", 2},
                          {"1>3>2", 1}});
  // margins: w(1,2)=+1? recompute: 1>2 in 123,132,312: 3+1+2=6 vs 3 -> +3
  // w(2,3): 123,231: 3+3=6 vs 3 -> +3; w(3,1): 231? no. 312,321,231:
  // 2+0+3=5 vs 4 -> +1. Cycle 1->2->3->1.
  CHECK(margin(cyc, 1, 2, 3) == 3);
  CHECK(margin(cyc, 2, 3, 3) == 3);
  CHECK(margin(cyc, 3, 1, 3) == 1);

  // Copeland: everyone 1 win 1 loss -> tie -> lexicographic 1.
  CHECK(winner(copeland(3, rat(1, 2)), cyc) == 1);
  // Maximin: worst margins -1/-3/-3 -> alternative 1.
  CHECK(winner(maximin(3), cyc) == 1);
  // Ranked pairs: lock 1>2 (+3), lock 2>3 (+3), skip 3>1 -> winner 1.
  CHECK(winner(ranked_pairs(3), cyc) == 1);
  // Schulze: strongest path 1->3 via 2 has strength 3 > w(3,1)=1.
  CHECK(winner(schulze(3), cyc) == 1);
}

TEST_CASE("Condorcet winner is picked by every Condorcet method") {
  HistL h = hist_of(3, {{"2>1>3", 3}, {"1>2>3", 2}, {"3>1>2", 2}});
  // 2 vs 1: 3 vs 4 -> 1 wins; 1 vs 3: 5 vs 2; 2 vs 3: 5 vs 2 -> 1 Condorcet.
  for (const VotingRule& r :
       {copeland(3, rat(0)), maximin(3), ranked_pairs(3), schulze(3)})
    CHECK(winner(r, h) == 1);
}

TEST_CASE("STV eliminates the largest index among plurality minima") {
  // tops: 1 x2, 2 x2, 3 x1 -> eliminate 3; its vote moves to 2 -> 2 wins 3:2.
  HistL h = hist_of(3, {{"1>2>3", 2}, {"2>1>3", 2}, {"3>2>1", 1}});
  CHECK(winner(stv(3), h) == 2);

  // All tops tied 1/1/1 -> eliminate 3 -> 2 beats 1 two to one.
  HistL t = hist_of(3, {{"1>2>3", 1}, {"2>3>1", 1}, {"3>2>1", 1}});
  CHECK(winner(stv(3), t) == 2);
}

TEST_CASE("plurality runoff pairs the two top plurality scores") {
  // tops 3/3/1: runoff between 1 and 2; 2 beats 1 four to three.
  HistL h = hist_of(3, {{"1>2>3", 3}, {"2>3>1", 3}, {"3>2>1", 1}});
  CHECK(winner(plurality_runoff(3), h) == 2);
  CHECK(winner(stv(3), h) == 2);  // same two-stage outcome at m=3
}

TEST_CASE("rule_by_name parses every family") {
  CHECK(rule_by_name("borda", 3).scores == borda(3).scores);
  CHECK(rule_by_name("plurality", 3).name == "plurality");
  CHECK(rule_by_name("kapproval:2", 4).scores ==
        k_approval(4, 2).scores);
  CHECK(rule_by_name("copeland:1/2", 3).alpha == rat(1, 2));
  CHECK(rule_by_name("maximin", 3).family == VotingRule::Family::Maximin);
  CHECK(rule_by_name("rankedpairs", 3).family ==
        VotingRule::Family::RankedPairs);
  CHECK(rule_by_name("schulze", 3).family == VotingRule::Family::Schulze);
  CHECK(rule_by_name("stv", 3).family == VotingRule::Family::Stv);
  CHECK(rule_by_name("runoff", 3).family ==
        VotingRule::Family::PluralityRunoff);
  CHECK_THROWS_AS(rule_by_name("nope", 3), PmvError);
}

TEST_CASE("score and pairwise difference vectors match hand values") {
  std::vector<Rational> b = borda(3).scores;  // (2,1,0)
  CHECK(score_diff_vector(b, 1, 2, 3) ==
        Vec{rat(1), rat(2), rat(-1), rat(-2), rat(1), rat(-1)});
  CHECK(score_diff_vector(b, 1, 3, 3) ==
        Vec{rat(2), rat(1), rat(1), rat(-1), rat(-1), rat(-2)});
  CHECK(score_diff_vector(b, 2, 3, 3) ==
        Vec{rat(1), rat(-1), rat(2), rat(1), rat(-2), rat(-1)});
  CHECK(pair_diff_vector(1, 2, 3) ==
        Vec{rat(1), rat(1), rat(-1), rat(-1), rat(1), rat(-1)});

  // Eliminating 3 reduces every ranking to its 1-vs-2 restriction.
  CHECK(stv_score_diff_vector({3}, 1, 2, 3) ==
        Vec{rat(1), rat(1), rat(-1), rat(-1), rat(1), rat(-1)});
}

TEST_CASE("winner agrees with the per-histogram score vectors") {
  // Property: for scoring rules, winner(a) iff all score diffs favor a
  // with the lexicographic convention.
  HistL h = hist_of(3, {{"2>1>3", 4}, {"1>3>2", 3}, {"3>2>1", 2}});
  int w = winner(borda(3), h);
  for (int other = 1; other <= 3; ++other) {
    if (other == w) continue;
    Vec d = score_diff_vector(borda(3).scores, w, other, 3);
    Rational s = 0;
    for (std::size_t i = 0; i < h.size(); ++i) s += d[i] * rat(h[i]);
    if (w < other) {
      CHECK(s >= rat(0));
    } else {
      CHECK(s > rat(0));
    }
  }
}
