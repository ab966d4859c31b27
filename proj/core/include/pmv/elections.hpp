#pragma once

#include "pmv/exact.hpp"

namespace pmv {

/// Alternatives are the integers 1..m. Rankings list alternatives from
/// most to least preferred and are indexed 0..m!-1 in lexicographic
/// order of that sequence (123 < 132 < 213 < …). Every tie anywhere is
/// broken toward the smallest index/alternative.

long factorial(int m);

/// All m! rankings in canonical (lexicographic) order. Cached.
const std::vector<std::vector<int>>& all_rankings(int m);

/// Canonical index of a ranking (its lexicographic rank).
std::size_t ranking_index(const std::vector<int>& r);

std::string ranking_name(const std::vector<int>& r);  // "1>2>3"
std::vector<int> parse_ranking(const std::string& text, int m);

/// Integer histogram over the m! rankings.
using HistL = std::vector<long>;

struct Profile {
  int m = 0;
  HistL hist;
  long n() const;
};

/// Text format: one vote per line, either "a>b>c" or "k: a>b>c" for k
/// copies. Blank lines and lines starting with '#' are skipped.
Profile parse_profile(const std::string& text, int m);
std::string format_profile(const Profile& p);

/// Probability distribution over the m! rankings; all entries must be
/// strictly positive and sum to one unless `allow_zero` is set.
void validate_distribution(const Vec& p, bool allow_zero = false);
Vec uniform_distribution(int m);

struct VotingRule {
  enum class Family {
    Scoring,
    Copeland,
    Maximin,
    RankedPairs,
    Schulze,
    Stv,
    PluralityRunoff
  };
  Family family = Family::Scoring;
  int m = 0;
  std::vector<Rational> scores;  // Scoring: size m, nonincreasing, s1 > sm
  Rational alpha;                // Copeland tie credit, in [0,1]
  std::string name;
};

VotingRule scoring_rule(std::string name, std::vector<Rational> scores);
VotingRule borda(int m);
VotingRule plurality(int m);
VotingRule veto(int m);
VotingRule k_approval(int m, int k);
VotingRule copeland(int m, const Rational& alpha);
VotingRule maximin(int m);
VotingRule ranked_pairs(int m);
VotingRule schulze(int m);
VotingRule stv(int m);
VotingRule plurality_runoff(int m);

/// Parses "borda", "plurality", "veto", "kapproval:2", "copeland",
/// "copeland:1/2", "maximin", "rankedpairs", "schulze", "stv", "runoff".
VotingRule rule_by_name(const std::string& name, int m);

/// The unique winner (1-based) under the rule's deterministic
/// lexicographic tie-breaking.
int winner(const VotingRule& rule, const HistL& hist);

/// Pairwise margin w(a,b) = #votes with a above b − #votes with b above a.
long margin(const HistL& hist, int a, int b, int m);

/// Per-ranking value score(a) − score(b) under score vector s.
Vec score_diff_vector(const std::vector<Rational>& s, int a, int b, int m);

/// Per-ranking value [a above b] − [b above a]  (±1).
Vec pair_diff_vector(int a, int b, int m);

/// Per-ranking plurality-score difference for a vs b after the
/// alternatives in `removed` are eliminated.
Vec stv_score_diff_vector(const std::vector<int>& removed, int a, int b,
                          int m);

}  // namespace pmv
