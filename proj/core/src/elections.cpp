#include "pmv/elections.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>

namespace pmv {

long factorial(int m) {
  long f = 1;
  for (int i = 2; i <= m; ++i) f *= i;
  return f;
}

const std::vector<std::vector<int>>& all_rankings(int m) {
  // Map nodes are address-stable, so returned references survive later
  // insertions; the mutex makes concurrent first calls safe.
  static std::mutex mu;
  static std::map<int, std::vector<std::vector<int>>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(m);
  if (it != cache.end()) return it->second;
  if (m < 1 || m > 8) throw PmvError("all_rankings: m out of range");
  std::vector<int> r(m);
  std::iota(r.begin(), r.end(), 1);
  std::vector<std::vector<int>> out;
  do {
    out.push_back(r);
  } while (std::next_permutation(r.begin(), r.end()));
  return cache.emplace(m, std::move(out)).first->second;
}

std::size_t ranking_index(const std::vector<int>& r) {
  // Lehmer code: rank of the sequence in lexicographic order.
  const int m = static_cast<int>(r.size());
  std::size_t idx = 0;
  for (int i = 0; i < m; ++i) {
    int smaller = 0;
    for (int j = i + 1; j < m; ++j)
      if (r[j] < r[i]) ++smaller;
    idx += static_cast<std::size_t>(smaller) * factorial(m - 1 - i);
  }
  return idx;
}

std::string ranking_name(const std::vector<int>& r) {
  std::ostringstream os;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (i) os << ">";
    os << r[i];
  }
  return os.str();
}

std::vector<int> parse_ranking(const std::string& text, int m) {
  std::vector<int> r;
  std::string tok;
  std::istringstream is(text);
  while (std::getline(is, tok, '>')) {
    tok.erase(std::remove_if(tok.begin(), tok.end(),
                             [](unsigned char c) { return std::isspace(c); }),
              tok.end());
    if (tok.empty()) throw PmvError("parse_ranking: empty entry in '" + text + "'");
    r.push_back(std::stoi(tok));
  }
  if (static_cast<int>(r.size()) != m)
    throw PmvError("parse_ranking: '" + text + "' is not over m=" +
                   std::to_string(m) + " alternatives");
  std::vector<int> sorted = r;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < m; ++i)
    if (sorted[i] != i + 1)
      throw PmvError("parse_ranking: '" + text + "' is not a permutation");
  return r;
}

long Profile::n() const {
  return std::accumulate(hist.begin(), hist.end(), 0L);
}

Profile parse_profile(const std::string& text, int m) {
  Profile p;
  p.m = m;
  p.hist.assign(factorial(m), 0);
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    if (line[first] == '#') continue;
    long count = 1;
    std::string body = line;
    auto colon = line.find(':');
    if (colon != std::string::npos) {
      count = std::stol(line.substr(0, colon));
      if (count < 0) throw PmvError("parse_profile: negative count");
      body = line.substr(colon + 1);
    }
    p.hist[ranking_index(parse_ranking(body, m))] += count;
  }
  return p;
}

std::string format_profile(const Profile& p) {
  std::ostringstream os;
  const auto& rs = all_rankings(p.m);
  for (std::size_t i = 0; i < rs.size(); ++i)
    if (p.hist[i] != 0)
      os << p.hist[i] << ": " << ranking_name(rs[i]) << "\n";
  return os.str();
}

void validate_distribution(const Vec& p, bool allow_zero) {
  Rational s = 0;
  for (const auto& v : p) {
    if (v < 0 || (!allow_zero && v == 0))
      throw PmvError("distribution entries must be strictly positive");
    s += v;
  }
  if (s != 1) throw PmvError("distribution must sum to 1, got " + to_string(s));
}

Vec uniform_distribution(int m) {
  long q = factorial(m);
  return Vec(q, rat(1, q));
}

VotingRule scoring_rule(std::string name, std::vector<Rational> scores) {
  if (scores.size() < 2) throw PmvError("scoring_rule: need m >= 2");
  for (std::size_t i = 1; i < scores.size(); ++i)
    if (scores[i] > scores[i - 1])
      throw PmvError("scoring_rule: scores must be nonincreasing");
  if (scores.front() == scores.back())
    throw PmvError("scoring_rule: s1 must exceed sm");
  VotingRule r;
  r.family = VotingRule::Family::Scoring;
  r.m = static_cast<int>(scores.size());
  r.scores = std::move(scores);
  r.name = std::move(name);
  return r;
}

VotingRule borda(int m) {
  std::vector<Rational> s;
  for (int i = 0; i < m; ++i) s.emplace_back(m - 1 - i);
  return scoring_rule("borda", std::move(s));
}

VotingRule plurality(int m) {
  std::vector<Rational> s(m, Rational(0));
  s[0] = 1;
  return scoring_rule("plurality", std::move(s));
}

VotingRule veto(int m) {
  std::vector<Rational> s(m, Rational(1));
  s[m - 1] = 0;
  return scoring_rule("veto", std::move(s));
}

VotingRule k_approval(int m, int k) {
  if (k < 1 || k >= m) throw PmvError("k_approval: need 1 <= k < m");
  std::vector<Rational> s(m, Rational(0));
  for (int i = 0; i < k; ++i) s[i] = 1;
  return scoring_rule("kapproval:" + std::to_string(k), std::move(s));
}

namespace {
VotingRule pairwise_rule(VotingRule::Family fam, int m, std::string name) {
  VotingRule r;
  r.family = fam;
  r.m = m;
  r.name = std::move(name);
  return r;
}
}  // namespace

VotingRule copeland(int m, const Rational& alpha) {
  if (alpha < 0 || alpha > 1) throw PmvError("copeland: alpha must be in [0,1]");
  VotingRule r = pairwise_rule(VotingRule::Family::Copeland, m,
                               "copeland:" + to_string(alpha));
  r.alpha = alpha;
  return r;
}

VotingRule maximin(int m) {
  return pairwise_rule(VotingRule::Family::Maximin, m, "maximin");
}
VotingRule ranked_pairs(int m) {
  return pairwise_rule(VotingRule::Family::RankedPairs, m, "rankedpairs");
}
VotingRule schulze(int m) {
  return pairwise_rule(VotingRule::Family::Schulze, m, "schulze");
}
VotingRule stv(int m) {
  return pairwise_rule(VotingRule::Family::Stv, m, "stv");
}
VotingRule plurality_runoff(int m) {
  return pairwise_rule(VotingRule::Family::PluralityRunoff, m, "runoff");
}

VotingRule rule_by_name(const std::string& name, int m) {
  auto colon = name.find(':');
  std::string head = name.substr(0, colon);
  std::string arg = colon == std::string::npos ? "" : name.substr(colon + 1);
  if (head == "borda") return borda(m);
  if (head == "plurality") return plurality(m);
  if (head == "veto") return veto(m);
  if (head == "kapproval") return k_approval(m, std::stoi(arg));
  if (head == "copeland")
    return copeland(m, arg.empty() ? rat(1, 2) : parse_rational(arg));
  if (head == "maximin") return maximin(m);
  if (head == "rankedpairs") return ranked_pairs(m);
  if (head == "schulze") return schulze(m);
  if (head == "stv") return stv(m);
  if (head == "runoff") return plurality_runoff(m);
  throw PmvError("rule_by_name: unknown rule '" + name + "'");
}

long margin(const HistL& hist, int a, int b, int m) {
  const auto& rs = all_rankings(m);
  long w = 0;
  for (std::size_t i = 0; i < rs.size(); ++i) {
    if (hist[i] == 0) continue;
    for (int alt : rs[i]) {
      if (alt == a) {
        w += hist[i];
        break;
      }
      if (alt == b) {
        w -= hist[i];
        break;
      }
    }
  }
  return w;
}

namespace {

std::vector<long> plurality_scores(const HistL& hist,
                                   const std::vector<bool>& active, int m) {
  const auto& rs = all_rankings(m);
  std::vector<long> sc(m + 1, 0);
  for (std::size_t i = 0; i < rs.size(); ++i) {
    if (hist[i] == 0) continue;
    for (int alt : rs[i])
      if (active[alt]) {
        sc[alt] += hist[i];
        break;
      }
  }
  return sc;
}

std::vector<std::vector<long>> all_margins(const HistL& hist, int m) {
  std::vector<std::vector<long>> w(m + 1, std::vector<long>(m + 1, 0));
  const auto& rs = all_rankings(m);
  for (std::size_t i = 0; i < rs.size(); ++i) {
    if (hist[i] == 0) continue;
    const auto& r = rs[i];
    for (int p = 0; p < m; ++p)
      for (int q2 = p + 1; q2 < m; ++q2) {
        w[r[p]][r[q2]] += hist[i];
        w[r[q2]][r[p]] -= hist[i];
      }
  }
  return w;
}

int winner_scoring(const VotingRule& rule, const HistL& hist) {
  const auto& rs = all_rankings(rule.m);
  std::vector<Rational> sc(rule.m + 1, Rational(0));
  for (std::size_t i = 0; i < rs.size(); ++i) {
    if (hist[i] == 0) continue;
    for (int pos = 0; pos < rule.m; ++pos)
      sc[rs[i][pos]] += rule.scores[pos] * Rational(hist[i]);
  }
  int best = 1;
  for (int a = 2; a <= rule.m; ++a)
    if (sc[a] > sc[best]) best = a;
  return best;
}

int winner_copeland(const VotingRule& rule, const HistL& hist) {
  auto w = all_margins(hist, rule.m);
  std::vector<Rational> sc(rule.m + 1, Rational(0));
  for (int a = 1; a <= rule.m; ++a)
    for (int b = 1; b <= rule.m; ++b) {
      if (a == b) continue;
      if (w[a][b] > 0)
        sc[a] += 1;
      else if (w[a][b] == 0)
        sc[a] += rule.alpha;
    }
  int best = 1;
  for (int a = 2; a <= rule.m; ++a)
    if (sc[a] > sc[best]) best = a;
  return best;
}

int winner_maximin(const VotingRule& rule, const HistL& hist) {
  auto w = all_margins(hist, rule.m);
  std::vector<long> sc(rule.m + 1);
  for (int a = 1; a <= rule.m; ++a) {
    long mn = 0;
    bool first = true;
    for (int b = 1; b <= rule.m; ++b) {
      if (a == b) continue;
      if (first || w[a][b] < mn) mn = w[a][b];
      first = false;
    }
    sc[a] = mn;
  }
  int best = 1;
  for (int a = 2; a <= rule.m; ++a)
    if (sc[a] > sc[best]) best = a;
  return best;
}

int winner_ranked_pairs(const VotingRule& rule, const HistL& hist) {
  const int m = rule.m;
  auto w = all_margins(hist, m);
  struct Edge {
    long weight;
    int a, b;
  };
  std::vector<Edge> edges;
  for (int a = 1; a <= m; ++a)
    for (int b = 1; b <= m; ++b)
      if (a != b) edges.push_back({w[a][b], a, b});
  std::stable_sort(edges.begin(), edges.end(), [](const Edge& x, const Edge& y) {
    if (x.weight != y.weight) return x.weight > y.weight;
    if (x.a != y.a) return x.a < y.a;
    return x.b < y.b;
  });
  // reach[a][b]: path a -> b in the fixed digraph.
  std::vector<std::vector<bool>> reach(m + 1, std::vector<bool>(m + 1, false));
  for (const auto& e : edges) {
    if (reach[e.b][e.a]) continue;  // would close a cycle
    // Fix edge a -> b and close transitively.
    for (int u = 1; u <= m; ++u)
      for (int v = 1; v <= m; ++v)
        if ((u == e.a || reach[u][e.a]) && (v == e.b || reach[e.b][v]))
          reach[u][v] = true;
    reach[e.a][e.b] = true;
  }
  for (int a = 1; a <= m; ++a) {
    bool incoming = false;
    for (int b = 1; b <= m; ++b)
      if (b != a && reach[b][a]) {
        incoming = true;
        break;
      }
    if (!incoming) return a;
  }
  return 1;  // unreachable: the fixed digraph always has a unique source
}

int winner_schulze(const VotingRule& rule, const HistL& hist) {
  const int m = rule.m;
  auto w = all_margins(hist, m);
  // Widest-path strengths over the complete digraph.
  std::vector<std::vector<long>> s(m + 1, std::vector<long>(m + 1));
  for (int a = 1; a <= m; ++a)
    for (int b = 1; b <= m; ++b) s[a][b] = (a == b) ? 0 : w[a][b];
  for (int c = 1; c <= m; ++c)
    for (int a = 1; a <= m; ++a) {
      if (a == c) continue;
      for (int b = 1; b <= m; ++b) {
        if (b == c || b == a) continue;
        s[a][b] = std::max(s[a][b], std::min(s[a][c], s[c][b]));
      }
    }
  for (int a = 1; a <= m; ++a) {
    bool ok = true;
    for (int b = 1; b <= m && ok; ++b)
      if (b != a && s[a][b] < s[b][a]) ok = false;
    if (ok) return a;
  }
  return 1;  // unreachable: the beats-or-ties relation always has a maximum
}

int winner_stv(const VotingRule& rule, const HistL& hist) {
  const int m = rule.m;
  std::vector<bool> active(m + 1, true);
  active[0] = false;
  for (int round = 0; round < m - 1; ++round) {
    auto sc = plurality_scores(hist, active, m);
    int drop = 0;
    for (int a = 1; a <= m; ++a) {
      if (!active[a]) continue;
      if (drop == 0 || sc[a] < sc[drop] || (sc[a] == sc[drop] && a > drop))
        drop = a;
    }
    active[drop] = false;
  }
  for (int a = 1; a <= m; ++a)
    if (active[a]) return a;
  return 1;
}

int winner_runoff(const VotingRule& rule, const HistL& hist) {
  const int m = rule.m;
  std::vector<bool> active(m + 1, true);
  active[0] = false;
  auto sc = plurality_scores(hist, active, m);
  int first = 1;
  for (int a = 2; a <= m; ++a)
    if (sc[a] > sc[first]) first = a;
  int second = 0;
  for (int a = 1; a <= m; ++a) {
    if (a == first) continue;
    if (second == 0 || sc[a] > sc[second]) second = a;
  }
  long h2h = margin(hist, first, second, m);
  if (h2h > 0) return first;
  if (h2h < 0) return second;
  return std::min(first, second);
}

}  // namespace

int winner(const VotingRule& rule, const HistL& hist) {
  if (static_cast<long>(hist.size()) != factorial(rule.m))
    throw PmvError("winner: histogram size mismatch");
  switch (rule.family) {
    case VotingRule::Family::Scoring:
      return winner_scoring(rule, hist);
    case VotingRule::Family::Copeland:
      return winner_copeland(rule, hist);
    case VotingRule::Family::Maximin:
      return winner_maximin(rule, hist);
    case VotingRule::Family::RankedPairs:
      return winner_ranked_pairs(rule, hist);
    case VotingRule::Family::Schulze:
      return winner_schulze(rule, hist);
    case VotingRule::Family::Stv:
      return winner_stv(rule, hist);
    case VotingRule::Family::PluralityRunoff:
      return winner_runoff(rule, hist);
  }
  throw PmvError("winner: unknown rule family");
}

Vec score_diff_vector(const std::vector<Rational>& s, int a, int b, int m) {
  const auto& rs = all_rankings(m);
  Vec v(rs.size());
  for (std::size_t i = 0; i < rs.size(); ++i) {
    Rational val = 0;
    for (int pos = 0; pos < m; ++pos) {
      if (rs[i][pos] == a) val += s[pos];
      if (rs[i][pos] == b) val -= s[pos];
    }
    v[i] = val;
  }
  return v;
}

Vec pair_diff_vector(int a, int b, int m) {
  const auto& rs = all_rankings(m);
  Vec v(rs.size());
  for (std::size_t i = 0; i < rs.size(); ++i) {
    for (int alt : rs[i]) {
      if (alt == a) {
        v[i] = 1;
        break;
      }
      if (alt == b) {
        v[i] = -1;
        break;
      }
    }
  }
  return v;
}

Vec stv_score_diff_vector(const std::vector<int>& removed, int a, int b,
                          int m) {
  std::vector<bool> active(m + 1, true);
  active[0] = false;
  for (int r : removed) active.at(r) = false;
  if (!active.at(a) || !active.at(b))
    throw PmvError("stv_score_diff_vector: a and b must stay active");
  const auto& rs = all_rankings(m);
  Vec v(rs.size(), Rational(0));
  for (std::size_t i = 0; i < rs.size(); ++i) {
    for (int alt : rs[i]) {
      if (!active[alt]) continue;
      if (alt == a) v[i] = 1;
      if (alt == b) v[i] = -1;
      break;
    }
  }
  return v;
}

}  // namespace pmv
