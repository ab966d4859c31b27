// pmv-forge: command-line front end for the polyhedral election-influence
// toolkit. Subcommands: build, classify, estimate, scan, oracle, fit.
// Exit codes: 0 success, 2 classification Undetermined, 1 any error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pmv/classify.hpp"
#include "pmv/montecarlo.hpp"
#include "pmv/oracles.hpp"
#include "pmv/settings.hpp"

namespace {

using namespace pmv;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PmvError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw PmvError("cannot write " + path);
  out << text;
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  return parts;
}

std::vector<Rational> parse_rational_list(const std::string& s) {
  std::vector<Rational> out;
  for (const std::string& p : split_commas(s)) out.push_back(parse_rational(p));
  return out;
}

std::vector<long> parse_long_list(const std::string& s) {
  std::vector<long> out;
  for (const std::string& p : split_commas(s)) {
    std::size_t pos = 0;
    long v = std::stol(p, &pos);
    if (pos != p.size()) throw PmvError("not an integer: " + p);
    out.push_back(v);
  }
  return out;
}

struct CommonInputs {
  std::string family_path, pi_path;
  SettingFamily family;
  std::vector<Vec> pi;
  void load() {
    family = family_from_json(read_file(family_path));
    pi = pi_from_json(read_file(pi_path));
  }
};

// ---- build ----------------------------------------------------------

struct BuildArgs {
  std::string problem, rule, out;
  int m = 3;
  int d = 0;
};

int run_build(const BuildArgs& a) {
  VotingRule rule = rule_by_name(a.rule, a.m);
  SettingFamily fam = build_family(problem_by_name(a.problem), rule, a.d);
  std::string json = family_to_json(fam);
  if (a.out.empty()) {
    std::cout << json << "\n";
  } else {
    write_file(a.out, json);
  }
  for (const PmvSetting& s : fam.settings) {
    std::printf("%s: source rows=%zu target rows=%zu ops=%zu\n",
                s.name.c_str(), s.source.A.rows(), s.target.A.rows(),
                s.ops.rows());
  }
  return 0;
}

// ---- classify -------------------------------------------------------

struct ClassifyArgs {
  CommonInputs in;
  long n = 0;
  std::string b = "1", psi = "0", mode = "sup", knife = "1/10", out;
  long ilp_budget = 1000000, enum_budget = 200000;
};

int run_classify(ClassifyArgs& a) {
  a.in.load();
  Rational B = parse_rational(a.b);
  Rational psi = parse_rational(a.psi);
  ClassifyOptions opts;
  opts.knife_band = parse_rational(a.knife);
  opts.ilp_node_budget = a.ilp_budget;
  opts.enumeration_budget = a.enum_budget;
  Mode mode;
  if (a.mode == "sup") {
    mode = Mode::Sup;
  } else if (a.mode == "inf") {
    mode = Mode::Inf;
  } else {
    throw PmvError("mode must be sup or inf");
  }
  ClassificationResult res;
  if (psi > 0) {
    if (a.in.family.settings.size() != 1)
      throw PmvError(
          "psi classification is defined for single-setting families");
    res = classify_psi(a.in.family.settings.front(), a.in.pi, psi, a.n, B,
                       opts);
  } else if (a.in.family.settings.size() == 1) {
    res = classify_single(a.in.family.settings.front(), a.in.pi, a.n, B, mode,
                          opts);
  } else {
    res = classify_multi(a.in.family, a.in.pi, a.n, B, mode, opts);
  }
  std::string json = classification_to_json(res);
  if (a.out.empty()) {
    std::cout << json << "\n";
  } else {
    write_file(a.out, json);
  }
  const bool undetermined =
      res.kind == LikelihoodCase::Undetermined ||
      (res.kind == LikelihoodCase::PTLinearN &&
       res.subcase == PTLinearSubcase::Knife);
  return undetermined ? 2 : 0;
}

// ---- estimate / scan ------------------------------------------------

struct EstimateArgs {
  CommonInputs in;
  long n = 0, trials = 100000;
  std::uint64_t seed = 0;
  std::string b = "1", psi = "0", alpha, out;
  bool sup_search = false;
};

TrialPredicate make_predicate(const SettingFamily& family, const Rational& B,
                              const Rational& psi,
                              std::optional<FamilyMembership>& fm) {
  if (psi == 0) {
    fm.emplace(family, B);
    return [&fm](const HistL& h) { return (*fm)(h); };
  }
  return [&family, B, psi](const HistL& h) {
    return data_adversary_feasible(h, family, B, psi);
  };
}

int run_estimate(EstimateArgs& a) {
  a.in.load();
  Rational B = parse_rational(a.b);
  Rational psi = parse_rational(a.psi);
  if (a.sup_search && !a.alpha.empty())
    throw PmvError("--alpha and --sup-search are mutually exclusive");
  std::vector<Vec> mixtures;
  if (a.sup_search) {
    mixtures = sup_adversary_mixtures(a.in.family, a.in.pi);
  } else if (!a.alpha.empty()) {
    mixtures.push_back(parse_rational_list(a.alpha));
  } else {
    Vec alpha(a.in.pi.size(), 0);
    alpha[0] = 1;
    mixtures.push_back(alpha);
  }
  HistogramSampler sampler(a.in.pi);
  std::optional<FamilyMembership> fm;
  TrialPredicate pred = make_predicate(a.in.family, B, psi, fm);
  std::optional<ScanRecord> best;
  for (const Vec& alpha : mixtures) {
    VoterAssignment assign = round_mixture(alpha, a.n);
    EstimateResult est = estimate(pred, assign, sampler, a.trials, a.seed);
    est.n = a.n;
    est.B = B;
    est.psi = psi;
    est.setting = a.in.family.settings.size() == 1
                      ? a.in.family.settings.front().name
                      : "union-" + std::to_string(a.in.family.settings.size());
    est.problem = problem_name(a.in.family.problem);
    est.rule = a.in.family.rule.name;
    ScanRecord rec{a.n, B, est};
    if (!best || rec.est.successes > best->est.successes) best = rec;
  }
  std::string csv = scan_csv_header() + scan_csv_row(*best);
  std::cout << csv;
  if (!a.out.empty()) write_file(a.out, csv);
  return 0;
}

struct ScanArgs {
  CommonInputs in;
  std::string n_list, b_list, psi = "0", alpha, out;
  long trials = 100000, min_successes = 0, max_trials = 0;
  std::uint64_t seed = 0;
};

int run_scan(ScanArgs& a) {
  a.in.load();
  ScanConfig cfg;
  cfg.n_values = parse_long_list(a.n_list);
  cfg.b_values = parse_rational_list(a.b_list);
  cfg.psi = parse_rational(a.psi);
  cfg.trials = a.trials;
  cfg.min_successes = a.min_successes;
  cfg.max_trials = a.max_trials;
  cfg.seed = a.seed;
  if (!a.alpha.empty()) cfg.alpha = parse_rational_list(a.alpha);
  std::cout << scan_csv_header() << std::flush;
  auto records =
      scan(a.in.family, a.in.pi, cfg, [](const ScanRecord& r) {
        std::cout << scan_csv_row(r) << std::flush;  // stream as completed
      });
  if (!a.out.empty()) {
    std::string csv = scan_csv_header();
    for (const ScanRecord& r : records) csv += scan_csv_row(r);
    write_file(a.out, csv);
  }
  return 0;
}

// ---- oracle ---------------------------------------------------------

struct OracleArgs {
  std::string problem, rule, profile_path, family_path, b = "1", caps;
  int m = 3, d = 0;
  long node_budget = 1000000;
};

void print_moves(const char* verb, const HistL& hist, int m) {
  const auto& rankings = all_rankings(m);
  for (std::size_t i = 0; i < hist.size(); ++i) {
    if (hist[i] != 0)
      std::printf("  %s %ld x %s\n", verb, hist[i],
                  ranking_name(rankings[i]).c_str());
  }
}

int run_oracle(OracleArgs& a) {
  Profile p = parse_profile(read_file(a.profile_path), a.m);
  if (a.problem == "membership") {
    if (a.family_path.empty())
      throw PmvError("oracle membership needs --family");
    SettingFamily fam = family_from_json(read_file(a.family_path));
    bool yes =
        membership(p.hist, fam, parse_rational(a.b), a.node_budget);
    std::printf("membership: %s\n", yes ? "yes" : "no");
    return 0;
  }
  OracleCaps caps;
  if (!a.caps.empty()) {
    auto v = parse_long_list(a.caps);
    if (v.size() != 3) throw PmvError("--caps expects n,m,b");
    caps.max_n = v[0];
    caps.max_m = static_cast<int>(v[1]);
    caps.max_b = v[2];
  }
  InfluenceQuery q;
  q.problem = problem_by_name(a.problem);
  q.rule = rule_by_name(a.rule, a.m);
  q.profile = p;
  q.budget = parse_rational(a.b);
  if (a.d > 0) q.d = a.d;
  OracleAnswer ans = run_query(q, caps);
  std::printf("success: %s\n", ans.success ? "yes" : "no");
  if (ans.witness) {
    print_moves("remove", ans.witness->removed, a.m);
    print_moves("add", ans.witness->added, a.m);
    std::printf("  cost %s\n", to_string(ans.witness->cost).c_str());
  }
  return 0;
}

// ---- fit ------------------------------------------------------------

struct FitArgs {
  std::string in_path, axis = "n";
  long min_successes = 25;
};

std::vector<ScanRecord> parse_scan_csv(const std::string& text) {
  std::vector<ScanRecord> records;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (first) {  // header
      first = false;
      continue;
    }
    auto cols = split_commas(line);
    if (cols.size() < 12) throw PmvError("malformed scan CSV row: " + line);
    ScanRecord r;
    r.n = std::stol(cols[0]);
    r.B = parse_rational(cols[1]);
    r.est.psi = parse_rational(cols[2]);
    r.est.trials = std::stol(cols[3]);
    r.est.successes = std::stol(cols[4]);
    r.est.p_hat = std::stod(cols[5]);
    r.est.ci_low = std::stod(cols[6]);
    r.est.ci_high = std::stod(cols[7]);
    r.est.seed = std::stoull(cols[8]);
    r.est.setting = cols[9];
    r.est.problem = cols[10];
    r.est.rule = cols[11];
    r.est.n = r.n;
    r.est.B = r.B;
    records.push_back(std::move(r));
  }
  return records;
}

int run_fit(const FitArgs& a) {
  auto records = parse_scan_csv(read_file(a.in_path));
  ScanAxis axis;
  if (a.axis == "n") {
    axis = ScanAxis::N;
  } else if (a.axis == "b") {
    axis = ScanAxis::B;
  } else {
    throw PmvError("axis must be n or b");
  }
  SlopeFit fit = fit_slope(records, axis, a.min_successes);
  std::printf("slope %.6f\nintercept %.6f\nstderr %.6f\npoints %ld\n",
              fit.slope, fit.intercept, fit.stderr_slope, fit.points_used);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"polyhedral analysis of coalitional influence in elections"};
  app.require_subcommand(1);

  BuildArgs build_args;
  auto* cmd_build = app.add_subcommand(
      "build", "construct a setting family for a problem under a rule");
  cmd_build->add_option("--problem", build_args.problem,
                        "cm|mov|cml|ccav|ccdv|dcav|dcdv|eccav|eccdv|edcav|"
                        "edcdv|cb|db|ecb|edb")
      ->required();
  cmd_build->add_option("--rule", build_args.rule, "voting rule name")
      ->required();
  cmd_build->add_option("--m", build_args.m, "number of alternatives")
      ->required();
  cmd_build->add_option("--d", build_args.d,
                        "distinguished alternative (control/bribery)");
  cmd_build->add_option("--out", build_args.out, "family JSON output path");

  ClassifyArgs classify_args;
  auto* cmd_classify = app.add_subcommand(
      "classify", "semi-random likelihood classification of a family");
  cmd_classify->add_option("--family", classify_args.in.family_path)
      ->required();
  cmd_classify->add_option("--pi", classify_args.in.pi_path)->required();
  cmd_classify->add_option("--n", classify_args.n)->required();
  cmd_classify->add_option("--b", classify_args.b, "budget (rational)");
  cmd_classify->add_option("--psi", classify_args.psi,
                           "data-adversary rewrite fraction");
  cmd_classify->add_option("--mode", classify_args.mode, "sup|inf");
  cmd_classify->add_option("--knife-band", classify_args.knife,
                           "undetermined band around the budget threshold");
  cmd_classify->add_option("--ilp-budget", classify_args.ilp_budget);
  cmd_classify->add_option("--enum-budget", classify_args.enum_budget);
  cmd_classify->add_option("--out", classify_args.out);

  EstimateArgs estimate_args;
  auto* cmd_estimate = app.add_subcommand(
      "estimate", "Monte Carlo estimate of the instability probability");
  cmd_estimate->add_option("--family", estimate_args.in.family_path)
      ->required();
  cmd_estimate->add_option("--pi", estimate_args.in.pi_path)->required();
  cmd_estimate->add_option("--n", estimate_args.n)->required();
  cmd_estimate->add_option("--b", estimate_args.b);
  cmd_estimate->add_option("--psi", estimate_args.psi);
  cmd_estimate->add_option("--trials", estimate_args.trials);
  cmd_estimate->add_option("--seed", estimate_args.seed);
  cmd_estimate->add_option("--alpha", estimate_args.alpha,
                           "mixture over the vertex list (comma rationals)");
  cmd_estimate->add_flag("--sup-search", estimate_args.sup_search,
                         "search adversary mixtures, report the best");
  cmd_estimate->add_option("--out", estimate_args.out);

  ScanArgs scan_args;
  auto* cmd_scan =
      app.add_subcommand("scan", "estimate over an n x B grid, CSV output");
  cmd_scan->add_option("--family", scan_args.in.family_path)->required();
  cmd_scan->add_option("--pi", scan_args.in.pi_path)->required();
  cmd_scan->add_option("--n", scan_args.n_list, "comma list")->required();
  cmd_scan->add_option("--b", scan_args.b_list, "comma list")->required();
  cmd_scan->add_option("--psi", scan_args.psi);
  cmd_scan->add_option("--trials", scan_args.trials);
  cmd_scan->add_option("--min-successes", scan_args.min_successes,
                       "double trials until reached (or --max-trials)");
  cmd_scan->add_option("--max-trials", scan_args.max_trials);
  cmd_scan->add_option("--seed", scan_args.seed);
  cmd_scan->add_option("--alpha", scan_args.alpha);
  cmd_scan->add_option("--out", scan_args.out);

  OracleArgs oracle_args;
  auto* cmd_oracle = app.add_subcommand(
      "oracle", "brute-force ground truth on a concrete profile");
  cmd_oracle->add_option("--problem", oracle_args.problem,
                         "cm|mov|control/bribery variants|membership")
      ->required();
  cmd_oracle->add_option("--rule", oracle_args.rule);
  cmd_oracle->add_option("--m", oracle_args.m)->required();
  cmd_oracle->add_option("--profile", oracle_args.profile_path)->required();
  cmd_oracle->add_option("--b", oracle_args.b);
  cmd_oracle->add_option("--d", oracle_args.d);
  cmd_oracle->add_option("--caps", oracle_args.caps,
                         "exhaustive-search caps n,m,b");
  cmd_oracle->add_option("--family", oracle_args.family_path,
                         "family JSON (membership only)");
  cmd_oracle->add_option("--node-budget", oracle_args.node_budget);

  FitArgs fit_args;
  auto* cmd_fit =
      app.add_subcommand("fit", "log-log slope fit over a scan CSV");
  cmd_fit->add_option("--in", fit_args.in_path)->required();
  cmd_fit->add_option("--axis", fit_args.axis, "n|b");
  cmd_fit->add_option("--min-successes", fit_args.min_successes);

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_build->parsed()) return run_build(build_args);
    if (cmd_classify->parsed()) return run_classify(classify_args);
    if (cmd_estimate->parsed()) return run_estimate(estimate_args);
    if (cmd_scan->parsed()) return run_scan(scan_args);
    if (cmd_oracle->parsed()) return run_oracle(oracle_args);
    if (cmd_fit->parsed()) return run_fit(fit_args);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
