#include <algorithm>
#include <cmath>
#include <functional>

#include "doctest.h"
#include "pmv/elections.hpp"
#include "pmv/montecarlo.hpp"
#include "pmv/oracles.hpp"
#include "pmv/settings.hpp"

using namespace pmv;

namespace {

SettingFamily toy_family() {
  SettingFamily fam;
  fam.problem = Problem::MoV;
  fam.rule = plurality(2);
  fam.settings = {toy_setting()};
  return fam;
}

std::vector<long> vertex_counts(const VoterAssignment& a, std::size_t nv) {
  std::vector<long> c(nv, 0);
  for (std::size_t v : a.vertex_of) c[v]++;
  return c;
}

}  // namespace

TEST_CASE("per-trial substreams are deterministic and order independent") {
  SplitMix64 a = trial_stream(42, 7);
  SplitMix64 b = trial_stream(42, 7);
  CHECK(a.next() == b.next());
  CHECK(trial_stream(42, 7).state != trial_stream(42, 8).state);
  CHECK(trial_stream(42, 7).state != trial_stream(43, 7).state);
  for (int i = 0; i < 100; ++i) {
    double u = a.next_unit();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("mixture rounding puts the remainder on the last vertex") {
  VoterAssignment one = round_mixture({rat(1)}, 7);
  CHECK(one.vertex_of.size() == 7);
  CHECK(vertex_counts(one, 1) == std::vector<long>{7});

  VoterAssignment half = round_mixture({rat(1, 2), rat(1, 2)}, 7);
  CHECK(vertex_counts(half, 2) == std::vector<long>{3, 4});

  VoterAssignment third =
      round_mixture({rat(1, 3), rat(1, 3), rat(1, 3)}, 10);
  CHECK(vertex_counts(third, 3) == std::vector<long>{3, 3, 4});
}

TEST_CASE("histogram sampling is exact on point masses and sums to n") {
  // Two deterministic vertices: the histogram is fixed by the rounding.
  std::vector<Vec> pi = {{rat(0), rat(1)}, {rat(1), rat(0)}};
  HistogramSampler s(pi);
  CHECK(s.dim() == 2);
  VoterAssignment assign = round_mixture({rat(1, 2), rat(1, 2)}, 7);
  SplitMix64 rng = trial_stream(1, 0);
  CHECK(s.sample(assign, rng) == HistL{4, 3});

  std::vector<Vec> uni = {uniform_distribution(3)};
  HistogramSampler u(uni);
  VoterAssignment all = round_mixture({rat(1)}, 59);
  for (std::uint64_t t = 0; t < 50; ++t) {
    SplitMix64 r = trial_stream(9, t);
    HistL h = u.sample(all, r);
    long total = 0;
    for (long c : h) total += c;
    CHECK(total == 59);
  }

  VoterAssignment bad = all;
  bad.vertex_of[0] = 5;
  SplitMix64 r2 = trial_stream(9, 0);
  CHECK_THROWS_AS(u.sample(bad, r2), PmvError);
}

TEST_CASE("sampled coordinates match the mixture in expectation") {
  std::vector<Vec> pi = {uniform_distribution(3)};
  HistogramSampler s(pi);
  VoterAssignment assign = round_mixture({rat(1)}, 60);
  std::vector<double> mean(6, 0.0);
  const long draws = 20000;
  for (std::uint64_t t = 0; t < static_cast<std::uint64_t>(draws); ++t) {
    SplitMix64 rng = trial_stream(2024, t);
    HistL h = s.sample(assign, rng);
    for (std::size_t j = 0; j < 6; ++j) mean[j] += static_cast<double>(h[j]);
  }
  for (std::size_t j = 0; j < 6; ++j)
    CHECK(std::abs(mean[j] / static_cast<double>(draws) - 10.0) < 0.2);
}

TEST_CASE("Wilson intervals bracket the point estimate") {
  constexpr double z = 1.959963984540054;
  double lo = -1, hi = -1;

  wilson_interval(0, 100, lo, hi);
  CHECK(lo == 0.0);
  CHECK(hi == doctest::Approx(z * z / (100.0 + z * z)).epsilon(1e-12));

  wilson_interval(100, 100, lo, hi);
  CHECK(hi == 1.0);
  CHECK(lo == doctest::Approx(100.0 / (100.0 + z * z)).epsilon(1e-12));

  wilson_interval(50, 100, lo, hi);
  CHECK(lo < 0.5);
  CHECK(hi > 0.5);
  CHECK(lo + hi == doctest::Approx(1.0).epsilon(1e-12));  // symmetric

  double lo2, hi2;
  wilson_interval(60, 100, lo2, hi2);
  CHECK(lo2 > lo);

  wilson_interval(0, 0, lo, hi);
  CHECK(lo == 0.0);
  CHECK(hi == 1.0);
}

TEST_CASE("estimation reproduces a hand-rolled trial loop") {
  SettingFamily fam = toy_family();
  FamilyMembership member(fam, rat(1));
  std::vector<Vec> pi = {{rat(1, 2), rat(1, 2)}};
  HistogramSampler sampler(pi);
  VoterAssignment assign = round_mixture({rat(1)}, 10);

  auto manual = [&](std::uint64_t seed, long trials) {
    long hits = 0;
    for (std::uint64_t t = 0; t < static_cast<std::uint64_t>(trials); ++t) {
      SplitMix64 rng = trial_stream(seed, t);
      if (member(sampler.sample(assign, rng))) ++hits;
    }
    return hits;
  };

  TrialPredicate pred = [&](const HistL& h) { return member(h); };
  EstimateResult e100 = estimate(pred, assign, sampler, 100, 555);
  EstimateResult e200 = estimate(pred, assign, sampler, 200, 555);
  CHECK(e100.successes == manual(555, 100));
  CHECK(e200.successes == manual(555, 200));
  // Extending the trial range preserves the prefix outcomes.
  CHECK(e200.successes - e100.successes == manual(555, 200) - manual(555, 100));
  CHECK(e100.n == 10);
  CHECK(e100.p_hat ==
        doctest::Approx(static_cast<double>(e100.successes) / 100.0));

  EstimateResult again = estimate(pred, assign, sampler, 100, 555);
  CHECK(again.successes == e100.successes);

  EstimateResult sure =
      estimate([](const HistL&) { return true; }, assign, sampler, 50, 1);
  CHECK(sure.successes == 50);
  CHECK(sure.p_hat == 1.0);
  EstimateResult never =
      estimate([](const HistL&) { return false; }, assign, sampler, 50, 1);
  CHECK(never.successes == 0);

  CHECK_THROWS_AS(estimate(pred, assign, sampler, 0, 1), PmvError);
  TrialPredicate boom = [](const HistL&) -> bool {
    throw PmvError("inner failure");
  };
  try {
    estimate(boom, assign, sampler, 5, 1);
    CHECK(false);
  } catch (const PmvError& e) {
    CHECK(std::string(e.what()).find("trial") != std::string::npos);
  }
}

TEST_CASE("the estimate brackets the exact stable-set probability") {
  // n = 10 fair coin flips between the two vote types: the unstable set
  // at B = 1 is exactly the perfectly balanced histogram, so
  // p* = C(10,5)/2^10 = 252/1024.
  SettingFamily fam = toy_family();
  FamilyMembership member(fam, rat(1));
  std::vector<Vec> pi = {{rat(1, 2), rat(1, 2)}};
  HistogramSampler sampler(pi);
  VoterAssignment assign = round_mixture({rat(1)}, 10);
  EstimateResult e = estimate([&](const HistL& h) { return member(h); },
                              assign, sampler, 20000, 20260819);
  const double exact = 252.0 / 1024.0;
  CHECK(std::abs(e.p_hat - exact) < 0.015);
  CHECK(e.ci_low <= exact);
  CHECK(e.ci_high >= exact);
}

TEST_CASE("fast membership agrees with the reference decider") {
  SUBCASE("enumerated small-budget path") {
    SettingFamily fam = build_family(Problem::CM, borda(3));
    FamilyMembership fast(fam, rat(1));
    HistL h(6, 0);
    long checked = 0;
    // Every histogram of total 6 over the six vote types.
    std::function<void(std::size_t, long)> walk = [&](std::size_t from,
                                                      long left) {
      if (from == 5) {
        h[5] = left;
        CHECK(fast(h) == membership(h, fam, rat(1)));
        ++checked;
        return;
      }
      for (long c = 0; c <= left; ++c) {
        h[from] = c;
        walk(from + 1, left - c);
        h[from] = 0;
      }
    };
    walk(0, 6);
    CHECK(checked == 462);
  }

  SUBCASE("prescreen plus exact fallback for large budgets") {
    SettingFamily fam = build_family(Problem::CML, borda(3));
    FamilyMembership fast(fam, rat(12));
    HistL h(6, 0);
    long checked = 0, agreements = 0;
    std::function<void(std::size_t, long)> walk = [&](std::size_t from,
                                                      long left) {
      if (from == 5) {
        h[5] = left;
        if (++checked % 7 == 0) {
          bool a = fast(h);
          bool b = membership(h, fam, rat(12));
          CHECK(a == b);
          if (a == b) ++agreements;
        }
        return;
      }
      for (long c = 0; c <= left; ++c) {
        h[from] = c;
        walk(from + 1, left - c);
        h[from] = 0;
      }
    };
    walk(0, 8);
    CHECK(agreements == 1287 / 7);
  }

  SUBCASE("success is monotone in the budget, histogram by histogram") {
    SettingFamily fam = build_family(Problem::CM, plurality(3));
    FamilyMembership b1(fam, rat(1)), b2(fam, rat(2));
    HistL h(6, 0);
    std::function<void(std::size_t, long)> walk = [&](std::size_t from,
                                                      long left) {
      if (from == 5) {
        h[5] = left;
        if (b1(h)) CHECK(b2(h));
        return;
      }
      for (long c = 0; c <= left; ++c) {
        h[from] = c;
        walk(from + 1, left - c);
        h[from] = 0;
      }
    };
    walk(0, 5);
  }
}

TEST_CASE("the vote-rewrite adversary extends plain membership") {
  SettingFamily fam = toy_family();
  // ψ·n = 10 rewrites balance a 60/40 split; 5 are not enough.
  CHECK(data_adversary_feasible({60, 40}, fam, rat(1), rat(1, 10)));
  CHECK_FALSE(data_adversary_feasible({60, 40}, fam, rat(1), rat(1, 20)));
  CHECK_FALSE(data_adversary_feasible({60, 40}, fam, rat(1), rat(0)));
  // ψ = 0 degenerates to membership.
  CHECK(data_adversary_feasible({50, 50}, fam, rat(1), rat(0)));
  CHECK(FamilyMembership(fam, rat(1))({50, 50}));
  // No operation budget: the source and target demands are contradictory.
  CHECK_FALSE(data_adversary_feasible({50, 50}, fam, rat(0), rat(1)));
}

TEST_CASE("sup-adversary candidates cover witnesses, grid and vertices") {
  SettingFamily fam = toy_family();
  std::vector<Vec> pi = {{rat(1, 2), rat(1, 2)}, {rat(2, 5), rat(3, 5)}};
  std::vector<Vec> mixtures = sup_adversary_mixtures(fam, pi);
  CHECK(mixtures.size() == 9);  // 1/8 grid over two vertices, deduplicated
  for (const Vec& a : mixtures) {
    REQUIRE(a.size() == 2);
    Rational sum = 0;
    for (const auto& e : a) {
      CHECK(e >= 0);
      sum += e;
    }
    CHECK(sum == 1);
  }
  auto has = [&](const Vec& v) {
    return std::find(mixtures.begin(), mixtures.end(), v) != mixtures.end();
  };
  CHECK(has({rat(1), rat(0)}));  // the Cone₀ witness and a unit mass
  CHECK(has({rat(0), rat(1)}));
  CHECK(has({rat(1, 2), rat(1, 2)}));

  std::vector<Vec> single = sup_adversary_mixtures(fam, {pi[0]});
  CHECK(single.size() == 1);
  CHECK(single[0] == Vec{rat(1)});
}

TEST_CASE("grid scans label rows and stay reproducible") {
  SettingFamily fam = toy_family();
  std::vector<Vec> pi = {{rat(1, 2), rat(1, 2)}};
  ScanConfig cfg;
  cfg.n_values = {10, 20};
  cfg.b_values = {rat(1)};
  cfg.trials = 2000;
  cfg.seed = 7;

  std::vector<long> seen;
  auto records =
      scan(fam, pi, cfg, [&](const ScanRecord& r) { seen.push_back(r.n); });
  REQUIRE(records.size() == 2);
  CHECK(seen == std::vector<long>{10, 20});
  CHECK(records[0].est.setting == "toy");
  CHECK(records[0].est.problem == "mov");
  CHECK(records[0].est.rule == "plurality");
  CHECK(records[0].est.trials == 2000);
  CHECK(std::abs(records[0].est.p_hat - 252.0 / 1024.0) < 0.03);
  CHECK(std::abs(records[1].est.p_hat - 184756.0 / 1048576.0) < 0.03);

  auto again = scan(fam, pi, cfg);
  CHECK(again[0].est.successes == records[0].est.successes);
  CHECK(again[1].est.successes == records[1].est.successes);
  CHECK(scan_csv_row(again[0]) == scan_csv_row(records[0]));

  // Adaptive doubling reruns the same substreams at the capped size.
  ScanConfig adaptive = cfg;
  adaptive.n_values = {10};
  adaptive.trials = 100;
  adaptive.min_successes = 1000000;
  adaptive.max_trials = 400;
  ScanConfig fixed = adaptive;
  fixed.trials = 400;
  fixed.min_successes = 0;
  auto a = scan(fam, pi, adaptive);
  auto f = scan(fam, pi, fixed);
  REQUIRE(a.size() == 1);
  CHECK(a[0].est.trials == 400);
  CHECK(a[0].est.successes == f[0].est.successes);
  CHECK(scan_csv_row(a[0]) == scan_csv_row(f[0]));

  CHECK(scan_csv_header() ==
        "n,B,psi,trials,successes,p_hat,ci_low,ci_high,seed,setting,problem,"
        "rule\n");
  std::string row = scan_csv_row(records[0]);
  CHECK(row.substr(0, 5) == "10,1,");
  CHECK(std::count(row.begin(), row.end(), ',') == 11);
}

TEST_CASE("slope fitting recovers exact power laws") {
  auto rec = [](long n, const Rational& B, long successes, long trials) {
    ScanRecord r;
    r.n = n;
    r.B = B;
    r.est.trials = trials;
    r.est.successes = successes;
    r.est.p_hat =
        static_cast<double>(successes) / static_cast<double>(trials);
    return r;
  };

  // p = 1/√n exactly on a four-point grid.
  std::vector<ScanRecord> inv_sqrt = {
      rec(100, rat(1), 1000, 10000), rec(400, rat(1), 500, 10000),
      rec(1600, rat(1), 250, 10000), rec(6400, rat(1), 125, 10000)};
  SlopeFit fit = fit_slope(inv_sqrt, ScanAxis::N);
  CHECK(fit.slope == doctest::Approx(-0.5).epsilon(1e-9));
  CHECK(fit.intercept == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
  CHECK(fit.stderr_slope == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
  CHECK(fit.points_used == 4);

  // Points under the success floor are ignored.
  std::vector<ScanRecord> with_noise = inv_sqrt;
  with_noise.push_back(rec(25600, rat(1), 10, 10000));  // below the floor
  SlopeFit filtered = fit_slope(with_noise, ScanAxis::N);
  CHECK(filtered.points_used == 4);
  CHECK(filtered.slope == doctest::Approx(-0.5).epsilon(1e-9));

  // p ∝ B on the budget axis.
  std::vector<ScanRecord> linear = {
      rec(2500, rat(1), 100, 10000), rec(2500, rat(2), 200, 10000),
      rec(2500, rat(4), 400, 10000), rec(2500, rat(8), 800, 10000)};
  SlopeFit bfit = fit_slope(linear, ScanAxis::B);
  CHECK(bfit.slope == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(bfit.points_used == 4);

  CHECK_THROWS_AS(fit_slope({inv_sqrt[0], inv_sqrt[1]}, ScanAxis::N),
                  PmvError);
  std::vector<ScanRecord> dead = {rec(100, rat(1), 0, 100),
                                  rec(400, rat(1), 0, 100),
                                  rec(1600, rat(1), 0, 100)};
  CHECK_THROWS_AS(fit_slope(dead, ScanAxis::N), PmvError);
  std::vector<ScanRecord> zero_b = {
      rec(2500, rat(0), 100, 10000), rec(2500, rat(2), 200, 10000),
      rec(2500, rat(4), 400, 10000), rec(2500, rat(8), 800, 10000)};
  CHECK_THROWS_AS(fit_slope(zero_b, ScanAxis::B), PmvError);
  std::vector<ScanRecord> same_n = {rec(100, rat(1), 100, 1000),
                                    rec(100, rat(1), 100, 1000),
                                    rec(100, rat(1), 100, 1000)};
  CHECK_THROWS_AS(fit_slope(same_n, ScanAxis::N), PmvError);
}
