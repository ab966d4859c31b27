// Microbenchmarks for the hot paths: per-trial unstable-set membership,
// histogram sampling, exact LP solves, winner evaluation, and the full
// classification of the two-coordinate example.

#include <benchmark/benchmark.h>

#include "pmv/classify.hpp"
#include "pmv/lp.hpp"
#include "pmv/montecarlo.hpp"
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

HistL sample_hist(const std::vector<Vec>& pi, long n, std::uint64_t trial) {
  HistogramSampler sampler(pi);
  VoterAssignment assign = round_mixture({rat(1)}, n);
  SplitMix64 rng = trial_stream(7, trial);
  return sampler.sample(assign, rng);
}

void BM_MembershipToy(benchmark::State& state) {
  SettingFamily fam = toy_family();
  FamilyMembership member(fam, rat(1));
  HistL h = sample_hist({{rat(1, 2), rat(1, 2)}}, state.range(0), 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(member(h));
    h[0] ^= 1;  // perturb so the call cannot be hoisted
  }
}
BENCHMARK(BM_MembershipToy)->Arg(100)->Arg(10000);

void BM_MembershipScoringUnion(benchmark::State& state) {
  SettingFamily fam = build_family(Problem::CM, borda(3));
  FamilyMembership member(fam, rat(state.range(0)));
  HistL h = sample_hist({uniform_distribution(3)}, 1000, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(member(h));
    h[0] ^= 1;
  }
}
BENCHMARK(BM_MembershipScoringUnion)->Arg(1)->Arg(4);

void BM_SampleHistogram(benchmark::State& state) {
  HistogramSampler sampler({uniform_distribution(3)});
  VoterAssignment assign = round_mixture({rat(1)}, state.range(0));
  std::uint64_t trial = 0;
  for (auto _ : state) {
    SplitMix64 rng = trial_stream(7, trial++);
    benchmark::DoNotOptimize(sampler.sample(assign, rng));
  }
}
BENCHMARK(BM_SampleHistogram)->Arg(100)->Arg(10000);

void BM_LpSolve(benchmark::State& state) {
  // Touch-budget LP of the borda pair setting: a representative solve.
  PmvSetting s = build_cm_scoring(borda(3), 1, 2);
  Vec uni = uniform_distribution(3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(min_budget(s, {uni}, BudgetKind::Touch));
  }
}
BENCHMARK(BM_LpSolve);

void BM_WinnerBorda(benchmark::State& state) {
  VotingRule rule = borda(3);
  HistL h = sample_hist({uniform_distribution(3)}, 1000, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(winner(rule, h));
    h[0] ^= 1;
  }
}
BENCHMARK(BM_WinnerBorda);

void BM_WinnerSchulze(benchmark::State& state) {
  VotingRule rule = rule_by_name("schulze", 3);
  HistL h = sample_hist({uniform_distribution(3)}, 1000, 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(winner(rule, h));
    h[0] ^= 1;
  }
}
BENCHMARK(BM_WinnerSchulze);

void BM_ClassifyToy(benchmark::State& state) {
  PmvSetting toy = toy_setting();
  std::vector<Vec> pi = {{rat(2, 5), rat(3, 5)}};
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        classify_single(toy, pi, 1000, rat(1), Mode::Sup));
  }
}
BENCHMARK(BM_ClassifyToy);

}  // namespace

BENCHMARK_MAIN();
