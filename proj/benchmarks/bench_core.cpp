#include <benchmark/benchmark.h>

#include "chameleon/inference.hpp"
#include "chameleon/simulate.hpp"

using namespace chameleon;

namespace {

void BM_RunGame_ZeroKl(benchmark::State& state) {
  const GameConfig config = GameConfig::generic(4, 16);
  const auto strategy = std::make_shared<StationaryStrategy>(zero_kl_strategy(16));
  const MixtureChameleonStrategy chameleon(strategy);
  std::uint64_t trial = 0;
  for (auto _ : state) {
    Rng rng(derive_stream_seed(1, trial++));
    benchmark::DoNotOptimize(run_game(config, *strategy, chameleon, rng));
  }
}
BENCHMARK(BM_RunGame_ZeroKl);

void BM_RunGame_FullReveal(benchmark::State& state) {
  const GameConfig config = GameConfig::generic(4, 16);
  const auto strategy = std::make_shared<StationaryStrategy>(full_reveal_strategy(16));
  const MixtureChameleonStrategy chameleon(strategy);
  std::uint64_t trial = 0;
  for (auto _ : state) {
    Rng rng(derive_stream_seed(2, trial++));
    benchmark::DoNotOptimize(run_game(config, *strategy, chameleon, rng));
  }
}
BENCHMARK(BM_RunGame_FullReveal);

void BM_RunGame_Amb(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int block = static_cast<int>(state.range(1));
  const GameConfig config = GameConfig::generic(n, block * (n + 1), block);
  const AmbStrategy strategy(block);
  const AmbChameleonStrategy chameleon(block);
  std::uint64_t trial = 0;
  for (auto _ : state) {
    Rng rng(derive_stream_seed(3, trial++));
    benchmark::DoNotOptimize(run_game(config, strategy, chameleon, rng));
  }
}
BENCHMARK(BM_RunGame_Amb)->Args({3, 4})->Args({7, 2});

void BM_Prop3Estimate(benchmark::State& state) {
  const int n_responses = static_cast<int>(state.range(0));
  const StationaryStrategy strategy = interpolated_strategy(16, 0.8);
  const double alpha = strategy.l1_pairwise_min();
  Rng rng(4);
  std::vector<Response> responses;
  for (int i = 0; i < n_responses; ++i)
    responses.push_back(Response::symbol(static_cast<int>(rng.categorical(strategy.row(3).values()))));
  for (auto _ : state)
    benchmark::DoNotOptimize(prop3_estimate(strategy, responses, alpha));
}
BENCHMARK(BM_Prop3Estimate)->Arg(3)->Arg(15);

void BM_PosteriorUpdate(benchmark::State& state) {
  const StationaryStrategy strategy = interpolated_strategy(16, 0.5);
  const LikelihoodTable table = LikelihoodTable::from_strategy(strategy);
  const ProbVector prior = ProbVector::uniform(16);
  const std::vector<int> responses{3, 3, 7};
  for (auto _ : state)
    benchmark::DoNotOptimize(posterior(table, responses, prior));
}
BENCHMARK(BM_PosteriorUpdate);

void BM_KlDivergence(benchmark::State& state) {
  const StationaryStrategy strategy = interpolated_strategy(16, 0.3);
  for (auto _ : state)
    benchmark::DoNotOptimize(kl_divergence(strategy.row(0), strategy.row(1)));
}
BENCHMARK(BM_KlDivergence);

}  // namespace

BENCHMARK_MAIN();
