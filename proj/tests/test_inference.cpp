#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "chameleon/inference.hpp"
#include "chameleon/rng.hpp"

using namespace chameleon;

namespace {

LikelihoodTable random_table(int words, int responses, Rng& rng) {
  std::vector<std::vector<double>> values(words, std::vector<double>(responses));
  for (auto& row : values)
    for (double& v : row) v = rng.next_double() + 1e-6;
  std::vector<std::string> wl, rl;
  for (int w = 0; w < words; ++w) wl.push_back("w" + std::to_string(w));
  for (int r = 0; r < responses; ++r) rl.push_back("r" + std::to_string(r));
  return LikelihoodTable(std::move(values), std::move(wl), std::move(rl));
}

}  // namespace

TEST_CASE("posterior basics") {
  // Uniform likelihoods leave the prior untouched.
  const LikelihoodTable uniform(std::vector<std::vector<double>>(4, {0.5, 0.5}),
                                {"a", "b", "c", "d"}, {"x", "y"});
  const ProbVector prior({0.4, 0.3, 0.2, 0.1});
  const Posterior post = posterior(uniform, std::vector<int>{0, 1, 0}, prior);
  CHECK_FALSE(post.degenerate);
  CHECK(post.observations == 3);
  for (int w = 0; w < 4; ++w) CHECK(post.dist[w] == doctest::Approx(prior[w]).epsilon(1e-12));

  // Full-reveal table: one response pins the word.
  const LikelihoodTable reveal = LikelihoodTable::from_strategy(full_reveal_strategy(16));
  const Posterior point = posterior(reveal, std::vector<int>{7}, ProbVector::uniform(16));
  CHECK(point.dist[7] == 1.0);
  CHECK(map_estimate(point) == 7);
  CHECK(secret_rank(point, 7) == 1);

  // Two-word worked example: scores 0.81 vs 0.25.
  const LikelihoodTable two({{0.9, 0.1}, {0.5, 0.5}}, {"w1", "w2"}, {"ra", "rb"});
  const Posterior mixed = posterior(two, std::vector<int>{0, 0}, ProbVector::uniform(2));
  CHECK(mixed.dist[0] == doctest::Approx(0.81 / (0.81 + 0.25)).epsilon(1e-9));
  CHECK(mixed.dist[0] == doctest::Approx(0.764).epsilon(2e-3));

  CHECK_THROWS_AS(posterior(two, std::vector<int>{5}, ProbVector::uniform(2)),
                  std::invalid_argument);
}

TEST_CASE("all-zero scores degrade to uniform with a flag") {
  const LikelihoodTable sparse({{0.0, 1.0}, {0.0, 1.0}}, {"w1", "w2"}, {"ra", "rb"});
  const Posterior post = posterior(sparse, std::vector<int>{0}, ProbVector::uniform(2));
  CHECK(post.degenerate);
  CHECK(post.dist[0] == 0.5);
}

TEST_CASE("map estimate and ranks") {
  const Posterior uniform{ProbVector::uniform(16), 0, false};
  CHECK(map_estimate(uniform) == 0);  // lowest-index tie-break
  CHECK(top_k_mass(uniform, 4) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(top_k_mass(uniform, 0) == 0.0);
  CHECK(secret_rank(uniform, 0) == 1);
  CHECK(secret_rank(uniform, 5) == 6);  // ties resolve toward lower indices

  const Posterior skewed{ProbVector({0.1, 0.6, 0.3}), 1, false};
  CHECK(map_estimate(skewed) == 1);
  CHECK(secret_rank(skewed, 2) == 2);
  CHECK(top_k_mass(skewed, 2) == doctest::Approx(0.9).epsilon(1e-12));
}

TEST_CASE("map estimator under the concealing strategy guesses at chance") {
  const StationaryStrategy s = interpolated_strategy(16, 0.0);
  const LikelihoodTable table = LikelihoodTable::from_strategy(s);
  Rng rng(314);
  long hits = 0;
  const long trials = 20000;
  for (long i = 0; i < trials; ++i) {
    const int secret = static_cast<int>(rng.next_below(16));
    std::vector<int> responses;
    for (int j = 0; j < 3; ++j)
      responses.push_back(static_cast<int>(rng.categorical(s.row(secret).values())));
    const Posterior post = posterior(table, responses, ProbVector::uniform(16));
    if (map_estimate(post) == secret) ++hits;
  }
  CHECK(std::abs(hits / double(trials) - 1.0 / 16.0) < 0.01);
}

TEST_CASE("posterior is order invariant and sequentially consistent") {
  Rng rng(2718);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const LikelihoodTable table = random_table(6, 5, rng);
    std::vector<int> responses;
    for (int i = 0; i < 4; ++i) responses.push_back(static_cast<int>(rng.next_below(5)));
    const ProbVector prior = ProbVector::uniform(6);

    const Posterior forward = posterior(table, responses, prior);
    std::vector<int> shuffled = responses;
    std::reverse(shuffled.begin(), shuffled.end());
    std::swap(shuffled[0], shuffled[shuffled.size() / 2]);
    const Posterior permuted = posterior(table, shuffled, prior);

    Posterior sequential{prior, 0, false};
    for (int r : responses)
      sequential = posterior(table, std::vector<int>{r}, sequential.dist);

    for (int w = 0; w < 6; ++w) {
      worst = std::max(worst, std::abs(forward.dist[w] - permuted.dist[w]));
      worst = std::max(worst, std::abs(forward.dist[w] - sequential.dist[w]));
    }
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("entropy collapses under reveal and stays flat under concealment") {
  const LikelihoodTable reveal = LikelihoodTable::from_strategy(full_reveal_strategy(16));
  const Posterior one = posterior(reveal, std::vector<int>{3}, ProbVector::uniform(16));
  CHECK(entropy_bits(one.dist) == 0.0);

  const LikelihoodTable conceal = LikelihoodTable::from_strategy(zero_kl_strategy(16));
  for (int m = 1; m <= 4; ++m) {
    const std::vector<int> responses(m, 0);
    CHECK(entropy_bits(posterior(conceal, responses, ProbVector::uniform(16)).dist) == 4.0);
  }
}

TEST_CASE("mean posterior entropy decreases with more honest responses") {
  const StationaryStrategy s = interpolated_strategy(16, 0.5);
  const LikelihoodTable table = LikelihoodTable::from_strategy(s);
  Rng rng(10101);
  const int histories = 2000;
  std::vector<double> mean_entropy(4, 0.0);
  for (int h = 0; h < histories; ++h) {
    const int secret = static_cast<int>(rng.next_below(16));
    std::vector<int> responses;
    for (int m = 0; m <= 3; ++m) {
      mean_entropy[m] += entropy_bits(posterior(table, responses, ProbVector::uniform(16)).dist);
      responses.push_back(static_cast<int>(rng.categorical(s.row(secret).values())));
    }
  }
  for (double& e : mean_entropy) e /= histories;
  CHECK(mean_entropy[0] == 4.0);
  for (int m = 0; m < 3; ++m) CHECK(mean_entropy[m] > mean_entropy[m + 1]);
}

TEST_CASE("count table CSV") {
  std::istringstream csv(
      "word,response,joint_count,word_count\n"
      "pizza,cheese,120,400\n"
      "pizza,wave,2,400\n"
      "radio,wave,90,300\n");
  const LikelihoodTable table = LikelihoodTable::from_counts_csv(csv);
  CHECK(table.n_words() == 2);
  CHECK(table.n_responses() == 2);
  CHECK(table.word_labels()[0] == "pizza");
  CHECK(table.likelihood(0, 0) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(table.likelihood(1, 0) == 0.0);  // unseen pair
  CHECK(table.response_index("wave") == 1);
  CHECK(table.word_index("radio") == 1);
  CHECK_FALSE(table.response_index("oven").has_value());

  std::istringstream bad("word,response\n");
  CHECK_THROWS_AS(LikelihoodTable::from_counts_csv(bad), std::invalid_argument);
  std::istringstream zero(
      "word,response,joint_count,word_count\n"
      "pizza,cheese,1,0\n");
  CHECK_THROWS_AS(LikelihoodTable::from_counts_csv(zero), std::invalid_argument);
}
