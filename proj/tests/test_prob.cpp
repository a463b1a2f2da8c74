#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "chameleon/prob.hpp"
#include "chameleon/rng.hpp"

using namespace chameleon;

namespace {

ProbVector random_prob(std::size_t n, Rng& rng) {
  std::vector<double> w(n);
  for (double& x : w) x = rng.next_double() + 1e-9;
  return ProbVector::normalized(std::move(w));
}

// Independent brute force for theta: enumerates subsets via explicit lists
// rather than bit masks.
double theta_brute_force(const BinTriple& b) {
  const std::vector<std::vector<double>> subsets = {
      {}, {b.p_gt}, {b.p_eq}, {b.p_lt},          {b.p_gt, b.p_eq}, {b.p_gt, b.p_lt},
      {b.p_eq, b.p_lt}, {b.p_gt, b.p_eq, b.p_lt}};
  double best = 0.0;
  for (const auto& subset : subsets) {
    double sum = 0.0;
    for (double a : subset) sum += a;
    best = std::max(best, std::min(sum, 1.0 - sum));
  }
  return best;
}

}  // namespace

TEST_CASE("ProbVector validation") {
  CHECK_THROWS_AS(ProbVector({0.5, 0.4}), std::invalid_argument);
  CHECK_THROWS_AS(ProbVector({1.5, -0.5}), std::invalid_argument);
  CHECK_THROWS_AS(ProbVector(std::vector<double>{}), std::invalid_argument);
  CHECK_NOTHROW(ProbVector({0.25, 0.75}));
  CHECK(ProbVector::uniform(4)[2] == 0.25);
  CHECK(ProbVector::point_mass(3, 1)[1] == 1.0);
  CHECK(ProbVector::normalized({2.0, 2.0})[0] == 0.5);
}

TEST_CASE("kl_divergence examples") {
  const ProbVector half({0.5, 0.5});
  CHECK(kl_divergence(half, half) == 0.0);

  // Oracle: direct summation of the two terms.
  const double expected = 0.5 * std::log(0.5 / 0.75) + 0.5 * std::log(0.5 / 0.25);
  CHECK(kl_divergence(half, ProbVector({0.75, 0.25})) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(kl_divergence(half, ProbVector({0.75, 0.25})) == doctest::Approx(0.143841).epsilon(1e-5));

  CHECK(kl_divergence(ProbVector({1.0, 0.0}), half) == doctest::Approx(std::log(2.0)));
  CHECK(std::isinf(kl_divergence(half, ProbVector({1.0, 0.0}))));
  CHECK_THROWS_AS(kl_divergence(half, ProbVector({1.0})), std::invalid_argument);
}

TEST_CASE("kl nonnegativity and Pinsker on random pairs") {
  Rng rng(7);
  for (int i = 0; i < 1000; ++i) {
    const ProbVector p = random_prob(5, rng);
    const ProbVector q = random_prob(5, rng);
    const double kl = kl_divergence(p, q);
    CHECK(kl >= 0.0);
    CHECK(kl_divergence(p, p) == 0.0);
    CHECK(tv_distance(p, q) <= std::sqrt(kl / 2.0) + 1e-12);
  }
}

TEST_CASE("l1 and tv distances") {
  const ProbVector p({1.0, 0.0});
  const ProbVector q({0.0, 1.0});
  CHECK(l1_distance(p, p) == 0.0);
  CHECK(l1_distance(p, q) == 2.0);
  CHECK(tv_distance(p, q) == 1.0);

  Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    const ProbVector a = random_prob(6, rng);
    const ProbVector b = random_prob(6, rng);
    const ProbVector c = random_prob(6, rng);
    CHECK(l1_distance(a, b) == 2.0 * tv_distance(a, b));
    CHECK(l1_distance(a, c) <= l1_distance(a, b) + l1_distance(b, c) + 1e-12);
  }
}

TEST_CASE("entropy in bits") {
  CHECK(entropy_bits(ProbVector::uniform(16)) == 4.0);
  CHECK(entropy_bits(ProbVector::point_mass(8, 3)) == 0.0);
  CHECK(entropy_bits(ProbVector({0.5, 0.25, 0.25})) == 1.5);
}

TEST_CASE("partition and bin probabilities") {
  const ProbVector di({0.6, 0.4});
  const ProbVector dj({0.4, 0.6});
  const ResponsePartition p1 = partition_responses(di, dj);
  CHECK(p1.gt == std::vector<std::size_t>{0});
  CHECK(p1.eq.empty());
  CHECK(p1.lt == std::vector<std::size_t>{1});

  const ProbVector same({0.3, 0.3, 0.4});
  const ResponsePartition p2 = partition_responses(same, same);
  CHECK(p2.eq.size() == 3);
  CHECK(p2.gt.empty());
  CHECK(p2.lt.empty());

  const ProbVector a({0.5, 0.3, 0.2});
  const ProbVector b({0.2, 0.3, 0.5});
  const ResponsePartition p3 = partition_responses(a, b);
  CHECK(p3.gt == std::vector<std::size_t>{0});
  CHECK(p3.eq == std::vector<std::size_t>{1});
  CHECK(p3.lt == std::vector<std::size_t>{2});

  const BinTriple bins = bin_probs(a, p3);
  CHECK(bins.p_gt == 0.5);
  CHECK(bins.p_eq == 0.3);
  CHECK(bins.p_lt == 0.2);

  const BinTriple eq_bins = bin_probs(same, p2);
  CHECK(eq_bins.p_gt == 0.0);
  CHECK(eq_bins.p_eq == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(eq_bins.p_lt == 0.0);

  // Partition bins stay disjoint and exhaustive on random pairs.
  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    const ProbVector x = random_prob(7, rng);
    const ProbVector y = random_prob(7, rng);
    const ResponsePartition part = partition_responses(x, y);
    CHECK(part.gt.size() + part.eq.size() + part.lt.size() == 7);
    const BinTriple t = bin_probs(x, part);
    CHECK(t.p_gt + t.p_eq + t.p_lt == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("theta against brute force") {
  CHECK(theta({0.3, 0.1, 0.6}) == 0.4);
  CHECK(theta({0.3, 0.1, 0.6}) == theta_brute_force({0.3, 0.1, 0.6}));
  CHECK(theta({1.0, 0.0, 0.0}) == 0.0);
  CHECK(theta({0.5, 0.0, 0.5}) == 0.5);

  Rng rng(5);
  for (int i = 0; i < 500; ++i) {
    const ProbVector p = random_prob(3, rng);
    const BinTriple b{p[0], p[1], p[2]};
    const double t = theta(b);
    CHECK(t == theta_brute_force(b));
    CHECK(t >= 0.0);
    CHECK(t <= 0.5);
    // invariant under permuting the bins
    CHECK(theta({b.p_eq, b.p_lt, b.p_gt}) == t);
    CHECK(theta({b.p_lt, b.p_gt, b.p_eq}) == t);
  }
}

TEST_CASE("varphi") {
  CHECK(varphi(0.5) == 2.0);
  // Numerical limit from below.
  CHECK(std::abs(varphi(0.5 - 1e-6) - 2.0) < 1e-9);
  CHECK(varphi(0.4) == doctest::Approx(5.0 * std::log(1.5)).epsilon(1e-12));
  CHECK(std::isinf(varphi(0.0)));
  CHECK_THROWS_AS(varphi(-0.1), std::invalid_argument);
  CHECK_THROWS_AS(varphi(0.6), std::invalid_argument);

  // Monotone decreasing on (0, 1/2].
  double prev = std::numeric_limits<double>::infinity();
  for (double t = 0.01; t <= 0.5 + 1e-12; t += 0.01) {
    const double v = varphi(std::min(t, 0.5));
    CHECK(v < prev);
    prev = v;
  }
}
