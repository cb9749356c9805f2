#include <doctest.h>

#include <cmath>
#include <limits>

#include "din/error.hpp"
#include "din/infotheory.hpp"
#include "support.hpp"

using namespace din;
using doctest::Approx;

TEST_CASE("entropy of small distributions") {
  CHECK(entropy(DiscreteDistribution({0.5, 0.5})) == Approx(1.0));
  CHECK(entropy(DiscreteDistribution({1.0, 0.0})) == 0.0);
  CHECK(entropy(DiscreteDistribution({0.25, 0.75})) == Approx(0.811278).epsilon(1e-6));
  CHECK(entropy(DiscreteDistribution::uniform(8)) == Approx(3.0));
}

TEST_CASE("distributions are validated") {
  CHECK_THROWS_AS(DiscreteDistribution({0.5, 0.6}), ValidationError);
  CHECK_THROWS_AS(DiscreteDistribution({-0.1, 1.1}), ValidationError);
  CHECK_THROWS_AS(ConditionalMatrix(2, 2, {0.5, 0.5, 0.2, 0.7}), ValidationError);
  CHECK_THROWS_AS(ConditionalMatrix(2, 2, {1.0, 0.0, 1.0}), ValidationError);
  CHECK_NOTHROW(DiscreteDistribution({0.5, 0.5 + 1e-12}));
}

TEST_CASE("kl divergence") {
  CHECK(kl_divergence(DiscreteDistribution({0.3, 0.7}), DiscreteDistribution({0.3, 0.7})) == 0.0);
  CHECK(kl_divergence(DiscreteDistribution({1.0, 0.0}), DiscreteDistribution({0.5, 0.5})) == Approx(1.0));
  CHECK(std::isinf(kl_divergence(DiscreteDistribution({0.5, 0.5}), DiscreteDistribution({1.0, 0.0}))));
  CHECK_THROWS_AS(kl_divergence(DiscreteDistribution({1.0}), DiscreteDistribution({0.5, 0.5})), ValidationError);
}

TEST_CASE("mutual information through a channel") {
  const auto fair = DiscreteDistribution::uniform(2);
  CHECK(mutual_information(fair, ConditionalMatrix(2, 2, {0.3, 0.7, 0.3, 0.7})) == Approx(0.0));
  CHECK(mutual_information(fair, ConditionalMatrix::identity(2)) == Approx(1.0));
  CHECK(mutual_information(fair, ConditionalMatrix(2, 2, {0.89, 0.11, 0.11, 0.89})) == Approx(0.500).epsilon(0.002));
}

TEST_CASE("joint tables") {
  JointDistribution product(2, 2, {0.25, 0.25, 0.25, 0.25});
  CHECK(joint_mutual_information(product) == Approx(0.0));
  CHECK(joint_entropy(product) == Approx(2.0));
  JointDistribution diagonal(2, 2, {0.5, 0.0, 0.0, 0.5});
  CHECK(joint_mutual_information(diagonal) == Approx(1.0));

  const std::vector<int> a{0, 0, 1, 1}, b{0, 1, 1, 1};
  const auto j = JointDistribution::from_samples(a, b, 2, 2);
  const double direct = empirical_entropy(a, 2) + empirical_entropy(b, 2) - joint_entropy(j);
  CHECK(joint_mutual_information(j) == Approx(direct).epsilon(1e-12));
  CHECK(empirical_mutual_information(a, b, 2, 2) == Approx(direct).epsilon(1e-12));
}

TEST_CASE("information inequalities on random tables") {
  Rng rng(7);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 2 + rng.below(6), m = 2 + rng.below(6);
    const auto px = testing::random_distribution(n, rng);
    const auto cond = testing::random_stochastic(n, m, rng, true);
    const auto j = JointDistribution::from_conditional(px, cond);
    const double mi = mutual_information(px, cond);
    CHECK(mi >= -1e-12);
    CHECK(mi <= std::min(entropy(px), entropy(j.marginal_cols())) + 1e-12);
    CHECK(mi == Approx(joint_mutual_information(j)).epsilon(1e-10));
    CHECK(entropy(px) <= std::log2(static_cast<double>(n)) + 1e-12);
    const auto q = testing::random_distribution(n, rng);
    CHECK(kl_divergence(px, q) >= -1e-12);
  }
}
