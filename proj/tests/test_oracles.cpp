#include <doctest.h>

// Values below were computed independently by scripts/oracles.py (numpy).

#include "din/ib_solver.hpp"
#include "din/infotheory.hpp"

using namespace din;
using doctest::Approx;

namespace {

IBProblem fixed_problem() {
  IBProblem p;
  p.px = DiscreteDistribution({0.1, 0.2, 0.3, 0.4});
  p.py_given_x = ConditionalMatrix(4, 2, {0.9, 0.1, 0.7, 0.3, 0.2, 0.8, 0.4, 0.6});
  p.beta = 20.0;
  p.n_out = 3;
  return p;
}

ConditionalMatrix fixed_start() {
  return ConditionalMatrix(4, 3, {0.6, 0.3, 0.1, 0.2, 0.5, 0.3, 0.1, 0.1, 0.8, 0.3, 0.4, 0.3});
}

}  // namespace

TEST_CASE("oracle: scalar quantities") {
  CHECK(entropy(DiscreteDistribution({0.25, 0.75})) == Approx(0.8112781244591328).epsilon(1e-14));
  CHECK(mutual_information(DiscreteDistribution::uniform(2), ConditionalMatrix(2, 2, {0.89, 0.11, 0.11, 0.89})) ==
        Approx(0.500084041835472).epsilon(1e-12));
  const std::vector<int> a{0, 0, 1, 1}, b{0, 1, 1, 1};
  CHECK(empirical_mutual_information(a, b, 2, 2) == Approx(0.31127812445913294).epsilon(1e-12));
  const auto p = fixed_problem();
  CHECK(mutual_information(p.px, p.py_given_x) == Approx(0.16465804853466537).epsilon(1e-12));
}

TEST_CASE("oracle: one self-consistent update") {
  const std::vector<double> expected{0.5997699706083993,   0.39972801164545585, 0.0005020177461448645,
                                     0.5064916149669658,   0.48171280658913457, 0.011795578443899701,
                                     0.01016123164495754,  0.023509990387690916, 0.9663287779673515,
                                     0.1655827456060362,   0.2684634161711625,  0.5659538382228013};
  const auto next = ib_step(fixed_problem(), fixed_start());
  REQUIRE(next.data().size() == expected.size());
  for (std::size_t k = 0; k < expected.size(); ++k) CHECK(next.data()[k] == Approx(expected[k]).epsilon(1e-12));
}

TEST_CASE("oracle: 300 updates from a fixed start") {
  const auto p = fixed_problem();
  auto ch = fixed_start();
  for (int k = 0; k < 300; ++k) ch = ib_step(p, ch);
  CHECK(lagrangian(p, ch) == Approx(-1.7011193568067937).epsilon(1e-9));
  CHECK(relevant_information(p, ch) == Approx(0.12829385083207834).epsilon(1e-9));
}
