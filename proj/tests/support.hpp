#pragma once

// Fixtures shared by the unit tests and the acceptance suite.

#include <cstdint>
#include <vector>

#include "din/ib_solver.hpp"
#include "din/network.hpp"
#include "din/rng.hpp"

namespace din::testing {

inline ConditionalMatrix random_stochastic(std::size_t rows, std::size_t cols, Rng& rng, bool sparse = false) {
  std::vector<double> w(rows * cols);
  for (auto& v : w) v = sparse && rng.uniform() < 0.3 ? 0.0 : rng.uniform() + 1e-3;
  for (std::size_t i = 0; i < rows; ++i) w[i * cols + rng.below(cols)] += 0.5;  // no all-zero rows
  return ConditionalMatrix::normalized(rows, cols, std::move(w));
}

inline DiscreteDistribution random_distribution(std::size_t n, Rng& rng) {
  std::vector<double> w(n);
  for (auto& v : w) v = rng.uniform() + 0.05;
  return DiscreteDistribution::normalized(std::move(w));
}

inline IBProblem random_problem(Rng& rng, double beta, std::size_t max_in = 16, std::size_t max_class = 4) {
  IBProblem p;
  const std::size_t n_in = 2 + rng.below(max_in - 1);
  const std::size_t n_class = 2 + rng.below(max_class - 1);
  p.px = random_distribution(n_in, rng);
  p.py_given_x = random_stochastic(n_in, n_class, rng, true);
  p.beta = beta;
  p.n_out = 1 + rng.below(n_in);
  return p;
}

/// Random quantized dataset whose label depends on a few features.
inline QuantizedDataset random_dataset(std::size_t rows, std::vector<std::size_t> cards, std::size_t n_class,
                                       std::uint64_t seed) {
  Rng rng(seed);
  QuantizedDataset q;
  q.cardinalities = cards;
  q.n_class = n_class;
  q.columns.assign(cards.size(), {});
  for (std::size_t r = 0; r < rows; ++r) {
    std::size_t score = 0;
    for (std::size_t f = 0; f < cards.size(); ++f) {
      const int v = static_cast<int>(rng.below(cards[f]));
      q.columns[f].push_back(v);
      if (f % 2 == 0) score += static_cast<std::size_t>(v);
    }
    const bool flip = rng.uniform() < 0.1;
    q.labels.push_back(static_cast<int>((score + (flip ? 1 : 0)) % n_class));
  }
  return q;
}

/// Balanced XOR of two binary features: every (x0, x1) pair equally often.
inline QuantizedDataset xor_dataset(std::size_t repeats) {
  QuantizedDataset q;
  q.cardinalities = {2, 2};
  q.n_class = 2;
  q.columns.assign(2, {});
  for (std::size_t r = 0; r < repeats; ++r)
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        q.columns[0].push_back(a);
        q.columns[1].push_back(b);
        q.labels.push_back(a ^ b);
      }
  return q;
}

}  // namespace din::testing
