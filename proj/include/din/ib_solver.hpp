#pragma once

// Information bottleneck for a single information node, solved with the
// Blahut-Arimoto style self-consistent iteration.
//
// Base convention: distortions d(i,j) = KL(p(y|x=i) || p(y|t=j)) are in bits
// and the channel update uses 2^(-beta * d(i,j)). Using one base for both the
// logarithm and the exponential keeps beta on the same scale as the bits in
// the Lagrangian I(X;T) - beta * I(Y;T).

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "din/infotheory.hpp"

namespace din {

struct IBProblem {
  DiscreteDistribution px;         ///< p(x_in), length N_in
  ConditionalMatrix py_given_x;    ///< N_in x N_class
  double beta = 5.0;
  std::size_t n_out = 2;

  /// Throws ValidationError unless beta > 0, n_out >= 1 and shapes agree.
  void validate() const;
};

struct IBDiagnostics {
  int iterations = 0;
  std::vector<double> lagrangian_trace;  ///< one entry per completed update
  double i_in_out = 0.0;                 ///< I(X_in; X_out), bits
  double i_y_out = 0.0;                  ///< I(Y; X_out), bits
  bool converged = false;
};

struct IBSolution {
  ConditionalMatrix channel;       ///< p(x_out | x_in), N_in x N_out
  DiscreteDistribution p_out;      ///< p(x_out)
  ConditionalMatrix py_given_out;  ///< p(y | x_out), N_out x N_class
  IBDiagnostics diagnostics;
};

struct IBOptions {
  double tol = 1e-8;
  int max_iter = 500;
};

/// Frequency estimates of p(x) and p(y|x) from paired samples. Symbols that
/// never occur get the global class prior as their p(y|x) row.
std::pair<DiscreteDistribution, ConditionalMatrix> estimate_empirical(
    std::span<const int> x_symbols, std::span<const int> y_labels, std::size_t n_in,
    std::size_t n_class);

/// p(x_out) = sum_i p(i) p(j|i).
DiscreteDistribution output_marginal(const DiscreteDistribution& px, const ConditionalMatrix& channel);

/// p(y | x_out) through Bayes on the channel. Output symbols carrying no
/// mass get the class prior so the result stays row-stochastic.
ConditionalMatrix relevance_given_output(const IBProblem& problem, const ConditionalMatrix& channel);

/// One self-consistent update of the channel.
ConditionalMatrix ib_step(const IBProblem& problem, const ConditionalMatrix& channel);

/// I(X_in;X_out) - beta * I(Y;X_out) for the given channel.
double lagrangian(const IBProblem& problem, const ConditionalMatrix& channel);

/// I(Y; X_out) under the Markov chain Y - X_in - X_out.
double relevant_information(const IBProblem& problem, const ConditionalMatrix& channel);

/// Seeded random row-stochastic starting point.
ConditionalMatrix random_channel(std::size_t n_in, std::size_t n_out, std::uint64_t seed);

/// Iterates ib_step from a seeded random start until the largest elementwise
/// channel change drops below tol or max_iter updates have run.
IBSolution solve_ib(const IBProblem& problem, double tol, int max_iter, std::uint64_t seed);
inline IBSolution solve_ib(const IBProblem& problem, const IBOptions& opt, std::uint64_t seed) {
  return solve_ib(problem, opt.tol, opt.max_iter, seed);
}

double max_abs_difference(const ConditionalMatrix& a, const ConditionalMatrix& b);

}  // namespace din
