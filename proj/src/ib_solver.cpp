#include "din/ib_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "din/error.hpp"
#include "din/rng.hpp"

namespace din {

void IBProblem::validate() const {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw ValidationError("IB problem: beta must be > 0");
  if (n_out < 1) throw ValidationError("IB problem: n_out must be >= 1");
  if (px.size() == 0) throw ValidationError("IB problem: empty input alphabet");
  if (py_given_x.rows() != px.size())
    throw ValidationError("IB problem: p(y|x) has " + std::to_string(py_given_x.rows()) +
                          " rows but p(x) has " + std::to_string(px.size()) + " symbols");
}

std::pair<DiscreteDistribution, ConditionalMatrix> estimate_empirical(
    std::span<const int> x_symbols, std::span<const int> y_labels, std::size_t n_in,
    std::size_t n_class) {
  if (x_symbols.empty()) throw ValidationError("estimate_empirical: no samples");
  if (x_symbols.size() != y_labels.size())
    throw ValidationError("estimate_empirical: symbol and label vectors differ in length");
  if (n_in == 0 || n_class == 0) throw ValidationError("estimate_empirical: empty alphabet");

  std::vector<double> joint(n_in * n_class, 0.0);
  std::vector<double> x_count(n_in, 0.0);
  std::vector<double> y_count(n_class, 0.0);
  for (std::size_t n = 0; n < x_symbols.size(); ++n) {
    const int x = x_symbols[n];
    const int y = y_labels[n];
    if (x < 0 || static_cast<std::size_t>(x) >= n_in)
      throw ValidationError("estimate_empirical: symbol " + std::to_string(x) + " outside [0, " +
                            std::to_string(n_in) + ")");
    if (y < 0 || static_cast<std::size_t>(y) >= n_class)
      throw ValidationError("estimate_empirical: label " + std::to_string(y) + " outside [0, " +
                            std::to_string(n_class) + ")");
    joint[static_cast<std::size_t>(x) * n_class + static_cast<std::size_t>(y)] += 1.0;
    x_count[static_cast<std::size_t>(x)] += 1.0;
    y_count[static_cast<std::size_t>(y)] += 1.0;
  }
  for (std::size_t i = 0; i < n_in; ++i) {
    if (x_count[i] == 0.0) std::copy(y_count.begin(), y_count.end(), joint.begin() + i * n_class);
  }
  return {DiscreteDistribution::normalized(std::move(x_count)),
          ConditionalMatrix::normalized(n_in, n_class, std::move(joint))};
}

DiscreteDistribution output_marginal(const DiscreteDistribution& px, const ConditionalMatrix& channel) {
  if (px.size() != channel.rows())
    throw ValidationError("output_marginal: channel rows do not match p(x)");
  std::vector<double> p(channel.cols(), 0.0);
  for (std::size_t i = 0; i < channel.rows(); ++i) {
    if (px[i] <= 0.0) continue;
    for (std::size_t j = 0; j < channel.cols(); ++j) p[j] += px[i] * channel(i, j);
  }
  return DiscreteDistribution::normalized(std::move(p));
}

namespace {

void check_channel(const IBProblem& problem, const ConditionalMatrix& channel) {
  if (channel.rows() != problem.px.size() || channel.cols() != problem.n_out)
    throw ValidationError("channel is " + std::to_string(channel.rows()) + "x" +
                          std::to_string(channel.cols()) + ", expected " +
                          std::to_string(problem.px.size()) + "x" + std::to_string(problem.n_out));
}

// Unnormalized joint p(x_out = j, y = m), N_out x N_class.
std::vector<double> output_class_joint(const IBProblem& problem, const ConditionalMatrix& channel) {
  const std::size_t n_class = problem.py_given_x.cols();
  std::vector<double> joint(channel.cols() * n_class, 0.0);
  for (std::size_t i = 0; i < channel.rows(); ++i) {
    const double pi = problem.px[i];
    if (pi <= 0.0) continue;
    for (std::size_t j = 0; j < channel.cols(); ++j) {
      const double w = pi * channel(i, j);
      if (w <= 0.0) continue;
      for (std::size_t m = 0; m < n_class; ++m) joint[j * n_class + m] += w * problem.py_given_x(i, m);
    }
  }
  return joint;
}

std::vector<double> class_prior(const IBProblem& problem) {
  const std::size_t n_class = problem.py_given_x.cols();
  std::vector<double> prior(n_class, 0.0);
  for (std::size_t i = 0; i < problem.px.size(); ++i)
    for (std::size_t m = 0; m < n_class; ++m) prior[m] += problem.px[i] * problem.py_given_x(i, m);
  return prior;
}

}  // namespace

ConditionalMatrix relevance_given_output(const IBProblem& problem, const ConditionalMatrix& channel) {
  check_channel(problem, channel);
  const std::size_t n_class = problem.py_given_x.cols();
  std::vector<double> joint = output_class_joint(problem, channel);
  const std::vector<double> prior = class_prior(problem);
  for (std::size_t j = 0; j < channel.cols(); ++j) {
    double mass = 0.0;
    for (std::size_t m = 0; m < n_class; ++m) mass += joint[j * n_class + m];
    if (mass <= 0.0) std::copy(prior.begin(), prior.end(), joint.begin() + j * n_class);
  }
  return ConditionalMatrix::normalized(channel.cols(), n_class, std::move(joint));
}

ConditionalMatrix ib_step(const IBProblem& problem, const ConditionalMatrix& channel) {
  problem.validate();
  check_channel(problem, channel);
  const std::size_t n_in = channel.rows();
  const std::size_t n_out = channel.cols();

  const DiscreteDistribution p_out = output_marginal(problem.px, channel);
  const ConditionalMatrix py_out = relevance_given_output(problem, channel);
  constexpr double kInf = std::numeric_limits<double>::infinity();

  std::vector<double> next(n_in * n_out, 0.0);
  std::vector<double> dist(n_out);
  std::vector<double> log_w(n_out);
  for (std::size_t i = 0; i < n_in; ++i) {
    double* row = next.data() + i * n_out;
    if (problem.px[i] <= 0.0) {
      // Symbols never seen in training carry no weight; they follow p(x_out).
      for (std::size_t j = 0; j < n_out; ++j) row[j] = p_out[j];
      continue;
    }
    double best = -kInf;
    for (std::size_t j = 0; j < n_out; ++j) {
      dist[j] = kl_divergence_bits(problem.py_given_x.row(i), py_out.row(j));
      log_w[j] = p_out[j] > 0.0 && std::isfinite(dist[j])
                     ? std::log2(p_out[j]) - problem.beta * dist[j]
                     : -kInf;
      best = std::max(best, log_w[j]);
    }
    if (best == -kInf) {
      // Every weight underflowed: hard-assign to the closest output symbol.
      const auto closest = std::min_element(dist.begin(), dist.end()) - dist.begin();
      row[closest] = 1.0;
      continue;
    }
    // Z(i; beta) in the log domain, anchored at the largest weight.
    double z = 0.0;
    for (std::size_t j = 0; j < n_out; ++j) {
      row[j] = log_w[j] == -kInf ? 0.0 : std::exp2(log_w[j] - best);
      z += row[j];
    }
    for (std::size_t j = 0; j < n_out; ++j) row[j] /= z;
  }
  return ConditionalMatrix(n_in, n_out, std::move(next));
}

double relevant_information(const IBProblem& problem, const ConditionalMatrix& channel) {
  check_channel(problem, channel);
  const std::size_t n_class = problem.py_given_x.cols();
  std::vector<double> joint = output_class_joint(problem, channel);
  // Mass lost to rounding is restored before validation.
  double sum = 0.0;
  for (double v : joint) sum += v;
  for (double& v : joint) v /= sum;
  return joint_mutual_information(JointDistribution(channel.cols(), n_class, std::move(joint)));
}

double lagrangian(const IBProblem& problem, const ConditionalMatrix& channel) {
  check_channel(problem, channel);
  return mutual_information(problem.px, channel) - problem.beta * relevant_information(problem, channel);
}

ConditionalMatrix random_channel(std::size_t n_in, std::size_t n_out, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> w(n_in * n_out);
  // Shifted away from zero so every output symbol starts alive.
  for (double& v : w) v = 0.05 + rng.uniform();
  return ConditionalMatrix::normalized(n_in, n_out, std::move(w));
}

double max_abs_difference(const ConditionalMatrix& a, const ConditionalMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ValidationError("max_abs_difference: shape mismatch");
  double m = 0.0;
  for (std::size_t k = 0; k < a.data().size(); ++k) m = std::max(m, std::abs(a.data()[k] - b.data()[k]));
  return m;
}

IBSolution solve_ib(const IBProblem& problem, double tol, int max_iter, std::uint64_t seed) {
  problem.validate();
  if (!(tol > 0.0)) throw ValidationError("solve_ib: tol must be > 0");
  if (max_iter < 1) throw ValidationError("solve_ib: max_iter must be >= 1");

  IBDiagnostics diag;
  ConditionalMatrix channel = random_channel(problem.px.size(), problem.n_out, seed);
  for (int it = 0; it < max_iter; ++it) {
    ConditionalMatrix next = ib_step(problem, channel);
    const double change = max_abs_difference(next, channel);
    channel = std::move(next);
    diag.iterations = it + 1;
    diag.lagrangian_trace.push_back(lagrangian(problem, channel));
    if (change < tol) {
      diag.converged = true;
      break;
    }
  }
  diag.i_in_out = mutual_information(problem.px, channel);
  diag.i_y_out = relevant_information(problem, channel);

  DiscreteDistribution p_out = output_marginal(problem.px, channel);
  ConditionalMatrix py_out = relevance_given_output(problem, channel);
  return IBSolution{std::move(channel), std::move(p_out), std::move(py_out), std::move(diag)};
}

}  // namespace din
