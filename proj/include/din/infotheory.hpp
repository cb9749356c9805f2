#pragma once

// Discrete information-theory primitives. Every quantity is in bits and
// uses the conventions 0*log2(0) = 0 and 0*log2(0/0) = 0.

#include <cstddef>
#include <span>
#include <vector>

namespace din {

inline constexpr double kStochasticTol = 1e-9;

/// Probability vector over a finite alphabet.
class DiscreteDistribution {
 public:
  DiscreteDistribution() = default;
  /// Validates: entries >= 0 and sum within kStochasticTol of 1.
  explicit DiscreteDistribution(std::vector<double> probs);
  /// Rescales non-negative weights so they sum to 1.
  static DiscreteDistribution normalized(std::vector<double> weights);
  static DiscreteDistribution uniform(std::size_t n);

  std::size_t size() const noexcept { return probs_.size(); }
  double operator[](std::size_t i) const noexcept { return probs_[i]; }
  std::span<const double> probs() const noexcept { return probs_; }

  bool operator==(const DiscreteDistribution&) const = default;

 private:
  std::vector<double> probs_;
};

/// Row-stochastic matrix p(j | i), stored row-major.
class ConditionalMatrix {
 public:
  ConditionalMatrix() = default;
  /// Validates shape, non-negativity and row sums.
  ConditionalMatrix(std::size_t rows, std::size_t cols, std::vector<double> data);
  /// Rescales every row to sum to 1. A row of zeros is rejected.
  static ConditionalMatrix normalized(std::size_t rows, std::size_t cols,
                                      std::vector<double> weights);
  static ConditionalMatrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }
  std::span<const double> row(std::size_t i) const noexcept {
    return {data_.data() + i * cols_, cols_};
  }
  std::span<const double> data() const noexcept { return data_; }

  bool operator==(const ConditionalMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Joint probability table p(a, b), row index a, column index b.
class JointDistribution {
 public:
  JointDistribution() = default;
  JointDistribution(std::size_t rows, std::size_t cols, std::vector<double> data);
  /// Plug-in estimate from paired samples a[n] < na, b[n] < nb.
  static JointDistribution from_samples(std::span<const int> a, std::span<const int> b,
                                        std::size_t na, std::size_t nb);
  /// p(i, j) = px(i) * cond(i, j).
  static JointDistribution from_conditional(const DiscreteDistribution& px,
                                            const ConditionalMatrix& cond);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double operator()(std::size_t a, std::size_t b) const noexcept { return data_[a * cols_ + b]; }
  std::span<const double> data() const noexcept { return data_; }

  DiscreteDistribution marginal_rows() const;
  DiscreteDistribution marginal_cols() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

double entropy(const DiscreteDistribution& d);

/// Sum p log2(p/q). Returns +infinity when p has mass where q has none.
double kl_divergence(const DiscreteDistribution& p, const DiscreteDistribution& q);

/// Span form used by the solver's inner loop; no validation.
double kl_divergence_bits(std::span<const double> p, std::span<const double> q) noexcept;

/// I(X;T) for X ~ px pushed through the channel cond.
double mutual_information(const DiscreteDistribution& px, const ConditionalMatrix& cond);

/// I(A;B) = H(A) + H(B) - H(A,B).
double joint_mutual_information(const JointDistribution& j);

double joint_entropy(const JointDistribution& j);

/// Plug-in estimates over sample vectors.
double empirical_entropy(std::span<const int> symbols, std::size_t n);
double empirical_mutual_information(std::span<const int> a, std::span<const int> b,
                                    std::size_t na, std::size_t nb);

}  // namespace din
