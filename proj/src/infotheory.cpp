#include "din/infotheory.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "din/error.hpp"

namespace din {

namespace {

void check_probs(std::span<const double> p, const char* what) {
  double sum = 0.0;
  for (double v : p) {
    if (!(v >= 0.0) || !std::isfinite(v))
      throw ValidationError(std::string(what) + ": negative or non-finite probability");
    sum += v;
  }
  if (std::abs(sum - 1.0) > kStochasticTol)
    throw ValidationError(std::string(what) + ": probabilities sum to " + std::to_string(sum));
}

double plogp_sum(std::span<const double> p) noexcept {
  double h = 0.0;
  for (double v : p)
    if (v > 0.0) h -= v * std::log2(v);
  return h;
}

}  // namespace

DiscreteDistribution::DiscreteDistribution(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) throw ValidationError("distribution: empty alphabet");
  check_probs(probs_, "distribution");
}

DiscreteDistribution DiscreteDistribution::normalized(std::vector<double> weights) {
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w))
      throw ValidationError("distribution: negative or non-finite weight");
    sum += w;
  }
  if (!(sum > 0.0)) throw ValidationError("distribution: weights sum to zero");
  for (double& w : weights) w /= sum;
  return DiscreteDistribution(std::move(weights));
}

DiscreteDistribution DiscreteDistribution::uniform(std::size_t n) {
  if (n == 0) throw ValidationError("distribution: empty alphabet");
  return DiscreteDistribution(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

ConditionalMatrix::ConditionalMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (rows_ == 0 || cols_ == 0) throw ValidationError("conditional matrix: empty dimension");
  if (data_.size() != rows_ * cols_)
    throw ValidationError("conditional matrix: data size does not match rows*cols");
  for (std::size_t i = 0; i < rows_; ++i) check_probs(row(i), "conditional matrix row");
}

ConditionalMatrix ConditionalMatrix::normalized(std::size_t rows, std::size_t cols,
                                                std::vector<double> weights) {
  if (weights.size() != rows * cols)
    throw ValidationError("conditional matrix: data size does not match rows*cols");
  for (std::size_t i = 0; i < rows; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < cols; ++j) {
      double w = weights[i * cols + j];
      if (!(w >= 0.0) || !std::isfinite(w))
        throw ValidationError("conditional matrix: negative or non-finite weight");
      sum += w;
    }
    if (!(sum > 0.0)) throw ValidationError("conditional matrix: row " + std::to_string(i) + " is all zero");
    for (std::size_t j = 0; j < cols; ++j) weights[i * cols + j] /= sum;
  }
  return ConditionalMatrix(rows, cols, std::move(weights));
}

ConditionalMatrix ConditionalMatrix::identity(std::size_t n) {
  std::vector<double> d(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) d[i * n + i] = 1.0;
  return ConditionalMatrix(n, n, std::move(d));
}

JointDistribution::JointDistribution(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (rows_ == 0 || cols_ == 0) throw ValidationError("joint distribution: empty dimension");
  if (data_.size() != rows_ * cols_)
    throw ValidationError("joint distribution: data size does not match rows*cols");
  check_probs(data_, "joint distribution");
}

JointDistribution JointDistribution::from_samples(std::span<const int> a, std::span<const int> b,
                                                  std::size_t na, std::size_t nb) {
  if (a.size() != b.size() || a.empty())
    throw ValidationError("joint distribution: sample vectors empty or of different length");
  std::vector<double> counts(na * nb, 0.0);
  for (std::size_t n = 0; n < a.size(); ++n) {
    if (a[n] < 0 || static_cast<std::size_t>(a[n]) >= na || b[n] < 0 ||
        static_cast<std::size_t>(b[n]) >= nb)
      throw ValidationError("joint distribution: sample symbol out of range");
    counts[static_cast<std::size_t>(a[n]) * nb + static_cast<std::size_t>(b[n])] += 1.0;
  }
  const double inv = 1.0 / static_cast<double>(a.size());
  for (double& c : counts) c *= inv;
  return JointDistribution(na, nb, std::move(counts));
}

JointDistribution JointDistribution::from_conditional(const DiscreteDistribution& px,
                                                      const ConditionalMatrix& cond) {
  if (px.size() != cond.rows())
    throw ValidationError("joint distribution: px length does not match conditional rows");
  std::vector<double> d(cond.rows() * cond.cols());
  for (std::size_t i = 0; i < cond.rows(); ++i)
    for (std::size_t j = 0; j < cond.cols(); ++j) d[i * cond.cols() + j] = px[i] * cond(i, j);
  return JointDistribution(cond.rows(), cond.cols(), std::move(d));
}

DiscreteDistribution JointDistribution::marginal_rows() const {
  std::vector<double> m(rows_, 0.0);
  for (std::size_t a = 0; a < rows_; ++a)
    for (std::size_t b = 0; b < cols_; ++b) m[a] += (*this)(a, b);
  return DiscreteDistribution::normalized(std::move(m));
}

DiscreteDistribution JointDistribution::marginal_cols() const {
  std::vector<double> m(cols_, 0.0);
  for (std::size_t a = 0; a < rows_; ++a)
    for (std::size_t b = 0; b < cols_; ++b) m[b] += (*this)(a, b);
  return DiscreteDistribution::normalized(std::move(m));
}

double entropy(const DiscreteDistribution& d) { return plogp_sum(d.probs()); }

double kl_divergence_bits(std::span<const double> p, std::span<const double> q) noexcept {
  double kl = 0.0;
  for (std::size_t m = 0; m < p.size(); ++m) {
    if (p[m] <= 0.0) continue;
    if (q[m] <= 0.0) return std::numeric_limits<double>::infinity();
    kl += p[m] * std::log2(p[m] / q[m]);
  }
  // Rounding can leave a tiny negative value for p == q.
  return kl > 0.0 ? kl : 0.0;
}

double kl_divergence(const DiscreteDistribution& p, const DiscreteDistribution& q) {
  if (p.size() != q.size()) throw ValidationError("kl_divergence: alphabet sizes differ");
  return kl_divergence_bits(p.probs(), q.probs());
}

double mutual_information(const DiscreteDistribution& px, const ConditionalMatrix& cond) {
  if (px.size() != cond.rows())
    throw ValidationError("mutual_information: px length does not match conditional rows");
  std::vector<double> pt(cond.cols(), 0.0);
  for (std::size_t i = 0; i < cond.rows(); ++i)
    for (std::size_t j = 0; j < cond.cols(); ++j) pt[j] += px[i] * cond(i, j);
  double mi = 0.0;
  for (std::size_t i = 0; i < cond.rows(); ++i) {
    if (px[i] <= 0.0) continue;
    for (std::size_t j = 0; j < cond.cols(); ++j) {
      double c = cond(i, j);
      if (c > 0.0) mi += px[i] * c * std::log2(c / pt[j]);
    }
  }
  return mi > 0.0 ? mi : 0.0;
}

double joint_entropy(const JointDistribution& j) { return plogp_sum(j.data()); }

double joint_mutual_information(const JointDistribution& j) {
  double mi = entropy(j.marginal_rows()) + entropy(j.marginal_cols()) - joint_entropy(j);
  return mi > 0.0 ? mi : 0.0;
}

double empirical_entropy(std::span<const int> symbols, std::size_t n) {
  if (symbols.empty()) throw ValidationError("empirical_entropy: no samples");
  std::vector<double> counts(n, 0.0);
  for (int s : symbols) {
    if (s < 0 || static_cast<std::size_t>(s) >= n)
      throw ValidationError("empirical_entropy: symbol out of range");
    counts[static_cast<std::size_t>(s)] += 1.0;
  }
  return entropy(DiscreteDistribution::normalized(std::move(counts)));
}

double empirical_mutual_information(std::span<const int> a, std::span<const int> b,
                                    std::size_t na, std::size_t nb) {
  return joint_mutual_information(JointDistribution::from_samples(a, b, na, nb));
}

}  // namespace din
