#include "din/kernels.hpp"

#include <vector>

#include "din/error.hpp"
#include "din/parallel.hpp"

namespace din::kernels {

namespace {

inline void kron_row(const ConditionalMatrix& a, const ConditionalMatrix& b, std::size_t r, double* out) {
  const std::size_t ai = r / b.rows();
  const std::size_t bi = r % b.rows();
  for (std::size_t aj = 0; aj < a.cols(); ++aj) {
    const double av = a(ai, aj);
    for (std::size_t bj = 0; bj < b.cols(); ++bj) out[aj * b.cols() + bj] = av * b(bi, bj);
  }
}

inline void matmul_row(const ConditionalMatrix& a, const ConditionalMatrix& b, std::size_t r, double* out) {
  for (std::size_t j = 0; j < b.cols(); ++j) out[j] = 0.0;
  for (std::size_t k = 0; k < a.cols(); ++k) {
    const double av = a(r, k);
    if (av == 0.0) continue;
    const auto brow = b.row(k);
    for (std::size_t j = 0; j < b.cols(); ++j) out[j] += av * brow[j];
  }
}

void check_matmul(const ConditionalMatrix& a, const ConditionalMatrix& b) {
  if (a.cols() != b.rows()) throw ValidationError("matmul: inner dimensions differ");
}

}  // namespace

ConditionalMatrix kron(const ConditionalMatrix& a, const ConditionalMatrix& b, int threads) {
  const std::size_t rows = a.rows() * b.rows();
  const std::size_t cols = a.cols() * b.cols();
  std::vector<double> out(rows * cols);
  if (threads <= 0) threads = max_threads();
#pragma omp parallel for schedule(static) num_threads(threads)
  for (std::ptrdiff_t r = 0; r < static_cast<std::ptrdiff_t>(rows); ++r)
    kron_row(a, b, static_cast<std::size_t>(r), out.data() + static_cast<std::size_t>(r) * cols);
  return ConditionalMatrix(rows, cols, std::move(out));
}

ConditionalMatrix matmul(const ConditionalMatrix& a, const ConditionalMatrix& b, int threads) {
  check_matmul(a, b);
  std::vector<double> out(a.rows() * b.cols());
  if (threads <= 0) threads = max_threads();
#pragma omp parallel for schedule(static) num_threads(threads)
  for (std::ptrdiff_t r = 0; r < static_cast<std::ptrdiff_t>(a.rows()); ++r)
    matmul_row(a, b, static_cast<std::size_t>(r), out.data() + static_cast<std::size_t>(r) * b.cols());
  return ConditionalMatrix(a.rows(), b.cols(), std::move(out));
}

namespace reference {

ConditionalMatrix kron(const ConditionalMatrix& a, const ConditionalMatrix& b) {
  const std::size_t rows = a.rows() * b.rows();
  const std::size_t cols = a.cols() * b.cols();
  std::vector<double> out(rows * cols);
  for (std::size_t r = 0; r < rows; ++r) kron_row(a, b, r, out.data() + r * cols);
  return ConditionalMatrix(rows, cols, std::move(out));
}

ConditionalMatrix matmul(const ConditionalMatrix& a, const ConditionalMatrix& b) {
  check_matmul(a, b);
  std::vector<double> out(a.rows() * b.cols());
  for (std::size_t r = 0; r < a.rows(); ++r) matmul_row(a, b, r, out.data() + r * b.cols());
  return ConditionalMatrix(a.rows(), b.cols(), std::move(out));
}

}  // namespace reference

}  // namespace din::kernels
