#pragma once

// Dense kernels behind the end-to-end matrix composition. The default
// versions split rows across OpenMP threads; the reference versions are
// plain serial loops producing bit-identical results.

#include "din/infotheory.hpp"

namespace din::kernels {

/// Kronecker product a (x) b: row a_i * b.rows() + b_i, column a_j * b.cols() + b_j.
ConditionalMatrix kron(const ConditionalMatrix& a, const ConditionalMatrix& b, int threads = 0);

/// Matrix product of two row-stochastic matrices.
ConditionalMatrix matmul(const ConditionalMatrix& a, const ConditionalMatrix& b, int threads = 0);

namespace reference {
ConditionalMatrix kron(const ConditionalMatrix& a, const ConditionalMatrix& b);
ConditionalMatrix matmul(const ConditionalMatrix& a, const ConditionalMatrix& b);
}  // namespace reference

}  // namespace din::kernels
