#pragma once

#include <span>
#include <vector>

#include "autodiff/tensor.hpp"
#include "rng.hpp"

namespace gradphon::ad {

// Differentiable primitives. Rank-1 tensors are vectors, rank-2 are row-major
// matrices, rank-0 are scalars. Every op records onto the tape of its first
// operand and throws Error(Dimension) on shape mismatch.

/// Matrix product. A rank-1 left operand acts as a row vector and a rank-1
/// right operand as a column vector; the corresponding output axis is dropped.
Tensor matmul(const Tensor& a, const Tensor& b);

// Elementwise binary ops accept identical shapes, or a matrix with a vector
// that is broadcast over its rows (either operand order).
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);

Tensor scale(const Tensor& x, Real factor);
Tensor tanh(const Tensor& x);
Tensor sigmoid(const Tensor& x);
Tensor exp(const Tensor& x);

/// Concatenation along `axis` (0 for vectors; 0 or 1 for matrices).
Tensor concat(const Tensor& a, const Tensor& b, std::size_t axis = 0);
/// Contiguous sub-vector [begin, begin + length) of a vector.
Tensor slice(const Tensor& x, std::size_t begin, std::size_t length);

/// Stable log-softmax of a vector. Throws Error(Numeric) on non-finite input.
Tensor log_softmax(const Tensor& x);
Tensor softmax(const Tensor& x);
/// Row-wise log-sum-exp of a matrix, giving one value per row.
Tensor logsumexp_rows(const Tensor& x);

Tensor embedding_lookup(const Tensor& table, std::size_t index);
Tensor gather_rows(const Tensor& table, std::span<const std::size_t> indices);
Tensor stack_rows(std::span<const Tensor> rows);
Tensor transpose(const Tensor& x);
Tensor mean_rows(const Tensor& x);

Tensor sum(const Tensor& x);
Tensor add_n(std::span<const Tensor> terms);
/// Scalar element `index` of a tensor (flat row-major index).
Tensor pick(const Tensor& x, std::size_t index);

/// Inverted dropout: in training mode each element is zeroed with probability
/// `rate` and survivors are scaled by 1 / (1 - rate). Identity otherwise.
Tensor dropout(const Tensor& x, Real rate, bool training, Rng& rng);

}  // namespace gradphon::ad
