#pragma once

#include "odflow/matrix.hpp"

namespace odflow::num {

// Elementwise max(0, x). The subgradient at exactly 0 is fixed to 0.
Matrix relu(const Matrix& x);
// Given upstream gradient g = dL/d relu(x), returns dL/dx.
Matrix relu_backward(const Matrix& x, const Matrix& grad_out);

// Mean of squared elementwise differences.
double mse(const Matrix& pred, const Matrix& target);
// dL/dpred = 2 (pred − target) / N.
Matrix mse_backward(const Matrix& pred, const Matrix& target);

// Gradients of C = A B under upstream gradient G: dA += G Bᵀ, dB += Aᵀ G.
void matmul_backward(const Matrix& a, const Matrix& b, const Matrix& grad_out, Matrix& grad_a, Matrix& grad_b);

// row-broadcast bias: out = x + 1·biasᵀ (bias is 1×cols)
void add_row_bias(Matrix& x, const Matrix& bias);

}  // namespace odflow::num
