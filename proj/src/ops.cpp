#include "odflow/ops.hpp"

#include <stdexcept>

namespace odflow::num {

Matrix relu(const Matrix& x) {
    Matrix out = x;
    double* d = out.data();
    for (std::size_t i = 0; i < out.size(); ++i)
        if (d[i] < 0.0) d[i] = 0.0;
    return out;
}

Matrix relu_backward(const Matrix& x, const Matrix& grad_out) {
    if (!x.same_shape(grad_out)) throw std::invalid_argument("relu_backward: shape mismatch");
    Matrix g = grad_out;
    const double* xv = x.data();
    double* gv = g.data();
    for (std::size_t i = 0; i < g.size(); ++i)
        if (xv[i] <= 0.0) gv[i] = 0.0;
    return g;
}

double mse(const Matrix& pred, const Matrix& target) {
    if (!pred.same_shape(target)) throw std::invalid_argument("mse: shape mismatch");
    if (pred.size() == 0) return 0.0;
    double acc = 0.0;
    const double* p = pred.data();
    const double* t = target.data();
    for (std::size_t i = 0; i < pred.size(); ++i) {
        double d = p[i] - t[i];
        acc += d * d;
    }
    return acc / static_cast<double>(pred.size());
}

Matrix mse_backward(const Matrix& pred, const Matrix& target) {
    if (!pred.same_shape(target)) throw std::invalid_argument("mse_backward: shape mismatch");
    Matrix g = pred;
    g.sub(target);
    g.scale(2.0 / static_cast<double>(pred.size()));
    return g;
}

void matmul_backward(const Matrix& a, const Matrix& b, const Matrix& grad_out, Matrix& grad_a, Matrix& grad_b) {
    if (grad_out.rows() != a.rows() || grad_out.cols() != b.cols())
        throw std::invalid_argument("matmul_backward: gradient shape mismatch");
    if (!grad_a.same_shape(a) || !grad_b.same_shape(b))
        throw std::invalid_argument("matmul_backward: accumulator shape mismatch");
    gemm_nt_acc(grad_out, b, grad_a);  // dA += G Bᵀ
    gemm_tn_acc(a, grad_out, grad_b);  // dB += Aᵀ G
}

void add_row_bias(Matrix& x, const Matrix& bias) {
    if (bias.rows() != 1 || bias.cols() != x.cols()) throw std::invalid_argument("add_row_bias: bias shape");
    const double* b = bias.data();
    for (std::size_t i = 0; i < x.rows(); ++i) {
        double* row = x.row(i);
        for (std::size_t j = 0; j < x.cols(); ++j) row[j] += b[j];
    }
}

}  // namespace odflow::num
