#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <vector>

namespace odflow::num {

// Dense row-major matrix of doubles. The whole training stack runs on these;
// shapes here are small (hundreds of rows, tens of columns) so everything is
// kept contiguous and simple.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

    static Matrix zeros(std::size_t rows, std::size_t cols) { return Matrix(rows, cols); }
    static Matrix full(std::size_t rows, std::size_t cols, double value);
    static Matrix identity(std::size_t n);
    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
    // Uniform on ±sqrt(6 / (fan_in + fan_out)).
    static Matrix glorot_uniform(std::size_t rows, std::size_t cols, std::mt19937_64& rng);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    double* row(std::size_t i) { return data_.data() + i * cols_; }
    const double* row(std::size_t i) const { return data_.data() + i * cols_; }
    std::span<const double> values() const { return data_; }

    void fill(double v);
    void resize(std::size_t rows, std::size_t cols);  // zero-fills

    Matrix transposed() const;
    void add(const Matrix& other);        // elementwise +=
    void sub(const Matrix& other);        // elementwise -=
    void scale(double factor);
    void hadamard(const Matrix& other);   // elementwise *=

    bool all_finite() const;
    bool same_shape(const Matrix& other) const { return rows_ == other.rows_ && cols_ == other.cols_; }

    double max_abs() const;
    double sum() const;

    bool operator==(const Matrix& other) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// out = a * b; shape-checked, throws std::invalid_argument on mismatch.
Matrix matmul(const Matrix& a, const Matrix& b);

// Unchecked accumulation kernels used by the trainers. All require `out`
// preshaped; they add into it.
void gemm_acc(const Matrix& a, const Matrix& b, Matrix& out);      // out += a b
void gemm_tn_acc(const Matrix& a, const Matrix& b, Matrix& out);   // out += aᵀ b
void gemm_nt_acc(const Matrix& a, const Matrix& b, Matrix& out);   // out += a bᵀ

}  // namespace odflow::num
