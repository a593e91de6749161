#pragma once

#include <cstddef>
#include <vector>

#include "odflow/matrix.hpp"

namespace odflow::num {

// Per-column affine map from the fitted [min, max] onto [lo, hi]. Fit on
// training rows only; a constant column maps to the midpoint of the range.
class MinMaxScaler {
public:
    MinMaxScaler() = default;
    MinMaxScaler(double lo, double hi) : lo_(lo), hi_(hi) {}

    void fit(const double* data, std::size_t rows, std::size_t cols);
    void fit(const Matrix& m) { fit(m.data(), m.rows(), m.cols()); }

    void transform(double* data, std::size_t rows, std::size_t cols) const;
    void transform(Matrix& m) const { transform(m.data(), m.rows(), m.cols()); }
    void inverse_transform(double* data, std::size_t rows, std::size_t cols) const;
    void inverse_transform(Matrix& m) const { inverse_transform(m.data(), m.rows(), m.cols()); }

    double transform_value(std::size_t column, double v) const;
    double inverse_value(std::size_t column, double v) const;

    bool fitted() const { return !col_min_.empty(); }
    std::size_t columns() const { return col_min_.size(); }
    double lo() const { return lo_; }
    double hi() const { return hi_; }
    double column_min(std::size_t c) const { return col_min_[c]; }
    double column_max(std::size_t c) const { return col_max_[c]; }

    // For serialization.
    void restore(double lo, double hi, std::vector<double> mins, std::vector<double> maxs);
    const std::vector<double>& mins() const { return col_min_; }
    const std::vector<double>& maxs() const { return col_max_; }

private:
    void require_fitted(std::size_t cols) const;

    double lo_ = -1.0;
    double hi_ = 1.0;
    std::vector<double> col_min_;
    std::vector<double> col_max_;
};

}  // namespace odflow::num
