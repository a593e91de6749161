#include "odflow/scaler.hpp"

#include <stdexcept>

namespace odflow::num {

void MinMaxScaler::fit(const double* data, std::size_t rows, std::size_t cols) {
    if (rows == 0 || cols == 0) throw std::invalid_argument("MinMaxScaler::fit: empty input");
    col_min_.assign(cols, data[0]);
    col_max_.assign(cols, data[0]);
    for (std::size_t c = 0; c < cols; ++c) {
        col_min_[c] = data[c];
        col_max_[c] = data[c];
    }
    for (std::size_t r = 1; r < rows; ++r) {
        const double* row = data + r * cols;
        for (std::size_t c = 0; c < cols; ++c) {
            if (row[c] < col_min_[c]) col_min_[c] = row[c];
            if (row[c] > col_max_[c]) col_max_[c] = row[c];
        }
    }
}

void MinMaxScaler::require_fitted(std::size_t cols) const {
    if (!fitted()) throw std::logic_error("MinMaxScaler: transform before fit");
    if (cols != col_min_.size()) throw std::invalid_argument("MinMaxScaler: column count mismatch");
}

double MinMaxScaler::transform_value(std::size_t c, double v) const {
    const double span = col_max_[c] - col_min_[c];
    if (span == 0.0) return 0.5 * (lo_ + hi_);
    return lo_ + (v - col_min_[c]) * (hi_ - lo_) / span;
}

double MinMaxScaler::inverse_value(std::size_t c, double v) const {
    const double span = col_max_[c] - col_min_[c];
    if (span == 0.0) return col_min_[c];
    return col_min_[c] + (v - lo_) * span / (hi_ - lo_);
}

void MinMaxScaler::transform(double* data, std::size_t rows, std::size_t cols) const {
    require_fitted(cols);
    for (std::size_t r = 0; r < rows; ++r) {
        double* row = data + r * cols;
        for (std::size_t c = 0; c < cols; ++c) row[c] = transform_value(c, row[c]);
    }
}

void MinMaxScaler::inverse_transform(double* data, std::size_t rows, std::size_t cols) const {
    require_fitted(cols);
    for (std::size_t r = 0; r < rows; ++r) {
        double* row = data + r * cols;
        for (std::size_t c = 0; c < cols; ++c) row[c] = inverse_value(c, row[c]);
    }
}

void MinMaxScaler::restore(double lo, double hi, std::vector<double> mins, std::vector<double> maxs) {
    if (mins.size() != maxs.size()) throw std::invalid_argument("MinMaxScaler::restore: size mismatch");
    lo_ = lo;
    hi_ = hi;
    col_min_ = std::move(mins);
    col_max_ = std::move(maxs);
}

}  // namespace odflow::num
