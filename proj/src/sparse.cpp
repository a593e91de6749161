#include "odflow/sparse.hpp"

#include <stdexcept>

namespace odflow::num {

CsrMatrix CsrMatrix::from_dense(const Matrix& dense) {
    CsrMatrix csr;
    csr.rows = dense.rows();
    csr.cols = dense.cols();
    csr.row_ptr.reserve(csr.rows + 1);
    csr.row_ptr.push_back(0);
    for (std::size_t i = 0; i < csr.rows; ++i) {
        const double* row = dense.row(i);
        for (std::size_t j = 0; j < csr.cols; ++j) {
            if (row[j] != 0.0) {
                csr.col.push_back(static_cast<std::uint32_t>(j));
                csr.val.push_back(row[j]);
            }
        }
        csr.row_ptr.push_back(csr.col.size());
    }
    return csr;
}

CsrMatrix CsrMatrix::transposed() const {
    CsrMatrix t;
    t.rows = cols;
    t.cols = rows;
    std::vector<std::size_t> counts(cols + 1, 0);
    for (std::uint32_t c : col) ++counts[c + 1];
    for (std::size_t i = 1; i <= cols; ++i) counts[i] += counts[i - 1];
    t.row_ptr = counts;
    t.col.resize(val.size());
    t.val.resize(val.size());
    std::vector<std::size_t> cursor(counts.begin(), counts.end() - 1);
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
            std::size_t slot = cursor[col[k]]++;
            t.col[slot] = static_cast<std::uint32_t>(i);
            t.val[slot] = val[k];
        }
    }
    return t;
}

void CsrMatrix::multiply(const Matrix& x, Matrix& out) const {
    if (x.rows() != cols) throw std::invalid_argument("CsrMatrix::multiply: shape mismatch");
    const std::size_t n = x.cols();
    out.fill(0.0);
    for (std::size_t i = 0; i < rows; ++i) {
        double* orow = out.row(i);
        for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
            const double w = val[k];
            const double* xrow = x.row(col[k]);
            for (std::size_t j = 0; j < n; ++j) orow[j] += w * xrow[j];
        }
    }
}

}  // namespace odflow::num
