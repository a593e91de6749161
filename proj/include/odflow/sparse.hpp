#pragma once

#include <cstdint>
#include <vector>

#include "odflow/matrix.hpp"

namespace odflow::num {

// Compressed-sparse-row view of a dense operator. The normalized adjacency of
// the OD graph is ~90% zeros; the training loop applies it thousands of times
// per epoch, so the propagation product runs off this instead of the dense
// form. A regression test keeps the two routes identical.
struct CsrMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::size_t> row_ptr;   // rows + 1
    std::vector<std::uint32_t> col;
    std::vector<double> val;

    static CsrMatrix from_dense(const Matrix& dense);

    std::size_t nnz() const { return val.size(); }

    CsrMatrix transposed() const;

    // out = this * x, with out preshaped (rows × x.cols); overwrites out.
    void multiply(const Matrix& x, Matrix& out) const;
};

}  // namespace odflow::num
