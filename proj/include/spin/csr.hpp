#pragma once

#include "spin/dense.hpp"

#include <cstdint>
#include <vector>

namespace spin {

// Compressed sparse row matrix. Column indices are strictly increasing
// within each row.
struct CsrMatrix {
    std::size_t n_rows = 0;
    std::size_t n_cols = 0;
    std::vector<std::size_t> row_ptr; // length n_rows + 1
    std::vector<std::uint32_t> col_idx;
    std::vector<double> values;

    std::size_t nnz() const { return col_idx.size(); }
    bool valid() const;
    bool symmetric(double tol = 0.0) const;
    double at(std::size_t i, std::size_t j) const; // 0 when absent
};

// Build from (row, col, value) triplets; duplicates are summed.
CsrMatrix csr_from_triplets(std::size_t n_rows, std::size_t n_cols,
                            std::vector<std::tuple<std::uint32_t, std::uint32_t, double>> t);

// out = m * x, row-major dense.
void spmm_into(const CsrMatrix& m, const DenseMatrix& x, DenseMatrix& out);
DenseMatrix spmm(const CsrMatrix& m, const DenseMatrix& x);

} // namespace spin
