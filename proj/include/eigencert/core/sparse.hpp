#pragma once

#include <algorithm>
#include <cstddef>
#include <tuple>
#include <vector>

#include "eigencert/core/error.hpp"
#include "eigencert/core/matrix.hpp"

namespace eigencert {

// Compressed-row sparse matrix over double. Built from triplets; duplicate
// entries are summed and exact zeros dropped.
class CsrMatrix {
  public:
    CsrMatrix() = default;

    static CsrMatrix from_triplets(std::size_t rows, std::size_t cols,
                                   std::vector<std::tuple<std::size_t, std::size_t, double>> trip,
                                   bool symmetric = false) {
        std::sort(trip.begin(), trip.end(), [](const auto& a, const auto& b) {
            if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) < std::get<0>(b);
            return std::get<1>(a) < std::get<1>(b);
        });
        CsrMatrix m;
        m.rows_ = rows;
        m.cols_ = cols;
        m.symmetric_ = symmetric;
        m.row_ptr_.assign(rows + 1, 0);
        std::size_t i = 0;
        while (i < trip.size()) {
            std::size_t r = std::get<0>(trip[i]);
            std::size_t c = std::get<1>(trip[i]);
            double v = std::get<2>(trip[i]);
            std::size_t j = i + 1;
            while (j < trip.size() && std::get<0>(trip[j]) == r && std::get<1>(trip[j]) == c) {
                v += std::get<2>(trip[j]);
                ++j;
            }
            if (v != 0.0) {
                m.col_idx_.push_back(c);
                m.values_.push_back(v);
                m.row_ptr_[r + 1] += 1;
            }
            i = j;
        }
        for (std::size_t r = 0; r < rows; ++r) m.row_ptr_[r + 1] += m.row_ptr_[r];
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t nnz() const { return values_.size(); }
    bool symmetric() const { return symmetric_; }

    void apply(const double* x, double* y) const {
        for (std::size_t r = 0; r < rows_; ++r) {
            double s = 0.0;
            for (std::size_t p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p)
                s += values_[p] * x[col_idx_[p]];
            y[r] = s;
        }
    }

    std::vector<double> apply(const std::vector<double>& x) const {
        if (x.size() != cols_) throw DimensionMismatch("sparse apply");
        std::vector<double> y(rows_);
        apply(x.data(), y.data());
        return y;
    }

    double coeff(std::size_t r, std::size_t c) const {
        for (std::size_t p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p)
            if (col_idx_[p] == c) return values_[p];
        return 0.0;
    }

    std::vector<double> diagonal() const {
        std::vector<double> d(std::min(rows_, cols_), 0.0);
        for (std::size_t r = 0; r < d.size(); ++r) d[r] = coeff(r, r);
        return d;
    }

    Matrix<double> to_dense() const {
        Matrix<double> m(rows_, cols_);
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p)
                m(r, col_idx_[p]) = values_[p];
        return m;
    }

    double row_sum(std::size_t r) const {
        double s = 0.0;
        for (std::size_t p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) s += values_[p];
        return s;
    }

  private:
    std::size_t rows_ = 0, cols_ = 0;
    bool symmetric_ = false;
    std::vector<std::size_t> row_ptr_;
    std::vector<std::size_t> col_idx_;
    std::vector<double> values_;
};

} // namespace eigencert
