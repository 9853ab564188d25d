#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "eigencert/core/error.hpp"
#include "eigencert/core/matrix.hpp"

namespace eigencert::linalg {

// Dense LU with partial pivoting; used for small auxiliary systems
// (element dof matrices, test oracles).
template <class T>
class Lu {
  public:
    explicit Lu(Matrix<T> a) : lu_(std::move(a)), perm_(lu_.rows()) {
        using st = scalar_traits<T>;
        const std::size_t n = lu_.rows();
        if (lu_.cols() != n) throw DimensionMismatch("lu: square matrix expected");
        std::iota(perm_.begin(), perm_.end(), std::size_t{0});
        for (std::size_t k = 0; k < n; ++k) {
            std::size_t piv = k;
            real_of<T> best = st::abs(lu_(k, k));
            for (std::size_t i = k + 1; i < n; ++i) {
                const real_of<T> v = st::abs(lu_(i, k));
                if (v > best) {
                    best = v;
                    piv = i;
                }
            }
            if (best == 0) throw SingularSystem("lu: zero pivot");
            if (piv != k) {
                for (std::size_t j = 0; j < n; ++j) std::swap(lu_(k, j), lu_(piv, j));
                std::swap(perm_[k], perm_[piv]);
                sign_ = -sign_;
            }
            const T pivot = lu_(k, k);
            for (std::size_t i = k + 1; i < n; ++i) {
                const T m = lu_(i, k) / pivot;
                lu_(i, k) = m;
                if (m == T{}) continue;
                const T* rk = lu_.row(k);
                T* ri = lu_.row(i);
                for (std::size_t j = k + 1; j < n; ++j) ri[j] -= m * rk[j];
            }
        }
    }

    std::vector<T> solve(const std::vector<T>& b) const {
        const std::size_t n = lu_.rows();
        if (b.size() != n) throw DimensionMismatch("lu solve");
        std::vector<T> x(n);
        for (std::size_t i = 0; i < n; ++i) x[i] = b[perm_[i]];
        for (std::size_t i = 1; i < n; ++i) {
            T s = x[i];
            const T* row = lu_.row(i);
            for (std::size_t k = 0; k < i; ++k) s -= row[k] * x[k];
            x[i] = s;
        }
        for (std::size_t ii = n; ii-- > 0;) {
            T s = x[ii];
            const T* row = lu_.row(ii);
            for (std::size_t k = ii + 1; k < n; ++k) s -= row[k] * x[k];
            x[ii] = s / row[ii];
        }
        return x;
    }

    Matrix<T> inverse() const {
        const std::size_t n = lu_.rows();
        Matrix<T> inv(n, n);
        std::vector<T> e(n, T{});
        for (std::size_t j = 0; j < n; ++j) {
            std::fill(e.begin(), e.end(), T{});
            e[j] = T{1};
            auto col = solve(e);
            for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
        }
        return inv;
    }

  private:
    Matrix<T> lu_;
    std::vector<std::size_t> perm_;
    int sign_ = 1;
};

} // namespace eigencert::linalg
