#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <type_traits>
#include <vector>

#include "eigencert/core/error.hpp"

namespace eigencert {

// Scalar helpers so the dense kernels work for double and complex<double>
// through one code path.
template <class T>
struct scalar_traits {
    using real_type = T;
    static constexpr bool is_complex = false;
    static T conj(T x) { return x; }
    static real_type real(T x) { return x; }
    static real_type abs(T x) { return std::abs(x); }
    static real_type abs2(T x) { return x * x; }
};

template <class R>
struct scalar_traits<std::complex<R>> {
    using real_type = R;
    static constexpr bool is_complex = true;
    static std::complex<R> conj(std::complex<R> x) { return std::conj(x); }
    static R real(std::complex<R> x) { return x.real(); }
    static R abs(std::complex<R> x) { return std::abs(x); }
    static R abs2(std::complex<R> x) { return std::norm(x); }
};

template <class T>
using real_of = typename scalar_traits<T>::real_type;

// Dense row-major matrix. Deliberately minimal: the numerical kernels in
// linalg/ own all nontrivial algorithms, this type only stores and indexes.
template <class T>
class Matrix {
  public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, T value = T{})
        : rows_(rows), cols_(cols), data_(rows * cols, value) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = T{1};
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return data_.empty(); }

    T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    T* data() { return data_.data(); }
    const T* data() const { return data_.data(); }
    T* row(std::size_t i) { return data_.data() + i * cols_; }
    const T* row(std::size_t i) const { return data_.data() + i * cols_; }

    Matrix transposed() const {
        Matrix out(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
        return out;
    }

    Matrix adjoint() const {
        Matrix out(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j)
                out(j, i) = scalar_traits<T>::conj((*this)(i, j));
        return out;
    }

    real_of<T> frobenius_norm_sq() const {
        real_of<T> s = 0;
        for (const T& v : data_) s += scalar_traits<T>::abs2(v);
        return s;
    }

    real_of<T> frobenius_norm() const { return std::sqrt(frobenius_norm_sq()); }

    real_of<T> max_abs() const {
        real_of<T> s = 0;
        for (const T& v : data_) s = std::max(s, scalar_traits<T>::abs(v));
        return s;
    }

  private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<T> data_;
};

template <class T>
Matrix<T> operator*(const Matrix<T>& a, const Matrix<T>& b) {
    if (a.cols() != b.rows()) throw DimensionMismatch("matrix product");
    Matrix<T> c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const T aik = a(i, k);
            if (aik == T{}) continue;
            const T* brow = b.row(k);
            T* crow = c.row(i);
            for (std::size_t j = 0; j < b.cols(); ++j) crow[j] += aik * brow[j];
        }
    }
    return c;
}

template <class T>
Matrix<T> operator-(const Matrix<T>& a, const Matrix<T>& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionMismatch("matrix difference");
    Matrix<T> c(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) - b(i, j);
    return c;
}

template <class T>
Matrix<T> operator+(const Matrix<T>& a, const Matrix<T>& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionMismatch("matrix sum");
    Matrix<T> c(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) + b(i, j);
    return c;
}

// y = M x
template <class T>
std::vector<T> matvec(const Matrix<T>& m, const std::vector<T>& x) {
    if (m.cols() != x.size()) throw DimensionMismatch("matvec");
    std::vector<T> y(m.rows(), T{});
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const T* row = m.row(i);
        T s{};
        for (std::size_t j = 0; j < m.cols(); ++j) s += row[j] * x[j];
        y[i] = s;
    }
    return y;
}

template <class T>
T dot_conj(const std::vector<T>& a, const std::vector<T>& b) {
    if (a.size() != b.size()) throw DimensionMismatch("dot");
    T s{};
    for (std::size_t i = 0; i < a.size(); ++i) s += scalar_traits<T>::conj(a[i]) * b[i];
    return s;
}

template <class T>
real_of<T> norm2(const std::vector<T>& a) {
    real_of<T> s = 0;
    for (const T& v : a) s += scalar_traits<T>::abs2(v);
    return std::sqrt(s);
}

} // namespace eigencert
