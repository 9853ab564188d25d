#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "eigencert/core/matrix.hpp"
#include "eigencert/core/rng.hpp"

namespace testutil {

using eigencert::Matrix;
using eigencert::SplitMix64;

inline Matrix<double> random_matrix(std::size_t r, std::size_t c, SplitMix64& rng) {
    Matrix<double> m(r, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) m(i, j) = rng.normal();
    return m;
}

// Gram-Schmidt columns of a Gaussian matrix.
inline Matrix<double> random_orthogonal(std::size_t n, SplitMix64& rng) {
    Matrix<double> q = random_matrix(n, n, rng);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < j; ++k) {
            double d = 0;
            for (std::size_t i = 0; i < n; ++i) d += q(i, k) * q(i, j);
            for (std::size_t i = 0; i < n; ++i) q(i, j) -= d * q(i, k);
        }
        double nn = 0;
        for (std::size_t i = 0; i < n; ++i) nn += q(i, j) * q(i, j);
        nn = std::sqrt(nn);
        for (std::size_t i = 0; i < n; ++i) q(i, j) /= nn;
    }
    return q;
}

// Symmetric matrix with a prescribed spectrum.
inline Matrix<double> symmetric_with_spectrum(const std::vector<double>& lambda,
                                              SplitMix64& rng) {
    const std::size_t n = lambda.size();
    Matrix<double> q = random_orthogonal(n, rng);
    Matrix<double> a(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0;
            for (std::size_t k = 0; k < n; ++k) s += q(i, k) * lambda[k] * q(j, k);
            a(i, j) = s;
        }
    // exact symmetry
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) a(j, i) = a(i, j);
    return a;
}

inline Matrix<std::complex<double>> random_hermitian(std::size_t n, SplitMix64& rng) {
    Matrix<std::complex<double>> a(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        a(i, i) = {rng.normal(), 0.0};
        for (std::size_t j = i + 1; j < n; ++j) {
            std::complex<double> v{rng.normal(), rng.normal()};
            a(i, j) = v;
            a(j, i) = std::conj(v);
        }
    }
    return a;
}

inline Matrix<double> random_spd(std::size_t n, SplitMix64& rng, double shift = 0.5) {
    Matrix<double> g = random_matrix(n, n, rng);
    Matrix<double> a(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double s = (i == j) ? shift * n : 0.0;
            for (std::size_t k = 0; k < n; ++k) s += g(i, k) * g(j, k);
            a(i, j) = s;
        }
    return a;
}

} // namespace testutil
