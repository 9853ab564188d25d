#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "eigencert/core/error.hpp"

namespace eigencert::linalg {

using cplx = std::complex<double>;

inline std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

// Iterative radix-2 Cooley-Tukey. data.size() must be a power of two.
inline void fft_inplace(std::vector<cplx>& data, bool inverse) {
    const std::size_t n = data.size();
    if (n == 0 || (n & (n - 1)) != 0) throw DimensionMismatch("fft: power-of-two size required");
    // bit reversal
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(data[i], data[j]);
    }
    const double sign = inverse ? 1.0 : -1.0;
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * 2.0 * 3.141592653589793238462643383279502884 / static_cast<double>(len);
        const cplx wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            cplx w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const cplx u = data[i + k];
                const cplx v = data[i + k + len / 2] * w;
                data[i + k] = u + v;
                data[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
    if (inverse) {
        const double inv = 1.0 / static_cast<double>(n);
        for (cplx& x : data) x *= inv;
    }
}

// 2D transform on a row-major grid of size n x n.
inline void fft2_inplace(std::vector<cplx>& data, std::size_t n, bool inverse) {
    if (data.size() != n * n) throw DimensionMismatch("fft2: grid size");
    std::vector<cplx> tmp(n);
    for (std::size_t r = 0; r < n; ++r) {
        tmp.assign(data.begin() + r * n, data.begin() + (r + 1) * n);
        fft_inplace(tmp, inverse);
        std::copy(tmp.begin(), tmp.end(), data.begin() + r * n);
    }
    for (std::size_t c = 0; c < n; ++c) {
        for (std::size_t r = 0; r < n; ++r) tmp[r] = data[r * n + c];
        fft_inplace(tmp, inverse);
        for (std::size_t r = 0; r < n; ++r) data[r * n + c] = tmp[r];
    }
}

} // namespace eigencert::linalg
