#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "eigencert/core/error.hpp"
#include "eigencert/core/matrix.hpp"

namespace eigencert::linalg {

template <class T>
struct SvdResult {
    Matrix<T> u;                       // J x J unitary
    std::vector<double> singular;      // descending, >= 0
    Matrix<T> v;                       // J x J unitary, m = u diag(s) v*
};

// One-sided Jacobi SVD for small square matrices (subspace-overlap sized,
// J <= 64). Rotations are applied to columns until mutual orthogonality;
// rank-deficient columns are completed to a unitary U by Gram-Schmidt
// against canonical vectors.
template <class T>
SvdResult<T> svd_small(const Matrix<T>& m) {
    using st = scalar_traits<T>;
    const std::size_t n = m.rows();
    if (m.cols() != n) throw DimensionMismatch("svd_small: square matrix expected");
    if (n > 64) throw DimensionMismatch("svd_small: order must be <= 64");

    Matrix<T> a = m;                    // columns become u_i * sigma_i
    Matrix<T> v = Matrix<T>::identity(n);
    const double scale = std::max(1.0, static_cast<double>(a.max_abs()));
    const double tol = 1e-15;

    for (int sweep = 0; sweep < 60; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                // 2x2 Gram block of columns p, q
                double app = 0.0, aqq = 0.0;
                T apq{};
                for (std::size_t i = 0; i < n; ++i) {
                    app += st::abs2(a(i, p));
                    aqq += st::abs2(a(i, q));
                    apq += st::conj(a(i, p)) * a(i, q);
                }
                const double abs_apq = st::abs(apq);
                const double denom = std::sqrt(app * aqq);
                off = std::max(off, denom > 0 ? abs_apq / denom : 0.0);
                if (abs_apq <= tol * denom + 1e-300) continue;
                // Jacobi rotation diagonalizing [[app, apq],[apq*, aqq]]
                T phase = apq / T{abs_apq};
                const double tau = (aqq - app) / (2.0 * abs_apq);
                const double t = (tau >= 0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::hypot(1.0, tau));
                const double c = 1.0 / std::hypot(1.0, t);
                const double s = t * c;
                const T sp = T{s} * phase;
                for (std::size_t i = 0; i < n; ++i) {
                    const T ap = a(i, p), aq = a(i, q);
                    a(i, p) = T{c} * ap - st::conj(sp) * aq;
                    a(i, q) = sp * ap + T{c} * aq;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const T vp = v(i, p), vq = v(i, q);
                    v(i, p) = T{c} * vp - st::conj(sp) * vq;
                    v(i, q) = sp * vp + T{c} * vq;
                }
            }
        }
        if (off <= 4.0 * tol) break;
    }

    SvdResult<T> out;
    out.singular.resize(n);
    out.u = Matrix<T>(n, n);
    std::vector<std::size_t> perm(n);
    std::vector<double> norms(n);
    for (std::size_t j = 0; j < n; ++j) {
        double s2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) s2 += st::abs2(a(i, j));
        norms[j] = std::sqrt(s2);
    }
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::stable_sort(perm.begin(), perm.end(),
                     [&](std::size_t i, std::size_t j) { return norms[i] > norms[j]; });

    Matrix<T> vperm(n, n);
    const double rank_tol = 1e-14 * std::max(scale, 1.0) * static_cast<double>(n);
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t src = perm[j];
        out.singular[j] = norms[src];
        for (std::size_t i = 0; i < n; ++i) vperm(i, j) = v(i, src);
        if (norms[src] > rank_tol) {
            for (std::size_t i = 0; i < n; ++i) out.u(i, j) = a(i, src) / T{norms[src]};
        }
    }
    // complete u on the null space
    for (std::size_t j = 0; j < n; ++j) {
        if (out.singular[j] > rank_tol) continue;
        out.singular[j] = std::max(out.singular[j], 0.0);
        for (std::size_t cand = 0; cand < n; ++cand) {
            std::vector<T> col(n, T{});
            col[cand] = T{1};
            for (std::size_t k = 0; k < n; ++k) {
                if (k == j) continue;
                bool filled = (k < j) || (out.singular[k] > rank_tol);
                if (!filled) continue;
                T proj{};
                for (std::size_t i = 0; i < n; ++i) proj += st::conj(out.u(i, k)) * col[i];
                for (std::size_t i = 0; i < n; ++i) col[i] -= proj * out.u(i, k);
            }
            double nn = 0.0;
            for (std::size_t i = 0; i < n; ++i) nn += st::abs2(col[i]);
            if (nn > 1e-4) {
                const double inv = 1.0 / std::sqrt(nn);
                for (std::size_t i = 0; i < n; ++i) out.u(i, j) = col[i] * T{inv};
                break;
            }
        }
    }
    out.v = vperm;
    return out;
}

} // namespace eigencert::linalg
