#pragma once
#include <utility>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <vector>

#include "eigencert/core/error.hpp"
#include "eigencert/core/matrix.hpp"

namespace eigencert::linalg {

// In-place Cholesky A = L L* (lower). Throws NotSpd on failure.
template <class T>
Matrix<T> cholesky(Matrix<T> a) {
    using st = scalar_traits<T>;
    const std::size_t n = a.rows();
    if (a.cols() != n) throw DimensionMismatch("cholesky: square matrix expected");
    for (std::size_t j = 0; j < n; ++j) {
        real_of<T> d = st::real(a(j, j));
        for (std::size_t k = 0; k < j; ++k) d -= st::abs2(a(j, k));
        if (!(d > 0)) throw NotSpd("cholesky pivot <= 0");
        const real_of<T> ljj = std::sqrt(d);
        a(j, j) = T{ljj};
        for (std::size_t i = j + 1; i < n; ++i) {
            T s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= a(i, k) * st::conj(a(j, k));
            a(i, j) = s / T{ljj};
        }
    }
    // zero the strict upper part
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) a(i, j) = T{};
    return a;
}

// Solve L x = b (lower triangular).
template <class T>
void solve_lower_inplace(const Matrix<T>& l, T* x) {
    const std::size_t n = l.rows();
    for (std::size_t i = 0; i < n; ++i) {
        T s = x[i];
        const T* row = l.row(i);
        for (std::size_t k = 0; k < i; ++k) s -= row[k] * x[k];
        x[i] = s / row[i];
    }
}

// Solve L* x = b.
template <class T>
void solve_lower_adjoint_inplace(const Matrix<T>& l, T* x) {
    using st = scalar_traits<T>;
    const std::size_t n = l.rows();
    for (std::size_t ii = n; ii-- > 0;) {
        T s = x[ii];
        for (std::size_t k = ii + 1; k < n; ++k) s -= st::conj(l(k, ii)) * x[k];
        x[ii] = s / st::conj(l(ii, ii));
    }
}

struct TqliOptions {
    int max_sweeps_per_eigenvalue = 30;
};

namespace detail {

// Implicit-shift QL on a real symmetric tridiagonal (d, e), rotations
// accumulated into the columns of z (column-major storage, n x n).
template <class T>
void tqli(std::vector<double>& d, std::vector<double>& e, std::vector<T>* z_colmajor,
          std::size_t n, const TqliOptions& opt) {
    if (n == 0) return;
    e.resize(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
    e[n - 1] = 0.0;
    for (std::size_t l = 0; l < n; ++l) {
        int iter = 0;
        std::size_t m;
        do {
            for (m = l; m + 1 < n; ++m) {
                double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= 1e-300 || std::abs(e[m]) <= 2.3e-16 * dd) break;
            }
            if (m != l) {
                if (iter++ == opt.max_sweeps_per_eigenvalue)
                    throw NoConvergence("tqli: too many QL sweeps");
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = std::hypot(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + (g >= 0 ? std::abs(r) : -std::abs(r)));
                double s = 1.0, c = 1.0, p = 0.0;
                bool underflow = false;
                for (std::size_t i = m; i-- > l;) {
                    double f = s * e[i];
                    double b = c * e[i];
                    r = std::hypot(f, g);
                    e[i + 1] = r;
                    if (r == 0.0) {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        underflow = true;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                    if (z_colmajor) {
                        T* zi = z_colmajor->data() + i * n;
                        T* zi1 = z_colmajor->data() + (i + 1) * n;
                        for (std::size_t k = 0; k < n; ++k) {
                            T f2 = zi1[k];
                            zi1[k] = T{s} * zi[k] + T{c} * f2;
                            zi[k] = T{c} * zi[k] - T{s} * f2;
                        }
                    }
                }
                if (underflow) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }
}

// Householder reduction A -> tridiagonal. On return d holds the diagonal,
// e[1..n-1] the (real, nonnegative) subdiagonal, and q the accumulated
// unitary transform (row-major) with A = q T q*.
template <class T>
void tridiagonalize(Matrix<T>& a, std::vector<double>& d, std::vector<double>& e,
                    Matrix<T>* q) {
    using st = scalar_traits<T>;
    const std::size_t n = a.rows();
    d.assign(n, 0.0);
    e.assign(n, 0.0);
    if (q) *q = Matrix<T>::identity(n);
    std::vector<T> subdiag(n, T{});
    std::vector<T> u(n), w(n), qu(n);

    for (std::size_t k = 0; k + 2 < n; ++k) {
        const std::size_t m = n - k - 1;
        // column below the diagonal
        real_of<T> beta2 = 0;
        for (std::size_t i = 0; i < m; ++i) beta2 += st::abs2(a(k + 1 + i, k));
        const real_of<T> beta = std::sqrt(beta2);
        T x0 = a(k + 1, k);
        if (beta <= 0) {
            subdiag[k + 1] = T{};
            continue;
        }
        T phase = (st::abs(x0) > 0) ? x0 / T{st::abs(x0)} : T{1};
        // u = x + phase*beta*e1, tau = 2/(u*u)
        for (std::size_t i = 0; i < m; ++i) u[i] = a(k + 1 + i, k);
        u[0] += phase * T{beta};
        real_of<T> uu = 0;
        for (std::size_t i = 0; i < m; ++i) uu += st::abs2(u[i]);
        if (uu <= 0) {
            subdiag[k + 1] = -phase * T{beta};
            continue;
        }
        const real_of<T> tau = real_of<T>(2) / uu;

        // trailing block update B <- B - u w* - w u*, w = tau*B*u - (tau^2/2)(u*Bu) u
        for (std::size_t i = 0; i < m; ++i) {
            T s{};
            for (std::size_t j = 0; j < m; ++j) s += a(k + 1 + i, k + 1 + j) * u[j];
            w[i] = T{tau} * s;
        }
        T uw{};
        for (std::size_t i = 0; i < m; ++i) uw += st::conj(u[i]) * w[i];
        const T half_tau_uw = T{tau / 2} * uw;
        for (std::size_t i = 0; i < m; ++i) w[i] -= half_tau_uw * u[i];
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < m; ++j) {
                a(k + 1 + i, k + 1 + j) -=
                    u[i] * st::conj(w[j]) + w[i] * st::conj(u[j]);
            }
        }
        subdiag[k + 1] = -phase * T{beta};
        a(k + 1, k) = subdiag[k + 1];
        for (std::size_t i = 1; i < m; ++i) a(k + 1 + i, k) = T{};

        if (q) {
            // Q <- Q (I - tau u u*)
            for (std::size_t r = 0; r < n; ++r) {
                T s{};
                const T* qrow = q->row(r);
                for (std::size_t j = 0; j < m; ++j) s += qrow[k + 1 + j] * u[j];
                qu[r] = T{tau} * s;
            }
            for (std::size_t r = 0; r < n; ++r) {
                T* qrow = q->row(r);
                for (std::size_t j = 0; j < m; ++j) qrow[k + 1 + j] -= qu[r] * st::conj(u[j]);
            }
        }
    }
    if (n >= 2) subdiag[n - 1] = a(n - 1, n - 2);

    // phase-normalize the subdiagonal to real, absorbing phases into q
    std::vector<T> scale(n, T{1});
    for (std::size_t i = 1; i < n; ++i) {
        T t = subdiag[i];
        real_of<T> at = st::abs(t);
        if (at > 0)
            scale[i] = (t * scale[i - 1]) / T{at};
        else
            scale[i] = scale[i - 1];
        e[i] = at;
    }
    for (std::size_t i = 0; i < n; ++i) d[i] = st::real(a(i, i));
    if (q) {
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < n; ++c) (*q)(r, c) *= scale[c];
    }
}

} // namespace detail

template <class T>
struct EigResult {
    std::vector<double> values;   // ascending
    Matrix<T> vectors;            // columns, B-orthonormal for generalized problems
};

struct DenseEigOptions {
    bool compute_vectors = true;
    TqliOptions tqli;
};

// All eigenpairs of a self-adjoint matrix (real symmetric or complex
// Hermitian), optionally generalized against an SPD matrix b:
// A v = lambda B v, with V* B V = I. Householder tridiagonalization plus
// implicit-shift QL; deterministic for fixed input.
template <class T>
EigResult<T> dense_eig(Matrix<T> a, std::optional<Matrix<T>> b = std::nullopt,
                       const DenseEigOptions& opt = {}) {
    using st = scalar_traits<T>;
    const std::size_t n = a.rows();
    if (a.cols() != n) throw DimensionMismatch("dense_eig: square matrix expected");

    std::optional<Matrix<T>> l;
    if (b) {
        if (b->rows() != n || b->cols() != n) throw DimensionMismatch("dense_eig: B size");
        l = cholesky(*b);
        // C = L^-1 A L^-*: forward-solve columns, then adjoint-solve rows
        std::vector<T> col(n);
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t i = 0; i < n; ++i) col[i] = a(i, j);
            solve_lower_inplace(*l, col.data());
            for (std::size_t i = 0; i < n; ++i) a(i, j) = col[i];
        }
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) col[j] = st::conj(a(i, j));
            solve_lower_inplace(*l, col.data());
            for (std::size_t j = 0; j < n; ++j) a(i, j) = st::conj(col[j]);
        }
        // resymmetrize against roundoff
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                T v = (a(i, j) + st::conj(a(j, i))) / T{2};
                a(i, j) = v;
                a(j, i) = st::conj(v);
            }
    }

    std::vector<double> d, e;
    Matrix<T> q;
    detail::tridiagonalize(a, d, e, opt.compute_vectors ? &q : nullptr);

    std::vector<T> z;
    if (opt.compute_vectors) {
        // column-major copy of q for the rotation sweeps
        z.assign(n * n, T{});
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < n; ++c) z[c * n + r] = q(r, c);
    }
    detail::tqli(d, e, opt.compute_vectors ? &z : nullptr, n, opt.tqli);

    // ascending sort
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::sort(perm.begin(), perm.end(), [&](std::size_t i, std::size_t j) { return d[i] < d[j]; });

    EigResult<T> out;
    out.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.values[i] = d[perm[i]];
    if (opt.compute_vectors) {
        out.vectors = Matrix<T>(n, n);
        std::vector<T> col(n);
        for (std::size_t c = 0; c < n; ++c) {
            const T* src = z.data() + perm[c] * n;
            std::copy(src, src + n, col.begin());
            if (l) solve_lower_adjoint_inplace(*l, col.data());
            // deterministic sign/phase: largest-modulus entry real positive
            std::size_t imax = 0;
            real_of<T> amax = 0;
            for (std::size_t i = 0; i < n; ++i) {
                real_of<T> ai = st::abs(col[i]);
                if (ai > amax) {
                    amax = ai;
                    imax = i;
                }
            }
            if (amax > 0) {
                T ph = st::conj(col[imax]) / T{amax};
                for (std::size_t i = 0; i < n; ++i) col[i] *= ph;
            }
            for (std::size_t i = 0; i < n; ++i) out.vectors(i, c) = col[i];
        }
    }
    return out;
}

template <class T>
EigResult<T> dense_eig(Matrix<T> a, Matrix<T> b, const DenseEigOptions& opt = {}) {
    return dense_eig(std::move(a), std::optional<Matrix<T>>(std::move(b)), opt);
}

} // namespace eigencert::linalg
