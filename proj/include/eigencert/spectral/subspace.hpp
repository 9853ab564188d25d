#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "eigencert/core/error.hpp"
#include "eigencert/core/matrix.hpp"
#include "eigencert/linalg/svd.hpp"

namespace eigencert::spectral {

// J orthonormal coefficient vectors in an ambient discrete basis. The
// optional metric is the Gram operator of that basis (identity when the
// basis is orthonormal, the mass matrix for finite elements).
template <class T>
struct SubspaceBasis {
    std::size_t ambient_dim = 0;
    Matrix<T> vectors;  // ambient_dim x J, one column per vector
    std::function<void(const T*, T*)> metric;  // empty means identity

    std::size_t count() const { return vectors.cols(); }

    std::vector<T> metric_apply(const T* x) const {
        std::vector<T> y(ambient_dim);
        if (metric) {
            metric(x, y.data());
        } else {
            std::copy(x, x + ambient_dim, y.begin());
        }
        return y;
    }

    // max |(u_i, u_j) - delta_ij|
    double orthonormality_defect() const {
        using st = scalar_traits<T>;
        double defect = 0.0;
        std::vector<T> col(ambient_dim), mcol;
        for (std::size_t j = 0; j < count(); ++j) {
            for (std::size_t i = 0; i < ambient_dim; ++i) col[i] = vectors(i, j);
            mcol = metric_apply(col.data());
            for (std::size_t i = 0; i <= j; ++i) {
                T s{};
                for (std::size_t r = 0; r < ambient_dim; ++r)
                    s += st::conj(vectors(r, i)) * mcol[r];
                const double want = (i == j) ? 1.0 : 0.0;
                defect = std::max(defect, std::abs(st::abs(s) - want) +
                                              ((i == j) ? std::abs(st::real(s) - st::abs(s)) : 0.0));
            }
        }
        return defect;
    }

    void validate(double tol = 1e-10) const {
        if (vectors.rows() != ambient_dim) throw DimensionMismatch("subspace basis storage");
        const double defect = orthonormality_defect();
        if (defect > tol)
            throw Error("subspace basis not orthonormal: defect " + std::to_string(defect));
    }
};

// J x J matrix of inner products (a_i, b_j) in the shared ambient metric;
// conjugation on the first argument for complex scalars.
template <class T>
Matrix<T> overlap(const SubspaceBasis<T>& a, const SubspaceBasis<T>& b) {
    using st = scalar_traits<T>;
    if (a.ambient_dim != b.ambient_dim)
        throw DimensionMismatch("overlap: ambient dimensions differ");
    const std::size_t ja = a.count(), jb = b.count();
    Matrix<T> m(ja, jb);
    std::vector<T> col(b.ambient_dim), mcol;
    for (std::size_t j = 0; j < jb; ++j) {
        for (std::size_t i = 0; i < b.ambient_dim; ++i) col[i] = b.vectors(i, j);
        mcol = b.metric ? b.metric_apply(col.data()) : a.metric_apply(col.data());
        for (std::size_t i = 0; i < ja; ++i) {
            T s{};
            for (std::size_t r = 0; r < a.ambient_dim; ++r)
                s += st::conj(a.vectors(r, i)) * mcol[r];
            m(i, j) = s;
        }
    }
    return m;
}

// Largest singular value of an overlap of two orthonormal frames can exceed
// one only through roundoff; callers assert this invariant in tests.
template <class T>
double largest_singular_value(const Matrix<T>& m) {
    auto s = linalg::svd_small(m);
    return s.singular.empty() ? 0.0 : s.singular.front();
}

template <class T>
double smallest_singular_value(const Matrix<T>& m) {
    auto s = linalg::svd_small(m);
    return s.singular.empty() ? 0.0 : s.singular.back();
}

template <class T>
struct AlignResult {
    Matrix<T> rotation;        // J x J orthogonal/unitary U
    SubspaceBasis<T> aligned;  // rows of U applied to phi_h
    Matrix<T> aligned_overlap; // (phi_exact, aligned) -- symmetric PSD
};

// Minimize ||U phi_h - phi_exact|| over the orthogonal (unitary) group:
// U = P Q* from the SVD M = P S Q* of the overlap M_ij = (phi_exact_i,
// phi_h_j). The aligned overlap M U^T = P S P* is then Hermitian PSD.
template <class T>
AlignResult<T> align_subspaces(const SubspaceBasis<T>& phi_h,
                               const SubspaceBasis<T>& phi_exact) {
    using st = scalar_traits<T>;
    if (phi_h.count() != phi_exact.count())
        throw DimensionMismatch("align_subspaces: cluster sizes differ");
    const std::size_t j = phi_h.count();
    Matrix<T> m = overlap(phi_exact, phi_h);
    auto svd = linalg::svd_small(m);
    if (!svd.singular.empty() && svd.singular.back() < 1e-12)
        throw RankDeficientOverlap("align_subspaces: smallest singular value " +
                                   std::to_string(svd.singular.back()));
    // U = conj(P) Q^T maximizes Re Tr(M U^T) over the unitary group; for the
    // real case this is the familiar polar factor P Q^T.
    Matrix<T> u(j, j);
    for (std::size_t r = 0; r < j; ++r)
        for (std::size_t c = 0; c < j; ++c) {
            T s{};
            for (std::size_t k = 0; k < j; ++k)
                s += st::conj(svd.u(r, k)) * svd.v(c, k);
            u(r, c) = s;
        }

    AlignResult<T> out;
    out.rotation = u;
    out.aligned.ambient_dim = phi_h.ambient_dim;
    out.aligned.metric = phi_h.metric;
    out.aligned.vectors = Matrix<T>(phi_h.ambient_dim, j);
    // aligned_i = sum_k U_ik (phi_h)_k
    for (std::size_t i = 0; i < j; ++i)
        for (std::size_t k = 0; k < j; ++k) {
            const T coef = u(i, k);
            if (coef == T{}) continue;
            for (std::size_t r = 0; r < phi_h.ambient_dim; ++r)
                out.aligned.vectors(r, i) += coef * phi_h.vectors(r, k);
        }
    // aligned overlap M U^T (no conjugate: entries (phi_exact_i, aligned_j))
    out.aligned_overlap = Matrix<T>(j, j);
    for (std::size_t r = 0; r < j; ++r)
        for (std::size_t c = 0; c < j; ++c) {
            T s{};
            for (std::size_t k = 0; k < j; ++k) s += m(r, k) * u(c, k);
            out.aligned_overlap(r, c) = s;
        }
    return out;
}

} // namespace eigencert::spectral
