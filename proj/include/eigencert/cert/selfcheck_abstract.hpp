#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "eigencert/core/matrix.hpp"
#include "eigencert/core/rng.hpp"
#include "eigencert/linalg/dense_eig.hpp"
#include "eigencert/linalg/lu.hpp"
#include "eigencert/spectral/constants.hpp"
#include "eigencert/spectral/distances.hpp"
#include "eigencert/spectral/subspace.hpp"

namespace eigencert::cert {

struct SuiteReport {
    std::string name;
    std::size_t instances = 0;
    std::size_t failures = 0;
    double worst = 0.0;  // worst signed violation observed (<= 0 is clean)

    bool passed() const { return failures == 0; }
};

namespace detail {

// One randomized conforming Galerkin instance: a dense self-adjoint operator
// with known spectrum, a random conforming subspace, its Galerkin eigenpairs,
// and a cluster with verified edge gaps. Everything downstream is checked
// against this instance's exact data.
struct GalerkinInstance {
    std::size_t n = 0, nh = 0;
    std::size_t m = 1, M = 1;          // 1-based cluster indices
    std::vector<double> lambda;        // exact spectrum, ascending
    Matrix<double> q;                  // exact eigenvectors (columns)
    Matrix<double> a;                  // dense operator
    std::vector<double> lambda_h;      // discrete spectrum (all nh values)
    Matrix<double> u_h;                // ambient discrete eigenvectors (n x nh)

    std::size_t cluster_size() const { return M - m + 1; }

    std::vector<double> exact_cluster() const {
        return {lambda.begin() + m - 1, lambda.begin() + M};
    }
    std::vector<double> discrete_cluster() const {
        return {lambda_h.begin() + m - 1, lambda_h.begin() + M};
    }

    spectral::SubspaceBasis<double> exact_basis() const {
        spectral::SubspaceBasis<double> b;
        b.ambient_dim = n;
        b.vectors = Matrix<double>(n, cluster_size());
        for (std::size_t j = 0; j < cluster_size(); ++j)
            for (std::size_t i = 0; i < n; ++i) b.vectors(i, j) = q(i, m - 1 + j);
        return b;
    }
    spectral::SubspaceBasis<double> discrete_basis() const {
        spectral::SubspaceBasis<double> b;
        b.ambient_dim = n;
        b.vectors = Matrix<double>(n, cluster_size());
        for (std::size_t j = 0; j < cluster_size(); ++j)
            for (std::size_t i = 0; i < n; ++i) b.vectors(i, j) = u_h(i, m - 1 + j);
        return b;
    }

    // dense rank-J projector onto a frame
    static Matrix<double> projector(const Matrix<double>& frame) {
        const std::size_t n = frame.rows(), j = frame.cols();
        Matrix<double> p(n, n);
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < n; ++c) {
                double s = 0;
                for (std::size_t k = 0; k < j; ++k) s += frame(r, k) * frame(c, k);
                p(r, c) = s;
            }
        return p;
    }

    Matrix<double> gamma_exact() const { return projector(exact_basis().vectors); }
    Matrix<double> gamma_h() const { return projector(discrete_basis().vectors); }

    // A^s as a dense matrix through the exact eigenbasis
    Matrix<double> a_power(double s) const {
        Matrix<double> p(n, n);
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < n; ++c) {
                double sum = 0;
                for (std::size_t k = 0; k < n; ++k)
                    sum += q(r, k) * std::pow(lambda[k], s) * q(c, k);
                p(r, c) = sum;
            }
        return p;
    }

    // ||Res_gamma_h||_{S2}^2 by the eigenbasis expansion (s = 0)
    double residual_s2_sq() const {
        double total = 0;
        for (std::size_t i = m - 1; i < M; ++i) {
            for (std::size_t k = 0; k < n; ++k) {
                double ov = 0;
                for (std::size_t r = 0; r < n; ++r) ov += u_h(r, i) * q(r, k);
                const double diff = lambda[k] - lambda_h[i];
                total += diff * diff / lambda[k] * ov * ov;
            }
        }
        return total;
    }

    // same quantity through r_i = lambda_ih u_ih - A u_ih and a dense solve
    double residual_s2_sq_direct() const {
        linalg::Lu<double> lu(a);
        double total = 0;
        std::vector<double> u(n), r(n);
        for (std::size_t i = m - 1; i < M; ++i) {
            for (std::size_t j = 0; j < n; ++j) u[j] = u_h(j, i);
            auto au = matvec(a, u);
            for (std::size_t j = 0; j < n; ++j) r[j] = lambda_h[i] * u[j] - au[j];
            auto z = lu.solve(r);
            for (std::size_t j = 0; j < n; ++j) total += r[j] * z[j];
        }
        return total;
    }
};

inline GalerkinInstance make_instance(SplitMix64& rng, bool allow_degenerate = true) {
    GalerkinInstance gi;
    gi.n = 8 + rng.below(8);              // ambient dim 8..15
    gi.nh = gi.n - 2 - rng.below(3);      // conforming subspace
    // cluster inside the subspace range
    const std::size_t jmax = 3;
    std::size_t j = 1 + rng.below(jmax);
    gi.m = 1 + rng.below(3);
    gi.M = gi.m + j - 1;
    if (gi.M + 2 > gi.nh) {
        gi.m = 1;
        gi.M = std::min<std::size_t>(2, gi.nh - 2);
    }

    // spectrum with guaranteed edge gaps; optionally degenerate inside
    gi.lambda.resize(gi.n);
    double v = 0.5 + rng.uniform(0.0, 1.0);
    for (std::size_t i = 0; i < gi.n; ++i) {
        gi.lambda[i] = v;
        double inc = 0.2 + rng.uniform(0.0, 1.5);
        bool inside_cluster = (i + 1 >= gi.m && i + 2 <= gi.M);
        if (inside_cluster && allow_degenerate && rng.next_double() < 0.4)
            inc = 0.0;  // exact degeneracy inside the cluster
        if (i + 2 == gi.m || i + 1 == gi.M) inc = std::max(inc, 0.6);  // edge gaps
        v += inc;
    }

    // exact eigenvectors: random orthogonal
    Matrix<double> g(gi.n, gi.n);
    for (std::size_t i = 0; i < gi.n; ++i)
        for (std::size_t c = 0; c < gi.n; ++c) g(i, c) = rng.normal();
    for (std::size_t c = 0; c < gi.n; ++c) {
        for (std::size_t k = 0; k < c; ++k) {
            double d = 0;
            for (std::size_t i = 0; i < gi.n; ++i) d += g(i, k) * g(i, c);
            for (std::size_t i = 0; i < gi.n; ++i) g(i, c) -= d * g(i, k);
        }
        double nn = 0;
        for (std::size_t i = 0; i < gi.n; ++i) nn += g(i, c) * g(i, c);
        nn = std::sqrt(nn);
        for (std::size_t i = 0; i < gi.n; ++i) g(i, c) /= nn;
    }
    gi.q = g;
    gi.a = Matrix<double>(gi.n, gi.n);
    for (std::size_t r = 0; r < gi.n; ++r)
        for (std::size_t c = 0; c < gi.n; ++c) {
            double s = 0;
            for (std::size_t k = 0; k < gi.n; ++k) s += g(r, k) * gi.lambda[k] * g(c, k);
            gi.a(r, c) = s;
        }
    for (std::size_t r = 0; r < gi.n; ++r)
        for (std::size_t c = r + 1; c < gi.n; ++c) gi.a(c, r) = gi.a(r, c);

    // random conforming subspace and its Galerkin eigenpairs
    Matrix<double> vbasis(gi.n, gi.nh);
    for (std::size_t i = 0; i < gi.n; ++i)
        for (std::size_t c = 0; c < gi.nh; ++c) vbasis(i, c) = rng.normal();
    for (std::size_t c = 0; c < gi.nh; ++c) {
        for (std::size_t k = 0; k < c; ++k) {
            double d = 0;
            for (std::size_t i = 0; i < gi.n; ++i) d += vbasis(i, k) * vbasis(i, c);
            for (std::size_t i = 0; i < gi.n; ++i) vbasis(i, c) -= d * vbasis(i, k);
        }
        double nn = 0;
        for (std::size_t i = 0; i < gi.n; ++i) nn += vbasis(i, c) * vbasis(i, c);
        nn = std::sqrt(nn);
        for (std::size_t i = 0; i < gi.n; ++i) vbasis(i, c) /= nn;
    }
    Matrix<double> ah(gi.nh, gi.nh);
    for (std::size_t p = 0; p < gi.nh; ++p)
        for (std::size_t c = 0; c < gi.nh; ++c) {
            double s = 0;
            for (std::size_t i = 0; i < gi.n; ++i)
                for (std::size_t k = 0; k < gi.n; ++k) s += vbasis(i, p) * gi.a(i, k) * vbasis(k, c);
            ah(p, c) = s;
        }
    for (std::size_t p = 0; p < gi.nh; ++p)
        for (std::size_t c = p + 1; c < gi.nh; ++c) {
            double s = 0.5 * (ah(p, c) + ah(c, p));
            ah(p, c) = ah(c, p) = s;
        }
    auto eh = linalg::dense_eig(ah);
    gi.lambda_h = eh.values;
    gi.u_h = Matrix<double>(gi.n, gi.nh);
    for (std::size_t c = 0; c < gi.nh; ++c)
        for (std::size_t i = 0; i < gi.n; ++i) {
            double s = 0;
            for (std::size_t k = 0; k < gi.nh; ++k) s += vbasis(i, k) * eh.vectors(k, c);
            gi.u_h(i, c) = s;
        }
    return gi;
}

inline double frob(const Matrix<double>& m) { return m.frobenius_norm(); }

} // namespace detail

// Lemma on projector differences: the overlap formula for the S2 distance
// matches the dense projector computation.
inline SuiteReport suite_projector_identity(std::uint64_t seed, std::size_t count) {
    SuiteReport rep{"dm-l2 distance vs dense projector oracle"};
    SplitMix64 rng(seed);
    for (std::size_t it = 0; it < count; ++it) {
        auto gi = detail::make_instance(rng);
        auto m = spectral::overlap(gi.exact_basis(), gi.discrete_basis());
        const double via_formula = spectral::dm_l2_distance(m);
        const double via_dense = detail::frob(gi.gamma_exact() - gi.gamma_h());
        const double diff = std::abs(via_formula - via_dense);
        rep.instances++;
        rep.worst = std::max(rep.worst, diff - 1e-10);
        if (diff > 1e-10) rep.failures++;
    }
    return rep;
}

// Energy-norm projector distance and aligned eigenvector error, both overlap
// formulas against the dense oracle.
inline SuiteReport suite_energy_formulas(std::uint64_t seed, std::size_t count) {
    SuiteReport rep{"energy distances vs dense projector oracle"};
    SplitMix64 rng(seed);
    for (std::size_t it = 0; it < count; ++it) {
        auto gi = detail::make_instance(rng);
        auto phi0 = gi.exact_basis();
        auto phih = gi.discrete_basis();
        auto m = spectral::overlap(phi0, phih);

        auto a_half = gi.a_power(0.5);
        const double dense_energy = detail::frob(a_half * (gi.gamma_exact() - gi.gamma_h()));
        const double formula_energy =
            spectral::dm_energy_distance(gi.exact_cluster(), gi.discrete_cluster(), m);
        double diff = std::abs(dense_energy - formula_energy);

        // aligned eigenvector error against direct column differences
        auto align = spectral::align_subspaces(phih, phi0);
        const double formula_vec = spectral::eigenvector_error_energy(
            gi.exact_cluster(), gi.discrete_cluster(), align.aligned_overlap);
        double dense_vec_sq = 0;
        const std::size_t j = gi.cluster_size();
        for (std::size_t c = 0; c < j; ++c) {
            std::vector<double> dcol(gi.n);
            for (std::size_t i = 0; i < gi.n; ++i)
                dcol[i] = phi0.vectors(i, c) - align.aligned.vectors(i, c);
            auto adcol = matvec(a_half, dcol);
            for (std::size_t i = 0; i < gi.n; ++i) dense_vec_sq += adcol[i] * adcol[i];
        }
        diff = std::max(diff, std::abs(formula_vec - std::sqrt(dense_vec_sq)));

        rep.instances++;
        rep.worst = std::max(rep.worst, diff - 1e-10);
        if (diff > 1e-10) rep.failures++;
    }
    return rep;
}

// Norm equivalences between density-matrix and aligned eigenvector errors.
inline SuiteReport suite_norm_equivalences(std::uint64_t seed, std::size_t count) {
    SuiteReport rep{"L2/H1 norm equivalences for aligned frames"};
    SplitMix64 rng(seed);
    const double slack = 1e-9;
    for (std::size_t it = 0; it < count; ++it) {
        auto gi = detail::make_instance(rng);
        auto phi0 = gi.exact_basis();
        auto phih = gi.discrete_basis();
        auto m = spectral::overlap(phi0, phih);
        auto align = spectral::align_subspaces(phih, phi0);

        const double dm_l2 = spectral::dm_l2_distance(m);
        const double dm_en =
            spectral::dm_energy_distance(gi.exact_cluster(), gi.discrete_cluster(), m);
        const double vec_l2 = spectral::eigenvector_error_l2(align.aligned_overlap);
        const double vec_en = spectral::eigenvector_error_energy(
            gi.exact_cluster(), gi.discrete_cluster(), align.aligned_overlap);

        const double lam_m = gi.lambda[gi.m - 1];
        const double lam_M = gi.lambda[gi.M - 1];
        double violation = 0.0;
        violation = std::max(violation, dm_l2 / std::sqrt(2.0) - vec_l2);
        violation = std::max(violation, vec_l2 - dm_l2);
        violation = std::max(violation, dm_en / std::sqrt(2.0) - vec_en);
        const double factor = std::sqrt(1.0 + lam_M / (4.0 * lam_m) * dm_l2 * dm_l2);
        violation = std::max(violation, vec_en - factor * dm_en);

        rep.instances++;
        rep.worst = std::max(rep.worst, violation - slack);
        if (violation > slack) rep.failures++;
    }
    return rep;
}

// Eigenvalue-sum bracketing by the two density-matrix distances.
inline SuiteReport suite_eigenvalue_bracketing(std::uint64_t seed, std::size_t count) {
    SuiteReport rep{"eigenvalue-sum bracketing"};
    SplitMix64 rng(seed);
    const double slack = 1e-9;
    for (std::size_t it = 0; it < count; ++it) {
        auto gi = detail::make_instance(rng);
        auto m = spectral::overlap(gi.exact_basis(), gi.discrete_basis());
        const double dm_l2 = spectral::dm_l2_distance(m);
        const double dm_en =
            spectral::dm_energy_distance(gi.exact_cluster(), gi.discrete_cluster(), m);
        auto [lower, upper] =
            spectral::eigenvalue_sum_bounds(dm_en, dm_l2, gi.lambda[gi.M - 1]);
        double sum = 0;
        for (std::size_t i = gi.m - 1; i < gi.M; ++i) sum += gi.lambda_h[i] - gi.lambda[i];
        double violation = std::max(lower - sum, sum - upper);
        violation = std::max(violation, -sum);  // conforming: sum must be >= 0

        rep.instances++;
        rep.worst = std::max(rep.worst, violation - slack);
        if (violation > slack) rep.failures++;
    }
    return rep;
}

// Lower bound for the residual in terms of the density-matrix errors.
inline SuiteReport suite_residual_lower_bound(std::uint64_t seed, std::size_t count) {
    SuiteReport rep{"residual lower bound (efficiency)"};
    SplitMix64 rng(seed);
    for (std::size_t it = 0; it < count; ++it) {
        auto gi = detail::make_instance(rng);
        auto m = spectral::overlap(gi.exact_basis(), gi.discrete_basis());
        const double dm_l2 = spectral::dm_l2_distance(m);
        const double dm_en =
            spectral::dm_energy_distance(gi.exact_cluster(), gi.discrete_cluster(), m);
        const double lam_1 = gi.lambda[0];
        const double lam_m = gi.lambda[gi.m - 1];
        const double lam_M = gi.lambda[gi.M - 1];
        const double lam_Mh = gi.lambda_h[gi.M - 1];
        const double cbar = std::max((lam_Mh / lam_1 - 1.0) * (lam_Mh / lam_1 - 1.0), 1.0);

        const double l2sq = dm_l2 * dm_l2;
        const double l2p4 = l2sq * l2sq;
        const double onep = 1.0 + lam_M / (4.0 * lam_m) * l2sq;
        const double rhs = cbar * dm_en * dm_en +
                           3.0 * (lam_M - lam_m) * (lam_M - lam_m) / (4.0 * lam_m) * l2p4 +
                           3.0 / lam_m * (1.0 + 0.25 * l2p4) *
                               (2.0 * onep * onep * dm_en * dm_en * dm_en * dm_en +
                                2.0 * lam_M * lam_M * l2p4);
        const double lhs = gi.residual_s2_sq();
        const double violation = lhs - rhs;

        rep.instances++;
        rep.worst = std::max(rep.worst, violation - 1e-9 * std::max(1.0, rhs));
        if (violation > 1e-9 * std::max(1.0, rhs)) rep.failures++;
    }
    return rep;
}

// Residual-sum identity: eigenbasis expansion of ||Res||_{S2}^2 equals the
// direct A^{-1}-weighted quadratic form of the single-pair residuals.
inline SuiteReport suite_residual_sum_identity(std::uint64_t seed, std::size_t count) {
    SuiteReport rep{"residual-sum identity (two routes)"};
    SplitMix64 rng(seed);
    for (std::size_t it = 0; it < count; ++it) {
        auto gi = detail::make_instance(rng);
        const double via_eigenbasis = gi.residual_s2_sq();
        const double via_dense = gi.residual_s2_sq_direct();
        const double rel = std::abs(via_eigenbasis - via_dense) /
                           std::max(1e-300, std::max(via_eigenbasis, via_dense));
        rep.instances++;
        rep.worst = std::max(rep.worst, rel - 1e-6);
        if (rel > 1e-6) rep.failures++;
    }
    return rep;
}

// Alignment optimality: random orthogonal perturbations never beat the
// returned minimizer.
inline SuiteReport suite_alignment_optimality(std::uint64_t seed, std::size_t count) {
    SuiteReport rep{"subspace alignment optimality"};
    SplitMix64 rng(seed);
    for (std::size_t it = 0; it < count; ++it) {
        auto gi = detail::make_instance(rng);
        auto phi0 = gi.exact_basis();
        auto phih = gi.discrete_basis();
        auto align = spectral::align_subspaces(phih, phi0);
        const std::size_t j = gi.cluster_size();

        auto frame_distance = [&](const Matrix<double>& u) {
            double s = 0;
            for (std::size_t c = 0; c < j; ++c) {
                for (std::size_t i = 0; i < gi.n; ++i) {
                    double combo = 0;
                    for (std::size_t k = 0; k < j; ++k) combo += u(c, k) * phih.vectors(i, k);
                    const double d = combo - phi0.vectors(i, c);
                    s += d * d;
                }
            }
            return std::sqrt(s);
        };
        const double attained = frame_distance(align.rotation);
        double violation = 0.0;
        for (int p = 0; p < 16; ++p) {
            // random small (and occasionally large) orthogonal perturbation
            Matrix<double> skew(j, j);
            const double scale = (p % 4 == 0) ? 1.5 : 0.05;
            for (std::size_t r = 0; r < j; ++r)
                for (std::size_t c = r + 1; c < j; ++c) {
                    const double v = scale * rng.normal();
                    skew(r, c) = v;
                    skew(c, r) = -v;
                }
            // Cayley transform to orthogonal
            Matrix<double> ident = Matrix<double>::identity(j);
            Matrix<double> num = ident - skew;
            Matrix<double> den = ident + skew;
            linalg::Lu<double> lu(den);
            Matrix<double> cay(j, j);
            std::vector<double> col(j);
            for (std::size_t c = 0; c < j; ++c) {
                for (std::size_t r = 0; r < j; ++r) col[r] = num(r, c);
                auto x = lu.solve(col);
                for (std::size_t r = 0; r < j; ++r) cay(r, c) = x[r];
            }
            Matrix<double> u2 = cay * align.rotation;
            violation = std::max(violation, attained - frame_distance(u2));
            if (j == 1) {
                // reflection branch
                Matrix<double> refl = align.rotation;
                refl(0, 0) = -refl(0, 0);
                violation = std::max(violation, attained - frame_distance(refl));
            }
        }
        rep.instances++;
        rep.worst = std::max(rep.worst, violation - 1e-9);
        if (violation > 1e-9) rep.failures++;
    }
    return rep;
}

// Scaling behavior of the gap constants under lambda -> t lambda.
inline SuiteReport suite_constants_scaling(std::uint64_t seed, std::size_t count) {
    SuiteReport rep{"gap-constant scaling"};
    SplitMix64 rng(seed);
    for (std::size_t it = 0; it < count; ++it) {
        const double l_mh = 2.0 + rng.uniform(0.0, 3.0);
        const double l_Mh = l_mh + rng.uniform(0.0, 2.0);
        spectral::GapBounds gaps;
        gaps.upper_prev = l_mh * (0.4 + 0.4 * rng.next_double());
        gaps.lower_next = l_Mh * (1.1 + rng.next_double());
        gaps.lower_first = 0.5 + rng.next_double();
        std::vector<double> cluster{l_mh, l_Mh};
        auto c1 = spectral::compute_constants(cluster, 2, gaps);
        const double t = 0.1 + 10.0 * rng.next_double();
        spectral::GapBounds gaps_t;
        gaps_t.upper_prev = *gaps.upper_prev * t;
        gaps_t.lower_next = gaps.lower_next * t;
        gaps_t.lower_first = gaps.lower_first * t;
        std::vector<double> cluster_t{l_mh * t, l_Mh * t};
        auto c2 = spectral::compute_constants(cluster_t, 2, gaps_t);

        double violation = std::abs(c1.c_h - c2.c_h) / c1.c_h;
        violation = std::max(violation, std::abs(c1.c_bar_h - c2.c_bar_h) / c1.c_bar_h);
        violation =
            std::max(violation, std::abs(c2.c_tilde_h - c1.c_tilde_h / std::sqrt(t)) /
                                    c1.c_tilde_h * std::sqrt(t));
        rep.instances++;
        rep.worst = std::max(rep.worst, violation - 1e-12);
        if (violation > 1e-12) rep.failures++;
    }
    return rep;
}

inline std::vector<SuiteReport> run_abstract_suites(std::uint64_t seed,
                                                    std::size_t count = 1000) {
    std::vector<SuiteReport> out;
    out.push_back(suite_projector_identity(seed + 1, count));
    out.push_back(suite_energy_formulas(seed + 2, count));
    out.push_back(suite_norm_equivalences(seed + 3, count));
    out.push_back(suite_eigenvalue_bracketing(seed + 4, count));
    out.push_back(suite_residual_lower_bound(seed + 5, count));
    out.push_back(suite_residual_sum_identity(seed + 6, count));
    out.push_back(suite_alignment_optimality(seed + 7, std::max<std::size_t>(count / 5, 1)));
    out.push_back(suite_constants_scaling(seed + 8, count));
    return out;
}

} // namespace eigencert::cert
