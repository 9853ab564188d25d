#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "eigencert/core/error.hpp"
#include "eigencert/pw/basis.hpp"
#include "eigencert/pw/hamiltonian.hpp"
#include "eigencert/pw/potential.hpp"

namespace eigencert::pw {

// Residual coefficients of one discrete eigenpair on the extended index set
// ||k||_inf <= N + K_V. They are the exact planewave coefficients of the
// infinite-dimensional residual: the potential is a trigonometric polynomial,
// so nothing is truncated.
struct PWResidual {
    PWBasis extended;                        // cutoff N + K_V
    std::vector<std::vector<double>> coeffs; // one slice per cluster member
};

// r_hat_k = lambda u_hat_k - |g(k)|^2 u_hat_k - (V u)_hat_k on the extended
// set; the inside-cutoff entries must vanish by Galerkin orthogonality and
// are zeroed after the check.
inline std::vector<double> pw_residual_single(const PWBasis& basis, const FourierPotential& pot,
                                              const PotentialConvolver& conv,
                                              const double* u, double lambda) {
    const PWBasis& ext = conv.output_basis();
    std::vector<double> r(ext.size());
    conv.convolve(u, r.data());
    for (std::size_t p = 0; p < ext.size(); ++p) {
        const auto& k = ext.index_set[p];
        const std::size_t bp = basis.position(k);
        double val = -r[p];
        if (bp != PWBasis::npos) val += (lambda - ext.kinetic(k)) * u[bp];
        r[p] = val;
    }
    // Galerkin orthogonality: inside-cutoff coefficients are roundoff only
    double unorm = 0.0;
    for (std::size_t p = 0; p < basis.size(); ++p) unorm += u[p] * u[p];
    const double tol = 1e-10 * std::abs(lambda) * std::sqrt(unorm);
    double worst = 0.0;
    for (std::size_t p = 0; p < ext.size(); ++p) {
        if (basis.position(ext.index_set[p]) == PWBasis::npos) continue;
        worst = std::max(worst, std::abs(r[p]));
    }
    if (worst > tol)
        throw GalerkinViolation("pw_residual: inside-cutoff coefficient " +
                                std::to_string(worst) + " exceeds " + std::to_string(tol));
    for (std::size_t p = 0; p < ext.size(); ++p)
        if (basis.position(ext.index_set[p]) != PWBasis::npos) r[p] = 0.0;
    return r;
}

inline PWResidual pw_residual(const PWBasis& basis, const FourierPotential& pot,
                              const Matrix<double>& cluster_vectors,
                              const std::vector<double>& cluster_values) {
    if (cluster_vectors.cols() != cluster_values.size())
        throw DimensionMismatch("pw_residual: vectors/values count");
    PotentialConvolver conv(pot, basis.cutoff, basis.cutoff + pot.cutoff);
    PWResidual res;
    res.extended = conv.output_basis();
    std::vector<double> u(basis.size());
    for (std::size_t j = 0; j < cluster_values.size(); ++j) {
        for (std::size_t i = 0; i < basis.size(); ++i) u[i] = cluster_vectors(i, j);
        res.coeffs.push_back(
            pw_residual_single(basis, pot, conv, u.data(), cluster_values[j]));
    }
    return res;
}

struct PwDualNorms {
    double eta_res_sq = 0.0;  // sum_i ||Res_i||^2_{H^-1}
    double h2_sq = 0.0;       // sum_i ||Res_i||^2_{H^-2}
    std::vector<double> per_member_h1_sq;
    std::vector<double> per_member_h2_sq;
};

// Exact finite sums sum_k (1+|g(k)|^2)^{-s} |r_hat_k|^2, s = 1, 2. Also
// checks the cutoff factor ||Res||_{H^-2} <= (L / (2 pi N)) ||Res||_{H^-1}
// which holds term by term outside the cutoff.
inline PwDualNorms pw_dual_norms(const PWResidual& res, int basis_cutoff) {
    PwDualNorms out;
    const PWBasis& ext = res.extended;
    const double factor =
        ext.length / (2.0 * 3.14159265358979323846 * static_cast<double>(basis_cutoff));
    for (const auto& slice : res.coeffs) {
        double h1 = 0.0, h2 = 0.0;
        for (std::size_t p = 0; p < ext.size(); ++p) {
            const double w = 1.0 + ext.kinetic(ext.index_set[p]);
            const double r2 = slice[p] * slice[p];
            h1 += r2 / w;
            h2 += r2 / (w * w);
        }
        out.per_member_h1_sq.push_back(h1);
        out.per_member_h2_sq.push_back(h2);
        out.eta_res_sq += h1;
        out.h2_sq += h2;
        if (std::sqrt(h2) > factor * std::sqrt(h1) * (1.0 + 1e-12))
            throw Error("pw_dual_norms: H^-2 cutoff factor violated");
    }
    return out;
}

// Guaranteed estimators: eta_sq bounds the eigenvalue-sum error and the
// squared energy density-matrix error; eta_l2 bounds the S2 error.
inline std::pair<double, double> pw_estimators(double eta_res_sq, double c_n, double lambda_Mh,
                                               int cutoff_n, double length) {
    const double pi = 3.14159265358979323846;
    const double nn = static_cast<double>(cutoff_n);
    const double eta_sq =
        (1.0 + (1.0 / (nn * nn)) * (length * length * lambda_Mh / (pi * pi)) * c_n * c_n) *
        eta_res_sq;
    const double eta_l2 = std::sqrt(2.0) * c_n * (length / (2.0 * pi * nn)) * std::sqrt(eta_res_sq);
    return {eta_sq, eta_l2};
}

} // namespace eigencert::pw
