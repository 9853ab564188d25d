#pragma once

#include <cmath>
#include <cstddef>
#include <optional>

#include "eigencert/fem/p1.hpp"
#include "eigencert/linalg/dense_eig.hpp"
#include "eigencert/linalg/lobpcg.hpp"
#include "eigencert/spectral/subspace.hpp"
#include "eigencert/spectral/types.hpp"

namespace eigencert::fem {

struct FemSolveOptions {
    std::size_t dense_limit = 1500;
    double tol = 1e-9;
    std::uint64_t seed = 42;
    std::size_t max_iterations = 6000;
    Matrix<double> warm_start;  // interior-dof columns from a coarser mesh
};

struct FemClusterSolution {
    spectral::EigenCluster cluster;
    spectral::SubspaceBasis<double> basis;  // mass-orthonormal interior-dof vectors
    std::vector<double> lambda_low;         // lambda_1 .. lambda_{M+1}
};

// Lowest generalized eigenpairs of (stiffness, mass); dense reduction for
// small systems, block iteration otherwise. Rayleigh identities of the
// returned pairs are verified to 1e-9 relative.
inline FemClusterSolution fem_solve_cluster(const P1System& sys, std::size_t m, std::size_t M,
                                            const FemSolveOptions& opt = {}) {
    if (m < 1 || M < m) throw ConfigError("fem_solve_cluster: invalid cluster indices");
    const std::size_t n = sys.interior_count();
    if (M + 1 > n) throw ConfigError("fem_solve_cluster: cluster exceeds interior dof count");
    const std::size_t want = M + 1;

    FemClusterSolution out;
    out.basis.ambient_dim = n;
    out.basis.vectors = Matrix<double>(n, M - m + 1);
    const CsrMatrix* mass = &sys.mass;
    out.basis.metric = [mass](const double* x, double* y) { mass->apply(x, y); };

    if (n <= opt.dense_limit) {
        auto k = sys.stiffness.to_dense();
        auto b = sys.mass.to_dense();
        auto eig = linalg::dense_eig(std::move(k), std::move(b));
        out.lambda_low.assign(eig.values.begin(), eig.values.begin() + want);
        for (std::size_t j = 0; j < M - m + 1; ++j)
            for (std::size_t i = 0; i < n; ++i)
                out.basis.vectors(i, j) = eig.vectors(i, m - 1 + j);
    } else {
        linalg::ApplyFn ka = [&](const double* x, double* y) { sys.stiffness.apply(x, y); };
        linalg::ApplyFn ma = [&](const double* x, double* y) { sys.mass.apply(x, y); };
        linalg::PartialEigOptions peo;
        peo.tol = opt.tol;
        peo.seed = opt.seed;
        peo.max_iterations = opt.max_iterations;
        peo.initial_guess = opt.warm_start;
        peo.diag_b = sys.mass.diagonal();
        auto r = linalg::partial_eig(n, ka, ma, want, peo);
        out.lambda_low = r.values;
        for (std::size_t j = 0; j < M - m + 1; ++j)
            for (std::size_t i = 0; i < n; ++i) out.basis.vectors(i, j) = r.vectors(i, m - 1 + j);
    }

    // Rayleigh identity check per returned pair
    std::vector<double> v(n), kv(n), mv(n);
    for (std::size_t j = 0; j < M - m + 1; ++j) {
        for (std::size_t i = 0; i < n; ++i) v[i] = out.basis.vectors(i, j);
        sys.stiffness.apply(v.data(), kv.data());
        sys.mass.apply(v.data(), mv.data());
        double vkv = 0, vmv = 0;
        for (std::size_t i = 0; i < n; ++i) {
            vkv += v[i] * kv[i];
            vmv += v[i] * mv[i];
        }
        const double lambda = out.lambda_low[m - 1 + j];
        if (std::abs(vkv / vmv - lambda) > 1e-9 * std::abs(lambda))
            throw NoConvergence("fem_solve_cluster: Rayleigh identity violated");
    }

    out.cluster.m = m;
    out.cluster.M = M;
    out.cluster.values.assign(out.lambda_low.begin() + m - 1, out.lambda_low.begin() + M);
    out.cluster.validate();
    return out;
}

} // namespace eigencert::fem
