#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "eigencert/fem/interpolate.hpp"
#include "eigencert/fem/mesh.hpp"
#include "eigencert/fem/p1.hpp"
#include "eigencert/fem/quadrature.hpp"
#include "eigencert/fem/solve.hpp"
#include "eigencert/spectral/distances.hpp"
#include "eigencert/spectral/subspace.hpp"

namespace eigencert::fem {

struct FemErrors {
    double err_lambda = 0.0;
    double err_h1 = 0.0;
    double err_l2 = 0.0;
};

// Dirichlet Laplacian modes of the unit square: lambda = pi^2 (k^2 + l^2),
// u = 2 sin(k pi x) sin(l pi y), ascending with deterministic tie order.
struct SquareMode {
    int k = 1, l = 1;
    double lambda = 0.0;
};

inline std::vector<SquareMode> square_modes(std::size_t count) {
    const double pi2 = 3.14159265358979323846 * 3.14159265358979323846;
    std::vector<SquareMode> modes;
    int reach = 1;
    while (static_cast<std::size_t>(reach) * reach < count + 1) ++reach;
    reach += 2;
    for (int k = 1; k <= reach; ++k)
        for (int l = 1; l <= reach; ++l) modes.push_back({k, l, pi2 * (k * k + l * l)});
    std::sort(modes.begin(), modes.end(), [](const SquareMode& a, const SquareMode& b) {
        if (a.lambda != b.lambda) return a.lambda < b.lambda;
        return a.k < b.k;
    });
    modes.resize(count);
    return modes;
}

// Errors against the analytic unit-square eigenpairs; overlaps by
// per-element Gauss quadrature of degree 11.
inline FemErrors fem_reference_errors_analytic(const TriMesh& mesh, const P1System& sys,
                                               const FemClusterSolution& sol) {
    const std::size_t j = sol.cluster.size();
    auto modes = square_modes(sol.cluster.M);
    std::vector<double> lambda_exact(j);
    for (std::size_t c = 0; c < j; ++c) lambda_exact[c] = modes[sol.cluster.m - 1 + c].lambda;

    // full-vertex fields of the discrete cluster
    std::vector<std::vector<double>> u_full(j);
    std::vector<double> interior(sys.interior_count());
    for (std::size_t c = 0; c < j; ++c) {
        for (std::size_t i = 0; i < interior.size(); ++i) interior[i] = sol.basis.vectors(i, c);
        u_full[c] = extend_to_vertices(sys, interior.data());
    }

    static const std::vector<QuadPoint> rule = triangle_rule(6);  // degree 11
    std::vector<QuadPoint> phys;
    Matrix<double> m(j, j);
    const double pi = 3.14159265358979323846;
    for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
        const auto& tri = mesh.triangles[t];
        map_rule(mesh, t, rule, phys);
        for (const auto& q : phys) {
            const Point& p0 = mesh.vertices[tri[0]];
            const Point& p1 = mesh.vertices[tri[1]];
            const Point& p2 = mesh.vertices[tri[2]];
            const double det =
                (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]);
            const double l1 =
                ((q.x - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (q.y - p0[1])) / det;
            const double l2 =
                ((p1[0] - p0[0]) * (q.y - p0[1]) - (q.x - p0[0]) * (p1[1] - p0[1])) / det;
            const double lam_vals[3] = {1.0 - l1 - l2, l1, l2};
            for (std::size_t ci = 0; ci < j; ++ci) {
                const auto& mode = modes[sol.cluster.m - 1 + ci];
                const double ue =
                    2.0 * std::sin(mode.k * pi * q.x) * std::sin(mode.l * pi * q.y);
                for (std::size_t cj = 0; cj < j; ++cj) {
                    double uh = 0;
                    for (int v = 0; v < 3; ++v) uh += u_full[cj][tri[v]] * lam_vals[v];
                    m(ci, cj) += q.w * ue * uh;
                }
            }
        }
    }

    if (spectral::smallest_singular_value(m) < 1e-6)
        throw ClusterMismatch("fem analytic reference: overlap nearly rank deficient");

    FemErrors out;
    for (std::size_t c = 0; c < j; ++c)
        out.err_lambda += sol.cluster.values[c] - lambda_exact[c];
    out.err_l2 = spectral::dm_l2_distance(m);
    out.err_h1 = spectral::dm_energy_distance(lambda_exact, sol.cluster.values, m);
    return out;
}

// Errors against a finer nested solve: the coarse vectors prolong exactly,
// overlaps use the fine mass matrix, the energy side the conforming
// substitution. An optional external eigenvalue reference replaces the fine
// eigenvalues in Err_lambda (high-precision published values).
inline FemErrors fem_reference_errors_fine(const TriMesh& coarse_mesh, const P1System& coarse_sys,
                                           const FemClusterSolution& sol,
                                           const TriMesh& fine_mesh, const P1System& fine_sys,
                                           const FemClusterSolution& ref,
                                           const std::optional<std::vector<double>>&
                                               exact_lambda = std::nullopt) {
    if (sol.cluster.m != ref.cluster.m || sol.cluster.M != ref.cluster.M)
        throw ClusterMismatch("fem fine reference: cluster indices differ");
    const std::size_t j = sol.cluster.size();

    Matrix<double> prolonged =
        interpolate_p1(coarse_mesh, coarse_sys, sol.basis.vectors, fine_mesh, fine_sys);
    const std::size_t n = fine_sys.interior_count();
    Matrix<double> m(j, j);
    std::vector<double> col(n), mcol(n);
    for (std::size_t cj = 0; cj < j; ++cj) {
        for (std::size_t i = 0; i < n; ++i) col[i] = prolonged(i, cj);
        fine_sys.mass.apply(col.data(), mcol.data());
        for (std::size_t ci = 0; ci < j; ++ci) {
            double s = 0;
            for (std::size_t i = 0; i < n; ++i) s += ref.basis.vectors(i, ci) * mcol[i];
            m(ci, cj) = s;
        }
    }
    if (spectral::smallest_singular_value(m) < 1e-6)
        throw ClusterMismatch("fem fine reference: overlap nearly rank deficient");

    FemErrors out;
    for (std::size_t c = 0; c < j; ++c) {
        const double lref =
            exact_lambda ? (*exact_lambda)[c] : ref.cluster.values[c];
        out.err_lambda += sol.cluster.values[c] - lref;
    }
    out.err_l2 = spectral::dm_l2_distance(m);
    out.err_h1 = spectral::dm_energy_distance(ref.cluster.values, sol.cluster.values, m);
    return out;
}

} // namespace eigencert::fem
