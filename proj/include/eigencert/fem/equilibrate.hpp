#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <vector>

#include "eigencert/fem/mesh.hpp"
#include "eigencert/fem/p1.hpp"
#include "eigencert/fem/rt1.hpp"
#include "eigencert/linalg/saddle.hpp"

namespace eigencert::fem {

// Vertex patch bookkeeping for the local equilibration problems: the local
// flux space has zero normal trace on the patch boundary away from the
// domain boundary; the local pressure space is zero-mean for interior
// vertices (one dof dropped, checked a posteriori) and unconstrained for
// boundary vertices.
struct VertexPatch {
    std::size_t center = 0;
    bool boundary = false;
    std::vector<std::size_t> tris;
    std::vector<std::size_t> free_edges;
    std::vector<std::size_t> flux_dofs_global;
    std::size_t n_flux = 0;
    std::size_t n_pressure = 0;  // kept local Q dofs
    std::vector<std::array<std::ptrdiff_t, 8>> tri_flux_map;

    static constexpr std::size_t rt1_dofs_per_tri = 8;
    static constexpr std::size_t q_dofs_per_tri = 3;
};

inline std::vector<std::vector<std::size_t>> vertex_to_triangles(const TriMesh& mesh) {
    std::vector<std::vector<std::size_t>> adj(mesh.vertex_count());
    for (std::size_t t = 0; t < mesh.triangle_count(); ++t)
        for (int i = 0; i < 3; ++i) adj[mesh.triangles[t][i]].push_back(t);
    return adj;
}

inline VertexPatch build_vertex_patch(const TriMesh& mesh, std::size_t vertex,
                                      const std::vector<std::size_t>& patch_tris) {
    VertexPatch patch;
    patch.center = vertex;
    patch.boundary = mesh.boundary_vertex[vertex];
    patch.tris = patch_tris;
    std::map<std::size_t, int> edge_use;
    for (std::size_t t : patch.tris)
        for (int e = 0; e < 3; ++e) edge_use[mesh.tri_edges[t][e]] += 1;
    std::map<std::size_t, std::ptrdiff_t> edge_local;
    for (const auto& [edge, uses] : edge_use) {
        const bool on_patch_boundary = (uses == 1);
        // interior vertex: zero normal trace on all of the patch boundary;
        // boundary vertex: only away from the domain boundary
        const bool constrained =
            on_patch_boundary && (!patch.boundary || !mesh.boundary_edge[edge]);
        if (!constrained) {
            edge_local[edge] = static_cast<std::ptrdiff_t>(patch.free_edges.size());
            patch.free_edges.push_back(edge);
        }
    }
    patch.n_flux = 2 * patch.free_edges.size() + 2 * patch.tris.size();
    patch.flux_dofs_global.resize(patch.n_flux);
    for (std::size_t le = 0; le < patch.free_edges.size(); ++le) {
        patch.flux_dofs_global[2 * le + 0] = rt1_edge_dof(mesh, patch.free_edges[le], 0);
        patch.flux_dofs_global[2 * le + 1] = rt1_edge_dof(mesh, patch.free_edges[le], 1);
    }
    for (std::size_t lt = 0; lt < patch.tris.size(); ++lt) {
        patch.flux_dofs_global[2 * patch.free_edges.size() + 2 * lt + 0] =
            rt1_interior_dof(mesh, patch.tris[lt], 0);
        patch.flux_dofs_global[2 * patch.free_edges.size() + 2 * lt + 1] =
            rt1_interior_dof(mesh, patch.tris[lt], 1);
    }
    patch.tri_flux_map.resize(patch.tris.size());
    for (std::size_t lt = 0; lt < patch.tris.size(); ++lt) {
        const std::size_t t = patch.tris[lt];
        for (int e = 0; e < 3; ++e) {
            auto it = edge_local.find(mesh.tri_edges[t][e]);
            for (int mmt = 0; mmt < 2; ++mmt)
                patch.tri_flux_map[lt][2 * e + mmt] =
                    (it == edge_local.end()) ? -1 : 2 * it->second + mmt;
        }
        patch.tri_flux_map[lt][6] =
            static_cast<std::ptrdiff_t>(2 * patch.free_edges.size() + 2 * lt + 0);
        patch.tri_flux_map[lt][7] =
            static_cast<std::ptrdiff_t>(2 * patch.free_edges.size() + 2 * lt + 1);
    }
    const std::size_t q_all = 3 * patch.tris.size();
    patch.n_pressure = patch.boundary ? q_all : q_all - 1;
    return patch;
}

inline void hat_gradient(const TriMesh& mesh, std::size_t t, std::size_t vertex, double& gx,
                         double& gy) {
    const auto g = element_geometry(mesh, t);
    const auto& tri = mesh.triangles[t];
    for (int i = 0; i < 3; ++i)
        if (tri[i] == vertex) {
            gx = g.b[i];
            gy = g.c[i];
            return;
        }
    gx = gy = 0;
}

// Assembled patch blocks shared by every cluster member: the flux mass
// matrix, the full divergence-constraint block (all 3T pressure rows), and
// per-member right-hand sides. All quadrature is degree-5 exact.
struct PatchSystem {
    Matrix<double> amat;                  // n_flux x n_flux
    Matrix<double> bmat_full;             // (3 T) x n_flux
    std::vector<std::vector<double>> f;   // per member, n_flux
    std::vector<std::vector<double>> g;   // per member, 3 T
};

inline PatchSystem assemble_patch(const TriMesh& mesh, const std::vector<Rt1Element>& elements,
                                  const VertexPatch& patch,
                                  const std::vector<std::vector<double>>& u_vertex,
                                  const std::vector<double>& lambda) {
    const std::size_t nsol = u_vertex.size();
    const std::size_t nv = patch.n_flux;
    const std::size_t nq_all = 3 * patch.tris.size();
    PatchSystem sys;
    sys.amat = Matrix<double>(nv, nv);
    sys.bmat_full = Matrix<double>(nq_all, nv);
    sys.f.assign(nsol, std::vector<double>(nv, 0.0));
    sys.g.assign(nsol, std::vector<double>(nq_all, 0.0));

    static const std::vector<QuadPoint> rule = triangle_rule(3);  // degree-5 exact
    std::vector<QuadPoint> phys;

    for (std::size_t lt = 0; lt < patch.tris.size(); ++lt) {
        const std::size_t t = patch.tris[lt];
        const Rt1Element& el = elements[t];
        const auto geo = element_geometry(mesh, t);
        const auto& tri = mesh.triangles[t];
        map_rule(mesh, t, rule, phys);

        double hatx, haty;
        hat_gradient(mesh, t, patch.center, hatx, haty);
        std::vector<std::array<double, 2>> grad_u(nsol);
        for (std::size_t s = 0; s < nsol; ++s) {
            double ux = 0, uy = 0;
            for (int i = 0; i < 3; ++i) {
                ux += u_vertex[s][tri[i]] * geo.b[i];
                uy += u_vertex[s][tri[i]] * geo.c[i];
            }
            grad_u[s] = {ux, uy};
        }

        for (const auto& q : phys) {
            std::array<std::array<double, 2>, 8> val{};
            std::array<double, 8> dv{};
            for (int i = 0; i < 8; ++i) {
                el.value(i, q.x, q.y, val[i][0], val[i][1]);
                dv[i] = el.divergence(i, q.x, q.y);
            }
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
            double psi = 0;
            for (int i = 0; i < 3; ++i)
                if (tri[i] == patch.center) psi = lam_vals[i];

            for (int i = 0; i < 8; ++i) {
                const std::ptrdiff_t gi = patch.tri_flux_map[lt][i];
                if (gi < 0) continue;
                for (int j = 0; j <= i; ++j) {
                    const std::ptrdiff_t gj = patch.tri_flux_map[lt][j];
                    if (gj < 0) continue;
                    const double v = q.w * (val[i][0] * val[j][0] + val[i][1] * val[j][1]);
                    sys.amat(gi, gj) += v;
                    if (gi != gj) sys.amat(gj, gi) += v;
                }
                for (std::size_t s = 0; s < nsol; ++s)
                    sys.f[s][gi] -=
                        q.w * psi * (grad_u[s][0] * val[i][0] + grad_u[s][1] * val[i][1]);
            }
            for (int qi = 0; qi < 3; ++qi) {
                const std::size_t row = 3 * lt + qi;
                for (std::size_t s = 0; s < nsol; ++s) {
                    double uval = 0;
                    for (int i = 0; i < 3; ++i) uval += u_vertex[s][tri[i]] * lam_vals[i];
                    const double rhs_val = lambda[s] * uval * psi -
                                           (grad_u[s][0] * hatx + grad_u[s][1] * haty);
                    sys.g[s][row] += q.w * rhs_val * lam_vals[qi];
                }
                for (int j = 0; j < 8; ++j) {
                    const std::ptrdiff_t gj = patch.tri_flux_map[lt][j];
                    if (gj < 0) continue;
                    sys.bmat_full(row, gj) += q.w * dv[j] * lam_vals[qi];
                }
            }
        }
    }
    return sys;
}

struct EquilibratedFlux {
    std::vector<double> dofs;  // global RT1 coefficients
};

struct EquilibrateOptions {
    // Interior-patch compatibility guard, relative to the constraint data.
    // The defect equals the discrete residual against the hat function, so
    // iterative eigensolves need a guard at their own residual scale.
    double compat_tol = 1e-10;
};

struct EquilibrateReport {
    double worst_compatibility = 0.0;     // scaled interior-patch mean defect
    double worst_dropped_residual = 0.0;  // scaled dropped-equation residual
};

// Equilibrated fluxes for a whole cluster at once: one patch factorization
// serves every eigenvector. u_vertex[j] is the j-th P1 field on all vertices
// (zero on the boundary), lambda[j] its eigenvalue. Accumulation runs in
// ascending vertex order.
inline std::vector<EquilibratedFlux> equilibrate_flux_cluster(
    const TriMesh& mesh, const std::vector<std::vector<double>>& u_vertex,
    const std::vector<double>& lambda, const std::vector<Rt1Element>& elements,
    EquilibrateReport* report = nullptr, const EquilibrateOptions& opt = {}) {
    const std::size_t nsol = u_vertex.size();
    if (lambda.size() != nsol) throw DimensionMismatch("equilibrate_flux: values/vectors");
    for (const auto& u : u_vertex)
        if (u.size() != mesh.vertex_count())
            throw DimensionMismatch("equilibrate_flux: vertex field size");

    std::vector<EquilibratedFlux> fluxes(nsol);
    for (auto& f : fluxes) f.dofs.assign(rt1_global_dof_count(mesh), 0.0);
    EquilibrateReport rep;

    const auto adjacency = vertex_to_triangles(mesh);

    for (std::size_t a = 0; a < mesh.vertex_count(); ++a) {
        VertexPatch patch = build_vertex_patch(mesh, a, adjacency[a]);
        const std::size_t nv = patch.n_flux;
        const std::size_t nq_all = 3 * patch.tris.size();
        const std::size_t nq = patch.n_pressure;
        PatchSystem psys = assemble_patch(mesh, elements, patch, u_vertex, lambda);

        const std::size_t nsys = nv + nq;
        Matrix<double> kkt(nsys, nsys);
        for (std::size_t i = 0; i < nv; ++i)
            for (std::size_t j = 0; j < nv; ++j) kkt(i, j) = psys.amat(i, j);
        for (std::size_t i = 0; i < nq; ++i)
            for (std::size_t j = 0; j < nv; ++j) {
                kkt(nv + i, j) = psys.bmat_full(i, j);
                kkt(j, nv + i) = psys.bmat_full(i, j);
            }
        linalg::Ldlt fact(kkt);

        double patch_area = 0.0;
        for (std::size_t t : patch.tris) patch_area += mesh.area(t);

        for (std::size_t s = 0; s < nsol; ++s) {
            double g_scale = 1e-300;
            for (double v : psys.g[s]) g_scale = std::max(g_scale, std::abs(v));
            for (double v : psys.f[s]) g_scale = std::max(g_scale, std::abs(v));
            if (!patch.boundary) {
                double mean = 0.0;
                for (double v : psys.g[s]) mean += v;
                rep.worst_compatibility =
                    std::max(rep.worst_compatibility, std::abs(mean) / g_scale);
                if (std::abs(mean) > opt.compat_tol * g_scale * static_cast<double>(nq_all))
                    throw PatchIncompatible("vertex " + std::to_string(a) + ": mean defect " +
                                            std::to_string(mean / g_scale));
                // remove the incompatible mean (invisible to the zero-mean
                // test space, keeps the dropped equation consistent)
                if (mean != 0.0) {
                    for (std::size_t lt = 0; lt < patch.tris.size(); ++lt) {
                        const double share = mesh.area(patch.tris[lt]) / patch_area;
                        for (int qi = 0; qi < 3; ++qi)
                            psys.g[s][3 * lt + qi] -= mean * share / 3.0;
                    }
                }
            }

            std::vector<double> rhs(nsys, 0.0);
            for (std::size_t i = 0; i < nv; ++i) rhs[i] = psys.f[s][i];
            for (std::size_t i = 0; i < nq; ++i) rhs[nv + i] = psys.g[s][i];
            auto x = fact.solve(rhs);
            // one refinement step
            {
                std::vector<double> r(nsys);
                for (std::size_t i = 0; i < nsys; ++i) {
                    double acc = rhs[i];
                    const double* row = kkt.row(i);
                    for (std::size_t j = 0; j < nsys; ++j) acc -= row[j] * x[j];
                    r[i] = acc;
                }
                auto dx = fact.solve(r);
                for (std::size_t i = 0; i < nsys; ++i) x[i] += dx[i];
            }

            if (!patch.boundary) {
                // dropped pressure equation must hold a posteriori
                double dropped = -psys.g[s][nq_all - 1];
                for (std::size_t jj = 0; jj < nv; ++jj)
                    dropped += psys.bmat_full(nq_all - 1, jj) * x[jj];
                rep.worst_dropped_residual =
                    std::max(rep.worst_dropped_residual, std::abs(dropped) / g_scale);
                if (std::abs(dropped) > 1e-8 * g_scale * static_cast<double>(nq_all))
                    throw PatchIncompatible("vertex " + std::to_string(a) +
                                            ": dropped equation residual");
            }

            for (std::size_t i = 0; i < nv; ++i)
                fluxes[s].dofs[patch.flux_dofs_global[i]] += x[i];
        }
    }
    if (report) *report = rep;
    return fluxes;
}

inline EquilibratedFlux equilibrate_flux(const TriMesh& mesh,
                                         const std::vector<double>& u_vertex, double lambda,
                                         const std::vector<Rt1Element>& elements,
                                         const EquilibrateOptions& opt = {}) {
    auto v = equilibrate_flux_cluster(mesh, {u_vertex}, {lambda}, elements, nullptr, opt);
    return std::move(v.front());
}

inline std::vector<Rt1Element> build_all_rt1(const TriMesh& mesh) {
    std::vector<Rt1Element> els;
    els.reserve(mesh.triangle_count());
    for (std::size_t t = 0; t < mesh.triangle_count(); ++t)
        els.push_back(build_rt1_element(mesh, t));
    return els;
}

// Divergence of the global flux restricted to one element, at a point.
inline double flux_divergence_at(const TriMesh& mesh, const std::vector<Rt1Element>& els,
                                 const EquilibratedFlux& flux, std::size_t t, double x,
                                 double y) {
    double d = 0;
    for (int e = 0; e < 3; ++e) {
        const std::size_t edge = mesh.tri_edges[t][e];
        for (int mmt = 0; mmt < 2; ++mmt)
            d += flux.dofs[rt1_edge_dof(mesh, edge, mmt)] * els[t].divergence(2 * e + mmt, x, y);
    }
    for (int c = 0; c < 2; ++c)
        d += flux.dofs[rt1_interior_dof(mesh, t, c)] * els[t].divergence(6 + c, x, y);
    return d;
}

// Value of the global flux on one element at a point.
inline void flux_value_at(const TriMesh& mesh, const std::vector<Rt1Element>& els,
                          const EquilibratedFlux& flux, std::size_t t, double x, double y,
                          double& vx, double& vy) {
    vx = vy = 0;
    double bx, by;
    for (int e = 0; e < 3; ++e) {
        const std::size_t edge = mesh.tri_edges[t][e];
        for (int mmt = 0; mmt < 2; ++mmt) {
            const double c = flux.dofs[rt1_edge_dof(mesh, edge, mmt)];
            if (c == 0.0) continue;
            els[t].value(2 * e + mmt, x, y, bx, by);
            vx += c * bx;
            vy += c * by;
        }
    }
    for (int comp = 0; comp < 2; ++comp) {
        const double c = flux.dofs[rt1_interior_dof(mesh, t, comp)];
        if (c == 0.0) continue;
        els[t].value(6 + comp, x, y, bx, by);
        vx += c * bx;
        vy += c * by;
    }
}

// max over elements and local P1 weights of the moment defect of
// div sigma - lambda u, scaled by the global field magnitude; the discrete
// divergence identity check.
inline double flux_divergence_defect(const TriMesh& mesh, const std::vector<Rt1Element>& els,
                                     const EquilibratedFlux& flux,
                                     const std::vector<double>& u_vertex, double lambda) {
    static const std::vector<QuadPoint> rule = triangle_rule(3);
    std::vector<QuadPoint> phys;
    double scale = 1e-300;
    for (double v : u_vertex) scale = std::max(scale, std::abs(lambda * v));
    double worst = 0.0;
    for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
        const auto& tri = mesh.triangles[t];
        map_rule(mesh, t, rule, phys);
        std::array<double, 3> moments{};
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
            const double div_sigma = flux_divergence_at(mesh, els, flux, t, q.x, q.y);
            double uval = 0;
            for (int i = 0; i < 3; ++i) uval += u_vertex[tri[i]] * lam_vals[i];
            const double mismatch = div_sigma - lambda * uval;
            for (int qi = 0; qi < 3; ++qi) moments[qi] += q.w * mismatch * lam_vals[qi];
        }
        for (int qi = 0; qi < 3; ++qi)
            worst = std::max(worst, std::abs(moments[qi]) / (scale * mesh.area(t)));
    }
    return worst;
}

} // namespace eigencert::fem
