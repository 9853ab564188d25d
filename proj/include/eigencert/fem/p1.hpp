#pragma once

#include <array>
#include <cstddef>
#include <tuple>
#include <vector>

#include "eigencert/core/sparse.hpp"
#include "eigencert/fem/mesh.hpp"

namespace eigencert::fem {

// P1 gradients are constant per element: grad phi_i = (b_i, c_i).
struct ElementGeometry {
    double area = 0;
    std::array<double, 3> b{}, c{};
};

inline ElementGeometry element_geometry(const TriMesh& mesh, std::size_t t) {
    const auto& tri = mesh.triangles[t];
    const Point& p0 = mesh.vertices[tri[0]];
    const Point& p1 = mesh.vertices[tri[1]];
    const Point& p2 = mesh.vertices[tri[2]];
    ElementGeometry g;
    g.area = mesh.area(t);
    const double inv = 1.0 / (2.0 * g.area);
    g.b = {(p1[1] - p2[1]) * inv, (p2[1] - p0[1]) * inv, (p0[1] - p1[1]) * inv};
    g.c = {(p2[0] - p1[0]) * inv, (p0[0] - p2[0]) * inv, (p1[0] - p0[0]) * inv};
    return g;
}

// Conforming P1 system with Dirichlet rows/columns eliminated. ndof reports
// the total vertex count (the convention of the experiment tables); the
// interior dof count is the actual system size.
struct P1System {
    CsrMatrix stiffness;  // interior x interior
    CsrMatrix mass;
    std::vector<std::ptrdiff_t> vertex_to_dof;  // -1 on the boundary
    std::vector<std::size_t> dof_to_vertex;
    std::size_t ndof_total = 0;  // all mesh vertices

    std::size_t interior_count() const { return dof_to_vertex.size(); }
};

inline P1System assemble_p1(const TriMesh& mesh) {
    P1System sys;
    sys.ndof_total = mesh.vertex_count();
    sys.vertex_to_dof.assign(mesh.vertex_count(), -1);
    for (std::size_t v = 0; v < mesh.vertex_count(); ++v) {
        if (!mesh.boundary_vertex[v]) {
            sys.vertex_to_dof[v] = static_cast<std::ptrdiff_t>(sys.dof_to_vertex.size());
            sys.dof_to_vertex.push_back(v);
        }
    }
    std::vector<std::tuple<std::size_t, std::size_t, double>> kt, mt;
    kt.reserve(9 * mesh.triangle_count());
    mt.reserve(9 * mesh.triangle_count());
    for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
        const auto g = element_geometry(mesh, t);
        if (g.area < 1e-14) throw DegenerateTriangle("assemble_p1: triangle " + std::to_string(t));
        const auto& tri = mesh.triangles[t];
        for (int i = 0; i < 3; ++i) {
            const std::ptrdiff_t di = sys.vertex_to_dof[tri[i]];
            if (di < 0) continue;
            for (int j = 0; j < 3; ++j) {
                const std::ptrdiff_t dj = sys.vertex_to_dof[tri[j]];
                if (dj < 0) continue;
                const double kij = g.area * (g.b[i] * g.b[j] + g.c[i] * g.c[j]);
                const double mij = g.area / 12.0 * ((i == j) ? 2.0 : 1.0);
                kt.emplace_back(di, dj, kij);
                mt.emplace_back(di, dj, mij);
            }
        }
    }
    const std::size_t n = sys.dof_to_vertex.size();
    sys.stiffness = CsrMatrix::from_triplets(n, n, std::move(kt), true);
    sys.mass = CsrMatrix::from_triplets(n, n, std::move(mt), true);
    return sys;
}

// Extend an interior-dof vector by zero to all mesh vertices.
inline std::vector<double> extend_to_vertices(const P1System& sys, const double* interior) {
    std::vector<double> full(sys.ndof_total, 0.0);
    for (std::size_t d = 0; d < sys.interior_count(); ++d)
        full[sys.dof_to_vertex[d]] = interior[d];
    return full;
}

// Element matrices without Dirichlet elimination, for the structural checks
// (zero row sums of the stiffness, total mass = |Omega|).
inline std::pair<CsrMatrix, CsrMatrix> assemble_p1_full(const TriMesh& mesh) {
    std::vector<std::tuple<std::size_t, std::size_t, double>> kt, mt;
    for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
        const auto g = element_geometry(mesh, t);
        const auto& tri = mesh.triangles[t];
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                kt.emplace_back(tri[i], tri[j], g.area * (g.b[i] * g.b[j] + g.c[i] * g.c[j]));
                mt.emplace_back(tri[i], tri[j], g.area / 12.0 * ((i == j) ? 2.0 : 1.0));
            }
    }
    const std::size_t n = mesh.vertex_count();
    return {CsrMatrix::from_triplets(n, n, std::move(kt), true),
            CsrMatrix::from_triplets(n, n, std::move(mt), true)};
}

} // namespace eigencert::fem
