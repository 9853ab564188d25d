#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "eigencert/core/matrix.hpp"
#include "eigencert/fem/mesh.hpp"
#include "eigencert/fem/quadrature.hpp"
#include "eigencert/linalg/lu.hpp"

namespace eigencert::fem {

// Degree-1 Raviart-Thomas-Nedelec element on one triangle. Eight degrees of
// freedom: two normal moments per edge (weights 1 and 2s-1 along the globally
// oriented edge) and two interior moments against the coordinate directions.
// The monomial basis lives in centroid-centered, diameter-scaled coordinates
// to keep the dof matrix well conditioned on fine meshes.
//
// Local dof order: (edge opposite v0: const, linear), (edge opp v1: ...),
// (edge opp v2: ...), interior x, interior y.
struct Rt1Element {
    double xc = 0, yc = 0, s = 1;  // local frame
    Matrix<double> coeff;          // 8x8, column i = monomial coefficients of basis i

    // monomial fields in local coordinates
    static void monomial(int j, double lx, double ly, double& vx, double& vy) {
        switch (j) {
            case 0: vx = 1; vy = 0; break;
            case 1: vx = lx; vy = 0; break;
            case 2: vx = ly; vy = 0; break;
            case 3: vx = 0; vy = 1; break;
            case 4: vx = 0; vy = lx; break;
            case 5: vx = 0; vy = ly; break;
            case 6: vx = lx * lx; vy = lx * ly; break;
            default: vx = lx * ly; vy = ly * ly; break;
        }
    }

    double monomial_div(int j, double lx, double ly) const {
        switch (j) {
            case 1: return 1.0 / s;
            case 5: return 1.0 / s;
            case 6: return 3.0 * lx / s;
            case 7: return 3.0 * ly / s;
            default: return 0.0;
        }
    }

    void value(std::size_t i, double x, double y, double& vx, double& vy) const {
        const double lx = (x - xc) / s, ly = (y - yc) / s;
        vx = 0;
        vy = 0;
        for (int j = 0; j < 8; ++j) {
            double bx, by;
            monomial(j, lx, ly, bx, by);
            vx += coeff(j, i) * bx;
            vy += coeff(j, i) * by;
        }
    }

    double divergence(std::size_t i, double x, double y) const {
        const double lx = (x - xc) / s, ly = (y - yc) / s;
        double d = 0;
        for (int j = 0; j < 8; ++j) d += coeff(j, i) * monomial_div(j, lx, ly);
        return d;
    }
};

// Build the nodal basis by inverting the dof matrix. Edge orientations are
// global (low vertex id to high), so shared-edge dofs match across elements.
inline Rt1Element build_rt1_element(const TriMesh& mesh, std::size_t t) {
    Rt1Element el;
    const auto& tri = mesh.triangles[t];
    const Point& p0 = mesh.vertices[tri[0]];
    const Point& p1 = mesh.vertices[tri[1]];
    const Point& p2 = mesh.vertices[tri[2]];
    el.xc = (p0[0] + p1[0] + p2[0]) / 3.0;
    el.yc = (p0[1] + p1[1] + p2[1]) / 3.0;
    double d01 = std::hypot(p1[0] - p0[0], p1[1] - p0[1]);
    double d12 = std::hypot(p2[0] - p1[0], p2[1] - p1[1]);
    double d20 = std::hypot(p0[0] - p2[0], p0[1] - p2[1]);
    el.s = std::max({d01, d12, d20});

    Matrix<double> dmat(8, 8);
    // 3-point Gauss-Legendre on [0,1]
    static const double gl_x[3] = {0.1127016653792583, 0.5, 0.8872983346207417};
    static const double gl_w[3] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};

    for (int e = 0; e < 3; ++e) {
        std::size_t a = tri[(e + 1) % 3], b = tri[(e + 2) % 3];
        if (a > b) std::swap(a, b);  // global orientation
        const Point& pa = mesh.vertices[a];
        const Point& pb = mesh.vertices[b];
        const double len = std::hypot(pb[0] - pa[0], pb[1] - pa[1]);
        const double tx = (pb[0] - pa[0]) / len, ty = (pb[1] - pa[1]) / len;
        const double nx = ty, ny = -tx;
        for (int j = 0; j < 8; ++j) {
            double m0 = 0, m1 = 0;
            for (int q = 0; q < 3; ++q) {
                const double sx = pa[0] + gl_x[q] * (pb[0] - pa[0]);
                const double sy = pa[1] + gl_x[q] * (pb[1] - pa[1]);
                double vx, vy;
                Rt1Element::monomial(j, (sx - el.xc) / el.s, (sy - el.yc) / el.s, vx, vy);
                const double vn = vx * nx + vy * ny;
                m0 += gl_w[q] * vn * len;
                m1 += gl_w[q] * vn * (2.0 * gl_x[q] - 1.0) * len;
            }
            dmat(2 * e + 0, j) = m0;
            dmat(2 * e + 1, j) = m1;
        }
    }
    static const std::vector<QuadPoint> rule = triangle_rule(3);  // degree 5
    std::vector<QuadPoint> phys;
    map_rule(mesh, t, rule, phys);
    for (int j = 0; j < 8; ++j) {
        double ix = 0, iy = 0;
        for (const auto& q : phys) {
            double vx, vy;
            Rt1Element::monomial(j, (q.x - el.xc) / el.s, (q.y - el.yc) / el.s, vx, vy);
            ix += q.w * vx;
            iy += q.w * vy;
        }
        dmat(6, j) = ix;
        dmat(7, j) = iy;
    }
    linalg::Lu<double> lu(dmat);
    el.coeff = lu.inverse();
    return el;
}

// Global RT1 dof layout: two per mesh edge then two per triangle.
inline std::size_t rt1_global_dof_count(const TriMesh& mesh) {
    return 2 * mesh.edge_count() + 2 * mesh.triangle_count();
}

inline std::size_t rt1_edge_dof(const TriMesh& mesh, std::size_t edge, int moment) {
    (void)mesh;
    return 2 * edge + static_cast<std::size_t>(moment);
}

inline std::size_t rt1_interior_dof(const TriMesh& mesh, std::size_t tri, int comp) {
    return 2 * mesh.edge_count() + 2 * tri + static_cast<std::size_t>(comp);
}

} // namespace eigencert::fem
