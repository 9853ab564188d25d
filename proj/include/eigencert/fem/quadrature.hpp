#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "eigencert/fem/mesh.hpp"
#include "eigencert/linalg/dense_eig.hpp"

namespace eigencert::fem {

struct QuadPoint {
    double x = 0, y = 0, w = 0;  // reference triangle (0,0)-(1,0)-(0,1)
};

namespace detail {

// Golub-Welsch nodes/weights from a Jacobi recurrence.
inline void golub_welsch(const std::vector<double>& alpha, const std::vector<double>& beta,
                         double mu0, std::vector<double>& nodes, std::vector<double>& weights) {
    const std::size_t n = alpha.size();
    Matrix<double> j(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        j(i, i) = alpha[i];
        if (i + 1 < n) {
            const double b = std::sqrt(beta[i + 1]);
            j(i, i + 1) = b;
            j(i + 1, i) = b;
        }
    }
    auto eig = linalg::dense_eig(j);
    nodes = eig.values;
    weights.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double v0 = eig.vectors(0, i);
        weights[i] = mu0 * v0 * v0;
    }
}

// Gauss-Legendre on [0, 1].
inline void gauss_legendre01(std::size_t n, std::vector<double>& nodes,
                             std::vector<double>& weights) {
    std::vector<double> alpha(n, 0.0), beta(n, 0.0);
    for (std::size_t k = 1; k < n; ++k) {
        const double kk = static_cast<double>(k);
        beta[k] = kk * kk / ((2 * kk - 1) * (2 * kk + 1));
    }
    golub_welsch(alpha, beta, 2.0, nodes, weights);
    for (std::size_t i = 0; i < n; ++i) {
        nodes[i] = 0.5 * (nodes[i] + 1.0);
        weights[i] *= 0.5;
    }
}

// Gauss-Jacobi with weight (1 - x) on [0, 1] (conical factor).
inline void gauss_jacobi10(std::size_t n, std::vector<double>& nodes,
                           std::vector<double>& weights) {
    // recurrence for Jacobi polynomials P^{(1,0)} on [-1, 1]
    std::vector<double> alpha(n, 0.0), beta(n, 0.0);
    const double a = 1.0, b = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double kk = static_cast<double>(k);
        const double den = (2 * kk + a + b) * (2 * kk + a + b + 2);
        alpha[k] = (b * b - a * a) / ((den == 0.0) ? 1.0 : den);
        if (k == 0) continue;
        const double num = 4.0 * kk * (kk + a) * (kk + b) * (kk + a + b);
        const double d2 = (2 * kk + a + b - 1) * std::pow(2 * kk + a + b, 2.0) *
                          (2 * kk + a + b + 1);
        beta[k] = num / d2;
    }
    // mu0 = integral of (1-x) over [-1,1] with weight (1-x)^1 (1+x)^0 -> 2^{a+b+1} B(a+1,b+1)
    const double mu0 = 2.0;
    golub_welsch(alpha, beta, mu0, nodes, weights);
    for (std::size_t i = 0; i < n; ++i) {
        // map [-1,1] -> [0,1] with weight (1-t)/2 * ... : w dt transforms by 1/2 per factor
        nodes[i] = 0.5 * (nodes[i] + 1.0);
        weights[i] *= 0.25;  // dx/dt = 1/2 and the weight (1-x) gains another 1/2
    }
}

} // namespace detail

// Conical-product rule on the reference triangle, exact for total degree
// <= 2k - 1.
inline std::vector<QuadPoint> triangle_rule(std::size_t k) {
    std::vector<double> xn, xw, yn, yw;
    detail::gauss_legendre01(k, xn, xw);
    detail::gauss_jacobi10(k, yn, yw);
    std::vector<QuadPoint> pts;
    pts.reserve(k * k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) {
            QuadPoint q;
            q.x = yn[j];                  // carries the (1-x) factor
            q.y = xn[i] * (1.0 - yn[j]);  // collapsed coordinate
            q.w = yw[j] * xw[i];
            pts.push_back(q);
        }
    return pts;
}

// physical coordinates and scaled weights on a given triangle
inline void map_rule(const TriMesh& mesh, std::size_t t, const std::vector<QuadPoint>& ref,
                     std::vector<QuadPoint>& out) {
    const auto& tri = mesh.triangles[t];
    const Point& p0 = mesh.vertices[tri[0]];
    const Point& p1 = mesh.vertices[tri[1]];
    const Point& p2 = mesh.vertices[tri[2]];
    const double two_area = 2.0 * mesh.area(t);
    out.resize(ref.size());
    for (std::size_t i = 0; i < ref.size(); ++i) {
        const double l0 = 1.0 - ref[i].x - ref[i].y;
        out[i].x = l0 * p0[0] + ref[i].x * p1[0] + ref[i].y * p2[0];
        out[i].y = l0 * p0[1] + ref[i].x * p1[1] + ref[i].y * p2[1];
        out[i].w = ref[i].w * two_area;
    }
}

} // namespace eigencert::fem
