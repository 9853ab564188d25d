#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <utility>
#include <vector>

#include "eigencert/core/error.hpp"

namespace eigencert::fem {

using Point = std::array<double, 2>;

// Conforming triangulation. Triangles store (peak, a, b) with the refinement
// edge (a, b) opposite the peak, positively oriented. Meshes are immutable
// after construction; refinement returns a new mesh.
struct TriMesh {
    std::vector<Point> vertices;
    std::vector<std::array<std::size_t, 3>> triangles;
    std::vector<bool> boundary_vertex;
    std::vector<int> generation;

    // derived connectivity (filled by finalize)
    std::vector<std::array<std::size_t, 3>> tri_edges;      // edge ids, edge e opposite vertex e
    std::vector<std::array<std::size_t, 2>> edge_vertices;  // ordered (min, max)
    std::vector<std::array<std::ptrdiff_t, 2>> edge_tris;   // adjacent triangles (-1 if none)
    std::vector<bool> boundary_edge;
    double max_shape_ratio = 0.0;
    double mesh_size = 0.0;  // max element diameter

    std::size_t vertex_count() const { return vertices.size(); }
    std::size_t triangle_count() const { return triangles.size(); }
    std::size_t edge_count() const { return edge_vertices.size(); }

    double area(std::size_t t) const {
        const auto& tri = triangles[t];
        const Point& p0 = vertices[tri[0]];
        const Point& p1 = vertices[tri[1]];
        const Point& p2 = vertices[tri[2]];
        return 0.5 * ((p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]));
    }

    double total_area() const {
        double s = 0;
        for (std::size_t t = 0; t < triangle_count(); ++t) s += area(t);
        return s;
    }

    void finalize(double kappa = 40.0) {
        tri_edges.assign(triangle_count(), {});
        edge_vertices.clear();
        edge_tris.clear();
        std::map<std::pair<std::size_t, std::size_t>, std::size_t> edge_ids;
        for (std::size_t t = 0; t < triangle_count(); ++t) {
            if (area(t) <= 0.0) throw DegenerateTriangle("triangle " + std::to_string(t));
            const auto& tri = triangles[t];
            for (int e = 0; e < 3; ++e) {
                std::size_t a = tri[(e + 1) % 3], b = tri[(e + 2) % 3];
                if (a > b) std::swap(a, b);
                auto [it, inserted] = edge_ids.try_emplace({a, b}, edge_vertices.size());
                if (inserted) {
                    edge_vertices.push_back({a, b});
                    edge_tris.push_back({-1, -1});
                }
                const std::size_t id = it->second;
                tri_edges[t][e] = id;
                if (edge_tris[id][0] < 0)
                    edge_tris[id][0] = static_cast<std::ptrdiff_t>(t);
                else if (edge_tris[id][1] < 0)
                    edge_tris[id][1] = static_cast<std::ptrdiff_t>(t);
                else
                    throw Error("mesh not conforming: edge shared by three triangles");
            }
        }
        boundary_edge.assign(edge_count(), false);
        boundary_vertex.assign(vertex_count(), false);
        for (std::size_t e = 0; e < edge_count(); ++e) {
            if (edge_tris[e][1] < 0) {
                boundary_edge[e] = true;
                boundary_vertex[edge_vertices[e][0]] = true;
                boundary_vertex[edge_vertices[e][1]] = true;
            }
        }
        if (generation.size() != triangle_count()) generation.assign(triangle_count(), 0);

        max_shape_ratio = 0.0;
        mesh_size = 0.0;
        for (std::size_t t = 0; t < triangle_count(); ++t) {
            const auto& tri = triangles[t];
            double lmax = 0.0, perim = 0.0;
            for (int e = 0; e < 3; ++e) {
                const Point& a = vertices[tri[(e + 1) % 3]];
                const Point& b = vertices[tri[(e + 2) % 3]];
                const double l = std::hypot(a[0] - b[0], a[1] - b[1]);
                lmax = std::max(lmax, l);
                perim += l;
            }
            const double inradius = 2.0 * area(t) / perim;
            max_shape_ratio = std::max(max_shape_ratio, lmax / (2.0 * inradius));
            mesh_size = std::max(mesh_size, lmax);
        }
        if (max_shape_ratio > kappa)
            throw Error("shape regularity ratio " + std::to_string(max_shape_ratio) +
                        " exceeds kappa");
    }
};

namespace detail {

// store (peak, x, y) with positive orientation
inline std::array<std::size_t, 3> oriented(const std::vector<Point>& pts, std::size_t peak,
                                           std::size_t x, std::size_t y) {
    const Point& p0 = pts[peak];
    const Point& p1 = pts[x];
    const Point& p2 = pts[y];
    const double cross =
        (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]);
    if (cross > 0) return {peak, x, y};
    return {peak, y, x};
}

// peak opposite the longest edge, deterministic tie break by vertex ids
inline std::array<std::size_t, 3> longest_edge_peak(const std::vector<Point>& pts,
                                                    std::array<std::size_t, 3> tri) {
    double best = -1.0;
    int peak_pos = 0;
    for (int e = 0; e < 3; ++e) {
        const Point& a = pts[tri[(e + 1) % 3]];
        const Point& b = pts[tri[(e + 2) % 3]];
        const double l2 = (a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1]);
        if (l2 > best * (1.0 + 1e-12)) {
            best = l2;
            peak_pos = e;
        }
    }
    return oriented(pts, tri[peak_pos], tri[(peak_pos + 1) % 3], tri[(peak_pos + 2) % 3]);
}

} // namespace detail

// Structured mesh of the unit square: (n+1)^2 vertices, 2 n^2 isosceles right
// triangles split along the main diagonal of each cell, refinement edges on
// the hypotenuses. Mesh size h = sqrt(2)/n.
inline TriMesh mesh_square_uniform(std::size_t n) {
    if (n < 1) throw ConfigError("mesh_square_uniform: n >= 1 required");
    TriMesh mesh;
    const std::size_t stride = n + 1;
    mesh.vertices.reserve(stride * stride);
    for (std::size_t j = 0; j <= n; ++j)
        for (std::size_t i = 0; i <= n; ++i)
            mesh.vertices.push_back({static_cast<double>(i) / n, static_cast<double>(j) / n});
    auto vid = [stride](std::size_t i, std::size_t j) { return j * stride + i; };
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t a = vid(i, j), b = vid(i + 1, j);
            const std::size_t c = vid(i + 1, j + 1), d = vid(i, j + 1);
            // peaks at the right-angle corners, hypotenuse = main diagonal a-c
            mesh.triangles.push_back(detail::oriented(mesh.vertices, b, a, c));
            mesh.triangles.push_back(detail::oriented(mesh.vertices, d, a, c));
        }
    mesh.finalize();
    return mesh;
}

// L-shaped domain (-1,1)^2 minus [0,1] x [-1,0], stitched from three unit
// squares, each subdivided n x n. Deterministic row-major vertex order.
inline TriMesh mesh_lshape(std::size_t n) {
    if (n < 1) throw ConfigError("mesh_lshape: n >= 1 required");
    TriMesh mesh;
    const std::size_t w = 2 * n + 1;
    std::vector<std::ptrdiff_t> id(w * w, -1);
    auto lattice = [&](std::size_t i, std::size_t j) { return j * w + i; };
    for (std::size_t j = 0; j < w; ++j)
        for (std::size_t i = 0; i < w; ++i) {
            const bool in_notch = (i > n) && (j < n);
            if (in_notch) continue;
            id[lattice(i, j)] = static_cast<std::ptrdiff_t>(mesh.vertices.size());
            mesh.vertices.push_back({-1.0 + static_cast<double>(i) / n,
                                     -1.0 + static_cast<double>(j) / n});
        }
    for (std::size_t j = 0; j + 1 < w; ++j)
        for (std::size_t i = 0; i + 1 < w; ++i) {
            const bool cell_in_notch = (i >= n) && (j + 1 <= n);
            if (cell_in_notch) continue;
            const auto a = static_cast<std::size_t>(id[lattice(i, j)]);
            const auto b = static_cast<std::size_t>(id[lattice(i + 1, j)]);
            const auto c = static_cast<std::size_t>(id[lattice(i + 1, j + 1)]);
            const auto d = static_cast<std::size_t>(id[lattice(i, j + 1)]);
            mesh.triangles.push_back(detail::oriented(mesh.vertices, b, a, c));
            mesh.triangles.push_back(detail::oriented(mesh.vertices, d, a, c));
        }
    mesh.finalize();
    return mesh;
}

// Red refinement: every triangle into four similar children.
inline TriMesh refine_uniform(const TriMesh& mesh) {
    TriMesh out;
    out.vertices = mesh.vertices;
    std::vector<std::size_t> midpoint(mesh.edge_count());
    for (std::size_t e = 0; e < mesh.edge_count(); ++e) {
        const Point& a = mesh.vertices[mesh.edge_vertices[e][0]];
        const Point& b = mesh.vertices[mesh.edge_vertices[e][1]];
        midpoint[e] = out.vertices.size();
        out.vertices.push_back({0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])});
    }
    out.triangles.reserve(4 * mesh.triangle_count());
    out.generation.reserve(4 * mesh.triangle_count());
    for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
        const auto& tri = mesh.triangles[t];
        const std::size_t m0 = midpoint[mesh.tri_edges[t][0]];  // opposite tri[0]
        const std::size_t m1 = midpoint[mesh.tri_edges[t][1]];
        const std::size_t m2 = midpoint[mesh.tri_edges[t][2]];
        const int g = mesh.generation.empty() ? 0 : mesh.generation[t];
        for (auto child : {std::array<std::size_t, 3>{tri[0], m2, m1},
                           std::array<std::size_t, 3>{tri[1], m0, m2},
                           std::array<std::size_t, 3>{tri[2], m1, m0},
                           std::array<std::size_t, 3>{m0, m1, m2}}) {
            out.triangles.push_back(detail::longest_edge_peak(out.vertices, child));
            out.generation.push_back(g + 1);
        }
    }
    out.finalize();
    return out;
}

// Newest-vertex bisection of the marked triangles with conforming closure.
// Closure marks refinement edges until every triangle with a marked edge has
// its refinement edge marked; triangles are then bisected into 2-4 children.
inline TriMesh refine_nvb(const TriMesh& mesh, const std::vector<std::size_t>& marked) {
    std::vector<bool> edge_marked(mesh.edge_count(), false);
    for (std::size_t t : marked) {
        if (t >= mesh.triangle_count()) throw ConfigError("refine_nvb: bad triangle index");
        edge_marked[mesh.tri_edges[t][0]] = true;  // refinement edge opposite the peak
    }
    bool changed = true;
    std::size_t passes = 0;
    while (changed) {
        changed = false;
        if (++passes > mesh.triangle_count() + 2)
            throw ClosureOverflow("refine_nvb: closure failed to stabilize");
        for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
            const bool any = edge_marked[mesh.tri_edges[t][0]] ||
                             edge_marked[mesh.tri_edges[t][1]] ||
                             edge_marked[mesh.tri_edges[t][2]];
            if (any && !edge_marked[mesh.tri_edges[t][0]]) {
                edge_marked[mesh.tri_edges[t][0]] = true;
                changed = true;
            }
        }
    }

    TriMesh out;
    out.vertices = mesh.vertices;
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> midpoints;
    auto midpoint_of = [&](std::size_t a, std::size_t b) {
        if (a > b) std::swap(a, b);
        auto [it, inserted] = midpoints.try_emplace({a, b}, out.vertices.size());
        if (inserted) {
            const Point& pa = mesh.vertices[a];
            const Point& pb = mesh.vertices[b];
            out.vertices.push_back({0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])});
        }
        return it->second;
    };
    // edge id lookup for original edges
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> edge_ids;
    for (std::size_t e = 0; e < mesh.edge_count(); ++e)
        edge_ids[{mesh.edge_vertices[e][0], mesh.edge_vertices[e][1]}] = e;
    auto is_marked = [&](std::size_t a, std::size_t b) -> bool {
        if (a > b) std::swap(a, b);
        auto it = edge_ids.find({a, b});
        return it != edge_ids.end() && edge_marked[it->second];
    };

    struct Work {
        std::array<std::size_t, 3> tri;
        int gen;
        int depth;
    };
    std::vector<Work> stack;
    for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
        stack.push_back({mesh.triangles[t], mesh.generation.empty() ? 0 : mesh.generation[t], 0});
        while (!stack.empty()) {
            Work w = stack.back();
            stack.pop_back();
            const std::size_t p = w.tri[0], a = w.tri[1], b = w.tri[2];
            if (w.depth < 3 && is_marked(a, b)) {
                const std::size_t mid = midpoint_of(a, b);
                stack.push_back({detail::oriented(out.vertices, mid, p, a), w.gen + 1, w.depth + 1});
                stack.push_back({detail::oriented(out.vertices, mid, b, p), w.gen + 1, w.depth + 1});
            } else {
                out.triangles.push_back(w.tri);
                out.generation.push_back(w.gen);
            }
        }
    }
    out.finalize();
    return out;
}

} // namespace eigencert::fem
