#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "eigencert/fem/mesh.hpp"
#include "eigencert/fem/p1.hpp"

namespace eigencert::fem {

// Uniform-bin point locator. Bins hold every triangle whose bounding box
// overlaps; queries test barycentric coordinates with a small tolerance.
class PointLocator {
  public:
    explicit PointLocator(const TriMesh& mesh) : mesh_(&mesh) {
        xmin_ = ymin_ = 1e300;
        xmax_ = ymax_ = -1e300;
        for (const auto& p : mesh.vertices) {
            xmin_ = std::min(xmin_, p[0]);
            xmax_ = std::max(xmax_, p[0]);
            ymin_ = std::min(ymin_, p[1]);
            ymax_ = std::max(ymax_, p[1]);
        }
        bins_per_side_ = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::sqrt(static_cast<double>(mesh.triangle_count()))));
        cells_.resize(bins_per_side_ * bins_per_side_);
        for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
            double txmin = 1e300, txmax = -1e300, tymin = 1e300, tymax = -1e300;
            for (int v = 0; v < 3; ++v) {
                const Point& p = mesh.vertices[mesh.triangles[t][v]];
                txmin = std::min(txmin, p[0]);
                txmax = std::max(txmax, p[0]);
                tymin = std::min(tymin, p[1]);
                tymax = std::max(tymax, p[1]);
            }
            const auto [i0, j0] = bin_of(txmin, tymin);
            const auto [i1, j1] = bin_of(txmax, tymax);
            for (std::size_t j = j0; j <= j1; ++j)
                for (std::size_t i = i0; i <= i1; ++i)
                    cells_[j * bins_per_side_ + i].push_back(t);
        }
    }

    // containing triangle and barycentric coordinates; falls back to the
    // closest triangle by barycentric defect (points marginally outside the
    // domain after roundoff).
    bool locate(double x, double y, std::size_t& tri, std::array<double, 3>& bary) const {
        const auto [bi, bj] = bin_of(x, y);
        double best_defect = 1e300;
        std::size_t best_tri = 0;
        std::array<double, 3> best_bary{};
        auto consider = [&](std::size_t t) {
            const auto b = barycentric(t, x, y);
            const double defect = -std::min({b[0], b[1], b[2]});
            if (defect < best_defect) {
                best_defect = defect;
                best_tri = t;
                best_bary = b;
            }
        };
        for (std::size_t t : cells_[bj * bins_per_side_ + bi]) consider(t);
        if (best_defect > 1e-12) {
            // search the 3x3 bin neighborhood, then everything
            for (std::ptrdiff_t dj = -1; dj <= 1; ++dj)
                for (std::ptrdiff_t di = -1; di <= 1; ++di) {
                    const std::ptrdiff_t ii = static_cast<std::ptrdiff_t>(bi) + di;
                    const std::ptrdiff_t jj = static_cast<std::ptrdiff_t>(bj) + dj;
                    if (ii < 0 || jj < 0 || ii >= static_cast<std::ptrdiff_t>(bins_per_side_) ||
                        jj >= static_cast<std::ptrdiff_t>(bins_per_side_))
                        continue;
                    for (std::size_t t : cells_[jj * bins_per_side_ + ii]) consider(t);
                }
        }
        if (best_defect > 1e-9) {
            for (std::size_t t = 0; t < mesh_->triangle_count(); ++t) consider(t);
        }
        tri = best_tri;
        bary = best_bary;
        return best_defect < 1e-9;
    }

  private:
    std::pair<std::size_t, std::size_t> bin_of(double x, double y) const {
        const double fx = (x - xmin_) / std::max(xmax_ - xmin_, 1e-300);
        const double fy = (y - ymin_) / std::max(ymax_ - ymin_, 1e-300);
        auto clampi = [&](double f) {
            const auto v = static_cast<std::ptrdiff_t>(f * static_cast<double>(bins_per_side_));
            return static_cast<std::size_t>(
                std::clamp<std::ptrdiff_t>(v, 0, static_cast<std::ptrdiff_t>(bins_per_side_) - 1));
        };
        return {clampi(fx), clampi(fy)};
    }

    std::array<double, 3> barycentric(std::size_t t, double x, double y) const {
        const auto& tri = mesh_->triangles[t];
        const Point& p0 = mesh_->vertices[tri[0]];
        const Point& p1 = mesh_->vertices[tri[1]];
        const Point& p2 = mesh_->vertices[tri[2]];
        const double det =
            (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]);
        const double l1 = ((x - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (y - p0[1])) / det;
        const double l2 = ((p1[0] - p0[0]) * (y - p0[1]) - (x - p0[0]) * (p1[1] - p0[1])) / det;
        return {1.0 - l1 - l2, l1, l2};
    }

    const TriMesh* mesh_;
    double xmin_, xmax_, ymin_, ymax_;
    std::size_t bins_per_side_;
    std::vector<std::vector<std::size_t>> cells_;
};

// Interpolate a coarse P1 interior-dof vector onto the interior dofs of a
// finer mesh. Exact whenever the fine mesh refines the coarse one.
inline Matrix<double> interpolate_p1(const TriMesh& coarse_mesh, const P1System& coarse_sys,
                                     const Matrix<double>& coarse_vectors,
                                     const TriMesh& fine_mesh, const P1System& fine_sys) {
    PointLocator locator(coarse_mesh);
    const std::size_t cols = coarse_vectors.cols();
    Matrix<double> out(fine_sys.interior_count(), cols);
    std::vector<std::vector<double>> full(cols);
    for (std::size_t c = 0; c < cols; ++c) {
        std::vector<double> interior(coarse_sys.interior_count());
        for (std::size_t i = 0; i < interior.size(); ++i) interior[i] = coarse_vectors(i, c);
        full[c] = extend_to_vertices(coarse_sys, interior.data());
    }
    for (std::size_t d = 0; d < fine_sys.interior_count(); ++d) {
        const Point& p = fine_mesh.vertices[fine_sys.dof_to_vertex[d]];
        std::size_t t = 0;
        std::array<double, 3> bary{};
        locator.locate(p[0], p[1], t, bary);
        const auto& tri = coarse_mesh.triangles[t];
        for (std::size_t c = 0; c < cols; ++c) {
            out(d, c) = bary[0] * full[c][tri[0]] + bary[1] * full[c][tri[1]] +
                        bary[2] * full[c][tri[2]];
        }
    }
    return out;
}

} // namespace eigencert::fem
