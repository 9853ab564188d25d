#pragma once

#include <cstddef>
#include <vector>

#include "eigencert/fem/equilibrate.hpp"
#include "eigencert/fem/mesh.hpp"
#include "eigencert/fem/p1.hpp"

namespace eigencert::fem {

struct LocalIndicators {
    std::vector<double> per_element;  // sum over cluster members of ||grad u_i + sigma_i||_K^2
    double total = 0.0;               // eta_res^2
};

// Elementwise exact quadrature of || P1 gradient + RT1 flux ||^2 summed over
// the cluster.
inline LocalIndicators eta_res_local(const TriMesh& mesh, const std::vector<Rt1Element>& els,
                                     const std::vector<EquilibratedFlux>& fluxes,
                                     const std::vector<std::vector<double>>& u_vertex) {
    if (fluxes.size() != u_vertex.size())
        throw DimensionMismatch("eta_res_local: fluxes/vectors count");
    static const std::vector<QuadPoint> rule = triangle_rule(3);  // degree 5 >= integrand 4
    std::vector<QuadPoint> phys;
    LocalIndicators ind;
    ind.per_element.assign(mesh.triangle_count(), 0.0);
    for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
        const auto geo = element_geometry(mesh, t);
        const auto& tri = mesh.triangles[t];
        map_rule(mesh, t, rule, phys);
        double acc = 0.0;
        for (std::size_t s = 0; s < fluxes.size(); ++s) {
            double ux = 0, uy = 0;
            for (int i = 0; i < 3; ++i) {
                ux += u_vertex[s][tri[i]] * geo.b[i];
                uy += u_vertex[s][tri[i]] * geo.c[i];
            }
            for (const auto& q : phys) {
                double sx, sy;
                flux_value_at(mesh, els, fluxes[s], t, q.x, q.y, sx, sy);
                acc += q.w * ((ux + sx) * (ux + sx) + (uy + sy) * (uy + sy));
            }
        }
        ind.per_element[t] = acc;
        ind.total += acc;
    }
    return ind;
}

} // namespace eigencert::fem
