#pragma once

#include <cmath>
#include <optional>
#include <utility>

#include "eigencert/core/error.hpp"
#include "eigencert/spectral/types.hpp"

namespace eigencert::fem {

enum class EstimatorCase { I, II };

struct RegularityConstants {
    double delta = 1.0;  // elliptic regularity exponent
    double c_interp = 0.0;
    double c_stab = 1.0;
};

// Guaranteed estimators from the equilibrated residual norm. Case I needs
// only the gap constants; Case II additionally assumes elliptic regularity
// with user-supplied (delta, C_I, C_S) and a mesh size h.
inline std::pair<double, double> fem_estimators(double eta_res_sq,
                                                const spectral::ClusterConstants& c,
                                                EstimatorCase which, double h,
                                                const std::optional<RegularityConstants>& reg,
                                                double lambda_Mh) {
    if (which == EstimatorCase::I) {
        const double ct2 = c.c_tilde_h * c.c_tilde_h;
        const double eta_sq =
            (2.0 * c.c_h * c.c_h + 2.0 * lambda_Mh * ct2 * ct2 * eta_res_sq) * eta_res_sq;
        const double eta_l2 = std::sqrt(2.0) * c.c_tilde_h * std::sqrt(eta_res_sq);
        return {eta_sq, eta_l2};
    }
    if (!reg.has_value() || !(reg->c_interp > 0.0) || !(reg->c_stab > 0.0) ||
        !(reg->delta > 0.0))
        throw CaseIIWithoutConstants("delta, C_I, C_S required");
    const double hfac = reg->c_interp * reg->c_stab * std::pow(h, reg->delta);
    const double eta_sq =
        (1.0 + 4.0 * lambda_Mh * c.c_h * c.c_h * hfac * hfac) * eta_res_sq;
    const double eta_l2 = std::sqrt(2.0) * c.c_h * hfac * std::sqrt(eta_res_sq);
    return {eta_sq, eta_l2};
}

} // namespace eigencert::fem
