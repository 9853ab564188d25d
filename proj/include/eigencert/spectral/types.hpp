#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "eigencert/core/error.hpp"

namespace eigencert::spectral {

// Indices of a cluster of eigenvalues, 1-based and inclusive, together with
// the discrete values lambda_m..lambda_M (ascending, positive).
struct EigenCluster {
    std::size_t m = 1;
    std::size_t M = 1;
    std::vector<double> values;

    std::size_t size() const { return M - m + 1; }

    void validate() const {
        if (m < 1 || M < m) throw ConfigError("cluster indices must satisfy 1 <= m <= M");
        if (values.size() != size()) throw ConfigError("cluster value count != M - m + 1");
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (!(values[i] > 0.0)) throw ConfigError("cluster eigenvalues must be positive");
            if (i > 0 && values[i] < values[i - 1])
                throw ConfigError("cluster eigenvalues must be ascending");
        }
    }
};

// Bounds on the exact spectrum around the cluster. upper_prev is an upper
// bound for lambda_{m-1} (absent iff m = 1), lower_next a lower bound for
// lambda_{M+1}, lower_first a lower bound for lambda_1 (used only by the
// efficiency diagnostics).
struct GapBounds {
    std::optional<double> upper_prev;
    double lower_next = 0.0;
    double lower_first = 0.0;
};

// Computable gap constants entering the guaranteed bounds.
struct ClusterConstants {
    double c_h = 0.0;        // dimensionless
    double c_tilde_h = 0.0;  // (energy)^{-1/2}
    double c_bar_h = 0.0;    // dimensionless, >= 1
};

struct GapVerdict {
    bool ok = false;
    std::string reason;  // names the failed inequality when !ok
};

// One experiment row: errors, estimators, effectivities.
struct ErrorReport {
    double n_param = 0.0;  // ladder parameter (mesh subdivisions or cutoff N)
    double h_or_n = 0.0;   // mesh size h, or the length scale L/(2 pi N) for planewaves
    std::size_t ndof = 0;

    bool assumptions_ok = false;
    std::string assumption_reason;

    double err_lambda = 0.0;
    double err_h1 = 0.0;
    double err_l2 = 0.0;

    double eta_sq = 0.0;
    double eta = 0.0;
    double eta_l2 = 0.0;

    // effectivities; nan encodes "n/a" (error below noise floor)
    double ieff_lambda = 0.0;
    double ieff_h1 = 0.0;
    double ieff_l2 = 0.0;
};

} // namespace eigencert::spectral
