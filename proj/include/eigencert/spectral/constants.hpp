#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "eigencert/core/error.hpp"
#include "eigencert/spectral/types.hpp"

namespace eigencert::spectral {

// Checks the continuous-discrete gap inequalities: upper_prev =
// lambda_{(m-1)h} < lambda_{mh} when m > 1, and lambda_{Mh} < lower_next
// (<= lambda_{(M+1)h} when the discrete spectrum is long enough). Returns a
// verdict, never throws.
inline GapVerdict verify_gap_assumptions(const std::vector<double>& lambda_h_all,
                                         std::size_t m, std::size_t M,
                                         const GapBounds& gaps) {
    GapVerdict v;
    if (m < 1 || M < m) {
        v.reason = "invalid cluster indices";
        return v;
    }
    if (lambda_h_all.size() < M) {
        v.reason = "discrete spectrum shorter than M";
        return v;
    }
    const double lambda_mh = lambda_h_all[m - 1];
    const double lambda_Mh = lambda_h_all[M - 1];
    if (m > 1) {
        if (!gaps.upper_prev.has_value()) {
            v.reason = "upper_prev required for m > 1";
            return v;
        }
        if (!(*gaps.upper_prev < lambda_mh)) {
            v.reason = "upper_prev >= lambda_mh (no relative gap below the cluster)";
            return v;
        }
    }
    if (!(lambda_Mh < gaps.lower_next)) {
        v.reason = "lambda_Mh >= lower_next (no relative gap above the cluster)";
        return v;
    }
    if (lambda_h_all.size() >= M + 1) {
        if (!(gaps.lower_next <= lambda_h_all[M] * (1.0 + 1e-12))) {
            v.reason = "lower_next > lambda_(M+1)h (claimed lower bound not consistent)";
            return v;
        }
    }
    v.ok = true;
    return v;
}

// The gap constants c_h, c~_h, c-_h from the discrete cluster endpoints and
// the surrounding spectral bounds. The m = 1 case discards the first term of
// each max.
inline ClusterConstants compute_constants(const std::vector<double>& lambda_h_cluster,
                                          std::size_t m, const GapBounds& gaps) {
    if (lambda_h_cluster.empty()) throw ConfigError("compute_constants: empty cluster");
    const double lambda_mh = lambda_h_cluster.front();
    const double lambda_Mh = lambda_h_cluster.back();
    if (!(lambda_Mh < gaps.lower_next))
        throw ConfigError("compute_constants: gap assumption violated (lambda_Mh >= lower_next)");

    ClusterConstants c;
    const double upper_gap = 1.0 - lambda_Mh / gaps.lower_next;
    c.c_h = 1.0 / upper_gap;
    c.c_tilde_h = 1.0 / (std::sqrt(gaps.lower_next) * upper_gap);
    if (m > 1) {
        if (!gaps.upper_prev.has_value())
            throw ConfigError("compute_constants: upper_prev required for m > 1");
        const double prev = *gaps.upper_prev;
        if (!(prev < lambda_mh))
            throw ConfigError("compute_constants: gap assumption violated (upper_prev >= lambda_mh)");
        const double lower_gap = lambda_mh / prev - 1.0;
        c.c_h = std::max(c.c_h, 1.0 / lower_gap);
        c.c_tilde_h = std::max(c.c_tilde_h, 1.0 / (std::sqrt(prev) * lower_gap));
    }
    if (gaps.lower_first > 0.0) {
        const double t = lambda_Mh / gaps.lower_first - 1.0;
        c.c_bar_h = std::max(t * t, 1.0);
    } else {
        c.c_bar_h = 1.0;
    }
    return c;
}

} // namespace eigencert::spectral
