#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "eigencert/core/error.hpp"

namespace eigencert::fem {

// Greedy bulk chasing: the minimal-cardinality set of elements whose squared
// indicators reach theta^exponent times the total, largest first, ties broken
// by element index. The squared-threshold convention (exponent 2) is the
// default; the exponent is configurable.
inline std::vector<std::size_t> dorfler_mark(const std::vector<double>& indicators,
                                             double theta, double exponent = 2.0) {
    if (!(theta > 0.0 && theta < 1.0)) throw ConfigError("dorfler_mark: 0 < theta < 1");
    double total = 0.0;
    for (double v : indicators) total += v;
    std::vector<std::size_t> order(indicators.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return indicators[a] > indicators[b];
    });
    // tiny slack so an exact tie (uniform indicators) is not pushed past the
    // intended cardinality by rounding in theta^exponent
    const double target = std::pow(theta, exponent) * total * (1.0 - 1e-12);
    std::vector<std::size_t> marked;
    double acc = 0.0;
    for (std::size_t t : order) {
        if (acc >= target || indicators[t] <= 0.0) break;
        marked.push_back(t);
        acc += indicators[t];
    }
    return marked;
}

} // namespace eigencert::fem
