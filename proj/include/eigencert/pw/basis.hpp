#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "eigencert/core/error.hpp"

namespace eigencert::pw {

// Integer Fourier multi-index, padded to 2 components (second unused in 1d).
using MultiIndex = std::array<int, 2>;

// Planewave basis on the torus [0, L)^d with sup-norm cutoff N: all integer
// multi-indices with max-norm at most N, in lexicographic order. The
// wavevector of index k is g(k) = (2 pi / L) k.
struct PWBasis {
    int dim = 1;
    double length = 2.0 * 3.14159265358979323846;
    int cutoff = 0;
    std::vector<MultiIndex> index_set;

    PWBasis() = default;
    PWBasis(int d, double l, int n) : dim(d), length(l), cutoff(n) {
        if (d != 1 && d != 2) throw ConfigError("planewave basis: dim must be 1 or 2");
        if (l <= 0) throw ConfigError("planewave basis: box length must be positive");
        if (n < 0) throw ConfigError("planewave basis: negative cutoff");
        if (d == 1) {
            index_set.reserve(2 * n + 1);
            for (int k = -n; k <= n; ++k) index_set.push_back({k, 0});
        } else {
            index_set.reserve(static_cast<std::size_t>(2 * n + 1) * (2 * n + 1));
            for (int k1 = -n; k1 <= n; ++k1)
                for (int k2 = -n; k2 <= n; ++k2) index_set.push_back({k1, k2});
        }
    }

    std::size_t size() const { return index_set.size(); }
    double volume() const { return (dim == 1) ? length : length * length; }

    // |g(k)|^2
    double kinetic(const MultiIndex& k) const {
        const double f = 2.0 * 3.14159265358979323846 / length;
        const double g1 = f * k[0];
        const double g2 = f * k[1];
        return (dim == 1) ? g1 * g1 : g1 * g1 + g2 * g2;
    }

    // position of a multi-index within the lexicographic layout, or npos
    std::size_t position(const MultiIndex& k) const {
        if (std::abs(k[0]) > cutoff) return npos;
        if (dim == 1) {
            if (k[1] != 0) return npos;
            return static_cast<std::size_t>(k[0] + cutoff);
        }
        if (std::abs(k[1]) > cutoff) return npos;
        return static_cast<std::size_t>(k[0] + cutoff) * (2 * cutoff + 1) +
               static_cast<std::size_t>(k[1] + cutoff);
    }

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

// Exact spectrum of -Delta + 1 on the torus, ascending with multiplicities,
// truncated after `count` entries. These are guaranteed lower bounds for the
// eigenvalues of -Delta + V whenever V >= 1.
inline std::vector<double> pw_lower_bounds(int dim, double length, std::size_t count) {
    // enumerate indices inside a generous box and sort
    int reach = 1;
    while (static_cast<std::size_t>(dim == 1 ? 2 * reach + 1
                                             : (2 * reach + 1) * (2 * reach + 1)) < count + 1)
        ++reach;
    reach += 2;
    PWBasis wide(dim, length, reach);
    std::vector<double> values;
    values.reserve(wide.size());
    for (const auto& k : wide.index_set) values.push_back(1.0 + wide.kinetic(k));
    std::sort(values.begin(), values.end());
    if (values.size() > count) values.resize(count);
    return values;
}

} // namespace eigencert::pw
