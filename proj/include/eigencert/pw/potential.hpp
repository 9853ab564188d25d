#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "eigencert/core/error.hpp"
#include "eigencert/linalg/fft.hpp"
#include "eigencert/pw/basis.hpp"

namespace eigencert::pw {

// Periodic potential given by the Fourier coefficients alpha/|k|^2 for
// 0 < ||k||_inf <= cutoff, with the zeroth coefficient calibrated so that
// the minimum of the reconstructed potential over a uniform sampling grid
// equals one. Coefficients follow the convention v_hat_k = (e_k, v) with
// e_k = |Omega|^{-1/2} exp(i g_k x).
struct FourierPotential {
    int dim = 1;
    double length = 2.0 * 3.14159265358979323846;
    double alpha = 0.0;
    int cutoff = 0;             // K_V
    double v0_hat = 0.0;
    std::size_t grid = 0;       // calibration grid points per dimension

    double volume() const { return (dim == 1) ? length : length * length; }

    // v_hat_k for any index (0 outside the truncation)
    double coeff(const MultiIndex& k) const {
        const int a0 = std::abs(k[0]);
        const int a1 = (dim == 2) ? std::abs(k[1]) : 0;
        if (a0 == 0 && a1 == 0) return v0_hat;
        if (std::max(a0, a1) > cutoff) return 0.0;
        const double k2 = static_cast<double>(k[0]) * k[0] + static_cast<double>(k[1]) * k[1];
        return alpha / k2;
    }

    double sup_on_grid() const { return sup_; }
    double min_on_grid() const { return min_; }

    double sup_ = 1.0;
    double min_ = 1.0;
};

namespace detail {

// Sample the zero-mean part of V on a uniform grid by placing the Fourier
// coefficients on a wrap-around spectral grid and inverse transforming.
// Exact for trigonometric polynomials once grid >= 2*cutoff + 1.
inline std::vector<double> sample_fluctuation(int dim, double length, double alpha, int cutoff,
                                              std::size_t grid) {
    using linalg::cplx;
    const double vol = (dim == 1) ? length : length * length;
    const double scale = 1.0 / std::sqrt(vol);
    if (dim == 1) {
        std::vector<cplx> spec(grid, cplx{0.0, 0.0});
        for (int k = -cutoff; k <= cutoff; ++k) {
            if (k == 0) continue;
            const double v = alpha / (static_cast<double>(k) * k);
            const std::size_t pos = (k >= 0) ? static_cast<std::size_t>(k)
                                             : grid - static_cast<std::size_t>(-k);
            spec[pos] += cplx{v, 0.0};
        }
        // f(x_j) = sum_k spec_k e^{2 pi i k j / grid}; inverse fft includes 1/grid
        linalg::fft_inplace(spec, true);
        std::vector<double> out(grid);
        for (std::size_t j = 0; j < grid; ++j)
            out[j] = spec[j].real() * static_cast<double>(grid) * scale;
        return out;
    }
    std::vector<cplx> spec(grid * grid, cplx{0.0, 0.0});
    for (int k1 = -cutoff; k1 <= cutoff; ++k1)
        for (int k2 = -cutoff; k2 <= cutoff; ++k2) {
            if (k1 == 0 && k2 == 0) continue;
            const double v =
                alpha / (static_cast<double>(k1) * k1 + static_cast<double>(k2) * k2);
            const std::size_t p1 =
                (k1 >= 0) ? static_cast<std::size_t>(k1) : grid - static_cast<std::size_t>(-k1);
            const std::size_t p2 =
                (k2 >= 0) ? static_cast<std::size_t>(k2) : grid - static_cast<std::size_t>(-k2);
            spec[p1 * grid + p2] += cplx{v, 0.0};
        }
    linalg::fft2_inplace(spec, grid, true);
    std::vector<double> out(grid * grid);
    for (std::size_t j = 0; j < out.size(); ++j)
        out[j] = spec[j].real() * static_cast<double>(grid * grid) * scale;
    return out;
}

} // namespace detail

inline std::size_t default_potential_grid(int dim, int cutoff) {
    const std::size_t base = (dim == 1) ? 4096 : 1024;
    return std::max(base, linalg::next_pow2(static_cast<std::size_t>(4 * std::max(cutoff, 1))));
}

// Build and calibrate the potential: v0_hat is chosen so that the sampled
// minimum of V is exactly one.
inline FourierPotential build_potential(int dim, double length, double alpha, int cutoff,
                                        std::size_t sample_resolution = 0) {
    if (alpha < 0) throw ConfigError("build_potential: alpha must be nonnegative");
    if (cutoff < 1) throw ConfigError("build_potential: cutoff K_V must be >= 1");
    FourierPotential pot;
    pot.dim = dim;
    pot.length = length;
    pot.alpha = alpha;
    pot.cutoff = cutoff;
    pot.grid = sample_resolution ? sample_resolution : default_potential_grid(dim, cutoff);
    if ((pot.grid & (pot.grid - 1)) != 0 ||
        pot.grid < static_cast<std::size_t>(4 * cutoff))
        throw ConfigError("build_potential: sample resolution must be a power of two >= 4 K_V");

    const double scale = 1.0 / std::sqrt(pot.volume());
    if (alpha == 0.0) {
        pot.v0_hat = std::sqrt(pot.volume());  // constant potential V = 1
        pot.min_ = 1.0;
        pot.sup_ = 1.0;
        return pot;
    }
    auto w = detail::sample_fluctuation(dim, length, alpha, cutoff, pot.grid);
    const double wmin = *std::min_element(w.begin(), w.end());
    const double wmax = *std::max_element(w.begin(), w.end());
    // V = v0_hat * scale + W with min V = 1
    pot.v0_hat = (1.0 - wmin) / scale;
    pot.min_ = 1.0;
    pot.sup_ = 1.0 + (wmax - wmin);
    return pot;
}

} // namespace eigencert::pw
