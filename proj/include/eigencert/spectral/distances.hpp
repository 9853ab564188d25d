#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "eigencert/core/error.hpp"
#include "eigencert/core/matrix.hpp"

namespace eigencert::spectral {

namespace detail {
inline double clamp_radicand(double r, const char* what) {
    if (r < -1e-12) throw NegativeRadicand(std::string(what) + ": " + std::to_string(r));
    return r < 0.0 ? 0.0 : r;
}
} // namespace detail

// || gamma_exact - gamma_h ||_{S2} = sqrt(2 (J - ||M||_F^2)) for the overlap
// M of two J-dimensional orthonormal frames.
template <class T>
double dm_l2_distance(const Matrix<T>& m) {
    if (m.rows() != m.cols()) throw DimensionMismatch("dm_l2_distance: square overlap expected");
    const double j = static_cast<double>(m.rows());
    const double f2 = m.frobenius_norm_sq();
    return std::sqrt(detail::clamp_radicand(2.0 * (j - f2), "dm_l2_distance"));
}

// || A^{1/2}(gamma_exact - gamma_h) ||_{S2} for a conforming discretization:
// sqrt( sum_i lambda_i - 2 sum_ij lambda_i |M_ij|^2 + sum_i lambda_ih ).
template <class T>
double dm_energy_distance(const std::vector<double>& lambda_exact,
                          const std::vector<double>& lambda_h, const Matrix<T>& m) {
    using st = scalar_traits<T>;
    const std::size_t j = lambda_exact.size();
    if (lambda_h.size() != j || m.rows() != j || m.cols() != j)
        throw DimensionMismatch("dm_energy_distance: cluster sizes differ");
    double s = 0.0;
    for (std::size_t i = 0; i < j; ++i) s += lambda_exact[i] + lambda_h[i];
    for (std::size_t i = 0; i < j; ++i)
        for (std::size_t c = 0; c < j; ++c) s -= 2.0 * lambda_exact[i] * st::abs2(m(i, c));
    return std::sqrt(detail::clamp_radicand(s, "dm_energy_distance"));
}

// || A^{1/2}(Phi_exact - Phi_h_aligned) || from the aligned overlap:
// sqrt( sum (lambda_ih - lambda_i) + sum lambda_i * 2 (1 - Re M_ii) ).
template <class T>
double eigenvector_error_energy(const std::vector<double>& lambda_exact,
                                const std::vector<double>& lambda_h,
                                const Matrix<T>& m_aligned) {
    using st = scalar_traits<T>;
    const std::size_t j = lambda_exact.size();
    if (lambda_h.size() != j || m_aligned.rows() != j || m_aligned.cols() != j)
        throw DimensionMismatch("eigenvector_error_energy: cluster sizes differ");
    double s = 0.0;
    for (std::size_t i = 0; i < j; ++i) {
        s += lambda_h[i] - lambda_exact[i];
        s += lambda_exact[i] * 2.0 * (1.0 - st::real(m_aligned(i, i)));
    }
    return std::sqrt(detail::clamp_radicand(s, "eigenvector_error_energy"));
}

// || Phi_exact - Phi_h_aligned || (plain norm), same aligned overlap input.
template <class T>
double eigenvector_error_l2(const Matrix<T>& m_aligned) {
    using st = scalar_traits<T>;
    double s = 0.0;
    for (std::size_t i = 0; i < m_aligned.rows(); ++i)
        s += 2.0 * (1.0 - st::real(m_aligned(i, i)));
    return std::sqrt(detail::clamp_radicand(s, "eigenvector_error_l2"));
}

// Bracket for the eigenvalue-sum error: lower = E^2 - lambda_M_upper * L^2,
// upper = E^2, where E, L are the energy and S2 density-matrix distances.
inline std::pair<double, double> eigenvalue_sum_bounds(double dm_energy_err, double dm_l2_err,
                                                       double lambda_m_exact_upper) {
    if (dm_energy_err < 0 || dm_l2_err < 0)
        throw ConfigError("eigenvalue_sum_bounds: distances must be nonnegative");
    const double upper = dm_energy_err * dm_energy_err;
    const double lower = upper - lambda_m_exact_upper * dm_l2_err * dm_l2_err;
    return {lower, upper};
}

} // namespace eigencert::spectral
