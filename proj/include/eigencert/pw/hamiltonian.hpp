#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

#include "eigencert/core/error.hpp"
#include "eigencert/core/matrix.hpp"
#include "eigencert/linalg/dense_eig.hpp"
#include "eigencert/linalg/fft.hpp"
#include "eigencert/linalg/lobpcg.hpp"
#include "eigencert/pw/basis.hpp"
#include "eigencert/pw/potential.hpp"
#include "eigencert/spectral/subspace.hpp"
#include "eigencert/spectral/types.hpp"

namespace eigencert::pw {

// Galerkin matrix H_kl = |g(k)|^2 delta_kl + v_hat_{k-l} / sqrt|Omega| over
// the given basis. Real symmetric: the potential coefficients are real and
// even.
inline Matrix<double> assemble_hamiltonian(const PWBasis& basis, const FourierPotential& pot) {
    if (basis.dim != pot.dim || basis.length != pot.length)
        throw DimensionMismatch("assemble_hamiltonian: basis/potential box mismatch");
    const std::size_t n = basis.size();
    const double inv_sqrt_vol = 1.0 / std::sqrt(basis.volume());
    Matrix<double> h(n, n);
    for (std::size_t r = 0; r < n; ++r) {
        const auto& k = basis.index_set[r];
        for (std::size_t c = r; c < n; ++c) {
            const auto& l = basis.index_set[c];
            const MultiIndex d{k[0] - l[0], k[1] - l[1]};
            double v = pot.coeff(d) * inv_sqrt_vol;
            if (r == c) v += basis.kinetic(k);
            h(r, c) = v;
            h(c, r) = v;
        }
    }
    return h;
}

// Convolution with the potential coefficients on the integer lattice,
// realized by zero-padded FFTs. Output extent must cover support(input) +
// cutoff(V) to make the linear convolution exact.
class PotentialConvolver {
  public:
    PotentialConvolver(const FourierPotential& pot, int input_extent, int output_extent)
        : dim_(pot.dim), in_(pot.dim, pot.length, input_extent),
          out_(pot.dim, pot.length, output_extent) {
        const int reach = input_extent + pot.cutoff;
        grid_ = linalg::next_pow2(static_cast<std::size_t>(2 * reach + 1));
        const double inv_sqrt_vol = 1.0 / std::sqrt(pot.volume());
        const std::size_t total = (dim_ == 1) ? grid_ : grid_ * grid_;
        kernel_.assign(total, linalg::cplx{0.0, 0.0});
        for (int k1 = -pot.cutoff; k1 <= pot.cutoff; ++k1) {
            if (dim_ == 1) {
                kernel_[wrap(k1)] = pot.coeff({k1, 0}) * inv_sqrt_vol;
            } else {
                for (int k2 = -pot.cutoff; k2 <= pot.cutoff; ++k2)
                    kernel_[wrap(k1) * grid_ + wrap(k2)] = pot.coeff({k1, k2}) * inv_sqrt_vol;
            }
        }
        if (dim_ == 1)
            linalg::fft_inplace(kernel_, false);
        else
            linalg::fft2_inplace(kernel_, grid_, false);
        work_.resize(total);
    }

    const PWBasis& input_basis() const { return in_; }
    const PWBasis& output_basis() const { return out_; }

    // y[out position] = sum_l v_hat_{k-l}/sqrt|Omega| x[l]
    void convolve(const double* x, double* y) const {
        const std::size_t total = kernel_.size();
        std::fill(work_.begin(), work_.end(), linalg::cplx{0.0, 0.0});
        for (std::size_t p = 0; p < in_.size(); ++p) {
            const auto& k = in_.index_set[p];
            const std::size_t pos =
                (dim_ == 1) ? wrap(k[0]) : wrap(k[0]) * grid_ + wrap(k[1]);
            work_[pos] = linalg::cplx{x[p], 0.0};
        }
        if (dim_ == 1)
            linalg::fft_inplace(work_, false);
        else
            linalg::fft2_inplace(work_, grid_, false);
        for (std::size_t i = 0; i < total; ++i) work_[i] *= kernel_[i];
        if (dim_ == 1)
            linalg::fft_inplace(work_, true);
        else
            linalg::fft2_inplace(work_, grid_, true);
        for (std::size_t p = 0; p < out_.size(); ++p) {
            const auto& k = out_.index_set[p];
            const std::size_t pos =
                (dim_ == 1) ? wrap(k[0]) : wrap(k[0]) * grid_ + wrap(k[1]);
            y[p] = work_[pos].real();
        }
    }

  private:
    std::size_t wrap(int k) const {
        return (k >= 0) ? static_cast<std::size_t>(k)
                        : grid_ - static_cast<std::size_t>(-k);
    }

    int dim_;
    PWBasis in_, out_;
    std::size_t grid_ = 0;
    std::vector<linalg::cplx> kernel_;
    mutable std::vector<linalg::cplx> work_;
};

struct PwSolveOptions {
    std::size_t dense_limit = 4096;
    double tol = 1e-10;
    std::uint64_t seed = 42;
    std::size_t max_iterations = 2000;
    Matrix<double> warm_start;  // optional initial block for the iterative path
};

struct PwClusterSolution {
    spectral::EigenCluster cluster;          // values lambda_m..lambda_M
    spectral::SubspaceBasis<double> basis;   // coefficient vectors, l2-orthonormal
    std::vector<double> lambda_low;          // lambda_1..lambda_{M+1} (discrete)
};

// Lowest cluster of the discrete operator: dense path when the basis is
// small, otherwise the block iteration with the kinetic diagonal as
// preconditioner.
inline PwClusterSolution pw_solve_cluster(const PWBasis& basis, const FourierPotential& pot,
                                          std::size_t m, std::size_t M,
                                          const PwSolveOptions& opt = {}) {
    if (m < 1 || M < m) throw ConfigError("pw_solve_cluster: invalid cluster indices");
    const std::size_t n = basis.size();
    if (M + 1 > n) throw ConfigError("pw_solve_cluster: cluster exceeds basis size");
    const std::size_t want = M + 1;  // one eigenvalue past the cluster for the gap check

    PwClusterSolution out;
    out.basis.ambient_dim = n;
    out.basis.vectors = Matrix<double>(n, M - m + 1);

    if (n <= opt.dense_limit) {
        auto h = assemble_hamiltonian(basis, pot);
        auto eig = linalg::dense_eig(std::move(h));
        out.lambda_low.assign(eig.values.begin(), eig.values.begin() + want);
        for (std::size_t j = 0; j < M - m + 1; ++j)
            for (std::size_t i = 0; i < n; ++i)
                out.basis.vectors(i, j) = eig.vectors(i, m - 1 + j);
    } else {
        PotentialConvolver conv(pot, basis.cutoff, basis.cutoff);
        linalg::ApplyFn apply = [&](const double* x, double* y) {
            conv.convolve(x, y);
            for (std::size_t p = 0; p < n; ++p) y[p] += basis.kinetic(basis.index_set[p]) * x[p];
        };
        linalg::PartialEigOptions peo;
        peo.tol = opt.tol;
        peo.seed = opt.seed;
        peo.max_iterations = opt.max_iterations;
        peo.initial_guess = opt.warm_start;
        peo.diag_precond.resize(n);
        const double mean_v = pot.v0_hat / std::sqrt(pot.volume());
        for (std::size_t p = 0; p < n; ++p)
            peo.diag_precond[p] = basis.kinetic(basis.index_set[p]) + std::max(mean_v, 1.0);
        auto r = linalg::partial_eig(n, apply, std::nullopt, want, peo);
        out.lambda_low = r.values;
        for (std::size_t j = 0; j < M - m + 1; ++j)
            for (std::size_t i = 0; i < n; ++i) out.basis.vectors(i, j) = r.vectors(i, m - 1 + j);
    }
    out.cluster.m = m;
    out.cluster.M = M;
    out.cluster.values.assign(out.lambda_low.begin() + m - 1, out.lambda_low.begin() + M);
    out.cluster.validate();
    return out;
}

} // namespace eigencert::pw
