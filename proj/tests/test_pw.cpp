#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "eigencert/linalg/lu.hpp"
#include "eigencert/pw/basis.hpp"
#include "eigencert/pw/hamiltonian.hpp"
#include "eigencert/pw/potential.hpp"
#include "eigencert/pw/reference.hpp"
#include "eigencert/pw/residual.hpp"
#include "eigencert/spectral/constants.hpp"

using namespace eigencert;
using namespace eigencert::pw;

namespace {
constexpr double kTwoPi = 2.0 * 3.14159265358979323846;
}

TEST_CASE("basis index set size and negation closure") {
    PWBasis b1(1, kTwoPi, 4);
    REQUIRE(b1.size() == 9);
    PWBasis b2(2, kTwoPi, 5);
    REQUIRE(b2.size() == 121);  // ndof of the first 2d experiment row
    for (const auto& k : b2.index_set) {
        MultiIndex neg{-k[0], -k[1]};
        REQUIRE(b2.position(neg) != PWBasis::npos);
    }
}

TEST_CASE("pw_lower_bounds torus spectra") {
    auto v1 = pw_lower_bounds(1, kTwoPi, 7);
    std::vector<double> want1{1, 2, 2, 5, 5, 10, 10};
    for (std::size_t i = 0; i < want1.size(); ++i)
        REQUIRE(v1[i] == Catch::Approx(want1[i]).margin(1e-14));
    auto v2 = pw_lower_bounds(2, kTwoPi, 10);
    std::vector<double> want2{1, 2, 2, 2, 2, 3, 3, 3, 3, 5};
    for (std::size_t i = 0; i < want2.size(); ++i)
        REQUIRE(v2[i] == Catch::Approx(want2[i]).margin(1e-14));
}

TEST_CASE("build_potential constant case and calibration") {
    auto flat = build_potential(1, kTwoPi, 0.0, 4);
    REQUIRE(flat.v0_hat == Catch::Approx(std::sqrt(kTwoPi)));
    REQUIRE(flat.min_on_grid() == Catch::Approx(1.0));

    auto pot = build_potential(1, kTwoPi, 1.0, 32, 4096);
    REQUIRE(pot.min_on_grid() == Catch::Approx(1.0).margin(1e-8));
    // closed form: the fluctuation is ((x-pi)^2/2 - pi^2/6)/sqrt(2 pi), so
    // the calibrated mean tends to 1 + pi^2 / (6 sqrt(2 pi))
    const double pi = kTwoPi / 2.0;
    const double mean = pot.v0_hat / std::sqrt(kTwoPi);
    const double want = 1.0 + pi * pi / (6.0 * std::sqrt(kTwoPi));
    REQUIRE(mean == Catch::Approx(want).margin(4.0 / (32.0 * std::sqrt(kTwoPi))));

    auto pot64 = build_potential(1, kTwoPi, 1.0, 64, 4096);
    REQUIRE(std::abs(pot64.v0_hat - pot.v0_hat) / std::sqrt(kTwoPi) < 1e-3);

    auto pot2d = build_potential(2, kTwoPi, 0.1, 8);
    REQUIRE(pot2d.min_on_grid() == Catch::Approx(1.0).margin(1e-8));
    REQUIRE(pot2d.sup_on_grid() > 1.0);
}

TEST_CASE("assemble_hamiltonian diagonal free case") {
    PWBasis basis(1, kTwoPi, 2);
    auto pot = build_potential(1, kTwoPi, 0.0, 1);
    auto h = assemble_hamiltonian(basis, pot);
    // |k|^2 + 1 on the diagonal, ordered k = -2..2
    std::vector<double> want{5, 2, 1, 2, 5};
    for (std::size_t i = 0; i < 5; ++i) {
        REQUIRE(h(i, i) == Catch::Approx(want[i]));
        for (std::size_t j = 0; j < 5; ++j)
            if (i != j) REQUIRE(h(i, j) == 0.0);
    }
    auto eig = linalg::dense_eig(h);
    std::vector<double> spec{1, 2, 2, 5, 5};
    for (std::size_t i = 0; i < 5; ++i) REQUIRE(eig.values[i] == Catch::Approx(spec[i]));
}

TEST_CASE("hamiltonian is exactly symmetric") {
    PWBasis basis(2, kTwoPi, 3);
    auto pot = build_potential(2, kTwoPi, 0.4, 5);
    auto h = assemble_hamiltonian(basis, pot);
    double asym = 0;
    for (std::size_t i = 0; i < h.rows(); ++i)
        for (std::size_t j = 0; j < h.cols(); ++j)
            asym = std::max(asym, std::abs(h(i, j) - h(j, i)));
    REQUIRE(asym == 0.0);
}

TEST_CASE("variational monotonicity of the lowest eigenvalue in N") {
    auto pot = build_potential(1, kTwoPi, 1.0, 80);
    double prev = 1e300;
    for (int n : {10, 20, 40}) {
        PWBasis basis(1, kTwoPi, n);
        auto sol = pw_solve_cluster(basis, pot, 1, 1);
        REQUIRE(sol.lambda_low[0] >= 1.0);
        REQUIRE(sol.lambda_low[0] <= prev + 1e-12);
        prev = sol.lambda_low[0];
    }
}

TEST_CASE("free degenerate cluster") {
    PWBasis basis(1, kTwoPi, 5);
    auto pot = build_potential(1, kTwoPi, 0.0, 1);
    auto sol = pw_solve_cluster(basis, pot, 2, 3);
    REQUIRE(sol.cluster.values[0] == Catch::Approx(2.0));
    REQUIRE(sol.cluster.values[1] == Catch::Approx(2.0));
}

TEST_CASE("pw residual vanishes for the free operator") {
    PWBasis basis(1, kTwoPi, 6);
    auto pot = build_potential(1, kTwoPi, 0.0, 1);
    auto sol = pw_solve_cluster(basis, pot, 1, 2);
    auto res = pw_residual(basis, pot, sol.basis.vectors, sol.cluster.values);
    for (const auto& slice : res.coeffs)
        for (double v : slice) REQUIRE(std::abs(v) < 1e-12);
}

TEST_CASE("pw residual matches the extended-matrix oracle") {
    PWBasis basis(1, kTwoPi, 10);
    auto pot = build_potential(1, kTwoPi, 1.0, 12);
    auto sol = pw_solve_cluster(basis, pot, 2, 3);
    auto res = pw_residual(basis, pot, sol.basis.vectors, sol.cluster.values);

    PWBasis ext(1, kTwoPi, basis.cutoff + pot.cutoff);
    auto h_ext = assemble_hamiltonian(ext, pot);
    for (std::size_t j = 0; j < 2; ++j) {
        std::vector<double> pad(ext.size(), 0.0);
        for (std::size_t p = 0; p < basis.size(); ++p)
            pad[ext.position(basis.index_set[p])] = sol.basis.vectors(p, j);
        auto hpad = matvec(h_ext, pad);
        for (std::size_t p = 0; p < ext.size(); ++p) {
            const double oracle = sol.cluster.values[j] * pad[p] - hpad[p];
            const bool inside = basis.position(ext.index_set[p]) != PWBasis::npos;
            if (inside) {
                REQUIRE(std::abs(oracle) < 1e-9);  // Galerkin orthogonality
            } else {
                REQUIRE(res.coeffs[j][p] == Catch::Approx(oracle).margin(1e-12));
            }
        }
    }
}

TEST_CASE("dual norms: trivial, one-term, and cutoff factor") {
    PWResidual zero;
    zero.extended = PWBasis(1, kTwoPi, 5);
    zero.coeffs.push_back(std::vector<double>(zero.extended.size(), 0.0));
    auto n0 = pw_dual_norms(zero, 4);
    REQUIRE(n0.eta_res_sq == 0.0);
    REQUIRE(n0.h2_sq == 0.0);

    const int n = 6;
    PWResidual one;
    one.extended = PWBasis(1, kTwoPi, n + 2);
    one.coeffs.push_back(std::vector<double>(one.extended.size(), 0.0));
    one.coeffs[0][one.extended.position({n + 1, 0})] = 1.0;
    auto n1 = pw_dual_norms(one, n);
    REQUIRE(n1.eta_res_sq == Catch::Approx(1.0 / (1.0 + (n + 1) * (n + 1))));
    REQUIRE(std::sqrt(n1.h2_sq) <=
            (kTwoPi / (kTwoPi * n)) * std::sqrt(n1.eta_res_sq) * (1 + 1e-12));
}

TEST_CASE("pw_estimators formula limits") {
    auto [e0, l0] = pw_estimators(0.0, 3.0, 5.0, 10, kTwoPi);
    REQUIRE(e0 == 0.0);
    REQUIRE(l0 == 0.0);
    auto [e1, l1] = pw_estimators(1.0, 3.0, 5.0, 1000000, kTwoPi);
    REQUIRE(e1 == Catch::Approx(1.0).epsilon(1e-6));
    REQUIRE(l1 < 1e-4);
}

TEST_CASE("reference errors vanish for identical solves") {
    PWBasis basis(1, kTwoPi, 8);
    auto pot = build_potential(1, kTwoPi, 1.0, 10);
    auto sol = pw_solve_cluster(basis, pot, 2, 3);
    auto err = pw_reference_errors(basis, sol, basis, sol);
    REQUIRE(err.err_lambda == Catch::Approx(0.0).margin(1e-12));
    REQUIRE(err.err_h1 == Catch::Approx(0.0).margin(1e-6));
    REQUIRE(err.err_l2 == Catch::Approx(0.0).margin(1e-7));
}

TEST_CASE("small-scale guaranteed bounds and assumption chain") {
    const int kv = 40;
    auto pot = build_potential(1, kTwoPi, 1.0, kv);
    PWBasis basis(1, kTwoPi, 10);
    PWBasis ref_basis(1, kTwoPi, 80);
    auto sol = pw_solve_cluster(basis, pot, 2, 3);
    auto ref = pw_solve_cluster(ref_basis, pot, 2, 3);

    auto lows = pw_lower_bounds(1, kTwoPi, 4);
    spectral::GapBounds gaps;
    gaps.upper_prev = sol.lambda_low[0];
    gaps.lower_next = lows[3];
    gaps.lower_first = lows[0];
    auto verdict = spectral::verify_gap_assumptions(sol.lambda_low, 2, 3, gaps);
    REQUIRE(verdict.ok);  // assumptions hold already at N = 10

    auto consts = spectral::compute_constants(sol.cluster.values, 2, gaps);
    auto res = pw_residual(basis, pot, sol.basis.vectors, sol.cluster.values);
    auto norms = pw_dual_norms(res, basis.cutoff);
    auto [eta_sq, eta_l2] = pw_estimators(norms.eta_res_sq, consts.c_h,
                                          sol.cluster.values.back(), basis.cutoff, kTwoPi);
    auto err = pw_reference_errors(basis, sol, ref_basis, ref);
    REQUIRE(err.err_lambda >= 0.0);
    REQUIRE(err.err_lambda <= eta_sq + 1e-12);
    REQUIRE(err.err_h1 <= std::sqrt(eta_sq) + 1e-12);
    REQUIRE(err.err_l2 <= eta_l2 + 1e-12);
}

TEST_CASE("residual-sum identity on an exact finite universe") {
    // small N and K_V so the extended space is the numerically exact universe
    const int n = 4, kv = 8;
    auto pot = build_potential(1, kTwoPi, 0.7, kv);
    PWBasis basis(1, kTwoPi, n);
    auto sol = pw_solve_cluster(basis, pot, 2, 3);
    PWBasis universe(1, kTwoPi, n + kv);
    auto h_u = assemble_hamiltonian(universe, pot);
    auto eig_u = linalg::dense_eig(h_u);

    auto res = pw_residual(basis, pot, sol.basis.vectors, sol.cluster.values);
    REQUIRE(res.extended.size() == universe.size());

    // route 1: eigenbasis expansion over the universe
    double via_eigenbasis = 0.0;
    for (std::size_t j = 0; j < 2; ++j) {
        std::vector<double> pad(universe.size(), 0.0);
        for (std::size_t p = 0; p < basis.size(); ++p)
            pad[universe.position(basis.index_set[p])] = sol.basis.vectors(p, j);
        for (std::size_t k = 0; k < universe.size(); ++k) {
            double ov = 0;
            for (std::size_t i = 0; i < universe.size(); ++i)
                ov += eig_u.vectors(i, k) * pad[i];
            const double diff = eig_u.values[k] - sol.cluster.values[j];
            via_eigenbasis += diff * diff / eig_u.values[k] * ov * ov;
        }
    }
    // route 2: A^{-1}-weighted quadratic form of the computed coefficients
    linalg::Lu<double> lu(h_u);
    double via_direct = 0.0;
    for (std::size_t j = 0; j < 2; ++j) {
        std::vector<double> r(universe.size());
        for (std::size_t p = 0; p < universe.size(); ++p) r[p] = res.coeffs[j][p];
        auto z = lu.solve(r);
        for (std::size_t p = 0; p < universe.size(); ++p) via_direct += r[p] * z[p];
    }
    REQUIRE(via_eigenbasis == Catch::Approx(via_direct).epsilon(1e-6));

    // and the computable H^-1 sum dominates it (V >= 1)
    auto norms = pw_dual_norms(res, basis.cutoff);
    REQUIRE(norms.eta_res_sq >= via_direct * (1 - 1e-9));
}

TEST_CASE("iterative path matches dense at N=600", "[slow]") {
    auto pot = build_potential(1, kTwoPi, 1.0, 100);
    PWBasis basis(1, kTwoPi, 600);
    auto dense = pw_solve_cluster(basis, pot, 2, 3);  // 1201 <= dense limit
    PwSolveOptions iterative;
    iterative.dense_limit = 100;  // force the block solver
    iterative.tol = 1e-11;
    auto it = pw_solve_cluster(basis, pot, 2, 3, iterative);
    for (std::size_t i = 0; i < 4; ++i)
        REQUIRE(it.lambda_low[i] == Catch::Approx(dense.lambda_low[i]).epsilon(1e-9));
}

TEST_CASE("efficiency inequality with the sup of the potential") {
    // direct evaluation of the planewave efficiency bound on a small case
    const int n = 6, kv = 10;
    auto pot = build_potential(1, kTwoPi, 1.0, kv);
    PWBasis basis(1, kTwoPi, n);
    auto sol = pw_solve_cluster(basis, pot, 2, 3);
    PWBasis universe(1, kTwoPi, n + kv);
    auto ref = pw_solve_cluster(universe, pot, 2, 3);

    auto err = pw_reference_errors(basis, sol, universe, ref);
    auto res = pw_residual(basis, pot, sol.basis.vectors, sol.cluster.values);
    auto norms = pw_dual_norms(res, basis.cutoff);

    const double lam_1 = ref.lambda_low[0];
    const double lam_m = ref.cluster.values.front();
    const double lam_M = ref.cluster.values.back();
    const double lam_Mh = sol.cluster.values.back();
    const double cbar = std::max(std::pow(lam_Mh / lam_1 - 1.0, 2.0), 1.0);
    const double l2sq = err.err_l2 * err.err_l2;
    const double l2p4 = l2sq * l2sq;
    const double onep = 1.0 + lam_M / (4.0 * lam_m) * l2sq;
    const double en2 = err.err_h1 * err.err_h1;
    const double rhs = cbar * en2 + 3.0 * std::pow(lam_M - lam_m, 2.0) / (4.0 * lam_m) * l2p4 +
                       3.0 / lam_m * (1.0 + 0.25 * l2p4) *
                           (2.0 * onep * onep * en2 * en2 + 2.0 * lam_M * lam_M * l2p4);
    REQUIRE(norms.eta_res_sq <= pot.sup_on_grid() * rhs * (1.0 + 1e-9));
}
