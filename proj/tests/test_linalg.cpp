#include <catch2/catch_amalgamated.hpp>

#include <complex>

#include "eigencert/linalg/dense_eig.hpp"
#include "eigencert/linalg/fft.hpp"
#include "eigencert/linalg/lobpcg.hpp"
#include "eigencert/linalg/lu.hpp"
#include "eigencert/linalg/saddle.hpp"
#include "eigencert/linalg/svd.hpp"

#include "helpers.hpp"

using namespace eigencert;
using namespace eigencert::linalg;
using testutil::random_hermitian;
using testutil::random_matrix;
using testutil::random_orthogonal;
using testutil::random_spd;
using testutil::symmetric_with_spectrum;

TEST_CASE("dense_eig 2x2 hand value") {
    Matrix<double> a(2, 2);
    a(0, 0) = 2;
    a(0, 1) = 1;
    a(1, 0) = 1;
    a(1, 1) = 2;
    auto r = dense_eig(a);
    REQUIRE(r.values[0] == Catch::Approx(1.0).margin(1e-13));
    REQUIRE(r.values[1] == Catch::Approx(3.0).margin(1e-13));
}

TEST_CASE("dense_eig identity with identity metric") {
    auto a = Matrix<double>::identity(5);
    auto b = Matrix<double>::identity(5);
    auto r = dense_eig(a, b);
    for (double v : r.values) REQUIRE(v == Catch::Approx(1.0).margin(1e-13));
}

TEST_CASE("dense_eig recovers a constructed spectrum") {
    SplitMix64 rng(7);
    std::vector<double> lambda{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    auto a = symmetric_with_spectrum(lambda, rng);
    auto r = dense_eig(a);
    for (std::size_t i = 0; i < lambda.size(); ++i)
        REQUIRE(r.values[i] == Catch::Approx(lambda[i]).margin(1e-12));
    // residual check ||A v - lambda v||
    for (std::size_t j = 0; j < lambda.size(); ++j) {
        std::vector<double> v(10);
        for (std::size_t i = 0; i < 10; ++i) v[i] = r.vectors(i, j);
        auto av = matvec(a, v);
        double res = 0;
        for (std::size_t i = 0; i < 10; ++i) res += (av[i] - r.values[j] * v[i]) * (av[i] - r.values[j] * v[i]);
        REQUIRE(std::sqrt(res) < 1e-10 * 10.0);
    }
}

TEST_CASE("dense_eig generalized pair is B-orthonormal and satisfies the pencil") {
    SplitMix64 rng(11);
    const std::size_t n = 24;
    auto a = random_spd(n, rng, 0.1);
    auto b = random_spd(n, rng, 1.0);
    auto r = dense_eig(a, b);
    // V^T B V = I
    for (std::size_t p = 0; p < n; ++p)
        for (std::size_t q = 0; q <= p; ++q) {
            double s = 0;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    s += r.vectors(i, p) * b(i, j) * r.vectors(j, q);
            REQUIRE(s == Catch::Approx(p == q ? 1.0 : 0.0).margin(1e-9));
        }
    // A v = lambda B v
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t i = 0; i < n; ++i) {
            double av = 0, bv = 0;
            for (std::size_t j = 0; j < n; ++j) {
                av += a(i, j) * r.vectors(j, p);
                bv += b(i, j) * r.vectors(j, p);
            }
            REQUIRE(av - r.values[p] * bv == Catch::Approx(0.0).margin(1e-7 * a.max_abs()));
        }
    }
    // trace identity: sum lambda_i = Tr(B^-1 A)
    auto l = cholesky(b);
    double tr = 0;
    std::vector<double> col(n);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) col[i] = a(i, j);
        solve_lower_inplace(l, col.data());
        solve_lower_adjoint_inplace(l, col.data());
        tr += col[j];
    }
    double sum = 0;
    for (double v : r.values) sum += v;
    REQUIRE(sum == Catch::Approx(tr).epsilon(1e-9));
}

TEST_CASE("dense_eig complex Hermitian") {
    SplitMix64 rng(13);
    auto a = random_hermitian(16, rng);
    auto r = dense_eig(a);
    for (std::size_t j = 0; j < 16; ++j) {
        std::vector<std::complex<double>> v(16);
        for (std::size_t i = 0; i < 16; ++i) v[i] = r.vectors(i, j);
        auto av = matvec(a, v);
        double res = 0;
        for (std::size_t i = 0; i < 16; ++i) res += std::norm(av[i] - r.values[j] * v[i]);
        REQUIRE(std::sqrt(res) < 1e-10 * a.max_abs() * 16);
    }
    for (std::size_t j = 1; j < 16; ++j) REQUIRE(r.values[j] >= r.values[j - 1]);
}

TEST_CASE("svd_small identity and diag(3,-1)") {
    auto s1 = svd_small(Matrix<double>::identity(3));
    for (double v : s1.singular) REQUIRE(v == Catch::Approx(1.0).margin(1e-14));

    Matrix<double> d(2, 2);
    d(0, 0) = 3;
    d(1, 1) = -1;
    auto s2 = svd_small(d);
    REQUIRE(s2.singular[0] == Catch::Approx(3.0).margin(1e-14));
    REQUIRE(s2.singular[1] == Catch::Approx(1.0).margin(1e-14));
}

TEST_CASE("svd_small random reconstruction and eig cross-check") {
    SplitMix64 rng(17);
    auto m = random_matrix(4, 4, rng);
    auto s = svd_small(m);
    // reconstruct
    Matrix<double> rec(4, 4);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) {
            double v = 0;
            for (std::size_t k = 0; k < 4; ++k) v += s.u(i, k) * s.singular[k] * s.v(j, k);
            rec(i, j) = v;
        }
    REQUIRE((rec - m).max_abs() < 1e-12 * m.max_abs());
    // singular values match sqrt of eigenvalues of M^T M
    Matrix<double> mtm = m.transposed() * m;
    auto e = dense_eig(mtm);
    for (std::size_t k = 0; k < 4; ++k)
        REQUIRE(s.singular[k] == Catch::Approx(std::sqrt(std::max(0.0, e.values[3 - k]))).margin(1e-11));
}

TEST_CASE("svd_small complex and rank-deficient") {
    SplitMix64 rng(19);
    Matrix<std::complex<double>> m(3, 3);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) m(i, j) = {rng.normal(), rng.normal()};
    // make the last column a multiple of the first: rank 2
    for (std::size_t i = 0; i < 3; ++i) m(i, 2) = m(i, 0) * std::complex<double>{0.5, -0.25};
    auto s = svd_small(m);
    REQUIRE(s.singular[2] < 1e-12);
    Matrix<std::complex<double>> rec(3, 3);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) {
            std::complex<double> v = 0;
            for (std::size_t k = 0; k < 3; ++k)
                v += s.u(i, k) * s.singular[k] * std::conj(s.v(j, k));
            rec(i, j) = v;
        }
    REQUIRE((rec - m).max_abs() < 1e-12 * std::max(1.0, m.max_abs()));
    // u unitary including the completed null column
    for (std::size_t p = 0; p < 3; ++p)
        for (std::size_t q = 0; q <= p; ++q) {
            std::complex<double> dot = 0;
            for (std::size_t i = 0; i < 3; ++i) dot += std::conj(s.u(i, p)) * s.u(i, q);
            REQUIRE(std::abs(dot - (p == q ? 1.0 : 0.0)) < 1e-12);
        }
}

TEST_CASE("solve_saddle hand example") {
    SaddleSystem sys;
    sys.a = Matrix<double>::identity(2);
    sys.b = Matrix<double>(1, 2);
    sys.b(0, 0) = 1;
    sys.f = {1, 1};
    sys.g = {0};
    auto sol = solve_saddle(sys);
    REQUIRE(sol.sigma[0] == Catch::Approx(0.0).margin(1e-12));
    REQUIRE(sol.sigma[1] == Catch::Approx(1.0).margin(1e-12));
    REQUIRE(sol.multiplier[0] == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("solve_saddle satisfies the constraint exactly") {
    SplitMix64 rng(23);
    const std::size_t nv = 12, nq = 5;
    SaddleSystem sys;
    sys.a = random_spd(nv, rng);
    sys.b = random_matrix(nq, nv, rng);
    sys.f.assign(nv, 0.0);
    std::vector<double> z(nv);
    for (auto& v : z) v = rng.normal();
    sys.g.resize(nq);
    for (std::size_t i = 0; i < nq; ++i) {
        double s = 0;
        for (std::size_t j = 0; j < nv; ++j) s += sys.b(i, j) * z[j];
        sys.g[i] = s;
    }
    auto sol = solve_saddle(sys);
    for (std::size_t i = 0; i < nq; ++i) {
        double s = 0;
        for (std::size_t j = 0; j < nv; ++j) s += sys.b(i, j) * sol.sigma[j];
        REQUIRE(s == Catch::Approx(sys.g[i]).margin(1e-11 * (1.0 + std::abs(sys.g[i]))));
    }
}

// Constrained least squares via the null-space method, as an independent
// oracle for the KKT solve.
static std::vector<double> nullspace_oracle(const SaddleSystem& sys) {
    const std::size_t nv = sys.a.rows(), nq = sys.b.rows();
    // particular solution: x_p = B^T (B B^T)^{-1} g
    Matrix<double> bbt(nq, nq);
    for (std::size_t i = 0; i < nq; ++i)
        for (std::size_t j = 0; j < nq; ++j) {
            double s = 0;
            for (std::size_t k = 0; k < nv; ++k) s += sys.b(i, k) * sys.b(j, k);
            bbt(i, j) = s;
        }
    Lu<double> lu_bbt(bbt);
    auto y = lu_bbt.solve(sys.g);
    std::vector<double> xp(nv, 0.0);
    for (std::size_t k = 0; k < nv; ++k)
        for (std::size_t i = 0; i < nq; ++i) xp[k] += sys.b(i, k) * y[i];
    // null basis by Gram-Schmidt of projected canonical vectors
    std::vector<std::vector<double>> basis;
    for (std::size_t c = 0; c < nv && basis.size() < nv - nq; ++c) {
        std::vector<double> v(nv, 0.0);
        v[c] = 1.0;
        auto bv = lu_bbt.solve([&] {
            std::vector<double> t(nq, 0.0);
            for (std::size_t i = 0; i < nq; ++i)
                for (std::size_t k = 0; k < nv; ++k) t[i] += sys.b(i, k) * v[k];
            return t;
        }());
        for (std::size_t k = 0; k < nv; ++k)
            for (std::size_t i = 0; i < nq; ++i) v[k] -= sys.b(i, k) * bv[i];
        for (const auto& u : basis) {
            double d = 0;
            for (std::size_t k = 0; k < nv; ++k) d += u[k] * v[k];
            for (std::size_t k = 0; k < nv; ++k) v[k] -= d * u[k];
        }
        double nn = 0;
        for (double t : v) nn += t * t;
        if (nn < 1e-16) continue;
        nn = std::sqrt(nn);
        for (double& t : v) t /= nn;
        basis.push_back(v);
    }
    // reduced SPD solve: (Z^T A Z) c = Z^T (f - A x_p)
    const std::size_t nz = basis.size();
    Matrix<double> red(nz, nz);
    std::vector<double> rhs(nz, 0.0), axp(nv, 0.0);
    for (std::size_t i = 0; i < nv; ++i)
        for (std::size_t j = 0; j < nv; ++j) axp[i] += sys.a(i, j) * xp[j];
    for (std::size_t p = 0; p < nz; ++p) {
        std::vector<double> az(nv, 0.0);
        for (std::size_t i = 0; i < nv; ++i)
            for (std::size_t j = 0; j < nv; ++j) az[i] += sys.a(i, j) * basis[p][j];
        for (std::size_t q = 0; q < nz; ++q) {
            double s = 0;
            for (std::size_t i = 0; i < nv; ++i) s += basis[q][i] * az[i];
            red(q, p) = s;
        }
        double s = 0;
        for (std::size_t i = 0; i < nv; ++i) s += basis[p][i] * (sys.f[i] - axp[i]);
        rhs[p] = s;
    }
    Lu<double> lu_red(red);
    auto c = lu_red.solve(rhs);
    std::vector<double> x = xp;
    for (std::size_t p = 0; p < nz; ++p)
        for (std::size_t i = 0; i < nv; ++i) x[i] += c[p] * basis[p][i];
    return x;
}

TEST_CASE("solve_saddle matches null-space oracle") {
    SplitMix64 rng(29);
    for (int rep = 0; rep < 5; ++rep) {
        const std::size_t nv = 14, nq = 6;
        SaddleSystem sys;
        sys.a = random_spd(nv, rng);
        sys.b = random_matrix(nq, nv, rng);
        sys.f.resize(nv);
        sys.g.resize(nq);
        for (auto& v : sys.f) v = rng.normal();
        for (auto& v : sys.g) v = rng.normal();
        auto sol = solve_saddle(sys);
        auto oracle = nullspace_oracle(sys);
        for (std::size_t i = 0; i < nv; ++i)
            REQUIRE(sol.sigma[i] == Catch::Approx(oracle[i]).margin(1e-9 * (1.0 + std::abs(oracle[i]))));
    }
}

TEST_CASE("partial_eig on diag(1..100)") {
    const std::size_t n = 100;
    ApplyFn a = [n](const double* x, double* y) {
        for (std::size_t i = 0; i < n; ++i) y[i] = static_cast<double>(i + 1) * x[i];
    };
    PartialEigOptions opt;
    opt.tol = 1e-10;
    auto r = partial_eig(n, a, std::nullopt, 3, opt);
    REQUIRE(r.values[0] == Catch::Approx(1.0).margin(1e-8));
    REQUIRE(r.values[1] == Catch::Approx(2.0).margin(1e-8));
    REQUIRE(r.values[2] == Catch::Approx(3.0).margin(1e-8));
    for (std::size_t j = 0; j < 3; ++j) {
        // canonical basis vector up to sign
        REQUIRE(std::abs(r.vectors(j, j)) == Catch::Approx(1.0).margin(1e-6));
    }
}

TEST_CASE("partial_eig generalized cross-validates against dense_eig") {
    SplitMix64 rng(31);
    const std::size_t n = 180;
    std::vector<double> lambda(n);
    for (std::size_t i = 0; i < n; ++i) lambda[i] = 1.0 + 0.37 * static_cast<double>(i * i);
    auto a = symmetric_with_spectrum(lambda, rng);
    auto b = random_spd(n, rng, 2.0);
    auto dense = dense_eig(a, b);

    ApplyFn fa = [&](const double* x, double* y) {
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0;
            for (std::size_t j = 0; j < n; ++j) s += a(i, j) * x[j];
            y[i] = s;
        }
    };
    ApplyFn fb = [&](const double* x, double* y) {
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0;
            for (std::size_t j = 0; j < n; ++j) s += b(i, j) * x[j];
            y[i] = s;
        }
    };
    PartialEigOptions opt;
    opt.tol = 1e-10;
    opt.max_iterations = 4000;
    auto r = partial_eig(n, fa, fb, 4, opt);
    for (std::size_t j = 0; j < 4; ++j)
        REQUIRE(r.values[j] == Catch::Approx(dense.values[j]).epsilon(1e-9));
}

TEST_CASE("fft roundtrip and convolution") {
    SplitMix64 rng(37);
    std::vector<cplx> x(64);
    for (auto& v : x) v = {rng.normal(), rng.normal()};
    auto y = x;
    fft_inplace(y, false);
    fft_inplace(y, true);
    for (std::size_t i = 0; i < x.size(); ++i) REQUIRE(std::abs(y[i] - x[i]) < 1e-12);

    // linear convolution via zero-padded fft vs direct
    std::vector<double> a{1, 2, 3}, b{0.5, -1, 0.25, 2};
    const std::size_t out_len = a.size() + b.size() - 1;
    const std::size_t p = next_pow2(out_len);
    std::vector<cplx> fa(p), fb(p);
    for (std::size_t i = 0; i < a.size(); ++i) fa[i] = a[i];
    for (std::size_t i = 0; i < b.size(); ++i) fb[i] = b[i];
    fft_inplace(fa, false);
    fft_inplace(fb, false);
    for (std::size_t i = 0; i < p; ++i) fa[i] *= fb[i];
    fft_inplace(fa, true);
    for (std::size_t i = 0; i < out_len; ++i) {
        double direct = 0;
        for (std::size_t k = 0; k < a.size(); ++k)
            if (i >= k && i - k < b.size()) direct += a[k] * b[i - k];
        REQUIRE(fa[i].real() == Catch::Approx(direct).margin(1e-12));
        REQUIRE(std::abs(fa[i].imag()) < 1e-12);
    }
}
