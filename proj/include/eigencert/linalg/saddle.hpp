#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "eigencert/core/error.hpp"
#include "eigencert/core/matrix.hpp"

namespace eigencert::linalg {

// Symmetric indefinite LDL^T with Bunch-Kaufman pivoting. Real double only;
// the saddle-point patch systems this serves are always real.
class Ldlt {
  public:
    explicit Ldlt(Matrix<double> a, double pivot_tol = 1e-13)
        : a_(std::move(a)), n_(a_.rows()), perm_(n_), block2_(n_, false) {
        if (a_.cols() != n_) throw DimensionMismatch("ldlt: square matrix expected");
        for (std::size_t i = 0; i < n_; ++i) perm_[i] = i;
        const double alpha = (1.0 + std::sqrt(17.0)) / 8.0;
        const double scale = std::max(a_.max_abs(), 1.0);
        const double tiny = pivot_tol * scale;

        std::size_t k = 0;
        while (k < n_) {
            // largest off-diagonal magnitude in column k at/below row k+1
            double omega1 = 0.0;
            std::size_t r = k;
            for (std::size_t i = k + 1; i < n_; ++i) {
                const double v = std::abs(a_(i, k));
                if (v > omega1) {
                    omega1 = v;
                    r = i;
                }
            }
            const double akk = std::abs(a_(k, k));
            bool use_two = false;
            if (akk >= alpha * omega1) {
                // 1x1 pivot in place
            } else {
                double omega_r = 0.0;
                for (std::size_t i = k; i < n_; ++i) {
                    if (i == r) continue;
                    const double v = (i >= r) ? std::abs(a_(i, r)) : std::abs(a_(r, i));
                    omega_r = std::max(omega_r, v);
                }
                if (akk * omega_r >= alpha * omega1 * omega1) {
                    // 1x1 pivot in place
                } else if (std::abs(a_(r, r)) >= alpha * omega_r) {
                    swap_sym(k, r);
                } else {
                    swap_sym(k + 1, r);
                    use_two = true;
                }
            }

            if (!use_two) {
                const double d = a_(k, k);
                if (std::abs(d) <= tiny) throw SingularSystem("ldlt: pivot below tolerance");
                for (std::size_t i = k + 1; i < n_; ++i) {
                    const double cik = a_(i, k);
                    if (cik == 0.0) continue;
                    for (std::size_t j = k + 1; j <= i; ++j) a_(i, j) -= cik * a_(j, k) / d;
                }
                for (std::size_t i = k + 1; i < n_; ++i) a_(i, k) /= d;
                k += 1;
            } else {
                const double d11 = a_(k, k), d21 = a_(k + 1, k), d22 = a_(k + 1, k + 1);
                const double det = d11 * d22 - d21 * d21;
                if (std::abs(det) <= tiny * tiny)
                    throw SingularSystem("ldlt: 2x2 pivot below tolerance");
                block2_[k] = true;
                for (std::size_t i = k + 2; i < n_; ++i) {
                    const double b1 = a_(i, k), b2 = a_(i, k + 1);
                    const double l1 = (d22 * b1 - d21 * b2) / det;
                    const double l2 = (-d21 * b1 + d11 * b2) / det;
                    for (std::size_t j = k + 2; j <= i; ++j)
                        a_(i, j) -= l1 * a_(j, k) + l2 * a_(j, k + 1);
                }
                for (std::size_t i = k + 2; i < n_; ++i) {
                    const double b1 = a_(i, k), b2 = a_(i, k + 1);
                    a_(i, k) = (d22 * b1 - d21 * b2) / det;
                    a_(i, k + 1) = (-d21 * b1 + d11 * b2) / det;
                }
                k += 2;
            }
        }
    }

    std::vector<double> solve(const std::vector<double>& b) const {
        if (b.size() != n_) throw DimensionMismatch("ldlt solve");
        std::vector<double> x(n_);
        for (std::size_t i = 0; i < n_; ++i) x[i] = b[perm_[i]];
        // forward: L y = Pb
        std::size_t k = 0;
        while (k < n_) {
            if (!block2_[k]) {
                const double xk = x[k];
                for (std::size_t i = k + 1; i < n_; ++i) x[i] -= a_(i, k) * xk;
                k += 1;
            } else {
                const double x1 = x[k], x2 = x[k + 1];
                for (std::size_t i = k + 2; i < n_; ++i)
                    x[i] -= a_(i, k) * x1 + a_(i, k + 1) * x2;
                k += 2;
            }
        }
        // diagonal: D z = y
        k = 0;
        while (k < n_) {
            if (!block2_[k]) {
                x[k] /= a_(k, k);
                k += 1;
            } else {
                const double d11 = a_(k, k), d21 = a_(k + 1, k), d22 = a_(k + 1, k + 1);
                const double det = d11 * d22 - d21 * d21;
                const double y1 = x[k], y2 = x[k + 1];
                x[k] = (d22 * y1 - d21 * y2) / det;
                x[k + 1] = (-d21 * y1 + d11 * y2) / det;
                k += 2;
            }
        }
        // backward: L^T w = z
        k = n_;
        while (k > 0) {
            const std::size_t kk = k - 1;
            if (kk > 0 && block2_[kk - 1]) {
                double s1 = x[kk - 1], s2 = x[kk];
                for (std::size_t i = kk + 1; i < n_; ++i) {
                    s1 -= a_(i, kk - 1) * x[i];
                    s2 -= a_(i, kk) * x[i];
                }
                x[kk - 1] = s1;
                x[kk] = s2;
                k -= 2;
            } else {
                double s = x[kk];
                for (std::size_t i = kk + 1; i < n_; ++i) s -= a_(i, kk) * x[i];
                x[kk] = s;
                k -= 1;
            }
        }
        std::vector<double> out(n_);
        for (std::size_t i = 0; i < n_; ++i) out[perm_[i]] = x[i];
        return out;
    }

  private:
    void swap_sym(std::size_t p, std::size_t q) {
        if (p == q) return;
        if (p > q) std::swap(p, q);
        for (std::size_t j = 0; j < p; ++j) std::swap(a_(p, j), a_(q, j));
        for (std::size_t i = p + 1; i < q; ++i) std::swap(a_(i, p), a_(q, i));
        for (std::size_t i = q + 1; i < n_; ++i) std::swap(a_(i, p), a_(i, q));
        std::swap(a_(p, p), a_(q, q));
        std::swap(perm_[p], perm_[q]);
    }

    Matrix<double> a_;
    std::size_t n_;
    std::vector<std::size_t> perm_;
    std::vector<bool> block2_;
};

// Patch-sized KKT system [[A, B^T],[B, 0]] [sigma; p] = [f; g].
struct SaddleSystem {
    Matrix<double> a;        // SPD, n_v x n_v
    Matrix<double> b;        // n_q x n_v constraint block
    std::vector<double> f;   // length n_v
    std::vector<double> g;   // length n_q
};

struct SaddleSolution {
    std::vector<double> sigma;
    std::vector<double> multiplier;
    double residual = 0.0;
};

inline SaddleSolution solve_saddle(const SaddleSystem& sys) {
    const std::size_t nv = sys.a.rows();
    const std::size_t nq = sys.b.rows();
    if (sys.a.cols() != nv || sys.b.cols() != nv || sys.f.size() != nv || sys.g.size() != nq)
        throw DimensionMismatch("solve_saddle blocks");
    const std::size_t n = nv + nq;
    if (n > 2000) throw DimensionMismatch("solve_saddle: patch-sized systems only");

    Matrix<double> kkt(n, n);
    for (std::size_t i = 0; i < nv; ++i)
        for (std::size_t j = 0; j < nv; ++j) kkt(i, j) = sys.a(i, j);
    for (std::size_t i = 0; i < nq; ++i)
        for (std::size_t j = 0; j < nv; ++j) {
            kkt(nv + i, j) = sys.b(i, j);
            kkt(j, nv + i) = sys.b(i, j);
        }
    std::vector<double> rhs(n);
    for (std::size_t i = 0; i < nv; ++i) rhs[i] = sys.f[i];
    for (std::size_t i = 0; i < nq; ++i) rhs[nv + i] = sys.g[i];

    Ldlt fact(kkt);
    std::vector<double> x = fact.solve(rhs);

    auto residual_of = [&](const std::vector<double>& xx) {
        std::vector<double> r(n);
        for (std::size_t i = 0; i < n; ++i) {
            double s = rhs[i];
            const double* row = kkt.row(i);
            for (std::size_t j = 0; j < n; ++j) s -= row[j] * xx[j];
            r[i] = s;
        }
        return r;
    };

    double fg_norm = norm2(sys.f) + norm2(sys.g);
    const double target = 1e-11 * (fg_norm + 1e-30);
    std::vector<double> r = residual_of(x);
    for (int refine = 0; refine < 3 && norm2(r) > target; ++refine) {
        std::vector<double> dx = fact.solve(r);
        for (std::size_t i = 0; i < n; ++i) x[i] += dx[i];
        r = residual_of(x);
    }
    if (norm2(r) > std::max(target, 1e-11 * kkt.max_abs() * norm2(x)))
        throw SingularSystem("solve_saddle: refinement stalled");

    SaddleSolution sol;
    sol.sigma.assign(x.begin(), x.begin() + nv);
    sol.multiplier.assign(x.begin() + nv, x.end());
    sol.residual = norm2(r);
    return sol;
}

} // namespace eigencert::linalg
