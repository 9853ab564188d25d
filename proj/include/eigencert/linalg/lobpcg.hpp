#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "eigencert/core/error.hpp"
#include "eigencert/core/matrix.hpp"
#include "eigencert/core/rng.hpp"
#include "eigencert/linalg/dense_eig.hpp"

namespace eigencert::linalg {

using ApplyFn = std::function<void(const double*, double*)>;

namespace detail {

// Column-major block of vectors.
struct ColBlock {
    std::size_t n = 0;
    std::size_t cols = 0;
    std::vector<double> d;

    ColBlock() = default;
    ColBlock(std::size_t n_, std::size_t cols_) : n(n_), cols(cols_), d(n_ * cols_, 0.0) {}
    double* col(std::size_t j) { return d.data() + j * n; }
    const double* col(std::size_t j) const { return d.data() + j * n; }

    void resize_cols(std::size_t c) {
        cols = c;
        d.resize(n * c);
    }
};

inline void block_apply(const ApplyFn& op, const ColBlock& x, ColBlock& y) {
    y.n = x.n;
    y.resize_cols(x.cols);
    for (std::size_t j = 0; j < x.cols; ++j) op(x.col(j), y.col(j));
}

// G = X^T Y
inline Matrix<double> gram(const ColBlock& x, const ColBlock& y) {
    Matrix<double> g(x.cols, y.cols);
    for (std::size_t i = 0; i < x.cols; ++i) {
        const double* xi = x.col(i);
        for (std::size_t j = 0; j < y.cols; ++j) {
            const double* yj = y.col(j);
            double s = 0.0;
            for (std::size_t r = 0; r < x.n; ++r) s += xi[r] * yj[r];
            g(i, j) = s;
        }
    }
    return g;
}

// Y = X * C
inline ColBlock combine(const ColBlock& x, const Matrix<double>& c) {
    ColBlock y(x.n, c.cols());
    for (std::size_t k = 0; k < x.cols; ++k) {
        const double* xk = x.col(k);
        for (std::size_t j = 0; j < c.cols(); ++j) {
            const double coef = c(k, j);
            if (coef == 0.0) continue;
            double* yj = y.col(j);
            for (std::size_t r = 0; r < x.n; ++r) yj[r] += coef * xk[r];
        }
    }
    return y;
}

// Jacobi-preconditioned CG for B z = r; B is SPD and well-conditioned here
// (consistent P1 mass matrices), so a handful of iterations suffice.
inline void cg_solve(const ApplyFn& b, const std::vector<double>& diag_b, const double* rhs,
                     double* z, std::size_t n, double rel_tol, std::size_t max_it) {
    std::vector<double> r(rhs, rhs + n), p(n), ap(n), zv(n, 0.0), prec_r(n);
    double rhs_norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) rhs_norm += rhs[i] * rhs[i];
    rhs_norm = std::sqrt(rhs_norm);
    if (rhs_norm == 0.0) {
        std::fill(z, z + n, 0.0);
        return;
    }
    auto precond = [&](const std::vector<double>& v, std::vector<double>& out) {
        for (std::size_t i = 0; i < n; ++i) out[i] = v[i] / diag_b[i];
    };
    precond(r, prec_r);
    p = prec_r;
    double rz = 0.0;
    for (std::size_t i = 0; i < n; ++i) rz += r[i] * prec_r[i];
    for (std::size_t it = 0; it < max_it; ++it) {
        b(p.data(), ap.data());
        double pap = 0.0;
        for (std::size_t i = 0; i < n; ++i) pap += p[i] * ap[i];
        if (pap <= 0.0) break;
        const double alpha = rz / pap;
        double rnorm = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            zv[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
            rnorm += r[i] * r[i];
        }
        if (std::sqrt(rnorm) <= rel_tol * rhs_norm) break;
        precond(r, prec_r);
        double rz_new = 0.0;
        for (std::size_t i = 0; i < n; ++i) rz_new += r[i] * prec_r[i];
        const double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t i = 0; i < n; ++i) p[i] = prec_r[i] + beta * p[i];
    }
    std::copy(zv.begin(), zv.end(), z);
}

} // namespace detail

struct PartialEigOptions {
    double tol = 1e-9;                 // ||A v - lambda B v||_{B^-1} <= tol * |lambda|
    std::uint64_t seed = 42;
    std::size_t max_iterations = 2000;
    std::vector<double> diag_precond;  // optional: w = r / diag entrywise
    std::vector<double> diag_b;        // optional: diagonal of B (residual norms, CG)
    Matrix<double> initial_guess;      // optional warm start, n x m columns
};

struct PartialEigResult {
    std::vector<double> values;        // ascending, k entries
    Matrix<double> vectors;            // n x k, B-orthonormal
    std::size_t iterations = 0;
};

// Lowest-k eigenpairs of a self-adjoint pencil (A, B) by a locally optimal
// block preconditioned conjugate gradient iteration with a deterministic
// seeded start block of size k + max(4, k/2). B defaults to the identity.
inline PartialEigResult partial_eig(std::size_t n, const ApplyFn& apply_a,
                                    const std::optional<ApplyFn>& apply_b, std::size_t k,
                                    const PartialEigOptions& opt = {}) {
    using detail::ColBlock;
    if (k == 0 || k > n) throw DimensionMismatch("partial_eig: invalid k");
    const std::size_t block = std::min<std::size_t>(n, k + std::max<std::size_t>(4, k / 2));
    const bool has_b = apply_b.has_value();

    std::vector<double> diag_b(n, 1.0);
    if (has_b) {
        if (!opt.diag_b.empty()) {
            if (opt.diag_b.size() != n) throw DimensionMismatch("partial_eig: diag_b size");
            diag_b = opt.diag_b;
        } else if (n <= 1024) {
            // probe the diagonal of B column by column (small problems only)
            std::vector<double> e(n, 0.0), be(n);
            for (std::size_t i = 0; i < n; ++i) {
                std::fill(e.begin(), e.end(), 0.0);
                e[i] = 1.0;
                (*apply_b)(e.data(), be.data());
                diag_b[i] = (be[i] > 0.0) ? be[i] : 1.0;
            }
        }
    }

    auto b_norm_inv = [&](const double* r, double* scratch) -> double {
        if (!has_b) {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) s += r[i] * r[i];
            return std::sqrt(s);
        }
        detail::cg_solve(*apply_b, diag_b, r, scratch, n, 1e-8, 200);
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += r[i] * scratch[i];
        return std::sqrt(std::max(s, 0.0));
    };

    SplitMix64 rng(opt.seed);
    ColBlock x(n, block);
    {
        const std::size_t guess_cols =
            std::min<std::size_t>(opt.initial_guess.cols(), block);
        for (std::size_t j = 0; j < guess_cols; ++j)
            for (std::size_t i = 0; i < n; ++i) x.col(j)[i] = opt.initial_guess(i, j);
        for (std::size_t j = guess_cols; j < block; ++j)
            for (std::size_t i = 0; i < n; ++i) x.col(j)[i] = rng.normal();
    }

    ColBlock ax, bx;
    auto apply_b_block = [&](const ColBlock& src, ColBlock& dst) {
        if (has_b)
            detail::block_apply(*apply_b, src, dst);
        else
            dst = src;
    };

    // B-orthonormalize the columns of a block (in place); returns number kept.
    // Companion blocks (A*, B* images) are combined the same way.
    auto b_orthonormalize = [&](ColBlock& v, ColBlock* av, ColBlock* bv) -> std::size_t {
        ColBlock bvv;
        if (bv && bv->cols == v.cols)
            bvv = *bv;
        else
            apply_b_block(v, bvv);
        Matrix<double> g = detail::gram(v, bvv);
        // Cholesky with column dropping
        const std::size_t m = v.cols;
        std::vector<std::size_t> keep;
        Matrix<double> l(m, m);
        std::vector<bool> dropped(m, false);
        for (std::size_t j = 0; j < m; ++j) {
            double diag = g(j, j);
            for (std::size_t p : keep) diag -= l(j, p) * l(j, p);
            if (diag <= 1e-24 * std::max(1.0, g(j, j)) || !(diag > 0)) {
                dropped[j] = true;
                continue;
            }
            const double ljj = std::sqrt(diag);
            l(j, j) = ljj;
            for (std::size_t i = j + 1; i < m; ++i) {
                double s = g(i, j);
                for (std::size_t p : keep) s -= l(i, p) * l(j, p);
                l(i, j) = s / ljj;
            }
            keep.push_back(j);
        }
        // C = columns of L^{-T} restricted to kept indices
        const std::size_t mk = keep.size();
        Matrix<double> c(m, mk);
        for (std::size_t jj = 0; jj < mk; ++jj) {
            // solve L^T y = e_{keep[jj]} over the kept submatrix
            std::vector<double> y(mk, 0.0);
            for (std::size_t ii = mk; ii-- > 0;) {
                double s = (ii == jj) ? 1.0 : 0.0;
                for (std::size_t pp = ii + 1; pp < mk; ++pp)
                    s -= l(keep[pp], keep[ii]) * y[pp];
                y[ii] = s / l(keep[ii], keep[ii]);
            }
            for (std::size_t ii = 0; ii < mk; ++ii) c(keep[ii], jj) = y[ii];
        }
        v = detail::combine(v, c);
        if (av && av->cols == m) *av = detail::combine(*av, c);
        if (bv && bv->cols == m)
            *bv = detail::combine(*bv, c);
        else if (bv)
            apply_b_block(v, *bv);
        return mk;
    };

    int restarts = 0;
restart:
    apply_b_block(x, bx);
    if (b_orthonormalize(x, nullptr, &bx) < block) {
        if (restarts++ >= 1) throw Breakdown("partial_eig: start block rank loss");
        for (std::size_t j = 0; j < block; ++j)
            for (std::size_t i = 0; i < n; ++i) x.col(j)[i] = rng.normal();
        goto restart;
    }
    detail::block_apply(apply_a, x, ax);

    // initial Rayleigh-Ritz
    std::vector<double> theta(block, 0.0);
    {
        Matrix<double> ga = detail::gram(x, ax);
        for (std::size_t i = 0; i < block; ++i)
            for (std::size_t j = i + 1; j < block; ++j) {
                double v = 0.5 * (ga(i, j) + ga(j, i));
                ga(i, j) = ga(j, i) = v;
            }
        auto ev = dense_eig(ga);
        Matrix<double> c(block, block);
        for (std::size_t i = 0; i < block; ++i)
            for (std::size_t j = 0; j < block; ++j) c(i, j) = ev.vectors(i, j);
        x = detail::combine(x, c);
        ax = detail::combine(ax, c);
        bx = detail::combine(bx, c);
        theta = ev.values;
    }

    ColBlock p, ap, bp;
    std::vector<double> scratch(n);
    std::size_t iterations = 0;
    std::vector<bool> converged(block, false);

    for (std::size_t it = 0; it < opt.max_iterations; ++it) {
        iterations = it + 1;
        // residuals and convergence
        ColBlock r(n, block);
        for (std::size_t j = 0; j < block; ++j) {
            const double* axj = ax.col(j);
            const double* bxj = bx.col(j);
            double* rj = r.col(j);
            for (std::size_t i = 0; i < n; ++i) rj[i] = axj[i] - theta[j] * bxj[i];
        }
        std::size_t done = 0;
        for (std::size_t j = 0; j < block; ++j) {
            if (j < k) {
                // cheap proxy first, exact B^{-1} norm when close
                double proxy = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    const double v = r.col(j)[i];
                    proxy += v * v / diag_b[i];
                }
                proxy = std::sqrt(proxy);
                const double target = opt.tol * std::max(std::abs(theta[j]), 1e-300);
                if (proxy <= 4.0 * target) {
                    const double exact = b_norm_inv(r.col(j), scratch.data());
                    converged[j] = (exact <= target);
                } else {
                    converged[j] = false;
                }
                if (converged[j]) ++done;
            }
        }
        if (done == k) break;

        // preconditioned residuals for the active columns
        std::vector<std::size_t> active;
        for (std::size_t j = 0; j < block; ++j)
            if (!(j < k && converged[j])) active.push_back(j);
        ColBlock w(n, active.size());
        for (std::size_t jj = 0; jj < active.size(); ++jj) {
            const double* rj = r.col(active[jj]);
            double* wj = w.col(jj);
            if (!opt.diag_precond.empty()) {
                for (std::size_t i = 0; i < n; ++i) wj[i] = rj[i] / opt.diag_precond[i];
            } else {
                std::copy(rj, rj + n, wj);
            }
            double nn = 0.0;
            for (std::size_t i = 0; i < n; ++i) nn += wj[i] * wj[i];
            if (nn > 0.0) {
                const double inv = 1.0 / std::sqrt(nn);
                for (std::size_t i = 0; i < n; ++i) wj[i] *= inv;
            }
        }

        // B-orthogonalize W against X (and P), then orthonormalize
        ColBlock bw;
        auto project_out = [&](ColBlock& v, const ColBlock& basis, const ColBlock& bbasis) {
            Matrix<double> coef = detail::gram(bbasis, v);
            for (std::size_t kcol = 0; kcol < basis.cols; ++kcol) {
                const double* bk = basis.col(kcol);
                for (std::size_t j = 0; j < v.cols; ++j) {
                    const double cc = coef(kcol, j);
                    if (cc == 0.0) continue;
                    double* vj = v.col(j);
                    for (std::size_t i = 0; i < n; ++i) vj[i] -= cc * bk[i];
                }
            }
        };
        project_out(w, x, bx);
        if (p.cols > 0) project_out(w, p, bp);
        std::size_t wk = b_orthonormalize(w, nullptr, &bw);
        if (wk == 0) {
            if (restarts++ >= 1)
                throw NoConvergence("partial_eig: search space collapsed before convergence");
            for (std::size_t j = 0; j < block; ++j)
                for (std::size_t i = 0; i < n; ++i) x.col(j)[i] += 1e-8 * rng.normal();
            p = ColBlock();
            ap = ColBlock();
            bp = ColBlock();
            goto restart;
        }
        ColBlock aw;
        detail::block_apply(apply_a, w, aw);

        // subspace S = [X W P]
        const std::size_t q = block + w.cols + p.cols;
        ColBlock s(n, q), as(n, q), bs(n, q);
        auto paste = [&](const ColBlock& src, ColBlock& dst, std::size_t at) {
            for (std::size_t j = 0; j < src.cols; ++j)
                std::copy(src.col(j), src.col(j) + n, dst.col(at + j));
        };
        paste(x, s, 0);
        paste(w, s, block);
        paste(ax, as, 0);
        paste(aw, as, block);
        paste(bx, bs, 0);
        paste(bw, bs, block);
        if (p.cols > 0) {
            paste(p, s, block + w.cols);
            paste(ap, as, block + w.cols);
            paste(bp, bs, block + w.cols);
        }

        Matrix<double> ga = detail::gram(s, as);
        Matrix<double> gb = detail::gram(s, bs);
        for (std::size_t i = 0; i < q; ++i)
            for (std::size_t j = i + 1; j < q; ++j) {
                double v = 0.5 * (ga(i, j) + ga(j, i));
                ga(i, j) = ga(j, i) = v;
                v = 0.5 * (gb(i, j) + gb(j, i));
                gb(i, j) = gb(j, i) = v;
            }
        EigResult<double> rr;
        try {
            rr = dense_eig(ga, gb);
        } catch (const NotSpd&) {
            // drop P and retry once within this iteration
            if (p.cols > 0) {
                p = ColBlock();
                ap = ColBlock();
                bp = ColBlock();
                continue;
            }
            if (restarts++ >= 1) throw Breakdown("partial_eig: Gram matrix rank loss");
            goto restart;
        }

        Matrix<double> c(q, block);
        for (std::size_t i = 0; i < q; ++i)
            for (std::size_t j = 0; j < block; ++j) c(i, j) = rr.vectors(i, j);
        for (std::size_t j = 0; j < block; ++j) theta[j] = rr.values[j];

        // next P from the W/P components only
        Matrix<double> c_wp(q, block);
        for (std::size_t i = block; i < q; ++i)
            for (std::size_t j = 0; j < block; ++j) c_wp(i, j) = c(i, j);
        ColBlock p_new = detail::combine(s, c_wp);
        ColBlock ap_new = detail::combine(as, c_wp);
        ColBlock bp_new = detail::combine(bs, c_wp);

        x = detail::combine(s, c);
        ax = detail::combine(as, c);
        bx = detail::combine(bs, c);

        p = std::move(p_new);
        ap = std::move(ap_new);
        bp = std::move(bp_new);
        std::size_t pk = b_orthonormalize(p, &ap, &bp);
        if (pk == 0) {
            p = ColBlock();
            ap = ColBlock();
            bp = ColBlock();
        }
        // refresh cached images now and then; the combinations drift in
        // floating point over hundreds of iterations
        if (it % 128 == 127) {
            detail::block_apply(apply_a, x, ax);
            apply_b_block(x, bx);
        }
    }

    bool all_done = true;
    for (std::size_t j = 0; j < k; ++j) all_done = all_done && converged[j];
    if (!all_done) throw NoConvergence("partial_eig: iteration cap reached");

    PartialEigResult out;
    out.values.assign(theta.begin(), theta.begin() + k);
    out.vectors = Matrix<double>(n, k);
    for (std::size_t j = 0; j < k; ++j) {
        // deterministic sign: largest-|entry| positive
        const double* xj = x.col(j);
        std::size_t imax = 0;
        double amax = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double a = std::abs(xj[i]);
            if (a > amax) {
                amax = a;
                imax = i;
            }
        }
        const double sgn = (xj[imax] >= 0.0) ? 1.0 : -1.0;
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, j) = sgn * xj[i];
    }
    out.iterations = iterations;
    return out;
}

} // namespace eigencert::linalg
