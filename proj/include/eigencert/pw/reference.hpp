#pragma once

#include <cmath>
#include <cstddef>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "eigencert/core/error.hpp"
#include "eigencert/pw/hamiltonian.hpp"
#include "eigencert/spectral/distances.hpp"
#include "eigencert/spectral/subspace.hpp"

namespace eigencert::pw {

struct PwErrors {
    double err_lambda = 0.0;
    double err_h1 = 0.0;
    double err_l2 = 0.0;
};

// Errors of a cutoff-N cluster measured against a finer reference solve of
// the same potential: zero-pad into the reference index set, take overlaps,
// and evaluate the density-matrix distances with the conforming
// substitution.
inline PwErrors pw_reference_errors(const PWBasis& basis, const PwClusterSolution& approx,
                                    const PWBasis& ref_basis, const PwClusterSolution& ref) {
    if (ref_basis.cutoff < basis.cutoff)
        throw ConfigError("pw_reference_errors: reference cutoff below approximation cutoff");
    if (approx.cluster.m != ref.cluster.m || approx.cluster.M != ref.cluster.M)
        throw ClusterMismatch("pw_reference_errors: cluster indices differ");
    const std::size_t j = approx.cluster.size();

    spectral::SubspaceBasis<double> padded;
    padded.ambient_dim = ref_basis.size();
    padded.vectors = Matrix<double>(ref_basis.size(), j);
    for (std::size_t c = 0; c < j; ++c)
        for (std::size_t p = 0; p < basis.size(); ++p) {
            const std::size_t rp = ref_basis.position(basis.index_set[p]);
            if (rp == PWBasis::npos) throw DimensionMismatch("pw_reference_errors: padding");
            padded.vectors(rp, c) = approx.basis.vectors(p, c);
        }

    auto m = spectral::overlap(ref.basis, padded);
    if (spectral::smallest_singular_value(m) < 1e-6)
        throw ClusterMismatch("pw_reference_errors: overlap nearly rank deficient");

    PwErrors out;
    for (std::size_t i = 0; i < j; ++i)
        out.err_lambda += approx.cluster.values[i] - ref.cluster.values[i];
    out.err_l2 = spectral::dm_l2_distance(m);
    out.err_h1 = spectral::dm_energy_distance(ref.cluster.values, approx.cluster.values, m);
    return out;
}

// Reference solutions keyed by problem parameters, stored as plain text so
// reruns skip the expensive eigensolve. Layout: one header line, then the
// low eigenvalues, then the cluster vectors in full precision.
struct PwReferenceCache {
    std::filesystem::path dir;

    std::string key(int dim, double length, double alpha, int kv, int n, std::size_t m,
                    std::size_t M, std::uint64_t seed) const {
        char buf[256];
        std::snprintf(buf, sizeof(buf), "pwref_d%d_L%.12g_a%.12g_kv%d_N%d_m%zu_M%zu_s%llu.txt",
                      dim, length, alpha, kv, n, m, M,
                      static_cast<unsigned long long>(seed));
        return buf;
    }

    bool load(const std::string& name, PwClusterSolution& sol, std::size_t ambient) const {
        if (dir.empty()) return false;
        std::ifstream in(dir / name);
        if (!in) return false;
        std::string tag;
        std::size_t m = 0, M = 0, nlow = 0, dim_n = 0;
        in >> tag >> m >> M >> nlow >> dim_n;
        if (tag != "pwref-v1" || dim_n != ambient) return false;
        sol.cluster.m = m;
        sol.cluster.M = M;
        sol.lambda_low.resize(nlow);
        for (auto& v : sol.lambda_low) in >> v;
        sol.basis.ambient_dim = ambient;
        sol.basis.vectors = Matrix<double>(ambient, M - m + 1);
        for (std::size_t c = 0; c < M - m + 1; ++c)
            for (std::size_t i = 0; i < ambient; ++i) in >> sol.basis.vectors(i, c);
        if (!in) return false;
        sol.cluster.values.assign(sol.lambda_low.begin() + m - 1, sol.lambda_low.begin() + M);
        return true;
    }

    void store(const std::string& name, const PwClusterSolution& sol) const {
        if (dir.empty()) return;
        std::error_code ec;
        std::filesystem::create_directories(dir, ec);
        std::ostringstream body;
        body.precision(17);
        body << "pwref-v1 " << sol.cluster.m << ' ' << sol.cluster.M << ' '
             << sol.lambda_low.size() << ' ' << sol.basis.ambient_dim << '\n';
        for (double v : sol.lambda_low) body << v << '\n';
        for (std::size_t c = 0; c < sol.basis.vectors.cols(); ++c)
            for (std::size_t i = 0; i < sol.basis.ambient_dim; ++i)
                body << sol.basis.vectors(i, c) << '\n';
        const auto tmp = dir / (name + ".tmp");
        {
            std::ofstream out(tmp);
            out << body.str();
        }
        std::filesystem::rename(tmp, dir / name, ec);
    }
};

} // namespace eigencert::pw
