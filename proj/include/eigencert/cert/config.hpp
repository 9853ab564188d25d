#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "eigencert/core/error.hpp"
#include "eigencert/fem/estimators.hpp"

namespace eigencert::cert {

enum class Backend { pw, fem };
enum class Domain { square, lshape, torus1d, torus2d };
enum class Reference { analytic, fine };

// One experiment: a discretization ladder (or adaptive loop) for one cluster,
// with everything needed to assemble the guaranteed bounds.
struct ExperimentConfig {
    Backend backend = Backend::pw;
    Domain domain = Domain::torus1d;
    std::size_t m = 1, M = 1;
    std::vector<double> ladder;  // cutoffs N (pw) or subdivisions n (fem)
    Reference reference = Reference::fine;
    double ref_param = 0;  // pw: reference cutoff; fem: reference n (0 = auto)

    fem::EstimatorCase est_case = fem::EstimatorCase::I;
    std::optional<fem::RegularityConstants> regularity;
    double lower_next = 0.0;   // certified lower bound for lambda_{M+1} (fem)
    double lower_first = 0.0;  // lower bound for lambda_1 (diagnostics only)

    double alpha = 0.0;  // pw potential amplitude
    int k_v = 0;         // pw potential truncation; 0 = 2 * reference cutoff
    double length = 2.0 * 3.14159265358979323846;

    double theta = 0.6;  // adaptive marking
    double dorfler_exponent = 2.0;
    std::size_t max_dof = 0;

    std::uint64_t seed = 42;
    bool strict = false;
    std::string cache_dir;

    int pw_dim() const { return domain == Domain::torus2d ? 2 : 1; }

    void validate() const {
        if (m < 1 || M < m) throw ConfigError("cluster must satisfy 1 <= m <= M");
        if (backend == Backend::pw) {
            if (domain != Domain::torus1d && domain != Domain::torus2d)
                throw ConfigError("pw backend requires a torus domain");
            if (!(alpha >= 0)) throw ConfigError("alpha must be nonnegative");
            if (!(ref_param > 0)) throw ConfigError("pw reference cutoff required");
        } else {
            if (domain != Domain::square && domain != Domain::lshape)
                throw ConfigError("fem backend requires square or lshape domain");
            if (!(lower_next > 0))
                throw ConfigError("missing --lower-bound (certified lower bound for "
                                  "lambda_{M+1})");
            if (est_case == fem::EstimatorCase::II && !regularity.has_value())
                throw ConfigError("case II requires --delta, --ci, --cs");
            if (domain == Domain::lshape && reference == Reference::analytic && M > 6)
                throw ConfigError("published L-shape eigenvalues cover the first six only");
        }
        for (std::size_t i = 0; i < ladder.size(); ++i) {
            if (ladder[i] <= 0 || ladder[i] != std::floor(ladder[i]))
                throw ConfigError("ladder entries must be positive integers");
            if (i > 0 && ladder[i] <= ladder[i - 1])
                throw ConfigError("ladder must be strictly increasing");
        }
        if (max_dof > 0) {
            if (!(theta > 0.0 && theta < 1.0))
                throw ConfigError("adaptive marking requires 0 < theta < 1");
            if (backend != Backend::fem) throw ConfigError("adaptive loop is fem-only");
        }
        if (backend == Backend::fem && reference == Reference::fine && !ladder.empty()) {
            const double refn = (ref_param > 0) ? ref_param : 4.0 * ladder.back();
            for (double n : ladder) {
                const double ratio = refn / n;
                if (std::abs(ratio - std::floor(ratio + 0.5)) > 1e-12)
                    throw ConfigError("fine reference requires every ladder level to divide "
                                      "the reference level (nested meshes)");
            }
        }
    }
};

} // namespace eigencert::cert
