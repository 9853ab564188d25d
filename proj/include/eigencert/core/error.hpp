#pragma once

#include <stdexcept>
#include <string>

namespace eigencert {

// Error hierarchy shared by all modules. Every named failure mode of the
// library maps onto one of these types so callers can discriminate.

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct DimensionMismatch : Error {
    explicit DimensionMismatch(const std::string& msg) : Error("dimension mismatch: " + msg) {}
};

struct NotSpd : Error {
    explicit NotSpd(const std::string& msg) : Error("matrix not SPD: " + msg) {}
};

struct NoConvergence : Error {
    explicit NoConvergence(const std::string& msg) : Error("no convergence: " + msg) {}
};

struct Breakdown : Error {
    explicit Breakdown(const std::string& msg) : Error("breakdown: " + msg) {}
};

struct SingularSystem : Error {
    explicit SingularSystem(const std::string& msg) : Error("singular system: " + msg) {}
};

struct RankDeficientOverlap : Error {
    explicit RankDeficientOverlap(const std::string& msg)
        : Error("rank-deficient overlap: " + msg) {}
};

struct NegativeRadicand : Error {
    explicit NegativeRadicand(const std::string& msg) : Error("negative radicand: " + msg) {}
};

struct GalerkinViolation : Error {
    explicit GalerkinViolation(const std::string& msg) : Error("Galerkin violation: " + msg) {}
};

struct ClusterMismatch : Error {
    explicit ClusterMismatch(const std::string& msg) : Error("cluster mismatch: " + msg) {}
};

struct DegenerateTriangle : Error {
    explicit DegenerateTriangle(const std::string& msg) : Error("degenerate triangle: " + msg) {}
};

struct ClosureOverflow : Error {
    explicit ClosureOverflow(const std::string& msg) : Error("refinement closure overflow: " + msg) {}
};

struct PatchIncompatible : Error {
    explicit PatchIncompatible(const std::string& msg) : Error("patch incompatible: " + msg) {}
};

struct CaseIIWithoutConstants : Error {
    explicit CaseIIWithoutConstants(const std::string& msg)
        : Error("case II requires regularity constants: " + msg) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& msg) : Error("config error: " + msg) {}
};

struct IoError : Error {
    explicit IoError(const std::string& msg) : Error("io error: " + msg) {}
};

} // namespace eigencert
