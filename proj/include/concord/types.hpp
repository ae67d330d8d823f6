#pragma once

#include <Eigen/Dense>
#include <limits>
#include <stdexcept>
#include <string>

namespace concord {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Index = Eigen::Index;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Exit-code-worthy failure categories. Everything is a runtime_error so the
// CLI can map them uniformly; the distinct types keep tests precise.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define CONCORD_ERROR(Name)                         \
    struct Name : Error {                           \
        explicit Name(const std::string& msg = #Name) : Error(msg) {} \
    }

CONCORD_ERROR(DegenerateSubspace);
CONCORD_ERROR(DimensionMismatch);
CONCORD_ERROR(UnsupportedNorm);
CONCORD_ERROR(MissingCone);
CONCORD_ERROR(NonPolyhedralNorm);
CONCORD_ERROR(DimensionTooLarge);
CONCORD_ERROR(VNotInCone);
CONCORD_ERROR(NotInterior);
CONCORD_ERROR(NumericalFailure);
CONCORD_ERROR(UnboundedPolytope);
CONCORD_ERROR(UnsupportedCone);
CONCORD_ERROR(MissingWitnesses);
CONCORD_ERROR(DegenerateVbar);
CONCORD_ERROR(NotInjective);
CONCORD_ERROR(IllPosedInstance);
CONCORD_ERROR(InfeasibleSide);
CONCORD_ERROR(RankDeficientBlock);
CONCORD_ERROR(SamplingExhausted);
CONCORD_ERROR(ParseError);

#undef CONCORD_ERROR

// How a reported value was obtained. Sampled values are never presented as
// exact; callers can rely on this tag when (in)validating theorem checks.
enum class Path { ClosedForm, LpExact, Sampled };

inline const char* to_string(Path p) {
    switch (p) {
        case Path::ClosedForm: return "ClosedForm";
        case Path::LpExact: return "LpExact";
        case Path::Sampled: return "Sampled";
    }
    return "?";
}

namespace tol {
// Shared numerical thresholds. The GT support threshold (strict_pos) is the
// single most delicate constant in the artifact; keep it aligned with the LP
// feasibility tolerance.
inline constexpr double orthonormal = 1e-12;
inline constexpr double proj_equal = 1e-9;
inline constexpr double rank_rel = 1e-10;
inline constexpr double lp_feas = 1e-9;
inline constexpr double lp_gap = 1e-8;
inline constexpr double strict_pos = 1e-9;
inline constexpr double alignment = 1e-7;
inline constexpr double bisect_t = 1e-11;
}  // namespace tol

}  // namespace concord
