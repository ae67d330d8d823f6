#pragma once

#include <optional>

#include "concord/cones.hpp"
#include "concord/linalg.hpp"
#include "concord/norms.hpp"
#include "concord/types.hpp"

namespace concord {

// The two norms of the theory: ||.|| (primal, normalizes trial points) and
// |||.||| (tri, measures displacements).
struct NormPair {
    NormSpec primal;
    NormSpec tri;

    static NormPair l2_l2() { return {NormSpec::l2(), NormSpec::l2()}; }
    static NormPair l1_l1() { return {NormSpec::l1(), NormSpec::l1()}; }
};

// Value plus optimality witnesses. Which witnesses are present depends on the
// measure; alignment_residual bundles the optimality conditions of the
// corresponding proposition. Sampled values carry a bracket and the
// approximate flag; they are never reported as exact.
struct MeasureCertificate {
    double value = 0.0;
    Path path = Path::LpExact;
    bool approximate = false;
    bool infeasible_side = false;
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    std::optional<Vec> u_bar;  // in K*
    std::optional<Vec> y_bar;  // in L^perp
    std::optional<Vec> x_bar;  // in L
    std::optional<Vec> v_bar;  // in K (or the inner minimizer for dist)
    double alignment_residual = std::numeric_limits<double>::quiet_NaN();
};

// dist(L1,L2) = max_{x in L1, ||x||=1} min_{v in L2} |||x - v|||.
MeasureCertificate dist(const Subspace& l1, const Subspace& l2, const NormPair& np);

// odist(L1,L2) = max_{x in L1, x != 0} inf_{v in L2, v != 0} |||x - v||| / ||v||.
MeasureCertificate odist(const Subspace& l1, const Subspace& l2, const NormPair& np);

// nu(L) = min{ ||y - u||_* : u in K*, |||u|||_* = 1, y in L^perp }; positive
// iff L meets int(K). Equals max_{x in L, ||x|| <= 1} lambda_e(x) when
// |||.||| is the induced norm.
MeasureCertificate nu(const Subspace& l, const ConePtr& k, const NormPair& np);

// nu_bar(L) = min{ |||v - x||| : v in K, x in L, ||x|| = 1 }; positive iff
// L^perp meets int(K*).
MeasureCertificate nu_bar(const Subspace& l, const ConePtr& k, const NormPair& np);

// sigma(L) = min_{v in K, |||v|||=1} max_{x in L, ||x||<=1} lambda_v(x).
MeasureCertificate sigma(const Subspace& l, const ConePtr& k, const NormPair& np);

// Sym(L) = min_{v in K, ||v||=1} max{ t : x + t v in L, x in K, ||x|| <= 1 }.
MeasureCertificate sym(const Subspace& l, const ConePtr& k, const NormSpec& norm);

// Theta(K*,K) = max_{u in K* \ 0} min_{v in K \ 0} angle(u,v); zero for
// self-dual cones, pi/2 - 2 phi for the rotated family.
double theta(const ConePtr& k);

// The constructed ill-posed subspaces from the main theorem's proof.
Subspace critical_subspace_feasible(const Subspace& l, const ConePtr& k, const NormPair& np,
                                    const MeasureCertificate& nu_cert);
Subspace critical_subspace_infeasible(const Subspace& l, const ConePtr& k, const NormPair& np,
                                      const MeasureCertificate& nu_bar_cert);

// Exact interior feasibility margin max_{x in L, ||x||_2 <= 1} lambda_e(x);
// > 0 iff L meets int(K). Shared "feasible side" oracle.
double interior_margin(const Subspace& l, const ConePtr& k);

// w with spec-norm 1 attaining <u,w> = dual_norm(spec, u).
Vec norm_attaining(const NormSpec& spec, const Vec& u);

}  // namespace concord
