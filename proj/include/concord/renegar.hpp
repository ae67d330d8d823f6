#pragma once

#include <optional>

#include "concord/cones.hpp"
#include "concord/measures.hpp"
#include "concord/norms.hpp"
#include "concord/types.hpp"

namespace concord {

// A data representation A : W -> V of the subspace L = Image(A), with a norm
// on W and the codomain norm pair.
struct LinearMap {
    Mat matrix;             // n x m
    NormSpec domain_norm;   // |.| on W = R^m
    NormPair codomain;      // (||.||, |||.|||) on V

    Index domain_dim() const { return matrix.cols(); }
    Index ambient_dim() const { return matrix.rows(); }
    Subspace image() const;
};

struct OpNorms {
    double norm_a = 0;        // ||A|| = max_{|w|=1} ||Aw||
    double tri_norm_a = 0;    // |||A|||
    double norm_a_inv = 0;    // ||A^{-1}|| on Image(A)
    double kappa = 0;         // ||A|| ||A^{-1}||
    bool exact = true;
};

OpNorms op_norms(const LinearMap& a);

// max_{|w|=1} codom(A w); exact for finite descriptions (sets *exact).
double map_operator_norm(const Mat& a, const NormSpec& dom, const NormSpec& codom, bool& exact);

struct SandwichReport {
    bool feasible_side = true;      // which part of the theorem applied
    double grassmann_value = 0;     // dist(L,Sigma_m) = nu, or odist = nu_bar
    double lower = 0;               // Rdist >= grassmann / ||A^{-1}||
    double upper = 0;               // Rdist <= grassmann * ||A||
    OpNorms norms;
    MeasureCertificate grassmann_cert;
    std::optional<double> rdist_estimate;  // echoed if supplied, must sit in the bracket
};

// The two-sided relation between the Grassmann distance to ill-posedness of
// Image(A) and the data distance to ill-posedness of A. If an oracle estimate
// is passed it is checked against the bracket (+1e-6 slack).
SandwichReport renegar_sandwich(const LinearMap& a, const ConePtr& k,
                                std::optional<double> rdist_estimate = std::nullopt);

struct PreconditionReport {
    Mat p;                    // cone automorphism, P K = K
    Mat r;                    // domain change of basis, (PAR)'(PAR) = I
    Vec x0;                   // interior point of Image(A) used for P
    double nu_before = 0;
    double nu_after = 0;      // nu(PL), certified >= 1/sqrt(rank) - tol
    double bound = 0;         // 1/sqrt(rank)
    double balance_residual = 0;  // ||(PAR)'PAR - I||_max
    MeasureCertificate nu_after_cert;
};

// Corollary-style preconditioning: P maps the most interior image point to
// the cone identity, R balances PA. Euclidean norm pair only.
PreconditionReport precondition(const LinearMap& a, const ConePtr& k);

}  // namespace concord
