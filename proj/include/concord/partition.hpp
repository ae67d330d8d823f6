#pragma once

#include <optional>
#include <vector>

#include "concord/linalg.hpp"
#include "concord/measures.hpp"
#include "concord/renegar.hpp"
#include "concord/types.hpp"

namespace concord {

// The strict-complementarity partition of {0..n-1} for K = R^n_+: x_cert in
// L cap R^n_+ is strictly positive exactly on B, y_cert in L^perp cap R^n_+
// strictly positive exactly on N.
struct GtPartition {
    std::vector<Index> b_set;
    std::vector<Index> n_set;
    Vec x_cert;
    Vec y_cert;
};

GtPartition goldman_tucker(const Subspace& l);

// nu and sigma of the two well-posed blocks (restricted to V_B and V_N with
// their orthant cones). Empty blocks carry no value.
struct PartitionMeasures {
    std::optional<MeasureCertificate> nu_b, sigma_b;
    std::optional<MeasureCertificate> nu_n, sigma_n;
    Index dim_b = 0, dim_n = 0;
};

PartitionMeasures partition_measures(const Subspace& l, const NormPair& np);

// Block form of an injective A with Image(A) = L under the partition:
// columns split into R^m_B = Image(A_B') and R^m_N = ker(A_B), giving
// A = [A_BB 0; A_NB A_NN] with both diagonal blocks full column rank.
struct BlockDecomposition {
    Mat a_bb, a_nb, a_nn;
    Mat basis_b;  // m x k, orthonormal basis of R^m_B
    Mat basis_n;  // m x (m-k)
    double reconstruction_residual = 0;
    std::optional<SandwichReport> sandwich_bb;  // per-block Renegar bounds
    std::optional<SandwichReport> sandwich_nn;
};

BlockDecomposition block_decompose(const LinearMap& a, const GtPartition& gt);

// Diagonal preconditioner built from the partition certificates: D L keeps
// the same (B,N) and the per-block condition is bounded by sqrt(block dim).
struct PartitionPreconditionReport {
    Vec d;      // positive diagonal
    Mat r;      // domain change of basis balancing the diagonal blocks
    GtPartition partition_after;
    std::optional<double> nu_b_after, nu_n_after;
    double bound_b = 0, bound_n = 0;  // 1/sqrt(k), 1/sqrt(l)
};

PartitionPreconditionReport partition_precondition(const LinearMap& a);

}  // namespace concord
