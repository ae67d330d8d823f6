#pragma once

#include <random>
#include <vector>

#include "concord/types.hpp"

namespace concord {

struct NormSpec;  // norms.hpp

// An m-dimensional linear subspace of R^n held as an orthonormal basis.
// Subspaces are points of the Grassmannian: equality is tested through
// projection matrices, never through bases.
class Subspace {
  public:
    Subspace(Mat basis_columns);  // columns must be l2-orthonormal

    Index ambient_dim() const { return basis_.rows(); }
    Index dim() const { return basis_.cols(); }
    const Mat& basis() const { return basis_; }
    Mat projector() const { return basis_ * basis_.transpose(); }

    Vec project(const Vec& p) const { return basis_ * (basis_.transpose() * p); }
    bool contains(const Vec& p, double tol = tol::proj_equal) const;
    bool equals(const Subspace& other, double tol = tol::proj_equal) const;

  private:
    Mat basis_;
};

struct MinNormCertificate {
    double value = 0.0;       // min_{z in L} ||p - z||
    Vec minimizer;            // zbar in L
    Vec dual;                 // qbar in L^perp, dual norm 1
    double alignment_residual = 0.0;
};

// Span of the given vectors; rank from column-pivoted QR at relative
// threshold 1e-10. Throws DegenerateSubspace when the span is {0} or R^n.
Subspace orthonormal_basis(const std::vector<Vec>& vectors);
Subspace orthonormal_basis(const Mat& columns);

Subspace orth_complement(const Subspace& s);

// Nonincreasing principal angles in [0, pi/2] (arccos of the singular values
// of B1'B2, clamped to [0,1]).
std::vector<double> principal_angles(const Subspace& s1, const Subspace& s2);

// ||Pi_1 - Pi_2||_2; equals sin of the largest principal angle when
// dim(s1) == dim(s2).
double projection_gap(const Subspace& s1, const Subspace& s2);

// min_{z in L} ||p - z|| under the given norm, with the dual witness of the
// min-norm duality  min ||p-z|| = max{<q,p> : q in L^perp, ||q||_* = 1}.
// l2 is closed form; polyhedral norms run a primal and a dual LP.
MinNormCertificate min_norm_to_subspace(const Subspace& s, const Vec& p, const NormSpec& norm);

// --- plumbing -------------------------------------------------------------

// Orthonormal basis of ker(A) (n x k, possibly k = 0).
Mat kernel_basis(const Mat& A);

// {x in S : C x = 0} as a subspace; throws DegenerateSubspace if trivial.
Subspace intersect_with_kernel(const Subspace& s, const Mat& C);

// Haar-ish random m-dimensional subspace of R^n (QR of a Gaussian matrix).
Subspace random_subspace(Index n, Index m, std::mt19937_64& rng);

}  // namespace concord
