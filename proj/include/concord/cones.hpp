#pragma once

#include <memory>
#include <random>
#include <vector>

#include "concord/types.hpp"

namespace concord {

class Cone;
using ConePtr = std::shared_ptr<const Cone>;

// x = sum_i lambda_i c_i with a Jordan frame of primitive idempotents.
struct SpectralDecomposition {
    Vec eigenvalues;  // r entries
    Mat frame;        // n x r, column i is the idempotent c_i
};

// A regular closed convex cone. Orthant/SecondOrder/Psd/Product carry the
// Euclidean Jordan algebra of their cone of squares; Rotated2D is the
// two-dimensional polyhedral family used by the worked example and has no
// algebra structure.
//
// Coordinates: the orthant is plain R^n. PSD(k) lives in scaled svec
// coordinates (off-diagonals times sqrt(2)) so the trace inner product is
// the dot product. The second-order cone keeps its natural coordinates
// (x0, xbar); there trace(x o y) = 2 x'y, exposed through trace_inner().
class Cone {
  public:
    enum class Kind { Orthant, SecondOrder, Psd, Product, Rotated2D };

    static ConePtr orthant(Index n);
    static ConePtr second_order(Index n);          // n >= 2
    static ConePtr psd(Index k);                   // ambient k(k+1)/2
    static ConePtr product(std::vector<ConePtr> parts);
    static ConePtr rotated2d(double phi);          // extreme rays (+-sin phi, cos phi)

    Kind kind() const { return kind_; }
    Index ambient_dim() const { return n_; }
    bool is_symmetric() const;    // carries a Jordan algebra
    bool is_polyhedral() const;   // orthant, rotated2d, products of those
    bool is_self_dual() const;    // w.r.t. the ambient dot product
    ConePtr dual() const;

    Index rank() const;           // symmetric kinds only
    Vec identity() const;         // e in int(K); Rotated2D uses its axis (0,1)

    bool contains(const Vec& x, double tol = tol::strict_pos) const;
    bool dual_contains(const Vec& x, double tol = tol::strict_pos) const;

    // max{t : x - t e in K} = min_i lambda_i(x); >= 0 iff x in K.
    double lambda_e(const Vec& x) const;
    // max{t : x - t v in K}; -inf when empty. v must lie in K \ {0}.
    double lambda_v(const Vec& x, const Vec& v) const;

    SpectralDecomposition spectral(const Vec& x) const;  // symmetric kinds
    Vec jordan_product(const Vec& x, const Vec& y) const;
    double trace(const Vec& x) const;                    // sum of eigenvalues
    double trace_inner(const Vec& x, const Vec& y) const;  // trace(x o y)

    // P with P x0 = e and P K = K; requires lambda_e(x0) > tol (NotInterior).
    Mat automorphism_to_identity(const Vec& x0) const;

    // Euclidean projection onto K (spectral clipping for symmetric kinds).
    Vec project(const Vec& x) const;

    // Facet description {x : rows * x >= 0} for polyhedral kinds.
    Mat facet_normals() const;
    // Extreme rays, unit length, for Rotated2D.
    Mat generators() const;
    double phi() const;  // Rotated2D only
    Index psd_side() const { return k_; }
    const std::vector<ConePtr>& parts() const { return parts_; }

    // Sampling (deterministic given the engine state).
    Vec random_element(std::mt19937_64& rng) const;   // Gaussian in V
    Vec random_interior(std::mt19937_64& rng) const;  // z o z + eps e style
    // Primitive idempotents: exact list for the orthant, samples otherwise.
    std::vector<Vec> primitive_idempotents(Index samples, std::mt19937_64& rng) const;
    bool primitive_idempotents_exact() const { return kind_ == Kind::Orthant; }

    // svec/mat helpers (Psd only).
    static Mat svec_to_mat(const Vec& x, Index k);
    static Vec mat_to_svec(const Mat& X);

  private:
    Cone() = default;
    Kind kind_ = Kind::Orthant;
    Index n_ = 0;   // ambient dimension
    Index k_ = 0;   // matrix side for Psd
    double phi_ = 0.0;
    std::vector<ConePtr> parts_;
    std::vector<Index> offsets_;  // block offsets for Product
};

}  // namespace concord
