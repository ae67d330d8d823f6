#include "concord/linalg.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "concord/lp.hpp"
#include "concord/norms.hpp"

namespace concord {

Subspace::Subspace(Mat basis_columns) : basis_(std::move(basis_columns)) {
    const Index n = basis_.rows(), m = basis_.cols();
    if (m <= 0 || m >= n) throw DegenerateSubspace("Subspace: need 0 < m < n");
    Mat gram = basis_.transpose() * basis_ - Mat::Identity(m, m);
    if (gram.cwiseAbs().maxCoeff() > 1e-10) {
        // Re-orthonormalize mildly drifted bases; reject further ones.
        if (gram.cwiseAbs().maxCoeff() > 1e-6)
            throw DegenerateSubspace("Subspace: basis is far from orthonormal");
        Eigen::HouseholderQR<Mat> qr(basis_);
        basis_ = qr.householderQ() * Mat::Identity(n, m);
    }
}

bool Subspace::contains(const Vec& p, double tol) const {
    return (p - project(p)).norm() <= tol * (1.0 + p.norm());
}

bool Subspace::equals(const Subspace& other, double tol) const {
    if (other.ambient_dim() != ambient_dim() || other.dim() != dim()) return false;
    return (projector() - other.projector()).cwiseAbs().maxCoeff() <= tol;
}

Subspace orthonormal_basis(const Mat& columns) {
    const Index n = columns.rows();
    Eigen::ColPivHouseholderQR<Mat> qr(columns);
    qr.setThreshold(tol::rank_rel);
    Index r = qr.rank();
    if (r == 0) throw DegenerateSubspace("orthonormal_basis: zero span");
    if (r >= n) throw DegenerateSubspace("orthonormal_basis: span is the whole space");
    Mat q = qr.householderQ() * Mat::Identity(n, r);
    return Subspace(q);
}

Subspace orthonormal_basis(const std::vector<Vec>& vectors) {
    if (vectors.empty()) throw DegenerateSubspace("orthonormal_basis: no vectors");
    const Index n = vectors.front().size();
    Mat cols(n, static_cast<Index>(vectors.size()));
    for (size_t i = 0; i < vectors.size(); ++i) {
        if (vectors[i].size() != n) throw DimensionMismatch("orthonormal_basis: mixed dimensions");
        cols.col(static_cast<Index>(i)) = vectors[i];
    }
    return orthonormal_basis(cols);
}

Subspace orth_complement(const Subspace& s) {
    const Index n = s.ambient_dim(), m = s.dim();
    Eigen::HouseholderQR<Mat> qr(s.basis());
    Mat full = qr.householderQ();
    return Subspace(full.rightCols(n - m));
}

std::vector<double> principal_angles(const Subspace& s1, const Subspace& s2) {
    if (s1.ambient_dim() != s2.ambient_dim())
        throw DimensionMismatch("principal_angles: ambient dimensions differ");
    Mat m = s1.basis().transpose() * s2.basis();
    Eigen::JacobiSVD<Mat> svd(m);
    Vec sv = svd.singularValues();
    std::vector<double> angles(static_cast<size_t>(sv.size()));
    for (Index i = 0; i < sv.size(); ++i)
        angles[static_cast<size_t>(i)] = std::acos(std::clamp(sv[i], 0.0, 1.0));
    std::sort(angles.begin(), angles.end(), std::greater<double>());
    return angles;
}

double projection_gap(const Subspace& s1, const Subspace& s2) {
    if (s1.ambient_dim() != s2.ambient_dim())
        throw DimensionMismatch("projection_gap: ambient dimensions differ");
    if (s1.dim() != s2.dim()) throw DimensionMismatch("projection_gap: dimensions differ");
    Mat d = s1.projector() - s2.projector();
    Eigen::JacobiSVD<Mat> svd(d);
    return svd.singularValues()[0];
}

namespace {

// Unit dual-norm vector in S^perp (used when the minimum distance is zero and
// the dual witness is unconstrained).
Vec fallback_dual(const Subspace& s, const NormSpec& norm) {
    Vec q = orth_complement(s).basis().col(0);
    double dn = dual_norm_eval(norm, q);
    return q / dn;
}

MinNormCertificate min_norm_l2(const Subspace& s, const Vec& p, const NormSpec& norm) {
    MinNormCertificate cert;
    cert.minimizer = s.project(p);
    Vec r = p - cert.minimizer;
    cert.value = r.norm();
    cert.dual = cert.value > 1e-14 ? Vec(r / cert.value) : fallback_dual(s, norm);
    cert.alignment_residual =
        std::abs(cert.value - cert.dual.dot(p - cert.minimizer)) +
        std::abs(cert.dual.dot(p - cert.minimizer) - cert.dual.dot(p));
    return cert;
}

// Primal LP: min ||p - B y|| in epigraph form over the gauge rows.
MinNormCertificate min_norm_polyhedral(const Subspace& s, const Vec& p, const NormSpec& norm) {
    const Index n = s.ambient_dim(), m = s.dim();
    const Mat& b = s.basis();
    Mat g = gauge_rows(norm, n);
    const Index r = g.rows();

    // Variables (y, t): g_i'(p - B y) <= t  ->  g_i' B y + t >= g_i' p.
    lp::LpProblem prim = lp::LpProblem::make(r, m + 1 + r);
    for (Index i = 0; i < r; ++i) {
        prim.eq_matrix.block(i, 0, 1, m) = g.row(i) * b;
        prim.eq_matrix(i, m) = 1.0;
        prim.eq_matrix(i, m + 1 + i) = -1.0;  // surplus
        prim.eq_rhs[i] = g.row(i).dot(p);
    }
    prim.lower.tail(r).setZero();
    prim.lower[m] = 0.0;
    prim.objective[m] = 1.0;
    lp::LpSolution ps = lp::solve_lp(prim);
    if (ps.status != lp::LpStatus::Optimal) throw NumericalFailure("min_norm: primal LP failed");

    // Dual LP: max <q,p> s.t. q in S^perp, ||q||_* <= 1. The dual unit ball is
    // conv(g_i), so q = sum_i w_i g_i, w in the simplex.
    lp::LpProblem dual = lp::LpProblem::make(m + 1, r);
    dual.eq_matrix.topRows(m) = b.transpose() * g.transpose();
    dual.eq_matrix.bottomRows(1).setOnes();
    dual.eq_rhs.setZero();
    dual.eq_rhs[m] = 1.0;
    dual.lower.setZero();
    dual.objective = g * p;
    dual.maximize = true;
    lp::LpSolution ds = lp::solve_lp(dual);
    if (ds.status != lp::LpStatus::Optimal) throw NumericalFailure("min_norm: dual LP failed");

    double gap = std::abs(ps.value - ds.value);
    if (gap > tol::lp_gap * (1.0 + std::abs(ps.value)))
        throw NumericalFailure("min_norm: duality gap");

    MinNormCertificate cert;
    cert.value = ps.value;
    cert.minimizer = b * ps.primal.head(m);
    Vec q = g.transpose() * ds.primal;
    // Project exactly onto S^perp to clean LP round-off, then renormalize.
    q -= s.project(q);
    double dn = dual_norm_eval(norm, q);
    cert.dual = dn > 1e-12 ? Vec(q / dn) : fallback_dual(s, norm);
    cert.alignment_residual =
        std::abs(norm_eval(norm, p - cert.minimizer) - cert.dual.dot(p - cert.minimizer)) +
        std::abs(cert.dual.dot(p - cert.minimizer) - cert.dual.dot(p));
    return cert;
}

}  // namespace

MinNormCertificate min_norm_to_subspace(const Subspace& s, const Vec& p, const NormSpec& norm) {
    if (p.size() != s.ambient_dim()) throw DimensionMismatch("min_norm_to_subspace: bad p");
    if (norm.is_l2()) return min_norm_l2(s, p, norm);
    if (is_polyhedral(norm)) return min_norm_polyhedral(s, p, norm);
    throw UnsupportedNorm("min_norm_to_subspace: no solver path for this norm");
}

Mat kernel_basis(const Mat& a) {
    if (a.rows() == 0) return Mat::Identity(a.cols(), a.cols());
    Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeFullV);
    Vec sv = svd.singularValues();
    double thr = tol::rank_rel * std::max<double>(a.rows(), a.cols()) *
                 (sv.size() > 0 ? sv[0] : 0.0);
    Index rank = 0;
    for (Index i = 0; i < sv.size(); ++i)
        if (sv[i] > thr) ++rank;
    return svd.matrixV().rightCols(a.cols() - rank);
}

Subspace intersect_with_kernel(const Subspace& s, const Mat& c) {
    Mat rows = c * s.basis();  // constraints in chart coordinates
    Mat k = kernel_basis(rows);
    if (k.cols() == 0) throw DegenerateSubspace("intersect_with_kernel: trivial intersection");
    return orthonormal_basis(Mat(s.basis() * k));
}

Subspace random_subspace(Index n, Index m, std::mt19937_64& rng) {
    if (!(m > 0 && m < n)) throw DegenerateSubspace("random_subspace: need 0 < m < n");
    std::normal_distribution<double> g(0.0, 1.0);
    Mat a(n, m);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < m; ++j) a(i, j) = g(rng);
    Eigen::HouseholderQR<Mat> qr(a);
    return Subspace(Mat(qr.householderQ() * Mat::Identity(n, m)));
}

}  // namespace concord
