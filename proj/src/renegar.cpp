#include "concord/renegar.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "concord/lp.hpp"

namespace concord {

namespace {

double smallest_singular_value(const Mat& a) {
    Eigen::JacobiSVD<Mat> svd(a);
    return svd.singularValues()[svd.singularValues().size() - 1];
}

}  // namespace

// max over w of ||Aw|| with |w| = 1, exact whenever either side has a finite
// description; falls back to sampling otherwise.
double map_operator_norm(const Mat& a, const NormSpec& dom, const NormSpec& codom, bool& exact) {
    exact = true;
    const Index m = a.cols();
    if (dom.is_l2() && codom.is_l2()) {
        Eigen::JacobiSVD<Mat> svd(a);
        return svd.singularValues()[0];
    }
    if (is_polyhedral(dom)) {
        // Convex max over the domain ball: attained at its vertices.
        double best = 0;
        for (const Vec& w : ball_vertices_full(dom, m)) best = std::max(best, norm_eval(codom, a * w));
        return best;
    }
    if (dom.is_l2() && is_polyhedral(codom)) {
        // max_x max_g g'(Ax) = max_g ||A'g||_2.
        Mat g = gauge_rows(codom, a.rows());
        double best = 0;
        for (Index i = 0; i < g.rows(); ++i)
            best = std::max(best, (a.transpose() * g.row(i).transpose()).norm());
        return best;
    }
    exact = false;
    std::mt19937_64 rng(0x09e60001ull);
    std::normal_distribution<double> gauss(0.0, 1.0);
    double best = 0;
    for (int s = 0; s < 20000; ++s) {
        Vec w(m);
        for (Index i = 0; i < m; ++i) w[i] = gauss(rng);
        double nw = norm_eval(dom, w);
        if (nw <= 1e-14) continue;
        best = std::max(best, norm_eval(codom, a * w / nw));
    }
    return best;
}

Subspace LinearMap::image() const { return orthonormal_basis(matrix); }

OpNorms op_norms(const LinearMap& a) {
    if (smallest_singular_value(a.matrix) <= 1e-10)
        throw NotInjective("op_norms: matrix is not injective");
    OpNorms out;
    bool e1 = true, e2 = true, e3 = true;
    out.norm_a = map_operator_norm(a.matrix, a.domain_norm, a.codomain.primal, e1);
    out.tri_norm_a = map_operator_norm(a.matrix, a.domain_norm, a.codomain.tri, e2);

    // ||A^{-1}|| = max{ |A^{-1}x| : x in Image(A), ||x|| = 1 }.
    if (a.codomain.primal.is_l2() && a.domain_norm.is_l2()) {
        out.norm_a_inv = 1.0 / smallest_singular_value(a.matrix);
    } else if (is_polyhedral(a.codomain.primal)) {
        Subspace im = a.image();
        Eigen::ColPivHouseholderQR<Mat> qr(a.matrix);
        double best = 0;
        for (const Vec& x : ball_vertices(a.codomain.primal, im)) {
            Vec w = qr.solve(x);
            best = std::max(best, norm_eval(a.domain_norm, w));
        }
        out.norm_a_inv = best;
        e3 = true;
    } else {
        e3 = false;
        Eigen::ColPivHouseholderQR<Mat> qr(a.matrix);
        std::mt19937_64 rng(0x09e60002ull);
        std::normal_distribution<double> gauss(0.0, 1.0);
        Subspace im = a.image();
        double best = 0;
        for (int s = 0; s < 20000; ++s) {
            Vec y(im.dim());
            for (Index i = 0; i < y.size(); ++i) y[i] = gauss(rng);
            Vec x = im.basis() * y;
            double nx = norm_eval(a.codomain.primal, x);
            if (nx <= 1e-14) continue;
            best = std::max(best, norm_eval(a.domain_norm, Vec(qr.solve(x / nx))));
        }
        out.norm_a_inv = best;
    }
    out.kappa = out.norm_a * out.norm_a_inv;
    out.exact = e1 && e2 && e3;
    return out;
}

SandwichReport renegar_sandwich(const LinearMap& a, const ConePtr& k,
                                std::optional<double> rdist_estimate) {
    SandwichReport rep;
    rep.norms = op_norms(a);
    Subspace l = a.image();

    MeasureCertificate feas = nu(l, k, a.codomain);
    if (feas.value > tol::strict_pos) {
        rep.feasible_side = true;
        rep.grassmann_cert = feas;
    } else {
        MeasureCertificate infeas = nu_bar(l, k, a.codomain);
        if (infeas.value <= tol::strict_pos)
            throw IllPosedInstance("renegar_sandwich: both nu and nu_bar vanish");
        rep.feasible_side = false;
        rep.grassmann_cert = infeas;
    }
    rep.grassmann_value = rep.grassmann_cert.value;
    rep.lower = rep.grassmann_value / rep.norms.norm_a_inv;
    rep.upper = rep.grassmann_value * rep.norms.norm_a;
    if (rdist_estimate) {
        rep.rdist_estimate = rdist_estimate;
        if (*rdist_estimate < rep.lower - 1e-6 || *rdist_estimate > rep.upper + 1e-6)
            throw NumericalFailure("renegar_sandwich: oracle estimate escapes the bracket");
    }
    return rep;
}

PreconditionReport precondition(const LinearMap& a, const ConePtr& k) {
    if (!a.codomain.primal.is_l2() || !a.codomain.tri.is_l2())
        throw UnsupportedNorm("precondition: Euclidean norm pair required");
    if (!k->is_symmetric()) throw UnsupportedCone("precondition: symmetric cone required");
    if (smallest_singular_value(a.matrix) <= 1e-10)
        throw NotInjective("precondition: matrix is not injective");

    Subspace l = a.image();
    // Most interior normalized image point: maximizes lambda_e over the
    // Euclidean ball of L.
    NormPair interior_pair{NormSpec::l2(), NormSpec::induced_e(k)};
    MeasureCertificate inner = nu(l, k, interior_pair);
    if (inner.value <= tol::strict_pos || !inner.x_bar)
        throw InfeasibleSide("precondition: image does not meet the cone interior");
    Vec x0 = *inner.x_bar;
    if (k->lambda_e(x0) <= tol::strict_pos)
        throw InfeasibleSide("precondition: interior point certificate failed");
    // Normalize the scale so x0 = e (and P = I) whenever the image already
    // contains the identity ray.
    x0 *= static_cast<double>(k->rank()) / k->trace(x0);

    PreconditionReport rep;
    rep.x0 = x0;
    rep.p = k->automorphism_to_identity(x0);
    Mat pa = rep.p * a.matrix;
    Eigen::HouseholderQR<Mat> qr(pa);
    Mat rfac = qr.matrixQR().topRows(pa.cols()).triangularView<Eigen::Upper>();
    rep.r = rfac.inverse();
    Mat par = pa * rep.r;
    rep.balance_residual = (par.transpose() * par - Mat::Identity(par.cols(), par.cols()))
                               .cwiseAbs()
                               .maxCoeff();

    Subspace pl = orthonormal_basis(pa);
    NormPair euclid = NormPair::l2_l2();
    rep.nu_before = nu(l, k, euclid).value;
    rep.nu_after_cert = nu(pl, k, euclid);
    rep.nu_after = rep.nu_after_cert.value;
    rep.bound = 1.0 / std::sqrt(static_cast<double>(k->rank()));
    return rep;
}

}  // namespace concord
