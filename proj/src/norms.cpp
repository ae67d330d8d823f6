#include "concord/norms.hpp"

#include <algorithm>
#include <cmath>

#include "concord/lp.hpp"

namespace concord {

namespace {

void require_cone(const NormSpec& spec) {
    if ((spec.kind == NormSpec::Kind::InducedE || spec.kind == NormSpec::Kind::InducedEDual) &&
        !spec.cone)
        throw MissingCone("induced norm without a cone handle");
}

double induced_e_eval(const ConePtr& k, const Vec& x) {
    switch (k->kind()) {
        case Cone::Kind::Orthant:
            return x.lpNorm<Eigen::Infinity>();
        case Cone::Kind::SecondOrder:
        case Cone::Kind::Psd: {
            auto sd = k->spectral(x);
            return sd.eigenvalues.cwiseAbs().maxCoeff();
        }
        case Cone::Kind::Product: {
            double v = 0;
            Index off = 0;
            for (const auto& p : k->parts()) {
                v = std::max(v, induced_e_eval(p, x.segment(off, p->ambient_dim())));
                off += p->ambient_dim();
            }
            return v;
        }
        case Cone::Kind::Rotated2D: {
            Mat a = k->facet_normals();
            Vec e = k->identity();
            double v = 0;
            for (Index i = 0; i < a.rows(); ++i)
                v = std::max(v, std::abs(a.row(i).dot(x)) / a.row(i).dot(e));
            return v;
        }
    }
    throw UnsupportedCone("induced_e_eval");
}

// Dual of || . ||_e with respect to the ambient dot product.
double induced_e_dual_eval(const ConePtr& k, const Vec& u) {
    switch (k->kind()) {
        case Cone::Kind::Orthant:
            return u.lpNorm<1>();
        case Cone::Kind::Psd: {
            auto sd = k->spectral(u);
            return sd.eigenvalues.cwiseAbs().sum();
        }
        case Cone::Kind::SecondOrder: {
            // Ball of ||.||_e is {|x0| + ||xbar|| <= 1}; its dot-dual norm.
            Index n = k->ambient_dim();
            return std::max(std::abs(u[0]), u.tail(n - 1).norm());
        }
        case Cone::Kind::Product: {
            double v = 0;
            Index off = 0;
            for (const auto& p : k->parts()) {
                v += induced_e_dual_eval(p, u.segment(off, p->ambient_dim()));
                off += p->ambient_dim();
            }
            return v;
        }
        case Cone::Kind::Rotated2D: {
            // Unit ball of ||.||_e is the parallelogram {|a_i'x| <= <a_i,e>}:
            // support function = max over its four vertices.
            Mat a = k->facet_normals();
            Vec e = k->identity();
            Mat A(2, 2);
            A.row(0) = a.row(0) / a.row(0).dot(e);
            A.row(1) = a.row(1) / a.row(1).dot(e);
            Mat Ainv = A.inverse();
            double best = 0;
            for (int s0 : {-1, 1})
                for (int s1 : {-1, 1}) {
                    Vec rhs(2);
                    rhs << s0, s1;
                    best = std::max(best, (Ainv * rhs).dot(u));
                }
            return best;
        }
    }
    throw UnsupportedCone("induced_e_dual_eval");
}

}  // namespace

double norm_eval(const NormSpec& spec, const Vec& x) {
    require_cone(spec);
    switch (spec.kind) {
        case NormSpec::Kind::L1: return x.lpNorm<1>();
        case NormSpec::Kind::L2: return x.norm();
        case NormSpec::Kind::LInf: return x.lpNorm<Eigen::Infinity>();
        case NormSpec::Kind::InducedE: return induced_e_eval(spec.cone, x);
        case NormSpec::Kind::InducedEDual: return induced_e_dual_eval(spec.cone, x);
    }
    throw UnsupportedNorm("norm_eval");
}

NormSpec dual_spec(const NormSpec& spec) {
    switch (spec.kind) {
        case NormSpec::Kind::L1: return NormSpec::linf();
        case NormSpec::Kind::L2: return NormSpec::l2();
        case NormSpec::Kind::LInf: return NormSpec::l1();
        case NormSpec::Kind::InducedE: return NormSpec::induced_e_dual(spec.cone);
        case NormSpec::Kind::InducedEDual: return NormSpec::induced_e(spec.cone);
    }
    throw UnsupportedNorm("dual_spec");
}

double dual_norm_eval(const NormSpec& spec, const Vec& u) {
    return norm_eval(dual_spec(spec), u);
}

bool is_polyhedral(const NormSpec& spec) {
    switch (spec.kind) {
        case NormSpec::Kind::L1:
        case NormSpec::Kind::LInf:
            return true;
        case NormSpec::Kind::L2:
            return false;
        case NormSpec::Kind::InducedE:
        case NormSpec::Kind::InducedEDual:
            return spec.cone && spec.cone->is_polyhedral() &&
                   spec.cone->kind() != Cone::Kind::Product;
    }
    return false;
}

Mat gauge_rows(const NormSpec& spec, Index n) {
    if (!is_polyhedral(spec)) throw NonPolyhedralNorm("gauge_rows: norm has no polyhedral gauge");
    switch (spec.kind) {
        case NormSpec::Kind::LInf: {
            Mat g(2 * n, n);
            g.topRows(n) = Mat::Identity(n, n);
            g.bottomRows(n) = -Mat::Identity(n, n);
            return g;
        }
        case NormSpec::Kind::L1: {
            if (n > 16) throw DimensionTooLarge("gauge_rows: l1 gauge beyond n=16");
            Index rows = Index(1) << n;
            Mat g(rows, n);
            for (Index s = 0; s < rows; ++s)
                for (Index j = 0; j < n; ++j) g(s, j) = (s >> j) & 1 ? 1.0 : -1.0;
            return g;
        }
        case NormSpec::Kind::InducedE: {
            if (spec.cone->kind() == Cone::Kind::Orthant) return gauge_rows(NormSpec::linf(), n);
            // Rotated2D: |a_i'x| / <a_i,e> <= ||x||_e.
            Mat a = spec.cone->facet_normals();
            Vec e = spec.cone->identity();
            Mat g(2 * a.rows(), n);
            for (Index i = 0; i < a.rows(); ++i) {
                g.row(2 * i) = a.row(i) / a.row(i).dot(e);
                g.row(2 * i + 1) = -a.row(i) / a.row(i).dot(e);
            }
            return g;
        }
        case NormSpec::Kind::InducedEDual: {
            if (spec.cone->kind() == Cone::Kind::Orthant) return gauge_rows(NormSpec::l1(), n);
            // Gauge of the dual norm: rows are the vertices of the primal ball.
            Mat a = spec.cone->facet_normals();
            Vec e = spec.cone->identity();
            Mat A(2, 2);
            A.row(0) = a.row(0) / a.row(0).dot(e);
            A.row(1) = a.row(1) / a.row(1).dot(e);
            Mat Ainv = A.inverse();
            Mat g(4, 2);
            int r = 0;
            for (int s0 : {-1, 1})
                for (int s1 : {-1, 1}) {
                    Vec rhs(2);
                    rhs << s0, s1;
                    g.row(r++) = (Ainv * rhs).transpose();
                }
            return g;
        }
        default:
            throw NonPolyhedralNorm("gauge_rows");
    }
}

namespace {

std::vector<Vec> section_vertices(const NormSpec& spec, const Mat& basis) {
    const Index n = basis.rows(), m = basis.cols();
    if (m > 10) throw DimensionTooLarge("ball_vertices: subspace dimension above 10");
    Mat g = gauge_rows(spec, n);
    Mat gc = g * basis;  // chart halfspaces gc y <= 1
    Vec h = Vec::Ones(gc.rows());
    std::vector<Vec> ys = lp::enumerate_vertices(gc, h);
    std::vector<Vec> out;
    out.reserve(ys.size());
    for (const Vec& y : ys) out.push_back(basis * y);
    // Deterministic order: lexicographic.
    std::sort(out.begin(), out.end(), [](const Vec& a, const Vec& b) {
        for (Index i = 0; i < a.size(); ++i) {
            if (a[i] < b[i] - 1e-12) return true;
            if (a[i] > b[i] + 1e-12) return false;
        }
        return false;
    });
    return out;
}

}  // namespace

std::vector<Vec> ball_vertices(const NormSpec& spec, const Subspace& s) {
    return section_vertices(spec, s.basis());
}

std::vector<Vec> ball_vertices_full(const NormSpec& spec, Index n) {
    return section_vertices(spec, Mat::Identity(n, n));
}

std::vector<Vec> orthant_cone_ball_vertices(const NormSpec& spec, Index n) {
    std::vector<Vec> out;
    NormSpec::Kind k = spec.kind;
    if (k == NormSpec::Kind::InducedE) k = NormSpec::Kind::LInf;
    if (k == NormSpec::Kind::InducedEDual) k = NormSpec::Kind::L1;
    if (k == NormSpec::Kind::L1) {
        for (Index i = 0; i < n; ++i) {
            Vec v = Vec::Zero(n);
            v[i] = 1.0;
            out.push_back(v);
        }
        return out;
    }
    if (k == NormSpec::Kind::LInf) {
        if (n > 16) throw DimensionTooLarge("orthant_cone_ball_vertices: n above 16");
        for (Index s = 1; s < (Index(1) << n); ++s) {
            Vec v = Vec::Zero(n);
            for (Index j = 0; j < n; ++j)
                if ((s >> j) & 1) v[j] = 1.0;
            out.push_back(v);
        }
        return out;
    }
    throw NonPolyhedralNorm("orthant_cone_ball_vertices: polyhedral norms only");
}

}  // namespace concord
