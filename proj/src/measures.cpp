#include "concord/measures.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>

#include "concord/lp.hpp"

namespace concord {

namespace {

constexpr double kSampledSlack = 1.05;  // reported bracket width on sampled paths

bool same_cone(const ConePtr& a, const ConePtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->kind() != b->kind() || a->ambient_dim() != b->ambient_dim()) return false;
    switch (a->kind()) {
        case Cone::Kind::Rotated2D: return std::abs(a->phi() - b->phi()) < 1e-15;
        case Cone::Kind::Psd: return a->psd_side() == b->psd_side();
        case Cone::Kind::Product: {
            if (a->parts().size() != b->parts().size()) return false;
            for (size_t i = 0; i < a->parts().size(); ++i)
                if (!same_cone(a->parts()[i], b->parts()[i])) return false;
            return true;
        }
        default: return true;
    }
}

// |||.||| == ||.||_e for this cone (including the l-inf spelling over the
// orthant, where the two coincide).
bool tri_is_induced_e(const NormSpec& tri, const ConePtr& k) {
    if (tri.kind == NormSpec::Kind::InducedE && same_cone(tri.cone, k)) return true;
    return k->kind() == Cone::Kind::Orthant && tri.kind == NormSpec::Kind::LInf;
}

bool tri_is_induced_e_dual(const NormSpec& tri, const ConePtr& k) {
    if (tri.kind == NormSpec::Kind::InducedEDual && same_cone(tri.cone, k)) return true;
    return k->kind() == Cone::Kind::Orthant && tri.kind == NormSpec::Kind::L1;
}

// ---------------------------------------------------------------------------
// Small exact solvers.
// ---------------------------------------------------------------------------

// min_{alpha in simplex} ||P alpha||_2 by KKT support enumeration (exact for
// k <= 14 columns). Every candidate is a feasible point, and the optimum's
// support appears among the candidates.
double hull_min_norm(const Mat& p, Vec& alpha_out) {
    const Index k = p.cols();
    if (k > 14) throw DimensionTooLarge("hull_min_norm: more than 14 atoms");
    Mat q = p.transpose() * p;
    double best = kInfinity;
    Vec best_alpha;
    for (Index mask = 1; mask < (Index(1) << k); ++mask) {
        std::vector<Index> t;
        for (Index j = 0; j < k; ++j)
            if ((mask >> j) & 1) t.push_back(j);
        const Index s = static_cast<Index>(t.size());
        // Stationarity on the support: [2Q_T  1; 1' 0][a; mu] = [0; 1].
        Mat kkt = Mat::Zero(s + 1, s + 1);
        for (Index i = 0; i < s; ++i)
            for (Index j = 0; j < s; ++j) kkt(i, j) = 2.0 * q(t[i], t[j]);
        kkt.row(s).head(s).setOnes();
        kkt.col(s).head(s).setOnes();
        Vec rhs = Vec::Zero(s + 1);
        rhs[s] = 1.0;
        Eigen::FullPivLU<Mat> lu(kkt);
        if (lu.rank() < s + 1) continue;
        Vec sol = lu.solve(rhs);
        bool ok = true;
        for (Index i = 0; i < s; ++i)
            if (sol[i] < -1e-10) { ok = false; break; }
        if (!ok) continue;
        Vec alpha = Vec::Zero(k);
        double norm1 = 0;
        for (Index i = 0; i < s; ++i) {
            alpha[t[i]] = std::max(sol[i], 0.0);
            norm1 += alpha[t[i]];
        }
        if (norm1 <= 0) continue;
        alpha /= norm1;
        double val = (p * alpha).norm();
        if (val < best) { best = val; best_alpha = alpha; }
    }
    alpha_out = best_alpha;
    return best;
}

// min_{||w||_2 <= 1} ||c + M w||_2, exact via the secular equation.
double trs_min(const Vec& c, const Mat& m, Vec& w_out) {
    Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Vec g = -(m.transpose() * c);
    // Unconstrained least squares first.
    Vec sv = svd.singularValues();
    Vec utc = svd.matrixU().transpose() * c;
    Index r = 0;
    for (Index i = 0; i < sv.size(); ++i)
        if (sv[i] > 1e-12 * sv[0]) ++r;
    Vec w0 = Vec::Zero(m.cols());
    for (Index i = 0; i < r; ++i) w0 -= svd.matrixV().col(i) * (utc[i] / sv[i]);
    if (w0.norm() <= 1.0 + 1e-12) {
        w_out = w0.norm() <= 1.0 ? w0 : Vec(w0 / w0.norm());
        return (c + m * w_out).norm();
    }
    // Boundary: (M'M + lam I) w = -M'c with ||w(lam)|| = 1, lam > 0; the norm
    // is strictly decreasing in lam, so bisect.
    auto norm_at = [&](double lam) {
        double s2 = 0;
        for (Index i = 0; i < sv.size(); ++i) {
            double num = sv[i] * utc[i];
            s2 += (num * num) / std::pow(sv[i] * sv[i] + lam, 2);
        }
        return std::sqrt(s2);
    };
    double lo = 0.0, hi = std::max(1.0, g.norm());
    while (norm_at(hi) > 1.0) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        (norm_at(mid) > 1.0 ? lo : hi) = mid;
    }
    double lam = 0.5 * (lo + hi);
    Vec w = Vec::Zero(m.cols());
    for (Index i = 0; i < sv.size(); ++i)
        if (sv[i] > 0 || lam > 0)
            w -= svd.matrixV().col(i) * (sv[i] * utc[i] / (sv[i] * sv[i] + lam));
    if (w.norm() > 0) w /= w.norm();
    w_out = w;
    return (c + m * w).norm();
}

// argmin_{u in Delta(K*)} <g, u> — the linear oracle over the dual simplex
// slice {u in K* : <u, e> = 1}.
Vec delta_linear_oracle(const ConePtr& k, const Vec& g) {
    const Index n = k->ambient_dim();
    switch (k->kind()) {
        case Cone::Kind::Orthant: {
            Index i;
            g.minCoeff(&i);
            Vec u = Vec::Zero(n);
            u[i] = 1.0;
            return u;
        }
        case Cone::Kind::SecondOrder: {
            Vec u = Vec::Zero(n);
            u[0] = 1.0;
            Vec gb = g.tail(n - 1);
            double nb = gb.norm();
            if (nb > 1e-300) u.tail(n - 1) = -gb / nb;
            return u;
        }
        case Cone::Kind::Psd: {
            Index side = k->psd_side();
            Eigen::SelfAdjointEigenSolver<Mat> es(Cone::svec_to_mat(g, side));
            Vec q = es.eigenvectors().col(0);
            return Cone::mat_to_svec(q * q.transpose());
        }
        case Cone::Kind::Product: {
            double best = kInfinity;
            Vec out;
            Index off = 0;
            for (const auto& part : k->parts()) {
                Index d = part->ambient_dim();
                Vec u_part = delta_linear_oracle(part, g.segment(off, d));
                double val = g.segment(off, d).dot(u_part);
                if (val < best) {
                    best = val;
                    out = Vec::Zero(n);
                    out.segment(off, d) = u_part;
                }
                off += d;
            }
            return out;
        }
        case Cone::Kind::Rotated2D: {
            // Delta(K*) is the segment {u in K* : u_2 = 1}.
            double cot = std::cos(k->phi()) / std::sin(k->phi());
            Vec a(2), b(2);
            a << -cot, 1.0;
            b << cot, 1.0;
            return g.dot(a) <= g.dot(b) ? a : b;
        }
    }
    throw UnsupportedCone("delta_linear_oracle");
}

struct DeltaMin {
    double value = 0.0;   // min ||Pi_L u||_2 over Delta(K*)
    Vec u;                // minimizer
    bool exact = false;
};

// min_{u in Delta(K*)} ||Pi_L u||_2. Orthant: exact hull enumeration. SOC:
// exact trust-region subproblem. Rotated2D: closed form on the segment.
// PSD / products: fully corrective Frank-Wolfe with a duality-gap stop.
DeltaMin min_over_delta(const ConePtr& k, const Subspace& l) {
    const Index n = k->ambient_dim();
    Mat proj = l.projector();
    DeltaMin out;
    switch (k->kind()) {
        case Cone::Kind::Orthant: {
            Vec alpha;
            out.value = hull_min_norm(proj, alpha);  // columns Pi e_i
            out.u = alpha;
            out.exact = true;
            return out;
        }
        case Cone::Kind::SecondOrder: {
            Vec e = k->identity();
            Mat j = Mat::Zero(n, n - 1);
            j.bottomRows(n - 1).setIdentity();
            Vec w;
            out.value = trs_min(proj * e, proj * j, w);
            out.u = e + j * w;
            out.exact = true;
            return out;
        }
        case Cone::Kind::Rotated2D: {
            double cot = std::cos(k->phi()) / std::sin(k->phi());
            // u(s) = (s, 1), s in [-cot, cot]; ||Pi u||^2 is quadratic in s.
            Vec p0 = proj.col(0), p1 = proj.col(1);
            double a = p0.dot(p0), b = 2.0 * p0.dot(p1);
            double s = a > 1e-15 ? std::clamp(-b / (2 * a), -cot, cot) : 0.0;
            double best = kInfinity;
            for (double cand : {s, -cot, cot}) {
                Vec u(2);
                u << cand, 1.0;
                double v = (proj * u).norm();
                if (v < best) { best = v; out.u = u; }
            }
            out.value = best;
            out.exact = true;
            return out;
        }
        default: {
            // FCFW over Delta(K*).
            Vec u = k->identity() / static_cast<double>(k->rank());
            std::vector<Vec> atoms;
            atoms.push_back(u);
            double f = (proj * u).squaredNorm();
            double gap = kInfinity;
            for (int it = 0; it < 400; ++it) {
                Vec grad = 2.0 * (proj * u);
                Vec s = delta_linear_oracle(k, grad);
                gap = grad.dot(u - s);
                if (gap <= 1e-13 * (1.0 + f)) break;
                atoms.push_back(s);
                // Fully corrective step over the atom hull.
                Mat pa(n, static_cast<Index>(atoms.size()));
                for (size_t a = 0; a < atoms.size(); ++a) pa.col(static_cast<Index>(a)) = proj * atoms[a];
                Vec alpha;
                hull_min_norm(pa, alpha);
                Vec nu = Vec::Zero(n);
                for (size_t a = 0; a < atoms.size(); ++a) nu += alpha[static_cast<Index>(a)] * atoms[a];
                u = nu;
                f = (proj * u).squaredNorm();
                // Prune zero-weight atoms to keep the hull small.
                std::vector<Vec> kept;
                for (size_t a = 0; a < atoms.size(); ++a)
                    if (alpha[static_cast<Index>(a)] > 1e-12) kept.push_back(atoms[a]);
                atoms = std::move(kept);
                if (atoms.size() > 8) atoms.erase(atoms.begin(), atoms.begin() + (atoms.size() - 8));
            }
            out.value = std::sqrt(std::max(f, 0.0));
            out.u = u;
            out.exact = gap <= 1e-11 * (1.0 + f);
            return out;
        }
    }
}

// min over {u in C, ||u||_2 = 1} of ||Pi_M u||_2 for the orthant, by
// principal-submatrix eigenpair enumeration (exact; KKT points are eigenpairs
// of support submatrices with one-signed eigenvectors).
double orthant_sphere_min_exact(const Mat& q, Vec& u_out) {
    const Index n = q.rows();
    if (n > 15) throw DimensionTooLarge("orthant_sphere_min_exact: n above 15");
    double best = kInfinity;
    for (Index mask = 1; mask < (Index(1) << n); ++mask) {
        std::vector<Index> t;
        for (Index j = 0; j < n; ++j)
            if ((mask >> j) & 1) t.push_back(j);
        const Index s = static_cast<Index>(t.size());
        Mat qt(s, s);
        for (Index i = 0; i < s; ++i)
            for (Index j = 0; j < s; ++j) qt(i, j) = q(t[i], t[j]);
        Eigen::SelfAdjointEigenSolver<Mat> es(qt);
        for (Index ev = 0; ev < s; ++ev) {
            Vec w = es.eigenvectors().col(ev);
            double wmax = w.cwiseAbs().maxCoeff();
            if (w.maxCoeff() < wmax) w = -w;  // orient positive
            if (w.minCoeff() < -1e-9 * wmax) continue;  // not one-signed
            Vec u = Vec::Zero(n);
            for (Index i = 0; i < s; ++i) u[t[i]] = std::max(w[i], 0.0);
            double nrm = u.norm();
            if (nrm <= 1e-14) continue;
            u /= nrm;
            double val = std::sqrt(std::max(0.0, u.dot(q * u)));
            if (val < best) { best = val; u_out = u; }
        }
    }
    return best;
}

// Closed-form min over {u in C arc, ||u|| = 1} of ||Pi_M u|| for a 2-D cone
// C (generators as columns) and a 1-dimensional M.
double arc_line_min(const Mat& gens, const Vec& m_unit, Vec& u_out) {
    double a0 = std::atan2(gens(1, 0), gens(0, 0));
    double a1 = std::atan2(gens(1, 1), gens(0, 1));
    if (a0 > a1) std::swap(a0, a1);
    double tm = std::atan2(m_unit[1], m_unit[0]);
    double best = kInfinity;
    auto eval = [&](double th) {
        Vec u(2);
        u << std::cos(th), std::sin(th);
        double v = std::abs(std::cos(th - tm));
        if (v < best) { best = v; u_out = u; }
    };
    eval(a0);
    eval(a1);
    for (int k = -2; k <= 2; ++k) {
        double th = tm + M_PI / 2 + k * M_PI;
        if (th >= a0 - 1e-15 && th <= a1 + 1e-15) eval(std::clamp(th, a0, a1));
    }
    return best;
}

// Multistart projected minimization of ||Pi_M u|| over K cap sphere. Sampled
// path: the result is an upper bound on the true minimum.
double cone_sphere_min_sampled(const ConePtr& k, const Mat& proj_m, Vec& u_out,
                               std::mt19937_64& rng, int starts = 120, int iters = 200) {
    const Index n = k->ambient_dim();
    double best = kInfinity;
    Vec best_u;
    auto polish = [&](Vec u) {
        u = k->project(u);
        if (u.norm() < 1e-12) return;
        u /= u.norm();
        double step = 0.5;
        double fu = (proj_m * u).norm();
        for (int it = 0; it < iters; ++it) {
            Vec grad = proj_m * u;  // gradient of 1/2 f^2
            Vec cand = k->project(u - step * grad);
            double nrm = cand.norm();
            if (nrm < 1e-12) { step *= 0.5; continue; }
            cand /= nrm;
            double fc = (proj_m * cand).norm();
            if (fc < fu - 1e-16) {
                u = cand;
                fu = fc;
                step *= 1.1;
            } else {
                step *= 0.5;
                if (step < 1e-14) break;
            }
        }
        if (fu < best) { best = fu; best_u = u; }
    };
    // Seeded starts: cone samples plus the identity direction when available.
    if (k->is_symmetric()) polish(k->identity());
    for (int s = 0; s < starts; ++s) {
        Vec z = k->random_element(rng);
        polish(k->project(z));
        polish(k->random_interior(rng));
    }
    u_out = best_u;
    return best;
}

// max <c, x> over {x in L, x >= 0, ||x||_2 <= 1} by support enumeration.
double orthant_linear_max_ball2(const Vec& c, const Subspace& l, Vec& x_out) {
    const Index n = l.ambient_dim();
    if (n > 15) throw DimensionTooLarge("orthant_linear_max_ball2: n above 15");
    double best = 0.0;  // x = 0 is feasible
    x_out = Vec::Zero(n);
    for (Index mask = 1; mask < (Index(1) << n); ++mask) {
        std::vector<Index> zero_rows;
        for (Index j = 0; j < n; ++j)
            if (!((mask >> j) & 1)) zero_rows.push_back(j);
        Mat rows(static_cast<Index>(zero_rows.size()), n);
        for (size_t i = 0; i < zero_rows.size(); ++i)
            rows.row(static_cast<Index>(i)) = Mat::Identity(n, n).row(zero_rows[i]);
        Mat chart = rows * l.basis();
        Mat ker = kernel_basis(chart);
        if (ker.cols() == 0) continue;
        Mat w = l.basis() * ker;  // basis of L cap {x_T^c = 0}
        Vec coeff = w.transpose() * c;
        double nrm = coeff.norm();
        if (nrm <= 1e-14) continue;
        Vec x = w * (coeff / nrm);
        if (x.minCoeff() < -1e-9) continue;
        x = x.cwiseMax(0.0);
        double xn = x.norm();
        if (xn <= 1e-14) continue;
        x /= xn;
        double val = c.dot(x);
        if (val > best) { best = val; x_out = x; }
    }
    return best;
}

// Gauge rows of the primal norm restricted to the chart of S, i.e. the
// halfspace description {y : rows * y <= 1} of {x in S : ||x|| <= 1}.
Mat chart_gauge(const NormSpec& spec, const Subspace& s) {
    return gauge_rows(spec, s.ambient_dim()) * s.basis();
}

// Distance from x to K under the tri norm, exact for the supported cases.
double dist_to_cone(const Vec& x, const ConePtr& k, const NormSpec& tri) {
    if (tri.is_l2()) return (x - k->project(x)).norm();
    if (k->is_symmetric() && tri.kind == NormSpec::Kind::InducedE && same_cone(tri.cone, k)) {
        auto sd = k->spectral(x);
        return std::max(0.0, -sd.eigenvalues.minCoeff());
    }
    if (k->kind() == Cone::Kind::Orthant) {
        Vec neg = (-x).cwiseMax(0.0);
        return norm_eval(tri, neg);
    }
    // Generic convex fallback: projected subgradient on v in K.
    Vec v = k->project(x);
    double best = norm_eval(tri, x - v);
    double step = 0.5 * (1.0 + x.norm());
    for (int it = 1; it <= 400; ++it) {
        // Numerical subgradient of v -> |||x - v|||.
        Vec g(x.size());
        double f0 = norm_eval(tri, x - v);
        for (Index i = 0; i < x.size(); ++i) {
            Vec dv = Vec::Zero(x.size());
            dv[i] = 1e-7;
            g[i] = (norm_eval(tri, x - v - dv) - f0) / 1e-7;
        }
        v = k->project(v - (step / std::sqrt(it)) * g);
        best = std::min(best, norm_eval(tri, x - v));
    }
    return best;
}

MeasureCertificate sampled_cert(double best, bool minimization) {
    MeasureCertificate c;
    c.value = best;
    c.path = Path::Sampled;
    c.approximate = true;
    if (minimization) {
        c.bracket_lo = best / kSampledSlack;
        c.bracket_hi = best;
    } else {
        c.bracket_lo = best;
        c.bracket_hi = best * kSampledSlack;
    }
    return c;
}

bool lex_less(const Vec& a, const Vec& b) {
    for (Index i = 0; i < a.size(); ++i) {
        if (a[i] < b[i] - 1e-12) return true;
        if (a[i] > b[i] + 1e-12) return false;
    }
    return false;
}

}  // namespace

// ---------------------------------------------------------------------------
// norm_attaining
// ---------------------------------------------------------------------------

Vec norm_attaining(const NormSpec& spec, const Vec& u) {
    const Index n = u.size();
    switch (spec.kind) {
        case NormSpec::Kind::L2: {
            double nn = u.norm();
            if (nn <= 1e-14) throw MissingWitnesses("norm_attaining: zero vector");
            return u / nn;
        }
        case NormSpec::Kind::L1: {
            Index i;
            u.cwiseAbs().maxCoeff(&i);
            Vec w = Vec::Zero(n);
            w[i] = u[i] >= 0 ? 1.0 : -1.0;
            return w;
        }
        case NormSpec::Kind::LInf: {
            Vec w(n);
            for (Index i = 0; i < n; ++i) w[i] = u[i] >= 0 ? 1.0 : -1.0;
            return w;
        }
        case NormSpec::Kind::InducedE: {
            const ConePtr& k = spec.cone;
            if (!k) throw MissingCone("norm_attaining");
            if (k->is_symmetric()) {
                if (k->contains(u, tol::strict_pos)) return k->identity();
                if (k->kind() == Cone::Kind::SecondOrder) {
                    // Ball {|v0| + ||vbar|| <= 1} under the dot pairing.
                    Vec w = Vec::Zero(n);
                    Vec ub = u.tail(n - 1);
                    if (std::abs(u[0]) >= ub.norm()) w[0] = u[0] >= 0 ? 1.0 : -1.0;
                    else w.tail(n - 1) = ub / ub.norm();
                    return w;
                }
                auto sd = k->spectral(u);
                Vec w = Vec::Zero(n);
                for (Index i = 0; i < sd.eigenvalues.size(); ++i)
                    w += (sd.eigenvalues[i] >= 0 ? 1.0 : -1.0) * sd.frame.col(i);
                return w;
            }
            break;
        }
        case NormSpec::Kind::InducedEDual: {
            const ConePtr& k = spec.cone;
            if (!k) throw MissingCone("norm_attaining");
            if (k->kind() == Cone::Kind::SecondOrder) {
                Vec w = Vec::Zero(n);
                w[0] = u[0] >= 0 ? 1.0 : -1.0;
                Vec ub = u.tail(n - 1);
                if (ub.norm() > 1e-14) w.tail(n - 1) = ub / ub.norm();
                return w;
            }
            if (k->is_symmetric()) {
                auto sd = k->spectral(u);
                Index i;
                sd.eigenvalues.cwiseAbs().maxCoeff(&i);
                return Vec((sd.eigenvalues[i] >= 0 ? 1.0 : -1.0) * sd.frame.col(i));
            }
            break;
        }
    }
    // Polyhedral fallback: maximize over the unit ball's vertices.
    if (is_polyhedral(spec)) {
        auto verts = ball_vertices_full(spec, n);
        double best = -kInfinity;
        Vec w;
        for (const Vec& v : verts)
            if (u.dot(v) > best) { best = u.dot(v); w = v; }
        return w;
    }
    throw UnsupportedNorm("norm_attaining");
}

// ---------------------------------------------------------------------------
// dist / odist
// ---------------------------------------------------------------------------

MeasureCertificate dist(const Subspace& l1, const Subspace& l2, const NormPair& np) {
    if (l1.ambient_dim() != l2.ambient_dim())
        throw DimensionMismatch("dist: ambient dimensions differ");
    const Index n = l1.ambient_dim();
    MeasureCertificate cert;

    if (np.primal.is_l2() && np.tri.is_l2()) {
        // max_{x in L1, ||x||=1} ||Pi_{L2 perp} x|| = sigma_max((I - P2) B1).
        Mat m = (Mat::Identity(n, n) - l2.projector()) * l1.basis();
        Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
        cert.value = svd.singularValues()[0];
        cert.path = Path::ClosedForm;
        Vec x = l1.basis() * svd.matrixV().col(0);
        cert.x_bar = x;
        Vec v = l2.project(x);
        cert.v_bar = v;
        Vec r = x - v;
        if (r.norm() > 1e-13) {
            Vec u = r / r.norm();
            cert.u_bar = u;
            cert.y_bar = u - l1.project(u);
            cert.alignment_residual =
                std::abs(u.dot(x - v) - cert.value) + std::abs(u.dot(x) - cert.value) +
                std::abs((u - *cert.y_bar).norm() - cert.value);
        } else {
            cert.alignment_residual = 0.0;
        }
        return cert;
    }

    if (is_polyhedral(np.primal) && (is_polyhedral(np.tri) || np.tri.is_l2()) &&
        l1.dim() <= 10) {
        auto verts = ball_vertices(np.primal, l1);
        double best = -kInfinity;
        Vec best_x;
        MinNormCertificate best_mn;
        for (const Vec& x : verts) {
            auto mn = min_norm_to_subspace(l2, x, np.tri);
            if (mn.value > best + 1e-12 ||
                (mn.value > best - 1e-12 && best_x.size() && lex_less(x, best_x))) {
                best = std::max(best, mn.value);
                best_x = x;
                best_mn = mn;
            }
        }
        cert.value = best;
        cert.path = Path::LpExact;
        cert.x_bar = best_x;
        cert.v_bar = best_mn.minimizer;
        cert.u_bar = best_mn.dual;  // in L2^perp, |||.|||_* = 1
        auto yfit = min_norm_to_subspace(orth_complement(l1), *cert.u_bar, dual_spec(np.primal));
        cert.y_bar = yfit.minimizer;
        double ux = cert.u_bar->dot(best_x);
        cert.alignment_residual = std::abs(cert.u_bar->dot(best_x - best_mn.minimizer) - ux) +
                                  std::abs(norm_eval(np.tri, best_x - best_mn.minimizer) - ux) +
                                  std::abs(yfit.value - ux);
        return cert;
    }

    // Sampled outer maximization over the L1 sphere.
    std::mt19937_64 rng(0x5eed0d15ull);
    std::normal_distribution<double> g(0.0, 1.0);
    double best = 0;
    Vec best_x;
    const bool inner_exact = np.tri.is_l2() || is_polyhedral(np.tri);
    for (int s = 0; s < 4000; ++s) {
        Vec y(l1.dim());
        for (Index i = 0; i < y.size(); ++i) y[i] = g(rng);
        Vec x = l1.basis() * y;
        double nx = norm_eval(np.primal, x);
        if (nx <= 1e-14) continue;
        x /= nx;
        double v;
        if (inner_exact) v = min_norm_to_subspace(l2, x, np.tri).value;
        else {
            // crude inner: project in l2 and evaluate tri norm
            v = norm_eval(np.tri, x - l2.project(x));
        }
        if (v > best) { best = v; best_x = x; }
    }
    cert = sampled_cert(best, /*minimization=*/false);
    if (best_x.size()) cert.x_bar = best_x;
    return cert;
}

namespace {

// Inner value of odist at direction x: min over unit-||.||-sphere d in L2 and
// tau >= 0 of |||tau x - d|||, via one LP per facet of the ball section.
double odist_inner_polyhedral(const Vec& x, const Subspace& l2, const NormPair& np, Vec* v_out) {
    Mat gc = chart_gauge(np.primal, l2);
    Mat gt = gauge_rows(np.tri, static_cast<Index>(x.size()));
    const Index m2 = l2.dim(), ngc = gc.rows(), ngt = gt.rows();
    double best = kInfinity;
    if (v_out) v_out->resize(0);
    for (Index kf = 0; kf < ngc; ++kf) {
        // Vars: y (m2 free), tau (>=0), t (>=0), slack w (ngc >= 0), slack z (ngt >= 0).
        const Index nv = m2 + 2 + ngc + ngt;
        lp::LpProblem p = lp::LpProblem::make(1 + ngc + ngt, nv);
        Index row = 0;
        p.eq_matrix.block(row, 0, 1, m2) = gc.row(kf);
        p.eq_rhs[row] = 1.0;  // facet equality
        ++row;
        for (Index j = 0; j < ngc; ++j, ++row) {
            p.eq_matrix.block(row, 0, 1, m2) = gc.row(j);
            p.eq_matrix(row, m2 + 2 + j) = 1.0;
            p.eq_rhs[row] = 1.0;
        }
        Mat gtb = gt * l2.basis();
        for (Index j = 0; j < ngt; ++j, ++row) {
            // g_j'(tau x - B y) - t <= 0
            p.eq_matrix.block(row, 0, 1, m2) = -gtb.row(j);
            p.eq_matrix(row, m2) = gt.row(j).dot(x);
            p.eq_matrix(row, m2 + 1) = -1.0;
            p.eq_matrix(row, m2 + 2 + ngc + j) = 1.0;
            p.eq_rhs[row] = 0.0;
        }
        p.lower[m2] = 0.0;       // tau
        p.lower[m2 + 1] = 0.0;   // t
        p.lower.tail(ngc + ngt).setZero();
        p.objective[m2 + 1] = 1.0;
        lp::LpSolution s = lp::solve_lp(p);
        if (s.status != lp::LpStatus::Optimal) continue;  // empty facet
        if (s.value < best) {
            best = s.value;
            if (v_out) {
                double tau = s.primal[m2];
                if (tau > 1e-12) *v_out = l2.basis() * s.primal.head(m2) / tau;
                else v_out->resize(0);
            }
        }
    }
    return best;
}

}  // namespace

MeasureCertificate odist(const Subspace& l1, const Subspace& l2, const NormPair& np) {
    if (l1.ambient_dim() != l2.ambient_dim())
        throw DimensionMismatch("odist: ambient dimensions differ");
    MeasureCertificate cert;

    if (np.primal.is_l2() && np.tri.is_l2()) {
        // Coincides with dist; computed through the projector route so the
        // two Euclidean evaluations stay independent.
        if (l1.dim() == l2.dim()) {
            cert.value = projection_gap(l1, l2);
        } else {
            Mat m = (Mat::Identity(l1.ambient_dim(), l1.ambient_dim()) - l2.projector()) *
                    l1.basis();
            Eigen::JacobiSVD<Mat> svd(m);
            cert.value = svd.singularValues()[0];
        }
        cert.path = Path::ClosedForm;
        return cert;
    }

    if (is_polyhedral(np.primal) && is_polyhedral(np.tri)) {
        if (l1.dim() == 1) {
            Vec b = l1.basis().col(0);
            Vec x = b / norm_eval(np.primal, b);
            double best = -kInfinity;
            Vec best_x, vbar;
            for (const Vec& cand : {Vec(x), Vec(-x)}) {
                Vec v;
                double val = odist_inner_polyhedral(cand, l2, np, &v);
                if (val > best) { best = val; best_x = cand; vbar = v; }
            }
            cert.value = best;
            cert.path = Path::LpExact;
            cert.x_bar = best_x;
            if (vbar.size()) cert.v_bar = vbar;
            return cert;
        }
        // Outer sphere is curved from the measure's point of view: sample the
        // boundary plus the section vertices and polish locally.
        std::mt19937_64 rng(0x0d157a11ull);
        std::normal_distribution<double> g(0.0, 1.0);
        double best = -kInfinity;
        Vec best_x;
        std::vector<Vec> cands;
        for (const Vec& v : ball_vertices(np.primal, l1)) cands.push_back(v);
        for (int s = 0; s < 300; ++s) {
            Vec y(l1.dim());
            for (Index i = 0; i < y.size(); ++i) y[i] = g(rng);
            Vec x = l1.basis() * y;
            double nx = norm_eval(np.primal, x);
            if (nx > 1e-14) cands.push_back(x / nx);
        }
        for (const Vec& x : cands) {
            double val = odist_inner_polyhedral(x, l2, np, nullptr);
            if (val > best) { best = val; best_x = x; }
        }
        cert = sampled_cert(best, false);
        cert.x_bar = best_x;
        return cert;
    }

    // Generic sampled path: exact inner over tau for l2 tri, sampled otherwise.
    std::mt19937_64 rng(0x0d157a12ull);
    std::normal_distribution<double> g(0.0, 1.0);
    double best = 0;
    for (int s = 0; s < 3000; ++s) {
        Vec y(l1.dim());
        for (Index i = 0; i < y.size(); ++i) y[i] = g(rng);
        Vec x = l1.basis() * y;
        double nx = norm_eval(np.primal, x);
        if (nx <= 1e-14) continue;
        x /= nx;
        // inner: sample unit-||.|| directions d in L2, minimize over tau.
        double inner = kInfinity;
        for (int ds = 0; ds < 200; ++ds) {
            Vec z(l2.dim());
            for (Index i = 0; i < z.size(); ++i) z[i] = g(rng);
            Vec dvec = l2.basis() * z;
            double nd = norm_eval(np.primal, dvec);
            if (nd <= 1e-14) continue;
            dvec /= nd;
            if (np.tri.is_l2()) {
                double tau = std::max(0.0, x.dot(dvec) / x.squaredNorm());
                inner = std::min(inner, (tau * x - dvec).norm());
            } else {
                for (double tau : {0.0, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 4.0})
                    inner = std::min(inner, norm_eval(np.tri, tau * x - dvec));
            }
        }
        best = std::max(best, inner);
    }
    cert = sampled_cert(best, false);
    return cert;
}

// ---------------------------------------------------------------------------
// nu
// ---------------------------------------------------------------------------

namespace {

// Completes (u, value) into a full nu certificate with y from the exact
// min-norm projection and the alignment residual of the optimality system.
void finish_nu_cert(MeasureCertificate& cert, const Subspace& l, const NormPair& np,
                    const Vec& u) {
    cert.u_bar = u;
    Subspace lperp = orth_complement(l);
    auto yfit = min_norm_to_subspace(lperp, u, dual_spec(np.primal));
    cert.y_bar = yfit.minimizer;
    if (cert.value > tol::strict_pos && cert.x_bar) {
        const Vec& x = *cert.x_bar;
        cert.alignment_residual = std::abs((u - *cert.y_bar).dot(x) - u.dot(x)) +
                                  std::abs(u.dot(x) - cert.value) +
                                  std::abs(yfit.value - cert.value);
    } else {
        cert.alignment_residual = std::abs(yfit.value - cert.value);
    }
}

}  // namespace

namespace {
MeasureCertificate nu_impl(const Subspace& l, const ConePtr& k, const NormPair& np) {
    if (l.ambient_dim() != k->ambient_dim()) throw DimensionMismatch("nu: ambient mismatch");
    const Index n = k->ambient_dim();
    MeasureCertificate cert;

    const bool primal_poly = is_polyhedral(np.primal);
    const bool primal_l2 = np.primal.is_l2();

    // Path (a): |||.||| induced by (K, e) -> most interior normalized point.
    if (tri_is_induced_e(np.tri, k)) {
        if (k->kind() == Cone::Kind::Orthant && primal_poly) {
            // max t s.t. x = B y, x - t e >= 0, ||x|| <= 1.
            Mat gc = chart_gauge(np.primal, l);
            const Index m = l.dim(), ng = gc.rows();
            lp::LpProblem p = lp::LpProblem::make(n + ng, m + 1 + n + ng);
            for (Index i = 0; i < n; ++i) {
                p.eq_matrix.block(i, 0, 1, m) = l.basis().row(i);
                p.eq_matrix(i, m) = -1.0;
                p.eq_matrix(i, m + 1 + i) = -1.0;  // surplus
            }
            for (Index j = 0; j < ng; ++j) {
                p.eq_matrix.block(n + j, 0, 1, m) = gc.row(j);
                p.eq_matrix(n + j, m + 1 + n + j) = 1.0;  // slack
                p.eq_rhs[n + j] = 1.0;
            }
            p.lower.tail(n + ng).setZero();
            p.objective[m] = 1.0;
            p.maximize = true;
            lp::LpSolution s = lp::solve_lp(p);
            if (s.status != lp::LpStatus::Optimal) throw NumericalFailure("nu: LP path failed");
            cert.value = std::max(s.value, 0.0);
            cert.path = Path::LpExact;
            Vec x = l.basis() * s.primal.head(m);
            double nx = norm_eval(np.primal, x);
            if (nx > 1e-12) x /= nx;
            cert.x_bar = x;
            // Dual route for the witness u: min_{u in simplex} max over ball
            // vertices of <u, x>.
            if (l.dim() <= 10) {
                auto verts = ball_vertices(np.primal, l);
                const Index nv = static_cast<Index>(verts.size());
                lp::LpProblem d = lp::LpProblem::make(nv + 1, n + 1 + nv);
                for (Index vi = 0; vi < nv; ++vi) {
                    for (Index j = 0; j < n; ++j) d.eq_matrix(vi, j) = verts[vi][j];
                    d.eq_matrix(vi, n) = -1.0;
                    d.eq_matrix(vi, n + 1 + vi) = 1.0;  // slack: v'u <= s
                }
                d.eq_matrix.block(nv, 0, 1, n).setOnes();
                d.eq_rhs[nv] = 1.0;
                d.lower.head(n).setZero();
                d.lower.tail(nv).setZero();
                d.objective[n] = 1.0;
                lp::LpSolution ds = lp::solve_lp(d);
                if (ds.status == lp::LpStatus::Optimal &&
                    std::abs(ds.value - cert.value) <= 1e-7 * (1.0 + cert.value)) {
                    Vec u = ds.primal.head(n).cwiseMax(0.0);
                    u /= u.sum();
                    finish_nu_cert(cert, l, np, u);
                    return cert;
                }
            }
            // Fallback witness from the LP row duals on the cone rows.
            Vec u = s.dual.head(n).cwiseAbs();
            if (u.sum() > 1e-12) {
                u /= u.sum();
                finish_nu_cert(cert, l, np, u);
            }
            return cert;
        }
        if (primal_l2) {
            DeltaMin dm = min_over_delta(k, l);
            cert.value = dm.value;
            cert.path = (k->kind() == Cone::Kind::Rotated2D) ? Path::ClosedForm : Path::LpExact;
            if (!dm.exact) {
                cert.path = Path::Sampled;
                cert.approximate = true;
                cert.bracket_lo = dm.value / kSampledSlack;
                cert.bracket_hi = dm.value;
            }
            if (cert.value > 1e-13) cert.x_bar = Vec(l.project(dm.u) / cert.value);
            finish_nu_cert(cert, l, np, dm.u);
            return cert;
        }
    }

    // Induced-dual tri over the orthant: nu = min_i max{x_i : x in L cap K,
    // ||x|| <= 1} (feasible side).
    if (k->kind() == Cone::Kind::Orthant && tri_is_induced_e_dual(np.tri, k) &&
        (primal_poly || primal_l2)) {
        double feas = interior_margin(l, k);
        if (feas > tol::strict_pos) {
            double best = kInfinity;
            Vec best_x;
            Index best_i = 0;
            for (Index i = 0; i < n; ++i) {
                Vec c = Vec::Zero(n);
                c[i] = 1.0;
                double vi;
                Vec xi;
                if (primal_l2) {
                    vi = orthant_linear_max_ball2(c, l, xi);
                } else {
                    Mat gc = chart_gauge(np.primal, l);
                    const Index m = l.dim(), ng = gc.rows();
                    lp::LpProblem p = lp::LpProblem::make(n + ng, m + n + ng);
                    for (Index r = 0; r < n; ++r) {
                        p.eq_matrix.block(r, 0, 1, m) = l.basis().row(r);
                        p.eq_matrix(r, m + r) = -1.0;  // x_r >= 0 surplus
                    }
                    for (Index j = 0; j < ng; ++j) {
                        p.eq_matrix.block(n + j, 0, 1, m) = gc.row(j);
                        p.eq_matrix(n + j, m + n + j) = 1.0;
                        p.eq_rhs[n + j] = 1.0;
                    }
                    p.lower.tail(n + ng).setZero();
                    p.objective.head(m) = l.basis().row(i).transpose();
                    p.maximize = true;
                    lp::LpSolution s = lp::solve_lp(p);
                    if (s.status != lp::LpStatus::Optimal)
                        throw NumericalFailure("nu: induced-dual LP failed");
                    vi = s.value;
                    xi = l.basis() * s.primal.head(m);
                }
                if (vi < best) {
                    best = vi;
                    best_x = xi;
                    best_i = i;
                }
            }
            cert.value = std::max(best, 0.0);
            cert.path = Path::LpExact;
            if (best_x.size()) {
                double nx = norm_eval(np.primal, best_x);
                if (nx > 1e-12) best_x /= nx;
                cert.x_bar = best_x;
            }
            Vec u = Vec::Zero(n);
            u[best_i] = 1.0;  // the primitive idempotent, |||u|||_* = 1
            finish_nu_cert(cert, l, np, u);
            return cert;
        }
        cert.value = 0.0;
        cert.path = Path::LpExact;
        return cert;
    }

    // Path (b): Euclidean pair, nu = sin angle(L^perp, K*).
    if (primal_l2 && np.tri.is_l2()) {
        Subspace lp_ = orth_complement(l);
        ConePtr kd = k->dual();
        Mat proj_l = l.projector();  // distance from u to L^perp
        if (k->kind() == Cone::Kind::Orthant && n <= 15) {
            Vec u;
            cert.value = orthant_sphere_min_exact(proj_l, u);
            cert.path = Path::LpExact;
            if (cert.value > 1e-13) cert.x_bar = Vec(l.project(u) / (l.project(u)).norm());
            finish_nu_cert(cert, l, np, u);
            return cert;
        }
        if (k->kind() == Cone::Kind::Rotated2D) {
            Vec u;
            Vec m_unit = l.basis().col(0);  // ||Pi_L u|| = |<u, l>|
            cert.value = arc_line_min(kd->generators(), m_unit, u);
            cert.path = Path::ClosedForm;
            if (cert.value > 1e-13) cert.x_bar = Vec(l.project(u) / (l.project(u)).norm());
            finish_nu_cert(cert, l, np, u);
            return cert;
        }
        std::mt19937_64 rng(0x00a7ba5eull);
        Vec u;
        double best = cone_sphere_min_sampled(kd, proj_l, u, rng);
        cert = sampled_cert(best, true);
        if (u.size() && best > 1e-13) cert.x_bar = Vec(l.project(u) / (l.project(u)).norm());
        if (u.size()) finish_nu_cert(cert, l, np, u);
        return cert;
    }

    // Generic sampled path: sample u in K* with |||u|||_* = 1 and take the
    // exact distance to L^perp whenever the dual norm has a solver path.
    std::mt19937_64 rng(0x00a7ba5full);
    ConePtr kd = k->dual();
    Subspace lperp = orth_complement(l);
    NormSpec dn = dual_spec(np.primal);
    const bool inner_exact = dn.is_l2() || is_polyhedral(dn);
    double best = kInfinity;
    Vec best_u;
    for (int s = 0; s < 2000; ++s) {
        Vec u = kd->project(kd->random_element(rng));
        double un = dual_norm_eval(np.tri, u);
        if (un <= 1e-12) continue;
        u /= un;
        double v = inner_exact ? min_norm_to_subspace(lperp, u, dn).value
                               : (u - lperp.project(u)).norm();
        if (v < best) { best = v; best_u = u; }
    }
    cert = sampled_cert(best, true);
    if (best_u.size()) finish_nu_cert(cert, l, np, best_u);
    return cert;
}

}  // namespace

// The quadratic solution paths resolve zeros only to sqrt(eps); when the
// exact side test says the measure vanishes, report a clean zero.
MeasureCertificate nu(const Subspace& l, const ConePtr& k, const NormPair& np) {
    MeasureCertificate c = nu_impl(l, k, np);
    if (c.value > 0 && c.value < 1e-7 && interior_margin(l, k) <= tol::strict_pos)
        c.value = 0.0;
    return c;
}

// ---------------------------------------------------------------------------
// nu_bar
// ---------------------------------------------------------------------------

namespace {
MeasureCertificate nu_bar_impl(const Subspace& l, const ConePtr& k, const NormPair& np) {
    if (l.ambient_dim() != k->ambient_dim()) throw DimensionMismatch("nu_bar: ambient mismatch");
    const Index n = k->ambient_dim();
    MeasureCertificate cert;

    if (np.primal.is_l2() && np.tri.is_l2()) {
        Mat proj_perp = orth_complement(l).projector();
        if (k->kind() == Cone::Kind::Orthant && n <= 15) {
            Vec vhat;
            cert.value = orthant_sphere_min_exact(proj_perp, vhat);
            cert.path = Path::LpExact;
            Vec xl = l.project(vhat);
            if (xl.norm() > 1e-13) {
                Vec x = xl / xl.norm();
                cert.x_bar = x;
                cert.v_bar = Vec(x.dot(vhat) * vhat);
                cert.alignment_residual =
                    std::abs(norm_eval(np.tri, *cert.v_bar - x) - cert.value);
            } else {
                cert.v_bar = Vec(Vec::Zero(n));  // vbar = 0 branch
                cert.alignment_residual = 0.0;
            }
            return cert;
        }
        if (k->kind() == Cone::Kind::Rotated2D) {
            Vec vhat;
            Vec m_unit = orth_complement(l).basis().col(0);
            cert.value = arc_line_min(k->generators(), m_unit, vhat);
            cert.path = Path::ClosedForm;
            Vec xl = l.project(vhat);
            if (xl.norm() > 1e-13) {
                Vec x = xl / xl.norm();
                cert.x_bar = x;
                cert.v_bar = Vec(x.dot(vhat) * vhat);
            } else {
                cert.v_bar = Vec(Vec::Zero(n));
            }
            return cert;
        }
        std::mt19937_64 rng(0x00b7ba5eull);
        Vec vhat;
        double best = cone_sphere_min_sampled(k, proj_perp, vhat, rng);
        cert = sampled_cert(best, true);
        if (vhat.size()) {
            Vec xl = l.project(vhat);
            if (xl.norm() > 1e-13) {
                cert.x_bar = Vec(xl / xl.norm());
                cert.v_bar = Vec(cert.x_bar->dot(vhat) * vhat);
            }
        }
        return cert;
    }

    if (k->kind() == Cone::Kind::Orthant && is_polyhedral(np.primal) && is_polyhedral(np.tri)) {
        // One LP per facet of {x in L : ||x|| = 1}.
        Mat gc = chart_gauge(np.primal, l);
        Mat gt = gauge_rows(np.tri, n);
        const Index m = l.dim(), ngc = gc.rows(), ngt = gt.rows();
        double best = kInfinity;
        Vec best_x, best_v;
        Mat gtb = gt * l.basis();
        for (Index kf = 0; kf < ngc; ++kf) {
            // Vars: y (m), v (n >= 0), t (>= 0), gauge slacks (ngc), tri slacks (ngt).
            const Index nv = m + n + 1 + ngc + ngt;
            lp::LpProblem p = lp::LpProblem::make(1 + ngc + ngt, nv);
            Index row = 0;
            p.eq_matrix.block(row, 0, 1, m) = gc.row(kf);
            p.eq_rhs[row] = 1.0;
            ++row;
            for (Index j = 0; j < ngc; ++j, ++row) {
                p.eq_matrix.block(row, 0, 1, m) = gc.row(j);
                p.eq_matrix(row, m + n + 1 + j) = 1.0;
                p.eq_rhs[row] = 1.0;
            }
            for (Index j = 0; j < ngt; ++j, ++row) {
                // g_j'(v - B y) <= t
                p.eq_matrix.block(row, 0, 1, m) = -gtb.row(j);
                p.eq_matrix.block(row, m, 1, n) = gt.row(j);
                p.eq_matrix(row, m + n) = -1.0;
                p.eq_matrix(row, m + n + 1 + ngc + j) = 1.0;
                p.eq_rhs[row] = 0.0;
            }
            p.lower.segment(m, n).setZero();
            p.lower[m + n] = 0.0;
            p.lower.tail(ngc + ngt).setZero();
            p.objective[m + n] = 1.0;
            lp::LpSolution s = lp::solve_lp(p);
            if (s.status != lp::LpStatus::Optimal) continue;
            if (s.value < best) {
                best = s.value;
                best_x = l.basis() * s.primal.head(m);
                best_v = s.primal.segment(m, n);
            }
        }
        if (best == kInfinity) throw NumericalFailure("nu_bar: all facet LPs infeasible");
        cert.value = std::max(best, 0.0);
        cert.path = Path::LpExact;
        cert.x_bar = best_x;
        cert.v_bar = best_v;
        cert.alignment_residual = std::abs(norm_eval(np.tri, best_v - best_x) - cert.value);
        return cert;
    }

    // Sampled: outer over the unit sphere of L, exact inner distance to K
    // where available.
    std::mt19937_64 rng(0x00b7ba5full);
    std::normal_distribution<double> g(0.0, 1.0);
    double best = kInfinity;
    Vec best_x;
    for (int s = 0; s < 4000; ++s) {
        Vec y(l.dim());
        for (Index i = 0; i < y.size(); ++i) y[i] = g(rng);
        Vec x = l.basis() * y;
        double nx = norm_eval(np.primal, x);
        if (nx <= 1e-14) continue;
        x /= nx;
        double v = dist_to_cone(x, k, np.tri);
        if (v < best) { best = v; best_x = x; }
    }
    cert = sampled_cert(best, true);
    if (best_x.size()) {
        cert.x_bar = best_x;
        cert.v_bar = Vec(k->project(best_x));
    }
    return cert;
}

}  // namespace

MeasureCertificate nu_bar(const Subspace& l, const ConePtr& k, const NormPair& np) {
    MeasureCertificate c = nu_bar_impl(l, k, np);
    if (c.value > 0 && c.value < 1e-7 &&
        interior_margin(orth_complement(l), k->dual()) <= tol::strict_pos)
        c.value = 0.0;
    return c;
}

// ---------------------------------------------------------------------------
// interior_margin
// ---------------------------------------------------------------------------

double interior_margin(const Subspace& l, const ConePtr& k) {
    // The side decision must not inherit the sqrt-of-noise floor of the
    // quadratic routes, so polyhedral cones get linear (exact) tests.
    if (k->kind() == Cone::Kind::Orthant) {
        // max t s.t. x = B y, x >= t e, ||x||_inf <= 1 (simplex-exact).
        const Index n = l.ambient_dim(), m = l.dim();
        lp::LpProblem p = lp::LpProblem::make(2 * n, m + 1 + 2 * n);
        for (Index i = 0; i < n; ++i) {
            p.eq_matrix.block(i, 0, 1, m) = l.basis().row(i);
            p.eq_matrix(i, m) = -1.0;
            p.eq_matrix(i, m + 1 + i) = -1.0;  // x_i - t = s_i >= 0
            p.eq_matrix.block(n + i, 0, 1, m) = l.basis().row(i);
            p.eq_matrix(n + i, m + 1 + n + i) = 1.0;  // x_i + w_i = 1
            p.eq_rhs[n + i] = 1.0;
        }
        p.lower.segment(m + 1, n).setZero();
        p.lower.tail(n).setZero();
        p.upper.tail(n).setConstant(2.0);  // -1 <= x_i
        p.objective[m] = 1.0;
        p.maximize = true;
        lp::LpSolution s = lp::solve_lp(p);
        if (s.status != lp::LpStatus::Optimal)
            throw NumericalFailure("interior_margin: LP failed");
        return s.value;
    }
    if (k->kind() == Cone::Kind::Rotated2D) {
        Vec b = l.basis().col(0);
        return std::max({0.0, k->lambda_e(b), k->lambda_e(Vec(-b))});
    }
    // By the minimax identity this equals max_{x in L, ||x||_2 <= 1}
    // lambda_e(x); the Frank-Wolfe branch certifies itself through its gap.
    return min_over_delta(k, l).value;
}

// ---------------------------------------------------------------------------
// sigma
// ---------------------------------------------------------------------------

namespace {

// Inner value g(v) = max_{x in L, ||x|| <= 1} lambda_v(x) for the orthant
// with a polyhedral primal norm (LP).
double sigma_inner_orthant_lp(const Subspace& l, const NormSpec& primal, const Vec& v, Vec* x_out) {
    const Index n = l.ambient_dim(), m = l.dim();
    Mat gc = chart_gauge(primal, l);
    const Index ng = gc.rows();
    lp::LpProblem p = lp::LpProblem::make(n + ng, m + 1 + n + ng);
    for (Index i = 0; i < n; ++i) {
        p.eq_matrix.block(i, 0, 1, m) = l.basis().row(i);
        p.eq_matrix(i, m) = -v[i];
        p.eq_matrix(i, m + 1 + i) = -1.0;
    }
    for (Index j = 0; j < ng; ++j) {
        p.eq_matrix.block(n + j, 0, 1, m) = gc.row(j);
        p.eq_matrix(n + j, m + 1 + n + j) = 1.0;
        p.eq_rhs[n + j] = 1.0;
    }
    p.lower.tail(n + ng).setZero();
    p.objective[m] = 1.0;
    p.maximize = true;
    lp::LpSolution s = lp::solve_lp(p);
    if (s.status == lp::LpStatus::Unbounded) return kInfinity;
    if (s.status != lp::LpStatus::Optimal) throw NumericalFailure("sigma: inner LP failed");
    if (x_out) *x_out = l.basis() * s.primal.head(m);
    return s.value;
}

// Inner value for the Euclidean primal over the orthant: bisection on t with
// a least-distance feasibility check of {y : By >= t v, ||y|| <= 1}.
double sigma_inner_orthant_l2(const Subspace& l, const Vec& v, Vec* x_out) {
    const Mat& b = l.basis();
    auto feasible = [&](double t, Vec* y_out) {
        Vec y;
        if (!lp::least_distance(b, Vec(t * v), y)) return false;
        if (y.norm() > 1.0 + 1e-11) return false;
        if (y_out) *y_out = y;
        return true;
    };
    if (!feasible(0.0, nullptr)) return -kInfinity;
    double lo = 0.0, hi = 1.0;
    int guard = 0;
    while (feasible(hi, nullptr)) {
        lo = hi;
        hi *= 2.0;
        if (++guard > 60) return kInfinity;
    }
    Vec y_best;
    feasible(lo, &y_best);
    int iters = 0;
    while (hi - lo > 1e-12 * (1.0 + std::abs(lo) + std::abs(hi)) && ++iters < 200) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (feasible(mid, &y_best)) lo = mid;
        else hi = mid;
    }
    if (x_out && y_best.size()) {
        Vec x = b * y_best;
        double nx = x.norm();
        if (nx > 1e-12) x /= std::max(nx, 1.0);
        *x_out = x;
    }
    return lo;
}

// Dual completion of sigma at the outer minimizer v: one LP for
// min{ ||u - y||_* : u in K*, <u, v> = 1, y in L^perp } (orthant, polyhedral
// dual norm).
bool sigma_dual_completion(const Subspace& l, const NormSpec& primal, const Vec& v,
                           double& dual_value, Vec& u_out, Vec& y_out) {
    const Index n = l.ambient_dim();
    NormSpec dn = dual_spec(primal);
    if (!is_polyhedral(dn)) return false;
    Mat gd = gauge_rows(dn, n);
    Subspace lperp = orth_complement(l);
    const Mat& c = lperp.basis();
    const Index mz = c.cols(), ngd = gd.rows();
    // Vars: u (n >= 0), z (mz free), t (>= 0), slacks (ngd >= 0).
    lp::LpProblem p = lp::LpProblem::make(ngd + 1, n + mz + 1 + ngd);
    Mat gdc = gd * c;
    for (Index j = 0; j < ngd; ++j) {
        p.eq_matrix.block(j, 0, 1, n) = gd.row(j);
        p.eq_matrix.block(j, n, 1, mz) = -gdc.row(j);
        p.eq_matrix(j, n + mz) = -1.0;
        p.eq_matrix(j, n + mz + 1 + j) = 1.0;
    }
    for (Index i = 0; i < n; ++i) p.eq_matrix(ngd, i) = v[i];
    p.eq_rhs[ngd] = 1.0;
    p.lower.head(n).setZero();
    p.lower[n + mz] = 0.0;
    p.lower.tail(ngd).setZero();
    p.objective[n + mz] = 1.0;
    lp::LpSolution s = lp::solve_lp(p);
    if (s.status != lp::LpStatus::Optimal) return false;
    dual_value = s.value;
    u_out = s.primal.head(n).cwiseMax(0.0);
    y_out = c * s.primal.segment(n, mz);
    return true;
}

}  // namespace

MeasureCertificate sigma(const Subspace& l, const ConePtr& k, const NormPair& np) {
    if (l.ambient_dim() != k->ambient_dim()) throw DimensionMismatch("sigma: ambient mismatch");
    const Index n = k->ambient_dim();
    MeasureCertificate cert;

    double margin = interior_margin(l, k);
    if (margin <= tol::strict_pos) {
        cert.value = 0.0;
        cert.infeasible_side = true;
        cert.path = Path::LpExact;
        return cert;
    }

    // Exact two-layer path: orthant with polyhedral norms.
    if (k->kind() == Cone::Kind::Orthant && is_polyhedral(np.primal) && is_polyhedral(np.tri)) {
        auto outer = orthant_cone_ball_vertices(np.tri, n);
        double best = kInfinity;
        Vec best_v, best_x;
        for (const Vec& v : outer) {
            Vec x;
            double val = sigma_inner_orthant_lp(l, np.primal, v, &x);
            if (val < best - 1e-12 ||
                (val < best + 1e-12 && best_v.size() && lex_less(v, best_v))) {
                best = std::min(best, val);
                best_v = v;
                best_x = x;
            }
        }
        cert.value = best;
        cert.path = Path::LpExact;
        cert.v_bar = best_v;
        if (best_x.size()) {
            double nx = norm_eval(np.primal, best_x);
            if (nx > 1e-12) best_x /= nx;
            cert.x_bar = best_x;
        }
        double dual_value;
        Vec u, y;
        if (sigma_dual_completion(l, np.primal, best_v, dual_value, u, y)) {
            cert.u_bar = u;
            cert.y_bar = y;
            cert.alignment_residual = std::abs(dual_value - cert.value);
        }
        return cert;
    }

    // Induced tri norm: sigma == nu (exactly, by the duality corollary).
    if (tri_is_induced_e(np.tri, k)) {
        cert = nu(l, k, np);
        return cert;
    }

    // Induced-dual tri over a symmetric cone: primitive idempotent form.
    if (tri_is_induced_e_dual(np.tri, k) && k->is_symmetric()) {
        std::mt19937_64 rng(0x51900001ull);
        auto idems = k->primitive_idempotents(k->primitive_idempotents_exact() ? 0 : 4000, rng);
        double best = kInfinity;
        Vec best_c, best_x;
        const bool primal_l2 = np.primal.is_l2();
        for (const Vec& c : idems) {
            double val;
            Vec x;
            if (k->kind() == Cone::Kind::Orthant && primal_l2) {
                val = orthant_linear_max_ball2(c, l, x);
            } else if (k->kind() == Cone::Kind::Orthant && is_polyhedral(np.primal)) {
                val = sigma_inner_orthant_lp(l, np.primal, c, &x);
            } else {
                // Projected ascent on the convex body L cap K cap ball.
                Vec xx = l.project(k->identity());
                for (int it = 0; it < 400; ++it) {
                    xx = l.project(k->project(xx + 0.3 * c));
                    double nn = xx.norm();
                    if (nn > 1.0) xx /= nn;
                }
                val = c.dot(xx);
                x = xx;
            }
            if (val < best) { best = val; best_c = c; best_x = x; }
        }
        bool exact = k->primitive_idempotents_exact();
        if (exact) {
            cert.value = best;
            cert.path = Path::LpExact;
        } else {
            cert = sampled_cert(best, true);
        }
        cert.v_bar = best_c;
        if (best_x.size()) cert.x_bar = best_x;
        return cert;
    }

    // Euclidean pair: candidate directions include the nu witness (which is
    // optimal for self-dual cones) plus cone samples; inner solved exactly
    // for the orthant and the 2-D family.
    if (np.primal.is_l2() && np.tri.is_l2()) {
        MeasureCertificate nu_cert = nu(l, k, np);
        std::vector<Vec> candidates;
        if (nu_cert.u_bar && k->is_self_dual()) {
            Vec u = *nu_cert.u_bar;
            if (u.norm() > 1e-12) candidates.push_back(u / u.norm());
        }
        std::mt19937_64 rng(0x51900002ull);
        for (int s = 0; s < 80; ++s) {
            Vec z = k->project(k->random_element(rng));
            if (z.norm() > 1e-12) candidates.push_back(z / z.norm());
        }
        if (k->kind() == Cone::Kind::Rotated2D) {
            // Dense arc scan with golden-section polish.
            Mat g = k->generators();
            double a0 = std::atan2(g(1, 0), g(0, 0)), a1 = std::atan2(g(1, 1), g(0, 1));
            if (a0 > a1) std::swap(a0, a1);
            auto gval = [&](double th) {
                Vec v(2);
                v << std::cos(th), std::sin(th);
                Vec x;
                // L is 1-dim; lambda_v linear-fractional over x = +-b.
                double bestx = -kInfinity;
                for (double sgn : {1.0, -1.0}) {
                    Vec xc = sgn * l.basis().col(0);
                    bestx = std::max(bestx, k->lambda_v(xc, v));
                }
                return bestx;
            };
            double bth = a0, bval = kInfinity;
            const int grid = 4000;
            for (int i = 0; i <= grid; ++i) {
                double th = a0 + (a1 - a0) * i / grid;
                double v = gval(th);
                if (v < bval) { bval = v; bth = th; }
            }
            double lo = std::max(a0, bth - (a1 - a0) / grid), hi = std::min(a1, bth + (a1 - a0) / grid);
            const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
            double c1 = hi - gr * (hi - lo), c2 = lo + gr * (hi - lo);
            double f1 = gval(c1), f2 = gval(c2);
            for (int it = 0; it < 120; ++it) {
                if (f1 < f2) { hi = c2; c2 = c1; f2 = f1; c1 = hi - gr * (hi - lo); f1 = gval(c1); }
                else { lo = c1; c1 = c2; f1 = f2; c2 = lo + gr * (hi - lo); f2 = gval(c2); }
            }
            double th = 0.5 * (lo + hi);
            cert.value = gval(th);
            cert.path = Path::Sampled;
            cert.approximate = false;  // dense 1-D grid + golden polish, residual ~1e-12
            cert.bracket_lo = std::min(cert.value, bval);
            cert.bracket_hi = std::max(cert.value, bval);
            Vec v(2);
            v << std::cos(th), std::sin(th);
            cert.v_bar = v;
            return cert;
        }
        double best = kInfinity;
        Vec best_v, best_x;
        for (const Vec& v : candidates) {
            Vec x;
            double val;
            if (k->kind() == Cone::Kind::Orthant) val = sigma_inner_orthant_l2(l, v, &x);
            else {
                // Bisection with alternating-projection feasibility (sampled).
                val = -kInfinity;
                Vec xx = l.project(k->identity());
                for (int it = 0; it < 300; ++it) xx = l.project(k->project(xx));
                if (xx.norm() > 1e-9) {
                    xx /= xx.norm();
                    val = k->lambda_v(xx, v);
                    x = xx;
                }
            }
            if (val < best) { best = val; best_v = v; best_x = x; }
        }
        bool exact_inner = k->kind() == Cone::Kind::Orthant;
        if (exact_inner && nu_cert.u_bar && k->is_self_dual()) {
            // sigma in [nu, g(u_nu)]: both ends computed; they agree to solver
            // precision for self-dual cones.
            cert.value = best;
            cert.path = Path::Sampled;
            cert.approximate = false;
            cert.bracket_lo = nu_cert.value;
            cert.bracket_hi = best;
        } else {
            cert = sampled_cert(best, true);
        }
        cert.v_bar = best_v;
        if (best_x.size()) cert.x_bar = best_x;
        return cert;
    }

    // Fully sampled fallback.
    std::mt19937_64 rng(0x51900003ull);
    std::normal_distribution<double> g(0.0, 1.0);
    double best = kInfinity;
    Vec best_v;
    for (int s = 0; s < 400; ++s) {
        Vec v = k->project(k->random_element(rng));
        double nv = norm_eval(np.tri, v);
        if (nv <= 1e-12) continue;
        v /= nv;
        double inner = -kInfinity;
        for (int xs = 0; xs < 400; ++xs) {
            Vec y(l.dim());
            for (Index i = 0; i < y.size(); ++i) y[i] = g(rng);
            Vec x = l.basis() * y;
            double nx = norm_eval(np.primal, x);
            if (nx <= 1e-14) continue;
            x /= nx;
            inner = std::max(inner, k->lambda_v(x, v));
        }
        if (inner < best) { best = inner; best_v = v; }
    }
    cert = sampled_cert(best, true);
    cert.v_bar = best_v;
    return cert;
}

// ---------------------------------------------------------------------------
// sym
// ---------------------------------------------------------------------------

namespace {

// Inner value h(v) = max{t : x + t v in L, x in K, ||x|| <= 1} via LP
// (orthant, polyhedral norm). Returns +inf when unbounded.
double sym_inner_lp(const Subspace& l, const NormSpec& norm, const Vec& v, Vec* x_out) {
    const Index n = l.ambient_dim();
    Subspace lperp = orth_complement(l);
    const Mat& c = lperp.basis();  // n x (n-m)
    Mat g = gauge_rows(norm, n);
    const Index nc = c.cols(), ng = g.rows();
    // Vars: x (n >= 0), t (free), slacks (ng >= 0).
    lp::LpProblem p = lp::LpProblem::make(nc + ng, n + 1 + ng);
    for (Index j = 0; j < nc; ++j) {
        p.eq_matrix.block(j, 0, 1, n) = c.col(j).transpose();
        p.eq_matrix(j, n) = c.col(j).dot(v);
    }
    for (Index j = 0; j < ng; ++j) {
        p.eq_matrix.block(nc + j, 0, 1, n) = g.row(j);
        p.eq_matrix(nc + j, n + 1 + j) = 1.0;
        p.eq_rhs[nc + j] = 1.0;
    }
    p.lower.head(n).setZero();
    p.lower.tail(ng).setZero();
    p.objective[n] = 1.0;
    p.maximize = true;
    lp::LpSolution s = lp::solve_lp(p);
    if (s.status == lp::LpStatus::Unbounded) return kInfinity;
    if (s.status != lp::LpStatus::Optimal) throw NumericalFailure("sym: inner LP failed");
    if (x_out) *x_out = s.primal.head(n);
    return s.value;
}

// Inner value for the Euclidean norm: bisection on t, feasibility of
// {x >= 0, x in (L - t v), ||x||_2 <= 1} through a least-distance program.
double sym_inner_l2(const Subspace& l, const Vec& v, Vec* x_out) {
    const Index n = l.ambient_dim();
    Vec x0_dir = -(v - l.project(v));  // particular solution scales with t
    auto feasible = [&](double t, Vec* xo) {
        Vec x0 = t * x0_dir;
        // x = x0 + B z, x >= 0 -> B z >= -x0; minimize ||x|| = ||z + B'x0||
        // shifted: w = z + B'x0, B w >= -x0 + B B' x0.
        Vec shift = l.basis().transpose() * x0;
        Vec h = -x0 + l.basis() * shift;
        Vec w;
        if (!lp::least_distance(l.basis(), h, w)) return false;
        Vec x = x0 + l.basis() * (w - shift);
        double res = std::sqrt(std::max(0.0, x.squaredNorm()));
        if (res > 1.0 + 1e-10) return false;
        if (xo) *xo = x;
        return true;
    };
    if (!feasible(0.0, nullptr)) return -kInfinity;
    double lo = 0.0, hi = 1.0;
    int guard = 0;
    while (feasible(hi, nullptr)) {
        lo = hi;
        hi *= 2.0;
        if (++guard > 60) return kInfinity;
    }
    Vec xb;
    feasible(lo, &xb);
    int iters = 0;
    while (hi - lo > 1e-12 * (1.0 + std::abs(lo) + std::abs(hi)) && ++iters < 200) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (feasible(mid, &xb)) lo = mid;
        else hi = mid;
    }
    if (x_out) *x_out = xb;
    return lo;
}

}  // namespace

MeasureCertificate sym(const Subspace& l, const ConePtr& k, const NormSpec& norm) {
    if (l.ambient_dim() != k->ambient_dim()) throw DimensionMismatch("sym: ambient mismatch");
    const Index n = k->ambient_dim();
    MeasureCertificate cert;

    if (k->kind() == Cone::Kind::Orthant && is_polyhedral(norm)) {
        auto outer = orthant_cone_ball_vertices(norm, n);
        double best = kInfinity;
        Vec best_v, best_x;
        for (const Vec& v : outer) {
            Vec x;
            double val = sym_inner_lp(l, norm, v, &x);
            if (val < best) { best = val; best_v = v; best_x = x; }
        }
        cert.value = std::clamp(best, 0.0, 1.0 + 1e-12);
        cert.path = Path::LpExact;
        cert.v_bar = best_v;
        if (best_x.size()) cert.x_bar = best_x;
        return cert;
    }

    if (k->kind() == Cone::Kind::Orthant && norm.is_l2()) {
        std::mt19937_64 rng(0x573c0001ull);
        double best = kInfinity;
        Vec best_v, best_x;
        auto eval = [&](Vec v) {
            if (v.norm() <= 1e-12) return;
            v /= v.norm();
            Vec x;
            double val = sym_inner_l2(l, v, &x);
            if (val < best) { best = val; best_v = v; best_x = x; }
        };
        for (int s = 0; s < 200; ++s) eval(k->project(k->random_element(rng)));
        // Local polish around the incumbent.
        std::normal_distribution<double> g(0.0, 1.0);
        for (int round = 0; round < 3; ++round) {
            Vec center = best_v;
            double radius = std::pow(0.1, round + 1);
            for (int s = 0; s < 80; ++s) {
                Vec dv(n);
                for (Index i = 0; i < n; ++i) dv[i] = g(rng);
                eval(k->project(center + radius * dv));
            }
        }
        cert = sampled_cert(std::clamp(best, 0.0, 1.0), true);
        cert.v_bar = best_v;
        if (best_x.size()) cert.x_bar = best_x;
        return cert;
    }

    throw UnsupportedNorm("sym: exact path needs the orthant with a polyhedral or l2 norm");
}

// ---------------------------------------------------------------------------
// theta
// ---------------------------------------------------------------------------

double theta(const ConePtr& k) {
    if (k->is_self_dual()) return 0.0;
    if (k->kind() == Cone::Kind::Rotated2D) {
        // K has half-aperture phi about its axis, K* has pi/2 - phi; the
        // farthest dual ray sits at the difference.
        Mat gk = k->generators();
        Mat gd = k->dual()->generators();
        double a0 = std::atan2(gk(1, 0), gk(0, 0)), a1 = std::atan2(gk(1, 1), gk(0, 1));
        if (a0 > a1) std::swap(a0, a1);
        double best = 0.0;
        for (Index j = 0; j < 2; ++j) {
            double th = std::atan2(gd(1, j), gd(0, j));
            double d = 0.0;
            if (th < a0) d = a0 - th;
            else if (th > a1) d = th - a1;
            best = std::max(best, d);
        }
        return best;
    }
    throw UnsupportedCone("theta: unsupported cone family");
}

// ---------------------------------------------------------------------------
// Critical subspaces
// ---------------------------------------------------------------------------

Subspace critical_subspace_feasible(const Subspace& l, const ConePtr& k, const NormPair& np,
                                    const MeasureCertificate& nu_cert) {
    if (!nu_cert.u_bar || !nu_cert.y_bar || !nu_cert.x_bar)
        throw MissingWitnesses("critical_subspace_feasible: nu certificate lacks witnesses");
    if (nu_cert.value <= tol::strict_pos)
        throw InfeasibleSide("critical_subspace_feasible: nu vanishes");
    const double nu_val = nu_cert.value;
    const Index n = l.ambient_dim();
    const Vec& u = *nu_cert.u_bar;
    const Vec& y = *nu_cert.y_bar;
    const Vec& x = *nu_cert.x_bar;

    // Any v with |||v||| = 1 and <u,v> = 1 works in the construction, but
    // x - nu v must stay away from L cap H for the span to keep dimension m.
    // Collect the attaining face and prefer the candidate farthest from
    // degeneracy.
    std::vector<Vec> cands;
    cands.push_back(norm_attaining(np.tri, u));
    if (is_polyhedral(np.tri) && n <= 10) {
        for (const Vec& w : ball_vertices_full(np.tri, n))
            if (w.dot(u) >= 1.0 - 1e-9) cands.push_back(w);
    }
    std::sort(cands.begin(), cands.end(), [&](const Vec& a, const Vec& b) {
        return (x - nu_val * a).norm() > (x - nu_val * b).norm();
    });

    Vec d = u - y;  // H = d^perp; x not in H since <d,x> = nu > 0
    Mat chart = d.transpose() * l.basis();
    Mat ker = kernel_basis(chart);

    for (const Vec& v : cands) {
        Vec lead = x - nu_val * v;
        if (lead.norm() <= 1e-9) continue;
        std::vector<Vec> gens;
        gens.push_back(lead);
        for (Index j = 0; j < ker.cols(); ++j) gens.push_back(l.basis() * ker.col(j));
        Subspace lt = orthonormal_basis(gens);
        if (lt.dim() != l.dim()) continue;
        if ((lt.basis().transpose() * u).norm() > 1e-8 * (1.0 + u.norm())) continue;
        return lt;
    }
    throw NumericalFailure("critical_subspace_feasible: degenerate construction");
}

Subspace critical_subspace_infeasible(const Subspace& l, const ConePtr& k, const NormPair& np,
                                      const MeasureCertificate& nu_bar_cert) {
    if (!nu_bar_cert.x_bar || !nu_bar_cert.v_bar)
        throw MissingWitnesses("critical_subspace_infeasible: nu_bar certificate lacks witnesses");
    const Vec& x = *nu_bar_cert.x_bar;
    const Vec& v = *nu_bar_cert.v_bar;
    if (v.norm() <= 1e-12)
        throw DegenerateVbar("critical_subspace_infeasible: vbar = 0 (upper-bound fallback)");
    Vec ybar = norm_attaining(dual_spec(np.primal), x);

    std::vector<Vec> gens;
    gens.push_back(v);
    Mat chart = ybar.transpose() * l.basis();
    Mat ker = kernel_basis(chart);
    for (Index j = 0; j < ker.cols(); ++j) gens.push_back(l.basis() * ker.col(j));

    Subspace lt = orthonormal_basis(gens);
    if (lt.dim() != l.dim())
        throw NumericalFailure("critical_subspace_infeasible: degenerate construction");
    return lt;
}

}  // namespace concord
