#include "concord/cones.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace concord {

namespace {

// Deterministic SOC frame direction when xbar = 0.
Vec soc_unit_dir(const Vec& xbar) {
    double nrm = xbar.norm();
    if (nrm > 1e-300) return xbar / nrm;
    Vec d = Vec::Zero(xbar.size());
    d[0] = 1.0;
    return d;
}

}  // namespace

ConePtr Cone::orthant(Index n) {
    if (n < 1) throw DimensionMismatch("orthant: n >= 1 required");
    auto c = std::shared_ptr<Cone>(new Cone());
    c->kind_ = Kind::Orthant;
    c->n_ = n;
    return c;
}

ConePtr Cone::second_order(Index n) {
    if (n < 2) throw DimensionMismatch("second_order: n >= 2 required");
    auto c = std::shared_ptr<Cone>(new Cone());
    c->kind_ = Kind::SecondOrder;
    c->n_ = n;
    return c;
}

ConePtr Cone::psd(Index k) {
    if (k < 1) throw DimensionMismatch("psd: k >= 1 required");
    auto c = std::shared_ptr<Cone>(new Cone());
    c->kind_ = Kind::Psd;
    c->n_ = k * (k + 1) / 2;
    c->k_ = k;
    return c;
}

ConePtr Cone::product(std::vector<ConePtr> parts) {
    if (parts.empty()) throw DimensionMismatch("product: needs at least one part");
    auto c = std::shared_ptr<Cone>(new Cone());
    c->kind_ = Kind::Product;
    c->parts_ = std::move(parts);
    Index off = 0;
    for (const auto& p : c->parts_) {
        c->offsets_.push_back(off);
        off += p->ambient_dim();
    }
    c->n_ = off;
    return c;
}

ConePtr Cone::rotated2d(double phi) {
    if (!(phi > 0.0 && phi < M_PI / 4))
        throw DimensionMismatch("rotated2d: phi must lie in (0, pi/4)");
    auto c = std::shared_ptr<Cone>(new Cone());
    c->kind_ = Kind::Rotated2D;
    c->n_ = 2;
    c->phi_ = phi;
    return c;
}

bool Cone::is_symmetric() const {
    switch (kind_) {
        case Kind::Orthant:
        case Kind::SecondOrder:
        case Kind::Psd:
            return true;
        case Kind::Product:
            return std::all_of(parts_.begin(), parts_.end(),
                               [](const ConePtr& p) { return p->is_symmetric(); });
        case Kind::Rotated2D:
            return false;
    }
    return false;
}

bool Cone::is_polyhedral() const {
    switch (kind_) {
        case Kind::Orthant:
        case Kind::Rotated2D:
            return true;
        case Kind::Product:
            return std::all_of(parts_.begin(), parts_.end(),
                               [](const ConePtr& p) { return p->is_polyhedral(); });
        default:
            return false;
    }
}

bool Cone::is_self_dual() const { return kind_ != Kind::Rotated2D; }

ConePtr Cone::dual() const {
    if (kind_ != Kind::Rotated2D) {
        auto c = std::shared_ptr<Cone>(new Cone(*this));
        return c;
    }
    // K has half-aperture phi about e2; K* has half-aperture pi/2 - phi.
    auto c = std::shared_ptr<Cone>(new Cone(*this));
    c->phi_ = M_PI / 2 - phi_;
    return c;
}

Index Cone::rank() const {
    switch (kind_) {
        case Kind::Orthant: return n_;
        case Kind::SecondOrder: return 2;
        case Kind::Psd: return k_;
        case Kind::Product: {
            Index r = 0;
            for (const auto& p : parts_) r += p->rank();
            return r;
        }
        case Kind::Rotated2D:
            throw UnsupportedCone("rank: Rotated2D carries no Jordan algebra");
    }
    throw UnsupportedCone("rank");
}

Vec Cone::identity() const {
    Vec e = Vec::Zero(n_);
    switch (kind_) {
        case Kind::Orthant: e.setOnes(); return e;
        case Kind::SecondOrder: e[0] = 1.0; return e;
        case Kind::Psd: return mat_to_svec(Mat::Identity(k_, k_));
        case Kind::Product: {
            for (size_t i = 0; i < parts_.size(); ++i)
                e.segment(offsets_[i], parts_[i]->ambient_dim()) = parts_[i]->identity();
            return e;
        }
        case Kind::Rotated2D: e[1] = 1.0; return e;
    }
    return e;
}

Mat Cone::facet_normals() const {
    switch (kind_) {
        case Kind::Orthant: return Mat::Identity(n_, n_);
        case Kind::Rotated2D: {
            // Rays (+-sin phi, cos phi); inward normals (-+cos phi, sin phi).
            Mat a(2, 2);
            a << -std::cos(phi_), std::sin(phi_), std::cos(phi_), std::sin(phi_);
            return a;
        }
        case Kind::Product: {
            Mat a = Mat::Zero(0, n_);
            std::vector<Mat> blocks;
            Index rows = 0;
            for (const auto& p : parts_) {
                blocks.push_back(p->facet_normals());
                rows += blocks.back().rows();
            }
            a.resize(rows, n_);
            a.setZero();
            Index r0 = 0;
            for (size_t i = 0; i < parts_.size(); ++i) {
                a.block(r0, offsets_[i], blocks[i].rows(), parts_[i]->ambient_dim()) = blocks[i];
                r0 += blocks[i].rows();
            }
            return a;
        }
        default:
            throw UnsupportedCone("facet_normals: cone is not polyhedral");
    }
}

Mat Cone::generators() const {
    if (kind_ != Kind::Rotated2D) throw UnsupportedCone("generators: Rotated2D only");
    Mat g(2, 2);
    g << std::sin(phi_), -std::sin(phi_), std::cos(phi_), std::cos(phi_);
    return g;  // columns are the unit extreme rays
}

double Cone::phi() const {
    if (kind_ != Kind::Rotated2D) throw UnsupportedCone("phi: Rotated2D only");
    return phi_;
}

double Cone::lambda_e(const Vec& x) const {
    if (x.size() != n_) throw DimensionMismatch("lambda_e: wrong ambient dimension");
    switch (kind_) {
        case Kind::Orthant: return x.minCoeff();
        case Kind::SecondOrder: return x[0] - x.tail(n_ - 1).norm();
        case Kind::Psd: {
            Eigen::SelfAdjointEigenSolver<Mat> es(svec_to_mat(x, k_), Eigen::EigenvaluesOnly);
            return es.eigenvalues().minCoeff();
        }
        case Kind::Product: {
            double v = kInfinity;
            for (size_t i = 0; i < parts_.size(); ++i)
                v = std::min(v, parts_[i]->lambda_e(x.segment(offsets_[i], parts_[i]->ambient_dim())));
            return v;
        }
        case Kind::Rotated2D: {
            Mat a = facet_normals();
            Vec e = identity();
            double v = kInfinity;
            for (Index i = 0; i < a.rows(); ++i) v = std::min(v, a.row(i).dot(x) / a.row(i).dot(e));
            return v;
        }
    }
    throw UnsupportedCone("lambda_e");
}

bool Cone::contains(const Vec& x, double tol) const { return lambda_e(x) >= -tol; }

bool Cone::dual_contains(const Vec& x, double tol) const {
    return dual()->contains(x, tol);
}

double Cone::lambda_v(const Vec& x, const Vec& v) const {
    if (!contains(v, tol::strict_pos) || v.norm() <= 1e-14)
        throw VNotInCone("lambda_v: v must lie in K and be nonzero");
    const double inf = kInfinity;
    switch (kind_) {
        case Kind::Orthant: {
            double t = inf;
            for (Index i = 0; i < n_; ++i) {
                if (v[i] > 1e-14) t = std::min(t, x[i] / v[i]);
                else if (x[i] < -1e-12) return -inf;
            }
            return t;
        }
        case Kind::Rotated2D: {
            Mat a = facet_normals();
            double t = inf;
            for (Index i = 0; i < a.rows(); ++i) {
                double av = a.row(i).dot(v), ax = a.row(i).dot(x);
                if (av > 1e-14) t = std::min(t, ax / av);
                else if (ax < -1e-12) return -inf;
            }
            return t;
        }
        default: {
            // SOC / PSD / Product: monotone bisection on membership of
            // x - t v (no closed form for general v).
            double scale = 1.0 + x.norm() + v.norm();
            double lo, hi;
            // Find a feasible t (expand downward) and an infeasible one above.
            double t0 = 0.0;
            bool found = contains(x - t0 * v, 1e-12);
            if (!found) {
                double step = scale;
                for (int it = 0; it < 80 && !found; ++it) {
                    t0 -= step;
                    step *= 2;
                    found = contains(x - t0 * v, 1e-12);
                }
                if (!found) return -inf;
            }
            lo = t0;
            double step = scale;
            hi = lo + step;
            int guard = 0;
            while (contains(x - hi * v, 1e-12)) {
                lo = hi;
                step *= 2;
                hi = lo + step;
                if (++guard > 120) throw NumericalFailure("lambda_v: unbounded above");
            }
            int iters = 0;
            while (hi - lo > tol::bisect_t * (scale + std::abs(lo) + std::abs(hi)) &&
                   ++iters < 200) {
                double mid = 0.5 * (lo + hi);
                if (mid <= lo || mid >= hi) break;  // ulp-limited
                (contains(x - mid * v, 1e-12) ? lo : hi) = mid;
            }
            return lo;
        }
    }
}

SpectralDecomposition Cone::spectral(const Vec& x) const {
    if (x.size() != n_) throw DimensionMismatch("spectral: wrong ambient dimension");
    SpectralDecomposition sd;
    switch (kind_) {
        case Kind::Orthant: {
            sd.eigenvalues = x;
            sd.frame = Mat::Identity(n_, n_);
            return sd;
        }
        case Kind::SecondOrder: {
            Vec d = soc_unit_dir(x.tail(n_ - 1));
            double nb = x.tail(n_ - 1).norm();
            sd.eigenvalues.resize(2);
            sd.eigenvalues << x[0] + nb, x[0] - nb;
            sd.frame = Mat::Zero(n_, 2);
            sd.frame(0, 0) = 0.5;
            sd.frame(0, 1) = 0.5;
            sd.frame.col(0).tail(n_ - 1) = 0.5 * d;
            sd.frame.col(1).tail(n_ - 1) = -0.5 * d;
            return sd;
        }
        case Kind::Psd: {
            Eigen::SelfAdjointEigenSolver<Mat> es(svec_to_mat(x, k_));
            sd.eigenvalues = es.eigenvalues();
            sd.frame.resize(n_, k_);
            for (Index i = 0; i < k_; ++i) {
                Vec q = es.eigenvectors().col(i);
                sd.frame.col(i) = mat_to_svec(q * q.transpose());
            }
            return sd;
        }
        case Kind::Product: {
            Index r = rank();
            sd.eigenvalues.resize(r);
            sd.frame = Mat::Zero(n_, r);
            Index col = 0;
            for (size_t i = 0; i < parts_.size(); ++i) {
                auto part = parts_[i]->spectral(x.segment(offsets_[i], parts_[i]->ambient_dim()));
                Index ri = part.eigenvalues.size();
                sd.eigenvalues.segment(col, ri) = part.eigenvalues;
                sd.frame.block(offsets_[i], col, parts_[i]->ambient_dim(), ri) = part.frame;
                col += ri;
            }
            return sd;
        }
        case Kind::Rotated2D:
            throw UnsupportedCone("spectral: Rotated2D carries no Jordan algebra");
    }
    throw UnsupportedCone("spectral");
}

Vec Cone::jordan_product(const Vec& x, const Vec& y) const {
    switch (kind_) {
        case Kind::Orthant: return x.cwiseProduct(y);
        case Kind::SecondOrder: {
            Vec z(n_);
            z[0] = x.dot(y);
            z.tail(n_ - 1) = x[0] * y.tail(n_ - 1) + y[0] * x.tail(n_ - 1);
            return z;
        }
        case Kind::Psd: {
            Mat X = svec_to_mat(x, k_), Y = svec_to_mat(y, k_);
            return mat_to_svec(0.5 * (X * Y + Y * X));
        }
        case Kind::Product: {
            Vec z(n_);
            for (size_t i = 0; i < parts_.size(); ++i) {
                Index d = parts_[i]->ambient_dim();
                z.segment(offsets_[i], d) =
                    parts_[i]->jordan_product(x.segment(offsets_[i], d), y.segment(offsets_[i], d));
            }
            return z;
        }
        case Kind::Rotated2D:
            throw UnsupportedCone("jordan_product: Rotated2D");
    }
    throw UnsupportedCone("jordan_product");
}

double Cone::trace(const Vec& x) const {
    switch (kind_) {
        case Kind::Orthant: return x.sum();
        case Kind::SecondOrder: return 2.0 * x[0];
        case Kind::Psd: return svec_to_mat(x, k_).trace();
        case Kind::Product: {
            double t = 0;
            for (size_t i = 0; i < parts_.size(); ++i)
                t += parts_[i]->trace(x.segment(offsets_[i], parts_[i]->ambient_dim()));
            return t;
        }
        case Kind::Rotated2D:
            throw UnsupportedCone("trace: Rotated2D");
    }
    throw UnsupportedCone("trace");
}

double Cone::trace_inner(const Vec& x, const Vec& y) const { return trace(jordan_product(x, y)); }

Mat Cone::automorphism_to_identity(const Vec& x0) const {
    if (lambda_e(x0) <= tol::strict_pos) throw NotInterior("automorphism_to_identity: x0 not interior");
    switch (kind_) {
        case Kind::Orthant: {
            Mat p = Mat::Zero(n_, n_);
            for (Index i = 0; i < n_; ++i) p(i, i) = 1.0 / x0[i];
            return p;
        }
        case Kind::Psd: {
            Eigen::SelfAdjointEigenSolver<Mat> es(svec_to_mat(x0, k_));
            Mat s = es.operatorInverseSqrt();  // X0^{-1/2}
            Mat p(n_, n_);
            for (Index j = 0; j < n_; ++j) {
                Vec ej = Vec::Zero(n_);
                ej[j] = 1.0;
                p.col(j) = mat_to_svec(s * svec_to_mat(ej, k_) * s);
            }
            return p;
        }
        case Kind::SecondOrder: {
            // Quadratic representation of x0^{-1/2}: Q_y = 2 y y' - det(y) R.
            auto sd = spectral(x0);
            Vec y = sd.frame.col(0) / std::sqrt(sd.eigenvalues[0]) +
                    sd.frame.col(1) / std::sqrt(sd.eigenvalues[1]);
            double dety = y[0] * y[0] - y.tail(n_ - 1).squaredNorm();
            Mat r = -Mat::Identity(n_, n_);
            r(0, 0) = 1.0;
            return 2.0 * y * y.transpose() - dety * r;
        }
        case Kind::Product: {
            Mat p = Mat::Zero(n_, n_);
            for (size_t i = 0; i < parts_.size(); ++i) {
                Index d = parts_[i]->ambient_dim();
                p.block(offsets_[i], offsets_[i], d, d) =
                    parts_[i]->automorphism_to_identity(x0.segment(offsets_[i], d));
            }
            return p;
        }
        case Kind::Rotated2D:
            throw UnsupportedCone("automorphism_to_identity: Rotated2D is not symmetric");
    }
    throw UnsupportedCone("automorphism_to_identity");
}

Vec Cone::project(const Vec& x) const {
    switch (kind_) {
        case Kind::Orthant:
            return x.cwiseMax(0.0);
        case Kind::SecondOrder:
        case Kind::Psd: {
            auto sd = spectral(x);
            Vec p = Vec::Zero(n_);
            for (Index i = 0; i < sd.eigenvalues.size(); ++i)
                p += std::max(sd.eigenvalues[i], 0.0) * sd.frame.col(i);
            return p;
        }
        case Kind::Product: {
            Vec p(n_);
            for (size_t i = 0; i < parts_.size(); ++i) {
                Index d = parts_[i]->ambient_dim();
                p.segment(offsets_[i], d) = parts_[i]->project(x.segment(offsets_[i], d));
            }
            return p;
        }
        case Kind::Rotated2D: {
            if (contains(x, 0.0)) return x;
            Mat g = generators();
            Vec best = Vec::Zero(2);
            double bd = x.norm();
            for (Index j = 0; j < 2; ++j) {
                Vec cand = std::max(0.0, g.col(j).dot(x)) * g.col(j);
                double d = (x - cand).norm();
                if (d < bd) { bd = d; best = cand; }
            }
            return best;
        }
    }
    throw UnsupportedCone("project");
}

Vec Cone::random_element(std::mt19937_64& rng) const {
    std::normal_distribution<double> g(0.0, 1.0);
    Vec x(n_);
    for (Index i = 0; i < n_; ++i) x[i] = g(rng);
    return x;
}

Vec Cone::random_interior(std::mt19937_64& rng) const {
    if (kind_ == Kind::Rotated2D) {
        std::uniform_real_distribution<double> u(0.05, 1.0);
        Mat g = generators();
        Vec v = u(rng) * g.col(0) + u(rng) * g.col(1);
        return v;
    }
    Vec z = random_element(rng);
    Vec sq = jordan_product(z, z);
    return sq + 0.05 * (1.0 + sq.norm()) * identity();
}

std::vector<Vec> Cone::primitive_idempotents(Index samples, std::mt19937_64& rng) const {
    std::vector<Vec> out;
    switch (kind_) {
        case Kind::Orthant: {
            for (Index i = 0; i < n_; ++i) {
                Vec c = Vec::Zero(n_);
                c[i] = 1.0;
                out.push_back(c);
            }
            return out;
        }
        case Kind::SecondOrder: {
            std::normal_distribution<double> g(0.0, 1.0);
            for (Index s = 0; s < samples; ++s) {
                Vec d(n_ - 1);
                for (Index i = 0; i < n_ - 1; ++i) d[i] = g(rng);
                d = soc_unit_dir(d);
                Vec c = Vec::Zero(n_);
                c[0] = 0.5;
                c.tail(n_ - 1) = 0.5 * d;
                out.push_back(c);
            }
            return out;
        }
        case Kind::Psd: {
            std::normal_distribution<double> g(0.0, 1.0);
            for (Index s = 0; s < samples; ++s) {
                Vec q(k_);
                for (Index i = 0; i < k_; ++i) q[i] = g(rng);
                q.normalize();
                out.push_back(mat_to_svec(q * q.transpose()));
            }
            return out;
        }
        case Kind::Product: {
            // A primitive idempotent of a product is primitive in one block.
            for (size_t i = 0; i < parts_.size(); ++i) {
                auto sub = parts_[i]->primitive_idempotents(samples, rng);
                for (const Vec& c : sub) {
                    Vec z = Vec::Zero(n_);
                    z.segment(offsets_[i], parts_[i]->ambient_dim()) = c;
                    out.push_back(z);
                }
            }
            return out;
        }
        case Kind::Rotated2D:
            throw UnsupportedCone("primitive_idempotents: Rotated2D");
    }
    return out;
}

Mat Cone::svec_to_mat(const Vec& x, Index k) {
    static const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    Mat X(k, k);
    Index idx = 0;
    for (Index j = 0; j < k; ++j)
        for (Index i = 0; i <= j; ++i) {
            double v = x[idx++];
            if (i == j) X(i, j) = v;
            else X(i, j) = X(j, i) = v * inv_sqrt2;
        }
    return X;
}

Vec Cone::mat_to_svec(const Mat& X) {
    static const double sqrt2 = std::sqrt(2.0);
    Index k = X.rows();
    Vec x(k * (k + 1) / 2);
    Index idx = 0;
    for (Index j = 0; j < k; ++j)
        for (Index i = 0; i <= j; ++i) x[idx++] = (i == j) ? X(i, j) : X(i, j) * sqrt2;
    return x;
}

}  // namespace concord
