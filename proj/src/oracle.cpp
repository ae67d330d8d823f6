#include "concord/oracle.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <atomic>
#include <thread>

#include "concord/lp.hpp"
#include "concord/partition.hpp"

namespace concord::oracle {

namespace {

template <typename F>
void parallel_for(int count, int threads, F&& body) {
    if (threads <= 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&]() {
            for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) body(i);
        });
    for (auto& th : pool) th.join();
}

// L cap K != {0}: exact LP for polyhedral cones, touching margin otherwise.
bool meets_cone(const Subspace& l, const ConePtr& k) {
    if (k->kind() == Cone::Kind::Orthant) {
        const Index n = l.ambient_dim(), m = l.dim();
        // feasibility of {x = B y, x >= 0, sum x = 1}
        lp::LpProblem p = lp::LpProblem::make(n + 1, m + n);
        for (Index r = 0; r < n; ++r) {
            p.eq_matrix.block(r, 0, 1, m) = -l.basis().row(r);
            p.eq_matrix(r, m + r) = 1.0;
        }
        p.eq_matrix.block(n, m, 1, n).setOnes();
        p.eq_rhs[n] = 1.0;
        p.lower.tail(n).setZero();
        return lp::solve_lp(p).status == lp::LpStatus::Optimal;
    }
    if (k->kind() == Cone::Kind::Rotated2D) {
        // L is a line in the plane: membership of either direction.
        Vec b = l.basis().col(0);
        return k->contains(b, 1e-9) || k->contains(Vec(-b), 1e-9);
    }
    return interior_margin(l, k) >= -1e-9;
}

}  // namespace

bool is_illposed(const Subspace& l, const ConePtr& k) {
    return meets_cone(l, k) && meets_cone(orth_complement(l), k->dual());
}

std::vector<Subspace> sample_illposed(const ConePtr& k, Index n, Index m, int count,
                                      uint64_t seed) {
    if (!(m > 0 && m < n)) throw DegenerateSubspace("sample_illposed: need 0 < m < n");
    if (n != k->ambient_dim()) throw DimensionMismatch("sample_illposed: ambient mismatch");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    ConePtr kd = k->dual();

    std::vector<Subspace> out;
    out.reserve(static_cast<size_t>(count));
    long rejections = 0;
    while (static_cast<int>(out.size()) < count) {
        if (rejections > 100000) throw SamplingExhausted("sample_illposed: rejection limit");
        Vec u = kd->project(kd->random_element(rng));
        if (u.norm() < 1e-6) {
            ++rejections;
            continue;
        }
        u /= u.norm();
        Mat w = orth_complement(Subspace(Mat(u))).basis();  // n x (n-1)
        Mat coeff(n - 1, m);
        for (Index i = 0; i < n - 1; ++i)
            for (Index j = 0; j < m; ++j) coeff(i, j) = g(rng);
        Eigen::HouseholderQR<Mat> qr(coeff);
        Mat q = qr.householderQ() * Mat::Identity(n - 1, m);
        Subspace lt{Mat(w * q)};
        if (!meets_cone(lt, k)) {
            ++rejections;
            continue;
        }
        out.push_back(std::move(lt));
    }
    return out;
}

DistBracket dist_to_illposed_estimate(const Subspace& l, const ConePtr& k, const NormPair& np,
                                      const Budget& budget, uint64_t seed) {
    MeasureCertificate nu_cert = nu(l, k, np);
    if (nu_cert.value <= tol::strict_pos)
        throw InfeasibleSide("dist_to_illposed_estimate: feasible-side oracle needs nu > 0");

    DistBracket out;
    out.lo = nu_cert.value - tol::strict_pos;

    auto samples = sample_illposed(k, l.ambient_dim(), l.dim(), budget.subspace_samples, seed);
    std::vector<double> vals(samples.size(), kInfinity);
    parallel_for(static_cast<int>(samples.size()), budget.threads,
                 [&](int i) { vals[static_cast<size_t>(i)] = dist(l, samples[static_cast<size_t>(i)], np).value; });
    double hi = kInfinity;
    for (double v : vals) hi = std::min(hi, v);

    try {
        Subspace crit = critical_subspace_feasible(l, k, np, nu_cert);
        hi = std::min(hi, dist(l, crit, np).value);
    } catch (const Error&) {
        // Construction can degenerate on non-exact witness paths; the sampled
        // upper bound stands on its own.
    }
    out.hi = hi;
    if (out.lo > out.hi + 1e-6)
        throw NumericalFailure("dist_to_illposed_estimate: bracket inverted");
    return out;
}

namespace {

bool image_feasible(const Mat& a, const ConePtr& k) {
    Eigen::JacobiSVD<Mat> svd(a);
    double smin = svd.singularValues()[svd.singularValues().size() - 1];
    if (smin <= 1e-10) return false;  // rank drop counts as a status flip
    return interior_margin(orthonormal_basis(a), k) > tol::strict_pos;
}

bool image_meets_cone(const Mat& a, const ConePtr& k) {
    Eigen::JacobiSVD<Mat> svd(a);
    double smin = svd.singularValues()[svd.singularValues().size() - 1];
    if (smin <= 1e-10) return true;
    return meets_cone(orthonormal_basis(a), k);
}

}  // namespace

double rdist_estimate(const LinearMap& a, const ConePtr& k, const Budget& budget, uint64_t seed) {
    const Index n = a.ambient_dim(), m = a.domain_dim();
    Subspace l = a.image();
    MeasureCertificate nu_cert = nu(l, k, a.codomain);
    const bool feasible_side = nu_cert.value > tol::strict_pos;
    MeasureCertificate nubar_cert;
    if (!feasible_side) {
        nubar_cert = nu_bar(l, k, a.codomain);
        if (nubar_cert.value <= tol::strict_pos)
            throw IllPosedInstance("rdist_estimate: instance is ill-posed");
    }

    // Status of a perturbed map: on the feasible side the flip is losing
    // strict feasibility of Image cap int(K); on the infeasible side it is
    // Image(A) touching K.
    auto flipped = [&](const Mat& pert) {
        return feasible_side ? !image_feasible(pert, k) : image_meets_cone(pert, k);
    };

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);

    std::vector<Mat> directions;
    // The constructed optimal perturbation from the theorem's proof.
    if (feasible_side && nu_cert.u_bar) {
        Vec u = *nu_cert.u_bar;
        Vec v = norm_attaining(a.codomain.tri, u);
        directions.push_back(-v * (a.matrix.transpose() * u).transpose());
    }
    if (!feasible_side && nubar_cert.x_bar && nubar_cert.v_bar &&
        nubar_cert.v_bar->norm() > 1e-12) {
        Vec x = *nubar_cert.x_bar;
        Vec v = *nubar_cert.v_bar;
        Eigen::ColPivHouseholderQR<Mat> qr(a.matrix);
        Vec w = qr.solve(x);
        Vec z = norm_attaining(dual_spec(a.domain_norm), w);
        directions.push_back((v - x) * (z / norm_eval(a.domain_norm, w)).transpose());
    }
    for (int d = 0; d < budget.perturbation_directions; ++d) {
        Vec u(n), w(m);
        for (Index i = 0; i < n; ++i) u[i] = g(rng);
        for (Index i = 0; i < m; ++i) w[i] = g(rng);
        directions.push_back(u * w.transpose());
        if (d % 4 == 0) {
            Mat dense(n, m);
            for (Index i = 0; i < n; ++i)
                for (Index j = 0; j < m; ++j) dense(i, j) = g(rng);
            directions.push_back(dense);
        }
    }

    std::vector<double> flips(directions.size(), kInfinity);
    parallel_for(static_cast<int>(directions.size()), budget.threads, [&](int di) {
        Mat dir = directions[static_cast<size_t>(di)];
        bool exact = true;
        double opn = map_operator_norm(dir, a.domain_norm, a.codomain.tri, exact);
        if (opn <= 1e-14) return;
        dir /= opn;
        // Expand to a flipped magnitude, then bisect.
        double hi = 0.5, lo = 0.0;
        bool found = false;
        for (int e = 0; e < 60; ++e) {
            if (flipped(a.matrix + hi * dir)) { found = true; break; }
            lo = hi;
            hi *= 2.0;
        }
        if (!found) return;
        for (int b = 0; b < budget.bisection_steps; ++b) {
            double mid = 0.5 * (lo + hi);
            (flipped(a.matrix + mid * dir) ? hi : lo) = mid;
        }
        flips[static_cast<size_t>(di)] = hi;
    });
    double best = kInfinity;
    for (double v : flips) best = std::min(best, v);
    if (best == kInfinity) throw NumericalFailure("rdist_estimate: no direction flipped");
    return best;
}

// ---------------------------------------------------------------------------
// verify_suite
// ---------------------------------------------------------------------------

namespace {

void push(VerifyReport& rep, const std::string& name, bool pass, double residual,
          const std::string& detail = "") {
    rep.checks.push_back({name, pass, residual, detail});
}

}  // namespace

VerifyReport verify_suite(const Subspace& l, const ConePtr& k, const NormPair& np,
                          const std::optional<LinearMap>& map, uint64_t seed,
                          const Budget& budget) {
    VerifyReport rep;
    const Index n = k->ambient_dim();

    double margin = interior_margin(l, k);
    bool feas = margin > tol::strict_pos;
    MeasureCertificate nu_cert = nu(l, k, np);
    push(rep, "nu-side-consistency", (nu_cert.value > tol::strict_pos) == feas,
         std::abs(nu_cert.value - (feas ? nu_cert.value : 0.0)),
         feas ? "feasible side" : "dual side");

    if (feas) {
        MeasureCertificate sg = sigma(l, k, np);
        // 1 <= sigma/nu always (Hoelder); the Euclidean upper bound uses Theta.
        if (nu_cert.value > tol::strict_pos && !sg.infeasible_side) {
            push(rep, "sigma-ge-nu", sg.value >= nu_cert.value - 1e-7,
                 nu_cert.value - sg.value);
            if (np.primal.is_l2() && np.tri.is_l2() && k->is_self_dual())
                push(rep, "sigma-eq-nu-selfdual", std::abs(sg.value - nu_cert.value) <= 1e-7,
                     std::abs(sg.value - nu_cert.value));
            if (np.primal.is_l2() && np.tri.is_l2() && k->kind() == Cone::Kind::Rotated2D) {
                double th = theta(k);
                double bound = 1.0 / std::cos(th);
                push(rep, "sigma-over-nu-upper", sg.value / nu_cert.value <= bound + 1e-6,
                     sg.value / nu_cert.value - bound);
            }
        }
        // Rotated-cone closed forms for the canonical axis subspace.
        if (k->kind() == Cone::Kind::Rotated2D && np.primal.is_l2() && np.tri.is_l2()) {
            Vec e2(2);
            e2 << 0.0, 1.0;
            if (l.contains(e2, 1e-9)) {
                double phi = k->phi();
                push(rep, "rotated-nu", std::abs(nu_cert.value - std::sin(phi)) <= 1e-6,
                     std::abs(nu_cert.value - std::sin(phi)));
                push(rep, "rotated-sigma", std::abs(sg.value - 0.5 / std::cos(phi)) <= 1e-6,
                     std::abs(sg.value - 0.5 / std::cos(phi)));
                push(rep, "rotated-theta", std::abs(theta(k) - (M_PI / 2 - 2 * phi)) <= 1e-9,
                     std::abs(theta(k) - (M_PI / 2 - 2 * phi)));
                push(rep, "rotated-ratio",
                     std::abs(sg.value / nu_cert.value - 1.0 / std::sin(2 * phi)) <= 1e-6,
                     std::abs(sg.value / nu_cert.value - 1.0 / std::sin(2 * phi)));
            }
        }
        // Symmetry theorem on its exact path (needs ||.|| = |||.|||).
        auto canon = [&](NormSpec::Kind kd) {
            if (k->kind() == Cone::Kind::Orthant) {
                if (kd == NormSpec::Kind::InducedE) return NormSpec::Kind::LInf;
                if (kd == NormSpec::Kind::InducedEDual) return NormSpec::Kind::L1;
            }
            return kd;
        };
        if (k->kind() == Cone::Kind::Orthant && is_polyhedral(np.primal) &&
            canon(np.primal.kind) == canon(np.tri.kind)) {
            MeasureCertificate sy = sym(l, k, np.primal);
            MeasureCertificate sg2 = sigma(l, k, np);
            if (sy.value < 1.0 - 1e-9) {
                double lo_b = sy.value / (1.0 + sy.value);
                double hi_b = sy.value / (1.0 - sy.value);
                push(rep, "symmetry-lower", sg2.value >= lo_b - 1e-7, lo_b - sg2.value);
                push(rep, "symmetry-upper", sg2.value <= hi_b + 1e-7, sg2.value - hi_b);
                if (canon(np.primal.kind) == NormSpec::Kind::L1)
                    push(rep, "symmetry-equality", std::abs(sg2.value - lo_b) <= 1e-7,
                         std::abs(sg2.value - lo_b));
            }
        }
        // Main theorem, feasible side, at a reduced sample budget.
        if (nu_cert.x_bar && nu_cert.u_bar && !nu_cert.approximate) {
            try {
                Subspace crit = critical_subspace_feasible(l, k, np, nu_cert);
                double dc = dist(l, crit, np).value;
                push(rep, "grassmann-upper", dc <= nu_cert.value + 1e-7, dc - nu_cert.value);
                push(rep, "critical-illposed", is_illposed(crit, k), 0.0);
            } catch (const Error& e) {
                push(rep, "grassmann-upper", false, 0.0, e.what());
            }
            int ns = std::min(budget.subspace_samples, 500);
            auto samples = sample_illposed(k, n, l.dim(), ns, seed);
            double worst = kInfinity;
            for (const auto& lt : samples) worst = std::min(worst, dist(l, lt, np).value);
            push(rep, "grassmann-lower", worst >= nu_cert.value - 1e-6, nu_cert.value - worst);
        }
    } else {
        MeasureCertificate nb = nu_bar(l, k, np);
        push(rep, "nubar-positive-dual-side", nb.value > 0, nb.value);
        if (nb.x_bar && nb.v_bar && !nb.approximate) {
            try {
                Subspace crit = critical_subspace_infeasible(l, k, np, nb);
                double oc = odist(crit, l, np).value;
                push(rep, "grassmann-upper-dual", oc <= nb.value + 1e-7, oc - nb.value);
                push(rep, "critical-illposed", is_illposed(crit, k), 0.0);
            } catch (const DegenerateVbar&) {
                push(rep, "grassmann-upper-dual", true, 0.0, "vbar = 0 fallback");
            } catch (const Error& e) {
                push(rep, "grassmann-upper-dual", false, 0.0, e.what());
            }
        }
    }

    // Goldman-Tucker checks for the polyhedral case.
    if (k->kind() == Cone::Kind::Orthant) {
        GtPartition gt = goldman_tucker(l);
        bool supports_ok = true;
        for (Index i : gt.b_set)
            supports_ok = supports_ok && gt.x_cert[i] > tol::strict_pos && gt.y_cert[i] == 0.0;
        for (Index i : gt.n_set)
            supports_ok = supports_ok && gt.y_cert[i] > tol::strict_pos && gt.x_cert[i] == 0.0;
        push(rep, "gt-supports", supports_ok, 0.0);
        push(rep, "gt-orthogonal", std::abs(gt.x_cert.dot(gt.y_cert)) <= 1e-12,
             std::abs(gt.x_cert.dot(gt.y_cert)));
        PartitionMeasures pm = partition_measures(l, np);
        bool blocks_pos = true;
        if (pm.nu_b) blocks_pos = blocks_pos && pm.nu_b->value > tol::strict_pos;
        if (pm.nu_n) blocks_pos = blocks_pos && pm.nu_n->value > tol::strict_pos;
        push(rep, "gt-blocks-wellposed", blocks_pos, 0.0);
    }

    if (map) {
        try {
            OpNorms norms = op_norms(*map);
            push(rep, "kappa-ge-one", norms.kappa >= 1.0 - 1e-9, 1.0 - norms.kappa);
            double est = rdist_estimate(*map, k, budget, seed);
            SandwichReport sr = renegar_sandwich(*map, k, est);
            push(rep, "renegar-bracket", true, 0.0);
            (void)sr;
        } catch (const Error& e) {
            push(rep, "renegar-bracket", false, 0.0, e.what());
        }
    }
    return rep;
}

}  // namespace concord::oracle
