#include "concord/lp.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

namespace concord::lp {

namespace {

constexpr double kPivotTol = 1e-11;
constexpr int kMaxIterBase = 2000;

enum class VarState { Basic, AtLower, AtUpper, FreeZero };

struct Tableau {
    Mat A;
    Vec b, c, lo, hi;
    std::vector<VarState> state;
    std::vector<Index> basis;   // one per row
    Vec x;                      // full variable vector
    int degenerate_streak = 0;
    int iterations = 0;

    Index m() const { return A.rows(); }
    Index n() const { return A.cols(); }

    void set_nonbasic_values() {
        for (Index j = 0; j < n(); ++j) {
            switch (state[j]) {
                case VarState::AtLower: x[j] = lo[j]; break;
                case VarState::AtUpper: x[j] = hi[j]; break;
                case VarState::FreeZero: x[j] = 0.0; break;
                case VarState::Basic: break;
            }
        }
    }

    Mat basis_matrix() const {
        Mat B(m(), m());
        for (Index i = 0; i < m(); ++i) B.col(i) = A.col(basis[i]);
        return B;
    }

    // Recompute basic values from the nonbasic ones.
    void refresh_basics(const Eigen::PartialPivLU<Mat>& lu) {
        Vec rhs = b;
        for (Index j = 0; j < n(); ++j)
            if (state[j] != VarState::Basic && x[j] != 0.0) rhs -= A.col(j) * x[j];
        Vec xb = lu.solve(rhs);
        for (Index i = 0; i < m(); ++i) x[basis[i]] = xb[i];
    }
};

// Runs the simplex on the given cost vector. Returns true when optimal,
// false when unbounded. Duals for the final basis are written to y_out.
bool run_simplex(Tableau& t, const Vec& cost, Vec& y_out, Vec& d_out, int max_iter) {
    const Index m = t.m(), n = t.n();
    const double dual_tol = 1e-9 * (1.0 + cost.cwiseAbs().maxCoeff());
    const int bland_after = 10 * static_cast<int>(m + n);

    for (;; ++t.iterations) {
        if (t.iterations > max_iter) throw NumericalFailure("simplex iteration limit");

        Mat B = t.basis_matrix();
        Eigen::PartialPivLU<Mat> lu(B);
        Eigen::PartialPivLU<Mat> luT(B.transpose());
        t.refresh_basics(lu);

        Vec cb(m);
        for (Index i = 0; i < m; ++i) cb[i] = cost[t.basis[i]];
        Vec y = luT.solve(cb);

        // Reduced costs and entering choice.
        bool use_bland = t.degenerate_streak > bland_after;
        Index enter = -1;
        int dir = 0;  // +1: entering increases, -1: decreases
        double best = dual_tol;
        for (Index j = 0; j < n; ++j) {
            if (t.state[j] == VarState::Basic) continue;
            if (t.lo[j] == t.hi[j]) continue;  // fixed
            double dj = cost[j] - y.dot(t.A.col(j));
            double viol = 0.0;
            int cand_dir = 0;
            if ((t.state[j] == VarState::AtLower || t.state[j] == VarState::FreeZero) && dj < -dual_tol) {
                viol = -dj;
                cand_dir = +1;
            } else if ((t.state[j] == VarState::AtUpper || t.state[j] == VarState::FreeZero) && dj > dual_tol) {
                viol = dj;
                cand_dir = -1;
            }
            if (cand_dir == 0) continue;
            if (use_bland) { enter = j; dir = cand_dir; break; }
            if (viol > best) { best = viol; enter = j; dir = cand_dir; }
        }

        if (enter < 0) {  // optimal
            y_out = y;
            d_out.resize(n);
            for (Index j = 0; j < n; ++j) d_out[j] = cost[j] - y.dot(t.A.col(j));
            return true;
        }

        Vec w = lu.solve(t.A.col(enter));  // B^{-1} a_e

        // Ratio test: x_e moves by dir*step; basics move by -dir*step*w.
        double step = kInf;
        Index leave_row = -1;
        int leave_to = 0;  // -1: leaving hits lower, +1: hits upper
        double best_pivot = 0.0;
        for (Index i = 0; i < m; ++i) {
            double wi = dir * w[i];
            Index bj = t.basis[i];
            if (wi > kPivotTol) {  // basic decreases toward its lower bound
                if (t.lo[bj] == -kInf) continue;
                double s = (t.x[bj] - t.lo[bj]) / wi;
                if (s < step - 1e-12 || (s < step + 1e-12 && std::abs(w[i]) > best_pivot)) {
                    step = std::max(s, 0.0); leave_row = i; leave_to = -1; best_pivot = std::abs(w[i]);
                }
            } else if (wi < -kPivotTol) {  // basic increases toward its upper bound
                if (t.hi[bj] == kInf) continue;
                double s = (t.hi[bj] - t.x[bj]) / (-wi);
                if (s < step - 1e-12 || (s < step + 1e-12 && std::abs(w[i]) > best_pivot)) {
                    step = std::max(s, 0.0); leave_row = i; leave_to = +1; best_pivot = std::abs(w[i]);
                }
            }
        }
        // Bound flip of the entering variable itself.
        double range = t.hi[enter] - t.lo[enter];
        bool flip = false;
        if (range < step) { step = range; flip = true; }

        if (step == kInf) return false;  // unbounded ray

        t.degenerate_streak = (step < 1e-12) ? t.degenerate_streak + 1 : 0;

        // Apply the move.
        double xe = t.x[enter] + dir * step;
        for (Index i = 0; i < m; ++i) t.x[t.basis[i]] -= dir * step * w[i];
        t.x[enter] = xe;

        if (flip) {
            t.state[enter] = (dir > 0) ? VarState::AtUpper : VarState::AtLower;
            continue;
        }
        Index bj = t.basis[leave_row];
        t.state[bj] = (leave_to < 0) ? VarState::AtLower : VarState::AtUpper;
        t.x[bj] = (leave_to < 0) ? t.lo[bj] : t.hi[bj];
        t.basis[leave_row] = enter;
        t.state[enter] = VarState::Basic;
    }
}

}  // namespace

LpProblem LpProblem::make(Index nrows, Index ncols) {
    LpProblem p;
    p.objective = Vec::Zero(ncols);
    p.eq_matrix = Mat::Zero(nrows, ncols);
    p.eq_rhs = Vec::Zero(nrows);
    p.lower = Vec::Constant(ncols, -kInf);
    p.upper = Vec::Constant(ncols, kInf);
    return p;
}

LpSolution solve_lp(const LpProblem& p) {
    const Index m = p.rows(), n0 = p.cols();
    if (p.eq_rhs.size() != m || p.objective.size() != n0 || p.lower.size() != n0 ||
        p.upper.size() != n0)
        throw DimensionMismatch("solve_lp: inconsistent problem dimensions");
    for (Index j = 0; j < n0; ++j)
        if (p.lower[j] > p.upper[j]) return {};  // trivially infeasible, empty box

    LpSolution sol;
    if (m == 0) {
        // Pure bound problem.
        Vec c = p.maximize ? Vec(-p.objective) : p.objective;
        sol.primal.resize(n0);
        for (Index j = 0; j < n0; ++j) {
            double v;
            if (c[j] > 0) v = p.lower[j];
            else if (c[j] < 0) v = p.upper[j];
            else v = std::isfinite(p.lower[j]) ? p.lower[j] : (std::isfinite(p.upper[j]) ? p.upper[j] : 0.0);
            if (!std::isfinite(v) && c[j] != 0.0) { sol.status = LpStatus::Unbounded; return sol; }
            sol.primal[j] = std::isfinite(v) ? v : 0.0;
        }
        sol.status = LpStatus::Optimal;
        sol.dual = Vec::Zero(0);
        sol.reduced_costs = c;
        sol.value = p.objective.dot(sol.primal);
        return sol;
    }

    Tableau t;
    const Index n = n0 + m;  // artificials appended
    t.A = Mat::Zero(m, n);
    t.A.leftCols(n0) = p.eq_matrix;
    t.b = p.eq_rhs;
    t.lo.resize(n);
    t.hi.resize(n);
    t.lo.head(n0) = p.lower;
    t.hi.head(n0) = p.upper;
    t.lo.tail(m).setZero();
    t.hi.tail(m).setConstant(kInf);
    t.state.assign(n, VarState::AtLower);
    t.x = Vec::Zero(n);

    for (Index j = 0; j < n0; ++j) {
        if (std::isfinite(p.lower[j])) t.state[j] = VarState::AtLower;
        else if (std::isfinite(p.upper[j])) t.state[j] = VarState::AtUpper;
        else t.state[j] = VarState::FreeZero;
    }
    t.set_nonbasic_values();

    Vec resid = t.b - t.A.leftCols(n0) * t.x.head(n0);
    for (Index i = 0; i < m; ++i) {
        t.A(i, n0 + i) = (resid[i] >= 0) ? 1.0 : -1.0;
        t.basis.push_back(n0 + i);
        t.state[n0 + i] = VarState::Basic;
        t.x[n0 + i] = std::abs(resid[i]);
    }

    const int max_iter = kMaxIterBase + 50 * static_cast<int>(m + n);

    // Phase 1.
    Vec phase1_cost = Vec::Zero(n);
    phase1_cost.tail(m).setOnes();
    Vec y, d;
    run_simplex(t, phase1_cost, y, d, max_iter);  // bounded below by 0, can't be unbounded

    double infeas = t.x.tail(m).sum();
    if (infeas > 1e-9 * (1.0 + t.b.cwiseAbs().sum())) {
        sol.status = LpStatus::Infeasible;
        // Phase-1 duals certify: y'b > max_{l<=x<=u} (y'A)x. Orient the sign.
        double lhs = y.dot(p.eq_rhs);
        double rhs = 0.0;
        for (Index j = 0; j < n0; ++j) {
            double aj = y.dot(p.eq_matrix.col(j));
            rhs += aj > 0 ? aj * p.upper[j] : aj * p.lower[j];
        }
        sol.dual = (lhs - rhs >= 0) ? y : Vec(-y);
        sol.iterations = t.iterations;
        return sol;
    }

    // Drive artificials out or pin them to zero.
    {
        Mat B = t.basis_matrix();
        Eigen::PartialPivLU<Mat> lu(B);
        for (Index i = 0; i < m; ++i) {
            if (t.basis[i] < n0) continue;
            Index pivot_col = -1;
            for (Index j = 0; j < n0 && pivot_col < 0; ++j) {
                if (t.state[j] == VarState::Basic) continue;
                Vec w = lu.solve(t.A.col(j));
                if (std::abs(w[i]) > 1e-8) pivot_col = j;
            }
            if (pivot_col >= 0) {
                Index art = t.basis[i];
                t.basis[i] = pivot_col;
                t.state[pivot_col] = VarState::Basic;
                t.state[art] = VarState::AtLower;
                t.x[art] = 0.0;
                t.x[pivot_col] = 0.0;  // degenerate entry; refreshed next factorization
                B = t.basis_matrix();
                lu.compute(B);
            }
        }
        // Artificials never re-enter; any still basic sits on a redundant row.
        for (Index k = 0; k < m; ++k) { t.lo[n0 + k] = 0.0; t.hi[n0 + k] = 0.0; }
    }

    // Phase 2.
    Vec cost = Vec::Zero(n);
    cost.head(n0) = p.maximize ? Vec(-p.objective) : p.objective;
    t.degenerate_streak = 0;
    bool optimal = run_simplex(t, cost, y, d, max_iter);
    sol.iterations = t.iterations;
    if (!optimal) {
        sol.status = LpStatus::Unbounded;
        return sol;
    }
    sol.status = LpStatus::Optimal;
    sol.primal = t.x.head(n0);
    sol.dual = p.maximize ? Vec(-y) : y;
    sol.reduced_costs = p.maximize ? Vec(-d.head(n0)) : Vec(d.head(n0));
    sol.value = p.objective.dot(sol.primal);
    return sol;
}

std::vector<Vec> enumerate_vertices(const Mat& G, const Vec& h) {
    const Index d = G.cols(), r = G.rows();
    if (d > 10) throw DimensionTooLarge("enumerate_vertices: dimension above 10");
    if (h.size() != r) throw DimensionMismatch("enumerate_vertices: rows(G) != size(h)");
    if (d == 0) return {};

    // Boundedness: every +-coordinate direction must have a finite optimum.
    for (Index k = 0; k < d; ++k) {
        for (int sign : {+1, -1}) {
            LpProblem p = LpProblem::make(r, d + r);
            p.eq_matrix.leftCols(d) = G;
            p.eq_matrix.rightCols(r).setIdentity();
            p.eq_rhs = h;
            p.lower.tail(r).setZero();
            p.objective[k] = sign;
            p.maximize = true;
            LpSolution s = solve_lp(p);
            if (s.status == LpStatus::Unbounded)
                throw UnboundedPolytope("enumerate_vertices: unbounded polytope");
            if (s.status == LpStatus::Infeasible) return {};
        }
    }

    // Guard the subset enumeration.
    double combos = 1.0;
    for (Index i = 0; i < d; ++i) combos *= static_cast<double>(r - i) / static_cast<double>(i + 1);
    if (combos > 2e7) throw DimensionTooLarge("enumerate_vertices: too many basis subsets");

    const double scale = 1.0 + h.cwiseAbs().maxCoeff() + G.cwiseAbs().maxCoeff();
    const double feas_tol = 1e-9 * scale;

    std::vector<Vec> out;
    std::vector<Index> idx(d);
    std::iota(idx.begin(), idx.end(), 0);

    auto push_unique = [&](const Vec& v) {
        for (const Vec& w : out)
            if ((w - v).cwiseAbs().maxCoeff() <= 1e-8) return;
        out.push_back(v);
    };

    // Iterate over all d-subsets of rows in lexicographic order.
    while (true) {
        Mat M(d, d);
        Vec rhs(d);
        for (Index i = 0; i < d; ++i) {
            M.row(i) = G.row(idx[i]);
            rhs[i] = h[idx[i]];
        }
        Eigen::FullPivLU<Mat> lu(M);
        lu.setThreshold(1e-10);
        if (lu.rank() == d) {
            Vec x = lu.solve(rhs);
            if (((G * x - h).array() <= feas_tol).all()) push_unique(x);
        }
        // Next combination.
        Index i = d;
        while (i > 0) {
            --i;
            if (idx[i] != i + r - d) break;
        }
        if (idx[i] == i + r - d) break;
        ++idx[i];
        for (Index j = i + 1; j < d; ++j) idx[j] = idx[j - 1] + 1;
    }
    return out;
}

Vec nnls(const Mat& E, const Vec& f) {
    const Index nvar = E.cols();
    Vec x = Vec::Zero(nvar);
    std::vector<bool> active(nvar, false);  // active = in the positive set
    Vec w = E.transpose() * (f - E * x);

    const double wtol = 1e-12 * (1.0 + f.norm()) * (1.0 + E.norm());
    int guard = 0;
    const int guard_max = 50 * static_cast<int>(nvar + 5) * static_cast<int>(nvar + 5);

    while (true) {
        if (++guard > guard_max) throw NumericalFailure("nnls: iteration limit");
        Index t = -1;
        double best = wtol;
        for (Index j = 0; j < nvar; ++j)
            if (!active[j] && w[j] > best) { best = w[j]; t = j; }
        if (t < 0) break;
        active[t] = true;

        while (true) {
            std::vector<Index> P;
            for (Index j = 0; j < nvar; ++j)
                if (active[j]) P.push_back(j);
            Mat Ep(E.rows(), static_cast<Index>(P.size()));
            for (size_t k = 0; k < P.size(); ++k) Ep.col(static_cast<Index>(k)) = E.col(P[k]);
            Vec z = Ep.colPivHouseholderQr().solve(f);

            bool all_pos = true;
            for (Index k = 0; k < z.size(); ++k)
                if (z[k] <= 0) { all_pos = false; break; }
            if (all_pos) {
                x.setZero();
                for (size_t k = 0; k < P.size(); ++k) x[P[k]] = z[static_cast<Index>(k)];
                break;
            }
            // Step back to the boundary, drop newly-zero variables.
            double alpha = kInf;
            for (size_t k = 0; k < P.size(); ++k) {
                double zk = z[static_cast<Index>(k)], xk = x[P[k]];
                if (zk <= 0) alpha = std::min(alpha, xk / (xk - zk));
            }
            for (size_t k = 0; k < P.size(); ++k) {
                double zk = z[static_cast<Index>(k)];
                x[P[k]] += alpha * (zk - x[P[k]]);
            }
            for (size_t k = 0; k < P.size(); ++k)
                if (x[P[k]] <= 1e-14) { x[P[k]] = 0.0; active[P[k]] = false; }
        }
        w = E.transpose() * (f - E * x);
    }
    return x;
}

bool least_distance(const Mat& G, const Vec& h, Vec& y) {
    // LDP via NNLS on [G'; h']u ~ e_{n+1} (Lawson & Hanson 23.3).
    const Index ng = G.rows(), d = G.cols();
    Mat E(d + 1, ng);
    E.topRows(d) = G.transpose();
    E.bottomRows(1) = h.transpose();
    Vec f = Vec::Zero(d + 1);
    f[d] = 1.0;
    Vec u = nnls(E, f);
    Vec r = E * u - f;
    double rn = r.squaredNorm();
    if (rn <= 1e-24 || std::abs(r[d]) <= 1e-12) return false;  // incompatible constraints
    y.resize(d);
    for (Index k = 0; k < d; ++k) y[k] = -r[k] / r[d];
    // Polish: exact projection onto the active constraints.
    std::vector<Index> act;
    for (Index i = 0; i < ng; ++i)
        if (u[i] > 1e-12) act.push_back(i);
    if (!act.empty() && static_cast<Index>(act.size()) <= d) {
        Mat Ga(static_cast<Index>(act.size()), d);
        Vec ha(static_cast<Index>(act.size()));
        for (size_t k = 0; k < act.size(); ++k) {
            Ga.row(static_cast<Index>(k)) = G.row(act[k]);
            ha[static_cast<Index>(k)] = h[act[k]];
        }
        // min ||y|| s.t. Ga y = ha  ->  y = Ga' (Ga Ga')^{-1} ha
        Mat GG = Ga * Ga.transpose();
        Eigen::LDLT<Mat> ldlt(GG);
        if (ldlt.info() == Eigen::Success) {
            Vec cand = Ga.transpose() * ldlt.solve(ha);
            if (((G * cand - h).array() >= -1e-9 * (1.0 + h.cwiseAbs().maxCoeff())).all() &&
                cand.norm() <= y.norm() + 1e-9)
                y = cand;
        }
    }
    return true;
}

}  // namespace concord::lp
