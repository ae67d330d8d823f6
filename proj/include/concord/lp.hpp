#pragma once

#include <limits>
#include <vector>

#include "concord/types.hpp"

namespace concord::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// min/max c'x  s.t.  A x = b,  lower <= x <= upper  (entries may be +-inf).
struct LpProblem {
    Vec objective;
    Mat eq_matrix;
    Vec eq_rhs;
    Vec lower;
    Vec upper;
    bool maximize = false;

    Index rows() const { return eq_matrix.rows(); }
    Index cols() const { return eq_matrix.cols(); }

    // Convenience constructor: everything free, zero objective.
    static LpProblem make(Index nrows, Index ncols);
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
    LpStatus status = LpStatus::Infeasible;
    Vec primal;         // x (Optimal only)
    Vec dual;           // row multipliers y; Farkas certificate when Infeasible
    Vec reduced_costs;  // c - A'y in the minimization sense
    double value = 0.0; // objective in the problem's own sense
    int iterations = 0;
};

// Dense bounded-variable two-phase simplex. Deterministic: Dantzig pricing
// with a switch to Bland's rule after 10*(rows+cols) degenerate pivots.
LpSolution solve_lp(const LpProblem& p);

// All vertices of the polytope {x in R^d : G x <= h}, d <= 10. Throws
// UnboundedPolytope if any coordinate direction is unbounded and
// DimensionTooLarge when the basis-subset enumeration would be excessive.
// Output points satisfy the inequalities to 1e-9 and are deduplicated at 1e-8.
std::vector<Vec> enumerate_vertices(const Mat& G, const Vec& h);

// Lawson-Hanson nonnegative least squares: min ||E x - f||_2 s.t. x >= 0.
// Finite active-set method; returns the minimizer.
Vec nnls(const Mat& E, const Vec& f);

// Least-distance program min ||y||_2 s.t. G y >= h, solved through one NNLS
// (Lawson & Hanson, ch. 23). Returns false when the constraints are
// infeasible; on success fills y.
bool least_distance(const Mat& G, const Vec& h, Vec& y);

}  // namespace concord::lp
