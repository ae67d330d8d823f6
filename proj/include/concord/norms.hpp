#pragma once

#include <vector>

#include "concord/cones.hpp"
#include "concord/linalg.hpp"
#include "concord/types.hpp"

namespace concord {

// One of the two norms of the theory. Induced kinds need a cone handle:
// InducedE is ||x||_e = min{a >= 0 : x + a e in K, -x + a e in K} and
// InducedEDual its dual with respect to the ambient dot product.
struct NormSpec {
    enum class Kind { L1, L2, LInf, InducedE, InducedEDual };

    Kind kind = Kind::L2;
    ConePtr cone;  // required iff kind is induced

    static NormSpec l1() { return {Kind::L1, nullptr}; }
    static NormSpec l2() { return {Kind::L2, nullptr}; }
    static NormSpec linf() { return {Kind::LInf, nullptr}; }
    static NormSpec induced_e(ConePtr k) { return {Kind::InducedE, std::move(k)}; }
    static NormSpec induced_e_dual(ConePtr k) { return {Kind::InducedEDual, std::move(k)}; }

    bool is_l2() const { return kind == Kind::L2; }
};

double norm_eval(const NormSpec& spec, const Vec& x);
double dual_norm_eval(const NormSpec& spec, const Vec& u);
NormSpec dual_spec(const NormSpec& spec);

// True when the unit ball is a polytope we can describe exactly.
bool is_polyhedral(const NormSpec& spec);

// Rows g_i with ||x|| = max_i g_i' x for polyhedral specs. The L1 gauge has
// 2^n rows; n is capped at 16.
Mat gauge_rows(const NormSpec& spec, Index n);

// Extreme points of {x in S : ||x|| <= 1}; every output has norm 1 and lies
// in S. Polyhedral specs only, dim(S) <= 10.
std::vector<Vec> ball_vertices(const NormSpec& spec, const Subspace& s);

// Test-only relaxation of ball_vertices with S = R^n.
std::vector<Vec> ball_vertices_full(const NormSpec& spec, Index n);

// Nonzero extreme points of {v in K : ||v|| <= 1} for K the orthant (closed
// form) — the outer loop of the sigma and symmetry measures.
std::vector<Vec> orthant_cone_ball_vertices(const NormSpec& spec, Index n);

}  // namespace concord
