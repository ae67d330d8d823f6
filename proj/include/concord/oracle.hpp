#pragma once

#include <optional>
#include <string>
#include <vector>

#include "concord/cones.hpp"
#include "concord/linalg.hpp"
#include "concord/measures.hpp"
#include "concord/renegar.hpp"
#include "concord/types.hpp"

namespace concord::oracle {

struct Budget {
    int subspace_samples = 2000;
    int perturbation_directions = 200;
    int bisection_steps = 40;
    int threads = 1;
};

// Random subspaces with L^perp cap K* != {0} by construction (built inside
// u^perp for a random u in K*) and L cap K != {0} by rejection. Deterministic
// for a fixed seed. Throws SamplingExhausted after 1e5 rejections.
std::vector<Subspace> sample_illposed(const ConePtr& k, Index n, Index m, int count,
                                      uint64_t seed);

// True iff the subspace meets the ill-posedness definition on both sides
// (exact LP tests for polyhedral cones, eigenvalue maximization otherwise).
bool is_illposed(const Subspace& l, const ConePtr& k);

struct DistBracket {
    double lo = 0;  // nu(L) - tol, from the certified measure
    double hi = 0;  // min over witnessed ill-posed subspaces of dist(L, Ltilde)
};

// Brackets dist(L, Sigma_m): the upper end from sampled and constructed
// ill-posed subspaces, the lower end from nu. Requires an exact dist path
// for the norm pair.
DistBracket dist_to_illposed_estimate(const Subspace& l, const ConePtr& k, const NormPair& np,
                                      const Budget& budget, uint64_t seed);

// Upper bound on Renegar's distance to ill-posedness by perturbation
// bisection over rank-one and dense directions (always including the
// theorem's constructed optimal direction).
double rdist_estimate(const LinearMap& a, const ConePtr& k, const Budget& budget, uint64_t seed);

struct CheckResult {
    std::string name;
    bool pass = false;
    double residual = 0;
    std::string detail;
};

struct VerifyReport {
    std::vector<CheckResult> checks;
    bool all_pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
};

// Runs every theorem check applicable to the instance's configuration;
// failures are recorded, not thrown.
VerifyReport verify_suite(const Subspace& l, const ConePtr& k, const NormPair& np,
                          const std::optional<LinearMap>& map, uint64_t seed,
                          const Budget& budget = {});

}  // namespace concord::oracle
