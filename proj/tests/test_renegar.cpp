#include <doctest.h>

#include <cmath>
#include <random>

#include "concord/oracle.hpp"
#include "concord/renegar.hpp"

using namespace concord;

namespace {

Mat isometry(Index n, Index m, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Mat a(n, m);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < m; ++j) a(i, j) = g(rng);
    Eigen::HouseholderQR<Mat> qr(a);
    return qr.householderQ() * Mat::Identity(n, m);
}

}  // namespace

TEST_CASE("operator norms: isometry, diagonal, and the mixed-norm case") {
    std::mt19937_64 rng(1);
    Mat q = isometry(4, 2, rng);
    LinearMap iso{q, NormSpec::l2(), NormPair::l2_l2()};
    OpNorms n1 = op_norms(iso);
    CHECK(n1.norm_a == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(n1.norm_a_inv == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(n1.kappa == doctest::Approx(1.0).epsilon(1e-12));

    Mat d = Mat::Zero(3, 2);
    d(0, 0) = 2;
    d(1, 1) = 1;
    LinearMap dm{d, NormSpec::l2(), NormPair::l2_l2()};
    OpNorms n2 = op_norms(dm);
    CHECK(n2.norm_a == doctest::Approx(2.0));
    CHECK(n2.norm_a_inv == doctest::Approx(1.0));
    CHECK(n2.kappa == doctest::Approx(2.0));

    // A = [1;1], |w| = l2, codomain primal l1: evaluate on w = +-1.
    Mat ones(2, 1);
    ones << 1, 1;
    LinearMap om{ones, NormSpec::l2(), {NormSpec::l1(), NormSpec::l1()}};
    OpNorms n3 = op_norms(om);
    CHECK(n3.norm_a == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("kappa = 1 iff the map is an l2 isometry") {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int t = 0; t < 10; ++t) {
        Mat a(5, 2);
        for (Index i = 0; i < 5; ++i)
            for (Index j = 0; j < 2; ++j) a(i, j) = g(rng);
        LinearMap m{a, NormSpec::l2(), NormPair::l2_l2()};
        OpNorms n = op_norms(m);
        CHECK(n.kappa >= 1.0 - 1e-12);
        Mat ata = a.transpose() * a;
        bool iso = (ata - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-9;
        CHECK(iso == (n.kappa <= 1.0 + 1e-9));
    }
    CHECK_THROWS_AS(op_norms(LinearMap{Mat::Zero(3, 2), NormSpec::l2(), NormPair::l2_l2()}),
                    NotInjective);
}

TEST_CASE("sandwich collapses for isometries: Rdist = dist = nu") {
    auto k = Cone::orthant(3);
    std::mt19937_64 rng(3);
    Mat q;
    LinearMap a{Mat(), NormSpec::l2(), NormPair::l2_l2()};
    do {  // feasible-side isometry
        q = isometry(3, 2, rng);
        a.matrix = q;
    } while (interior_margin(orthonormal_basis(q), k) < 0.05);
    SandwichReport rep = renegar_sandwich(a, k);
    CHECK(rep.feasible_side);
    CHECK(rep.lower == doctest::Approx(rep.upper).epsilon(1e-10));
    CHECK(rep.grassmann_value == doctest::Approx(rep.lower).epsilon(1e-10));

    // Oracle estimate must land inside (and equals nu here).
    oracle::Budget budget;
    budget.perturbation_directions = 40;
    double est = oracle::rdist_estimate(a, k, budget, 5);
    CHECK(est == doctest::Approx(rep.grassmann_value).epsilon(5e-2));
    SandwichReport rep2 = renegar_sandwich(a, k, est);
    REQUIRE(rep2.rdist_estimate);

    // Scaling A by 2 leaves the subspace (and nu) fixed but scales Rdist:
    // ||2A|| = 2 and ||(2A)^{-1}|| = 1/2, so the bracket collapses at 2 nu.
    LinearMap a2 = a;
    a2.matrix = 2.0 * q;
    SandwichReport rep3 = renegar_sandwich(a2, k);
    CHECK(rep3.upper == doctest::Approx(2.0 * rep.grassmann_value).epsilon(1e-9));
    CHECK(rep3.lower == doctest::Approx(2.0 * rep.grassmann_value).epsilon(1e-9));
    double est2 = oracle::rdist_estimate(a2, k, budget, 5);
    CHECK(est2 >= rep3.lower - 1e-6);
    CHECK(est2 <= rep3.upper + 1e-6);
    CHECK(est2 <= 3.0 * est + 1e-6);  // scaling by 3 would scale by <= 3
    CHECK(est2 >= est - 1e-6);
}

TEST_CASE("sandwich on the infeasible side uses nu_bar and odist") {
    auto k = Cone::orthant(2);
    Mat a(2, 1);
    a << 1, -1;
    LinearMap m{a / a.norm(), NormSpec::l2(), NormPair::l2_l2()};
    SandwichReport rep = renegar_sandwich(m, k);
    CHECK_FALSE(rep.feasible_side);
    CHECK(rep.grassmann_value == doctest::Approx(std::sin(M_PI / 4)).epsilon(1e-9));
    oracle::Budget budget;
    budget.perturbation_directions = 40;
    double est = oracle::rdist_estimate(m, k, budget, 7);
    CHECK(est >= rep.lower - 1e-6);
    CHECK(est <= rep.upper + 1e-6);
}

TEST_CASE("ill-posed instances are rejected") {
    auto k = Cone::orthant(2);
    Mat a(2, 1);
    a << 1, 0;  // boundary ray: neither side is strictly feasible
    LinearMap m{a, NormSpec::l2(), NormPair::l2_l2()};
    CHECK_THROWS_AS(renegar_sandwich(m, k), IllPosedInstance);
}

TEST_CASE("preconditioning the quadrant example span{(2,1)}") {
    auto k = Cone::orthant(2);
    Mat a(2, 1);
    a << 2, 1;
    LinearMap m{a, NormSpec::l2(), NormPair::l2_l2()};
    PreconditionReport rep = precondition(m, k);
    CHECK(rep.balance_residual <= 1e-10);
    CHECK(rep.nu_after >= 1.0 / std::sqrt(2.0) - 1e-7);
    // P preserves the cone on samples.
    std::mt19937_64 rng(4);
    for (int t = 0; t < 50; ++t) {
        Vec z = k->project(k->random_element(rng));
        CHECK(k->contains(Vec(rep.p * z), 1e-9));
    }
}

TEST_CASE("preconditioning along the identity ray sits exactly at the bound") {
    for (Index n : {2, 4, 6}) {
        auto k = Cone::orthant(n);
        Mat a = Mat::Zero(n, 1);
        a.col(0).setOnes();
        LinearMap m{a, NormSpec::l2(), NormPair::l2_l2()};
        PreconditionReport rep = precondition(m, k);
        CHECK(rep.nu_after ==
              doctest::Approx(1.0 / std::sqrt(static_cast<double>(n))).epsilon(1e-9));
        CHECK((rep.p - Mat::Identity(n, n)).cwiseAbs().maxCoeff() <= 1e-9);
    }
}

TEST_CASE("preconditioning a PSD image containing diag(4,1)") {
    auto k = Cone::psd(2);
    Mat a(3, 1);
    a.col(0) = Cone::mat_to_svec((Mat(2, 2) << 4, 0, 0, 1).finished());
    LinearMap m{a, NormSpec::l2(), NormPair::l2_l2()};
    PreconditionReport rep = precondition(m, k);
    CHECK(rep.balance_residual <= 1e-10);
    CHECK(rep.nu_after >= 1.0 / std::sqrt(2.0) - 1e-7);
    CHECK(rep.bound == doctest::Approx(1.0 / std::sqrt(2.0)));
}

TEST_CASE("infeasible-side images cannot be preconditioned") {
    auto k = Cone::orthant(2);
    Mat a(2, 1);
    a << 1, -1;
    LinearMap m{a, NormSpec::l2(), NormPair::l2_l2()};
    CHECK_THROWS_AS(precondition(m, k), InfeasibleSide);
}
