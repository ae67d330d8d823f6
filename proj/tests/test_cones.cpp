#include <doctest.h>

#include <cmath>
#include <random>

#include "concord/cones.hpp"
#include "concord/norms.hpp"

using namespace concord;

namespace {

// Membership-defined eigenvalue map, used as an independent oracle for the
// closed-form lambda_e.
double lambda_e_bisect(const ConePtr& k, const Vec& x) {
    double scale = 1.0 + x.norm();
    double lo = -2 * scale, hi = 2 * scale;
    while (!k->contains(x - lo * k->identity(), 1e-12)) lo -= scale;
    for (int it = 0; it < 120; ++it) {
        double mid = 0.5 * (lo + hi);
        (k->contains(x - mid * k->identity(), 1e-12) ? lo : hi) = mid;
    }
    return lo;
}

std::vector<ConePtr> test_cones() {
    return {Cone::orthant(5), Cone::second_order(4), Cone::psd(3),
            Cone::product({Cone::orthant(2), Cone::second_order(3)})};
}

}  // namespace

TEST_CASE("membership basics") {
    auto orth = Cone::orthant(2);
    CHECK(orth->contains((Vec(2) << 1, 0).finished(), 0.0));
    auto soc = Cone::second_order(3);
    CHECK_FALSE(soc->contains((Vec(3) << 1, 0, 2).finished()));
    auto psd = Cone::psd(2);
    Vec near_psd = Cone::mat_to_svec((Mat(2, 2) << 1, 0, 0, -1e-12).finished());
    CHECK(psd->contains(near_psd, 1e-9));
}

TEST_CASE("spectral decompositions match the worked cases") {
    auto orth = Cone::orthant(2);
    auto sd = orth->spectral((Vec(2) << 3, -4).finished());
    CHECK(sd.eigenvalues[0] == 3);
    CHECK(sd.eigenvalues[1] == -4);

    auto soc = Cone::second_order(3);
    auto sd2 = soc->spectral((Vec(3) << 2, 1, 0).finished());
    CHECK(sd2.eigenvalues[0] == doctest::Approx(3));
    CHECK(sd2.eigenvalues[1] == doctest::Approx(1));
    CHECK((sd2.frame.col(0) - (Vec(3) << 0.5, 0.5, 0).finished()).norm() <= 1e-14);
    // Idempotency under the algebra product.
    Vec cc = soc->jordan_product(sd2.frame.col(0), sd2.frame.col(0));
    CHECK((cc - sd2.frame.col(0)).norm() <= 1e-14);

    auto psd = Cone::psd(2);
    auto sd3 = psd->spectral(Cone::mat_to_svec((Mat(2, 2) << 5, 0, 0, 2).finished()));
    CHECK(sd3.eigenvalues.minCoeff() == doctest::Approx(2));
    CHECK(sd3.eigenvalues.maxCoeff() == doctest::Approx(5));
}

TEST_CASE("lambda_e closed forms against the membership oracle") {
    auto orth = Cone::orthant(2);
    CHECK(orth->lambda_e((Vec(2) << 3, -4).finished()) == -4);
    auto psd = Cone::psd(2);
    CHECK(psd->lambda_e(Cone::mat_to_svec((Mat(2, 2) << 5, 0, 0, 2).finished())) ==
          doctest::Approx(2));
    std::mt19937_64 rng(1);
    for (const auto& k : test_cones()) {
        CHECK(k->lambda_e(k->identity()) == doctest::Approx(1.0));
        for (int t = 0; t < 20; ++t) {
            Vec x = k->random_element(rng);
            CHECK(k->lambda_e(x) == doctest::Approx(lambda_e_bisect(k, x)).epsilon(1e-9));
        }
    }
}

TEST_CASE("lambda_v: componentwise, empty, and v = e cases") {
    auto orth = Cone::orthant(2);
    CHECK(orth->lambda_v((Vec(2) << 2, 1).finished(), (Vec(2) << 1, 0).finished()) ==
          doctest::Approx(2));
    CHECK(orth->lambda_v((Vec(2) << 0, -1).finished(), (Vec(2) << 1, 0).finished()) ==
          -kInfinity);
    CHECK_THROWS_AS(orth->lambda_v((Vec(2) << 1, 1).finished(), (Vec(2) << -1, 0).finished()),
                    VNotInCone);
    std::mt19937_64 rng(2);
    for (const auto& k : test_cones()) {
        for (int t = 0; t < 10; ++t) {
            Vec x = k->random_element(rng);
            CHECK(k->lambda_v(x, k->identity()) == doctest::Approx(k->lambda_e(x)).epsilon(1e-8));
        }
    }
    // SOC: the bisection lands on the cone boundary (sup property): the
    // point x - lambda v is a member, x - (lambda + eps) v is not.
    auto soc = Cone::second_order(4);
    for (int t = 0; t < 40; ++t) {
        Vec x = soc->random_element(rng);
        Vec v = soc->project(soc->random_element(rng));
        if (v.norm() < 1e-6) continue;
        double lam = soc->lambda_v(x, v);
        if (!std::isfinite(lam)) continue;
        double scale = 1.0 + std::abs(lam);
        CHECK(soc->contains(x - (lam - 1e-7 * scale) * v, 1e-9 * scale));
        CHECK_FALSE(soc->contains(x - (lam + 1e-6 * scale) * v, 1e-12));
    }
}

TEST_CASE("identity and rank per kind") {
    CHECK((Cone::orthant(3)->identity() - Vec::Ones(3)).norm() == 0);
    CHECK(Cone::orthant(3)->rank() == 3);
    auto psd = Cone::psd(2);
    CHECK((Cone::svec_to_mat(psd->identity(), 2) - Mat::Identity(2, 2)).norm() <= 1e-15);
    CHECK(psd->rank() == 2);
    auto soc = Cone::second_order(4);
    CHECK(soc->identity()[0] == 1.0);
    CHECK(soc->identity().tail(3).norm() == 0.0);
    CHECK(soc->rank() == 2);
}

TEST_CASE("spectral frame identities on random elements") {
    std::mt19937_64 rng(4);
    for (const auto& k : test_cones()) {
        for (int t = 0; t < 200; ++t) {
            Vec x = k->random_element(rng);
            auto sd = k->spectral(x);
            // Reconstruction.
            Vec rec = Vec::Zero(k->ambient_dim());
            for (Index i = 0; i < sd.eigenvalues.size(); ++i)
                rec += sd.eigenvalues[i] * sd.frame.col(i);
            CHECK((rec - x).norm() <= 1e-9 * (1.0 + x.norm()));
            // Frame: idempotents, orthogonal products, sum = e.
            Vec sum = Vec::Zero(k->ambient_dim());
            for (Index i = 0; i < sd.frame.cols(); ++i) {
                sum += sd.frame.col(i);
                Vec ci = sd.frame.col(i);
                CHECK((k->jordan_product(ci, ci) - ci).norm() <= 1e-9);
                for (Index j = i + 1; j < sd.frame.cols(); ++j)
                    CHECK(k->jordan_product(ci, sd.frame.col(j)).norm() <= 1e-9);
            }
            CHECK((sum - k->identity()).norm() <= 1e-9);
            // trace(x) = sum of eigenvalues.
            CHECK(k->trace(x) == doctest::Approx(sd.eigenvalues.sum()).epsilon(1e-10));
            // Trace inner product consistency.
            Vec y = k->random_element(rng);
            CHECK(k->trace_inner(x, y) ==
                  doctest::Approx(k->trace(k->jordan_product(x, y))).epsilon(1e-10));
        }
    }
}

TEST_CASE("contains agrees with the lambda_e sign test") {
    std::mt19937_64 rng(6);
    for (const auto& k : test_cones()) {
        for (int t = 0; t < 100; ++t) {
            Vec x = k->random_element(rng);
            CHECK(k->contains(x, 0.0) == (k->lambda_e(x) >= 0.0));
        }
    }
}

TEST_CASE("Delta(K*) characterization: normalized dual elements") {
    std::mt19937_64 rng(8);
    for (const auto& k : test_cones()) {
        NormSpec dual = NormSpec::induced_e_dual(k);
        for (int t = 0; t < 50; ++t) {
            Vec u = k->project(k->random_element(rng));
            double s = u.dot(k->identity());
            if (s < 1e-9) continue;
            u /= s;
            CHECK(norm_eval(dual, u) == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
}

TEST_CASE("automorphism to identity: orthant, psd, soc, product") {
    auto orth = Cone::orthant(2);
    Mat p = orth->automorphism_to_identity((Vec(2) << 2, 1).finished());
    CHECK(p(0, 0) == doctest::Approx(0.5));
    CHECK(p(1, 1) == doctest::Approx(1.0));

    auto psd = Cone::psd(2);
    Vec x0 = Cone::mat_to_svec((Mat(2, 2) << 4, 0, 0, 1).finished());
    Mat pp = psd->automorphism_to_identity(x0);
    CHECK((pp * x0 - psd->identity()).norm() <= 1e-10);

    std::mt19937_64 rng(9);
    for (const auto& k : test_cones()) {
        Vec z = k->random_interior(rng);
        Mat a = k->automorphism_to_identity(z);
        CHECK((a * z - k->identity()).norm() <= 1e-9 * (1.0 + z.norm()));
        // Identity maps to itself for x0 = e.
        Mat ae = k->automorphism_to_identity(k->identity());
        CHECK((ae - Mat::Identity(k->ambient_dim(), k->ambient_dim())).cwiseAbs().maxCoeff() <=
              1e-9);
        // Cone preservation on samples, and invertibility.
        Eigen::FullPivLU<Mat> lu(a);
        REQUIRE(lu.isInvertible());
        CHECK((lu.solve(k->identity()) - z).norm() <= 1e-8 * (1.0 + z.norm()));
        for (int t = 0; t < 50; ++t) {
            Vec w = k->project(k->random_element(rng));
            CHECK(k->contains(Vec(a * w), 1e-8 * (1.0 + w.norm())));
        }
        CHECK_THROWS_AS(k->automorphism_to_identity(Vec::Zero(k->ambient_dim())), NotInterior);
    }
}

TEST_CASE("rotated 2-D family: geometry and duality") {
    auto k = Cone::rotated2d(M_PI / 6);
    Mat g = k->generators();
    for (Index j = 0; j < 2; ++j) CHECK(k->contains(Vec(g.col(j)), 1e-12));
    CHECK(k->contains((Vec(2) << 0, 1).finished(), 0.0));
    CHECK_FALSE(k->contains((Vec(2) << 1, 1).finished(), 1e-9));
    // Dual of the dual is the original.
    CHECK(std::abs(k->dual()->dual()->phi() - k->phi()) <= 1e-15);
    // Dual containment through the inner product definition.
    std::mt19937_64 rng(10);
    std::normal_distribution<double> gs(0.0, 1.0);
    auto kd = k->dual();
    for (int t = 0; t < 200; ++t) {
        Vec u(2);
        u << gs(rng), gs(rng);
        bool in_dual = kd->contains(u, 1e-10);
        bool pairing = u.dot(g.col(0)) >= -1e-10 && u.dot(g.col(1)) >= -1e-10;
        CHECK(in_dual == pairing);
    }
    CHECK_THROWS_AS(k->spectral((Vec(2) << 1, 1).finished()), UnsupportedCone);
}
