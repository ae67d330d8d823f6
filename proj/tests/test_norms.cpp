#include <doctest.h>

#include <cmath>
#include <random>

#include "concord/norms.hpp"

using namespace concord;

TEST_CASE("induced norms over the orthant are linf and l1") {
    auto k = Cone::orthant(2);
    Vec x(2);
    x << 3, -4;
    CHECK(norm_eval(NormSpec::induced_e(k), x) == doctest::Approx(4.0));
    CHECK(norm_eval(NormSpec::induced_e_dual(k), x) == doctest::Approx(7.0));
    CHECK(norm_eval(NormSpec::l2(), Vec::Zero(2)) == 0.0);
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int t = 0; t < 100; ++t) {
        Vec v(2);
        v << g(rng), g(rng);
        CHECK(std::abs(norm_eval(NormSpec::induced_e(k), v) - v.lpNorm<Eigen::Infinity>()) <=
              1e-12);
        CHECK(std::abs(norm_eval(NormSpec::induced_e_dual(k), v) - v.lpNorm<1>()) <= 1e-12);
    }
}

TEST_CASE("psd induced norms are the spectral and nuclear norms") {
    auto k = Cone::psd(2);
    Vec d12 = Cone::mat_to_svec((Mat(2, 2) << 1, 0, 0, 2).finished());
    CHECK(dual_norm_eval(NormSpec::induced_e(k), d12) == doctest::Approx(3.0));  // trace
    CHECK(norm_eval(NormSpec::induced_e(k), d12) == doctest::Approx(2.0));
    std::mt19937_64 rng(2);
    for (int t = 0; t < 50; ++t) {
        Vec x = k->random_element(rng);
        auto sd = k->spectral(x);
        CHECK(norm_eval(NormSpec::induced_e(k), x) ==
              doctest::Approx(sd.eigenvalues.cwiseAbs().maxCoeff()).epsilon(1e-10));
        CHECK(norm_eval(NormSpec::induced_e_dual(k), x) ==
              doctest::Approx(sd.eigenvalues.cwiseAbs().sum()).epsilon(1e-10));
    }
}

TEST_CASE("duals: l1 <-> linf, l2 self-dual") {
    Vec u(2);
    u << 3, -4;
    CHECK(dual_norm_eval(NormSpec::l1(), u) == doctest::Approx(4.0));
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int t = 0; t < 50; ++t) {
        Vec v(4);
        for (Index i = 0; i < 4; ++i) v[i] = g(rng);
        CHECK(dual_norm_eval(NormSpec::l2(), v) == doctest::Approx(norm_eval(NormSpec::l2(), v)));
    }
}

TEST_CASE("dual of dual evaluates identically on samples") {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<NormSpec> specs = {NormSpec::l1(), NormSpec::l2(), NormSpec::linf(),
                                   NormSpec::induced_e(Cone::second_order(4)),
                                   NormSpec::induced_e_dual(Cone::psd(2))};
    for (const auto& spec : specs) {
        Index n = spec.cone ? spec.cone->ambient_dim() : 4;
        for (int t = 0; t < 60; ++t) {
            Vec x(n);
            for (Index i = 0; i < n; ++i) x[i] = g(rng);
            CHECK(norm_eval(dual_spec(dual_spec(spec)), x) ==
                  doctest::Approx(norm_eval(spec, x)).epsilon(1e-9));
        }
    }
}

TEST_CASE("Hoelder inequality on samples, all pairings") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<NormSpec> specs = {NormSpec::l1(), NormSpec::l2(), NormSpec::linf(),
                                   NormSpec::induced_e(Cone::orthant(4)),
                                   NormSpec::induced_e(Cone::second_order(4)),
                                   NormSpec::induced_e_dual(Cone::second_order(4))};
    for (const auto& spec : specs) {
        for (int t = 0; t < 200; ++t) {
            Vec x(4), u(4);
            for (Index i = 0; i < 4; ++i) {
                x[i] = g(rng);
                u[i] = g(rng);
            }
            CHECK(std::abs(u.dot(x)) <=
                  dual_norm_eval(spec, u) * norm_eval(spec, x) + 1e-10);
        }
    }
}

TEST_CASE("triangle inequality and homogeneity on samples") {
    std::mt19937_64 rng(6);
    std::normal_distribution<double> g(0.0, 1.0);
    auto k = Cone::second_order(4);
    for (const auto& spec : {NormSpec::induced_e(k), NormSpec::induced_e_dual(k)}) {
        for (int t = 0; t < 100; ++t) {
            Vec x(4), y(4);
            for (Index i = 0; i < 4; ++i) {
                x[i] = g(rng);
                y[i] = g(rng);
            }
            CHECK(norm_eval(spec, x + y) <= norm_eval(spec, x) + norm_eval(spec, y) + 1e-10);
            CHECK(norm_eval(spec, -2.5 * x) == doctest::Approx(2.5 * norm_eval(spec, x)));
        }
    }
}

TEST_CASE("induced-E defining minimization agrees with the spectral value") {
    // Cross-check max|lambda| against min{a >= 0 : x + a e, -x + a e in K}.
    std::mt19937_64 rng(7);
    for (const auto& k : {Cone::second_order(4), Cone::psd(2)}) {
        for (int t = 0; t < 40; ++t) {
            Vec x = k->random_element(rng);
            double spec_val = norm_eval(NormSpec::induced_e(k), x);
            double lo = 0, hi = 2 * spec_val + 1;
            auto ok = [&](double a) {
                return k->contains(x + a * k->identity(), 1e-12) &&
                       k->contains(-x + a * k->identity(), 1e-12);
            };
            for (int it = 0; it < 100; ++it) {
                double mid = 0.5 * (lo + hi);
                (ok(mid) ? hi : lo) = mid;
            }
            CHECK(hi == doctest::Approx(spec_val).epsilon(1e-8));
        }
    }
}

TEST_CASE("ball vertices: segment, square, diagonal") {
    Mat b(2, 1);
    b << 2, 1;
    auto seg = ball_vertices(NormSpec::l1(), Subspace(Mat(b / b.norm())));
    REQUIRE(seg.size() == 2);
    CHECK((seg[1] - (Vec(2) << 2.0 / 3, 1.0 / 3).finished()).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK((seg[0] + seg[1]).norm() <= 1e-12);

    auto square = ball_vertices_full(NormSpec::linf(), 2);
    CHECK(square.size() == 4);

    Mat d(2, 1);
    d << 1, 1;
    auto diag = ball_vertices(NormSpec::linf(), Subspace(Mat(d / d.norm())));
    REQUIRE(diag.size() == 2);
    CHECK((diag[1] - (Vec(2) << 1, 1).finished()).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("ball vertices lie on the sphere and inside the subspace") {
    std::mt19937_64 rng(8);
    for (int t = 0; t < 10; ++t) {
        Index n = 4 + static_cast<Index>(rng() % 2);
        Subspace s = random_subspace(n, 2, rng);
        for (const auto& spec : {NormSpec::l1(), NormSpec::linf()}) {
            auto verts = ball_vertices(spec, s);
            REQUIRE(!verts.empty());
            for (const Vec& v : verts) {
                CHECK(norm_eval(spec, v) == doctest::Approx(1.0).epsilon(1e-9));
                CHECK((v - s.project(v)).norm() <= 1e-9);
            }
        }
    }
}

TEST_CASE("non-polyhedral sections are rejected") {
    std::mt19937_64 rng(9);
    Subspace s = random_subspace(4, 2, rng);
    CHECK_THROWS_AS(ball_vertices(NormSpec::l2(), s), NonPolyhedralNorm);
    CHECK_THROWS_AS(ball_vertices(NormSpec::induced_e(Cone::second_order(4)), s),
                    NonPolyhedralNorm);
    CHECK_THROWS_AS(norm_eval(NormSpec{NormSpec::Kind::InducedE, nullptr}, Vec::Zero(4)),
                    MissingCone);
}
