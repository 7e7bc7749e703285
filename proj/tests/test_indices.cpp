#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "ispd/indices.hpp"
#include "ispd/rng.hpp"
#include "ispd/simgen.hpp"
#include "ispd/specfun.hpp"
#include "oracles.hpp"

using namespace ispd;

TEST_CASE("rounding onto the half-integer grid") {
    CHECK(ispd_round(0.5) == 50.0);
    CHECK(ispd_round(1.0) == 100.0);
    CHECK(ispd_round(0.0) == 0.0);
    // floor(200 * 0.97725 + 0.5)/2 = floor(195.95)/2.
    CHECK(ispd_round(0.97725) == 97.5);
    CHECK_THROWS_AS((void)ispd_round(-0.1), std::domain_error);
    CHECK_THROWS_AS((void)ispd_round(1.1), std::domain_error);

    // Monotone, on-grid, and complement-symmetric away from cell edges.
    RngStream rng(5);
    double prev = -1.0;
    for (double x = 0.0; x <= 1.0; x += 0.0005) {
        const double v = ispd_round(x);
        CHECK(v >= prev);
        CHECK(v == std::floor(v * 2.0 + 0.5) / 2.0);
        CHECK(v >= 0.0);
        CHECK(v <= 100.0);
        prev = v;
    }
    for (int i = 0; i < 2000; ++i) {
        const double x = rng.uniform_open();
        const double u = 200.0 * x + 0.5;
        if (std::abs(u - std::round(u)) < 1e-9) continue;  // boundary exception
        CHECK(ispd_round(1.0 - x) == 100.0 - ispd_round(x));
    }
}

TEST_CASE("scaled average") {
    const std::vector<double> zeros(10, 0.0);
    CHECK(scaled_average(zeros) == 0.0);
    const std::vector<double> ones(4, 1.0);
    CHECK(scaled_average(ones) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK_THROWS_AS((void)scaled_average(std::vector<double>{}),
                    std::invalid_argument);

    RngStream rng(3);
    std::vector<double> xs(37);
    for (auto& x : xs) x = rng.normal();
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    CHECK(scaled_average(xs) ==
          doctest::Approx(mean * std::sqrt(37.0)).epsilon(1e-14));
}

TEST_CASE("original index") {
    CHECK(ispd_original(0.0) == 50.0);
    // The worked two-department example: unrounded 97.72% / 2.28%.
    CHECK(ispd_original(2.0) == 97.5);
    // floor(200 * 0.0227501 + 0.5)/2 = floor(5.05)/2.
    CHECK(ispd_original(-2.0) == 2.5);
    CHECK(specfun::norm_cdf(2.0) * 100.0 ==
          doctest::Approx(97.72).epsilon(1e-4));
}

TEST_CASE("benchmark index with known sigma") {
    CHECK(ispd_theo(1.3, 1.0) == ispd_original(1.3));
    // rho = 0.05: N = 75 gives 82.19% -> 82.0; N = 150 gives 75.43% -> 75.5.
    const double s75 = std::sqrt(1.0 + 0.05 * 74.0);
    const double s150 = std::sqrt(1.0 + 0.05 * 149.0);
    CHECK(specfun::norm_cdf(2.0 / s75) ==
          doctest::Approx(0.8219).epsilon(1e-4));
    CHECK(ispd_theo(2.0, s75) == 82.0);
    CHECK(specfun::norm_cdf(2.0 / s150) ==
          doctest::Approx(0.7543).epsilon(1e-4));
    CHECK(ispd_theo(2.0, s150) == 75.5);
    // The transformation identity.
    for (double z : {-2.0, -0.3, 0.0, 1.1, 2.7}) {
        CHECK(ispd_theo(z, 2.3) == ispd_original(z / 2.3));
    }
    CHECK_THROWS_AS((void)ispd_theo(1.0, 0.0), std::domain_error);
}

TEST_CASE("non-parametric pairwise estimator") {
    CHECK(rho_np(std::vector<double>{1.0, 1.0}) ==
          doctest::Approx(1.0).epsilon(1e-15));
    CHECK(rho_np(std::vector<double>{1.0, -1.0}) ==
          doctest::Approx(-1.0).epsilon(1e-15));
    CHECK_THROWS_AS((void)rho_np(std::vector<double>{1.0}),
                    std::invalid_argument);

    // Algebraic identity (sum z)^2 = sum z^2 + sum_{i != i'} z_i z_{i'}.
    RngStream rng(9);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<double> zs(12);
        for (auto& z : zs) z = rng.normal();
        double direct = 0.0;
        for (std::size_t i = 0; i < zs.size(); ++i) {
            for (std::size_t j = 0; j < zs.size(); ++j) {
                if (i != j) direct += zs[i] * zs[j];
            }
        }
        direct /= 12.0 * 11.0;
        CHECK(rho_np(zs) == doctest::Approx(direct).epsilon(1e-12));
    }

    // Near-unbiasedness on generator output.
    const double target = 0.06;
    double mean = 0.0;
    const int depts = 1000, n = 80;
    for (int i = 0; i < depts; ++i) {
        RngStream rng_i = RngStream::substream(40, i);
        const auto scores =
            gen_scores(n, target, ScoreDist::vqr_2010_2014(), rng_i);
        mean += rho_np(scores);
    }
    mean /= depts;
    const double achieved = achieved_rho(triplet_select(target, n), n);
    CHECK(std::abs(mean - achieved) < 0.01);
}

TEST_CASE("non-parametric index clamps") {
    std::vector<double> flat(30, 0.0);
    CHECK(ispd_np(0.7, flat) == ispd_original(0.7));

    // Fully replicated scores with magnitude above one: clamped to rho 1,
    // index of the plain mean.
    std::vector<double> rep(25, 1.3);
    const double z = scaled_average(rep);
    CHECK(rho_np(rep) > 1.0);
    CHECK(ispd_np(z, rep) == ispd_original(z / std::sqrt(25.0)));
}

TEST_CASE("pooled intraclass estimator") {
    // All variance between groups.
    std::vector<std::vector<double>> between;
    for (int g = 0; g < 6; ++g) {
        between.push_back(std::vector<double>(10, static_cast<double>(g)));
    }
    CHECK(rho_rim(between) == doctest::Approx(1.0).epsilon(1e-9));

    // Fully independent scores: estimate near zero.
    RngStream rng(10);
    std::vector<std::vector<double>> iid;
    for (int g = 0; g < 60; ++g) {
        std::vector<double> s(100);
        for (auto& x : s) x = rng.normal();
        iid.push_back(std::move(s));
    }
    CHECK(std::abs(rho_rim(iid)) < 0.01);

    // Generator with a common correlation: pooled estimate recovers it.
    double est = 0.0;
    const int reps = 20;
    for (int rep = 0; rep < reps; ++rep) {
        std::vector<std::vector<double>> groups;
        for (int g = 0; g < 120; ++g) {
            RngStream rg = RngStream::substream(60, rep, g);
            groups.push_back(
                gen_scores(100, 0.05, ScoreDist::vqr_2010_2014(), rg));
        }
        est += rho_rim(groups);
    }
    est /= reps;
    CHECK(std::abs(est - 0.05) < 0.01);

    CHECK_THROWS_AS((void)rho_rim({{1.0, 1.0}}), std::invalid_argument);
    CHECK_THROWS_AS((void)rho_rim({{1.0, 1.0}, {1.0, 1.0}}),
                    std::invalid_argument);
}

TEST_CASE("intercept-based index") {
    CHECK(ispd_rim(0.8, 100, 0.0) == ispd_original(0.8));
    const double s = std::sqrt(1.0 + 0.05 * 74.0);
    CHECK(ispd_rim(2.0, 75, 0.05) == ispd_theo(2.0, s));
    double prev = -1.0;
    for (double z = -3.0; z <= 3.0; z += 0.2) {
        const double v = ispd_rim(z, 75, 0.05);
        CHECK(v >= prev);
        prev = v;
    }
}

TEST_CASE("model-based index") {
    const SizeContext ctx{130, 464};
    CHECK(ispd_fcm(1.1, ctx, {0.0, 0.0}) == ispd_original(1.1));
    const ModelTheta theta{3.752, -0.00376};
    CHECK(ispd_fcm(1.1, ctx, theta) ==
          ispd_theo(1.1, sigma_d(theta, ctx)));
}

TEST_CASE("all indices coincide when correlation vanishes") {
    std::vector<double> iid(50);
    RngStream rng(77);
    for (auto& x : iid) x = rng.normal();
    const double z = scaled_average(iid);
    const double orig = ispd_original(z);
    CHECK(ispd_theo(z, 1.0) == orig);
    CHECK(ispd_rim(z, 50, 0.0) == orig);
    CHECK(ispd_fcm(z, {50, 464}, {0.0, 0.0}) == orig);
}
