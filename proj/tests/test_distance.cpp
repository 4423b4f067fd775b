#include "mixhit/distance.hpp"
#include "mixhit/error.hpp"
#include "testing.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace mixhit;
using mixhit::testing::expm_oracle;

TEST(Distances, BasicNorms) {
    Vector pi(2), mu(2);
    pi << 0.5, 0.5;
    mu << 0.8, 0.2;
    EXPECT_NEAR(tv(mu, pi), 0.3, 1e-15);
    EXPECT_NEAR(separation(Distribution(mu), pi), 0.6, 1e-15);
    EXPECT_NEAR(lp_distance(Distribution(mu), pi, 1.0), 0.6, 1e-15);
    EXPECT_NEAR(lp_distance(Distribution(mu), pi, 2.0), 0.6, 1e-15);
    EXPECT_NEAR(lp_distance(Distribution(mu), pi, INFINITY), 0.6, 1e-15);
}

TEST(Distances, TwoStateProfile) {
    HeatKernel hk(two_state(0.5, 0.5));
    auto d0 = Distribution::point(2, 0);
    for (double t : {0.0, 0.5, 2.0, 7.0}) EXPECT_NEAR(distance_at(hk, d0, t), 0.5 * std::exp(-t), 1e-14);
    EXPECT_NEAR(t_mix_mu(hk, d0, 0.25), std::log(2.0), 1e-8);
    EXPECT_NEAR(t_mix(hk, 0.25), std::log(2.0), 1e-8);
}

TEST(Distances, AsymmetricTwoState) {
    // From 0: d(t) = p/(p+q) e^{-(p+q)t}.
    const double p = 0.2, q = 0.6;
    HeatKernel hk(two_state(p, q));
    auto d0 = Distribution::point(2, 0);
    for (double t : {0.1, 1.0, 3.0}) EXPECT_NEAR(distance_at(hk, d0, t), p / (p + q) * std::exp(-(p + q) * t), 1e-14);
    const double eps = 0.05;
    EXPECT_NEAR(t_mix_mu(hk, d0, eps), std::log(p / ((p + q) * eps)) / (p + q), 1e-8);
}

TEST(Distances, WorstCaseMatchesExponentialOracle) {
    for (const auto& chain : {random_tree(11, 4), biased_path(10, 0.7), aldous(3).chain}) {
        HeatKernel hk(chain);
        for (double mult : {0.2, 1.0, 3.0}) {
            const double t = mult * hk.t_rel();
            Matrix H = expm_oracle(chain, t);
            double want = 0.0;
            for (Eigen::Index x = 0; x < H.rows(); ++x)
                want = std::max(want, 0.5 * (H.row(x).transpose() - chain.pi()).cwiseAbs().sum());
            EXPECT_NEAR(worst_distance_at(hk, t), want, 1e-10);
        }
    }
}

TEST(Distances, TmixAntitoneAndSandwiched) {
    for (const auto& chain : {random_weights(10, 1), biased_path(15, 0.7), complete(6)}) {
        HeatKernel hk(chain);
        double prev = INFINITY;
        for (double eps : {0.01, 0.1, 0.25, 0.5, 0.9}) {
            double t = t_mix(hk, eps);
            EXPECT_LE(t, prev + 1e-12);
            prev = t;
            EXPECT_LE(worst_distance_at(hk, t), eps + 1e-9);
            if (t > time_tolerance(hk.t_rel())) EXPECT_GT(worst_distance_at(hk, t - 1e-6 * std::max(1.0, t)), eps - 1e-9);
        }
    }
}

TEST(Distances, EpsOutOfRange) {
    HeatKernel hk(complete(3));
    for (double bad : {0.0, 1.0, -0.2}) {
        try {
            t_mix(hk, bad);
            FAIL();
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), Errc::EpsOutOfRange);
        }
    }
}

TEST(Profiles, MonotoneAndRefined) {
    HeatKernel hk(biased_path(20, 0.7));
    auto prof = worst_case_profile(hk, 200.0, 40);
    ASSERT_EQ(prof.grid.size(), prof.values.size());
    EXPECT_GE(prof.grid.size(), 40u);
    for (std::size_t i = 1; i < prof.values.size(); ++i) {
        EXPECT_GT(prof.grid[i], prof.grid[i - 1]);
        EXPECT_LE(prof.values[i], prof.values[i - 1] + 1e-12);
    }
    auto mu = mixing_profile(hk, Distribution::point(21, 20), 200.0, 40);
    for (std::size_t i = 0; i < mu.values.size(); ++i)
        EXPECT_NEAR(mu.values[i], distance_at(hk, Distribution::point(21, 20), mu.grid[i]), 1e-10);
}

TEST(Parallel, SerialAndParallelRowsAreIdentical) {
    auto chain = random_weights(40, 9, 0.3);
    HeatKernel hk(chain);
    Matrix starts = Matrix::Identity(40, 40);
    Matrix a = propagate_rows(hk, starts, 2.5, Exec::Serial, 7);
    Matrix b = propagate_rows(hk, starts, 2.5, Exec::Parallel, 7);
    EXPECT_EQ((a - b).cwiseAbs().maxCoeff(), 0.0);
    std::size_t ia = 0, ib = 0;
    EXPECT_EQ(worst_distance_at(hk, 1.5, &ia, Exec::Serial), worst_distance_at(hk, 1.5, &ib, Exec::Parallel));
    EXPECT_EQ(ia, ib);
}
