#include "mixhit/error.hpp"
#include "mixhit/hitting.hpp"
#include "testing.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace mixhit;
using mixhit::testing::hitting_oracle;

namespace {

// Adaptive Simpson on [a, b].
template <typename F>
double simpson(F f, double a, double b, double fa, double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b), lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm), right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol) return left + right + (left + right - whole) / 15.0;
    return simpson(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) + simpson(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

template <typename F>
double integrate(F f, double a, double b, double tol) {
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    return simpson(f, a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), tol, 40);
}

}  // namespace

TEST(Hitting, TwoStateClosedForms) {
    auto chain = two_state(0.5, 0.5);
    auto d0 = Distribution::point(2, 0);
    EXPECT_NEAR(expected_hitting(chain, d0, {1}), 2.0, 1e-12);
    for (double t : {0.0, 1.0, 3.0}) EXPECT_NEAR(survival(chain, d0, {1}, t), std::exp(-t / 2.0), 1e-13);
    EXPECT_NEAR(hitting_quantile(chain, d0, {1}, 0.25), 2.0 * std::log(4.0), 1e-8);
}

TEST(Hitting, LinearSolveMatchesOracle) {
    for (const auto& chain : {random_weights(12, 3, 0.4), random_tree(15, 6), aldous(4).chain}) {
        StateSet A{0, 5};
        Vector got = expected_hitting_all(chain, A);
        Vector want = hitting_oracle(chain.kernel(), A);
        EXPECT_LE(((got - want).array() / want.array().max(1.0)).abs().maxCoeff(), 1e-10);
    }
}

TEST(Hitting, SurvivalIntegratesToExpectation) {
    for (const auto& chain : {random_weights(8, 4), biased_path(9, 0.6)}) {
        StateSet A{0};
        auto mu = Distribution::point(chain.size(), chain.size() - 1);
        KilledChain k(chain, A);
        const double E = expected_hitting(chain, mu, A);
        // Integrate to where the tail is negligible, then add the exponential remainder.
        double T = 1.0;
        while (k.survival(mu, T) > 1e-13) T *= 2.0;
        const double I = integrate([&](double t) { return k.survival(mu, t); }, 0.0, T, 1e-10 * E);
        EXPECT_NEAR(I, E, 1e-8 * E);
    }
}

TEST(Hitting, SpectralAndDyadicSurvivalAgree) {
    for (const auto& chain : {random_tree(14, 2), biased_path(20, 0.7), aldous(3).chain}) {
        KilledChain a(chain, {0}, HeatMethod::Spectral), b(chain, {0}, HeatMethod::Dyadic);
        HeatKernel hk(chain);
        for (double mult : {0.0, 0.3, 1.0, 5.0, 20.0}) {
            const double t = mult * hk.t_rel();
            EXPECT_LE((a.survival_all(t) - b.survival_all(t)).cwiseAbs().maxCoeff(), 1e-8);
        }
    }
}

TEST(Hitting, AntitoneInTheTarget) {
    auto chain = random_weights(10, 11, 0.5);
    auto mu = Distribution::point(10, 9);
    StateSet A{0}, B{0, 3}, C{0, 3, 7};
    const double ea = expected_hitting(chain, mu, A), eb = expected_hitting(chain, mu, B),
                 ec = expected_hitting(chain, mu, C);
    EXPECT_GE(ea, eb);
    EXPECT_GE(eb, ec);
    for (double t : {0.5, 2.0, 10.0}) {
        EXPECT_GE(survival(chain, mu, A, t) + 1e-14, survival(chain, mu, B, t));
        EXPECT_GE(survival(chain, mu, B, t) + 1e-14, survival(chain, mu, C, t));
    }
}

TEST(Hitting, QuantilesInvertSurvival) {
    auto chain = random_tree(12, 8);
    KilledChain k(chain, {2});
    HeatKernel hk(chain);
    auto mu = Distribution::point(12, 11);
    for (double p : {0.9, 0.5, 0.1}) {
        double q = hitting_quantile(k, mu, p, hk.t_rel());
        EXPECT_NEAR(k.survival(mu, q), p, 1e-7);
        double w = worst_start_quantile(k, p, hk.t_rel());
        EXPECT_LE(k.survival_all(w).maxCoeff(), p + 1e-7);
        EXPECT_GE(w, q - 1e-9);
    }
}

TEST(BirthDeath, UnitPathAndBiasedPath) {
    Matrix w = Matrix::Zero(3, 3);
    w(0, 1) = w(1, 0) = w(1, 2) = w(2, 1) = 1.0;
    EXPECT_NEAR(bd_expected_step(w, 0), 3.0, 1e-14);
    EXPECT_NEAR(hitting_oracle(w.rowwise().sum().cwiseInverse().asDiagonal() * w, {0})(1), 3.0, 1e-12);

    auto chain = biased_path(30, 2.0 / 3.0);
    Matrix W = chain.pi().asDiagonal() * chain.kernel();
    for (std::size_t r : {0u, 10u, 28u}) {
        Vector e = expected_hitting_all(chain, {r});
        EXPECT_NEAR(bd_expected_step(W, r), e(static_cast<Eigen::Index>(r + 1)), 1e-9 * e(static_cast<Eigen::Index>(r + 1)));
    }
}

TEST(BirthDeath, RejectsLongEdges) {
    Matrix w = Matrix::Ones(3, 3);
    try {
        bd_expected_step(w, 0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::NotBirthDeath);
    }
}

TEST(Hitting, EmptyTargetAndBadP) {
    auto chain = complete(3);
    try {
        expected_hitting_all(chain, {});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::EmptyTarget);
    }
    try {
        hitting_quantile(chain, Distribution::point(3, 0), {1}, 1.5);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::POutOfRange);
    }
}
