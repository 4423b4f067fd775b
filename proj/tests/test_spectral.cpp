#include "mixhit/error.hpp"
#include "mixhit/heat_kernel.hpp"
#include "testing.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace mixhit;
using mixhit::testing::expm_oracle;

namespace {

std::vector<ReversibleChain> small_gallery() {
    return {two_state(0.3, 0.6), complete(5), biased_path(12, 0.6), random_tree(14, 5), random_weights(10, 8, 0.5),
            aldous(3).chain};
}

}  // namespace

TEST(Spectral, EigenvaluesOfKnownChains) {
    auto c = decompose(complete(4));
    EXPECT_NEAR(c.eigenvalues(0), 1.0, 1e-14);
    for (Eigen::Index k = 1; k < 4; ++k) EXPECT_NEAR(c.eigenvalues(k), 0.0, 1e-14);
    auto t = decompose(two_state(0.3, 0.6));
    EXPECT_NEAR(t.eigenvalues(1), 0.1, 1e-14);
    EXPECT_NEAR(relaxation_time(t), 1.0 / 0.9, 1e-13);
}

TEST(Spectral, BasisIsPiOrthonormal) {
    for (const auto& chain : small_gallery()) {
        auto s = decompose(chain);
        Matrix gram = s.basis.transpose() * chain.pi().asDiagonal() * s.basis;
        EXPECT_LE((gram - Matrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff(), 1e-9);
        for (Eigen::Index k = 1; k < s.eigenvalues.size(); ++k) EXPECT_LE(s.eigenvalues(k), s.eigenvalues(k - 1));
    }
}

TEST(HeatKernel, MatchesMatrixExponential) {
    for (const auto& chain : small_gallery()) {
        HeatKernel hk(chain);
        for (double mult : {0.1, 1.0, 10.0}) {
            const double t = mult * hk.t_rel();
            Matrix want = expm_oracle(chain, t);
            Matrix got = hk.matrix(t);
            EXPECT_LE((want - got).cwiseAbs().maxCoeff(), 1e-9) << chain.size() << " states, t=" << t;
        }
    }
}

TEST(HeatKernel, SpectralDyadicAndPoissonAgree) {
    for (const auto& chain : small_gallery()) {
        HeatKernel spec(chain, HeatMethod::Spectral), dy(chain, HeatMethod::Dyadic);
        for (double mult : {0.1, 1.0, 10.0}) {
            const double t = mult * spec.t_rel();
            for (std::size_t x = 0; x < chain.size(); x += 3) {
                auto mu = Distribution::point(chain.size(), x);
                auto a = spec.apply(mu, t).probs();
                auto b = dy.apply(mu, t).probs();
                auto c = heat_kernel_oracle(chain, mu, t, 1e-14).probs();
                EXPECT_LE((a - c).cwiseAbs().maxCoeff(), 1e-8);
                EXPECT_LE((b - c).cwiseAbs().maxCoeff(), 1e-8);
            }
        }
    }
}

TEST(HeatKernel, FunctionsAndMeasuresAreAdjoint) {
    auto chain = random_weights(9, 2);
    HeatKernel hk(chain);
    Vector f = Vector::LinSpaced(9, -1.0, 2.0);
    auto mu = Distribution::point(9, 4);
    const double t = 0.7 * hk.t_rel();
    EXPECT_NEAR(hk.apply(mu, t).probs().dot(f), hk.apply_function(f, t)(4), 1e-12);
}

TEST(HeatKernel, TwoStateClosedForm) {
    HeatKernel hk(two_state(0.5, 0.5));
    EXPECT_NEAR(hk.t_rel(), 1.0, 1e-14);
    for (double t : {0.0, 0.3, 1.0, 4.0}) {
        auto h = hk.apply(Distribution::point(2, 0), t);
        EXPECT_NEAR(h[0], 0.5 + 0.5 * std::exp(-t), 1e-14);
    }
}

TEST(HeatKernel, NegativeTimeRejected) {
    HeatKernel hk(complete(3));
    try {
        hk.apply(Distribution::point(3, 0), -1.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::NegativeTime);
    }
}

TEST(Poisson, TruncationTail) {
    // sum_{k > K} e^{-t} t^k / k! < tol at the returned K, and not at K - 1.
    for (double t : {0.5, 5.0, 50.0}) {
        const double tol = 1e-12;
        auto K = poisson_truncation(t, tol);
        double head = 0.0, term = std::exp(-t);
        for (std::size_t k = 0; k <= K; ++k) {
            head += term;
            term *= t / static_cast<double>(k + 1);
        }
        EXPECT_LT(1.0 - head, tol * 1.01 + 1e-15);
    }
}

TEST(Dyadic, SemigroupProperty) {
    auto chain = biased_path(20, 0.65);
    DyadicSemigroup d(chain.kernel());
    Matrix a = d.matrix(3.0) * d.matrix(4.5);
    EXPECT_LE((a - d.matrix(7.5)).cwiseAbs().maxCoeff(), 1e-12);
}
