#pragma once

#include "mixhit/heat_kernel.hpp"

#include <memory>

namespace mixhit {

// Survival sum_k coeff_k exp(-t rate_k).
struct ExpSum {
    Vector coeff;
    Vector rates;
    double operator()(double t) const;
};

// The chain killed on entering `target`: P restricted to the complement.
class KilledChain {
public:
    KilledChain(const ReversibleChain& chain, StateSet target, HeatMethod method = HeatMethod::Auto);

    const StateSet& target() const { return target_; }
    const StateSet& alive() const { return alive_; }
    HeatMethod method() const { return method_; }

    // P_mu[T_A > t]
    double survival(const Distribution& mu, double t) const;
    // P_x[T_A > t] for every state (zero on the target)
    Vector survival_all(double t) const;
    // Spectral representation of t -> P_mu[T_A > t]; Spectral method only.
    ExpSum survival_curve(const Distribution& mu) const;

    // restriction of a full-length vector to alive states, and back
    Vector restrict(const Vector& full) const;
    Vector extend(const Vector& part) const;

private:
    std::size_t n_;
    StateSet target_;
    StateSet alive_;
    HeatMethod method_;
    Vector sqrt_pi_;     // on alive states
    Vector rates_;       // 1 - theta_k
    Matrix psi_;         // orthonormal eigenvectors of the symmetrised restriction
    Vector mass_;        // psi_k . sqrt(pi)
    std::shared_ptr<const DyadicSemigroup> dyadic_;
};

double survival(const ReversibleChain& chain, const Distribution& mu, const StateSet& A, double t);

// E_x[T_A] for every x (zero on A), by solving (I - P)|_{A^c} h = 1.
Vector expected_hitting_all(const ReversibleChain& chain, const StateSet& A);
double expected_hitting(const ReversibleChain& chain, const Distribution& mu, const StateSet& A);

double hitting_quantile(const ReversibleChain& chain, const Distribution& mu, const StateSet& A, double p);
double hitting_quantile(const KilledChain& killed, const Distribution& mu, double p, double t_rel);

// inf{t : max_x P_x[T_A > t] <= p}
double worst_start_quantile(const KilledChain& killed, double p, double t_rel);

// Birth-death closed form for E_{r+1}[T_r] from tridiagonal weights.
double bd_expected_step(const Matrix& weights, std::size_t r);

}  // namespace mixhit
