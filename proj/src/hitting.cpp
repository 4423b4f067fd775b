#include "mixhit/hitting.hpp"

#include "mixhit/error.hpp"

#include <cmath>

namespace mixhit {

namespace {

void check_p(double p) {
    if (!(p > 0.0 && p < 1.0)) throw Error(Errc::POutOfRange, "p must lie in (0, 1)");
}

Matrix sub_matrix(const Matrix& m, const StateSet& rows, const StateSet& cols) {
    Matrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j)
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                m(static_cast<Eigen::Index>(rows[i]), static_cast<Eigen::Index>(cols[j]));
    return out;
}

template <class F>
double first_time_at_most(F value, double level, double tol, double start) {
    if (value(0.0) <= level) return 0.0;
    double lo = 0.0, hi = std::max(start, tol);
    while (value(hi) > level) {
        if (hi > 1e13) throw Error(Errc::NumericalBreakdown, "survival does not fall below the level");
        lo = hi;
        hi *= 2.0;
    }
    while (hi - lo > tol) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (value(mid) > level) lo = mid;
        else hi = mid;
    }
    return hi;
}

}  // namespace

double ExpSum::operator()(double t) const {
    double s = coeff.dot((-t * rates.array()).exp().matrix());
    return std::clamp(s, 0.0, 1.0);
}

KilledChain::KilledChain(const ReversibleChain& chain, StateSet target, HeatMethod method)
    : n_(chain.size()), target_(make_set(std::move(target), chain.size())), method_(method) {
    if (target_.empty()) throw Error(Errc::EmptyTarget, "target set is empty");
    alive_ = complement(target_, n_);
    if (alive_.empty()) {
        method_ = HeatMethod::Spectral;
        return;
    }
    Vector pi_alive(static_cast<Eigen::Index>(alive_.size()));
    for (std::size_t i = 0; i < alive_.size(); ++i)
        pi_alive(static_cast<Eigen::Index>(i)) = chain.pi()(static_cast<Eigen::Index>(alive_[i]));
    sqrt_pi_ = pi_alive.cwiseSqrt();
    if (method_ == HeatMethod::Auto)
        method_ = std::sqrt(pi_alive.maxCoeff() / pi_alive.minCoeff()) <= kSpectralAmplificationLimit
                      ? HeatMethod::Spectral
                      : HeatMethod::Dyadic;
    Matrix M = sub_matrix(chain.kernel(), alive_, alive_);
    if (method_ == HeatMethod::Dyadic) {
        dyadic_ = std::make_shared<const DyadicSemigroup>(std::move(M));
        return;
    }
    Matrix S;
    if (chain.weights()) {
        Vector c = chain.weights()->rowwise().sum();
        Vector cs(static_cast<Eigen::Index>(alive_.size()));
        for (std::size_t i = 0; i < alive_.size(); ++i)
            cs(static_cast<Eigen::Index>(i)) = 1.0 / std::sqrt(c(static_cast<Eigen::Index>(alive_[i])));
        S = cs.asDiagonal() * sub_matrix(*chain.weights(), alive_, alive_) * cs.asDiagonal();
    } else {
        S = sqrt_pi_.asDiagonal() * M * sqrt_pi_.cwiseInverse().asDiagonal();
    }
    S = 0.5 * (S + S.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> solver(S);
    if (solver.info() != Eigen::Success) throw Error(Errc::EigenFailure, "killed-chain eigensolver failed");
    rates_ = (1.0 - solver.eigenvalues().array()).max(0.0).matrix();
    psi_ = solver.eigenvectors();
    mass_ = psi_.transpose() * sqrt_pi_;
}

Vector KilledChain::restrict(const Vector& full) const {
    Vector out(static_cast<Eigen::Index>(alive_.size()));
    for (std::size_t i = 0; i < alive_.size(); ++i)
        out(static_cast<Eigen::Index>(i)) = full(static_cast<Eigen::Index>(alive_[i]));
    return out;
}

Vector KilledChain::extend(const Vector& part) const {
    Vector out = Vector::Zero(static_cast<Eigen::Index>(n_));
    for (std::size_t i = 0; i < alive_.size(); ++i)
        out(static_cast<Eigen::Index>(alive_[i])) = part(static_cast<Eigen::Index>(i));
    return out;
}

Vector KilledChain::survival_all(double t) const {
    if (!(t >= 0.0)) throw Error(Errc::NegativeTime, "time must be >= 0");
    if (alive_.empty()) return Vector::Zero(static_cast<Eigen::Index>(n_));
    Vector part;
    if (method_ == HeatMethod::Dyadic) {
        part = dyadic_->apply_cols(Vector::Ones(static_cast<Eigen::Index>(alive_.size())), t).col(0);
    } else {
        Vector e = (-t * rates_.array()).exp().matrix().cwiseProduct(mass_);
        part = sqrt_pi_.cwiseInverse().cwiseProduct(psi_ * e);
    }
    return extend(part.cwiseMax(0.0).cwiseMin(1.0));
}

double KilledChain::survival(const Distribution& mu, double t) const {
    if (mu.size() != n_) throw Error(Errc::DimensionMismatch, "distribution length differs from the chain");
    if (!(t >= 0.0)) throw Error(Errc::NegativeTime, "time must be >= 0");
    if (alive_.empty()) return 0.0;
    Vector m = restrict(mu.probs());
    if (m.sum() == 0.0) return 0.0;
    if (method_ == HeatMethod::Dyadic) {
        double s = dyadic_->apply_rows(m.transpose(), t).sum();
        return std::clamp(s, 0.0, 1.0);
    }
    return survival_curve(mu)(t);
}

ExpSum KilledChain::survival_curve(const Distribution& mu) const {
    if (method_ != HeatMethod::Spectral) throw Error(Errc::InvalidArgument, "survival curve needs the spectral method");
    if (alive_.empty()) return {Vector::Zero(1), Vector::Zero(1)};
    Vector m = restrict(mu.probs());
    Vector proj = psi_.transpose() * m.cwiseQuotient(sqrt_pi_);
    return {proj.cwiseProduct(mass_), rates_};
}

double survival(const ReversibleChain& chain, const Distribution& mu, const StateSet& A, double t) {
    return KilledChain(chain, A).survival(mu, t);
}

Vector expected_hitting_all(const ReversibleChain& chain, const StateSet& A_in) {
    StateSet A = make_set(A_in, chain.size());
    if (A.empty()) throw Error(Errc::EmptyTarget, "target set is empty");
    StateSet alive = complement(A, chain.size());
    Vector out = Vector::Zero(static_cast<Eigen::Index>(chain.size()));
    if (alive.empty()) return out;
    const auto m = static_cast<Eigen::Index>(alive.size());
    Matrix IM = Matrix::Identity(m, m) - sub_matrix(chain.kernel(), alive, alive);
    Vector h = IM.partialPivLu().solve(Vector::Ones(m));
    for (Eigen::Index i = 0; i < m; ++i) out(static_cast<Eigen::Index>(alive[static_cast<std::size_t>(i)])) = h(i);
    return out;
}

double expected_hitting(const ReversibleChain& chain, const Distribution& mu, const StateSet& A) {
    if (mu.size() != chain.size()) throw Error(Errc::DimensionMismatch, "distribution length differs from the chain");
    return mu.probs().dot(expected_hitting_all(chain, A));
}

double hitting_quantile(const KilledChain& killed, const Distribution& mu, double p, double t_rel) {
    check_p(p);
    double tol = 1e-9 * std::max(1.0, t_rel);
    if (killed.method() == HeatMethod::Spectral) {
        ExpSum curve = killed.survival_curve(mu);
        return first_time_at_most(curve, p, tol, std::max(1.0, t_rel));
    }
    return first_time_at_most([&](double t) { return killed.survival(mu, t); }, p, tol, std::max(1.0, t_rel));
}

double hitting_quantile(const ReversibleChain& chain, const Distribution& mu, const StateSet& A, double p) {
    check_p(p);
    return hitting_quantile(KilledChain(chain, A), mu, p, relaxation_time(decompose(chain)));
}

double worst_start_quantile(const KilledChain& killed, double p, double t_rel) {
    check_p(p);
    double tol = 1e-9 * std::max(1.0, t_rel);
    return first_time_at_most([&](double t) { return killed.survival_all(t).maxCoeff(); }, p, tol,
                              std::max(1.0, t_rel));
}

double bd_expected_step(const Matrix& weights, std::size_t r) {
    const auto n = weights.rows();
    if (weights.cols() != n) throw Error(Errc::DimensionMismatch, "weights must be square");
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            if (std::abs(i - j) > 1 && weights(i, j) != 0.0)
                throw Error(Errc::NotBirthDeath, "weight between non-neighbours " + std::to_string(i) + " and " +
                                                     std::to_string(j));
    auto rr = static_cast<Eigen::Index>(r);
    if (rr + 1 >= n) throw Error(Errc::IndexOutOfRange, "r must be below the top state");
    double edge = weights(rr, rr + 1);
    if (!(edge > 0.0)) throw Error(Errc::NotBirthDeath, "edge (r, r+1) carries no weight");
    double total = 0.0;
    for (Eigen::Index k = rr + 1; k < n; ++k) total += weights.row(k).sum();
    return total / edge;
}

}  // namespace mixhit
