#include "mixhit/spectral.hpp"

#include "mixhit/error.hpp"

#include <cmath>
#include <limits>

namespace mixhit {

namespace {

void check_time(double t) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw Error(Errc::NegativeTime, "time must be finite and >= 0");
}

Vector decay(const SpectralData& spec, double t) {
    return ((spec.eigenvalues.array() - 1.0) * t).exp().matrix();
}

// log of the Poisson(t) weight at k
double log_poisson(double t, std::size_t k) {
    if (t == 0.0) return k == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
    return -t + static_cast<double>(k) * std::log(t) - std::lgamma(static_cast<double>(k) + 1.0);
}

}  // namespace

SpectralData decompose(const ReversibleChain& chain) {
    const auto n = static_cast<Eigen::Index>(chain.size());
    SpectralData spec;
    spec.pi_sqrt = chain.pi().cwiseSqrt();
    Matrix S(n, n);
    if (chain.weights()) {
        const Matrix& w = *chain.weights();
        Vector c = w.rowwise().sum().cwiseSqrt().cwiseInverse();
        S = c.asDiagonal() * w * c.asDiagonal();
    } else {
        S = spec.pi_sqrt.asDiagonal() * chain.kernel() * spec.pi_sqrt.cwiseInverse().asDiagonal();
    }
    S = 0.5 * (S + S.transpose()).eval();

    Eigen::SelfAdjointEigenSolver<Matrix> solver(S);
    if (solver.info() != Eigen::Success)
        throw Error(Errc::EigenFailure, "symmetric eigensolver did not converge (Eigen info " +
                                            std::to_string(static_cast<int>(solver.info())) + ")");
    spec.eigenvalues = solver.eigenvalues().reverse();
    spec.sym_vectors = solver.eigenvectors().rowwise().reverse();
    // Fix signs: the Perron vector is positive, others have their largest
    // entry positive (first index on ties).
    for (Eigen::Index k = 0; k < n; ++k) {
        auto col = spec.sym_vectors.col(k);
        Eigen::Index arg = 0;
        if (k == 0) {
            if (col.sum() < 0) col = -col;
            continue;
        }
        double best = -1.0;
        for (Eigen::Index i = 0; i < n; ++i)
            if (std::abs(col(i)) > best + 1e-14) {
                best = std::abs(col(i));
                arg = i;
            }
        if (col(arg) < 0) col = -col;
    }
    spec.basis = spec.pi_sqrt.cwiseInverse().asDiagonal() * spec.sym_vectors;
    if (std::abs(spec.eigenvalues(0) - 1.0) > 1e-10)
        throw Error(Errc::EigenFailure, "top eigenvalue deviates from 1");
    return spec;
}

double relaxation_time(const SpectralData& spec) {
    if (spec.eigenvalues.size() < 2) return 0.0;
    double gap = 1.0 - spec.eigenvalues(1);
    if (gap <= 0.0) throw Error(Errc::NotIrreducible, "spectral gap is not positive");
    return 1.0 / gap;
}

double basis_amplification(const SpectralData& spec) {
    return spec.pi_sqrt.maxCoeff() / spec.pi_sqrt.minCoeff();
}

Matrix heat_kernel_rows(const SpectralData& spec, const Matrix& starts, double t) {
    check_time(t);
    Matrix coeff = (starts * spec.pi_sqrt.cwiseInverse().asDiagonal()) * spec.sym_vectors;
    coeff = coeff * decay(spec, t).asDiagonal();
    return (coeff * spec.sym_vectors.transpose()) * spec.pi_sqrt.asDiagonal();
}

Distribution clamp_to_distribution(Vector v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (v(i) < -1e-9)
            throw Error(Errc::NumericalBreakdown, "reconstructed probability " + std::to_string(v(i)) +
                                                      " at index " + std::to_string(i));
        if (v(i) < 0.0) v(i) = 0.0;
    }
    v /= v.sum();
    return Distribution(std::move(v));
}

Distribution heat_kernel_apply(const SpectralData& spec, const Distribution& mu, double t) {
    if (mu.size() != static_cast<std::size_t>(spec.pi_sqrt.size()))
        throw Error(Errc::DimensionMismatch, "distribution length differs from the chain");
    check_time(t);
    if (t == 0.0) return mu;
    Matrix row = heat_kernel_rows(spec, mu.probs().transpose(), t);
    return clamp_to_distribution(row.row(0).transpose());
}

Vector heat_kernel_apply_function(const SpectralData& spec, const Vector& f, double t) {
    if (f.size() != spec.pi_sqrt.size()) throw Error(Errc::DimensionMismatch, "function length differs from the chain");
    check_time(t);
    Vector coeff = spec.basis.transpose() * (spec.pi_sqrt.cwiseProduct(spec.pi_sqrt).cwiseProduct(f));
    return spec.basis * decay(spec, t).cwiseProduct(coeff);
}

std::size_t poisson_truncation(double t, double tail_tol) {
    check_time(t);
    if (!(tail_tol > 0.0)) throw Error(Errc::InvalidArgument, "tail tolerance must be positive");
    if (t == 0.0) return 0;
    // For K + 2 > t the tail is dominated by a geometric series with ratio
    // t / (K + 2), which gives a rigorous bound from the next weight alone.
    auto K = static_cast<std::size_t>(std::floor(t));
    for (;; ++K) {
        double ratio = t / (static_cast<double>(K) + 2.0);
        if (ratio >= 1.0) continue;
        double bound = std::exp(log_poisson(t, K + 1)) / (1.0 - ratio);
        if (bound < tail_tol) return K;
    }
}

Distribution heat_kernel_oracle(const ReversibleChain& chain, const Distribution& mu, double t, double tail_tol) {
    if (mu.size() != chain.size()) throw Error(Errc::DimensionMismatch, "distribution length differs from the chain");
    std::size_t K = poisson_truncation(t, 0.5 * tail_tol);
    if (K == 0 && t == 0.0) return mu;
    Eigen::RowVectorXd power = mu.probs().transpose();
    Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(power.size());
    for (std::size_t k = 0; k <= K; ++k) {
        acc += std::exp(log_poisson(t, k)) * power;
        if (k < K) power = power * chain.kernel();
    }
    return Distribution(acc.transpose() / acc.sum());
}

}  // namespace mixhit
