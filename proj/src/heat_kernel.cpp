#include "mixhit/heat_kernel.hpp"

#include "mixhit/error.hpp"

namespace mixhit {

const char* method_name(HeatMethod m) {
    switch (m) {
        case HeatMethod::Spectral: return "spectral";
        case HeatMethod::Dyadic: return "dyadic";
        case HeatMethod::Auto: return "auto";
    }
    return "?";
}

HeatKernel::HeatKernel(ReversibleChain chain, HeatMethod method)
    : chain_(std::make_shared<const ReversibleChain>(std::move(chain))),
      spec_(std::make_shared<const SpectralData>(decompose(*chain_))),
      method_(method),
      t_rel_(relaxation_time(*spec_)) {
    if (method_ == HeatMethod::Auto)
        method_ = basis_amplification(*spec_) <= kSpectralAmplificationLimit ? HeatMethod::Spectral
                                                                             : HeatMethod::Dyadic;
    if (method_ == HeatMethod::Dyadic) dyadic_ = std::make_shared<const DyadicSemigroup>(chain_->kernel());
}

Distribution HeatKernel::apply(const Distribution& mu, double t) const {
    if (method_ == HeatMethod::Spectral) return heat_kernel_apply(*spec_, mu, t);
    if (mu.size() != size()) throw Error(Errc::DimensionMismatch, "distribution length differs from the chain");
    Matrix row = dyadic_->apply_rows(mu.probs().transpose(), t);
    return clamp_to_distribution(row.row(0).transpose());
}

Vector HeatKernel::apply_function(const Vector& f, double t) const {
    if (method_ == HeatMethod::Spectral) return heat_kernel_apply_function(*spec_, f, t);
    if (f.size() != static_cast<Eigen::Index>(size()))
        throw Error(Errc::DimensionMismatch, "function length differs from the chain");
    // Split into positive and negative parts so every product is nonnegative.
    Matrix parts(f.size(), 2);
    parts.col(0) = f.cwiseMax(0.0);
    parts.col(1) = (-f).cwiseMax(0.0);
    Matrix out = dyadic_->apply_cols(parts, t);
    return out.col(0) - out.col(1);
}

Matrix HeatKernel::rows(const Matrix& starts, double t) const {
    if (starts.cols() != static_cast<Eigen::Index>(size()))
        throw Error(Errc::DimensionMismatch, "start block width differs from the chain");
    if (method_ == HeatMethod::Spectral) return heat_kernel_rows(*spec_, starts, t);
    return dyadic_->apply_rows(starts, t);
}

Matrix HeatKernel::matrix(double t) const {
    return rows(Matrix::Identity(static_cast<Eigen::Index>(size()), static_cast<Eigen::Index>(size())), t);
}

}  // namespace mixhit
