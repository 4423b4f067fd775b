#pragma once

#include "mixhit/semigroup.hpp"
#include "mixhit/spectral.hpp"

#include <memory>

namespace mixhit {

enum class HeatMethod { Spectral, Dyadic, Auto };

const char* method_name(HeatMethod m);

// Above this basis amplification Auto switches from the eigenbasis to the
// dyadic semigroup.
inline constexpr double kSpectralAmplificationLimit = 1e4;

// Evaluates H_t on measures and functions for one chain.  The spectral
// data is always computed (it supplies t_rel); the dyadic semigroup is
// used for ill-conditioned chains.
class HeatKernel {
public:
    explicit HeatKernel(ReversibleChain chain, HeatMethod method = HeatMethod::Auto);

    const ReversibleChain& chain() const { return *chain_; }
    const SpectralData& spectral() const { return *spec_; }
    HeatMethod method() const { return method_; }
    double t_rel() const { return t_rel_; }
    std::size_t size() const { return chain_->size(); }

    Distribution apply(const Distribution& mu, double t) const;
    Vector apply_function(const Vector& f, double t) const;
    // starts * H_t for a block of row measures
    Matrix rows(const Matrix& starts, double t) const;
    Matrix matrix(double t) const;

private:
    std::shared_ptr<const ReversibleChain> chain_;
    std::shared_ptr<const SpectralData> spec_;
    std::shared_ptr<const DyadicSemigroup> dyadic_;
    HeatMethod method_;
    double t_rel_;
};

}  // namespace mixhit
