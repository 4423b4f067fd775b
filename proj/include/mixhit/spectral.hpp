#pragma once

#include "mixhit/chain.hpp"

namespace mixhit {

struct SpectralData {
    Vector eigenvalues;  // descending
    Matrix basis;        // column k is f_k, orthonormal in L2(pi)
    Vector pi_sqrt;
    Matrix sym_vectors;  // orthonormal eigenvectors of D^{1/2} P D^{-1/2}
};

SpectralData decompose(const ReversibleChain& chain);

// 1/(1 - lambda_2); zero for a one-state chain.
double relaxation_time(const SpectralData& spec);

// sqrt(max pi / min pi): the factor by which eigenvector round-off is
// magnified when the basis is unscaled at the lightest state.
double basis_amplification(const SpectralData& spec);

Distribution heat_kernel_apply(const SpectralData& spec, const Distribution& mu, double t);
Vector heat_kernel_apply_function(const SpectralData& spec, const Vector& f, double t);

// Rows of starts * H_t, with no clamping.
Matrix heat_kernel_rows(const SpectralData& spec, const Matrix& starts, double t);

// Truncated Poisson mixture of kernel powers.
Distribution heat_kernel_oracle(const ReversibleChain& chain, const Distribution& mu, double t,
                                double tail_tol);

// Smallest K with sum_{k>K} e^{-t} t^k / k! < tail_tol.
std::size_t poisson_truncation(double t, double tail_tol);

// Turn a numerically computed measure into a Distribution: entries down
// to -1e-9 are clamped to zero, then the vector is renormalised.
Distribution clamp_to_distribution(Vector v);

}  // namespace mixhit
