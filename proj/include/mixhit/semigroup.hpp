#pragma once

#include "mixhit/sets.hpp"

#include <memory>
#include <mutex>
#include <vector>

namespace mixhit {

// exp(t (M - I)) for a nonnegative M with row sums <= 1, built from a
// Poisson series on a short base step and repeated squaring.  All
// arithmetic stays nonnegative, so small entries keep their relative
// accuracy no matter how spread out the stationary law is.
class DyadicSemigroup {
public:
    explicit DyadicSemigroup(Matrix m, double base_step = 0.5);

    const Matrix& generator_kernel() const { return m_; }
    std::size_t size() const { return static_cast<std::size_t>(m_.rows()); }

    // rows * exp(t (M - I))
    Matrix apply_rows(const Matrix& rows, double t) const;
    // exp(t (M - I)) * cols
    Matrix apply_cols(const Matrix& cols, double t) const;
    Matrix matrix(double t) const;

private:
    const Matrix& power(std::size_t j) const;  // exp(base * 2^j (M - I))
    Matrix short_rows(const Matrix& rows, double r) const;
    Matrix short_cols(const Matrix& cols, double r) const;

    Matrix m_;
    double base_;
    mutable std::vector<std::unique_ptr<Matrix>> powers_;
    mutable std::mutex mutex_;
};

}  // namespace mixhit
