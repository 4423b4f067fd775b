#include "mixhit/semigroup.hpp"

#include "mixhit/error.hpp"

#include <cmath>

namespace mixhit {

namespace {

constexpr std::size_t kMaxLevel = 24;

// Number of Poisson terms so the tail beyond them is below 1e-18 for any
// time up to r.
std::size_t series_terms(double r) {
    if (r <= 0.0) return 0;
    double weight = std::exp(-r);
    double tail = 1.0 - weight;
    std::size_t k = 0;
    while (tail > 1e-18 && k < 200) {
        ++k;
        weight *= r / static_cast<double>(k);
        tail -= weight;
        if (weight < 1e-20 && static_cast<double>(k) > r) break;
    }
    return k + 2;
}

void check_time(double t) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw Error(Errc::NegativeTime, "time must be finite and >= 0");
}

}  // namespace

DyadicSemigroup::DyadicSemigroup(Matrix m, double base_step) : m_(std::move(m)), base_(base_step) {
    if (m_.rows() != m_.cols()) throw Error(Errc::DimensionMismatch, "semigroup generator must be square");
    if ((m_.array() < 0.0).any()) throw Error(Errc::InvalidArgument, "semigroup kernel must be nonnegative");
}

Matrix DyadicSemigroup::short_rows(const Matrix& rows, double r) const {
    if (r == 0.0) return rows;
    std::size_t K = series_terms(r);
    Matrix term = rows * std::exp(-r);
    Matrix acc = term;
    for (std::size_t k = 1; k <= K; ++k) {
        term = (term * m_) * (r / static_cast<double>(k));
        acc += term;
    }
    return acc;
}

Matrix DyadicSemigroup::short_cols(const Matrix& cols, double r) const {
    if (r == 0.0) return cols;
    std::size_t K = series_terms(r);
    Matrix term = cols * std::exp(-r);
    Matrix acc = term;
    for (std::size_t k = 1; k <= K; ++k) {
        term = (m_ * term) * (r / static_cast<double>(k));
        acc += term;
    }
    return acc;
}

const Matrix& DyadicSemigroup::power(std::size_t j) const {
    std::lock_guard<std::mutex> lock(mutex_);
    while (powers_.size() <= j) {
        if (powers_.empty()) {
            Matrix id = Matrix::Identity(m_.rows(), m_.cols());
            powers_.push_back(std::make_unique<Matrix>(short_rows(id, base_)));
        } else {
            const Matrix& prev = *powers_.back();
            powers_.push_back(std::make_unique<Matrix>(prev * prev));
        }
    }
    return *powers_[j];
}

Matrix DyadicSemigroup::apply_rows(const Matrix& rows, double t) const {
    check_time(t);
    double steps = std::floor(t / base_);
    double r = t - steps * base_;
    Matrix out = short_rows(rows, r);
    auto m = static_cast<unsigned long long>(steps);
    std::size_t j = 0;
    while (m != 0) {
        if (j >= kMaxLevel) {
            // Remaining high bits: apply the top level m * 2^(j - top) times.
            unsigned long long reps = m << (j - kMaxLevel);
            const Matrix& top = power(kMaxLevel);
            for (unsigned long long i = 0; i < reps; ++i) out = out * top;
            break;
        }
        if (m & 1ULL) out = out * power(j);
        m >>= 1;
        ++j;
    }
    return out;
}

Matrix DyadicSemigroup::apply_cols(const Matrix& cols, double t) const {
    check_time(t);
    double steps = std::floor(t / base_);
    double r = t - steps * base_;
    Matrix out = short_cols(cols, r);
    auto m = static_cast<unsigned long long>(steps);
    std::size_t j = 0;
    while (m != 0) {
        if (j >= kMaxLevel) {
            unsigned long long reps = m << (j - kMaxLevel);
            const Matrix& top = power(kMaxLevel);
            for (unsigned long long i = 0; i < reps; ++i) out = top * out;
            break;
        }
        if (m & 1ULL) out = power(j) * out;
        m >>= 1;
        ++j;
    }
    return out;
}

Matrix DyadicSemigroup::matrix(double t) const {
    return apply_rows(Matrix::Identity(m_.rows(), m_.cols()), t);
}

}  // namespace mixhit
