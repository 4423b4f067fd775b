#pragma once

#include "mixhit/sets.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mixhit {

// A finite irreducible reversible chain.  Immutable once built; the
// factories below check every invariant before handing one out.
class ReversibleChain {
public:
    const std::vector<std::string>& states() const { return states_; }
    const Matrix& kernel() const { return kernel_; }
    const Vector& pi() const { return pi_; }
    const std::optional<Matrix>& weights() const { return weights_; }
    std::size_t size() const { return states_.size(); }

    std::size_t index_of(std::string_view label) const;

    // Validating constructor used by the builders and the gallery.
    static ReversibleChain assemble(std::vector<std::string> states, Matrix kernel, Vector pi,
                                    std::optional<Matrix> weights = std::nullopt);

private:
    ReversibleChain() = default;

    std::vector<std::string> states_;
    Matrix kernel_;
    Vector pi_;
    std::optional<Matrix> weights_;
};

ReversibleChain build_from_kernel(std::vector<std::string> states, Matrix kernel);
ReversibleChain build_from_weights(std::vector<std::string> states, Matrix weights);

class Distribution {
public:
    explicit Distribution(Vector probs);

    static Distribution point(std::size_t n, std::size_t x);
    static Distribution uniform_on(const StateSet& set, std::size_t n);
    static Distribution stationary(const ReversibleChain& chain);
    // pi conditioned on a set.
    static Distribution restricted(const Vector& pi, const StateSet& set);

    const Vector& probs() const { return probs_; }
    std::size_t size() const { return static_cast<std::size_t>(probs_.size()); }
    double operator[](std::size_t x) const { return probs_(static_cast<Eigen::Index>(x)); }

private:
    Vector probs_;
};

struct LumpingMap {
    std::vector<std::size_t> block_of;
    std::vector<std::string> block_labels;

    // Blocks are numbered in order of first appearance.
    static LumpingMap from_labels(const std::vector<std::string>& label_of_state);
};

ReversibleChain project(const ReversibleChain& chain, const LumpingMap& lumping);

ReversibleChain unlazify(const ReversibleChain& chain);

struct DoobTransform {
    Vector h;                         // P_x[T_target < T_avoid] over all states
    std::vector<std::size_t> retained;  // states with h > 0, ascending
    Matrix kernel;                    // h-transformed kernel on retained states
    std::vector<char> transient;      // per retained state: not in target
};

// Conditions on hitting `target` before `avoid`.  An empty `avoid` is
// allowed and conditions on a sure event.  `start`, when non-empty, must
// carry positive conditioning probability somewhere.
DoobTransform doob_transform(const ReversibleChain& chain, const StateSet& target,
                             const StateSet& avoid, const StateSet& start = {});

}  // namespace mixhit
