#include "mixhit/chain.hpp"

#include "mixhit/error.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <sstream>

namespace mixhit {

namespace {

constexpr double kSupportTol = 1e-15;

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

std::vector<char> reachable(const Matrix& k, std::size_t root, bool backwards) {
    const auto n = static_cast<std::size_t>(k.rows());
    std::vector<char> seen(n, 0);
    std::deque<std::size_t> queue{root};
    seen[root] = 1;
    while (!queue.empty()) {
        auto x = queue.front();
        queue.pop_front();
        for (std::size_t y = 0; y < n; ++y) {
            double w = backwards ? k(y, x) : k(x, y);
            if (!seen[y] && w > kSupportTol) {
                seen[y] = 1;
                queue.push_back(y);
            }
        }
    }
    return seen;
}

void check_irreducible(const Matrix& k, Errc code) {
    for (bool back : {false, true}) {
        auto seen = reachable(k, 0, back);
        auto it = std::find(seen.begin(), seen.end(), 0);
        if (it != seen.end())
            throw Error(code, "state " + std::to_string(it - seen.begin()) +
                                  (back ? " cannot reach" : " is unreachable from") + " state 0");
    }
}

void check_square(const Matrix& m, std::size_t n, const char* what) {
    if (static_cast<std::size_t>(m.rows()) != n || static_cast<std::size_t>(m.cols()) != n)
        throw Error(Errc::DimensionMismatch, std::string(what) + " must be " + std::to_string(n) +
                                                 "x" + std::to_string(n));
}

}  // namespace

std::size_t ReversibleChain::index_of(std::string_view label) const {
    auto it = std::find(states_.begin(), states_.end(), label);
    if (it == states_.end())
        throw Error(Errc::IndexOutOfRange, "unknown state label '" + std::string(label) + "'");
    return static_cast<std::size_t>(it - states_.begin());
}

ReversibleChain ReversibleChain::assemble(std::vector<std::string> states, Matrix kernel, Vector pi,
                                          std::optional<Matrix> weights) {
    const std::size_t n = states.size();
    if (n == 0) throw Error(Errc::DimensionMismatch, "empty state space");
    check_square(kernel, n, "kernel");
    if (static_cast<std::size_t>(pi.size()) != n)
        throw Error(Errc::DimensionMismatch, "pi has the wrong length");
    {
        auto sorted = states;
        std::sort(sorted.begin(), sorted.end());
        auto dup = std::adjacent_find(sorted.begin(), sorted.end());
        if (dup != sorted.end()) throw Error(Errc::InvalidArgument, "duplicate state label '" + *dup + "'");
    }
    if ((kernel.array() < 0.0).any()) throw Error(Errc::NotStochastic, "negative kernel entry");
    for (std::size_t x = 0; x < n; ++x) {
        double s = kernel.row(static_cast<Eigen::Index>(x)).sum();
        if (std::abs(s - 1.0) > 1e-12)
            throw Error(Errc::NotStochastic, "row " + states[x] + " sums to " + fmt(s));
    }
    check_irreducible(kernel, Errc::NotIrreducible);
    if ((pi.array() <= 0.0).any() || std::abs(pi.sum() - 1.0) > 1e-12)
        throw Error(Errc::InvalidDistribution, "stationary vector is not a positive probability vector");
    double drift = (pi.transpose() * kernel - pi.transpose()).lpNorm<1>();
    if (drift > 1e-10) throw Error(Errc::NotReversible, "pi is not stationary (l1 drift " + fmt(drift) + ")");
    double worst = 0.0;
    std::size_t wx = 0, wy = 0;
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = x + 1; y < n; ++y) {
            auto i = static_cast<Eigen::Index>(x), j = static_cast<Eigen::Index>(y);
            double v = std::abs(pi(i) * kernel(i, j) - pi(j) * kernel(j, i));
            if (v > worst) {
                worst = v;
                wx = x;
                wy = y;
            }
        }
    if (worst > 1e-12)
        throw Error(Errc::NotReversible, "detailed balance fails at (" + states[wx] + ", " + states[wy] +
                                             ") by " + fmt(worst));
    if (weights) {
        check_square(*weights, n, "weights");
        for (std::size_t x = 0; x < n; ++x) {
            auto i = static_cast<Eigen::Index>(x);
            double rs = weights->row(i).sum();
            double dev = (weights->row(i) / rs - kernel.row(i)).cwiseAbs().maxCoeff();
            if (dev > 1e-12)
                throw Error(Errc::NotStochastic, "kernel row " + states[x] + " disagrees with weights");
        }
    }
    ReversibleChain c;
    c.states_ = std::move(states);
    c.kernel_ = std::move(kernel);
    c.pi_ = std::move(pi);
    c.weights_ = std::move(weights);
    return c;
}

ReversibleChain build_from_kernel(std::vector<std::string> states, Matrix kernel) {
    const std::size_t n = states.size();
    check_square(kernel, n, "kernel");
    if (n == 0) throw Error(Errc::DimensionMismatch, "empty state space");
    for (std::size_t x = 0; x < n; ++x) {
        auto i = static_cast<Eigen::Index>(x);
        if ((kernel.row(i).array() < 0.0).any())
            throw Error(Errc::NotStochastic, "negative entry in row " + states[x]);
        double s = kernel.row(i).sum();
        if (std::abs(s - 1.0) > 1e-9) throw Error(Errc::NotStochastic, "row " + states[x] + " sums to " + fmt(s));
        kernel.row(i) /= s;
    }
    check_irreducible(kernel, Errc::NotIrreducible);

    // Stationary law from ratios along a spanning tree of the support.
    // Each value is a product of kernel ratios, so relative accuracy
    // survives a huge dynamic range in pi.
    std::vector<double> logpi(n, 0.0);
    std::vector<char> seen(n, 0);
    std::deque<std::size_t> queue{0};
    seen[0] = 1;
    while (!queue.empty()) {
        auto x = queue.front();
        queue.pop_front();
        for (std::size_t y = 0; y < n; ++y) {
            auto i = static_cast<Eigen::Index>(x), j = static_cast<Eigen::Index>(y);
            if (seen[y] || kernel(i, j) <= kSupportTol) continue;
            if (kernel(j, i) <= kSupportTol)
                throw Error(Errc::NotReversible, "transition " + states[x] + "->" + states[y] +
                                                     " has no reverse transition");
            logpi[y] = logpi[x] + std::log(kernel(i, j)) - std::log(kernel(j, i));
            seen[y] = 1;
            queue.push_back(y);
        }
    }
    double top = *std::max_element(logpi.begin(), logpi.end());
    Vector pi(static_cast<Eigen::Index>(n));
    for (std::size_t x = 0; x < n; ++x) pi(static_cast<Eigen::Index>(x)) = std::exp(logpi[x] - top);
    pi /= pi.sum();
    return ReversibleChain::assemble(std::move(states), std::move(kernel), std::move(pi));
}

ReversibleChain build_from_weights(std::vector<std::string> states, Matrix weights) {
    const std::size_t n = states.size();
    check_square(weights, n, "weights");
    if (n == 0) throw Error(Errc::DimensionMismatch, "empty state space");
    double scale = weights.cwiseAbs().maxCoeff();
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = 0; y < n; ++y) {
            auto i = static_cast<Eigen::Index>(x), j = static_cast<Eigen::Index>(y);
            if (weights(i, j) < 0.0) throw Error(Errc::NotSymmetric, "negative weight");
            if (std::abs(weights(i, j) - weights(j, i)) > 1e-12 * std::max(1.0, scale))
                throw Error(Errc::NotSymmetric,
                            "w(" + states[x] + "," + states[y] + ") != w(" + states[y] + "," + states[x] + ")");
        }
    weights = 0.5 * (weights + weights.transpose()).eval();
    Vector rowsum = weights.rowwise().sum();
    for (std::size_t x = 0; x < n; ++x)
        if (rowsum(static_cast<Eigen::Index>(x)) <= 0.0)
            throw Error(Errc::Disconnected, "state " + states[x] + " carries no weight");
    check_irreducible(weights, Errc::Disconnected);
    Matrix kernel = rowsum.cwiseInverse().asDiagonal() * weights;
    Vector pi = rowsum / rowsum.sum();
    return ReversibleChain::assemble(std::move(states), std::move(kernel), std::move(pi), std::move(weights));
}

Distribution::Distribution(Vector probs) : probs_(std::move(probs)) {
    if (probs_.size() == 0) throw Error(Errc::InvalidDistribution, "empty distribution");
    if ((probs_.array() < 0.0).any()) throw Error(Errc::InvalidDistribution, "negative probability");
    if (!probs_.allFinite()) throw Error(Errc::InvalidDistribution, "non-finite probability");
    double s = probs_.sum();
    if (std::abs(s - 1.0) > 1e-12) throw Error(Errc::InvalidDistribution, "probabilities sum to " + fmt(s));
}

Distribution Distribution::point(std::size_t n, std::size_t x) {
    if (x >= n) throw Error(Errc::IndexOutOfRange, "point mass outside the state space");
    Vector v = Vector::Zero(static_cast<Eigen::Index>(n));
    v(static_cast<Eigen::Index>(x)) = 1.0;
    return Distribution(std::move(v));
}

Distribution Distribution::uniform_on(const StateSet& set, std::size_t n) {
    if (set.empty()) throw Error(Errc::InvalidDistribution, "uniform law on an empty set");
    Vector v = Vector::Zero(static_cast<Eigen::Index>(n));
    for (auto x : set) v(static_cast<Eigen::Index>(x)) = 1.0 / static_cast<double>(set.size());
    return Distribution(std::move(v));
}

Distribution Distribution::stationary(const ReversibleChain& chain) { return Distribution(chain.pi()); }

Distribution Distribution::restricted(const Vector& pi, const StateSet& set) {
    Vector v = Vector::Zero(pi.size());
    double m = measure(pi, set);
    if (m <= 0.0) throw Error(Errc::InvalidDistribution, "conditioning on a null set");
    for (auto x : set) v(static_cast<Eigen::Index>(x)) = pi(static_cast<Eigen::Index>(x)) / m;
    v /= v.sum();
    return Distribution(std::move(v));
}

LumpingMap LumpingMap::from_labels(const std::vector<std::string>& label_of_state) {
    LumpingMap map;
    std::map<std::string, std::size_t> index;
    for (const auto& label : label_of_state) {
        auto [it, fresh] = index.emplace(label, map.block_labels.size());
        if (fresh) map.block_labels.push_back(label);
        map.block_of.push_back(it->second);
    }
    return map;
}

ReversibleChain project(const ReversibleChain& chain, const LumpingMap& lumping) {
    const std::size_t n = chain.size();
    const std::size_t m = lumping.block_labels.size();
    if (lumping.block_of.size() != n)
        throw Error(Errc::DimensionMismatch, "lumping map must assign every state");
    for (auto b : lumping.block_of)
        if (b >= m) throw Error(Errc::IndexOutOfRange, "block index out of range");

    const Matrix& P = chain.kernel();
    const Vector& pi = chain.pi();
    // into(x, J) = P(x, J)
    Matrix into = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = 0; y < n; ++y)
            into(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(lumping.block_of[y])) +=
                P(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y));

    Matrix lumped = Matrix::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    Vector lpi = Vector::Zero(static_cast<Eigen::Index>(m));
    std::vector<Eigen::Index> first(m, -1);
    double worst = 0.0;
    std::size_t worst_state = 0, worst_block = 0;
    for (std::size_t x = 0; x < n; ++x) {
        auto i = static_cast<Eigen::Index>(x);
        auto b = lumping.block_of[x];
        lpi(static_cast<Eigen::Index>(b)) += pi(i);
        lumped.row(static_cast<Eigen::Index>(b)) += pi(i) * into.row(i);
        if (first[b] < 0) {
            first[b] = i;
            continue;
        }
        for (std::size_t J = 0; J < m; ++J) {
            double dev = std::abs(into(i, static_cast<Eigen::Index>(J)) - into(first[b], static_cast<Eigen::Index>(J)));
            if (dev > worst) {
                worst = dev;
                worst_state = x;
                worst_block = J;
            }
        }
    }
    for (std::size_t b = 0; b < m; ++b)
        if (first[b] < 0) throw Error(Errc::NotLumpable, "block " + lumping.block_labels[b] + " is empty");
    if (worst > 1e-12)
        throw Error(Errc::NotLumpable, "state " + chain.states()[worst_state] + " sends " + fmt(worst) +
                                           " more mass into block " + lumping.block_labels[worst_block] +
                                           " than its block representative");
    for (std::size_t b = 0; b < m; ++b) {
        auto i = static_cast<Eigen::Index>(b);
        lumped.row(i) /= lpi(i);
        lumped.row(i) /= lumped.row(i).sum();
    }
    lpi /= lpi.sum();
    return ReversibleChain::assemble(lumping.block_labels, std::move(lumped), std::move(lpi));
}

ReversibleChain unlazify(const ReversibleChain& chain) {
    const auto n = static_cast<Eigen::Index>(chain.size());
    const Matrix& P = chain.kernel();
    for (Eigen::Index x = 0; x < n; ++x)
        if (P(x, x) >= 1.0 - 1e-15)
            throw Error(Errc::AbsorbingState, "state " + chain.states()[static_cast<std::size_t>(x)] + " never moves");
    if (chain.weights()) {
        Matrix w = *chain.weights();
        w.diagonal().setZero();
        return build_from_weights(chain.states(), std::move(w));
    }
    Matrix Q = P;
    Q.diagonal().setZero();
    Vector move = Q.rowwise().sum();
    Q = move.cwiseInverse().asDiagonal() * Q;
    Vector pi = chain.pi().cwiseProduct(move);
    pi /= pi.sum();
    return ReversibleChain::assemble(chain.states(), std::move(Q), std::move(pi));
}

DoobTransform doob_transform(const ReversibleChain& chain, const StateSet& target, const StateSet& avoid,
                             const StateSet& start) {
    const std::size_t n = chain.size();
    if (target.empty()) throw Error(Errc::EmptyTarget, "conditioning target is empty");
    for (auto x : avoid)
        if (contains(target, x)) throw Error(Errc::InvalidArgument, "target and avoid sets overlap");
    const Matrix& P = chain.kernel();
    auto in_target = indicator(target, n);
    auto in_avoid = indicator(avoid, n);

    // States that can reach the target without touching avoid.
    std::vector<char> alive(n, 0);
    std::deque<std::size_t> queue(target.begin(), target.end());
    for (auto x : target) alive[x] = 1;
    while (!queue.empty()) {
        auto y = queue.front();
        queue.pop_front();
        for (std::size_t x = 0; x < n; ++x)
            if (!alive[x] && !in_avoid[x] && P(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) > 0.0) {
                alive[x] = 1;
                queue.push_back(x);
            }
    }

    StateSet rest;
    for (std::size_t x = 0; x < n; ++x)
        if (!in_target[x] && !in_avoid[x]) rest.push_back(x);
    Vector h = Vector::Zero(static_cast<Eigen::Index>(n));
    for (auto x : target) h(static_cast<Eigen::Index>(x)) = 1.0;
    if (!rest.empty()) {
        const auto r = static_cast<Eigen::Index>(rest.size());
        Matrix A = Matrix::Identity(r, r);
        Vector b = Vector::Zero(r);
        for (Eigen::Index i = 0; i < r; ++i) {
            auto x = static_cast<Eigen::Index>(rest[static_cast<std::size_t>(i)]);
            for (Eigen::Index j = 0; j < r; ++j) A(i, j) -= P(x, static_cast<Eigen::Index>(rest[static_cast<std::size_t>(j)]));
            for (auto y : target) b(i) += P(x, static_cast<Eigen::Index>(y));
        }
        Vector sol = A.partialPivLu().solve(b);
        for (Eigen::Index i = 0; i < r; ++i) {
            auto x = rest[static_cast<std::size_t>(i)];
            h(static_cast<Eigen::Index>(x)) = alive[x] ? std::clamp(sol(i), 0.0, 1.0) : 0.0;
        }
    }

    DoobTransform out;
    out.h = h;
    for (std::size_t x = 0; x < n; ++x)
        if (alive[x] && h(static_cast<Eigen::Index>(x)) > 0.0) out.retained.push_back(x);
    if (!start.empty()) {
        bool any = std::any_of(start.begin(), start.end(), [&](std::size_t x) { return contains(out.retained, x); });
        if (!any) throw Error(Errc::EmptyConditioning, "target is unreachable before avoid from every start state");
    }
    const auto m = static_cast<Eigen::Index>(out.retained.size());
    out.kernel = Matrix::Zero(m, m);
    out.transient.resize(out.retained.size());
    for (Eigen::Index i = 0; i < m; ++i) {
        auto x = static_cast<Eigen::Index>(out.retained[static_cast<std::size_t>(i)]);
        out.transient[static_cast<std::size_t>(i)] = !in_target[static_cast<std::size_t>(x)];
        for (Eigen::Index j = 0; j < m; ++j) {
            auto y = static_cast<Eigen::Index>(out.retained[static_cast<std::size_t>(j)]);
            out.kernel(i, j) = P(x, y) * h(y) / h(x);
        }
    }
    return out;
}

}  // namespace mixhit
