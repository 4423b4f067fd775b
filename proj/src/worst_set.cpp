#include "mixhit/worst_set.hpp"

#include "mixhit/distance.hpp"
#include "mixhit/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <optional>

namespace mixhit {

namespace {

struct Scored {
    StateSet set;
    double value;
};

bool better(const Scored& a, const Scored& b) {
    if (a.value != b.value) return a.value > b.value;
    return lex_less(a.set, b.set);
}

void check_level(double level, const char* what) {
    if (!(level > 0.0 && level < 1.0)) throw Error(Errc::InvalidArgument, std::string(what) + " must lie in (0, 1)");
}

// States by decreasing pi, index order on ties.
std::vector<std::size_t> heavy_order(const Vector& pi) {
    std::vector<std::size_t> order(static_cast<std::size_t>(pi.size()));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return pi(static_cast<Eigen::Index>(a)) > pi(static_cast<Eigen::Index>(b));
    });
    return order;
}

StateSet sorted_copy(std::vector<std::size_t> v) {
    std::sort(v.begin(), v.end());
    return v;
}

bool feasible(double mass, double threshold) { return mass >= threshold - kMeasureSlack; }

StateSet heaviest_prefix(const Vector& pi, double threshold) {
    std::vector<std::size_t> members;
    double mass = 0.0;
    for (auto x : heavy_order(pi)) {
        members.push_back(x);
        mass += pi(static_cast<Eigen::Index>(x));
        if (feasible(mass, threshold)) break;
    }
    return sorted_copy(std::move(members));
}

StateSet minimalize(StateSet set, const Vector& pi, double threshold) {
    auto order = heavy_order(pi);
    std::reverse(order.begin(), order.end());
    double mass = measure(pi, set);
    for (auto x : order) {
        if (!contains(set, x) || set.size() == 1) continue;
        double px = pi(static_cast<Eigen::Index>(x));
        if (feasible(mass - px, threshold)) {
            set.erase(std::find(set.begin(), set.end(), x));
            mass -= px;
        }
    }
    return set;
}

// Depth-first walk over sets built in heavy order.  A set is reported the
// moment it becomes feasible, which makes it inclusion-minimal.
class Enumerator {
public:
    Enumerator(const Vector& pi, double threshold) : pi_(pi), threshold_(threshold), order_(heavy_order(pi)) {
        suffix_.assign(order_.size() + 1, 0.0);
        for (std::size_t i = order_.size(); i-- > 0;)
            suffix_[i] = suffix_[i + 1] + pi(static_cast<Eigen::Index>(order_[i]));
    }

    std::size_t size() const { return order_.size(); }

    // visit(set, is_feasible) returns false to prune below a partial set.
    template <class Visit>
    void branch(std::size_t first, Visit&& visit) const {
        std::vector<std::size_t> current{order_[first]};
        double mass = pi_(static_cast<Eigen::Index>(order_[first]));
        if (!feasible(mass + suffix_[first + 1], threshold_)) return;
        if (feasible(mass, threshold_)) {
            visit(sorted_copy(current), true);
            return;
        }
        if (!visit(sorted_copy(current), false)) return;
        walk(first + 1, current, mass, visit);
    }

private:
    template <class Visit>
    void walk(std::size_t pos, std::vector<std::size_t>& current, double mass, Visit& visit) const {
        for (std::size_t j = pos; j < order_.size(); ++j) {
            if (!feasible(mass + suffix_[j], threshold_)) return;
            double m2 = mass + pi_(static_cast<Eigen::Index>(order_[j]));
            current.push_back(order_[j]);
            if (feasible(m2, threshold_)) {
                visit(sorted_copy(current), true);
            } else if (visit(sorted_copy(current), false)) {
                walk(j + 1, current, m2, visit);
            }
            current.pop_back();
        }
    }

    const Vector& pi_;
    double threshold_;
    std::vector<std::size_t> order_;
    std::vector<double> suffix_;
};

WorstSetResult finish(Scored best, const Vector& pi, SearchMode mode) {
    WorstSetResult r;
    r.measure = measure(pi, best.set);
    r.set = std::move(best.set);
    r.objective = best.value;
    r.mode = mode;
    r.lower_bound = mode != SearchMode::Exact;
    return r;
}

Scored pick_best(const std::vector<Scored>& all) {
    const Scored* best = nullptr;
    for (const auto& s : all)
        if (!best || better(s, *best)) best = &s;
    return *best;
}

WorstSetResult exact_search(const Vector& pi, double threshold, const SetObjective& objective, Exec exec) {
    if (static_cast<std::size_t>(pi.size()) > kExactLimit)
        throw Error(Errc::TooLargeForExact, "exact worst-set search is limited to " + std::to_string(kExactLimit) +
                                                " states");
    Enumerator walker(pi, threshold);
    Scored seed{heaviest_prefix(pi, threshold), 0.0};
    seed.value = objective(seed.set);

    const auto nb = static_cast<std::ptrdiff_t>(walker.size());
    std::vector<std::optional<Scored>> found(walker.size());
    auto run = [&](std::ptrdiff_t b) {
        Scored best = seed;
        bool any = false;
        walker.branch(static_cast<std::size_t>(b), [&](StateSet set, bool is_feasible) {
            double v = objective(set);
            if (is_feasible) {
                Scored s{std::move(set), v};
                if (better(s, best)) {
                    best = std::move(s);
                    any = true;
                }
                return true;
            }
            return v >= best.value - 1e-12 * std::abs(best.value);
        });
        if (any) found[static_cast<std::size_t>(b)] = std::move(best);
    };
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 1)
        for (std::ptrdiff_t b = 0; b < nb; ++b) run(b);
    } else {
        for (std::ptrdiff_t b = 0; b < nb; ++b) run(b);
    }
    std::vector<Scored> all{seed};
    for (auto& f : found)
        if (f) all.push_back(std::move(*f));
    return finish(pick_best(all), pi, SearchMode::Exact);
}

WorstSetResult candidate_search(const Vector& pi, double threshold, const SetObjective& objective,
                                const std::vector<StateSet>& family, Exec exec) {
    auto members = minimal_candidates(pi, threshold, family);
    if (members.empty()) throw Error(Errc::EmptyCandidateFamily, "no candidate set reaches the required measure");
    std::vector<Scored> all(members.size());
    const auto m = static_cast<std::ptrdiff_t>(members.size());
    auto run = [&](std::ptrdiff_t i) {
        auto k = static_cast<std::size_t>(i);
        all[k] = {members[k], objective(members[k])};
    };
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 1)
        for (std::ptrdiff_t i = 0; i < m; ++i) run(i);
    } else {
        for (std::ptrdiff_t i = 0; i < m; ++i) run(i);
    }
    return finish(pick_best(all), pi, SearchMode::Candidates);
}

WorstSetResult greedy_search(const Vector& pi, double threshold, const SetObjective& objective) {
    const std::size_t n = static_cast<std::size_t>(pi.size());
    Scored cur{heaviest_prefix(pi, threshold), 0.0};
    cur.value = objective(cur.set);
    auto order = heavy_order(pi);
    std::size_t budget = 4 * n + 200;
    bool improved = true;
    while (improved && budget > 0) {
        improved = false;
        for (std::size_t ai = 0; ai < cur.set.size() && !improved && budget > 0; ++ai) {
            for (auto b : order) {
                if (budget == 0) break;
                if (contains(cur.set, b)) continue;
                StateSet cand = cur.set;
                cand.erase(cand.begin() + static_cast<std::ptrdiff_t>(ai));
                cand.push_back(b);
                cand = sorted_copy(std::move(cand));
                if (!feasible(measure(pi, cand), threshold)) continue;
                cand = minimalize(std::move(cand), pi, threshold);
                Scored s{cand, objective(cand)};
                --budget;
                if (s.value > cur.value + 1e-12 * std::abs(cur.value)) {
                    cur = std::move(s);
                    improved = true;
                    break;
                }
            }
        }
    }
    (void)n;
    return finish(std::move(cur), pi, SearchMode::Greedy);
}

}  // namespace

const char* mode_name(SearchMode mode) {
    switch (mode) {
        case SearchMode::Exact: return "exact";
        case SearchMode::Candidates: return "candidates";
        case SearchMode::Greedy: return "greedy";
    }
    return "?";
}

std::vector<StateSet> minimal_feasible_sets(const Vector& pi, double threshold) {
    if (static_cast<std::size_t>(pi.size()) > kExactLimit)
        throw Error(Errc::TooLargeForExact, "exhaustive set enumeration is limited to " +
                                                std::to_string(kExactLimit) + " states");
    Enumerator walker(pi, threshold);
    std::vector<StateSet> out;
    for (std::size_t b = 0; b < walker.size(); ++b)
        walker.branch(b, [&](StateSet set, bool is_feasible) {
            if (is_feasible) out.push_back(std::move(set));
            return true;
        });
    std::sort(out.begin(), out.end(), lex_less);
    return out;
}

std::vector<StateSet> minimal_candidates(const Vector& pi, double threshold, const std::vector<StateSet>& family) {
    std::vector<StateSet> feas;
    for (const auto& s : family) {
        StateSet set = make_set(s, static_cast<std::size_t>(pi.size()));
        if (!set.empty() && feasible(measure(pi, set), threshold)) feas.push_back(std::move(set));
    }
    std::sort(feas.begin(), feas.end(), lex_less);
    feas.erase(std::unique(feas.begin(), feas.end()), feas.end());
    std::vector<StateSet> out;
    for (const auto& s : feas) {
        bool dominated = false;
        for (const auto& t : feas)
            if (t.size() < s.size() && is_subset(t, s)) {
                dominated = true;
                break;
            }
        if (!dominated) out.push_back(s);
    }
    return out;
}

WorstSetResult maximize_antitone(const Vector& pi, double threshold, const SetObjective& objective,
                                 const SearchSpec& spec) {
    switch (spec.mode) {
        case SearchMode::Exact: return exact_search(pi, threshold, objective, spec.exec);
        case SearchMode::Candidates: return candidate_search(pi, threshold, objective, spec.candidates, spec.exec);
        case SearchMode::Greedy: return greedy_search(pi, threshold, objective);
    }
    throw Error(Errc::InvalidArgument, "unknown search mode");
}

WorstSetResult worst_set_expectation(const ReversibleChain& chain, const Distribution& mu, double alpha,
                                     const SearchSpec& spec) {
    check_level(alpha, "alpha");
    if (mu.size() != chain.size()) throw Error(Errc::DimensionMismatch, "distribution length differs from the chain");
    auto objective = [&](const StateSet& A) { return mu.probs().dot(expected_hitting_all(chain, A)); };
    return maximize_antitone(chain.pi(), alpha, objective, spec);
}

WorstSetResult worst_set_expectation_any_start(const ReversibleChain& chain, double alpha, const SearchSpec& spec) {
    check_level(alpha, "alpha");
    auto objective = [&](const StateSet& A) { return expected_hitting_all(chain, A).maxCoeff(); };
    return maximize_antitone(chain.pi(), alpha, objective, spec);
}

WorstSetResult worst_tail(const ReversibleChain& chain, const Distribution& mu, double delta, double t,
                          const SearchSpec& spec) {
    check_level(delta, "delta");
    if (!(t >= 0.0)) throw Error(Errc::NegativeTime, "time must be >= 0");
    auto objective = [&](const StateSet& A) { return KilledChain(chain, A).survival(mu, t); };
    return maximize_antitone(chain.pi(), delta, objective, spec);
}

double hit_time(const ReversibleChain& chain, const Distribution& mu, double delta, double eps,
                const SearchSpec& spec) {
    if (!(eps > 0.0 && eps < 1.0)) throw Error(Errc::EpsOutOfRange, "eps must lie in (0, 1)");
    TailEnvelope env(chain, mu, delta, spec, relaxation_time(decompose(chain)));
    return env.hit(eps);
}

TailEnvelope::TailEnvelope(const ReversibleChain& chain, const Distribution& mu, double delta, const SearchSpec& spec,
                           double t_rel)
    : mu_(mu), delta_(delta), t_rel_(t_rel), mode_(spec.mode), lower_bound_(spec.mode != SearchMode::Exact) {
    check_level(delta, "delta");
    if (mu.size() != chain.size()) throw Error(Errc::DimensionMismatch, "distribution length differs from the chain");
    std::vector<StateSet> family;
    switch (spec.mode) {
        case SearchMode::Exact: family = minimal_feasible_sets(chain.pi(), delta); break;
        case SearchMode::Candidates:
            family = minimal_candidates(chain.pi(), delta, spec.candidates);
            if (family.empty())
                throw Error(Errc::EmptyCandidateFamily, "no candidate set reaches the required measure");
            break;
        case SearchMode::Greedy:
            family.push_back(worst_set_expectation(chain, mu, delta, spec).set);
            break;
    }
    members_.resize(family.size());
    const auto m = static_cast<std::ptrdiff_t>(family.size());
    auto build = [&](std::ptrdiff_t i) {
        auto k = static_cast<std::size_t>(i);
        auto killed = std::make_shared<const KilledChain>(chain, family[k]);
        Member mem{family[k], measure(chain.pi(), family[k]), {}, nullptr};
        if (killed->method() == HeatMethod::Spectral) mem.curve = killed->survival_curve(mu);
        else mem.killed = std::move(killed);
        members_[k] = std::move(mem);
    };
    if (spec.exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 16)
        for (std::ptrdiff_t i = 0; i < m; ++i) build(i);
    } else {
        for (std::ptrdiff_t i = 0; i < m; ++i) build(i);
    }
}

double TailEnvelope::member_value(const Member& m, double t) const {
    if (m.killed) return m.killed->survival(mu_, t);
    return m.curve(t);
}

double TailEnvelope::value(double t) const {
    double best = 0.0;
    const auto m = static_cast<std::ptrdiff_t>(members_.size());
#pragma omp parallel for reduction(max : best) schedule(static)
    for (std::ptrdiff_t i = 0; i < m; ++i) best = std::max(best, member_value(members_[static_cast<std::size_t>(i)], t));
    return best;
}

WorstSetResult TailEnvelope::at(double t) const {
    const Member* best = nullptr;
    double best_value = 0.0;
    for (const auto& m : members_) {
        double v = member_value(m, t);
        if (!best || better({m.set, v}, {best->set, best_value})) {
            best = &m;
            best_value = v;
        }
    }
    WorstSetResult r;
    r.set = best->set;
    r.measure = best->measure;
    r.objective = best_value;
    r.mode = mode_;
    r.lower_bound = lower_bound_;
    return r;
}

double TailEnvelope::hit(double eps) const {
    if (eps <= 0.0) return std::numeric_limits<double>::infinity();
    if (eps >= 1.0) return 0.0;
    if (value(0.0) <= eps) return 0.0;
    const double tol = time_tolerance(t_rel_);
    double lo = 0.0, hi = std::max(1.0, t_rel_);
    while (value(hi) > eps) {
        if (hi > 1e13) throw Error(Errc::NumericalBreakdown, "worst tail does not fall below eps");
        lo = hi;
        hi *= 2.0;
    }
    while (hi - lo > tol) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (value(mid) > eps) lo = mid;
        else hi = mid;
    }
    return hi;
}

}  // namespace mixhit
