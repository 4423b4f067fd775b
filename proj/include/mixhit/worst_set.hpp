#pragma once

#include "mixhit/hitting.hpp"
#include "mixhit/parallel.hpp"

#include <functional>
#include <vector>

namespace mixhit {

enum class SearchMode { Exact, Candidates, Greedy };

const char* mode_name(SearchMode mode);

inline constexpr std::size_t kExactLimit = 20;

struct SearchSpec {
    SearchMode mode = SearchMode::Exact;
    std::vector<StateSet> candidates;
    Exec exec = Exec::Parallel;

    static SearchSpec exact(Exec exec = Exec::Parallel) { return {SearchMode::Exact, {}, exec}; }
    static SearchSpec greedy() { return {SearchMode::Greedy, {}, Exec::Serial}; }
    static SearchSpec from_candidates(std::vector<StateSet> family) {
        return {SearchMode::Candidates, std::move(family), Exec::Parallel};
    }
};

struct WorstSetResult {
    StateSet set;
    double measure = 0.0;
    double objective = 0.0;
    SearchMode mode = SearchMode::Exact;
    bool lower_bound = false;  // true unless the search was exhaustive
};

// Objective that never increases when states are added to the set.
using SetObjective = std::function<double(const StateSet&)>;

// A set counts as feasible when pi(set) >= threshold - this slack.
inline constexpr double kMeasureSlack = 1e-12;

WorstSetResult maximize_antitone(const Vector& pi, double threshold, const SetObjective& objective,
                                 const SearchSpec& spec);

// Every inclusion-minimal set with pi(set) >= threshold.
std::vector<StateSet> minimal_feasible_sets(const Vector& pi, double threshold);

// Feasible members of a family, dropping supersets of other feasible members.
std::vector<StateSet> minimal_candidates(const Vector& pi, double threshold, const std::vector<StateSet>& family);

// t_{H,mu}(alpha)
WorstSetResult worst_set_expectation(const ReversibleChain& chain, const Distribution& mu, double alpha,
                                     const SearchSpec& spec);
// t_H(alpha) = max over singleton starts
WorstSetResult worst_set_expectation_any_start(const ReversibleChain& chain, double alpha, const SearchSpec& spec);
// p_mu(delta, t)
WorstSetResult worst_tail(const ReversibleChain& chain, const Distribution& mu, double delta, double t,
                          const SearchSpec& spec);
// hit_{delta,mu}(eps)
double hit_time(const ReversibleChain& chain, const Distribution& mu, double delta, double eps,
                const SearchSpec& spec);

// t -> p_mu(delta, t) over a fixed family of sets, prepared once so that
// repeated evaluation and inversion stay cheap.
class TailEnvelope {
public:
    TailEnvelope(const ReversibleChain& chain, const Distribution& mu, double delta, const SearchSpec& spec,
                 double t_rel);

    WorstSetResult at(double t) const;
    double value(double t) const;
    double hit(double eps) const;  // hit_{delta,mu}(eps); +inf when eps <= 0
    bool lower_bound() const { return lower_bound_; }
    std::size_t family_size() const { return members_.size(); }
    double delta() const { return delta_; }

private:
    struct Member {
        StateSet set;
        double measure;
        ExpSum curve;
        std::shared_ptr<const KilledChain> killed;  // when the curve is unavailable
    };
    double member_value(const Member& m, double t) const;

    Distribution mu_;
    double delta_;
    double t_rel_;
    SearchMode mode_;
    bool lower_bound_;
    std::vector<Member> members_;
};

}  // namespace mixhit
