#include "mixhit/sets.hpp"

#include "mixhit/error.hpp"

#include <algorithm>

namespace mixhit {

StateSet make_set(std::vector<std::size_t> members, std::size_t n) {
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    if (!members.empty() && members.back() >= n)
        throw Error(Errc::IndexOutOfRange, "state index " + std::to_string(members.back()) +
                                               " outside a chain of " + std::to_string(n) + " states");
    return members;
}

StateSet complement(const StateSet& set, std::size_t n) {
    StateSet out;
    out.reserve(n - set.size());
    std::size_t j = 0;
    for (std::size_t x = 0; x < n; ++x) {
        if (j < set.size() && set[j] == x) {
            ++j;
            continue;
        }
        out.push_back(x);
    }
    return out;
}

StateSet all_states(std::size_t n) {
    StateSet out(n);
    for (std::size_t x = 0; x < n; ++x) out[x] = x;
    return out;
}

std::vector<char> indicator(const StateSet& set, std::size_t n) {
    std::vector<char> in(n, 0);
    for (auto x : set) in[x] = 1;
    return in;
}

double measure(const Vector& pi, const StateSet& set) {
    double m = 0.0;
    for (auto x : set) m += pi(static_cast<Eigen::Index>(x));
    return m;
}

bool contains(const StateSet& set, std::size_t x) {
    return std::binary_search(set.begin(), set.end(), x);
}

bool is_subset(const StateSet& small, const StateSet& big) {
    return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

bool lex_less(const StateSet& a, const StateSet& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

std::string format_set(const StateSet& set, const std::vector<std::string>& labels) {
    std::string out = "{";
    for (std::size_t i = 0; i < set.size(); ++i) {
        if (i) out += ",";
        out += labels.at(set[i]);
    }
    return out + "}";
}

}  // namespace mixhit
