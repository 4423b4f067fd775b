#pragma once

#include "mixhit/certify.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace mixhit {

enum class AldousRole { ATop, ABranch, V, BBranch, CBranch, Z };

const char* role_name(AldousRole role);

// Aldous' chain on 3n+2 states.  States run a_{2n+1} .. a_{n+2}, v,
// b_n .. b_1, c_n .. c_1, z.
struct AldousChain {
    std::size_t n = 0;
    ReversibleChain chain;
    std::vector<AldousRole> roles;

    std::size_t a(std::size_t m) const;  // a_m for n+1 <= m <= 2n+1 (a_{n+1} = v)
    std::size_t b(std::size_t k) const;  // b_0 = z, b_{n+1} = v
    std::size_t c(std::size_t k) const;  // c_0 = z, c_{n+1} = v
    std::size_t v() const { return n; }
    std::size_t z() const { return 3 * n + 1; }
    std::size_t top() const { return 0; }
};

AldousChain aldous(std::size_t n);

struct RationalEntry {
    std::string from;
    std::string to;
    std::string value;  // "p/q" or an integer
};

// Nonzero kernel entries of aldous(n) in exact arithmetic, row-major.
std::vector<RationalEntry> aldous_rational_kernel(std::size_t n);
// Stationary law of aldous(n) in exact arithmetic, one entry per state.
std::vector<RationalEntry> aldous_rational_pi(std::size_t n);

// P_{b_ell}[T_v < T_z] = (2^ell - 1) / (2^{n+1} - 1); the same from c_ell.
double cb_probability_exact(std::size_t n, std::size_t ell);

// E_x[T_target | T_target < T_avoid] for every x; 0 on the target and NaN
// where the conditioning event is null.
Vector conditioned_expected_hitting(const ReversibleChain& chain, const StateSet& target, const StateSet& avoid);

std::vector<CertificateReport> aldous_expectation_checks(std::size_t n);

// Reported-only comparison of pi(z) with the value 1/2.
CertificateReport aldous_pi_claim(std::size_t n);

// {z} joined with bottom segments of the C or the B branch.
std::vector<StateSet> aldous_candidates(const AldousChain& ac);

ReversibleChain two_state(double p, double q);
ReversibleChain path_conductance(const std::vector<double>& edge_weights, const std::vector<double>& self_weights);
// States 0..n; moves down w.p. (1-hold) q_down, up w.p. (1-hold)(1-q_down).
ReversibleChain biased_path(std::size_t n, double q_down, double hold = 0.5);
ReversibleChain complete(std::size_t m);
ReversibleChain random_tree(std::size_t n, std::uint64_t seed);
ReversibleChain random_weights(std::size_t n, std::uint64_t seed, double density = 1.0);

std::vector<std::string> family_names();
ReversibleChain family(const std::string& name, const nlohmann::json& params);

// Exact label, or "a" for the top of an Aldous chain.
std::size_t resolve_state(const ReversibleChain& chain, const std::string& label);

// A structured candidate family for worst-set searches: for an Aldous chain
// the branch sets plus heaviest prefixes, otherwise singletons and heaviest /
// index prefixes.
std::vector<StateSet> default_candidates(const std::string& family_name, const ReversibleChain& chain);

}  // namespace mixhit
