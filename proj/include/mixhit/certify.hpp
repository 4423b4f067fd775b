#pragma once

#include "mixhit/distance.hpp"
#include "mixhit/worst_set.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace mixhit {

enum class Verdict { Pass, Fail, ReportedOnly };

const char* verdict_name(Verdict v);

inline constexpr double kCertTolerance = 1e-9;

// One checked inequality, always stated as lhs <= rhs.
struct CertificateReport {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;  // rhs - lhs
    std::string unit;
    Verdict verdict = Verdict::Pass;
    std::string lhs_source;  // which code path produced each side
    std::string rhs_source;
    nlohmann::ordered_json context = nlohmann::ordered_json::object();
    std::string note;
};

CertificateReport judge(std::string name, double lhs, double rhs, std::string unit, std::string lhs_source,
                        std::string rhs_source, nlohmann::ordered_json context = nlohmann::ordered_json::object(),
                        double tol = kCertTolerance);
CertificateReport reported_only(std::string name, double value, double reference, std::string unit,
                                std::string lhs_source, std::string rhs_source,
                                nlohmann::ordered_json context = nlohmann::ordered_json::object());

// Recomputes the verdict of a pass/fail entry under another tolerance.
void rejudge(CertificateReport& report, double tol);
bool all_pass(const std::vector<CertificateReport>& reports);

// t_rel log(1/2eps) <= t_mix(eps) <= t_rel log(1/(eps min pi)); two entries.
std::vector<CertificateReport> check_trel_sandwich(const HeatKernel& kernel, double eps);

// Var_pi H_t f <= exp(-2t/t_rel) Var_pi f for one (f, t).
CertificateReport check_contraction(const HeatKernel& kernel, const Vector& f, double t);
// The same over random f and t in [0, 10 t_rel]; reports the tightest instance.
CertificateReport check_contraction(const HeatKernel& kernel, std::size_t trials, std::uint64_t seed);

struct MaximalOptions {
    std::size_t points_per_decade = 40;
    std::size_t refine_rounds = 3;
    double variance_floor = 1e-16;
};

// x -> sup_{t >= s} |H_t f(x)| over a refined grid.  A lower bound on the
// true supremum.
Vector maximal_function(const HeatKernel& kernel, const Vector& f, double s, const MaximalOptions& opts = {});

// ||f*||_2 <= 2 ||f||_2
CertificateReport check_starr(const HeatKernel& kernel, const Vector& f, const MaximalOptions& opts = {});

// States y with sup_{t >= s} |P_y[X_t in B] - pi(B)| < m sigma_s.
StateSet good_set(const HeatKernel& kernel, const StateSet& B, double s, double m, const MaximalOptions& opts = {});
// 1 - 4/m^2 <= pi(G_s(B, m))
CertificateReport check_good_set(const HeatKernel& kernel, const StateSet& B, double s, double m,
                                 const MaximalOptions& opts = {});

// Stationary-start hitting tail and the bad-set bound built from it.
std::vector<CertificateReport> check_stationary_hitting(const HeatKernel& kernel, const StateSet& A,
                                                        const std::vector<double>& t_grid,
                                                        const std::vector<double>& w_grid,
                                                        const std::vector<double>& alpha_grid);

// Mixing versus hitting bounds from a start mu.  Worst-set quantities
// come from `spec`; mixing quantities from the distance module.
std::vector<CertificateReport> check_hit_mix_bounds(const HeatKernel& kernel, const Distribution& mu,
                                                    const std::vector<double>& eps_grid, const SearchSpec& spec);

struct WeightedSet {
    StateSet set;
    double weight;
};

struct DecompositionResult {
    double t = 0.0;
    double tau = 0.0;
    double c_tau = 0.0;
    double a_tau = 0.0;
    double rho = 0.0;
    double kappa_tau = 0.0;
    double d_tau = 0.0;
    double beta = 0.0;
    Distribution h{Vector::Ones(1)};  // sigma H_{t+tau}
    Distribution nu{Vector::Ones(1)};
    Distribution mu{Vector::Ones(1)};
    Distribution mu1{Vector::Ones(1)};
    Distribution mu2{Vector::Ones(1)};
    std::vector<WeightedSet> bar_mu;
    double split_residual = 0.0;    // |h - (c nu + (1-c) mu)|_1
    double mixture_residual = 0.0;  // |mu - (kappa mu1 + (1-kappa) mu2)|_1
    double level_residual = 0.0;    // |mu2 - sum bar_mu(A) pi_A|_1
    std::vector<CertificateReport> reports;
};

// Writes sigma H_{t+tau} as c nu + (1-c) mu with t = hit_{1-eps,sigma}(p)
// and checks every bound on mu.
DecompositionResult decompose_measure(const HeatKernel& kernel, const Distribution& sigma, double eps, double p,
                                      double w, const SearchSpec& spec);

// eps t_H(eps) <= t_H(1/2) on each grid point.
std::vector<CertificateReport> check_griffiths(const ReversibleChain& chain, const std::vector<double>& eps_grid,
                                               const SearchSpec& spec);

// t_{H,mu}(1-eps) <= t_{H,mu}(eps) as pass/fail, plus the reported ratio
// (t_{H,mu}(eps) - t_{H,mu}(1-eps)) eps / t_rel.
std::vector<CertificateReport> check_hitting_gap(const ReversibleChain& chain, const Distribution& mu,
                                                 const std::vector<double>& eps_grid, const SearchSpec& spec,
                                                 double t_rel);

struct SupportLemmaParams {
    double eps = -1.0;  // measure deficit for the I-set lemma; negative means 1 - pi(A)
    std::vector<std::size_t> k_values{0, 1, 2};
    std::vector<double> t_values{1.0, 2.0};
    std::vector<double> r_values{1.0, 2.0, 4.0};
    std::vector<double> q_values{0.25, 0.5, 0.75};
    double worst_eps = 0.25;  // eps of t_{H,mu}(1-eps) in the worst-in-expectation lemma
    bool worst_in_expectation = true;
};

// I-set, J-set and worst-in-expectation lemmas.  The last needs an exact
// search and throws ExactModeRequired otherwise.
std::vector<CertificateReport> check_support_lemmas(const HeatKernel& kernel, const Distribution& mu,
                                                    const StateSet& A, const SupportLemmaParams& params,
                                                    const SearchSpec& spec);

// P_mu[T_B - T_A >= c] for c > 0, from hitting distributions on A and
// killed-chain tails; exposed for tests.
double delayed_hit_probability(const ReversibleChain& chain, const Distribution& mu, const StateSet& A,
                               const StateSet& B, double c);
// Brute-force twin on the chain extended by which of A, B has been hit.
double delayed_hit_probability_product(const ReversibleChain& chain, const Distribution& mu, const StateSet& A,
                                       const StateSet& B, double c);

struct SuiteOptions {
    std::vector<std::string> suites{"all"};
    std::vector<double> eps_grid{0.05, 0.1, 0.25, 0.5};
    SearchSpec search = SearchSpec::exact();
    std::uint64_t seed = 1;
    std::size_t random_functions = 100;
    std::string mu_label;  // start state for the start-dependent checks; empty picks the worst TV start
};

std::vector<std::string> suite_names();

// Runs the requested batches; reports come back in suite order.
std::vector<CertificateReport> run_suite(const HeatKernel& kernel, const SuiteOptions& opts);

}  // namespace mixhit
