#include "mixhit/certify.hpp"
#include "mixhit/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mixhit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double l1(const Vector& a, const Vector& b) { return (a - b).cwiseAbs().sum(); }

}  // namespace

DecompositionResult decompose_measure(const HeatKernel& kernel, const Distribution& sigma, double eps, double p,
                                      double w, const SearchSpec& spec) {
    if (!(eps > 0.0 && eps < 1.0)) throw Error(Errc::EpsOutOfRange, "eps must lie in (0, 1)");
    if (!(p > 0.0 && p < 1.0)) throw Error(Errc::POutOfRange, "p must lie in (0, 1)");
    const auto& chain = kernel.chain();
    if (sigma.size() != chain.size()) throw Error(Errc::DimensionMismatch, "distribution length differs from the chain");
    const double C = 0.5 * std::log(16.0 / (eps * p * p));
    if (w < -C) throw Error(Errc::InfeasibleW, "w must be >= -" + std::to_string(C));

    const Vector& pi = chain.pi();
    const auto n = pi.size();
    const double trel = kernel.t_rel();
    DecompositionResult r;
    TailEnvelope env(chain, sigma, 1.0 - eps, spec, trel);
    r.t = env.hit(p);
    r.tau = trel * (w + C);
    r.rho = p * std::exp(-w);
    r.a_tau = p + r.rho * (1.0 - p);
    r.h = kernel.apply(sigma, r.t + r.tau);
    const Vector& h = r.h.probs();

    // B0 = {h > (1-p) pi}; nu lives there, mu = h ^ (1-p) pi rescaled.
    Vector floor_part = h.cwiseMin((1.0 - p) * pi);
    Vector excess = h - floor_part;
    r.c_tau = excess.sum();
    r.nu = Distribution(excess / r.c_tau);
    r.mu = Distribution(floor_part / (1.0 - r.c_tau));
    r.split_residual = l1(h, r.c_tau * r.nu.probs() + (1.0 - r.c_tau) * r.mu.probs());

    const Vector& mu = r.mu.probs();
    Vector ratio = mu.cwiseQuotient(pi);

    r.beta = 1.0 - p * std::exp(-w / 2.0) / 2.0;
    Vector over = (mu - r.beta * pi).cwiseMax(0.0);  // supported on F^c
    r.kappa_tau = over.sum();
    r.d_tau = (r.rho < 1.0 ? r.rho / (1.0 - r.rho) : kInf) + p * std::exp(-w / 2.0) / 2.0;
    r.mu1 = Distribution(over / r.kappa_tau);
    // On F^c the density of mu2 is exactly beta / (1 - kappa); set it so, not by subtraction.
    Vector g(n);
    for (Eigen::Index x = 0; x < n; ++x) g(x) = (over(x) > 0.0 ? r.beta : ratio(x)) / (1.0 - r.kappa_tau);
    Vector m2 = g.cwiseProduct(pi);
    m2 /= m2.sum();
    r.mu2 = Distribution(m2);
    r.mixture_residual = l1(mu, r.kappa_tau * r.mu1.probs() + (1.0 - r.kappa_tau) * r.mu2.probs());

    // mu2 as a mixture of conditioned stationary laws over its level sets.
    g = r.mu2.probs().cwiseQuotient(pi);
    for (Eigen::Index x = 0; x < n; ++x)
        if (over(x) > 0.0) g(x) = r.beta / (1.0 - r.kappa_tau);
    std::vector<double> levels(g.data(), g.data() + n);
    std::sort(levels.begin(), levels.end(), std::greater<>());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    Vector rebuilt = Vector::Zero(n);
    for (std::size_t k = 0; k < levels.size(); ++k) {
        if (levels[k] <= 0.0) break;
        const double next = k + 1 < levels.size() ? std::max(levels[k + 1], 0.0) : 0.0;
        StateSet A;
        for (Eigen::Index x = 0; x < n; ++x)
            if (g(x) >= levels[k]) A.push_back(static_cast<std::size_t>(x));
        const double pa = measure(pi, A);
        const double weight = (levels[k] - next) * pa;
        r.bar_mu.push_back({A, weight});
        for (auto x : A) rebuilt(static_cast<Eigen::Index>(x)) += weight * pi(static_cast<Eigen::Index>(x)) / pa;
    }
    r.level_residual = l1(r.mu2.probs(), rebuilt);

    const std::string hk = std::string("heat_kernel:") + method_name(kernel.method());
    nlohmann::ordered_json base{{"eps", eps}, {"p", p}, {"w", w}, {"t", r.t}, {"tau", r.tau}};
    auto ctx = [&](std::initializer_list<std::pair<const char*, double>> extra) {
        auto c = base;
        for (const auto& [k, v] : extra) c[k] = v;
        return c;
    };
    auto& out = r.reports;
    out.push_back(judge("decomposition.split_identity", r.split_residual, 1e-10, "l1", hk, "closed_form", base, 0.0));
    out.push_back(judge("decomposition.mixture_identity", r.mixture_residual, 1e-10, "l1", hk, "closed_form", base, 0.0));
    out.push_back(judge("decomposition.level_identity", r.level_residual, 1e-10, "l1", hk, "closed_form", base, 0.0));
    out.push_back(judge("decomposition.c_tau", r.c_tau, r.a_tau, "probability", hk, "closed_form", base));
    out.push_back(judge("decomposition.linf_ratio", ratio.maxCoeff(), r.rho < 1.0 ? 1.0 / (1.0 - r.rho) : kInf, "ratio",
                        hk, "closed_form", base));
    for (int k = 1; k <= 9; ++k) {
        const double b = 0.1 * k;
        double mass = 0.0;
        for (Eigen::Index x = 0; x < n; ++x)
            if (mu(x) <= (1.0 - b) * pi(x)) mass += pi(x);
        out.push_back(judge("decomposition.deficit_set", mass, 1.0 / (1.0 + std::pow(2.0 * b / r.rho, 2)), "probability",
                            hk, "closed_form", ctx({{"b", b}})));
    }
    const double l2sq = pi.dot((ratio.array() - 1.0).square().matrix());
    const double l2_rhs = std::pow(r.rho / 2.0, 2) * std::log(1.0 + std::pow(2.0 / r.rho, 2)) +
                          (r.rho < 1.0 ? std::pow(r.rho / (1.0 - r.rho), 2) : kInf);
    out.push_back(judge("decomposition.l2_distance", l2sq, l2_rhs, "l2_squared", hk, "closed_form", base));
    out.push_back(judge("decomposition.kappa_tau", r.kappa_tau, r.d_tau, "probability", hk, "closed_form", base));
    double min_level_mass = 1.0;
    for (const auto& ws : r.bar_mu) min_level_mass = std::min(min_level_mass, measure(pi, ws.set));
    out.push_back(judge("decomposition.level_set_measure", std::exp(w) / (1.0 + std::exp(w)), min_level_mass,
                        "probability", "closed_form", hk, ctx({{"sets", static_cast<double>(r.bar_mu.size())}})));

    // Deficit sets D_r at the shifted w used to reach tau.
    const double w_shift = w + std::log(2.0 / (p * (1.0 - p)));
    for (int k = 1; k <= 9; ++k) {
        const double rr = 0.1 * k * (1.0 - p);
        double mass = 0.0;
        for (Eigen::Index x = 0; x < n; ++x)
            if (h(x) <= (1.0 - p - rr) * pi(x)) mass += pi(x);
        out.push_back(judge("decomposition.deficit_level", mass, 1.0 / (1.0 + rr * rr * std::exp(2.0 * w_shift)),
                            "probability", hk, "closed_form", ctx({{"r", rr}})));
    }
    return r;
}

}  // namespace mixhit
