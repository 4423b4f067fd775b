#include "mixhit/certify.hpp"

#include "mixhit/error.hpp"
#include "mixhit/hitting.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <random>

namespace mixhit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double pi_mean(const Vector& pi, const Vector& f) { return pi.dot(f); }

double pi_var(const Vector& pi, const Vector& f) {
    double m = pi_mean(pi, f);
    return pi.dot((f.array() - m).square().matrix());
}

double pi_norm(const Vector& pi, const Vector& f) { return std::sqrt(pi.dot(f.cwiseAbs2())); }

double relative_slack(const CertificateReport& r) { return r.slack / std::max(1.0, std::abs(r.rhs)); }

nlohmann::ordered_json set_json(const StateSet& s, const ReversibleChain& chain) {
    auto arr = nlohmann::ordered_json::array();
    for (auto x : s) arr.push_back(chain.states()[x]);
    return arr;
}

// Lazily built worst-tail envelopes keyed by level.
class Envelopes {
public:
    Envelopes(const HeatKernel& kernel, const Distribution& mu, const SearchSpec& spec)
        : kernel_(kernel), mu_(mu), spec_(spec) {}

    const TailEnvelope& at(double level) {
        auto it = cache_.find(level);
        if (it == cache_.end())
            it = cache_
                     .emplace(level, std::make_unique<TailEnvelope>(kernel_.chain(), mu_, level, spec_,
                                                                     kernel_.t_rel()))
                     .first;
        return *it->second;
    }
    // hit_{level,mu}(e) with the conventions hit(e >= 1) = 0, hit(e <= 0) = inf
    double hit(double level, double e) { return at(level).hit(e); }

private:
    const HeatKernel& kernel_;
    const Distribution& mu_;
    const SearchSpec& spec_;
    std::map<double, std::unique_ptr<TailEnvelope>> cache_;
};

double mix_mu(const HeatKernel& kernel, const Distribution& mu, double e) {
    if (e >= 1.0) return 0.0;
    if (e <= 0.0) return kInf;
    return t_mix_mu(kernel, mu, e);
}

void check_unit_interval(double eps, double hi, const char* what) {
    if (!(eps > 0.0 && eps <= hi)) throw Error(Errc::EpsOutOfRange, std::string(what) + " out of range");
}

}  // namespace

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "pass";
        case Verdict::Fail: return "fail";
        case Verdict::ReportedOnly: return "reported-only";
    }
    return "?";
}

void rejudge(CertificateReport& r, double tol) {
    if (r.verdict == Verdict::ReportedOnly) return;
    bool ok;
    if (std::isnan(r.lhs) || std::isnan(r.rhs)) ok = false;
    else if (r.rhs == kInf || r.lhs == -kInf) ok = true;
    else ok = r.slack >= -tol * std::max(1.0, std::abs(r.rhs));
    r.verdict = ok ? Verdict::Pass : Verdict::Fail;
}

CertificateReport judge(std::string name, double lhs, double rhs, std::string unit, std::string lhs_source,
                        std::string rhs_source, nlohmann::ordered_json context, double tol) {
    CertificateReport r;
    r.name = std::move(name);
    r.lhs = lhs;
    r.rhs = rhs;
    r.slack = rhs - lhs;
    r.unit = std::move(unit);
    r.lhs_source = std::move(lhs_source);
    r.rhs_source = std::move(rhs_source);
    r.context = std::move(context);
    rejudge(r, tol);
    return r;
}

CertificateReport reported_only(std::string name, double value, double reference, std::string unit,
                                std::string lhs_source, std::string rhs_source, nlohmann::ordered_json context) {
    CertificateReport r;
    r.name = std::move(name);
    r.lhs = value;
    r.rhs = reference;
    r.slack = reference - value;
    r.unit = std::move(unit);
    r.verdict = Verdict::ReportedOnly;
    r.lhs_source = std::move(lhs_source);
    r.rhs_source = std::move(rhs_source);
    r.context = std::move(context);
    return r;
}

bool all_pass(const std::vector<CertificateReport>& reports) {
    return std::none_of(reports.begin(), reports.end(), [](const auto& r) { return r.verdict == Verdict::Fail; });
}

std::vector<CertificateReport> check_trel_sandwich(const HeatKernel& kernel, double eps) {
    if (!(eps > 0.0 && eps < 0.5)) throw Error(Errc::EpsOutOfRange, "eps must lie in (0, 1/2)");
    const double trel = kernel.t_rel();
    const double tm = t_mix(kernel, eps);
    const double min_pi = kernel.chain().pi().minCoeff();
    nlohmann::ordered_json ctx{{"eps", eps}, {"t_rel", trel}};
    std::vector<CertificateReport> out;
    out.push_back(judge("trel_sandwich.lower", trel * std::log(1.0 / (2.0 * eps)), tm, "time", "spectral:t_rel",
                        "distance:t_mix", ctx));
    out.push_back(judge("trel_sandwich.upper", tm, trel * std::log(1.0 / (eps * min_pi)), "time", "distance:t_mix",
                        "spectral:t_rel", ctx));
    return out;
}

CertificateReport check_contraction(const HeatKernel& kernel, const Vector& f, double t) {
    if (!(t >= 0.0)) throw Error(Errc::NegativeTime, "time must be >= 0");
    const Vector& pi = kernel.chain().pi();
    if (f.size() != pi.size()) throw Error(Errc::DimensionMismatch, "function length differs from the chain");
    double lhs = pi_var(pi, kernel.apply_function(f, t));
    double decay = t == 0.0 ? 1.0 : std::exp(-2.0 * t / kernel.t_rel());
    return judge("l2_contraction", lhs, decay * pi_var(pi, f), "variance",
                 std::string("heat_kernel:") + method_name(kernel.method()), "spectral:t_rel", {{"t", t}});
}

CertificateReport check_contraction(const HeatKernel& kernel, std::size_t trials, std::uint64_t seed) {
    if (trials == 0) throw Error(Errc::InvalidArgument, "trials must be >= 1");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> unit;
    const auto n = static_cast<Eigen::Index>(kernel.size());
    std::optional<CertificateReport> tightest;
    std::size_t failures = 0;
    for (std::size_t k = 0; k < trials; ++k) {
        Vector f(n);
        for (Eigen::Index i = 0; i < n; ++i) f(i) = normal(rng);
        double t = 10.0 * kernel.t_rel() * unit(rng);
        auto r = check_contraction(kernel, f, t);
        if (r.verdict == Verdict::Fail) ++failures;
        if (!tightest || relative_slack(r) < relative_slack(*tightest)) tightest = std::move(r);
    }
    tightest->context["trials"] = trials;
    tightest->context["seed"] = seed;
    tightest->context["failures"] = failures;
    tightest->note = "tightest of the random instances";
    return *tightest;
}

Vector maximal_function(const HeatKernel& kernel, const Vector& f, double s, const MaximalOptions& opts) {
    const Vector& pi = kernel.chain().pi();
    if (f.size() != pi.size()) throw Error(Errc::DimensionMismatch, "function length differs from the chain");
    if (!(s >= 0.0)) throw Error(Errc::NegativeTime, "start time must be >= 0");
    const double trel = kernel.t_rel();
    const double var = pi_var(pi, f);
    const double mean = std::abs(pi_mean(pi, f));
    if (trel == 0.0) {
        Vector out = Vector::Constant(f.size(), mean);
        return s == 0.0 ? Vector(out.cwiseMax(f.cwiseAbs())) : out;
    }
    if (var <= opts.variance_floor) return kernel.apply_function(f, s).cwiseAbs();

    const double log_floor = std::abs(std::log(opts.variance_floor));
    const double cap = std::max(0.5 * trel * std::log(var / opts.variance_floor), 20.0 * trel * (1.0 + log_floor));
    const double u0 = 1e-3 * trel;
    const auto per_decade = static_cast<double>(opts.points_per_decade);
    const auto steps = static_cast<std::size_t>(std::ceil(std::log10(cap / u0) * per_decade));
    std::vector<double> grid{s};
    for (std::size_t k = 0; k <= steps; ++k)
        grid.push_back(s + std::min(cap, u0 * std::pow(10.0, static_cast<double>(k) / per_decade)));

    auto eval = [&](const std::vector<double>& times) {
        std::vector<Vector> vals(times.size());
        const auto m = static_cast<std::ptrdiff_t>(times.size());
#pragma omp parallel for schedule(dynamic, 1)
        for (std::ptrdiff_t i = 0; i < m; ++i)
            vals[static_cast<std::size_t>(i)] = kernel.apply_function(f, times[static_cast<std::size_t>(i)]).cwiseAbs();
        return vals;
    };

    const auto n = static_cast<std::size_t>(f.size());
    auto base = eval(grid);
    Vector best(f.size());
    std::vector<double> lo(n), hi(n), at(n);
    for (std::size_t x = 0; x < n; ++x) {
        std::size_t arg = 0;
        for (std::size_t i = 1; i < grid.size(); ++i)
            if (base[i](static_cast<Eigen::Index>(x)) > base[arg](static_cast<Eigen::Index>(x))) arg = i;
        best(static_cast<Eigen::Index>(x)) = base[arg](static_cast<Eigen::Index>(x));
        at[x] = grid[arg];
        lo[x] = grid[arg == 0 ? 0 : arg - 1];
        hi[x] = grid[std::min(arg + 1, grid.size() - 1)];
    }

    // Zoom into the bracket around each state's maximiser.
    constexpr std::size_t kInner = 8;
    for (std::size_t round = 0; round < opts.refine_rounds; ++round) {
        std::map<std::pair<double, double>, std::vector<std::size_t>> groups;
        for (std::size_t x = 0; x < n; ++x)
            if (hi[x] > lo[x]) groups[{lo[x], hi[x]}].push_back(x);
        if (groups.empty()) break;
        std::vector<double> times;
        for (const auto& [br, members] : groups)
            for (std::size_t k = 1; k <= kInner; ++k)
                times.push_back(br.first + (br.second - br.first) * static_cast<double>(k) / (kInner + 1));
        auto vals = eval(times);
        std::size_t offset = 0;
        for (const auto& [br, members] : groups) {
            for (auto x : members) {
                const auto xi = static_cast<Eigen::Index>(x);
                std::vector<std::pair<double, double>> pts{{br.first, -1.0}, {br.second, -1.0}, {at[x], best(xi)}};
                for (std::size_t k = 0; k < kInner; ++k) pts.emplace_back(times[offset + k], vals[offset + k](xi));
                std::sort(pts.begin(), pts.end());
                std::size_t arg = 0;
                for (std::size_t i = 0; i < pts.size(); ++i)
                    if (pts[i].second > pts[arg].second) arg = i;
                if (pts[arg].second > best(xi)) best(xi) = pts[arg].second;
                at[x] = pts[arg].first;
                lo[x] = pts[arg == 0 ? 0 : arg - 1].first;
                hi[x] = pts[std::min(arg + 1, pts.size() - 1)].first;
            }
            offset += kInner;
        }
    }
    return best;
}

CertificateReport check_starr(const HeatKernel& kernel, const Vector& f, const MaximalOptions& opts) {
    const Vector& pi = kernel.chain().pi();
    Vector fs = maximal_function(kernel, f, 0.0, opts);
    auto r = judge("starr_maximal", pi_norm(pi, fs), 2.0 * pi_norm(pi, f), "l2_norm", "maximal_function:grid",
                   "direct");
    r.note = "grid supremum; a necessary-condition check";
    return r;
}

StateSet good_set(const HeatKernel& kernel, const StateSet& B_in, double s, double m, const MaximalOptions& opts) {
    const auto& chain = kernel.chain();
    StateSet B = make_set(B_in, chain.size());
    if (B.empty() || B.size() == chain.size())
        throw Error(Errc::InvalidArgument, "B must be a nonempty proper subset");
    if (!(m > 0.0)) throw Error(Errc::InvalidArgument, "m must be positive");
    const double pb = measure(chain.pi(), B);
    Vector f = Vector::Constant(static_cast<Eigen::Index>(chain.size()), -pb);
    for (auto x : B) f(static_cast<Eigen::Index>(x)) += 1.0;
    Vector fs = maximal_function(kernel, f, s, opts);
    double sigma = std::sqrt(pb * (1.0 - pb)) * (s == 0.0 ? 1.0 : std::exp(-s / kernel.t_rel()));
    StateSet G;
    for (std::size_t y = 0; y < chain.size(); ++y)
        if (fs(static_cast<Eigen::Index>(y)) < m * sigma) G.push_back(y);
    return G;
}

CertificateReport check_good_set(const HeatKernel& kernel, const StateSet& B, double s, double m,
                                 const MaximalOptions& opts) {
    StateSet G = good_set(kernel, B, s, m, opts);
    return judge("good_set_measure", 1.0 - 4.0 / (m * m), measure(kernel.chain().pi(), G), "probability",
                 "closed_form", "maximal_function:grid",
                 {{"B", set_json(make_set(B, kernel.size()), kernel.chain())}, {"s", s}, {"m", m},
                  {"good_set_size", G.size()}});
}

std::vector<CertificateReport> check_stationary_hitting(const HeatKernel& kernel, const StateSet& A_in,
                                                        const std::vector<double>& t_grid,
                                                        const std::vector<double>& w_grid,
                                                        const std::vector<double>& alpha_grid) {
    const auto& chain = kernel.chain();
    StateSet A = make_set(A_in, chain.size());
    if (A.empty() || A.size() == chain.size())
        throw Error(Errc::InvalidArgument, "A must be a nonempty proper subset");
    const double pa = measure(chain.pi(), A);
    const double trel = kernel.t_rel();
    KilledChain killed(chain, A);
    Distribution pi = Distribution::stationary(chain);
    auto aj = set_json(A, chain);
    std::vector<CertificateReport> out;
    for (double t : t_grid) {
        double lhs = killed.survival(pi, t);
        double rhs = (1.0 - pa) * (t == 0.0 ? 1.0 : std::exp(-t * pa / trel));
        out.push_back(judge("stationary_tail", lhs, rhs, "probability", "hitting:killed_chain", "spectral:t_rel",
                            {{"A", aj}, {"t", t}}));
    }
    for (double w : w_grid) {
        if (w < 0.0) throw Error(Errc::InvalidArgument, "w must be >= 0");
        Vector surv = killed.survival_all(w * trel / pa);
        for (double alpha : alpha_grid) {
            if (!(alpha > 0.0)) throw Error(Errc::InvalidArgument, "alpha must be positive");
            StateSet bad;
            for (std::size_t y = 0; y < chain.size(); ++y)
                if (surv(static_cast<Eigen::Index>(y)) >= alpha) bad.push_back(y);
            out.push_back(judge("bad_set_measure", measure(chain.pi(), bad), (1.0 - pa) * std::exp(-w) / alpha,
                                "probability", "hitting:killed_chain", "spectral:t_rel",
                                {{"A", aj}, {"w", w}, {"alpha", alpha}, {"bad_set_size", bad.size()}}));
        }
    }
    return out;
}

std::vector<CertificateReport> check_hit_mix_bounds(const HeatKernel& kernel, const Distribution& mu,
                                                    const std::vector<double>& eps_grid, const SearchSpec& spec) {
    const auto& chain = kernel.chain();
    const double trel = kernel.t_rel();
    const Vector& pi = chain.pi();
    Envelopes env(kernel, mu, spec);
    const std::string hit_src = std::string("hitting:") + mode_name(spec.mode);
    const std::string mix_src = "distance:t_mix_mu";
    std::vector<CertificateReport> out;
    auto add = [&](std::string name, double lhs, double rhs, const std::string& ls, const std::string& rs,
                   nlohmann::ordered_json ctx) {
        out.push_back(judge(std::move(name), lhs, rhs, "time", ls, rs, std::move(ctx)));
    };

    for (double eps : eps_grid) {
        check_unit_interval(eps, 0.5, "eps");
        const double le = std::abs(std::log(eps));
        const double tm_e = mix_mu(kernel, mu, eps);
        const double tm_1e = mix_mu(kernel, mu, 1.0 - eps);
        nlohmann::ordered_json ctx{{"eps", eps}};

        add("hit_mix.small_eps.lower", env.hit(0.5, 1.5 * eps) - 2.0 * trel * le, tm_e, hit_src, mix_src, ctx);
        add("hit_mix.small_eps.upper", tm_e, env.hit(0.5, 0.75 * eps) + trel * std::log(16.0 / eps), mix_src,
            hit_src, ctx);
        add("hit_mix.large_eps.lower", env.hit(0.5, 1.0 - eps / 2.0) - 2.0 * trel * le, tm_1e, hit_src, mix_src, ctx);
        add("hit_mix.large_eps.upper", tm_1e, env.hit(0.5, 1.0 - 2.0 * eps) + 0.5 * trel * std::log(8.0), mix_src,
            hit_src, ctx);

        add("tv_hit.half_eps", mix_mu(kernel, mu, 1.0 - eps / 2.0),
            env.hit(1.0 - eps, 1.0 - eps) + 0.5 * trel * std::log(64.0 / eps), mix_src, hit_src, ctx);
        add("tv_hit.quarter_level.lower", env.hit(1.0 - eps / 4.0, 1.25 * eps), tm_e, hit_src, mix_src, ctx);
        add("tv_hit.quarter_level.upper", tm_e, env.hit(1.0 - eps / 4.0, 0.75 * eps) + 1.5 * trel * std::log(16.0 / eps),
            mix_src, hit_src, ctx);

        for (double p : {0.25, 0.5}) {
            const double k = std::log(2.0 / std::sqrt(eps) * (1.0 - p));
            const double tp = env.hit(1.0 - eps, p);
            for (double w : {-k, 0.0, 1.0, 2.0}) {
                if (w < -k) continue;
                add("tv_hit.shifted", mix_mu(kernel, mu, p + 2.0 * std::exp(-w)), tp + trel * (w + k), mix_src, hit_src,
                    {{"eps", eps}, {"p", p}, {"w", w}});
            }
            for (double sm : {0.0, 1.0, 3.0}) {
                const double s = sm * trel;
                Distribution h = kernel.apply(mu, tp + s);
                StateSet B;
                for (std::size_t x = 0; x < chain.size(); ++x)
                    if (h[x] < pi(static_cast<Eigen::Index>(x))) B.push_back(x);
                const double pb = measure(pi, B);
                const double lhs = pb - measure(h.probs(), B);
                const double rhs = p * pb + 2.0 * (1.0 - p) * std::exp(trel > 0.0 ? -s / trel : 0.0) *
                                                std::sqrt(pb * (1.0 - pb) / eps);
                out.push_back(judge("hit_prob_deficit", lhs, rhs, "probability",
                                    std::string("heat_kernel:") + method_name(kernel.method()), hit_src,
                                    {{"eps", eps}, {"p", p}, {"s", s}, {"B", set_json(B, chain)}}));
            }
        }

        const double s_eps = 2.0 * trel * le;
        for (double t : {tm_e, tm_1e}) {
            double lhs = env.at(0.5).value(t + s_eps);
            double rhs = distance_at(kernel, mu, t) + 0.5 * std::exp(trel > 0.0 ? -s_eps / (2.0 * trel) : -kInf);
            out.push_back(judge("coupling_tail", lhs, rhs, "probability", hit_src, "distance:d_mu",
                                {{"eps", eps}, {"t", t}, {"s", s_eps}}));
        }

        for (double delta : {0.5, 0.75}) {
            if (!(eps < delta)) continue;
            for (auto [beta, gamma] : {std::pair{0.25, 0.5}, std::pair{0.25, 0.75}, std::pair{0.5, 0.75}}) {
                nlohmann::ordered_json c{{"eps", eps}, {"delta", delta}, {"beta", beta}, {"gamma", gamma}};
                const double hb = env.hit(beta, delta);
                const std::string src_b = hit_src + ":level=" + std::to_string(beta);
                const std::string src_g = hit_src + ":level=" + std::to_string(gamma);
                add("hit_nesting.monotone", env.hit(gamma, delta), hb, src_g, src_b, c);
                add("hit_nesting.shift", hb,
                    env.hit(gamma, delta - eps) + trel / beta * std::log((1.0 - beta) / ((1.0 - gamma) * eps)), src_b,
                    src_g, c);
            }
        }
    }
    return out;
}

std::vector<std::string> suite_names() {
    return {"sandwich", "contraction", "starr", "good_set", "stationary_hitting", "hit_mix",
            "decomposition", "griffiths", "hitting_gap", "support"};
}

std::vector<CertificateReport> run_suite(const HeatKernel& kernel, const SuiteOptions& opts) {
    const auto& chain = kernel.chain();
    const std::size_t n = chain.size();
    auto known = suite_names();
    auto wanted = [&](const std::string& name) {
        return std::find(opts.suites.begin(), opts.suites.end(), "all") != opts.suites.end() ||
               std::find(opts.suites.begin(), opts.suites.end(), name) != opts.suites.end();
    };
    for (const auto& s : opts.suites)
        if (s != "all" && std::find(known.begin(), known.end(), s) == known.end())
            throw Error(Errc::InvalidArgument, "unknown suite '" + s + "'");

    std::size_t start = 0;
    if (!opts.mu_label.empty()) start = chain.index_of(opts.mu_label);
    else worst_distance_at(kernel, std::max(kernel.t_rel(), 1e-3), &start);
    const Distribution mu = Distribution::point(n, start);

    std::vector<double> open_eps;
    for (double e : opts.eps_grid)
        if (e > 0.0 && e < 0.5) open_eps.push_back(e);

    // Test sets: the heaviest half, the lightest state, the lower half of
    // the state list.
    std::vector<StateSet> sets;
    if (n >= 2) {
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return chain.pi()(a) > chain.pi()(b); });
        StateSet heavy;
        double mass = 0.0;
        for (auto x : order) {
            if (heavy.size() + 1 == n) break;
            heavy.push_back(x);
            mass += chain.pi()(static_cast<Eigen::Index>(x));
            if (mass >= 0.5) break;
        }
        sets.push_back(make_set(heavy, n));
        sets.push_back({order.back()});
        StateSet lower;
        for (std::size_t x = 0; x < std::max<std::size_t>(1, n / 2); ++x) lower.push_back(x);
        sets.push_back(lower);
        std::sort(sets.begin(), sets.end(), lex_less);
        sets.erase(std::unique(sets.begin(), sets.end()), sets.end());
    }

    using Batch = std::function<std::vector<CertificateReport>()>;
    std::vector<std::pair<std::string, Batch>> batches;
    if (wanted("sandwich"))
        batches.emplace_back("sandwich", [&] {
            std::vector<CertificateReport> out;
            for (double e : open_eps) {
                auto r = check_trel_sandwich(kernel, e);
                out.insert(out.end(), r.begin(), r.end());
            }
            return out;
        });
    if (wanted("contraction"))
        batches.emplace_back("contraction", [&] {
            std::vector<CertificateReport> out{check_contraction(kernel, 50, opts.seed)};
            if (n >= 2) {
                Vector f2 = kernel.spectral().basis.col(1);
                auto r = check_contraction(kernel, f2, kernel.t_rel());
                r.name = "l2_contraction.eigenfunction";
                out.push_back(std::move(r));
            }
            return out;
        });
    if (wanted("starr"))
        batches.emplace_back("starr", [&] {
            std::mt19937_64 rng(opts.seed + 1);
            std::normal_distribution<double> normal;
            std::optional<CertificateReport> tightest;
            std::size_t failures = 0;
            for (std::size_t k = 0; k < opts.random_functions; ++k) {
                Vector f(static_cast<Eigen::Index>(n));
                for (Eigen::Index i = 0; i < f.size(); ++i) f(i) = normal(rng);
                auto r = check_starr(kernel, f);
                if (r.verdict == Verdict::Fail) ++failures;
                if (!tightest || relative_slack(r) < relative_slack(*tightest)) tightest = std::move(r);
            }
            std::vector<CertificateReport> out;
            if (tightest) {
                tightest->context["functions"] = opts.random_functions;
                tightest->context["failures"] = failures;
                out.push_back(std::move(*tightest));
            }
            for (const auto& B : sets) {
                Vector f = Vector::Constant(static_cast<Eigen::Index>(n), -measure(chain.pi(), B));
                for (auto x : B) f(static_cast<Eigen::Index>(x)) += 1.0;
                auto r = check_starr(kernel, f);
                r.name = "starr_maximal.indicator";
                r.context["B"] = set_json(B, chain);
                out.push_back(std::move(r));
            }
            return out;
        });
    if (wanted("good_set"))
        batches.emplace_back("good_set", [&] {
            std::vector<CertificateReport> out;
            for (const auto& B : sets)
                for (double s : {0.0, 1.0, 5.0})
                    for (double m : {2.0, 3.0, 5.0}) out.push_back(check_good_set(kernel, B, s * kernel.t_rel(), m));
            return out;
        });
    if (wanted("stationary_hitting"))
        batches.emplace_back("stationary_hitting", [&] {
            std::vector<CertificateReport> out;
            const double tr = kernel.t_rel();
            for (const auto& A : sets) {
                auto r = check_stationary_hitting(kernel, A, {0.0, 0.5 * tr, tr, 2.0 * tr, 5.0 * tr}, {0.0, 1.0, 2.0},
                                                  {0.25, 0.5, 0.9});
                out.insert(out.end(), r.begin(), r.end());
            }
            return out;
        });
    if (wanted("hit_mix"))
        batches.emplace_back("hit_mix", [&] {
            std::vector<double> grid;
            for (double e : opts.eps_grid)
                if (e > 0.0 && e <= 0.5) grid.push_back(e);
            return check_hit_mix_bounds(kernel, mu, grid, opts.search);
        });
    if (wanted("decomposition"))
        batches.emplace_back("decomposition", [&] {
            std::vector<CertificateReport> out;
            for (double e : {0.3, 0.4})
                for (double p : {0.25, 0.5})
                    for (double w : {0.0, 1.0, 2.0}) {
                        auto d = decompose_measure(kernel, mu, e, p, w, opts.search);
                        out.insert(out.end(), d.reports.begin(), d.reports.end());
                    }
            return out;
        });
    if (wanted("griffiths"))
        batches.emplace_back("griffiths", [&] { return check_griffiths(chain, open_eps, opts.search); });
    if (wanted("hitting_gap"))
        batches.emplace_back("hitting_gap", [&] {
            auto out = check_hitting_gap(chain, mu, open_eps, opts.search, kernel.t_rel());
            if (n < 2) return out;
            const double tm = t_mix(kernel, 0.25);
            for (double alpha : {0.25, 0.5}) {
                const double th = worst_set_expectation_any_start(chain, alpha, opts.search).objective;
                out.push_back(reported_only("mix_over_t_H", tm / th, std::numeric_limits<double>::quiet_NaN(), "ratio",
                                            "distance:t_mix", "hitting:t_H", {{"alpha", alpha}, {"t_mix", tm},
                                                                             {"t_H", th}}));
            }
            return out;
        });
    if (wanted("support"))
        batches.emplace_back("support", [&] {
            if (n < 2) return std::vector<CertificateReport>{};
            SupportLemmaParams params;
            params.worst_in_expectation = opts.search.mode == SearchMode::Exact;
            StateSet A;
            if (opts.search.mode == SearchMode::Exact)
                A = worst_set_expectation(chain, mu, 1.0 - params.worst_eps, opts.search).set;
            else
                A = sets.front();
            return check_support_lemmas(kernel, mu, A, params, opts.search);
        });

    std::vector<std::vector<CertificateReport>> results(batches.size());
    std::vector<std::exception_ptr> errors(batches.size());
    const auto nb = static_cast<std::ptrdiff_t>(batches.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < nb; ++i) {
        auto k = static_cast<std::size_t>(i);
        try {
            results[k] = batches[k].second();
        } catch (...) {
            errors[k] = std::current_exception();
        }
    }
    std::vector<CertificateReport> out;
    for (std::size_t k = 0; k < batches.size(); ++k) {
        if (errors[k]) std::rethrow_exception(errors[k]);
        for (auto& r : results[k]) {
            r.context["suite"] = batches[k].first;
            out.push_back(std::move(r));
        }
    }
    return out;
}

}  // namespace mixhit
