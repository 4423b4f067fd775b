#include "mixhit/cutoff.hpp"
#include "mixhit/error.hpp"
#include "mixhit/io.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>

namespace mixhit {

namespace {

std::size_t grid_index(const std::vector<double>& grid, double x, const char* what) {
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (std::abs(grid[i] - x) <= 1e-12) return i;
    throw Error(Errc::InvalidArgument, std::string(what) + " " + format_number(x) + " is not on the sweep grid");
}

void check_alpha(const SequenceSweep& s, double alpha) {
    if (std::abs(s.config.alpha - alpha) > 1e-12)
        throw Error(Errc::InvalidArgument, "alpha differs from the sweep's alpha " + format_number(s.config.alpha));
}

SearchSpec search_for(SearchMode mode, const std::string& fam, const ReversibleChain& chain) {
    switch (mode) {
        case SearchMode::Exact: return SearchSpec::exact();
        case SearchMode::Greedy: return SearchSpec::greedy();
        case SearchMode::Candidates: return SearchSpec::from_candidates(default_candidates(fam, chain));
    }
    return SearchSpec::exact();
}

std::vector<std::string> labels_of(const ReversibleChain& chain, const StateSet& set) {
    std::vector<std::string> out;
    for (auto x : set) out.push_back(chain.states()[x]);
    return out;
}

SweepRecord run_one(const SweepConfig& cfg, std::size_t n) {
    nlohmann::json params = cfg.params;
    params["n"] = n;
    ReversibleChain chain = family(cfg.family, params);
    HeatKernel hk(chain);
    const double trel = hk.t_rel();
    const std::size_t size = chain.size();

    SweepRecord r;
    r.n = n;
    r.states = size;
    r.t_rel = trel;
    r.heat_method = method_name(hk.method());
    for (double e : cfg.eps_grid) r.t_mix.push_back(t_mix(hk, e));

    Distribution mu = Distribution::stationary(chain);
    switch (cfg.mu.rule) {
        case MuRule::Stationary: r.mu_label = "pi"; break;
        case MuRule::Labeled: {
            auto x = resolve_state(chain, cfg.mu.label);
            mu = Distribution::point(size, x);
            r.mu_label = chain.states()[x];
            break;
        }
        case MuRule::WorstSingleton: {
            std::size_t x = 0;
            worst_distance_at(hk, t_mix(hk, 0.25), &x);
            mu = Distribution::point(size, x);
            r.mu_label = chain.states()[x];
            break;
        }
    }
    for (double e : cfg.eps_grid) r.t_mix_mu.push_back(t_mix_mu(hk, mu, e));

    const SearchSpec spec = search_for(cfg.mode, cfg.family, chain);
    r.search_mode = mode_name(spec.mode);
    TailEnvelope env(chain, mu, cfg.alpha, spec, trel);
    r.hit_lower_bound = env.lower_bound();
    for (double e : cfg.hit_eps) r.hit.push_back(env.hit(e));

    WorstSetResult th = worst_set_expectation(chain, mu, cfg.alpha, spec);
    r.t_h = th.objective;
    r.t_h_set = labels_of(chain, th.set);

    // P_mu[|T_A - t_mix,mu(1/4)| < eps E_mu[T_A]] from two survival values.
    const double tm = t_mix_mu(hk, mu, 0.25);
    KilledChain killed_a(chain, th.set);
    auto tail = [&](double t) { return t < 0.0 ? 1.0 : killed_a.survival(mu, t); };
    for (double e : cfg.concentration_eps)
        r.concentration.push_back(std::max(0.0, tail(tm - e * th.objective) - tail(tm + e * th.objective)));

    StateSet target = cfg.k_target.empty() ? th.set : StateSet{resolve_state(chain, cfg.k_target)};
    KilledChain killed_k(chain, target);
    for (double p : cfg.k_levels) r.k_values.push_back(worst_start_quantile(killed_k, p, trel));

    if (cfg.family == "aldous") {
        const std::size_t z = resolve_state(chain, "z");
        Vector ez = expected_hitting_all(chain, {z});
        Eigen::Index best = 0;
        ez.maxCoeff(&best);
        const std::string& label = chain.states()[static_cast<std::size_t>(best)];
        r.has_worst_state = true;
        r.worst_state.label = label;
        r.worst_state.expectation = ez(best);
        switch (label[0]) {
            case 'a': r.worst_state.branch = "a-branch"; break;
            case 'b': r.worst_state.branch = "b-branch"; break;
            case 'c': r.worst_state.branch = "c-branch"; break;
            default: r.worst_state.branch = label;
        }
        if (label[0] == 'b' || label[0] == 'c')
            r.worst_state.offset = static_cast<long>(n) - std::stol(label.substr(1));
    }
    return r;
}

nlohmann::ordered_json numbers(const std::vector<double>& v) {
    auto out = nlohmann::ordered_json::array();
    for (double x : v) out.push_back(number_json(x));
    return out;
}

}  // namespace

MuChoice parse_mu_choice(const std::string& text) {
    if (text.empty() || text == "worst") return {MuRule::WorstSingleton, {}};
    if (text == "pi") return {MuRule::Stationary, {}};
    return {MuRule::Labeled, text};
}

SequenceSweep sweep(const SweepConfig& config) {
    if (config.schedule.empty()) throw Error(Errc::InvalidArgument, "schedule is empty");
    for (std::size_t i = 1; i < config.schedule.size(); ++i)
        if (config.schedule[i] < config.schedule[i - 1])
            throw Error(Errc::InvalidArgument, "schedule must be non-decreasing");
    for (double e : config.eps_grid)
        if (!(e > 0.0 && e < 1.0)) throw Error(Errc::EpsOutOfRange, "eps grid entries must lie in (0, 1)");
    if (!(config.alpha > 0.0 && config.alpha < 1.0)) throw Error(Errc::InvalidArgument, "alpha must lie in (0, 1)");

    SequenceSweep out;
    out.config = config;
    const auto count = static_cast<long>(config.schedule.size());
    out.per_n.resize(config.schedule.size());
    std::vector<std::exception_ptr> errors(config.schedule.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (long i = 0; i < count; ++i) {
        const auto k = static_cast<std::size_t>(i);
        try {
            out.per_n[k] = run_one(config, config.schedule[k]);
        } catch (...) {
            errors[k] = std::current_exception();
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

std::string trend_label(const std::vector<double>& values) {
    if (values.size() < 2) return "flat";
    double scale = 1.0;
    for (double v : values)
        if (std::isfinite(v)) scale = std::max(scale, std::abs(v));
    const double tol = 1e-9 * scale;
    bool up = false, down = false;
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] == values[i - 1]) continue;
        const double d = values[i] - values[i - 1];
        if (std::isnan(d)) return "mixed";
        if (d > tol) up = true;
        if (d < -tol) down = true;
    }
    if (up && down) return "mixed";
    if (up) return "increasing";
    if (down) return "decreasing";
    return "flat";
}

namespace {

DiagnosticSeries finish(std::string name, const SequenceSweep& s, std::vector<double> values) {
    DiagnosticSeries d;
    d.name = std::move(name);
    for (const auto& r : s.per_n) d.n.push_back(r.n);
    d.values = std::move(values);
    d.trend = trend_label(d.values);
    d.last = d.values.empty() ? std::numeric_limits<double>::quiet_NaN() : d.values.back();
    d.note = "finite schedule only";
    return d;
}

}  // namespace

DiagnosticSeries cutoff_ratio_diagnostic(const SequenceSweep& s, double eps) {
    if (!(eps > 0.0 && eps < 0.5)) throw Error(Errc::EpsOutOfRange, "eps must lie in (0, 1/2)");
    const auto lo = grid_index(s.config.eps_grid, eps, "eps");
    const auto hi = grid_index(s.config.eps_grid, 1.0 - eps, "eps");
    std::vector<double> v;
    for (const auto& r : s.per_n) v.push_back(r.t_mix[lo] / r.t_mix[hi]);
    return finish("cutoff_ratio", s, std::move(v));
}

DiagnosticSeries hit_cutoff_diagnostic(const SequenceSweep& s, double alpha, double eps) {
    check_alpha(s, alpha);
    if (!(eps > 0.0 && eps < 0.5)) throw Error(Errc::EpsOutOfRange, "eps must lie in (0, 1/2)");
    const auto lo = grid_index(s.config.hit_eps, eps, "eps");
    const auto hi = grid_index(s.config.hit_eps, 1.0 - eps, "eps");
    const auto q = grid_index(s.config.hit_eps, 0.25, "eps");
    std::vector<double> v;
    for (const auto& r : s.per_n) v.push_back((r.hit[lo] - r.hit[hi]) / r.hit[q]);
    auto d = finish("hit_cutoff_gap", s, std::move(v));
    if (std::any_of(s.per_n.begin(), s.per_n.end(), [](const SweepRecord& r) { return r.hit_lower_bound; }))
        d.note += "; worst-set values are lower bounds";
    return d;
}

DiagnosticSeries product_condition(const SequenceSweep& s) {
    const auto q = grid_index(s.config.eps_grid, 0.25, "eps");
    std::vector<double> v;
    for (const auto& r : s.per_n) v.push_back(r.t_rel / r.t_mix[q]);
    return finish("product_condition", s, std::move(v));
}

DiagnosticSeries concentration_diagnostic(const SequenceSweep& s, double alpha, double eps) {
    check_alpha(s, alpha);
    const auto k = grid_index(s.config.concentration_eps, eps, "eps");
    std::vector<double> v;
    for (const auto& r : s.per_n) v.push_back(r.concentration[k]);
    return finish("concentration", s, std::move(v));
}

DiagnosticSeries worst_state_locator(const SequenceSweep& s) {
    std::vector<double> v;
    for (const auto& r : s.per_n) {
        if (!r.has_worst_state) throw Error(Errc::InvalidArgument, "worst_state_locator needs an aldous sweep");
        v.push_back(static_cast<double>(r.worst_state.offset));
    }
    auto d = finish("worst_state_offset", s, v);
    if (v.size() >= 2) {
        double mx = 0.0, my = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            mx += std::log(static_cast<double>(d.n[i]));
            my += v[i];
        }
        mx /= static_cast<double>(v.size());
        my /= static_cast<double>(v.size());
        double sxy = 0.0, sxx = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            const double dx = std::log(static_cast<double>(d.n[i])) - mx;
            sxy += dx * (v[i] - my);
            sxx += dx * dx;
        }
        if (sxx > 0.0) d.note += "; slope against log n = " + format_number(sxy / sxx);
    }
    return d;
}

nlohmann::ordered_json to_json(const SequenceSweep& s) {
    const auto& c = s.config;
    nlohmann::ordered_json out;
    out["family"] = c.family;
    out["params"] = c.params;
    out["schedule"] = c.schedule;
    out["eps_grid"] = numbers(c.eps_grid);
    out["alpha"] = number_json(c.alpha);
    out["hit_eps"] = numbers(c.hit_eps);
    out["concentration_eps"] = numbers(c.concentration_eps);
    out["k_levels"] = numbers(c.k_levels);
    out["k_target"] = c.k_target;
    auto rows = nlohmann::ordered_json::array();
    for (const auto& r : s.per_n) {
        nlohmann::ordered_json j;
        j["n"] = r.n;
        j["states"] = r.states;
        j["t_rel"] = number_json(r.t_rel);
        j["heat_method"] = r.heat_method;
        j["mu"] = r.mu_label;
        j["t_mix"] = numbers(r.t_mix);
        j["t_mix_mu"] = numbers(r.t_mix_mu);
        j["hit"] = numbers(r.hit);
        j["hit_lower_bound"] = r.hit_lower_bound;
        j["t_H"] = number_json(r.t_h);
        j["t_H_set"] = r.t_h_set;
        j["search_mode"] = r.search_mode;
        j["concentration"] = numbers(r.concentration);
        j["k"] = numbers(r.k_values);
        if (r.has_worst_state)
            j["worst_state"] = {{"label", r.worst_state.label},
                                {"branch", r.worst_state.branch},
                                {"offset", r.worst_state.offset},
                                {"expectation", number_json(r.worst_state.expectation)}};
        rows.push_back(std::move(j));
    }
    out["per_n"] = std::move(rows);
    return out;
}

nlohmann::ordered_json to_json(const DiagnosticSeries& d) {
    nlohmann::ordered_json out;
    out["name"] = d.name;
    out["n"] = d.n;
    out["values"] = numbers(d.values);
    out["trend"] = d.trend;
    out["last"] = number_json(d.last);
    out["note"] = d.note;
    return out;
}

}  // namespace mixhit
