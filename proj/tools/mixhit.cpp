#include "mixhit/cutoff.hpp"
#include "mixhit/error.hpp"
#include "mixhit/gallery.hpp"
#include "mixhit/io.hpp"
#include "mixhit/parallel.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

using namespace mixhit;

namespace {

constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ChainSource {
    std::string spec_path;
    std::string family_name;
    std::optional<std::size_t> n;
    std::vector<std::string> params;

    void add_to(CLI::App* cmd) {
        cmd->add_option("spec", spec_path, "Chain spec JSON file");
        cmd->add_option("--family", family_name, "Built-in family instead of a spec file");
        cmd->add_option("--n", n, "Size parameter of the family");
        cmd->add_option("--param", params, "Family parameter key=value (repeatable)");
    }
};

nlohmann::json parse_params(const std::vector<std::string>& items) {
    nlohmann::json out = nlohmann::json::object();
    for (const auto& item : items) {
        auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0) throw UsageError("--param expects key=value, got '" + item + "'");
        const std::string key = item.substr(0, eq), value = item.substr(eq + 1);
        auto parsed = nlohmann::json::parse(value, nullptr, false);
        out[key] = parsed.is_discarded() ? nlohmann::json(value) : parsed;
    }
    return out;
}

struct LoadedChain {
    std::string name;
    std::string family;  // empty for spec files
    ReversibleChain chain;
    std::string digest;
    nlohmann::ordered_json description;
};

LoadedChain load(const ChainSource& src) {
    const bool file = !src.spec_path.empty(), fam = !src.family_name.empty();
    if (file == fam) throw UsageError("give either a spec file or --family");
    if (file) {
        std::string text = read_file(src.spec_path);
        ChainSpec spec = parse_chain_spec(text);
        return {spec.name, "", std::move(spec.chain), sha256_hex(text),
                {{"kind", "file"}, {"name", spec.name}}};
    }
    nlohmann::json params = parse_params(src.params);
    if (src.n) params["n"] = *src.n;
    ReversibleChain chain = family(src.family_name, params);
    nlohmann::ordered_json desc{{"kind", "family"}, {"family", src.family_name}, {"params", params}};
    return {src.family_name, src.family_name, std::move(chain), sha256_hex(desc.dump()), desc};
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw UsageError("cannot write " + out_path);
    out << text;
}

std::vector<double> parse_list(const std::string& text, const char* flag) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw UsageError(std::string(flag) + ": '" + item + "' is not a number");
        }
    }
    if (out.empty()) throw UsageError(std::string(flag) + " is empty");
    return out;
}

SearchMode parse_mode(const std::string& m) {
    if (m == "exact") return SearchMode::Exact;
    if (m == "greedy") return SearchMode::Greedy;
    if (m == "candidates") return SearchMode::Candidates;
    throw UsageError("--mode must be exact, greedy or candidates");
}

NumberFormat parse_format(const std::string& f) {
    if (f == "shortest") return NumberFormat::Shortest;
    if (f == "fixed17") return NumberFormat::Fixed17;
    throw UsageError("--format must be shortest or fixed17");
}

int cmd_info(const ChainSource& src, const std::string& out) {
    LoadedChain lc = load(src);
    HeatKernel hk(lc.chain);
    auto doc = report_document("info", lc.digest, lc.description);
    const auto& states = lc.chain.states();
    auto pi = nlohmann::ordered_json::array();
    for (std::size_t x = 0; x < states.size(); ++x)
        pi.push_back({{"state", states[x]}, {"pi", number_json(lc.chain.pi()(static_cast<Eigen::Index>(x)))}});
    doc["states"] = states.size();
    doc["pi"] = std::move(pi);
    if (lc.family == "aldous") {
        auto exact = nlohmann::ordered_json::array();
        for (const auto& e : aldous_rational_pi((states.size() - 2) / 3))
            exact.push_back({{"state", e.from}, {"pi", e.value}});
        doc["pi_exact"] = std::move(exact);
    }
    doc["t_rel"] = number_json(hk.t_rel());
    doc["heat_method"] = method_name(hk.method());
    const Vector& ev = hk.spectral().eigenvalues;
    auto head = nlohmann::ordered_json::array(), tail = nlohmann::ordered_json::array();
    for (Eigen::Index i = 0; i < std::min<Eigen::Index>(5, ev.size()); ++i) head.push_back(number_json(ev(i)));
    for (Eigen::Index i = std::max<Eigen::Index>(0, ev.size() - 3); i < ev.size(); ++i) tail.push_back(number_json(ev(i)));
    doc["eigenvalues"] = {{"count", ev.size()}, {"largest", head}, {"smallest", tail}};
    emit(dump(doc), out);
    return 0;
}

int cmd_profile(const ChainSource& src, const std::string& mu_text, std::optional<double> tmax, std::size_t points,
                const std::string& fmt, const std::string& out) {
    if (points < 2) throw UsageError("--points must be at least 2");
    const NumberFormat nf = parse_format(fmt);
    LoadedChain lc = load(src);
    HeatKernel hk(lc.chain);
    const double t_max = tmax ? *tmax : 1.5 * t_mix(hk, 0.01);
    if (!(t_max > 0.0)) throw UsageError("--tmax must be positive");
    MuChoice mu = parse_mu_choice(mu_text);
    Profile p;
    switch (mu.rule) {
        case MuRule::WorstSingleton: p = worst_case_profile(hk, t_max, points); break;
        case MuRule::Stationary: p = mixing_profile(hk, Distribution::stationary(lc.chain), t_max, points); break;
        case MuRule::Labeled:
            p = mixing_profile(hk, Distribution::point(lc.chain.size(), resolve_state(lc.chain, mu.label)), t_max,
                               points);
            break;
    }
    emit(profile_csv(p, nf), out);
    return 0;
}

int cmd_certify(const ChainSource& src, const std::string& suites, const std::string& eps_grid,
                const std::string& mode, std::uint64_t seed, std::size_t functions, const std::string& mu,
                std::optional<double> tolerance, const std::string& out) {
    LoadedChain lc = load(src);
    SuiteOptions opts;
    opts.suites.clear();
    std::stringstream ss(suites);
    for (std::string s; std::getline(ss, s, ',');) opts.suites.push_back(s);
    if (opts.suites.empty()) throw UsageError("--suite is empty");
    opts.eps_grid = parse_list(eps_grid, "--eps-grid");
    const SearchMode m = parse_mode(mode);
    opts.search = m == SearchMode::Exact   ? SearchSpec::exact()
                  : m == SearchMode::Greedy ? SearchSpec::greedy()
                                            : SearchSpec::from_candidates(default_candidates(lc.family, lc.chain));
    opts.seed = seed;
    opts.random_functions = functions;
    opts.mu_label = mu;
    HeatKernel hk(lc.chain);
    auto reports = run_suite(hk, opts);
    if (tolerance)
        for (auto& r : reports) rejudge(r, *tolerance);
    auto doc = report_document("certify", lc.digest, lc.description);
    doc["options"] = {{"suites", opts.suites},     {"eps_grid", opts.eps_grid}, {"mode", mode_name(m)},
                      {"seed", seed},              {"random_functions", functions},
                      {"mu", mu.empty() ? "worst" : mu}, {"tolerance", number_json(tolerance.value_or(kCertTolerance))}};
    doc["t_rel"] = number_json(hk.t_rel());
    doc["heat_method"] = method_name(hk.method());
    doc["certificates"] = certificate_section(reports);
    emit(dump(doc), out);
    return all_pass(reports) ? 0 : kExitFail;
}

void add_unique(std::vector<double>& grid, double x) {
    for (double g : grid)
        if (std::abs(g - x) <= 1e-12) return;
    grid.push_back(x);
    std::sort(grid.begin(), grid.end());
}

int cmd_sweep(const std::string& fam, const std::vector<std::string>& params, const std::string& schedule,
              double alpha, double eps, const std::string& mode, const std::string& mu, const std::string& k_target,
              const std::string& out) {
    if (fam.empty()) throw UsageError("--family is required");
    if (!(eps > 0.0 && eps < 0.5)) throw UsageError("--eps must lie in (0, 1/2)");
    SweepConfig cfg;
    cfg.family = fam;
    cfg.params = parse_params(params);
    for (double v : parse_list(schedule, "--schedule")) {
        if (!(v >= 1.0) || v != std::floor(v)) throw UsageError("--schedule entries must be positive integers");
        cfg.schedule.push_back(static_cast<std::size_t>(v));
    }
    cfg.alpha = alpha;
    cfg.mode = parse_mode(mode);
    cfg.mu = parse_mu_choice(mu);
    cfg.k_target = k_target;
    add_unique(cfg.eps_grid, eps);
    add_unique(cfg.eps_grid, 1.0 - eps);
    add_unique(cfg.hit_eps, eps);
    add_unique(cfg.hit_eps, 1.0 - eps);
    add_unique(cfg.concentration_eps, eps);

    SequenceSweep s = sweep(cfg);
    nlohmann::ordered_json desc{{"kind", "sweep"}, {"family", fam}, {"params", cfg.params}, {"schedule", cfg.schedule}};
    auto doc = report_document("sweep", sha256_hex(desc.dump()), desc);
    doc["options"] = {{"alpha", number_json(alpha)}, {"eps", number_json(eps)}, {"mode", mode_name(cfg.mode)},
                      {"mu", mu.empty() ? "worst" : mu}, {"k_target", k_target}};
    doc["sweep"] = to_json(s);
    auto diags = nlohmann::ordered_json::array();
    diags.push_back(to_json(cutoff_ratio_diagnostic(s, eps)));
    diags.push_back(to_json(hit_cutoff_diagnostic(s, alpha, eps)));
    diags.push_back(to_json(product_condition(s)));
    diags.push_back(to_json(concentration_diagnostic(s, alpha, eps)));
    if (fam == "aldous") diags.push_back(to_json(worst_state_locator(s)));
    doc["diagnostics"] = std::move(diags);
    emit(dump(doc), out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    apply_thread_env();
    CLI::App app{"Mixing and hitting times of finite reversible chains"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(tool_version()));

    ChainSource info_src, prof_src, cert_src;
    std::string out;

    auto* info = app.add_subcommand("info", "Stationary law, relaxation time and spectrum");
    info_src.add_to(info);
    info->add_option("--out", out, "Output path (default stdout)");

    auto* profile = app.add_subcommand("profile", "CSV of the TV distance profile");
    prof_src.add_to(profile);
    std::string prof_mu = "worst", fmt = "shortest";
    std::optional<double> tmax;
    std::size_t points = 200;
    profile->add_option("--mu", prof_mu, "worst, pi, or a state label")->capture_default_str();
    profile->add_option("--tmax", tmax, "Largest time (default 1.5 t_mix(0.01))");
    profile->add_option("--points", points, "Grid points")->capture_default_str();
    profile->add_option("--format", fmt, "shortest or fixed17")->capture_default_str();
    profile->add_option("--out", out, "Output path (default stdout)");

    auto* certify = app.add_subcommand("certify", "Run the certificate suites");
    cert_src.add_to(certify);
    std::string suites = "all", eps_grid = "0.05,0.1,0.25,0.5", mode = "exact", cert_mu;
    std::uint64_t seed = 1;
    std::size_t functions = 100;
    std::optional<double> tolerance;
    certify->add_option("--suite", suites, "Comma-separated suites or 'all'")->capture_default_str();
    certify->add_option("--eps-grid", eps_grid, "Comma-separated eps values")->capture_default_str();
    certify->add_option("--mode", mode, "exact, greedy or candidates")->capture_default_str();
    certify->add_option("--seed", seed, "Seed for random test functions")->capture_default_str();
    certify->add_option("--functions", functions, "Random functions per suite")->capture_default_str();
    certify->add_option("--mu", cert_mu, "Start state label (default: worst TV start)");
    certify->add_option("--tolerance", tolerance, "Relative slack tolerance for pass/fail");
    certify->add_option("--out", out, "Output path (default stdout)");

    auto* sweep_cmd = app.add_subcommand("sweep", "Cutoff diagnostics over a family schedule");
    std::string sw_family, schedule, sw_mode = "candidates", sw_mu = "worst", k_target;
    std::vector<std::string> sw_params;
    double alpha = 0.5, eps = 0.05;
    sweep_cmd->add_option("--family", sw_family, "Family name")->required();
    sweep_cmd->add_option("--schedule", schedule, "Comma-separated sizes")->required();
    sweep_cmd->add_option("--param", sw_params, "Family parameter key=value (repeatable)");
    sweep_cmd->add_option("--alpha", alpha, "Measure threshold of the hitting quantities")->capture_default_str();
    sweep_cmd->add_option("--eps", eps, "eps of the cutoff diagnostics")->capture_default_str();
    sweep_cmd->add_option("--mode", sw_mode, "exact, greedy or candidates")->capture_default_str();
    sweep_cmd->add_option("--mu", sw_mu, "worst, pi, or a state label")->capture_default_str();
    sweep_cmd->add_option("--k-target", k_target, "Target state of the k_n(p) quantiles");
    sweep_cmd->add_option("--out", out, "Output path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*info) return cmd_info(info_src, out);
        if (*profile) return cmd_profile(prof_src, prof_mu, tmax, points, fmt, out);
        if (*certify)
            return cmd_certify(cert_src, suites, eps_grid, mode, seed, functions, cert_mu, tolerance, out);
        if (*sweep_cmd) return cmd_sweep(sw_family, sw_params, schedule, alpha, eps, sw_mode, sw_mu, k_target, out);
    } catch (const UsageError& e) {
        std::cerr << "mixhit: " << e.what() << "\n";
        return kExitUsage;
    } catch (const Error& e) {
        std::cerr << "mixhit: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
