// Acceptance runner: one PASS/FAIL line per criterion.
#include "mixhit/certify.hpp"
#include "mixhit/cutoff.hpp"
#include "mixhit/gallery.hpp"
#include "mixhit/io.hpp"
#include "testing.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

using namespace mixhit;
using namespace mixhit::testing;

namespace {

struct Outcome {
    bool pass = true;
    std::string summary;
};

// Collects detail lines and folds sub-checks into one verdict.
class Log {
public:
    void check(bool ok, const std::string& what) {
        if (!ok) pass_ = false;
        std::cout << "    [" << (ok ? "ok" : "FAIL") << "] " << what << "\n";
    }
    void info(const std::string& what) { std::cout << "    " << what << "\n"; }
    bool pass() const { return pass_; }

private:
    bool pass_ = true;
};

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

struct Named {
    std::string name;
    ReversibleChain chain;
};

// Row-block Poisson series for all point starts: sum_k e^{-t} t^k / k! P^k.
Matrix poisson_all_starts(const Matrix& P, double t, double tail_tol) {
    const auto n = P.rows();
    const std::size_t K = poisson_truncation(t, tail_tol);
    Matrix power = Matrix::Identity(n, n);
    Matrix acc = Matrix::Zero(n, n);
    for (std::size_t k = 0; k <= K; ++k) {
        const double logw = -t + static_cast<double>(k) * std::log(t) - std::lgamma(static_cast<double>(k) + 1.0);
        if (logw > -745.0) acc += std::exp(logw) * power;
        if (k < K) power = power * P;
    }
    return acc;
}

// ---------------------------------------------------------------- 1
Outcome criterion_oracle(Log& log) {
    std::vector<Named> gallery;
    for (double p : {0.1, 0.5, 0.9})
        for (double q : {0.2, 0.5, 1.0}) gallery.push_back({"two_state(" + num(p) + "," + num(q) + ")", two_state(p, q)});
    for (std::size_t n : {2u, 5u, 10u, 20u}) {
        gallery.push_back({"biased_path(" + std::to_string(n) + ")", biased_path(n, 2.0 / 3.0)});
        gallery.push_back({"unit_path(" + std::to_string(n) + ")", path_conductance(std::vector<double>(n - 1, 1.0), {})});
    }
    for (std::size_t n : {5u, 10u, 20u}) gallery.push_back({"random_tree(" + std::to_string(n) + ")", random_tree(n, n)});
    for (std::size_t m = 4; m <= 8; ++m) gallery.push_back({"complete(" + std::to_string(m) + ")", complete(m)});
    for (std::size_t n : {20u, 50u}) gallery.push_back({"aldous(" + std::to_string(n) + ")", aldous(n).chain});

    double worst_raw = 0.0, worst_auto = 0.0;
    for (const auto& g : gallery) {
        HeatKernel spectral(g.chain, HeatMethod::Spectral), autok(g.chain);
        const auto n = static_cast<Eigen::Index>(g.chain.size());
        double raw = 0.0, routed = 0.0;
        for (double mult : {0.1, 1.0, 10.0}) {
            const double t = mult * spectral.t_rel();
            Matrix oracle = poisson_all_starts(g.chain.kernel(), t, 1e-14);
            raw = std::max(raw, (heat_kernel_rows(spectral.spectral(), Matrix::Identity(n, n), t) - oracle)
                                    .cwiseAbs()
                                    .maxCoeff());
            routed = std::max(routed, (autok.rows(Matrix::Identity(n, n), t) - oracle).cwiseAbs().maxCoeff());
        }
        worst_raw = std::max(worst_raw, raw);
        worst_auto = std::max(worst_auto, routed);
        log.check(raw <= 1e-8, g.name + ": eigen route sup error " + num(raw) + ", amplification " +
                                   num(basis_amplification(spectral.spectral())) + "; auto route (" +
                                   method_name(autok.method()) + ") " + num(routed));
    }
    return {log.pass(), "eigen vs Poisson sup error " + num(worst_raw) + " (auto route " + num(worst_auto) + "), tol 1e-8"};
}

// ---------------------------------------------------------------- 2
Outcome criterion_closed_forms(Log& log) {
    auto chain = two_state(0.5, 0.5);
    HeatKernel hk(chain);
    auto d0 = Distribution::point(2, 0);
    const double tol = 1e-8;
    auto near = [&](double got, double want, const std::string& what) {
        log.check(std::abs(got - want) <= tol, what + " = " + num(got) + " (want " + num(want) + ")");
    };
    near(hk.t_rel(), 1.0, "t_rel");
    for (double t : {0.0, 0.25, 1.0, 3.0, 10.0}) near(distance_at(hk, d0, t), 0.5 * std::exp(-t), "d(" + num(t) + ")");
    near(t_mix_mu(hk, d0, 0.25), std::log(2.0), "t_mix(1/4)");
    near(expected_hitting(chain, d0, {1}), 2.0, "E_0[T_1]");
    near(hit_time(chain, d0, 0.5, 0.25, SearchSpec::exact()), 2.0 * std::log(4.0), "hit_{1/2}(1/4)");
    return {log.pass(), "two-state closed forms within 1e-8"};
}

// ---------------------------------------------------------------- 3
std::vector<Named> certificate_gallery() {
    std::vector<Named> g;
    g.push_back({"two_state(0.3,0.6)", two_state(0.3, 0.6)});
    g.push_back({"two_state(0.5,0.5)", two_state(0.5, 0.5)});
    g.push_back({"biased_path(10)", biased_path(10, 2.0 / 3.0)});
    g.push_back({"biased_path(19)", biased_path(19, 2.0 / 3.0)});
    g.push_back({"unit_path(12)", path_conductance(std::vector<double>(11, 1.0), {})});
    g.push_back({"complete(4)", complete(4)});
    g.push_back({"complete(8)", complete(8)});
    g.push_back({"random_tree(12,7)", random_tree(12, 7)});
    g.push_back({"random_tree(20,3)", random_tree(20, 3)});
    g.push_back({"random_weights(10,1)", random_weights(10, 1)});
    g.push_back({"random_weights(16,2,0.4)", random_weights(16, 2, 0.4)});
    g.push_back({"aldous(3)", aldous(3).chain});
    g.push_back({"aldous(6)", aldous(6).chain});
    return g;
}

Outcome criterion_certificates(Log& log) {
    std::size_t total = 0, failed = 0;
    for (const auto& g : certificate_gallery()) {
        HeatKernel hk(g.chain);
        SuiteOptions opts;
        opts.search = SearchSpec::exact();
        opts.random_functions = 100;
        auto reports = run_suite(hk, opts);
        std::size_t f = 0;
        std::string first;
        for (const auto& r : reports)
            if (r.verdict == Verdict::Fail) {
                if (!f) first = r.name + " lhs " + num(r.lhs) + " rhs " + num(r.rhs);
                ++f;
            }
        total += reports.size();
        failed += f;
        log.check(f == 0, g.name + ": " + std::to_string(reports.size()) + " reports, " + std::to_string(f) +
                              " failed" + (f ? "; first: " + first : ""));
    }
    return {log.pass(), std::to_string(total) + " certificates, " + std::to_string(failed) + " failed"};
}

// ---------------------------------------------------------------- 4
Outcome criterion_decomposition(Log& log) {
    std::size_t total = 0;
    for (const auto& g : certificate_gallery()) {
        HeatKernel hk(g.chain);
        std::size_t start = 0;
        worst_distance_at(hk, hk.t_rel(), &start);
        auto sigma = Distribution::point(g.chain.size(), start);
        double worst_identity = 0.0;
        std::size_t bad = 0;
        for (double eps : {0.3, 0.4})
            for (double p : {0.25, 0.5})
                for (double w : {0.0, 1.0, 2.0}) {
                    auto d = decompose_measure(hk, sigma, eps, p, w, SearchSpec::exact());
                    worst_identity = std::max({worst_identity, d.split_residual, d.mixture_residual, d.level_residual});
                    // pi(A) >= e^w/(1+e^w) for every level set, recomputed here.
                    const double floor = std::exp(w) / (1.0 + std::exp(w));
                    for (const auto& ws : d.bar_mu) {
                        double m = 0.0;
                        for (auto x : ws.set) m += g.chain.pi()(static_cast<Eigen::Index>(x));
                        if (m < floor - 1e-9) ++bad;
                    }
                    for (const auto& r : d.reports) {
                        ++total;
                        if (r.verdict == Verdict::Fail) ++bad;
                    }
                }
        log.check(worst_identity <= 1e-10 && bad == 0,
                  g.name + ": identity residual " + num(worst_identity) + ", failed bounds " + std::to_string(bad));
    }
    return {log.pass(), std::to_string(total) + " decomposition reports over the (eps, p, w) grid"};
}

// ---------------------------------------------------------------- 5
Outcome criterion_griffiths(Log& log) {
    std::size_t total = 0, failed = 0;
    double tightest = INFINITY;
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
        const std::size_t n = 3 + seed % 10;  // 3..12 states
        const double density = seed % 3 == 0 ? 1.0 : (seed % 3 == 1 ? 0.5 : 0.3);
        auto chain = random_weights(n, 1000 + seed, density);
        for (const auto& r : check_griffiths(chain, {0.1, 0.25, 0.4}, SearchSpec::exact())) {
            if (r.verdict == Verdict::ReportedOnly) continue;
            ++total;
            if (r.verdict == Verdict::Fail) {
                ++failed;
                log.check(false, "seed " + std::to_string(seed) + ": " + num(r.lhs) + " > " + num(r.rhs));
            }
            tightest = std::min(tightest, r.slack / std::max(1.0, std::abs(r.rhs)));
        }
    }
    log.check(failed == 0, std::to_string(total) + " instances, smallest relative slack " + num(tightest));
    return {log.pass(), "eps t_H(eps) <= t_H(1/2) on 25 random chains: " + std::to_string(failed) + " failures"};
}

// ---------------------------------------------------------------- 6
Outcome criterion_aldous(Log& log) {
    {
        std::ifstream in(data_path("aldous_n3_kernel.txt"));
        std::vector<std::string> want;
        for (std::string line; std::getline(in, line);)
            if (!line.empty()) want.push_back(line);
        std::vector<std::string> got;
        for (const auto& e : aldous_rational_kernel(3)) got.push_back(e.from + " " + e.to + " " + e.value);
        log.check(!want.empty() && got == want, "golden kernel n=3: " + std::to_string(got.size()) + " entries");
    }
    {
        double err = 0.0;
        for (std::size_t n = 2; n <= 12; ++n) {
            auto ac = aldous(n);
            Vector h = absorption_oracle(ac.chain.kernel(), {ac.v()}, {ac.z()});
            for (std::size_t l = 1; l <= n; ++l) {
                err = std::max(err, std::abs(h(static_cast<Eigen::Index>(ac.b(l))) - cb_probability_exact(n, l)));
                err = std::max(err, std::abs(h(static_cast<Eigen::Index>(ac.c(l))) - cb_probability_exact(n, l)));
            }
        }
        log.check(err <= 1e-11, "branch race probabilities vs absorption solves, n <= 12: max error " + num(err));
    }
    {
        auto ac = aldous(10);
        const Matrix& P = ac.chain.kernel();
        std::string values;
        bool below = true, above = true;
        for (std::size_t r = 0; r < 10; ++r) {
            const double step = hitting_oracle(P, {ac.c(r)})(static_cast<Eigen::Index>(ac.c(r + 1)));
            values += (r ? ", " : "") + num(step);
            if (step > 300.0) below = false;
            if (r >= 5 && !(step > 299.0)) above = false;
        }
        log.info("c-branch steps E_{c_{r+1}}[T_{c_r}], n=10, r=0..9: " + values);
        log.check(below, "every c-branch step <= 300");
        log.check(above, "c-branch steps > 299 for r >= 5");
    }
    for (std::size_t n : {10u, 50u}) {
        auto ac = aldous(n);
        Vector ez = hitting_oracle(ac.chain.kernel(), {ac.z()});
        const double ev = ez(static_cast<Eigen::Index>(ac.v())), ea = ez(static_cast<Eigen::Index>(ac.top()));
        const double nn = static_cast<double>(n);
        log.check(ev <= 153.0 * (nn + 1.0), "n=" + std::to_string(n) + ": E_v[T_z] = " + num(ev) + " <= " +
                                                num(153.0 * (nn + 1.0)));
        log.check(ea <= 159.0 * (nn + 1.0), "n=" + std::to_string(n) + ": E_a[T_z] = " + num(ea) + " <= " +
                                                num(159.0 * (nn + 1.0)));

        // E_{c_r}[T_z] split on whether v or z comes first, from dense solves.
        const Matrix& P = ac.chain.kernel();
        const auto N = P.rows();
        auto conditioned = [&](std::size_t hit, std::size_t avoid) {
            Vector h = absorption_oracle(P, {hit}, {avoid});
            Matrix M = Matrix::Identity(N, N) - P;
            Vector rhs = h;
            for (auto x : {hit, avoid}) {
                M.row(static_cast<Eigen::Index>(x)).setZero();
                M(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(x)) = 1.0;
                rhs(static_cast<Eigen::Index>(x)) = 0.0;
            }
            Vector g = M.fullPivLu().solve(rhs);
            return Vector(g.cwiseQuotient(h));
        };
        Vector cz = conditioned(ac.z(), ac.v()), cv = conditioned(ac.v(), ac.z());
        double residual = 0.0;
        for (std::size_t r = 1; r <= n; ++r) {
            const auto x = static_cast<Eigen::Index>(ac.c(r));
            const double q = cb_probability_exact(n, r);
            residual = std::max(residual, std::abs(ez(x) - ((1.0 - q) * cz(x) + q * (cv(x) + ev))) / ez(x));
        }
        double lib = NAN;
        for (const auto& rep : aldous_expectation_checks(n))
            if (rep.name == "aldous.c_mixture_identity") lib = rep.lhs;
        log.check(residual <= 1e-9 && lib <= 1e-9, "n=" + std::to_string(n) + ": c-branch mixture residual " +
                                                        num(residual) + " (library " + num(lib) + ")");
    }
    return {log.pass(), "Aldous construction structure"};
}

// ---------------------------------------------------------------- 7
Outcome criterion_contrast(Log& log) {
    for (std::size_t n : {100u, 200u}) {
        auto start = std::chrono::steady_clock::now();
        auto ac = aldous(n);
        HeatKernel hk(ac.chain);
        KilledChain killed(ac.chain, {ac.z()});
        const double k49 = worst_start_quantile(killed, 0.49, hk.t_rel());
        const double k51 = worst_start_quantile(killed, 0.51, hk.t_rel());
        const double nn = static_cast<double>(n);
        log.check(k49 - k51 >= 3.0 * nn, "aldous(" + std::to_string(n) + "): k(0.49) - k(0.51) = " + num(k49 - k51) +
                                             " vs 3n = " + num(3.0 * nn) + " (k(0.49) = " + num(k49) + ")");
        const double t65 = t_mix(hk, 0.65), t35 = t_mix(hk, 0.35);
        log.check(t35 - t65 >= 50.0 * nn, "aldous(" + std::to_string(n) + "): plateau d in [0.35, 0.65] on [" +
                                              num(t65) + ", " + num(t35) + "], length " + num(t35 - t65) +
                                              " vs 50n = " + num(50.0 * nn));
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        log.info("aldous(" + std::to_string(n) + ") t_rel " + num(hk.t_rel()) + ", heat route " +
                 method_name(hk.method()) + ", " + num(secs) + " s");
    }
    std::vector<double> ratios;
    for (std::size_t n : {50u, 100u, 200u}) {
        HeatKernel hk(biased_path(n, 2.0 / 3.0));
        ratios.push_back(t_mix(hk, 0.05) / t_mix(hk, 0.95));
        log.info("biased_path(" + std::to_string(n) + "): t_mix(0.05)/t_mix(0.95) = " + num(ratios.back()));
    }
    log.check(ratios.back() <= 1.25, "biased_path(200) ratio " + num(ratios.back()) + " <= 1.25");
    log.check(trend_label(ratios) == "decreasing", "ratio trend over {50,100,200}: " + trend_label(ratios));
    return {log.pass(), "aldous plateau and quantile gap; biased_path window"};
}

// ---------------------------------------------------------------- 8
Outcome criterion_reported(Log& log) {
    std::size_t emitted = 0;
    for (const auto& g : {Named{"random_weights(10,1)", random_weights(10, 1)}, Named{"aldous(5)", aldous(5).chain}}) {
        HeatKernel hk(g.chain);
        SuiteOptions opts;
        opts.suites = {"hitting_gap"};
        for (const auto& r : run_suite(hk, opts)) {
            if (r.verdict != Verdict::ReportedOnly) continue;
            ++emitted;
            log.info(g.name + ": " + r.name + " = " + num(r.lhs) + " " + r.context.dump());
        }
    }
    log.check(emitted > 0, std::to_string(emitted) + " hitting-gap and t_mix/t_H ratios emitted");
    for (std::size_t n : {10u, 50u, 200u}) {
        auto r = aldous_pi_claim(n);
        const bool flagged = r.verdict == Verdict::ReportedOnly && r.lhs < 0.5 && r.note.find("does not hold") != std::string::npos;
        log.check(flagged, "aldous(" + std::to_string(n) + "): pi(z) = " + num(r.lhs) + ", claim 1/2; note: " + r.note);
        if (n == 200) log.check(std::abs(r.lhs - 0.395) < 0.005, "pi(z) at n=200 near 0.395");
    }
    return {log.pass(), "reported-only metrics emitted, pi(z) discrepancy flagged"};
}

// ---------------------------------------------------------------- 9
Outcome criterion_determinism(Log& log) {
    const std::vector<std::pair<std::string, std::string>> commands{
        {"certify random_tree", "certify --family random_tree --param n=12 --param seed=7"},
        {"certify aldous", "certify --family aldous --n 5"},
        {"sweep aldous", "sweep --family aldous --schedule 10,20 --k-target z"},
        {"sweep biased_path", "sweep --family biased_path --schedule 50,100"},
    };
    for (const auto& [label, args] : commands) {
        std::map<std::string, std::string> out;
        bool exited_ok = true;
        for (const char* threads : {"1", "8"})
            for (int rep = 0; rep < 2; ++rep) {
                auto r = run_command("MIXHIT_THREADS=" + std::string(threads) + " " + cli() + " " + args);
                if (r.exit_code != 0) exited_ok = false;
                out[std::string(threads) + "/" + std::to_string(rep)] = r.output;
            }
        bool same = true;
        for (const auto& [key, text] : out) same = same && text == out.begin()->second;
        log.check(exited_ok && same && !out.begin()->second.empty(),
                  label + ": " + std::to_string(out.begin()->second.size()) + " bytes, " +
                      (same ? "identical" : "DIFFERENT") + " across MIXHIT_THREADS in {1, 8}, two runs each");
    }
    return {log.pass(), "byte-identical certify and sweep reports"};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance checks"};
    std::vector<int> which;
    app.add_option("--criterion", which, "Criterion number(s) 1-9; default all")->check(CLI::Range(1, 9));
    CLI11_PARSE(app, argc, argv);
    if (which.empty())
        for (int k = 1; k <= 9; ++k) which.push_back(k);

    const std::vector<std::function<Outcome(Log&)>> criteria{
        criterion_oracle,      criterion_closed_forms, criterion_certificates,
        criterion_decomposition, criterion_griffiths,  criterion_aldous,
        criterion_contrast,    criterion_reported,     criterion_determinism};

    bool all = true;
    for (int k : which) {
        std::cout << "criterion " << k << ":\n";
        Log log;
        auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[static_cast<std::size_t>(k - 1)](log);
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << k << ": " << o.summary << " [" << num(secs)
                  << " s]\n"
                  << std::flush;
        all = all && o.pass;
    }
    return all ? 0 : 1;
}
