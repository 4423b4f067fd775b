#include "mixhit/certify.hpp"
#include "mixhit/error.hpp"
#include "mixhit/hitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mixhit {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Matrix sub_matrix(const Matrix& m, const StateSet& rows, const StateSet& cols) {
    Matrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j)
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                m(static_cast<Eigen::Index>(rows[i]), static_cast<Eigen::Index>(cols[j]));
    return out;
}

StateSet set_minus(const StateSet& a, const StateSet& b) {
    StateSet out;
    for (auto x : a)
        if (!contains(b, x)) out.push_back(x);
    return out;
}

nlohmann::ordered_json set_json(const StateSet& s, const ReversibleChain& chain) {
    auto arr = nlohmann::ordered_json::array();
    for (auto x : s) arr.push_back(chain.states()[x]);
    return arr;
}

void check_delay_args(const ReversibleChain& chain, const Distribution& mu, const StateSet& A, const StateSet& B,
                      double c) {
    if (mu.size() != chain.size()) throw Error(Errc::DimensionMismatch, "distribution length differs from the chain");
    if (A.empty() || B.empty()) throw Error(Errc::EmptyTarget, "A and B must be nonempty");
    if (!(c > 0.0)) throw Error(Errc::InvalidArgument, "delay must be positive");
}

}  // namespace

double delayed_hit_probability(const ReversibleChain& chain, const Distribution& mu, const StateSet& A_in,
                               const StateSet& B_in, double c) {
    const std::size_t n = chain.size();
    StateSet A = make_set(A_in, n), B = make_set(B_in, n);
    check_delay_args(chain, mu, A, B, c);
    StateSet entry = set_minus(A, B);
    if (entry.empty()) return 0.0;
    StateSet U = A;
    U.insert(U.end(), B.begin(), B.end());
    U = make_set(U, n);
    StateSet free = complement(U, n);

    // Probability of entering A at each a in A \ B before touching B.
    Vector into = Vector::Zero(static_cast<Eigen::Index>(entry.size()));
    for (std::size_t k = 0; k < entry.size(); ++k) into(static_cast<Eigen::Index>(k)) = mu[entry[k]];
    if (!free.empty()) {
        const auto m = static_cast<Eigen::Index>(free.size());
        Matrix IM = Matrix::Identity(m, m) - sub_matrix(chain.kernel(), free, free);
        Matrix harm = IM.partialPivLu().solve(sub_matrix(chain.kernel(), free, entry));
        Vector mu_free(m);
        for (Eigen::Index i = 0; i < m; ++i) mu_free(i) = mu[free[static_cast<std::size_t>(i)]];
        into += harm.transpose() * mu_free;
    }
    Vector tail = KilledChain(chain, B).survival_all(c);
    double total = 0.0;
    for (std::size_t k = 0; k < entry.size(); ++k)
        total += into(static_cast<Eigen::Index>(k)) * tail(static_cast<Eigen::Index>(entry[k]));
    return std::clamp(total, 0.0, 1.0);
}

double delayed_hit_probability_product(const ReversibleChain& chain, const Distribution& mu, const StateSet& A_in,
                                       const StateSet& B_in, double c) {
    const std::size_t n = chain.size();
    StateSet A = make_set(A_in, n), B = make_set(B_in, n);
    check_delay_args(chain, mu, A, B, c);

    // Extended states (x, status) with status 0 = neither hit, 1 = A hit
    // and B not yet.  Entering B removes the path from both layers.
    std::vector<std::pair<std::size_t, int>> ext;
    std::vector<long> idx0(n, -1), idx1(n, -1);
    for (std::size_t x = 0; x < n; ++x)
        if (!contains(A, x) && !contains(B, x)) {
            idx0[x] = static_cast<long>(ext.size());
            ext.emplace_back(x, 0);
        }
    for (std::size_t x = 0; x < n; ++x)
        if (!contains(B, x)) {
            idx1[x] = static_cast<long>(ext.size());
            ext.emplace_back(x, 1);
        }
    const auto m = static_cast<Eigen::Index>(ext.size());
    if (m == 0) return 0.0;
    Matrix Q = Matrix::Zero(m, m);
    Vector start = Vector::Zero(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        auto [x, status] = ext[static_cast<std::size_t>(i)];
        for (std::size_t y = 0; y < n; ++y) {
            double pxy = chain.kernel()(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y));
            if (pxy == 0.0 || contains(B, y)) continue;
            long j = (status == 1 || contains(A, y)) ? idx1[y] : idx0[y];
            Q(i, j) += pxy;
        }
    }
    for (std::size_t x = 0; x < n; ++x) {
        if (contains(B, x)) continue;
        long j = contains(A, x) ? idx1[x] : idx0[x];
        start(j) += mu[x];
    }
    // Law of the state at the moment the status turns to 1.
    std::vector<Eigen::Index> layer0, layer1;
    for (Eigen::Index i = 0; i < m; ++i) (ext[static_cast<std::size_t>(i)].second == 0 ? layer0 : layer1).push_back(i);
    auto block = [&](const std::vector<Eigen::Index>& r, const std::vector<Eigen::Index>& cidx) {
        Matrix out(static_cast<Eigen::Index>(r.size()), static_cast<Eigen::Index>(cidx.size()));
        for (std::size_t i = 0; i < r.size(); ++i)
            for (std::size_t j = 0; j < cidx.size(); ++j)
                out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = Q(r[i], cidx[j]);
        return out;
    };
    Eigen::RowVectorXd entry(static_cast<Eigen::Index>(layer1.size()));
    for (std::size_t j = 0; j < layer1.size(); ++j) entry(static_cast<Eigen::Index>(j)) = start(layer1[j]);
    if (!layer0.empty()) {
        const auto k0 = static_cast<Eigen::Index>(layer0.size());
        Eigen::RowVectorXd s0(k0);
        for (Eigen::Index i = 0; i < k0; ++i) s0(i) = start(layer0[static_cast<std::size_t>(i)]);
        Matrix I0 = Matrix::Identity(k0, k0) - block(layer0, layer0);
        Eigen::RowVectorXd green = I0.transpose().partialPivLu().solve(s0.transpose()).transpose();
        entry += green * block(layer0, layer1);
    }
    // Time spent in layer 1, by uniformisation: sum_k Pois(c; k) entry Q11^k 1.
    Matrix Q11 = block(layer1, layer1);
    const std::size_t K = poisson_truncation(c, 1e-15);
    Eigen::RowVectorXd v = entry;
    double total = 0.0;
    for (std::size_t k = 0; k <= K; ++k) {
        const double kd = static_cast<double>(k);
        total += std::exp(-c + kd * std::log(c) - std::lgamma(kd + 1.0)) * v.sum();
        v = v * Q11;
    }
    return std::clamp(total, 0.0, 1.0);
}

std::vector<CertificateReport> check_griffiths(const ReversibleChain& chain, const std::vector<double>& eps_grid,
                                               const SearchSpec& spec) {
    const double half = worst_set_expectation_any_start(chain, 0.5, spec).objective;
    std::vector<CertificateReport> out;
    for (double eps : eps_grid) {
        if (!(eps > 0.0 && eps < 0.5)) throw Error(Errc::EpsOutOfRange, "eps must lie in (0, 1/2)");
        auto res = worst_set_expectation_any_start(chain, eps, spec);
        out.push_back(judge("griffiths", eps * res.objective, half, "time", "hitting:t_H(eps)", "hitting:t_H(1/2)",
                            {{"eps", eps}, {"t_H_eps", res.objective}, {"mode", mode_name(spec.mode)}}));
    }
    return out;
}

std::vector<CertificateReport> check_hitting_gap(const ReversibleChain& chain, const Distribution& mu,
                                                 const std::vector<double>& eps_grid, const SearchSpec& spec,
                                                 double t_rel) {
    std::vector<CertificateReport> out;
    for (double eps : eps_grid) {
        if (!(eps > 0.0 && eps < 0.5)) throw Error(Errc::EpsOutOfRange, "eps must lie in (0, 1/2)");
        const double small = worst_set_expectation(chain, mu, eps, spec).objective;
        const double large = worst_set_expectation(chain, mu, 1.0 - eps, spec).objective;
        nlohmann::ordered_json ctx{{"eps", eps}, {"t_H_eps", small}, {"t_H_1_minus_eps", large}};
        out.push_back(judge("hitting_gap.order", large, small, "time", "hitting:t_H(1-eps)", "hitting:t_H(eps)", ctx));
        out.push_back(reported_only("hitting_gap.ratio", t_rel > 0.0 ? (small - large) * eps / t_rel : 0.0, kNaN,
                                    "ratio", "hitting:t_H", "spectral:t_rel", ctx));
        out.back().note = "constant unspecified; reported only";
    }
    return out;
}

std::vector<CertificateReport> check_support_lemmas(const HeatKernel& kernel, const Distribution& mu,
                                                    const StateSet& A_in, const SupportLemmaParams& params,
                                                    const SearchSpec& spec) {
    const auto& chain = kernel.chain();
    const std::size_t n = chain.size();
    const Vector& pi = chain.pi();
    const double trel = kernel.t_rel();
    StateSet A = make_set(A_in, n);
    if (A.empty()) throw Error(Errc::EmptyTarget, "A must be nonempty");
    const double pa = measure(pi, A);
    const Vector E = expected_hitting_all(chain, A);
    auto aj = set_json(A, chain);
    std::vector<CertificateReport> out;

    // States with a short expected hitting time.
    const double eps = params.eps < 0.0 ? 1.0 - pa : params.eps;
    if (pa < 1.0 - eps - 1e-15) throw Error(Errc::InvalidArgument, "pi(A) is below 1 - eps");
    if (eps < 1.0) {
        for (auto k : params.k_values) {
            const double bound = (3.0 + static_cast<double>(k)) / (1.0 - eps) * trel * std::log(3.0);
            StateSet I;
            for (std::size_t z = 0; z < n; ++z)
                if (E(static_cast<Eigen::Index>(z)) <= bound) I.push_back(z);
            out.push_back(judge("support.expected_hit_set", 1.0 - eps / (2.0 * std::pow(3.0, static_cast<double>(k))),
                                measure(pi, I), "probability", "closed_form", "hitting:expected",
                                {{"A", aj}, {"eps", eps}, {"k", k}, {"bound", bound}}));
        }
    }

    // States whose hitting law has the geometric quantile profile.
    if (pa < 1.0 && trel > 0.0) {
        KilledChain killed(chain, A);
        constexpr int kMaxLevel = 40;  // beyond this the tail bound is below survival round-off
        for (double t : params.t_values) {
            if (t < 1.0) throw Error(Errc::InvalidArgument, "t must be >= 1");
            const double r = (t + std::abs(std::log(pa))) * trel;
            const double ell = trel * std::log(2.0);
            const double s = 2.0 / pa * trel * std::log(2.0);
            std::vector<char> in(n, 1);
            for (std::size_t z = 0; z < n; ++z)
                if (E(static_cast<Eigen::Index>(z)) > r + 5.5 * (s + ell)) in[z] = 0;
            for (int i = 1; i <= kMaxLevel; ++i) {
                Vector surv = killed.survival_all(r + i * (ell + s));
                const double q = std::pow(1.0 - std::pow(2.0, -i), 2);
                for (std::size_t z = 0; z < n; ++z)
                    if (1.0 - surv(static_cast<Eigen::Index>(z)) < q) in[z] = 0;
            }
            StateSet J;
            for (std::size_t z = 0; z < n; ++z)
                if (in[z]) J.push_back(z);
            out.push_back(judge("support.quantile_set", 1.0 - 0.75 * std::exp(-2.0 * t), measure(pi, J), "probability",
                                "closed_form", "hitting:killed_chain", {{"A", aj}, {"t", t}, {"levels", kMaxLevel}}));
        }
    }

    if (!params.worst_in_expectation) return out;
    if (spec.mode != SearchMode::Exact)
        throw Error(Errc::ExactModeRequired, "the worst-in-expectation lemma needs an exact worst set");
    const double we = params.worst_eps;
    auto worst = worst_set_expectation(chain, mu, 1.0 - we, spec);
    const StateSet& Aw = worst.set;
    const double rho = 3.0 / (1.0 - we) * trel * std::log(3.0);
    const double level = 1.0 - we / 2.0;
    auto awj = set_json(Aw, chain);
    KilledChain killed_w(chain, Aw);
    TailEnvelope env(chain, mu, level, spec, trel);
    const double mean = worst.objective;
    for (double r : params.r_values) {
        const double c = r * rho;
        auto best = maximize_antitone(
            pi, level, [&](const StateSet& B) { return delayed_hit_probability(chain, mu, Aw, B, c); }, spec);
        out.push_back(judge("support.delayed_hit", best.objective, 1.0 / r, "probability", "hitting:strong_markov",
                            "closed_form", {{"A", awj}, {"eps", we}, {"r", r}, {"B", set_json(best.set, chain)}}));
        for (double tm : {0.0, 1.0, 2.0}) {
            const double t = tm * mean;
            const double lhs = env.value(t + c) - killed_w.survival(mu, t);
            out.push_back(judge("support.delayed_hit.window", lhs, 1.0 / r, "probability", "hitting:worst_tail",
                                "closed_form", {{"A", awj}, {"eps", we}, {"r", r}, {"t", t}}));
        }
        for (double q : params.q_values) {
            const double t = env.hit(1.0 - q) - c;
            const double lhs = t < 0.0 ? 0.0 : 1.0 - killed_w.survival(mu, t);
            out.push_back(judge("support.delayed_hit.quantile", lhs, q + 1.0 / r, "probability", "hitting:killed_chain",
                                "closed_form", {{"A", awj}, {"eps", we}, {"r", r}, {"q", q}}));
        }
    }
    return out;
}

}  // namespace mixhit
