#include "mixhit/gallery.hpp"
#include "mixhit/error.hpp"
#include "mixhit/hitting.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace mixhit {

namespace mp = boost::multiprecision;
using Rational = mp::cpp_rational;

namespace {

Rational pow2_inv(std::size_t k) {
    mp::cpp_int d = 1;
    d <<= static_cast<unsigned>(k);
    return Rational(mp::cpp_int(1), d);
}

std::string to_string(const Rational& r) {
    if (mp::denominator(r) == 1) return mp::numerator(r).str();
    return mp::numerator(r).str() + "/" + mp::denominator(r).str();
}

struct Edge {
    std::size_t i;
    std::size_t j;
    Rational w;
};

// Exact weights of aldous(n): off-diagonal edges plus per-state self-weights.
struct AldousExact {
    std::size_t n;
    std::vector<std::string> labels;
    std::vector<AldousRole> roles;
    std::vector<Edge> edges;
    std::vector<Rational> self;
    std::vector<Rational> total;  // self + off-diagonal
    Rational grand;
};

std::size_t idx_a(std::size_t n, std::size_t m) { return 2 * n + 1 - m; }
std::size_t idx_b(std::size_t n, std::size_t k) { return k == 0 ? 3 * n + 1 : 2 * n + 1 - k; }
std::size_t idx_c(std::size_t n, std::size_t k) { return k == 0 ? 3 * n + 1 : (k == n + 1 ? n : 3 * n + 1 - k); }

AldousExact build_aldous(std::size_t n) {
    if (n < 2) throw Error(Errc::BadParams, "aldous needs n >= 2");
    AldousExact ex;
    ex.n = n;
    const std::size_t size = 3 * n + 2;
    ex.labels.resize(size);
    ex.roles.resize(size);
    for (std::size_t m = n + 2; m <= 2 * n + 1; ++m) {
        ex.labels[idx_a(n, m)] = "a" + std::to_string(m);
        ex.roles[idx_a(n, m)] = m == 2 * n + 1 ? AldousRole::ATop : AldousRole::ABranch;
    }
    ex.labels[n] = "v";
    ex.roles[n] = AldousRole::V;
    for (std::size_t k = 1; k <= n; ++k) {
        ex.labels[idx_b(n, k)] = "b" + std::to_string(k);
        ex.roles[idx_b(n, k)] = AldousRole::BBranch;
        ex.labels[idx_c(n, k)] = "c" + std::to_string(k);
        ex.roles[idx_c(n, k)] = AldousRole::CBranch;
    }
    ex.labels[3 * n + 1] = "z";
    ex.roles[3 * n + 1] = AldousRole::Z;

    // A-branch weights follow from the kernel: v sends 1/6 to a_{n+2}, as to b_n.
    for (std::size_t m = 1; m <= n; ++m)
        ex.edges.push_back({idx_a(n, n + m), idx_a(n, n + m + 1), pow2_inv(n + m - 1)});
    for (std::size_t m = 0; m <= n; ++m) {
        const std::size_t up_b = m + 1 == n + 1 ? n : idx_b(n, m + 1);
        ex.edges.push_back({idx_b(n, m), up_b, pow2_inv(m)});
        ex.edges.push_back({idx_c(n, m), idx_c(n, m + 1), pow2_inv(m)});
    }

    std::vector<Rational> off(size, Rational(0));
    for (const auto& e : ex.edges) {
        off[e.i] += e.w;
        off[e.j] += e.w;
    }
    ex.self.resize(size);
    ex.total.resize(size);
    ex.grand = 0;
    for (std::size_t x = 0; x < size; ++x) {
        const bool slow = ex.roles[x] == AldousRole::CBranch || ex.roles[x] == AldousRole::Z;
        ex.self[x] = slow ? off[x] * 99 : off[x];
        ex.total[x] = ex.self[x] + off[x];
        ex.grand += ex.total[x];
    }
    return ex;
}

// Dense exact kernel; only used for small n (golden files) and the float conversion.
std::vector<std::vector<Rational>> exact_kernel(const AldousExact& ex) {
    const std::size_t size = ex.labels.size();
    std::vector<std::vector<Rational>> P(size, std::vector<Rational>(size, Rational(0)));
    for (std::size_t x = 0; x < size; ++x) P[x][x] = ex.self[x] / ex.total[x];
    for (const auto& e : ex.edges) {
        P[e.i][e.j] = e.w / ex.total[e.i];
        P[e.j][e.i] = e.w / ex.total[e.j];
    }
    for (std::size_t x = 0; x < size; ++x) {
        Rational s = 0;
        for (const auto& p : P[x]) s += p;
        if (s != 1) throw Error(Errc::NotStochastic, "exact row sum differs from 1 at " + ex.labels[x]);
    }
    return P;
}

double uniform01(std::mt19937_64& gen) { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }

const nlohmann::json& require(const nlohmann::json& params, const char* key) {
    if (!params.is_object() || !params.contains(key))
        throw Error(Errc::BadParams, std::string("missing parameter '") + key + "'");
    return params.at(key);
}

double get_double(const nlohmann::json& params, const char* key) {
    const auto& v = require(params, key);
    if (!v.is_number()) throw Error(Errc::BadParams, std::string("parameter '") + key + "' must be a number");
    return v.get<double>();
}

double get_double(const nlohmann::json& params, const char* key, double fallback) {
    if (!params.is_object() || !params.contains(key)) return fallback;
    return get_double(params, key);
}

std::uint64_t get_uint(const nlohmann::json& params, const char* key) {
    const auto& v = require(params, key);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
    throw Error(Errc::BadParams, std::string("parameter '") + key + "' must be a nonnegative integer");
}

std::uint64_t get_uint(const nlohmann::json& params, const char* key, std::uint64_t fallback) {
    if (!params.is_object() || !params.contains(key)) return fallback;
    return get_uint(params, key);
}

std::vector<double> get_list(const nlohmann::json& params, const char* key, bool optional) {
    if (optional && (!params.is_object() || !params.contains(key))) return {};
    const auto& v = require(params, key);
    if (!v.is_array()) throw Error(Errc::BadParams, std::string("parameter '") + key + "' must be a list");
    std::vector<double> out;
    for (const auto& e : v) {
        if (!e.is_number()) throw Error(Errc::BadParams, std::string("parameter '") + key + "' must hold numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

std::vector<std::string> index_labels(std::size_t n) {
    std::vector<std::string> s(n);
    for (std::size_t i = 0; i < n; ++i) s[i] = std::to_string(i);
    return s;
}

}  // namespace

const char* role_name(AldousRole role) {
    switch (role) {
        case AldousRole::ATop: return "a-top";
        case AldousRole::ABranch: return "a-branch";
        case AldousRole::V: return "v";
        case AldousRole::BBranch: return "b-branch";
        case AldousRole::CBranch: return "c-branch";
        case AldousRole::Z: return "z";
    }
    return "?";
}

std::size_t AldousChain::a(std::size_t m) const {
    if (m < n + 1 || m > 2 * n + 1) throw Error(Errc::IndexOutOfRange, "a-branch index out of range");
    return idx_a(n, m);
}
std::size_t AldousChain::b(std::size_t k) const {
    if (k > n + 1) throw Error(Errc::IndexOutOfRange, "b-branch index out of range");
    return k == n + 1 ? n : idx_b(n, k);
}
std::size_t AldousChain::c(std::size_t k) const {
    if (k > n + 1) throw Error(Errc::IndexOutOfRange, "c-branch index out of range");
    return idx_c(n, k);
}

AldousChain aldous(std::size_t n) {
    AldousExact ex = build_aldous(n);
    const auto size = static_cast<Eigen::Index>(ex.labels.size());
    Matrix P = Matrix::Zero(size, size);
    Matrix W = Matrix::Zero(size, size);
    Vector pi(size);
    for (Eigen::Index x = 0; x < size; ++x) {
        const auto ux = static_cast<std::size_t>(x);
        P(x, x) = (ex.self[ux] / ex.total[ux]).convert_to<double>();
        W(x, x) = ex.self[ux].convert_to<double>();
        pi(x) = (ex.total[ux] / ex.grand).convert_to<double>();
    }
    for (const auto& e : ex.edges) {
        const auto i = static_cast<Eigen::Index>(e.i), j = static_cast<Eigen::Index>(e.j);
        P(i, j) = (e.w / ex.total[e.i]).convert_to<double>();
        P(j, i) = (e.w / ex.total[e.j]).convert_to<double>();
        W(i, j) = W(j, i) = e.w.convert_to<double>();
    }
    AldousChain out{n, ReversibleChain::assemble(ex.labels, std::move(P), std::move(pi), std::move(W)), ex.roles};
    return out;
}

std::vector<RationalEntry> aldous_rational_kernel(std::size_t n) {
    AldousExact ex = build_aldous(n);
    auto P = exact_kernel(ex);
    std::vector<RationalEntry> out;
    for (std::size_t x = 0; x < P.size(); ++x)
        for (std::size_t y = 0; y < P.size(); ++y)
            if (P[x][y] != 0) out.push_back({ex.labels[x], ex.labels[y], to_string(P[x][y])});
    return out;
}

std::vector<RationalEntry> aldous_rational_pi(std::size_t n) {
    AldousExact ex = build_aldous(n);
    std::vector<RationalEntry> out;
    for (std::size_t x = 0; x < ex.labels.size(); ++x)
        out.push_back({ex.labels[x], ex.labels[x], to_string(ex.total[x] / ex.grand)});
    return out;
}

double cb_probability_exact(std::size_t n, std::size_t ell) {
    if (ell < 1 || ell > n) throw Error(Errc::IndexOutOfRange, "ell must lie in [1, n]");
    mp::cpp_int num = 1, den = 1;
    num <<= static_cast<unsigned>(ell);
    den <<= static_cast<unsigned>(n + 1);
    return Rational(num - 1, den - 1).convert_to<double>();
}

Vector conditioned_expected_hitting(const ReversibleChain& chain, const StateSet& target, const StateSet& avoid) {
    const auto n = static_cast<Eigen::Index>(chain.size());
    DoobTransform dt = doob_transform(chain, target, avoid);
    Vector out = Vector::Constant(n, std::numeric_limits<double>::quiet_NaN());
    for (auto x : target) out(static_cast<Eigen::Index>(x)) = 0.0;
    std::vector<Eigen::Index> tr;
    for (std::size_t i = 0; i < dt.retained.size(); ++i)
        if (dt.transient[i]) tr.push_back(static_cast<Eigen::Index>(i));
    if (tr.empty()) return out;
    const auto m = static_cast<Eigen::Index>(tr.size());
    Matrix A = Matrix::Identity(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < m; ++j) A(i, j) -= dt.kernel(tr[static_cast<std::size_t>(i)], tr[static_cast<std::size_t>(j)]);
    Vector sol = A.partialPivLu().solve(Vector::Ones(m));
    for (Eigen::Index i = 0; i < m; ++i)
        out(static_cast<Eigen::Index>(dt.retained[static_cast<std::size_t>(tr[static_cast<std::size_t>(i)])])) = sol(i);
    return out;
}

std::vector<CertificateReport> aldous_expectation_checks(std::size_t n) {
    if (n < 5) throw Error(Errc::BadParams, "aldous_expectation_checks needs n >= 5");
    AldousChain ac = aldous(n);
    const auto& chain = ac.chain;
    std::vector<CertificateReport> out;
    const nlohmann::ordered_json base{{"n", n}};
    auto ctx = [&](const char* key, double value) {
        auto c = base;
        c[key] = value;
        return c;
    };

    // c-branch steps E_{c_{r+1}}[T_{c_r}], c_0 = z.
    std::vector<double> steps(n);
    for (std::size_t r = 0; r < n; ++r) {
        Vector e = expected_hitting_all(chain, {ac.c(r)});
        steps[r] = e(static_cast<Eigen::Index>(ac.c(r + 1)));
        out.push_back(judge("aldous.c_step", steps[r], 300.0, "time", "linear_solve", "closed_form",
                            ctx("r", static_cast<double>(r))));
    }
    for (std::size_t r = 0; r + 1 < n; ++r)
        out.push_back(judge("aldous.c_step.monotone", steps[r], steps[r + 1], "time", "linear_solve", "linear_solve",
                            ctx("r", static_cast<double>(r))));
    double k1 = -std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < n; ++r) k1 = std::max(k1, (300.0 - steps[r]) * std::ldexp(1.0, static_cast<int>(r)));
    out.push_back(reported_only("aldous.K1", k1, 300.0, "time", "linear_solve", "closed_form", base));

    // Conditioned steps: E_{c_{r+1}}[T_{c_r} | T_{c_r} < T_v].
    double k3 = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        Vector e = conditioned_expected_hitting(chain, {ac.c(r)}, {ac.v()});
        k3 = std::max(k3, std::abs(e(static_cast<Eigen::Index>(ac.c(r + 1))) - 300.0) * std::ldexp(1.0, static_cast<int>(r)));
    }
    out.push_back(reported_only("aldous.K3", k3, 300.0, "time", "doob_transform", "closed_form", base));

    Vector ez = expected_hitting_all(chain, {ac.z()});
    const double ev = ez(static_cast<Eigen::Index>(ac.v()));
    const double ea = ez(static_cast<Eigen::Index>(ac.top()));
    const double nn = static_cast<double>(n);
    out.push_back(judge("aldous.v_to_z", ev, 153.0 * (nn + 1.0), "time", "linear_solve", "closed_form", base));
    out.push_back(reported_only("aldous.K2", 153.0 * nn - ev, 153.0 * nn, "time", "linear_solve", "closed_form", base));
    out.push_back(judge("aldous.a_to_z", ea, 159.0 * (nn + 1.0), "time", "linear_solve", "closed_form", base));

    // E_{c_r}[T_z] split on which of v, z comes first.
    Vector cz = conditioned_expected_hitting(chain, {ac.z()}, {ac.v()});
    Vector cv = conditioned_expected_hitting(chain, {ac.v()}, {ac.z()});
    double residual = 0.0;
    for (std::size_t r = 1; r <= n; ++r) {
        const auto x = static_cast<Eigen::Index>(ac.c(r));
        const double q = cb_probability_exact(n, r);
        const double mix = (1.0 - q) * cz(x) + q * (cv(x) + ev);
        residual = std::max(residual, std::abs(ez(x) - mix) / ez(x));
    }
    out.push_back(judge("aldous.c_mixture_identity", residual, 1e-9, "relative", "doob_transform", "linear_solve", base,
                        0.0));
    return out;
}

CertificateReport aldous_pi_claim(std::size_t n) {
    AldousChain ac = aldous(n);
    const double pz = ac.chain.pi()(static_cast<Eigen::Index>(ac.z()));
    auto r = reported_only("aldous.pi_z_above_half", pz, 0.5, "probability", "rational_construction", "claim",
                           {{"n", n}});
    r.note = pz > 0.5 ? "pi(z) > 1/2 holds" : "pi(z) > 1/2 does not hold for this construction";
    return r;
}

std::vector<StateSet> aldous_candidates(const AldousChain& ac) {
    std::vector<StateSet> out;
    StateSet cset{ac.z()};
    out.push_back(cset);
    for (std::size_t k = 1; k <= ac.n; ++k) {
        cset.push_back(ac.c(k));
        out.push_back(make_set(cset, ac.chain.size()));
    }
    StateSet bset{ac.z()};
    for (std::size_t k = 1; k <= ac.n; ++k) {
        bset.push_back(ac.b(k));
        out.push_back(make_set(bset, ac.chain.size()));
    }
    return out;
}

ReversibleChain two_state(double p, double q) {
    if (!(p > 0.0 && p <= 1.0 && q > 0.0 && q <= 1.0)) throw Error(Errc::BadParams, "two_state needs p, q in (0, 1]");
    Matrix P(2, 2);
    P << 1.0 - p, p, q, 1.0 - q;
    return build_from_kernel({"0", "1"}, P);
}

ReversibleChain path_conductance(const std::vector<double>& edge_weights, const std::vector<double>& self_weights) {
    if (edge_weights.empty()) throw Error(Errc::BadParams, "path_conductance needs at least one edge");
    const std::size_t n = edge_weights.size() + 1;
    if (!self_weights.empty() && self_weights.size() != n)
        throw Error(Errc::BadParams, "path_conductance needs one self-weight per state");
    Matrix W = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (!(edge_weights[i] > 0.0)) throw Error(Errc::BadParams, "path edge weights must be positive");
        W(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i + 1)) = edge_weights[i];
        W(static_cast<Eigen::Index>(i + 1), static_cast<Eigen::Index>(i)) = edge_weights[i];
    }
    for (std::size_t i = 0; i < self_weights.size(); ++i) {
        if (!(self_weights[i] >= 0.0)) throw Error(Errc::BadParams, "self-weights must be nonnegative");
        W(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = self_weights[i];
    }
    return build_from_weights(index_labels(n), W);
}

ReversibleChain biased_path(std::size_t n, double q_down, double hold) {
    if (n < 1) throw Error(Errc::BadParams, "biased_path needs n >= 1");
    if (!(q_down > 0.0 && q_down < 1.0)) throw Error(Errc::BadParams, "q_down must lie in (0, 1)");
    if (!(hold >= 0.0 && hold < 1.0)) throw Error(Errc::BadParams, "hold must lie in [0, 1)");
    const auto m = static_cast<Eigen::Index>(n + 1);
    const double down = (1.0 - hold) * q_down;
    const double up = (1.0 - hold) * (1.0 - q_down);
    Matrix P = Matrix::Zero(m, m);
    for (Eigen::Index x = 0; x < m; ++x) {
        double stay = hold;
        if (x > 0) P(x, x - 1) = down; else stay += down;
        if (x + 1 < m) P(x, x + 1) = up; else stay += up;
        P(x, x) = stay;
    }
    return build_from_kernel(index_labels(n + 1), P);
}

ReversibleChain complete(std::size_t m) {
    if (m < 2) throw Error(Errc::BadParams, "complete needs m >= 2");
    const auto k = static_cast<Eigen::Index>(m);
    return build_from_kernel(index_labels(m), Matrix::Constant(k, k, 1.0 / static_cast<double>(m)));
}

ReversibleChain random_tree(std::size_t n, std::uint64_t seed) {
    if (n < 2) throw Error(Errc::BadParams, "random_tree needs n >= 2");
    std::mt19937_64 gen(seed);
    const auto k = static_cast<Eigen::Index>(n);
    Matrix W = Matrix::Zero(k, k);
    for (Eigen::Index x = 1; x < k; ++x) {
        const auto parent = static_cast<Eigen::Index>(gen() % static_cast<std::uint64_t>(x));
        const double w = 0.5 + uniform01(gen);
        W(x, parent) = W(parent, x) = w;
    }
    for (Eigen::Index x = 0; x < k; ++x) W(x, x) = uniform01(gen);
    return build_from_weights(index_labels(n), W);
}

ReversibleChain random_weights(std::size_t n, std::uint64_t seed, double density) {
    if (n < 2) throw Error(Errc::BadParams, "random_weights needs n >= 2");
    if (!(density >= 0.0 && density <= 1.0)) throw Error(Errc::BadParams, "density must lie in [0, 1]");
    std::mt19937_64 gen(seed);
    const auto k = static_cast<Eigen::Index>(n);
    Matrix W = Matrix::Zero(k, k);
    for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = i + 1; j < k; ++j) {
            const double coin = uniform01(gen);
            const double w = 0.1 + uniform01(gen);
            if (j == i + 1 || coin < density) W(i, j) = W(j, i) = w;
        }
    for (Eigen::Index x = 0; x < k; ++x) W(x, x) = uniform01(gen);
    return build_from_weights(index_labels(n), W);
}

std::vector<std::string> family_names() {
    return {"two_state", "path_conductance", "biased_path", "complete", "random_tree", "random_weights", "aldous"};
}

ReversibleChain family(const std::string& name, const nlohmann::json& params) {
    if (!params.is_null() && !params.is_object()) throw Error(Errc::BadParams, "family parameters must be an object");
    if (name == "two_state") return two_state(get_double(params, "p", 0.5), get_double(params, "q", 0.5));
    if (name == "path_conductance")
        return path_conductance(get_list(params, "weights", false), get_list(params, "self", true));
    if (name == "biased_path")
        return biased_path(get_uint(params, "n"), get_double(params, "q_down", 2.0 / 3.0), get_double(params, "hold", 0.5));
    if (name == "complete") return complete(get_uint(params, "m", params.contains("n") ? get_uint(params, "n") : 0));
    if (name == "random_tree") return random_tree(get_uint(params, "n"), get_uint(params, "seed", 1));
    if (name == "random_weights")
        return random_weights(get_uint(params, "n"), get_uint(params, "seed", 1), get_double(params, "density", 1.0));
    if (name == "aldous") return aldous(get_uint(params, "n")).chain;
    throw Error(Errc::UnknownFamily, "unknown family '" + name + "'");
}

std::size_t resolve_state(const ReversibleChain& chain, const std::string& label) {
    const auto& states = chain.states();
    auto it = std::find(states.begin(), states.end(), label);
    if (it != states.end()) return static_cast<std::size_t>(it - states.begin());
    if (label == "a" && !states.empty() && states.front().size() > 1 && states.front()[0] == 'a') return 0;
    throw Error(Errc::InvalidArgument, "no state labelled '" + label + "'");
}

std::vector<StateSet> default_candidates(const std::string& family_name, const ReversibleChain& chain) {
    const std::size_t n = chain.size();
    const bool is_aldous = family_name == "aldous" && n >= 8 && (n - 2) % 3 == 0;
    std::vector<StateSet> out;
    if (is_aldous) {
        const std::size_t m = (n - 2) / 3;
        AldousChain shape{m, chain, std::vector<AldousRole>(n, AldousRole::ABranch)};
        out = aldous_candidates(shape);
    } else {
        for (std::size_t x = 0; x < n; ++x) out.push_back({x});
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    const Vector& pi = chain.pi();
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return pi(static_cast<Eigen::Index>(a)) > pi(static_cast<Eigen::Index>(b));
    });
    StateSet heavy, low, high;
    for (std::size_t k = 0; k < n; ++k) {
        heavy.push_back(order[k]);
        out.push_back(make_set(heavy, n));
        if (is_aldous) continue;
        low.push_back(k);
        high.push_back(n - 1 - k);
        out.push_back(make_set(low, n));
        out.push_back(make_set(high, n));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace mixhit
