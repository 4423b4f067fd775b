#include "mixhit/io.hpp"
#include "mixhit/error.hpp"

#include <boost/multiprecision/cpp_int.hpp>
#include <openssl/evp.h>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#ifndef MIXHIT_VERSION
#define MIXHIT_VERSION "0.0.0"
#endif

namespace mixhit {

namespace mp = boost::multiprecision;
using Json = nlohmann::json;

const char* tool_version() { return MIXHIT_VERSION; }

std::string format_number(double v, NumberFormat fmt) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    if (fmt == NumberFormat::Fixed17) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return buf;
    }
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

nlohmann::ordered_json number_json(double v) {
    if (std::isnan(v)) return nullptr;
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

std::string sha256_hex(std::string_view bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw Error(Errc::InvalidArgument, "SHA-256 digest failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 15]);
    }
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::ParseError, path + ": cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

namespace {

[[noreturn]] void fail_at(const std::string& pointer, const std::string& what) {
    throw Error(Errc::ParseError, "at " + (pointer.empty() ? std::string("/") : pointer) + ": " + what);
}

std::pair<std::size_t, std::size_t> line_col(std::string_view text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

mp::cpp_rational parse_rational(const std::string& s, const std::string& ptr) {
    try {
        auto slash = s.find('/');
        if (slash == std::string::npos) return mp::cpp_rational(mp::cpp_int(s));
        mp::cpp_int num(s.substr(0, slash)), den(s.substr(slash + 1));
        if (den == 0) fail_at(ptr, "zero denominator");
        return mp::cpp_rational(num, den);
    } catch (const Error&) {
        throw;
    } catch (const std::exception&) {
        fail_at(ptr, "'" + s + "' is not a rational p/q");
    }
}

// A numeric entry, kept exact when given as a string.
struct Entry {
    double value;
    std::optional<mp::cpp_rational> exact;
};

Entry read_entry(const Json& v, const std::string& ptr) {
    if (v.is_number()) return {v.get<double>(), std::nullopt};
    if (v.is_string()) {
        auto r = parse_rational(v.get<std::string>(), ptr);
        return {r.convert_to<double>(), r};
    }
    fail_at(ptr, "expected a number or a \"p/q\" string");
}

}  // namespace

ChainSpec parse_chain_spec(std::string_view text) {
    Json doc;
    try {
        doc = Json::parse(text.begin(), text.end());
    } catch (const Json::parse_error& e) {
        auto [line, col] = line_col(text, e.byte == 0 ? 0 : e.byte - 1);
        throw Error(Errc::ParseError, "line " + std::to_string(line) + ", column " + std::to_string(col) + ": " +
                                          e.what());
    }
    if (!doc.is_object()) fail_at("", "expected an object");
    if (!doc.contains("format_version") || !doc["format_version"].is_number_integer())
        fail_at("/format_version", "missing or not an integer");
    if (doc["format_version"].get<int>() != kChainFormatVersion)
        fail_at("/format_version", "unsupported version " + doc["format_version"].dump());
    std::string name;
    if (doc.contains("name")) {
        if (!doc["name"].is_string()) fail_at("/name", "expected a string");
        name = doc["name"].get<std::string>();
    }
    if (!doc.contains("states") || !doc["states"].is_array()) fail_at("/states", "missing or not a list");
    std::vector<std::string> states;
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < doc["states"].size(); ++i) {
        const auto& s = doc["states"][i];
        const std::string ptr = "/states/" + std::to_string(i);
        if (!s.is_string()) fail_at(ptr, "state labels must be strings");
        if (!index.emplace(s.get<std::string>(), i).second) fail_at(ptr, "duplicate label");
        states.push_back(s.get<std::string>());
    }
    const auto n = static_cast<Eigen::Index>(states.size());
    if (n == 0) fail_at("/states", "no states");
    const bool has_k = doc.contains("kernel"), has_w = doc.contains("weights");
    if (has_k == has_w) fail_at("", "exactly one of 'kernel' and 'weights' is required");

    try {
        if (has_k) {
            const auto& k = doc["kernel"];
            if (!k.is_array() || static_cast<Eigen::Index>(k.size()) != n)
                fail_at("/kernel", "expected " + std::to_string(n) + " rows");
            Matrix P(n, n);
            for (Eigen::Index i = 0; i < n; ++i) {
                const std::string rp = "/kernel/" + std::to_string(i);
                const auto& row = k[static_cast<std::size_t>(i)];
                if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n)
                    fail_at(rp, "expected " + std::to_string(n) + " entries");
                mp::cpp_rational sum = 0;
                bool exact = true;
                for (Eigen::Index j = 0; j < n; ++j) {
                    Entry e = read_entry(row[static_cast<std::size_t>(j)], rp + "/" + std::to_string(j));
                    P(i, j) = e.value;
                    if (e.exact) sum += *e.exact; else exact = false;
                }
                if (exact && sum != 1) fail_at(rp, "exact row sum is " + sum.str());
            }
            return {name, build_from_kernel(states, P)};
        }
        const auto& w = doc["weights"];
        if (!w.is_array()) fail_at("/weights", "expected a list of [state, state, weight] triples");
        Matrix W = Matrix::Zero(n, n);
        std::vector<std::vector<char>> seen(static_cast<std::size_t>(n), std::vector<char>(static_cast<std::size_t>(n), 0));
        for (std::size_t t = 0; t < w.size(); ++t) {
            const std::string tp = "/weights/" + std::to_string(t);
            const auto& e = w[t];
            if (!e.is_array() || e.size() != 3 || !e[0].is_string() || !e[1].is_string())
                fail_at(tp, "expected [state, state, weight]");
            auto a = index.find(e[0].get<std::string>()), b = index.find(e[1].get<std::string>());
            if (a == index.end()) fail_at(tp + "/0", "unknown state");
            if (b == index.end()) fail_at(tp + "/1", "unknown state");
            if (seen[a->second][b->second]) fail_at(tp, "duplicate edge");
            seen[a->second][b->second] = seen[b->second][a->second] = 1;
            const double v = read_entry(e[2], tp + "/2").value;
            if (!(v >= 0.0)) fail_at(tp + "/2", "weights must be nonnegative");
            const auto i = static_cast<Eigen::Index>(a->second), j = static_cast<Eigen::Index>(b->second);
            W(i, j) = W(j, i) = v;
        }
        return {name, build_from_weights(states, W)};
    } catch (const Error& e) {
        if (e.code() == Errc::ParseError) throw;
        throw Error(Errc::ParseError, std::string("invalid chain (") + errc_name(e.code()) + "): " + e.what());
    }
}

ChainSpec load_chain_spec(const std::string& path) {
    std::string text = read_file(path);
    try {
        return parse_chain_spec(text);
    } catch (const Error& e) {
        throw Error(e.code(), path + ": " + e.what());
    }
}

std::string serialize_chain_spec(const ReversibleChain& chain, const std::string& name, SpecForm form) {
    nlohmann::ordered_json doc;
    doc["format_version"] = kChainFormatVersion;
    doc["name"] = name;
    doc["states"] = chain.states();
    const auto n = static_cast<Eigen::Index>(chain.size());
    const bool weights = form == SpecForm::Weights || (form == SpecForm::Auto && chain.weights().has_value());
    if (weights) {
        if (!chain.weights()) throw Error(Errc::InvalidArgument, "chain carries no weights");
        const Matrix& W = *chain.weights();
        auto list = nlohmann::ordered_json::array();
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = i; j < n; ++j)
                if (W(i, j) != 0.0)
                    list.push_back({chain.states()[static_cast<std::size_t>(i)],
                                    chain.states()[static_cast<std::size_t>(j)], W(i, j)});
        doc["weights"] = std::move(list);
    } else {
        auto rows = nlohmann::ordered_json::array();
        for (Eigen::Index i = 0; i < n; ++i) {
            auto row = nlohmann::ordered_json::array();
            for (Eigen::Index j = 0; j < n; ++j) row.push_back(chain.kernel()(i, j));
            rows.push_back(std::move(row));
        }
        doc["kernel"] = std::move(rows);
    }
    return dump(doc);
}

nlohmann::ordered_json to_json(const CertificateReport& r) {
    nlohmann::ordered_json j;
    j["name"] = r.name;
    j["verdict"] = verdict_name(r.verdict);
    j["lhs"] = number_json(r.lhs);
    j["rhs"] = number_json(r.rhs);
    j["slack"] = number_json(r.slack);
    j["unit"] = r.unit;
    j["lhs_source"] = r.lhs_source;
    j["rhs_source"] = r.rhs_source;
    j["context"] = r.context;
    if (!r.note.empty()) j["note"] = r.note;
    return j;
}

nlohmann::ordered_json report_document(const std::string& command, const std::string& input_digest,
                                       const nlohmann::ordered_json& input_description) {
    nlohmann::ordered_json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["tool"] = {{"name", "mixhit"}, {"version", tool_version()}};
    doc["command"] = command;
    doc["input"] = {{"sha256", input_digest}, {"description", input_description}};
    return doc;
}

nlohmann::ordered_json certificate_section(const std::vector<CertificateReport>& reports) {
    std::size_t pass = 0, fail = 0, info = 0;
    auto list = nlohmann::ordered_json::array();
    for (const auto& r : reports) {
        switch (r.verdict) {
            case Verdict::Pass: ++pass; break;
            case Verdict::Fail: ++fail; break;
            case Verdict::ReportedOnly: ++info; break;
        }
        list.push_back(to_json(r));
    }
    nlohmann::ordered_json out;
    out["summary"] = {{"total", reports.size()}, {"passed", pass}, {"failed", fail}, {"reported_only", info},
                      {"all_pass", fail == 0}};
    out["reports"] = std::move(list);
    return out;
}

std::string dump(const nlohmann::ordered_json& doc) { return doc.dump(2) + "\n"; }

std::string profile_csv(const Profile& profile, NumberFormat fmt, const std::string& value_column) {
    std::string out = "t," + value_column + "\n";
    for (std::size_t i = 0; i < profile.grid.size(); ++i)
        out += format_number(profile.grid[i], fmt) + "," + format_number(profile.values[i], fmt) + "\n";
    return out;
}

}  // namespace mixhit
