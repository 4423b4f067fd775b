#include "mixhit/error.hpp"
#include "mixhit/io.hpp"
#include "testing.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace mixhit;

namespace {

std::string parse_error(const std::string& text) {
    try {
        parse_chain_spec(text);
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::ParseError);
        return e.what();
    }
    ADD_FAILURE() << "accepted: " << text;
    return {};
}

}  // namespace

TEST(ChainSpec, KernelRoundTrip) {
    for (const auto& chain : {random_weights(6, 3), biased_path(5, 0.7), aldous(2).chain}) {
        for (auto form : {SpecForm::Kernel, SpecForm::Auto}) {
            auto back = parse_chain_spec(serialize_chain_spec(chain, "x", form));
            EXPECT_EQ(back.name, "x");
            EXPECT_EQ(back.chain.states(), chain.states());
            EXPECT_LE((back.chain.kernel() - chain.kernel()).cwiseAbs().maxCoeff(), 1e-15);
            EXPECT_LE((back.chain.pi() - chain.pi()).cwiseAbs().maxCoeff(), 1e-14);
        }
    }
}

TEST(ChainSpec, WeightsForm) {
    auto spec = parse_chain_spec(R"({"format_version": 1, "states": ["a", "b", "c"],
        "weights": [["a", "b", 1], ["b", "c", "1/2"], ["c", "c", 0.5]]})");
    const auto& c = spec.chain;
    EXPECT_NEAR(c.kernel()(1, 0), 2.0 / 3.0, 1e-15);
    EXPECT_NEAR(c.kernel()(2, 2), 0.5, 1e-15);
    EXPECT_NEAR(c.pi()(0), 2.0 / 7.0, 1e-15);
    auto again = parse_chain_spec(serialize_chain_spec(c, "w", SpecForm::Weights));
    EXPECT_LE((again.chain.kernel() - c.kernel()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(ChainSpec, ExactRationalRows) {
    auto spec = parse_chain_spec(R"({"format_version": 1, "states": ["0", "1"],
        "kernel": [["2/3", "1/3"], ["1/3", "2/3"]]})");
    EXPECT_DOUBLE_EQ(spec.chain.kernel()(0, 1), 1.0 / 3.0);
    auto msg = parse_error(R"({"format_version": 1, "states": ["0", "1"],
        "kernel": [["2/3", "1/4"], ["1/3", "2/3"]]})");
    EXPECT_NE(msg.find("/kernel/0"), std::string::npos) << msg;
}

TEST(ChainSpec, SyntaxErrorsCarryPosition) {
    auto msg = parse_error("{\n  \"format_version\": 1,\n  \"states\": [\"a\" \"b\"]\n}");
    EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
    EXPECT_NE(msg.find("column"), std::string::npos) << msg;
}

TEST(ChainSpec, SemanticErrorsCarryPointer) {
    EXPECT_NE(parse_error(R"({"states": ["a"], "kernel": [[1]]})").find("/format_version"), std::string::npos);
    EXPECT_NE(parse_error(R"({"format_version": 1, "states": ["a", "a"], "kernel": [[1, 0], [0, 1]]})").find("/states/1"),
              std::string::npos);
    EXPECT_NE(parse_error(R"({"format_version": 1, "states": ["a", "b"], "kernel": [[0.5, 0.5], [1, "x"]]})")
                  .find("/kernel/1/1"),
              std::string::npos);
    EXPECT_NE(parse_error(R"({"format_version": 1, "states": ["a", "b"], "weights": [["a", "q", 1]]})")
                  .find("/weights/0/1"),
              std::string::npos);
    EXPECT_NE(parse_error(R"({"format_version": 1, "states": ["a", "b"]})").find("exactly one"), std::string::npos);
    // Parsed fine but not a valid chain.
    EXPECT_NE(parse_error(R"({"format_version": 1, "states": ["a", "b"], "kernel": [[1, 0], [0, 1]]})")
                  .find("NotIrreducible"),
              std::string::npos);
}

TEST(Digest, KnownVector) {
    EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST(Numbers, Formatting) {
    EXPECT_EQ(format_number(0.1), "0.1");
    EXPECT_EQ(format_number(0.1, NumberFormat::Fixed17), "0.10000000000000001");
    EXPECT_EQ(format_number(INFINITY), "inf");
    EXPECT_EQ(format_number(-INFINITY), "-inf");
    EXPECT_EQ(format_number(NAN), "nan");
    EXPECT_EQ(std::stod(format_number(1.0 / 3.0)), 1.0 / 3.0);
    EXPECT_EQ(number_json(INFINITY), "inf");
    EXPECT_TRUE(number_json(NAN).is_null());
    EXPECT_EQ(number_json(2.5).get<double>(), 2.5);
}

TEST(Reports, DocumentShape) {
    auto doc = report_document("certify", sha256_hex("x"), {{"kind", "test"}});
    EXPECT_EQ(doc["schema_version"], kSchemaVersion);
    EXPECT_EQ(doc["tool"]["name"], "mixhit");
    EXPECT_EQ(doc["command"], "certify");
    std::vector<CertificateReport> reps{judge("a", 1, 2, "u", "l", "r"), judge("b", 3, 2, "u", "l", "r"),
                                        reported_only("c", 1, 1, "u", "l", "r")};
    auto sec = certificate_section(reps);
    EXPECT_EQ(sec["summary"]["total"], 3);
    EXPECT_EQ(sec["summary"]["passed"], 1);
    EXPECT_EQ(sec["summary"]["failed"], 1);
    EXPECT_EQ(sec["summary"]["reported_only"], 1);
    EXPECT_EQ(sec["summary"]["all_pass"], false);
    auto text = dump(doc);
    EXPECT_EQ(text.back(), '\n');
}

TEST(Reports, ProfileCsv) {
    Profile p;
    p.grid = {0.0, 1.0};
    p.values = {0.5, 0.25};
    EXPECT_EQ(profile_csv(p, NumberFormat::Shortest), "t,d\n0,0.5\n1,0.25\n");
}
