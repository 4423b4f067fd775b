#pragma once

#include "mixhit/certify.hpp"
#include "mixhit/distance.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <string_view>

namespace mixhit {

inline constexpr int kSchemaVersion = 1;
inline constexpr int kChainFormatVersion = 1;

const char* tool_version();

enum class NumberFormat { Shortest, Fixed17 };

// "inf", "-inf" and "nan" for non-finite values.
std::string format_number(double v, NumberFormat fmt = NumberFormat::Shortest);
// Finite values as JSON numbers, infinities as the strings "inf"/"-inf", NaN as null.
nlohmann::ordered_json number_json(double v);

std::string sha256_hex(std::string_view bytes);

struct ChainSpec {
    std::string name;
    ReversibleChain chain;
};

// Kernel entries and weights may be JSON numbers (read as binary64) or
// strings "p/q" (read exactly; a kernel given this way must have exact
// unit row sums).  Errors carry a line/column or a JSON pointer.
ChainSpec parse_chain_spec(std::string_view text);
ChainSpec load_chain_spec(const std::string& path);

enum class SpecForm { Auto, Kernel, Weights };

std::string serialize_chain_spec(const ReversibleChain& chain, const std::string& name,
                                 SpecForm form = SpecForm::Auto);

std::string read_file(const std::string& path);

nlohmann::ordered_json to_json(const CertificateReport& report);

// Envelope shared by every command output.
nlohmann::ordered_json report_document(const std::string& command, const std::string& input_digest,
                                       const nlohmann::ordered_json& input_description);

nlohmann::ordered_json certificate_section(const std::vector<CertificateReport>& reports);

// Two-space indented JSON with a trailing newline.
std::string dump(const nlohmann::ordered_json& doc);

std::string profile_csv(const Profile& profile, NumberFormat fmt, const std::string& value_column = "d");

}  // namespace mixhit
