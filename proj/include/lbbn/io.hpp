#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <variant>

#include "json.hpp"

#include "lbbn/model.hpp"
#include "lbbn/transform.hpp"

namespace lbbn::io {

using Json = nlohmann::ordered_json;
using AnyNetwork = std::variant<LowerBoundNetwork, StandardNetwork>;

// Significant digits of every number written by the tools.
inline constexpr int kOutputDigits = 12;

double round_sig(double x, int digits = kOutputDigits);

// Throws FormatError on malformed documents. Structural and numeric
// invariants are left to validate(). Lower-bound rows within the sum
// tolerance above one are renormalized.
AnyNetwork parse_network(const Json& doc);
AnyNetwork parse_network_text(std::string_view text);
AnyNetwork load_network(const std::filesystem::path& path);

Json to_json(const LowerBoundNetwork& net);
Json to_json(const StandardNetwork& net);
Json provenance_json(const LbbnArtifact& artifact);

// "A=a1,B=b2"; empty text means no evidence. Throws FormatError.
Evidence parse_evidence(std::string_view text);

}  // namespace lbbn::io
