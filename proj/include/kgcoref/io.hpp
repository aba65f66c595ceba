#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

namespace kgcoref {

// Whole-file helpers. Failures are InputErrors naming the path.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

// nlohmann parse with "<origin>:<line>:<column>: ..." error context.
nlohmann::json parse_json(std::string_view text, const std::string& origin);

// Decimal with exactly `places` fractional digits, "-0.000000" folded to
// "0.000000".
std::string fixed(double value, int places = 6);

// Quoted, escaped JSON string literal.
std::string quote(std::string_view s);

}  // namespace kgcoref
