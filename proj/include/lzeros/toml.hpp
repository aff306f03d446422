#pragma once

#include <string_view>

#include <json.hpp>

namespace lzeros {

// Parser for the TOML subset used by run configs: tables, dotted keys,
// basic and literal strings, integers, floats (inf/nan included), booleans,
// arrays (possibly spanning lines) and inline tables. Dates and multi-line
// strings are rejected. Throws ConfigError with the offending line number.
nlohmann::json parse_toml(std::string_view text);

}  // namespace lzeros
