#pragma once

#include <string>

#include "json.hpp"

namespace certctl::cli {

/// Parses the TOML subset used by certctl config files into a JSON tree:
/// comments, [table] and [table.sub] headers, [[array-of-tables]], and
/// key = value with strings, integers, floats, booleans and flat arrays
/// (which may span lines until brackets balance). Dotted keys and inline
/// tables are not supported.
/// Throws std::runtime_error with a line number on parse errors.
nlohmann::json parse_toml(const std::string& text);

/// Reads and parses a file; throws std::runtime_error if unreadable.
nlohmann::json parse_toml_file(const std::string& path);

}  // namespace certctl::cli
