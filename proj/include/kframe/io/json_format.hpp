#pragma once

#include <string>

#include <json.hpp>

namespace kframe::io {

using Json = nlohmann::ordered_json;

// Deterministic rendering: insertion-ordered keys, doubles as %.17g,
// non-finite doubles as null. Arrays holding only scalars stay on one line.
std::string format_json(const Json& value, bool pretty = true);

// "path: value" lines, one per leaf; arrays are printed inline.
std::string format_text(const Json& value);

std::string format_double(double x);

}  // namespace kframe::io
