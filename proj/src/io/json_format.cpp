#include "kframe/io/json_format.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace kframe::io {

namespace {

bool is_scalar(const Json& j) { return !j.is_array() && !j.is_object(); }

void write(const Json& j, bool pretty, int depth, std::string& out) {
  const auto newline = [&](int d) {
    if (!pretty) return;
    out += '\n';
    out.append(static_cast<std::size_t>(2 * d), ' ');
  };
  switch (j.type()) {
    case Json::value_t::number_float:
      out += format_double(j.get<double>());
      return;
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      bool flat = true;
      for (const auto& e : j) flat = flat && (is_scalar(e) || (e.is_array() && std::all_of(e.begin(), e.end(), is_scalar)));
      const bool inline_array = !pretty || std::all_of(j.begin(), j.end(), is_scalar);
      out += '[';
      bool first = true;
      for (const auto& e : j) {
        if (!first) out += inline_array ? ", " : ",";
        if (!inline_array) newline(depth + 1);
        write(e, pretty && !flat, depth + 1, out);
        first = false;
      }
      if (!inline_array) newline(depth);
      out += ']';
      return;
    }
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        newline(depth + 1);
        out += Json(it.key()).dump();
        out += pretty ? ": " : ":";
        write(it.value(), pretty, depth + 1, out);
        first = false;
      }
      newline(depth);
      out += '}';
      return;
    }
    default:
      out += j.dump();
      return;
  }
}

void flatten(const Json& j, const std::string& path, std::string& out) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      flatten(it.value(), path.empty() ? it.key() : path + "." + it.key(), out);
    }
    return;
  }
  out += path;
  out += ": ";
  if (j.is_string()) {
    out += j.get<std::string>();
  } else {
    write(j, false, 0, out);
  }
  out += '\n';
}

}  // namespace

std::string format_double(double x) {
  if (!std::isfinite(x)) return "null";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string format_json(const Json& value, bool pretty) {
  std::string out;
  write(value, pretty, 0, out);
  out += '\n';
  return out;
}

std::string format_text(const Json& value) {
  std::string out;
  flatten(value, "", out);
  return out;
}

}  // namespace kframe::io
