#include "kframe/io/problem.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "kframe/error.hpp"
#include "kframe/io/json_format.hpp"

namespace kframe::io {

namespace {

[[noreturn]] void schema_error(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::SchemaError, path + ": " + what);
}

double to_number(const Json& j, const std::string& path) {
  if (!j.is_number()) schema_error(path, "expected a number");
  const double x = j.get<double>();
  if (!std::isfinite(x)) schema_error(path, "number is not finite");
  return x;
}

Vec to_vector(const Json& j, const std::string& path, std::optional<std::size_t> length) {
  if (!j.is_array()) schema_error(path, "expected an array of numbers");
  if (length && j.size() != *length) {
    schema_error(path, "expected " + std::to_string(*length) + " numbers, got " + std::to_string(j.size()));
  }
  if (j.empty()) schema_error(path, "array must not be empty");
  Vec out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(to_number(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<Vec> to_rows(const Json& j, const std::string& path, std::optional<std::size_t> rows, std::size_t cols) {
  if (!j.is_array()) schema_error(path, "expected an array of rows");
  if (j.empty()) schema_error(path, "needs at least one row");
  if (rows && j.size() != *rows) {
    schema_error(path, "expected " + std::to_string(*rows) + " rows, got " + std::to_string(j.size()));
  }
  std::vector<Vec> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(to_vector(j[i], path + "[" + std::to_string(i) + "]", cols));
  return out;
}

Mat to_square(const Json& j, const std::string& path, std::size_t n) { return Mat::from_rows(to_rows(j, path, n, n)); }

std::size_t to_count(const Json& j, const std::string& path) {
  if (j.is_number_unsigned() || j.is_number_integer()) {
    const auto v = j.get<std::int64_t>();
    if (v > 0) return static_cast<std::size_t>(v);
  } else if (j.is_number_float()) {
    const double v = j.get<double>();
    if (v > 0 && std::floor(v) == v && v < 1e9) return static_cast<std::size_t>(v);
  }
  schema_error(path, "expected a positive integer");
}

ConvexSet to_convex_set(const Json& j, std::size_t n) {
  const std::string path = "convex_set";
  if (!j.is_object()) schema_error(path, "expected an object with a \"kind\" field");
  if (!j.contains("kind") || !j["kind"].is_string()) schema_error(path + ".kind", "expected a string");
  const std::string kind = j["kind"].get<std::string>();

  auto allow = [&](std::initializer_list<const char*> keys) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      bool ok = it.key() == "kind";
      for (const char* k : keys) ok = ok || it.key() == k;
      if (!ok) schema_error(path + "." + it.key(), "unexpected field for kind \"" + kind + "\"");
    }
    for (const char* k : keys)
      if (!j.contains(k)) schema_error(path + "." + k, "missing field");
  };

  try {
    if (kind == "whole_space") {
      allow({});
      return ConvexSet::whole_space();
    }
    if (kind == "box") {
      allow({"lo", "hi"});
      return ConvexSet::box(to_vector(j["lo"], path + ".lo", n), to_vector(j["hi"], path + ".hi", n));
    }
    if (kind == "ball") {
      allow({"center", "radius"});
      return ConvexSet::ball(to_vector(j["center"], path + ".center", n), to_number(j["radius"], path + ".radius"));
    }
    if (kind == "halfspace") {
      allow({"normal", "offset"});
      return ConvexSet::halfspace(to_vector(j["normal"], path + ".normal", n),
                                  to_number(j["offset"], path + ".offset"));
    }
    if (kind == "affine") {
      allow({"point", "span"});
      const auto span = to_rows(j["span"], path + ".span", std::nullopt, n);
      return ConvexSet::affine(to_vector(j["point"], path + ".point", n), Mat::from_columns(span));
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::SchemaError) throw;
    schema_error(path, e.what());
  }
  schema_error(path + ".kind", "unknown kind \"" + kind + "\"");
}

Json convex_set_json(const ConvexSet& set) {
  Json j;
  j["kind"] = std::string(set.name());
  if (const auto* b = std::get_if<Box>(&set.kind())) {
    j["lo"] = b->lo;
    j["hi"] = b->hi;
  } else if (const auto* b = std::get_if<Ball>(&set.kind())) {
    j["center"] = b->center;
    j["radius"] = b->radius;
  } else if (const auto* h = std::get_if<Halfspace>(&set.kind())) {
    j["normal"] = h->normal;
    j["offset"] = h->offset;
  } else if (const auto* a = std::get_if<Affine>(&set.kind())) {
    j["point"] = a->point;
    j["span"] = a->basis.transpose().to_rows();
  } else if (std::holds_alternative<ProjectionOracle>(set.kind())) {
    throw Error(ErrorCode::InvalidArgument, "projection oracles cannot be serialized");
  }
  return j;
}

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = {"dimension", "frame", "K", "P", "lambda", "a", "b",
                                                "c", "f0", "convex_set", "index_set", "options"};
  return keys;
}

}  // namespace

KOperator ProblemFile::k_operator() const { return k ? KOperator(*k) : KOperator::identity(dimension); }

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  return ss.str();
}

std::string digest(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ProblemFile parse_problem(const std::filesystem::path& path) { return parse_problem_text(read_file(path)); }

ProblemFile parse_problem_text(std::string_view text) {
  Json root;
  try {
    root = Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    const auto [line, col] = line_column(text, e.byte);
    throw Error(ErrorCode::SyntaxError,
                "line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + e.what());
  }
  if (!root.is_object()) schema_error("$", "expected a JSON object");
  for (auto it = root.begin(); it != root.end(); ++it) {
    const auto& keys = known_keys();
    if (std::find(keys.begin(), keys.end(), it.key()) == keys.end()) schema_error(it.key(), "unknown field");
  }
  if (!root.contains("dimension")) schema_error("dimension", "missing field");
  if (!root.contains("frame")) schema_error("frame", "missing field");

  ProblemFile p;
  p.dimension = to_count(root["dimension"], "dimension");
  const std::size_t n = p.dimension;
  p.frame = Frame(Mat::from_columns(to_rows(root["frame"], "frame", std::nullopt, n)));
  const std::size_t m = p.frame.count();

  if (root.contains("K")) p.k = to_square(root["K"], "K", n);
  if (root.contains("P")) p.p = to_square(root["P"], "P", n);
  if (root.contains("lambda")) p.lambda = to_square(root["lambda"], "lambda", n);
  if (root.contains("a")) p.a = to_vector(root["a"], "a", m);
  if (root.contains("b")) p.b = to_vector(root["b"], "b", m);
  if (root.contains("c")) p.c = to_vector(root["c"], "c", m);
  if (root.contains("f0")) p.f0 = to_vector(root["f0"], "f0", n);
  if (root.contains("convex_set")) p.convex_set = to_convex_set(root["convex_set"], n);
  if (root.contains("index_set")) {
    const Json& is = root["index_set"];
    if (!is.is_array()) schema_error("index_set", "expected an array of 1-based indices");
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < is.size(); ++i) {
      const std::string path = "index_set[" + std::to_string(i) + "]";
      const std::size_t v = to_count(is[i], path);
      if (v > m) schema_error(path, "index " + std::to_string(v) + " exceeds frame count " + std::to_string(m));
      idx.push_back(v);
    }
    p.index_set = std::move(idx);
  }
  if (root.contains("options")) {
    const Json& o = root["options"];
    if (!o.is_object()) schema_error("options", "expected an object");
    for (auto it = o.begin(); it != o.end(); ++it) {
      const std::string path = "options." + it.key();
      if (it.key() == "tol") {
        const double tol = to_number(it.value(), path);
        if (!(tol > 0.0)) schema_error(path, "must be positive");
        p.options.tol = tol;
      } else if (it.key() == "max_iter") {
        p.options.max_iter = static_cast<int>(to_count(it.value(), path));
      } else if (it.key() == "seed") {
        if (!it.value().is_number_unsigned()) schema_error(path, "expected a nonnegative integer");
        p.options.seed = it.value().get<std::uint64_t>();
      } else {
        schema_error(path, "unknown option");
      }
    }
  }
  return p;
}

std::string serialize_problem(const ProblemFile& p) {
  Json j;
  j["dimension"] = p.dimension;
  j["frame"] = p.frame.synthesis().transpose().to_rows();
  if (p.k) j["K"] = p.k->to_rows();
  if (p.p) j["P"] = p.p->to_rows();
  if (p.lambda) j["lambda"] = p.lambda->to_rows();
  if (p.a) j["a"] = *p.a;
  if (p.b) j["b"] = *p.b;
  if (p.c) j["c"] = *p.c;
  if (p.f0) j["f0"] = *p.f0;
  if (p.convex_set) j["convex_set"] = convex_set_json(*p.convex_set);
  if (p.index_set) j["index_set"] = *p.index_set;
  if (p.options != ProblemOptions{}) {
    Json o = Json::object();
    if (p.options.tol) o["tol"] = *p.options.tol;
    if (p.options.max_iter) o["max_iter"] = *p.options.max_iter;
    if (p.options.seed) o["seed"] = *p.options.seed;
    j["options"] = o;
  }
  return format_json(j);
}

}  // namespace kframe::io
