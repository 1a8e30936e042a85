#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kframe/frame.hpp"
#include "kframe/variational.hpp"

namespace kframe::io {

struct ProblemOptions {
  std::optional<double> tol;
  std::optional<int> max_iter;
  std::optional<std::uint64_t> seed;

  friend bool operator==(const ProblemOptions&, const ProblemOptions&) = default;
};

// One problem file. Frame vectors are the rows of "frame"; "index_set" is
// 1-based as written in the file.
struct ProblemFile {
  std::size_t dimension = 1;
  Frame frame{Mat(1, 1)};
  std::optional<Mat> k;
  std::optional<Mat> p;
  std::optional<Mat> lambda;
  std::optional<Vec> a;
  std::optional<Vec> b;
  std::optional<Vec> c;
  std::optional<Vec> f0;
  std::optional<ConvexSet> convex_set;
  std::optional<std::vector<std::size_t>> index_set;
  ProblemOptions options;

  KOperator k_operator() const;  // identity when K is absent

  friend bool operator==(const ProblemFile&, const ProblemFile&) = default;
};

// Errors: IoError, SyntaxError (line/column), SchemaError (field path).
ProblemFile parse_problem(const std::filesystem::path& path);
ProblemFile parse_problem_text(std::string_view text);

std::string serialize_problem(const ProblemFile& problem);

std::string read_file(const std::filesystem::path& path);

// FNV-1a 64-bit digest of the raw bytes, "fnv1a64:<16 hex digits>".
std::string digest(std::string_view bytes);

}  // namespace kframe::io
