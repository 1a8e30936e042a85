#include "kframe/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kframe/error.hpp"

namespace kframe {

namespace {

void require_positive(std::size_t rows, std::size_t cols) {
  if (rows == 0 || cols == 0) {
    throw Error(ErrorCode::InvalidArgument, "matrix dimensions must be positive");
  }
}

void require_same_shape(const Mat& a, const Mat& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorCode::DimensionMismatch,
                std::string(op) + ": " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                    " vs " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  }
}

void require_same_length(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                "vector lengths " + std::to_string(u.size()) + " and " + std::to_string(v.size()));
  }
}

}  // namespace

Mat::Mat(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {
  require_positive(rows, cols);
  data_.assign(rows * cols, 0.0);
}

Mat::Mat(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  require_positive(rows, cols);
  if (data_.size() != rows * cols) {
    throw Error(ErrorCode::DimensionMismatch, "entry count does not match rows x cols");
  }
  if (!all_finite(data_)) throw Error(ErrorCode::NonFinite, "matrix entries must be finite");
}

Mat::Mat(std::initializer_list<std::initializer_list<double>> rows) {
  std::vector<Vec> r;
  r.reserve(rows.size());
  for (const auto& row : rows) r.emplace_back(row);
  *this = from_rows(r);
}

Mat Mat::from_rows(const std::vector<Vec>& rows) {
  if (rows.empty()) throw Error(ErrorCode::InvalidArgument, "matrix needs at least one row");
  const std::size_t cols = rows.front().size();
  std::vector<double> entries;
  entries.reserve(rows.size() * cols);
  for (const auto& r : rows) {
    if (r.size() != cols) throw Error(ErrorCode::DimensionMismatch, "ragged rows");
    entries.insert(entries.end(), r.begin(), r.end());
  }
  return Mat(rows.size(), cols, std::move(entries));
}

Mat Mat::from_columns(const std::vector<Vec>& columns) {
  return from_rows(columns).transpose();
}

Mat Mat::identity(std::size_t n) {
  Mat m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Mat Mat::diag(std::span<const double> d) {
  Mat m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  if (!all_finite(d)) throw Error(ErrorCode::NonFinite, "diagonal entries must be finite");
  return m;
}

Vec Mat::col(std::size_t j) const {
  Vec v(rows_);
  for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
  return v;
}

void Mat::set_col(std::size_t j, std::span<const double> v) {
  if (v.size() != rows_) throw Error(ErrorCode::DimensionMismatch, "column length");
  for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
}

std::vector<Vec> Mat::to_rows() const {
  std::vector<Vec> out;
  out.reserve(rows_);
  for (std::size_t i = 0; i < rows_; ++i) out.emplace_back(row(i).begin(), row(i).end());
  return out;
}

Mat Mat::transpose() const {
  if (empty()) return {};
  Mat t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

double Mat::frobenius_norm() const { return norm(data_); }

double Mat::trace() const {
  double t = 0.0;
  for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
  return t;
}

Mat Mat::columns(std::size_t first, std::size_t count) const {
  if (first + count > cols_) throw Error(ErrorCode::DimensionMismatch, "column range");
  Mat out(rows_, count);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < count; ++j) out(i, j) = (*this)(i, first + j);
  return out;
}

Mat Mat::select_columns(std::span<const std::size_t> idx) const {
  Mat out(rows_, idx.size());
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < idx.size(); ++j) out(i, j) = (*this)(i, idx[j]);
  return out;
}

Mat& Mat::operator+=(const Mat& rhs) {
  require_same_shape(*this, rhs, "add");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += rhs.data_[k];
  return *this;
}

Mat& Mat::operator-=(const Mat& rhs) {
  require_same_shape(*this, rhs, "subtract");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= rhs.data_[k];
  return *this;
}

Mat& Mat::operator*=(double s) {
  for (double& x : data_) x *= s;
  return *this;
}

Mat operator+(Mat lhs, const Mat& rhs) { return lhs += rhs; }
Mat operator-(Mat lhs, const Mat& rhs) { return lhs -= rhs; }
Mat operator*(Mat lhs, double s) { return lhs *= s; }
Mat operator*(double s, Mat rhs) { return rhs *= s; }

Mat operator*(const Mat& lhs, const Mat& rhs) {
  if (lhs.cols() != rhs.rows()) {
    throw Error(ErrorCode::DimensionMismatch,
                "multiply: " + std::to_string(lhs.rows()) + "x" + std::to_string(lhs.cols()) +
                    " by " + std::to_string(rhs.rows()) + "x" + std::to_string(rhs.cols()));
  }
  Mat out(lhs.rows(), rhs.cols());
  for (std::size_t i = 0; i < lhs.rows(); ++i)
    for (std::size_t k = 0; k < lhs.cols(); ++k) {
      const double a = lhs(i, k);
      if (a == 0.0) continue;
      for (std::size_t j = 0; j < rhs.cols(); ++j) out(i, j) += a * rhs(k, j);
    }
  return out;
}

Vec matvec(const Mat& m, std::span<const double> v) {
  if (m.cols() != v.size()) throw Error(ErrorCode::DimensionMismatch, "matvec: vector length");
  Vec out(m.rows(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i) out[i] = dot(m.row(i), v);
  return out;
}

Mat outer(std::span<const double> u, std::span<const double> v) {
  Mat out(u.size(), v.size());
  for (std::size_t i = 0; i < u.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) out(i, j) = u[i] * v[j];
  return out;
}

Mat symmetric_part(const Mat& m) {
  if (!m.is_square()) throw Error(ErrorCode::NonSquare, "symmetric part of non-square matrix");
  Mat out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = 0.5 * (m(i, j) + m(j, i));
  return out;
}

Mat matrix_power(const Mat& m, int exponent) {
  if (!m.is_square()) throw Error(ErrorCode::NonSquare, "power of non-square matrix");
  if (exponent < 0) throw Error(ErrorCode::InvalidArgument, "negative matrix power");
  Mat out = Mat::identity(m.rows());
  for (int k = 0; k < exponent; ++k) out = out * m;
  return out;
}

double distance(const Mat& a, const Mat& b) {
  require_same_shape(a, b, "distance");
  double s = 0.0;
  for (std::size_t k = 0; k < a.data().size(); ++k) {
    const double d = a.data()[k] - b.data()[k];
    s += d * d;
  }
  return std::sqrt(s);
}

double dot(std::span<const double> u, std::span<const double> v) {
  require_same_length(u, v);
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
  return s;
}

double norm(std::span<const double> v) {
  // Scaled accumulation; frame entries span many orders of magnitude after powers.
  double scale = 0.0;
  for (double x : v) scale = std::max(scale, std::abs(x));
  if (scale == 0.0) return 0.0;
  double s = 0.0;
  for (double x : v) s += (x / scale) * (x / scale);
  return scale * std::sqrt(s);
}

Vec add(std::span<const double> u, std::span<const double> v) { return axpy(u, 1.0, v); }
Vec sub(std::span<const double> u, std::span<const double> v) { return axpy(u, -1.0, v); }

Vec scaled(std::span<const double> v, double s) {
  Vec out(v.begin(), v.end());
  for (double& x : out) x *= s;
  return out;
}

Vec axpy(std::span<const double> u, double s, std::span<const double> v) {
  require_same_length(u, v);
  Vec out(u.begin(), u.end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += s * v[i];
  return out;
}

bool all_finite(std::span<const double> v) noexcept {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace kframe
