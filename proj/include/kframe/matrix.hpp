#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace kframe {

using Vec = std::vector<double>;

// Dense row-major real matrix. Entries are finite and both dimensions are
// positive for every constructed matrix; a default-constructed Mat is the
// empty placeholder (0x0) and only valid as an assignment target.
class Mat {
 public:
  Mat() = default;
  Mat(std::size_t rows, std::size_t cols);  // zero-filled
  Mat(std::size_t rows, std::size_t cols, std::vector<double> entries);
  Mat(std::initializer_list<std::initializer_list<double>> rows);

  static Mat from_rows(const std::vector<Vec>& rows);
  static Mat from_columns(const std::vector<Vec>& columns);
  static Mat identity(std::size_t n);
  static Mat diag(std::span<const double> d);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return rows_ == 0; }
  bool is_square() const noexcept { return rows_ == cols_; }

  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }

  std::span<const double> data() const noexcept { return data_; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
  Vec col(std::size_t j) const;
  void set_col(std::size_t j, std::span<const double> v);
  std::vector<Vec> to_rows() const;

  Mat transpose() const;
  double frobenius_norm() const;
  double trace() const;

  // Columns [first, first + count) as a new matrix.
  Mat columns(std::size_t first, std::size_t count) const;
  Mat select_columns(std::span<const std::size_t> idx) const;

  Mat& operator+=(const Mat& rhs);
  Mat& operator-=(const Mat& rhs);
  Mat& operator*=(double s);

  friend bool operator==(const Mat&, const Mat&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Mat operator+(Mat lhs, const Mat& rhs);
Mat operator-(Mat lhs, const Mat& rhs);
Mat operator*(Mat lhs, double s);
Mat operator*(double s, Mat rhs);
Mat operator*(const Mat& lhs, const Mat& rhs);

Vec matvec(const Mat& m, std::span<const double> v);
Mat outer(std::span<const double> u, std::span<const double> v);
Mat symmetric_part(const Mat& m);
Mat matrix_power(const Mat& m, int exponent);

// ‖A − B‖_F without materializing the difference.
double distance(const Mat& a, const Mat& b);

double dot(std::span<const double> u, std::span<const double> v);
double norm(std::span<const double> v);
Vec add(std::span<const double> u, std::span<const double> v);
Vec sub(std::span<const double> u, std::span<const double> v);
Vec scaled(std::span<const double> v, double s);
// u + s·v
Vec axpy(std::span<const double> u, double s, std::span<const double> v);

bool all_finite(std::span<const double> v) noexcept;

// tol·(1 + scale): relative tolerance with an absolute floor at zero scale.
inline double scaled_tol(double tol, double scale) noexcept { return tol * (1.0 + scale); }

}  // namespace kframe
