#pragma once

#include <cstddef>
#include <vector>

#include "kframe/matrix.hpp"

namespace kframe {

// Relative threshold separating range from null space of KKᵀ.
inline constexpr double kRankRtol = 1e-10;

// Finite frame {f_j} in Rⁿ held as the n×m synthesis matrix F whose j-th
// column is f_j. Zero vectors are allowed.
class Frame {
 public:
  explicit Frame(Mat synthesis);
  static Frame from_vectors(const std::vector<Vec>& vectors);

  std::size_t dim() const noexcept { return synthesis_.rows(); }
  std::size_t count() const noexcept { return synthesis_.cols(); }
  const Mat& synthesis() const noexcept { return synthesis_; }
  Vec vector(std::size_t j) const { return synthesis_.col(j); }

  friend bool operator==(const Frame&, const Frame&) = default;

 private:
  Mat synthesis_;
};

class KOperator {
 public:
  explicit KOperator(Mat k);
  static KOperator identity(std::size_t n);

  std::size_t dim() const noexcept { return k_.rows(); }
  const Mat& matrix() const noexcept { return k_; }
  const Mat& kkstar() const noexcept { return kkstar_; }
  int rank() const noexcept { return rank_; }

 private:
  Mat k_;
  Mat kkstar_;
  int rank_ = 0;
};

struct FrameOps {
  Mat analysis;  // m×n, row j is f_jᵀ
  Mat frame_op;  // n×n, S = F·Fᵀ
  Mat gram;      // m×m, Fᵀ·F
};

FrameOps build_ops(const Frame& frame);
Mat frame_operator(const Frame& frame);

// Optimal constants in A‖Kᵀf‖² ≤ Σ⟨f, f_j⟩² ≤ B‖f‖².
struct FrameBounds {
  double lower_A = 0.0;
  double upper_B = 0.0;
  bool is_k_frame = false;
  // K = 0: every A works, lower_A is +∞.
  bool degenerate_k = false;
  // Minimizer of ⟨Sf, f⟩/‖Kᵀf‖², normalized to ‖Kᵀf‖ = 1 (empty when degenerate).
  Vec witness;
  double witness_ratio = 0.0;
};

// lower_A is the generalized eigenvalue of the pencil (S, KKᵀ) restricted to
// ran(KKᵀ), after eliminating the null-space directions of KKᵀ through the
// Schur complement of S.
FrameBounds kframe_bounds(const Frame& frame, const KOperator& k);

struct ParsevalCheck {
  bool is_parseval = false;
  double defect = 0.0;     // ‖S − KKᵀ‖_F
  double threshold = 0.0;  // tol·(1 + ‖KKᵀ‖_F)
};

ParsevalCheck parseval_k_check(const Frame& frame, const KOperator& k, double tol = 1e-9);
ParsevalCheck compare_frame_operator(const Mat& s, const Mat& target, double tol);

// K = S^{1/2}; every frame is a Parseval frame for its canonical K.
KOperator canonical_k(const Frame& frame);

void require_same_dim(const Frame& frame, const KOperator& k);

}  // namespace kframe
