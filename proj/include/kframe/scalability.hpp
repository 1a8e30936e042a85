#pragma once

#include "kframe/frame.hpp"

namespace kframe {

// Nonnegative weights c_j; the Parseval identity only sees c_j², so the
// nonnegative representative is canonical.
class Scaling {
 public:
  explicit Scaling(Vec weights);

  std::size_t size() const noexcept { return weights_.size(); }
  const Vec& weights() const noexcept { return weights_; }
  double operator[](std::size_t j) const { return weights_[j]; }

  friend bool operator==(const Scaling&, const Scaling&) = default;

 private:
  Vec weights_;
};

// Frame with columns c_j·f_j.
Frame apply_scaling(const Frame& frame, const Scaling& scaling);

struct ScalingSolveResult {
  Scaling scaling{Vec{}};
  double residual = 0.0;  // ‖Σ c_j² f_j f_jᵀ − KKᵀ‖_F
  double threshold = 0.0;
  bool feasible = false;
  // Another nonnegative weight vector attains the same frame operator.
  bool nonunique = false;
  int nnls_iterations = 0;
};

// Half-vectorization with √2-weighted off-diagonals, so ‖vech(M)‖₂ = ‖M‖_F
// for symmetric M.
Vec vech(const Mat& symmetric);

ScalingSolveResult solve_scaling(const Frame& frame, const KOperator& k, double tol = 1e-9);

ParsevalCheck verify_scaling(const Frame& frame, const KOperator& k, const Scaling& scaling, double tol = 1e-9);

struct TransformedFrame {
  Frame frame;
  Scaling scaling;
};

// {U f_j} with the scaling unchanged. A scalable frame maps to a U_s-frame and
// a U₀_s-frame maps to a (U·U₀)_s-frame.
TransformedFrame transform_frame(const Frame& frame, const Scaling& scaling, const Mat& u);

struct PowerTransform {
  Frame frame;    // {K^N f_j}
  KOperator op;   // K^{N+1}
};

PowerTransform power_transform(const Frame& frame, const Scaling& scaling, const KOperator& k, int exponent,
                               double tol = 1e-9);

// {T f_j} for T commuting with K and T·Tᵀ = I; stays a K_s-frame.
Frame commuting_isometry_transform(const Frame& frame, const Scaling& scaling, const KOperator& k, const Mat& t,
                                   double tol = 1e-9);

struct OperatorIdentityReport {
  bool transformed_is_ks = false;     // ({T f_j}, c) is a K_s-frame
  double transformed_defect = 0.0;    // ‖T·S_c·Tᵀ − KKᵀ‖_F
  bool identity_holds = false;        // S_c = (T⁻¹K)(T⁻¹K)ᵀ
  double identity_defect = 0.0;
  bool agree = false;
  double condition = 0.0;
};

OperatorIdentityReport check_frame_operator_identity(const Frame& frame, const Scaling& scaling, const KOperator& k,
                                                     const Mat& t, double tol = 1e-9);

// If (f_j, c) and (U f_j, c) are both K_s-frames then (f_j, c) is a (UK)_s-frame.
struct SharedScalingReport {
  bool hypothesis = false;
  bool conclusion = false;
  double conclusion_defect = 0.0;
};

SharedScalingReport check_shared_scaling(const Frame& frame, const Scaling& scaling, const KOperator& k,
                                         const Mat& u, double tol = 1e-9);

}  // namespace kframe
