#pragma once

#include <optional>
#include <vector>

#include "kframe/scalability.hpp"

namespace kframe {

// Orthogonal projection: symmetric and idempotent within 1e-10·(1 + ‖P‖_F).
class Projection {
 public:
  explicit Projection(Mat p);

  std::size_t dim() const noexcept { return p_.rows(); }
  const Mat& matrix() const noexcept { return p_; }
  Mat complement() const;  // I − P

  friend bool operator==(const Projection&, const Projection&) = default;

 private:
  Mat p_;
};

struct PiecewiseScaling {
  Vec a;
  Vec b;
  Projection projection;
};

void validate(const PiecewiseScaling& pw, const Frame& frame);

// Column j: a_j·P·f_j + b_j·(I − P)·f_j.
Frame apply_piecewise(const Frame& frame, const PiecewiseScaling& pw);

struct PiecewiseCheckReport {
  bool is_kps = false;
  double kps_defect = 0.0;         // ‖S_combined − KKᵀ‖_F
  double piece_x_defect = 0.0;     // ‖Σ a_j² (Pf_j)(Pf_j)ᵀ − P·KKᵀ·P‖_F
  double piece_y_defect = 0.0;     // same on ran(I − P)
  double cross_sym_defect = 0.0;   // ‖sym(T₁ᵀD₁D₂T₂)‖_F
  double cross_full_defect = 0.0;  // ‖T₁ᵀD₁D₂T₂‖_F
  double threshold = 0.0;          // tol·(1 + ‖KKᵀ‖_F), shared by every defect
  bool pieces_ok = false;
  bool cross_ok = false;
  double commutator = 0.0;  // ‖PK − KP‖_F
  bool commutes = false;
  // is_kps ⇔ (pieces_ok ∧ cross_ok); only guaranteed when commutes.
  bool equivalence_holds = false;
};

PiecewiseCheckReport check_piecewise(const Frame& frame, const KOperator& k, const PiecewiseScaling& pw,
                                     double tol = 1e-9);

// Index set is 0-based here; the CLI converts from 1-based input.
struct DisjointBuild {
  PiecewiseScaling scaling;
  ScalingSolveResult x_piece;
  ScalingSolveResult y_piece;
};

DisjointBuild build_disjoint_piecewise(const Frame& frame, const KOperator& k, const Projection& p,
                                       const std::vector<std::size_t>& index_set, double tol = 1e-9);

struct RestrictionReport {
  bool parseval_input = false;    // {f_j} is a Parseval K-frame on all of Rⁿ
  bool holds = false;             // P(S_P − KKᵀ)P = 0 within tolerance
  double defect = 0.0;
  bool range_included = false;    // ran(Kᵀ) ⊆ ran(P)
  double range_gap = 0.0;         // sine of the largest principal angle
};

// Compressed Parseval identity on X = ran(P) for {P f_j}. Requires PK = KP
// (PreconditionFailed otherwise); whether the full frame is Parseval is
// reported rather than enforced, since the compressed identity can hold alone.
RestrictionReport restrict_check_lemma(const Frame& frame, const KOperator& k, const Projection& p,
                                       double tol = 1e-9);

PiecewiseScaling transport_piecewise(const Frame& frame, const KOperator& k, const PiecewiseScaling& pw,
                                     const Mat& u, const Projection& q, double tol = 1e-9);

}  // namespace kframe
