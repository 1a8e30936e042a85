#include "kframe/frame.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "kframe/error.hpp"
#include "kframe/linalg.hpp"

namespace kframe {

Frame::Frame(Mat synthesis) : synthesis_(std::move(synthesis)) {
  if (synthesis_.empty()) throw Error(ErrorCode::InvalidArgument, "frame needs dim >= 1 and count >= 1");
}

Frame Frame::from_vectors(const std::vector<Vec>& vectors) { return Frame(Mat::from_columns(vectors)); }

KOperator::KOperator(Mat k) : k_(std::move(k)) {
  if (k_.empty() || !k_.is_square()) throw Error(ErrorCode::NonSquare, "K must be a square n×n matrix");
  kkstar_ = symmetric_part(k_ * k_.transpose());
  rank_ = numerical_rank(k_, kRankRtol);
}

KOperator KOperator::identity(std::size_t n) { return KOperator(Mat::identity(n)); }

void require_same_dim(const Frame& frame, const KOperator& k) {
  if (frame.dim() != k.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "frame lives in R^" + std::to_string(frame.dim()) + " but K is " +
                                                  std::to_string(k.dim()) + "x" + std::to_string(k.dim()));
  }
}

Mat frame_operator(const Frame& frame) {
  const Mat& f = frame.synthesis();
  return symmetric_part(f * f.transpose());
}

FrameOps build_ops(const Frame& frame) {
  const Mat& f = frame.synthesis();
  return FrameOps{f.transpose(), frame_operator(frame), symmetric_part(f.transpose() * f)};
}

FrameBounds kframe_bounds(const Frame& frame, const KOperator& k) {
  require_same_dim(frame, k);
  const std::size_t n = frame.dim();
  const Mat s = frame_operator(frame);
  const SymEig s_eig = sym_eig(s);

  FrameBounds out;
  out.upper_B = std::max(s_eig.eigenvalues.back(), 0.0);

  const SymEig kk = sym_eig(k.kkstar());
  const double kk_max = kk.eigenvalues.back();
  if (!(kk_max > 0.0)) {
    out.degenerate_k = true;
    out.is_k_frame = true;
    out.lower_A = std::numeric_limits<double>::infinity();
    return out;
  }

  // Split Rⁿ = V ⊕ W with V = ran(KKᵀ), W = ker(KKᵀ).
  std::vector<std::size_t> range_idx, null_idx;
  for (std::size_t i = 0; i < n; ++i) {
    (kk.eigenvalues[i] > kRankRtol * kk_max ? range_idx : null_idx).push_back(i);
  }
  const Mat v = kk.eigenvectors.select_columns(range_idx);
  const std::size_t r = range_idx.size();

  Mat schur = v.transpose() * s * v;
  Mat elim;  // maps x ∈ coords(V) to the optimal W-coordinates
  Mat w;
  if (!null_idx.empty()) {
    w = kk.eigenvectors.select_columns(null_idx);
    const Mat s12 = v.transpose() * s * w;
    const Mat s22 = w.transpose() * s * w;
    elim = -1.0 * (pinv(s22) * s12.transpose());
    schur += s12 * elim;
  }

  Vec inv_sqrt(r);
  double lambda_v_min = kk.eigenvalues[range_idx.front()];
  for (std::size_t i = 0; i < r; ++i) {
    const double lam = kk.eigenvalues[range_idx[i]];
    inv_sqrt[i] = 1.0 / std::sqrt(lam);
    lambda_v_min = std::min(lambda_v_min, lam);
  }
  Mat pencil(r, r);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < r; ++j) pencil(i, j) = inv_sqrt[i] * schur(i, j) * inv_sqrt[j];
  pencil = symmetric_part(pencil);

  const SymEig pe = sym_eig(pencil);
  const double a = pe.eigenvalues.front();
  // Roundoff in the Schur complement is amplified by 1/λ_min over ran(KKᵀ).
  const double zero_floor = kRankRtol * out.upper_B / lambda_v_min;
  out.is_k_frame = a > zero_floor;
  out.lower_A = out.is_k_frame ? a : 0.0;

  Vec x(r);
  for (std::size_t i = 0; i < r; ++i) x[i] = inv_sqrt[i] * pe.eigenvectors(i, 0);
  Vec f = matvec(v, x);
  if (!null_idx.empty()) f = add(f, matvec(w, matvec(elim, x)));
  out.witness = f;
  const double kf = dot(f, matvec(k.kkstar(), f));
  out.witness_ratio = kf > 0.0 ? dot(f, matvec(s, f)) / kf : 0.0;
  return out;
}

ParsevalCheck compare_frame_operator(const Mat& s, const Mat& target, double tol) {
  if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be positive");
  ParsevalCheck c;
  c.defect = distance(s, target);
  c.threshold = scaled_tol(tol, target.frobenius_norm());
  c.is_parseval = c.defect <= c.threshold;
  return c;
}

ParsevalCheck parseval_k_check(const Frame& frame, const KOperator& k, double tol) {
  require_same_dim(frame, k);
  return compare_frame_operator(frame_operator(frame), k.kkstar(), tol);
}

KOperator canonical_k(const Frame& frame) { return KOperator(sqrt_psd(frame_operator(frame))); }

}  // namespace kframe
