#include "kframe/piecewise.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kframe/error.hpp"
#include "kframe/linalg.hpp"

namespace kframe {

namespace {

void require_projection_dim(const Frame& frame, const Projection& p) {
  if (p.dim() != frame.dim()) throw Error(ErrorCode::DimensionMismatch, "projection dimension differs from frame");
}

double commutator_norm(const Mat& x, const Mat& y) { return distance(x * y, y * x); }

Mat weighted_gram(const Mat& left, std::span<const double> weights, const Mat& right) {
  // left·diag(weights)·rightᵀ
  Mat scaled_right = right;
  for (std::size_t i = 0; i < scaled_right.rows(); ++i)
    for (std::size_t j = 0; j < scaled_right.cols(); ++j) scaled_right(i, j) *= weights[j];
  return left * scaled_right.transpose();
}

}  // namespace

Projection::Projection(Mat p) : p_(std::move(p)) {
  if (p_.empty() || !p_.is_square()) throw Error(ErrorCode::NonSquare, "projection must be square");
  const double tol = 1e-10 * (1.0 + p_.frobenius_norm());
  const double asym = distance(p_, p_.transpose());
  const double idem = distance(p_ * p_, p_);
  if (asym > tol || idem > tol) {
    throw Error(ErrorCode::NotProjection,
                "‖P − Pᵀ‖_F = " + std::to_string(asym) + ", ‖P² − P‖_F = " + std::to_string(idem));
  }
}

Mat Projection::complement() const { return Mat::identity(dim()) - p_; }

void validate(const PiecewiseScaling& pw, const Frame& frame) {
  require_projection_dim(frame, pw.projection);
  if (pw.a.size() != frame.count() || pw.b.size() != frame.count()) {
    throw Error(ErrorCode::DimensionMismatch, "a and b need one entry per frame vector");
  }
  for (const Vec* v : {&pw.a, &pw.b})
    for (double x : *v)
      if (!std::isfinite(x) || x < 0.0) throw Error(ErrorCode::InvalidArgument, "a, b must be finite and >= 0");
}

Frame apply_piecewise(const Frame& frame, const PiecewiseScaling& pw) {
  validate(pw, frame);
  const Mat px = pw.projection.matrix() * frame.synthesis();
  const Mat py = pw.projection.complement() * frame.synthesis();
  Mat out(frame.dim(), frame.count());
  for (std::size_t i = 0; i < out.rows(); ++i)
    for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) = pw.a[j] * px(i, j) + pw.b[j] * py(i, j);
  return Frame(std::move(out));
}

PiecewiseCheckReport check_piecewise(const Frame& frame, const KOperator& k, const PiecewiseScaling& pw,
                                     double tol) {
  require_same_dim(frame, k);
  validate(pw, frame);
  if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be positive");

  const Mat& p = pw.projection.matrix();
  const Mat q = pw.projection.complement();
  const Mat& kk = k.kkstar();
  const Mat px = p * frame.synthesis();  // T₁ᵀ
  const Mat py = q * frame.synthesis();  // T₂ᵀ

  PiecewiseCheckReport r;
  const ParsevalCheck whole = parseval_k_check(apply_piecewise(frame, pw), k, tol);
  r.is_kps = whole.is_parseval;
  r.kps_defect = whole.defect;
  r.threshold = whole.threshold;

  Vec a2(pw.a.size()), b2(pw.b.size()), ab(pw.a.size());
  for (std::size_t j = 0; j < a2.size(); ++j) {
    a2[j] = pw.a[j] * pw.a[j];
    b2[j] = pw.b[j] * pw.b[j];
    ab[j] = pw.a[j] * pw.b[j];
  }
  r.piece_x_defect = distance(symmetric_part(weighted_gram(px, a2, px)), symmetric_part(p * kk * p));
  r.piece_y_defect = distance(symmetric_part(weighted_gram(py, b2, py)), symmetric_part(q * kk * q));

  const Mat cross = weighted_gram(px, ab, py);
  r.cross_full_defect = cross.frobenius_norm();
  r.cross_sym_defect = symmetric_part(cross).frobenius_norm();

  r.pieces_ok = r.piece_x_defect <= r.threshold && r.piece_y_defect <= r.threshold;
  r.cross_ok = r.cross_sym_defect <= r.threshold;
  r.commutator = commutator_norm(p, k.matrix());
  r.commutes = r.commutator <= scaled_tol(tol, k.matrix().frobenius_norm());
  r.equivalence_holds = r.is_kps == (r.pieces_ok && r.cross_ok);
  return r;
}

DisjointBuild build_disjoint_piecewise(const Frame& frame, const KOperator& k, const Projection& p,
                                       const std::vector<std::size_t>& index_set, double tol) {
  require_same_dim(frame, k);
  require_projection_dim(frame, p);
  const std::size_t m = frame.count();
  std::vector<bool> in_set(m, false);
  for (std::size_t j : index_set) {
    if (j >= m) throw Error(ErrorCode::BadIndexSet, "index " + std::to_string(j + 1) + " out of range");
    if (in_set[j]) throw Error(ErrorCode::BadIndexSet, "index " + std::to_string(j + 1) + " repeated");
    in_set[j] = true;
  }
  if (index_set.empty() || index_set.size() == m) {
    throw Error(ErrorCode::BadIndexSet, "index set must be a proper nonempty subset");
  }

  std::vector<std::size_t> inside, outside;
  for (std::size_t j = 0; j < m; ++j) (in_set[j] ? inside : outside).push_back(j);

  const Mat q = p.complement();
  const Frame x_frame(p.matrix() * frame.synthesis().select_columns(inside));
  const Frame y_frame(q * frame.synthesis().select_columns(outside));
  // PK·(PK)ᵀ = P·KKᵀ·P is the compression of KKᵀ to X; likewise for Y.
  DisjointBuild out{PiecewiseScaling{Vec(m, 0.0), Vec(m, 0.0), p}, {}, {}};
  out.x_piece = solve_scaling(x_frame, KOperator(p.matrix() * k.matrix()), tol);
  out.y_piece = solve_scaling(y_frame, KOperator(q * k.matrix()), tol);
  if (!out.x_piece.feasible || !out.y_piece.feasible) {
    throw Error(ErrorCode::InfeasiblePiece,
                std::string(out.x_piece.feasible ? "Y" : "X") + " piece has no scaling (residual " +
                    std::to_string(out.x_piece.feasible ? out.y_piece.residual : out.x_piece.residual) + ")");
  }
  for (std::size_t i = 0; i < inside.size(); ++i) out.scaling.a[inside[i]] = out.x_piece.scaling[i];
  for (std::size_t i = 0; i < outside.size(); ++i) out.scaling.b[outside[i]] = out.y_piece.scaling[i];
  return out;
}

RestrictionReport restrict_check_lemma(const Frame& frame, const KOperator& k, const Projection& p, double tol) {
  require_same_dim(frame, k);
  require_projection_dim(frame, p);
  const Mat& pm = p.matrix();
  const double comm = commutator_norm(pm, k.matrix());
  if (comm > scaled_tol(tol, k.matrix().frobenius_norm())) {
    throw Error(ErrorCode::PreconditionFailed, "‖PK − KP‖_F = " + std::to_string(comm));
  }

  RestrictionReport r;
  r.parseval_input = parseval_k_check(frame, k, tol).is_parseval;
  const Mat s_p = frame_operator(Frame(pm * frame.synthesis()));
  r.defect = (pm * (s_p - k.kkstar()) * pm).frobenius_norm();
  r.holds = r.defect <= scaled_tol(tol, k.kkstar().frobenius_norm());

  // Orthonormal basis of ran(Kᵀ): left singular vectors of Kᵀ with σ > 0.
  const Svd d = svd(k.matrix().transpose());
  const double cut = kRankRtol * d.singular_values.front();
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < d.singular_values.size(); ++i)
    if (d.singular_values[i] > cut && d.singular_values[i] > 0.0) idx.push_back(i);
  if (idx.empty()) {
    r.range_included = true;
    return r;
  }
  const Mat basis = d.u.select_columns(idx);
  r.range_gap = operator_norm(p.complement() * basis);
  r.range_included = r.range_gap <= std::max(tol, 1e-12);
  return r;
}

PiecewiseScaling transport_piecewise(const Frame& frame, const KOperator& k, const PiecewiseScaling& pw,
                                     const Mat& u, const Projection& q, double tol) {
  require_same_dim(frame, k);
  validate(pw, frame);
  require_projection_dim(frame, q);
  if (!u.is_square() || u.rows() != frame.dim()) throw Error(ErrorCode::DimensionMismatch, "U must be n×n");
  const std::size_t n = frame.dim();

  const double unitary = distance(u.transpose() * u, Mat::identity(n));
  if (unitary > scaled_tol(tol, std::sqrt(static_cast<double>(n)))) {
    throw Error(ErrorCode::NotUnitary, "‖UᵀU − I‖_F = " + std::to_string(unitary));
  }
  const double intertwine = distance(u * pw.projection.matrix(), q.matrix() * u);
  if (intertwine > scaled_tol(tol, std::sqrt(static_cast<double>(n)))) {
    throw Error(ErrorCode::IntertwiningFailed, "‖UP − QU‖_F = " + std::to_string(intertwine));
  }
  const double comm = commutator_norm(u, k.matrix());
  if (comm > scaled_tol(tol, u.frobenius_norm() * k.matrix().frobenius_norm())) {
    throw Error(ErrorCode::NotCommuting, "‖UK − KU‖_F = " + std::to_string(comm));
  }
  const PiecewiseCheckReport input = check_piecewise(frame, k, pw, tol);
  if (!input.is_kps) throw Error(ErrorCode::NotKps, "input defect " + std::to_string(input.kps_defect));
  return PiecewiseScaling{pw.a, pw.b, q};
}

}  // namespace kframe
