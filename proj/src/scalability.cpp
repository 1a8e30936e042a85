#include "kframe/scalability.hpp"

#include <cmath>
#include <string>

#include "kframe/error.hpp"
#include "kframe/linalg.hpp"

namespace kframe {

namespace {

void require_length(const Frame& frame, const Scaling& scaling) {
  if (scaling.size() != frame.count()) {
    throw Error(ErrorCode::LengthMismatch, "scaling has " + std::to_string(scaling.size()) +
                                               " weights for a frame of " + std::to_string(frame.count()) +
                                               " vectors");
  }
}

void require_operator_dim(const Frame& frame, const Mat& m, const char* name) {
  if (!m.is_square() || m.rows() != frame.dim()) {
    throw Error(ErrorCode::DimensionMismatch, std::string(name) + " must be " + std::to_string(frame.dim()) + "x" +
                                                  std::to_string(frame.dim()));
  }
}

void require_ks(const Frame& frame, const KOperator& k, const Scaling& scaling, double tol) {
  const ParsevalCheck c = verify_scaling(frame, k, scaling, tol);
  if (!c.is_parseval) {
    throw Error(ErrorCode::NotKsFrame, "scaled frame operator misses KKᵀ by " + std::to_string(c.defect));
  }
}

Frame left_multiply(const Mat& u, const Frame& frame) { return Frame(u * frame.synthesis()); }

// Is there d ≥ 0 on the zero set, d ≠ 0, with A·d = 0 after adjusting the
// positive coordinates? Equivalent to 0 ∈ conv{Π·a_j : w_j = 0} where Π
// projects off span{a_j : w_j > 0}; decided with a second NNLS.
bool has_alternative_solution(const Mat& a, const Vec& w) {
  std::vector<std::size_t> pos, zero;
  for (std::size_t j = 0; j < w.size(); ++j) (w[j] > 0.0 ? pos : zero).push_back(j);
  if (!pos.empty() && numerical_rank(a.select_columns(pos), 1e-10) < static_cast<int>(pos.size())) return true;
  if (zero.empty()) return false;

  Mat az = a.select_columns(zero);
  if (!pos.empty()) {
    const Mat ap = a.select_columns(pos);
    az -= ap * (pinv(ap) * az);
  }
  const double scale = std::max(a.frobenius_norm(), 1e-300);
  Mat sys(az.rows() + 1, zero.size());
  for (std::size_t i = 0; i < az.rows(); ++i)
    for (std::size_t j = 0; j < zero.size(); ++j) sys(i, j) = az(i, j) / scale;
  for (std::size_t j = 0; j < zero.size(); ++j) sys(az.rows(), j) = 1.0;
  Vec rhs(az.rows() + 1, 0.0);
  rhs.back() = 1.0;
  return nnls(sys, rhs).residual <= 1e-9;
}

}  // namespace

Scaling::Scaling(Vec weights) : weights_(std::move(weights)) {
  for (double c : weights_) {
    if (!std::isfinite(c)) throw Error(ErrorCode::NonFinite, "scaling weights must be finite");
    if (c < 0.0) throw Error(ErrorCode::InvalidArgument, "scaling weights must be nonnegative");
  }
}

Frame apply_scaling(const Frame& frame, const Scaling& scaling) {
  require_length(frame, scaling);
  Mat f = frame.synthesis();
  for (std::size_t i = 0; i < f.rows(); ++i)
    for (std::size_t j = 0; j < f.cols(); ++j) f(i, j) *= scaling[j];
  return Frame(std::move(f));
}

Vec vech(const Mat& m) {
  if (!m.is_square()) throw Error(ErrorCode::NonSquare, "vech of non-square matrix");
  const double root2 = std::sqrt(2.0);
  Vec out;
  out.reserve(m.rows() * (m.rows() + 1) / 2);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    out.push_back(m(i, i));
    for (std::size_t j = i + 1; j < m.cols(); ++j) out.push_back(root2 * 0.5 * (m(i, j) + m(j, i)));
  }
  return out;
}

ScalingSolveResult solve_scaling(const Frame& frame, const KOperator& k, double tol) {
  require_same_dim(frame, k);
  if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be positive");
  const std::size_t n = frame.dim();
  const std::size_t m = frame.count();

  Mat system(n * (n + 1) / 2, m);
  for (std::size_t j = 0; j < m; ++j) {
    const Vec f = frame.vector(j);
    system.set_col(j, vech(outer(f, f)));
  }
  const Vec target = vech(k.kkstar());
  const NnlsResult sol = nnls(system, target);

  Vec c(m);
  for (std::size_t j = 0; j < m; ++j) c[j] = std::sqrt(sol.w[j]);

  ScalingSolveResult out;
  out.scaling = Scaling(std::move(c));
  out.residual = sol.residual;
  out.threshold = scaled_tol(tol, k.kkstar().frobenius_norm());
  out.feasible = out.residual <= out.threshold;
  out.nonunique = has_alternative_solution(system, sol.w);
  out.nnls_iterations = sol.iterations;
  return out;
}

ParsevalCheck verify_scaling(const Frame& frame, const KOperator& k, const Scaling& scaling, double tol) {
  return parseval_k_check(apply_scaling(frame, scaling), k, tol);
}

TransformedFrame transform_frame(const Frame& frame, const Scaling& scaling, const Mat& u) {
  require_length(frame, scaling);
  require_operator_dim(frame, u, "U");
  return TransformedFrame{left_multiply(u, frame), scaling};
}

PowerTransform power_transform(const Frame& frame, const Scaling& scaling, const KOperator& k, int exponent,
                               double tol) {
  require_same_dim(frame, k);
  require_length(frame, scaling);
  if (exponent < 1) throw Error(ErrorCode::InvalidArgument, "power exponent must be >= 1");
  require_ks(frame, k, scaling, tol);
  const Mat kn = matrix_power(k.matrix(), exponent);
  return PowerTransform{left_multiply(kn, frame), KOperator(kn * k.matrix())};
}

Frame commuting_isometry_transform(const Frame& frame, const Scaling& scaling, const KOperator& k, const Mat& t,
                                   double tol) {
  require_same_dim(frame, k);
  require_operator_dim(frame, t, "T");
  const Mat& km = k.matrix();
  const double commutator = distance(t * km, km * t);
  if (commutator > scaled_tol(tol, t.frobenius_norm() * km.frobenius_norm())) {
    throw Error(ErrorCode::NotCommuting, "‖TK − KT‖_F = " + std::to_string(commutator));
  }
  const std::size_t n = frame.dim();
  const double coiso = distance(t * t.transpose(), Mat::identity(n));
  if (coiso > scaled_tol(tol, std::sqrt(static_cast<double>(n)))) {
    throw Error(ErrorCode::NotCoisometry, "‖TTᵀ − I‖_F = " + std::to_string(coiso));
  }
  require_ks(frame, k, scaling, tol);
  return left_multiply(t, frame);
}

OperatorIdentityReport check_frame_operator_identity(const Frame& frame, const Scaling& scaling, const KOperator& k,
                                                     const Mat& t, double tol) {
  require_same_dim(frame, k);
  require_length(frame, scaling);
  require_operator_dim(frame, t, "T");
  const InverseResult inv = checked_inverse(t, 1e12);
  if (!inv.ok) throw Error(ErrorCode::SingularT, "condition number " + std::to_string(inv.condition));

  OperatorIdentityReport r;
  r.condition = inv.condition;
  const ParsevalCheck lhs = verify_scaling(left_multiply(t, frame), k, scaling, tol);
  r.transformed_is_ks = lhs.is_parseval;
  r.transformed_defect = lhs.defect;

  const Mat tk = inv.inverse * k.matrix();
  const ParsevalCheck rhs =
      compare_frame_operator(frame_operator(apply_scaling(frame, scaling)), symmetric_part(tk * tk.transpose()), tol);
  r.identity_holds = rhs.is_parseval;
  r.identity_defect = rhs.defect;
  r.agree = r.transformed_is_ks == r.identity_holds;
  return r;
}

SharedScalingReport check_shared_scaling(const Frame& frame, const Scaling& scaling, const KOperator& k,
                                         const Mat& u, double tol) {
  require_same_dim(frame, k);
  require_operator_dim(frame, u, "U");
  SharedScalingReport r;
  r.hypothesis = verify_scaling(frame, k, scaling, tol).is_parseval &&
                 verify_scaling(left_multiply(u, frame), k, scaling, tol).is_parseval;
  const ParsevalCheck c = verify_scaling(frame, KOperator(u * k.matrix()), scaling, tol);
  r.conclusion = c.is_parseval;
  r.conclusion_defect = c.defect;
  return r;
}

}  // namespace kframe
