#include "kframe/variational.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "kframe/error.hpp"
#include "kframe/linalg.hpp"

namespace kframe {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_dim(std::size_t expected, std::size_t got, const char* what) {
  if (expected != got) {
    throw Error(ErrorCode::DimensionMismatch,
                std::string(what) + ": expected dimension " + std::to_string(expected) + ", got " +
                    std::to_string(got));
  }
}

void require_finite(std::span<const double> v, const char* what) {
  if (!all_finite(v)) throw Error(ErrorCode::NonFinite, std::string(what) + " must be finite");
}

Vec gaussian_vector(std::mt19937_64& rng, std::size_t n, double scale) {
  std::normal_distribution<double> normal(0.0, scale);
  Vec v(n);
  for (double& x : v) x = normal(rng);
  return v;
}

// Feasible points spread around `center`: projections of Gaussian draws.
std::vector<Vec> sample_feasible(const ConvexSet& set, std::span<const double> center, int count,
                                 std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const double spread = 1.0 + norm(center);
  std::vector<Vec> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const double scale = spread * (i % 2 == 0 ? 0.5 : 4.0);
    out.push_back(project(set, add(center, gaussian_vector(rng, center.size(), scale))));
  }
  return out;
}

Certificate vi_certificate(const VIProblem& problem, std::span<const double> u0, const ViOptions& opts) {
  const Vec residual = sub(matvec(problem.form.lambda_mat, u0), problem.load());
  Certificate c;
  c.samples = opts.certificate_samples;
  c.min_slack = std::numeric_limits<double>::infinity();
  for (const Vec& v : sample_feasible(problem.set, u0, opts.certificate_samples, opts.seed)) {
    const Vec d = sub(v, u0);
    const double slack = dot(residual, d) + 10.0 * opts.tol * (1.0 + norm(d));
    c.min_slack = std::min(c.min_slack, slack);
  }
  if (c.samples == 0) c.min_slack = 0.0;
  c.ok = c.min_slack >= 0.0;
  return c;
}

Certificate minimality_certificate(const VIProblem& problem, std::span<const double> u0, double j0,
                                   const ViOptions& opts) {
  std::mt19937_64 rng(opts.seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Certificate c;
  c.samples = opts.certificate_samples;
  c.min_slack = std::numeric_limits<double>::infinity();
  const double slack_tol = 10.0 * opts.tol * (1.0 + std::abs(j0));
  for (const Vec& v : sample_feasible(problem.set, u0, opts.certificate_samples, opts.seed + 1)) {
    // u₀ + t(v − u₀) stays in C by convexity.
    const double t = 1.0 - unit(rng);
    const Vec p = axpy(u0, t, sub(v, u0));
    c.min_slack = std::min(c.min_slack, j_functional(problem, p) + slack_tol - j0);
  }
  if (c.samples == 0) c.min_slack = 0.0;
  c.ok = c.min_slack >= 0.0;
  return c;
}

}  // namespace

BilinearForm BilinearForm::from_matrix(Mat lambda) {
  if (lambda.empty() || !lambda.is_square()) throw Error(ErrorCode::NonSquare, "Λ must be square");
  BilinearForm f;
  const double scale = lambda.frobenius_norm();
  f.symmetric = distance(lambda, lambda.transpose()) <= std::max(1e-10 * scale, 1e-12);
  f.alpha = sym_eig(symmetric_part(lambda)).eigenvalues.front();
  f.beta = operator_norm(lambda);
  f.lambda_mat = std::move(lambda);
  return f;
}

ConvexSet ConvexSet::box(Vec lo, Vec hi) {
  if (lo.empty() || lo.size() != hi.size()) throw Error(ErrorCode::DimensionMismatch, "box bounds differ in length");
  require_finite(lo, "box lower bound");
  require_finite(hi, "box upper bound");
  for (std::size_t i = 0; i < lo.size(); ++i)
    if (lo[i] > hi[i]) throw Error(ErrorCode::InvalidArgument, "box needs lo <= hi in every coordinate");
  return ConvexSet(Box{std::move(lo), std::move(hi)});
}

ConvexSet ConvexSet::ball(Vec center, double radius) {
  if (center.empty()) throw Error(ErrorCode::InvalidArgument, "ball center is empty");
  require_finite(center, "ball center");
  if (!std::isfinite(radius) || radius < 0.0) throw Error(ErrorCode::InvalidArgument, "ball radius must be >= 0");
  return ConvexSet(Ball{std::move(center), radius});
}

ConvexSet ConvexSet::halfspace(Vec normal, double offset) {
  if (normal.empty()) throw Error(ErrorCode::InvalidArgument, "halfspace normal is empty");
  require_finite(normal, "halfspace normal");
  if (!std::isfinite(offset)) throw Error(ErrorCode::NonFinite, "halfspace offset must be finite");
  if (norm(normal) == 0.0) throw Error(ErrorCode::InvalidArgument, "halfspace normal must be nonzero");
  return ConvexSet(Halfspace{std::move(normal), offset});
}

ConvexSet ConvexSet::affine(Vec point, Mat basis) {
  require_finite(point, "affine point");
  require_dim(point.size(), basis.rows(), "affine basis");
  const double defect = distance(basis.transpose() * basis, Mat::identity(basis.cols()));
  if (defect > 1e-10 * (1.0 + basis.frobenius_norm())) {
    throw Error(ErrorCode::InvalidArgument, "affine basis columns must be orthonormal");
  }
  return ConvexSet(Affine{std::move(point), std::move(basis)});
}

ConvexSet ConvexSet::oracle(std::size_t dim, ProjectionOracle::Fn fn) {
  if (dim == 0 || !fn) throw Error(ErrorCode::InvalidArgument, "projection oracle needs a dimension and a callable");
  return ConvexSet(ProjectionOracle{dim, std::make_shared<const ProjectionOracle::Fn>(std::move(fn))});
}

std::string_view ConvexSet::name() const noexcept {
  return std::visit(overloaded{[](const WholeSpace&) { return std::string_view("whole_space"); },
                               [](const Box&) { return std::string_view("box"); },
                               [](const Ball&) { return std::string_view("ball"); },
                               [](const Halfspace&) { return std::string_view("halfspace"); },
                               [](const Affine&) { return std::string_view("affine"); },
                               [](const ProjectionOracle&) { return std::string_view("oracle"); }},
                    kind_);
}

std::optional<std::size_t> ConvexSet::dim() const noexcept {
  return std::visit(overloaded{[](const WholeSpace&) -> std::optional<std::size_t> { return std::nullopt; },
                               [](const Box& b) -> std::optional<std::size_t> { return b.lo.size(); },
                               [](const Ball& b) -> std::optional<std::size_t> { return b.center.size(); },
                               [](const Halfspace& h) -> std::optional<std::size_t> { return h.normal.size(); },
                               [](const Affine& a) -> std::optional<std::size_t> { return a.point.size(); },
                               [](const ProjectionOracle& o) -> std::optional<std::size_t> { return o.dim; }},
                    kind_);
}

Vec project(const ConvexSet& set, std::span<const double> v) {
  if (const auto d = set.dim()) require_dim(*d, v.size(), "project");
  return std::visit(
      overloaded{
          [&](const WholeSpace&) { return Vec(v.begin(), v.end()); },
          [&](const Box& b) {
            Vec out(v.begin(), v.end());
            for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::clamp(out[i], b.lo[i], b.hi[i]);
            return out;
          },
          [&](const Ball& b) {
            const Vec d = sub(v, b.center);
            const double r = norm(d);
            if (r <= b.radius) return Vec(v.begin(), v.end());
            return axpy(b.center, b.radius / r, d);
          },
          [&](const Halfspace& h) {
            const double excess = dot(h.normal, v) - h.offset;
            if (excess <= 0.0) return Vec(v.begin(), v.end());
            return axpy(v, -excess / dot(h.normal, h.normal), h.normal);
          },
          [&](const Affine& a) {
            const Vec coeff = matvec(a.basis.transpose(), sub(v, a.point));
            return add(a.point, matvec(a.basis, coeff));
          },
          [&](const ProjectionOracle& o) {
            Vec out = (*o.fn)(v);
            require_dim(o.dim, out.size(), "projection oracle output");
            require_finite(out, "projection oracle output");
            return out;
          }},
      set.kind());
}

ProjectionCheck check_projection(const ConvexSet& set, std::size_t n, int pairs, std::uint64_t seed, double scale) {
  std::mt19937_64 rng(seed);
  ProjectionCheck c;
  for (int i = 0; i < pairs; ++i) {
    const Vec v = gaussian_vector(rng, n, scale);
    const Vec w = gaussian_vector(rng, n, scale);
    const Vec pv = project(set, v);
    const Vec pw = project(set, w);
    c.max_idempotence_defect = std::max(c.max_idempotence_defect, norm(sub(project(set, pv), pv)));
    c.max_expansion = std::max(c.max_expansion, norm(sub(pv, pw)) - norm(sub(v, w)));
  }
  c.ok = c.max_idempotence_defect <= 1e-12 * (1.0 + scale) && c.max_expansion <= 1e-12 * (1.0 + scale);
  return c;
}

VIProblem::VIProblem(BilinearForm form_, ConvexSet set_, Vec f0_, KOperator k_)
    : form(std::move(form_)), set(std::move(set_)), f0(std::move(f0_)), k(std::move(k_)) {
  const std::size_t n = f0.size();
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "f0 is empty");
  require_finite(f0, "f0");
  require_dim(n, form.lambda_mat.rows(), "Λ");
  require_dim(n, k.dim(), "K");
  if (const auto d = set.dim()) require_dim(n, *d, "convex set");
}

double j_functional(const VIProblem& problem, std::span<const double> v) {
  require_dim(problem.dim(), v.size(), "j_functional");
  return 0.5 * dot(v, matvec(problem.form.lambda_mat, v)) - dot(problem.load(), v);
}

VISolveResult solve_vi(const VIProblem& problem, const ViOptions& opts) {
  if (!(opts.tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be positive");
  if (opts.max_iter < 1) throw Error(ErrorCode::InvalidArgument, "max_iter must be >= 1");
  const BilinearForm& form = problem.form;
  if (!form.coercive()) {
    throw Error(ErrorCode::NotCoercive, "λ_min of the symmetric part is " + std::to_string(form.alpha));
  }

  VISolveResult r;
  r.gamma = form.alpha / (form.beta * form.beta);
  r.contraction_rho = std::sqrt(std::max(0.0, 1.0 - 2.0 * r.gamma * form.alpha +
                                                  r.gamma * r.gamma * form.beta * form.beta));
  const Vec shift = scaled(problem.load(), r.gamma);

  const std::size_t n = problem.dim();
  Vec v = project(problem.set, Vec(n, 0.0));
  double first_step = 0.0;
  double prev_step = 0.0;
  for (int it = 1; it <= opts.max_iter; ++it) {
    // γKKᵀf₀ − γΛv + v
    Vec arg = add(shift, axpy(v, -r.gamma, matvec(form.lambda_mat, v)));
    Vec next = project(problem.set, arg);
    const double step = norm(sub(next, v));
    r.step_norms.push_back(step);
    if (it == 1) first_step = step;
    // Ratios are only meaningful above the roundoff floor of the iterate.
    if (it > 1 && prev_step > 1e-10 * (1.0 + norm(v))) {
      r.max_step_ratio = std::max(r.max_step_ratio, step / prev_step);
    }
    prev_step = step;
    v = std::move(next);
    r.iterations = it;
    r.final_step_norm = step;
    // The raw step is γ times the natural residual, and the certificate below
    // is absolute in tol; stop on min(1, γ)·tol, floored at roundoff.
    const double threshold = std::max(std::min(1.0, r.gamma) * opts.tol, 1e-15 * (1.0 + norm(v)));
    if (step <= threshold) {
      r.u0 = v;
      r.error_bound = r.contraction_rho < 1.0 ? r.contraction_rho / (1.0 - r.contraction_rho) * step : step;
      r.vi_certificate = vi_certificate(problem, r.u0, opts);
      if (form.symmetric) r.j_value = j_functional(problem, r.u0);
      return r;
    }
  }
  const double rho = r.contraction_rho;
  const double bound = rho < 1.0 ? std::pow(rho, opts.max_iter) * first_step / (1.0 - rho)
                                 : std::numeric_limits<double>::infinity();
  throw MaxIterError(opts.max_iter, r.final_step_norm, bound);
}

VISolveResult minimize_symmetric(const VIProblem& problem, const ViOptions& opts) {
  if (!problem.form.symmetric) throw Error(ErrorCode::NotSymmetric, "σ must be symmetric to define a minimizer");
  if (!problem.form.coercive()) {
    throw Error(ErrorCode::NotCoercive, "λ_min of Λ is " + std::to_string(problem.form.alpha));
  }
  VISolveResult r = solve_vi(problem, opts);
  r.j_value = j_functional(problem, r.u0);
  r.minimality = minimality_certificate(problem, r.u0, *r.j_value, opts);
  return r;
}

BoundsReport bounds_report(const Frame& frame, const KOperator& k, std::span<const double> f0,
                           const ViOptions& opts) {
  require_same_dim(frame, k);
  require_dim(frame.dim(), f0.size(), "f0");
  require_finite(f0, "f0");
  const double f0_norm = norm(f0);
  if (f0_norm == 0.0) throw Error(ErrorCode::ZeroTarget, "f0 is the zero vector");

  const Mat s = frame_operator(frame);
  const SymEig eig = sym_eig(s);
  if (!(eig.eigenvalues.front() > opts.tol * (1.0 + eig.eigenvalues.back()))) {
    throw Error(ErrorCode::SingularFrameOperator,
                "λ_min(S) = " + std::to_string(eig.eigenvalues.front()) + " is not positive");
  }
  const double kf0 = norm(matvec(k.matrix().transpose(), f0));
  if (!(kf0 > opts.tol * (1.0 + k.matrix().frobenius_norm() * f0_norm))) {
    throw Error(ErrorCode::ZeroTarget, "Kᵀf0 vanishes");
  }

  const FrameBounds fb = kframe_bounds(frame, k);
  BoundsReport r;
  r.frame_lower_A = fb.lower_A;
  r.frame_upper_B = fb.upper_B;
  r.kstar_f0_norm = kf0;
  r.lower = -kf0 * kf0 / (2.0 * fb.lower_A);
  r.upper = -(7.0 / 32.0) * std::pow(kf0, 4) / (fb.upper_B * f0_norm * f0_norm);
  r.upper_squared_variant = -(7.0 / 32.0) * kf0 * kf0 / (fb.upper_B * f0_norm * f0_norm);

  const VIProblem problem(BilinearForm::from_matrix(s), ConvexSet::whole_space(), Vec(f0.begin(), f0.end()), k);
  const VISolveResult sol = minimize_symmetric(problem, opts);
  r.j_min = *sol.j_value;
  r.iterations = sol.iterations;

  const Vec g = problem.load();
  const InverseResult inv = checked_inverse(s, 1e14);
  const Vec u_star = inv.ok ? matvec(inv.inverse, g) : matvec(pinv(s), g);
  r.j_closed_form = -0.5 * dot(g, u_star);

  constexpr double slack = 1e-8;
  r.holds = r.lower - slack <= r.j_min && r.j_min <= r.upper + slack;
  return r;
}

}  // namespace kframe
