#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>

#include "kframe/frame.hpp"

namespace kframe {

// σ(u, v) = ⟨Λu, v⟩ with its coercivity and continuity constants.
struct BilinearForm {
  static BilinearForm from_matrix(Mat lambda);

  Mat lambda_mat;
  double alpha = 0.0;  // λ_min((Λ + Λᵀ)/2)
  double beta = 0.0;   // ‖Λ‖₂
  bool symmetric = false;

  bool coercive() const noexcept { return alpha > 0.0; }
};

struct WholeSpace {
  friend bool operator==(const WholeSpace&, const WholeSpace&) = default;
};
struct Box {
  Vec lo, hi;
  friend bool operator==(const Box&, const Box&) = default;
};
struct Ball {
  Vec center;
  double radius = 0.0;
  friend bool operator==(const Ball&, const Ball&) = default;
};
// {x : ⟨normal, x⟩ ≤ offset}
struct Halfspace {
  Vec normal;
  double offset = 0.0;
  friend bool operator==(const Halfspace&, const Halfspace&) = default;
};
// point + span(basis columns); basis columns orthonormal.
struct Affine {
  Vec point;
  Mat basis;
  friend bool operator==(const Affine&, const Affine&) = default;
};
// User-supplied metric projection onto some closed convex set. Two oracles
// compare equal only when they share the same callable.
struct ProjectionOracle {
  using Fn = std::function<Vec(std::span<const double>)>;
  std::size_t dim = 0;
  std::shared_ptr<const Fn> fn;
  friend bool operator==(const ProjectionOracle& x, const ProjectionOracle& y) {
    return x.dim == y.dim && x.fn == y.fn;
  }
};

class ConvexSet {
 public:
  using Kind = std::variant<WholeSpace, Box, Ball, Halfspace, Affine, ProjectionOracle>;

  ConvexSet() = default;  // whole space
  static ConvexSet whole_space() { return {}; }
  static ConvexSet box(Vec lo, Vec hi);
  static ConvexSet ball(Vec center, double radius);
  static ConvexSet halfspace(Vec normal, double offset);
  static ConvexSet affine(Vec point, Mat basis);
  static ConvexSet oracle(std::size_t dim, ProjectionOracle::Fn fn);

  const Kind& kind() const noexcept { return kind_; }
  std::string_view name() const noexcept;
  // Ambient dimension, or nullopt for the whole space (any n).
  std::optional<std::size_t> dim() const noexcept;

  friend bool operator==(const ConvexSet&, const ConvexSet&) = default;

 private:
  explicit ConvexSet(Kind k) : kind_(std::move(k)) {}
  Kind kind_;
};

// Nearest point of the set in the Euclidean norm.
Vec project(const ConvexSet& set, std::span<const double> v);

// Empirical idempotence / nonexpansiveness of project() on random pairs.
struct ProjectionCheck {
  double max_idempotence_defect = 0.0;  // ‖P(Pv) − Pv‖
  double max_expansion = 0.0;           // max(‖Pv − Pw‖ − ‖v − w‖)
  bool ok = false;
};
ProjectionCheck check_projection(const ConvexSet& set, std::size_t n, int pairs, std::uint64_t seed,
                                 double scale = 3.0);

struct VIProblem {
  VIProblem(BilinearForm form, ConvexSet set, Vec f0, KOperator k);

  std::size_t dim() const noexcept { return f0.size(); }
  Vec load() const { return matvec(k.kkstar(), f0); }  // KKᵀf₀

  BilinearForm form;
  ConvexSet set;
  Vec f0;
  KOperator k;
};

struct ViOptions {
  double tol = 1e-9;
  int max_iter = 10000;
  std::uint64_t seed = 42;  // sampling for certificates
  int certificate_samples = 100;
};

// Worst sampled slack of a certificate inequality; ok ⇔ min_slack ≥ 0.
struct Certificate {
  int samples = 0;
  double min_slack = 0.0;
  bool ok = false;
};

struct VISolveResult {
  Vec u0;
  int iterations = 0;
  double gamma = 0.0;            // α/β²
  double contraction_rho = 0.0;  // √(1 − 2γα + γ²β²) = √(1 − α²/β²)
  double final_step_norm = 0.0;
  double max_step_ratio = 0.0;   // largest ‖v_{k+1} − v_k‖ / ‖v_k − v_{k−1}‖ observed
  double error_bound = 0.0;      // ρ/(1 − ρ)·final step
  Vec step_norms;
  Certificate vi_certificate;        // ⟨Λu₀ − KKᵀf₀, v − u₀⟩ ≥ −10·tol·(1 + ‖v − u₀‖)
  std::optional<double> j_value;     // set when σ is symmetric
  std::optional<Certificate> minimality;  // set by minimize_symmetric
};

double j_functional(const VIProblem& problem, std::span<const double> v);

// Iterates v ← P_C(γKKᵀf₀ − γΛv + v) from v₀ = P_C(0) until the step is at
// most max(min(1, γ)·tol, 1e-15·(1 + ‖v‖)).
VISolveResult solve_vi(const VIProblem& problem, const ViOptions& opts = {});

// Symmetric σ: the VI solution minimizes J over C.
VISolveResult minimize_symmetric(const VIProblem& problem, const ViOptions& opts = {});

// Sandwich −‖Kᵀf₀‖²/(2A) ≤ min J ≤ −(7/32)‖Kᵀf₀‖⁴/(B‖f₀‖²) for σ_S(u, v) = ⟨Su, v⟩.
struct BoundsReport {
  double lower = 0.0;
  double upper = 0.0;
  double j_min = 0.0;          // from the iterative solver
  double j_closed_form = 0.0;  // −½⟨KKᵀf₀, S⁻¹KKᵀf₀⟩
  bool holds = false;
  double frame_lower_A = 0.0;
  double frame_upper_B = 0.0;
  double kstar_f0_norm = 0.0;
  // The upper bound with ‖Kᵀf₀‖² in place of ‖Kᵀf₀‖⁴. Not implied by the
  // derivation; kept for comparison only.
  double upper_squared_variant = 0.0;
  int iterations = 0;
};

BoundsReport bounds_report(const Frame& frame, const KOperator& k, std::span<const double> f0,
                           const ViOptions& opts = {});

}  // namespace kframe
