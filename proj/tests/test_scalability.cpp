#include <doctest.h>

#include <cmath>

#include "kframe/error.hpp"
#include "kframe/linalg.hpp"
#include "kframe/scalability.hpp"
#include "support.hpp"

using namespace kframe;
using namespace kframe::testing;
using doctest::Approx;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected kframe::Error");
  return ErrorCode::InvalidArgument;
}

const Frame kE1E2(Mat::identity(2));

// Parseval K-frame divided columnwise by c: scaling by c recovers it.
Frame divided(const Mat& g, const Vec& c) {
  Mat f = g;
  for (std::size_t j = 0; j < c.size(); ++j) f.set_col(j, scaled(g.col(j), 1.0 / c[j]));
  return Frame(f);
}

}  // namespace

TEST_CASE("Scaling rejects negative weights") {
  CHECK(code_of([] { Scaling(Vec{1, -1}); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { Scaling(Vec{1, INFINITY}); }) == ErrorCode::NonFinite);
}

TEST_CASE("vech is an isometry on symmetric matrices") {
  const Mat m{{1, 2, 3}, {2, 4, 5}, {3, 5, 6}};
  CHECK(norm(vech(m)) == Approx(m.frobenius_norm()));
  CHECK(vech(m).size() == 6);
}

TEST_CASE("solve_scaling examples") {
  SUBCASE("doubled basis") {
    const ScalingSolveResult r = solve_scaling(Frame::from_vectors({{2, 0}, {0, 2}}), KOperator::identity(2));
    CHECK(r.feasible);
    CHECK(r.scaling[0] == Approx(0.5));
    CHECK(r.scaling[1] == Approx(0.5));
    CHECK(r.residual < 1e-12);
    CHECK_FALSE(r.nonunique);
  }
  SUBCASE("repeated vector") {
    const ScalingSolveResult r = solve_scaling(Frame::from_vectors({{1, 0}, {1, 0}, {0, 1}}), KOperator::identity(2));
    CHECK(r.feasible);
    CHECK(r.scaling[0] * r.scaling[0] + r.scaling[1] * r.scaling[1] == Approx(1.0));
    CHECK(r.scaling[2] == Approx(1.0));
    CHECK(r.nonunique);
    CHECK(verify_scaling(Frame::from_vectors({{1, 0}, {1, 0}, {0, 1}}), KOperator::identity(2), r.scaling).is_parseval);
  }
  SUBCASE("unreachable direction") {
    // best is w₁ + w₂ = 1, leaving diag(0, −1)
    const Frame f = Frame::from_vectors({{1, 0}, {1, 0}});
    const ScalingSolveResult r = solve_scaling(f, KOperator::identity(2));
    CHECK_FALSE(r.feasible);
    CHECK(r.residual == Approx(1.0));
    const Mat a = Mat::from_columns({vech(Mat{{1, 0}, {0, 0}}), vech(Mat{{1, 0}, {0, 0}})});
    CHECK(std::abs(r.residual - nnls_grid_residual(a, vech(Mat::identity(2)), 1e-3, 2.0)) < 1e-5);
  }
}

TEST_CASE("verify_scaling examples") {
  CHECK(verify_scaling(kE1E2, KOperator::identity(2), Scaling({1, 1})).is_parseval);
  const ParsevalCheck bad = verify_scaling(kE1E2, KOperator::identity(2), Scaling({2, 1}));
  CHECK_FALSE(bad.is_parseval);
  CHECK(bad.defect == Approx(3.0));
  const double c = std::sqrt(2.0 / 3.0);
  const double s3 = std::sqrt(3.0);
  const Frame merc = Frame::from_vectors({{0, 1}, {-s3 / 2, -0.5}, {s3 / 2, -0.5}});
  CHECK(verify_scaling(merc, KOperator::identity(2), Scaling({c, c, c})).is_parseval);
  CHECK(code_of([&] { verify_scaling(kE1E2, KOperator::identity(2), Scaling({1})); }) == ErrorCode::LengthMismatch);
}

TEST_CASE("solve_scaling round trip on random Parseval K-frames") {
  Rng rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = static_cast<std::size_t>(uniform_int(rng, 2, 5));
    const std::size_t m = static_cast<std::size_t>(uniform_int(rng, static_cast<int>(n), 2 * static_cast<int>(n)));
    const KOperator k(random_mat(rng, n, n));
    const Mat g = parseval_synthesis(rng, k.matrix(), m);
    Vec c(m);
    for (double& x : c) x = uniform(rng, 0.2, 5.0);
    const Frame f = divided(g, c);
    const ScalingSolveResult r = solve_scaling(f, k);
    CHECK(r.feasible);
    CHECK(r.residual <= 1e-8);
    CHECK(verify_scaling(f, k, r.scaling, 1e-8).is_parseval);
  }
}

TEST_CASE("solve_scaling residual is invariant under joint orthogonal conjugation") {
  Rng rng(32);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = static_cast<std::size_t>(uniform_int(rng, 2, 4));
    const std::size_t m = static_cast<std::size_t>(uniform_int(rng, 1, 6));
    const Frame f(random_mat(rng, n, m));
    const Mat kmat = random_mat(rng, n, n);
    const Mat q = random_orthogonal(rng, n);
    const ScalingSolveResult r1 = solve_scaling(f, KOperator(kmat));
    const ScalingSolveResult r2 = solve_scaling(Frame(q * f.synthesis()), KOperator(q * kmat));
    CHECK(std::abs(r1.residual - r2.residual) <= 1e-9 * (1 + r1.residual));
    CHECK(r1.feasible == r2.feasible);
  }
}

TEST_CASE("transform_frame examples") {
  const TransformedFrame t = transform_frame(kE1E2, Scaling({1, 1}), Mat{{2, 0}, {0, 3}});
  CHECK(t.frame.synthesis() == Mat{{2, 0}, {0, 3}});
  CHECK(t.scaling == Scaling({1, 1}));
  CHECK(verify_scaling(t.frame, KOperator(Mat{{2, 0}, {0, 3}}), t.scaling).is_parseval);

  const Frame f = Frame::from_vectors({{1, 0}, {1, 0}, {0, 1}});
  const Scaling c({std::sqrt(0.5), std::sqrt(0.5), 1});
  CHECK(transform_frame(f, c, Mat::identity(2)).frame == f);

  CHECK(code_of([&] { transform_frame(f, c, Mat::identity(3)); }) == ErrorCode::DimensionMismatch);

  Rng rng(33);
  for (int trial = 0; trial < 20; ++trial) {
    // scalable frame (K = I) composed with U₀ then V
    const Mat u0 = random_mat(rng, 3, 3);
    const Mat v = random_mat(rng, 3, 3);
    Vec cw(5);
    for (double& x : cw) x = uniform(rng, 0.2, 5.0);
    const Frame base = divided(parseval_synthesis(rng, Mat::identity(3), 5), cw);
    const TransformedFrame a = transform_frame(base, Scaling(cw), u0);
    CHECK(verify_scaling(a.frame, KOperator(u0), a.scaling, 1e-8).is_parseval);
    const TransformedFrame b = transform_frame(a.frame, a.scaling, v);
    CHECK(verify_scaling(b.frame, KOperator(v * u0), b.scaling, 1e-8).is_parseval);
  }
}

TEST_CASE("power_transform") {
  SUBCASE("identity operator") {
    const Frame f = Frame::from_vectors({{1, 0}, {1, 0}, {0, 1}});
    const Scaling c({std::sqrt(0.5), std::sqrt(0.5), 1});
    const PowerTransform p = power_transform(f, c, KOperator::identity(2), 3);
    CHECK(p.frame == f);
    CHECK(p.op.matrix() == Mat::identity(2));
  }
  SUBCASE("diagonal operator") {
    const Frame f = Frame::from_vectors({{2, 0}, {0, 1}});
    const KOperator k(Mat{{2, 0}, {0, 1}});
    const PowerTransform p = power_transform(f, Scaling({1, 1}), k, 1);
    CHECK(p.frame.synthesis() == Mat{{4, 0}, {0, 1}});
    CHECK(p.op.matrix() == Mat{{4, 0}, {0, 1}});
    CHECK(verify_scaling(p.frame, p.op, Scaling({1, 1})).is_parseval);
  }
  SUBCASE("precondition") {
    CHECK(code_of([] { power_transform(kE1E2, Scaling({2, 1}), KOperator::identity(2), 1); }) ==
          ErrorCode::NotKsFrame);
  }
  SUBCASE("random diagonal instances, one step at a time equals one call") {
    Rng rng(34);
    for (int trial = 0; trial < 20; ++trial) {
      Vec d(3);
      for (double& x : d) x = uniform(rng, 0.5, 1.5);
      const KOperator k(Mat::diag(d));
      Vec cw(5);
      for (double& x : cw) x = uniform(rng, 0.2, 5.0);
      const Frame f = divided(parseval_synthesis(rng, k.matrix(), 5), cw);
      const Scaling c(cw);
      const PowerTransform two = power_transform(f, c, k, 2);
      CHECK(verify_scaling(two.frame, two.op, c, 1e-8).is_parseval);
      const PowerTransform one = power_transform(f, c, k, 1);
      // {K f_j} is a K²-frame; one more application of K takes it to K³
      const Frame again(k.matrix() * one.frame.synthesis());
      CHECK(distance(again.synthesis(), two.frame.synthesis()) <= 1e-9 * (1 + two.frame.synthesis().frobenius_norm()));
      CHECK(distance(k.matrix() * one.op.matrix(), two.op.matrix()) <= 1e-9);
    }
  }
}

TEST_CASE("commuting_isometry_transform") {
  const Frame f = Frame::from_vectors({{1, 0}, {1, 0}, {0, 1}});
  const Scaling c({std::sqrt(0.5), std::sqrt(0.5), 1});
  CHECK(commuting_isometry_transform(f, c, KOperator::identity(2), Mat::identity(2)) == f);

  const Mat rot = rotation2(0.7);
  const Frame r = commuting_isometry_transform(f, c, KOperator::identity(2), rot);
  CHECK(verify_scaling(r, KOperator::identity(2), c).is_parseval);

  const KOperator k2(2.0 * Mat::identity(2));
  const Frame f2(2.0 * f.synthesis());
  const Frame r2 = commuting_isometry_transform(f2, c, k2, rot);
  CHECK(verify_scaling(r2, k2, c).is_parseval);

  CHECK(code_of([&] { commuting_isometry_transform(f, c, KOperator(Mat{{2, 0}, {0, 1}}), rot); }) ==
        ErrorCode::NotCommuting);
  CHECK(code_of([&] { commuting_isometry_transform(f, c, KOperator::identity(2), 2.0 * rot); }) ==
        ErrorCode::NotCoisometry);
  CHECK(code_of([&] { commuting_isometry_transform(f, Scaling({1, 1, 1}), KOperator::identity(2), rot); }) ==
        ErrorCode::NotKsFrame);
}

TEST_CASE("check_frame_operator_identity") {
  SUBCASE("T = I reduces to the Parseval check") {
    const OperatorIdentityReport r =
        check_frame_operator_identity(kE1E2, Scaling({1, 1}), KOperator::identity(2), Mat::identity(2));
    CHECK(r.transformed_is_ks);
    CHECK(r.identity_holds);
    CHECK(r.agree);
  }
  SUBCASE("diagonal arithmetic") {
    const Mat d{{2, 0}, {0, 1}};
    const OperatorIdentityReport r = check_frame_operator_identity(kE1E2, Scaling({1, 1}), KOperator(d), d);
    CHECK(r.transformed_is_ks);
    CHECK(r.identity_holds);
    CHECK(r.agree);
  }
  SUBCASE("singular T") {
    CHECK(code_of([] {
            check_frame_operator_identity(kE1E2, Scaling({1, 1}), KOperator::identity(2), Mat{{1, 1}, {1, 1}});
          }) == ErrorCode::SingularT);
  }
  SUBCASE("random T on true and false instances") {
    Rng rng(35);
    int seen_true = 0, seen_false = 0;
    for (int trial = 0; trial < 50; ++trial) {
      const Mat t = random_mat(rng, 3, 3);
      const KOperator k(random_mat(rng, 3, 3));
      Vec cw(4);
      for (double& x : cw) x = uniform(rng, 0.2, 5.0);
      // K_s instance for {T f_j}: T f_j = g_j / c_j with g Parseval for K
      const Frame tf = divided(parseval_synthesis(rng, k.matrix(), 4), cw);
      const Frame f(gj_inverse(t) * tf.synthesis());
      const Frame g = trial % 2 ? f : Frame(random_mat(rng, 3, 4));
      const OperatorIdentityReport r = check_frame_operator_identity(g, Scaling(cw), k, t, 1e-8);
      CHECK(r.agree);
      (r.transformed_is_ks ? seen_true : seen_false)++;
    }
    CHECK(seen_true > 0);
    CHECK(seen_false > 0);
  }
}

TEST_CASE("shared scaling: both K_s and U-transformed K_s imply (UK)_s") {
  Rng rng(36);
  for (int trial = 0; trial < 30; ++trial) {
    // U = Q·diag(±1)·Qᵀ with Q an eigenbasis of KKᵀ keeps U·KKᵀ·Uᵀ = KKᵀ.
    const Mat q = random_orthogonal(rng, 3);
    Vec lam(3), sgn(3);
    for (int i = 0; i < 3; ++i) {
      lam[i] = uniform(rng, 0.5, 2.0);
      sgn[i] = uniform(rng, 0, 1) < 0.5 ? -1.0 : 1.0;
    }
    const Mat kmat = conjugate_diag(q, lam);
    const Mat u = conjugate_diag(q, sgn);
    Vec cw(5);
    for (double& x : cw) x = uniform(rng, 0.2, 5.0);
    const Frame f = divided(parseval_synthesis(rng, kmat, 5), cw);
    const SharedScalingReport r = check_shared_scaling(f, Scaling(cw), KOperator(kmat), u, 1e-8);
    CHECK(r.hypothesis);
    CHECK(r.conclusion);
  }
}
