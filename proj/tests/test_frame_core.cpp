#include <doctest.h>

#include <cmath>
#include <limits>

#include "kframe/error.hpp"
#include "kframe/frame.hpp"
#include "kframe/linalg.hpp"
#include "support.hpp"

using namespace kframe;
using namespace kframe::testing;
using doctest::Approx;

namespace {

const double kS3 = std::sqrt(3.0);

Frame mercedes() { return Frame::from_vectors({{0, 1}, {-kS3 / 2, -0.5}, {kS3 / 2, -0.5}}); }

Frame e1e2() { return Frame(Mat::identity(2)); }

}  // namespace

TEST_CASE("build_ops examples") {
  CHECK(distance(build_ops(e1e2()).frame_op, Mat::identity(2)) == 0.0);

  const FrameOps ops = build_ops(Frame::from_vectors({{1, 0}, {1, 0}, {0, 1}}));
  CHECK(ops.frame_op == Mat{{2, 0}, {0, 1}});
  CHECK(ops.gram == Mat{{1, 1, 0}, {1, 1, 0}, {0, 0, 1}});
  CHECK(ops.analysis == Mat{{1, 0}, {1, 0}, {0, 1}});

  // (0,1)(0,1)ᵀ + two mirror outer products: diagonal 3/4+3/4 and 1+1/4+1/4
  CHECK(distance(build_ops(mercedes()).frame_op, 1.5 * Mat::identity(2)) < 1e-15);
}

TEST_CASE("frame operator identity for random frames") {
  Rng rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = static_cast<std::size_t>(uniform_int(rng, 1, 8));
    const std::size_t m = static_cast<std::size_t>(uniform_int(rng, 1, 16));
    const Frame f(random_mat(rng, n, m));
    const FrameOps ops = build_ops(f);
    CHECK(distance(ops.frame_op, ops.frame_op.transpose()) <= 1e-12 * (1 + ops.frame_op.frobenius_norm()));
    CHECK(distance(ops.frame_op, ops.analysis.transpose() * ops.analysis) <= 1e-12 * (1 + ops.frame_op.frobenius_norm()));
    double tr = 0.0;
    for (std::size_t j = 0; j < m; ++j) tr += dot(f.vector(j), f.vector(j));
    CHECK(ops.frame_op.trace() == Approx(tr).epsilon(1e-12));
    for (int s = 0; s < 100; ++s) {
      const Vec x = random_vec(rng, n);
      double sum = 0.0;
      for (std::size_t j = 0; j < m; ++j) sum += std::pow(dot(x, f.vector(j)), 2);
      const double q = dot(matvec(ops.frame_op, x), x);
      CHECK(std::abs(sum - q) <= 1e-10 * (1 + std::abs(sum)));
    }
  }
}

TEST_CASE("kframe_bounds examples") {
  SUBCASE("orthonormal basis, K = I") {
    const FrameBounds b = kframe_bounds(e1e2(), KOperator::identity(2));
    CHECK(b.lower_A == Approx(1.0));
    CHECK(b.upper_B == Approx(1.0));
    CHECK(b.is_k_frame);
  }
  SUBCASE("single vector against a rank-one K") {
    // ⟨Sf,f⟩/‖Kᵀf‖² = f₁²/f₁²
    const FrameBounds b = kframe_bounds(Frame::from_vectors({{1, 0}}), KOperator(Mat{{1, 0}, {0, 0}}));
    CHECK(b.lower_A == Approx(1.0));
    CHECK(b.upper_B == Approx(1.0));
    CHECK(b.is_k_frame);
  }
  SUBCASE("single vector against K = I") {
    const FrameBounds b = kframe_bounds(Frame::from_vectors({{1, 0}}), KOperator::identity(2));
    CHECK_FALSE(b.is_k_frame);
    CHECK(b.lower_A == Approx(0.0).scale(1));
    CHECK(std::abs(b.witness[1]) == Approx(1.0));
  }
  SUBCASE("zero K") {
    const FrameBounds b = kframe_bounds(e1e2(), KOperator(Mat(2, 2)));
    CHECK(b.degenerate_k);
    CHECK(b.is_k_frame);
    CHECK(b.lower_A == std::numeric_limits<double>::infinity());
  }
  SUBCASE("null-space coupling needs the Schur complement") {
    // f = (1, t): ⟨Sf,f⟩ = 2 + 2t + t², ‖Kᵀf‖² = 1, minimum 1 at t = −1.
    const Frame f(Mat{{1, 1}, {0, 1}});
    const FrameBounds b = kframe_bounds(f, KOperator(Mat{{1, 0}, {0, 0}}));
    CHECK(b.lower_A == Approx(1.0));
    CHECK(b.witness_ratio == Approx(1.0));
  }
  SUBCASE("dimension mismatch") {
    CHECK_THROWS_AS(kframe_bounds(e1e2(), KOperator::identity(3)), Error);
  }
}

TEST_CASE("kframe_bounds is valid and tight on random instances") {
  Rng rng(22);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = static_cast<std::size_t>(uniform_int(rng, 2, 6));
    const std::size_t m = static_cast<std::size_t>(uniform_int(rng, 1, 2 * static_cast<int>(n)));
    const std::size_t r = static_cast<std::size_t>(uniform_int(rng, 1, static_cast<int>(n)));
    const Frame f(random_mat(rng, n, m));
    const KOperator k(random_mat(rng, n, r) * random_mat(rng, r, n));
    const FrameBounds b = kframe_bounds(f, k);
    const Mat s = frame_operator(f);
    CHECK(b.upper_B == Approx(power_lambda_max(s)).epsilon(1e-6));
    CHECK(b.is_k_frame == (b.lower_A > 0));
    for (int t = 0; t < 100; ++t) {
      const Vec x = random_vec(rng, n);
      const double kx = norm(matvec(k.matrix().transpose(), x));
      if (kx <= 1e-6) continue;
      const double q = dot(matvec(s, x), x);
      CHECK(q - b.lower_A * kx * kx >= -1e-8 * (1 + q));
      CHECK(b.upper_B * dot(x, x) - q >= -1e-8 * (1 + q));
    }
    if (b.is_k_frame) {
      const double kw = norm(matvec(k.matrix().transpose(), b.witness));
      CHECK(kw == Approx(1.0).epsilon(1e-8));
      CHECK(dot(matvec(s, b.witness), b.witness) <= b.lower_A * (1 + 1e-6) + 1e-12);
    }
  }
}

TEST_CASE("parseval_k_check examples") {
  CHECK(parseval_k_check(e1e2(), KOperator::identity(2)).is_parseval);
  CHECK(parseval_k_check(Frame::from_vectors({{2, 0}, {0, 1}}), KOperator(Mat{{2, 0}, {0, 1}})).is_parseval);
  const ParsevalCheck c = parseval_k_check(e1e2(), KOperator(Mat{{2, 0}, {0, 1}}));
  CHECK_FALSE(c.is_parseval);
  CHECK(c.defect == Approx(3.0));
  CHECK(c.threshold == Approx(1e-9 * (1 + std::sqrt(17.0))));
}

TEST_CASE("canonical_k examples and property") {
  CHECK(distance(canonical_k(e1e2()).matrix(), Mat::identity(2)) < 1e-15);
  CHECK(distance(canonical_k(Frame::from_vectors({{1, 0}, {1, 0}, {0, 1}})).matrix(),
                 Mat{{std::sqrt(2.0), 0}, {0, 1}}) < 1e-14);
  CHECK(distance(canonical_k(mercedes()).matrix(), std::sqrt(1.5) * Mat::identity(2)) < 1e-14);

  Rng rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = static_cast<std::size_t>(uniform_int(rng, 1, 8));
    const std::size_t m = static_cast<std::size_t>(uniform_int(rng, 1, 16));
    const Frame f(random_mat(rng, n, m));
    CHECK(parseval_k_check(f, canonical_k(f)).is_parseval);
  }
}

TEST_CASE("KOperator caches KKᵀ and rank") {
  const KOperator k(Mat{{1, 2}, {2, 4}});
  CHECK(k.rank() == 1);
  CHECK(k.kkstar() == Mat{{5, 10}, {10, 20}});
  CHECK_THROWS_AS(KOperator(Mat(2, 3)), Error);
}
