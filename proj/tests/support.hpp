#pragma once

// Random instance generators and independent oracles for the test binaries.
// Oracles deliberately avoid the library's Jacobi routines: orthogonal
// factors come from Gram–Schmidt, extreme eigenvalues from power iteration,
// inverses from Gauss–Jordan with partial pivoting.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "kframe/matrix.hpp"

namespace kframe::testing {

using Rng = std::mt19937_64;

inline double normal(Rng& rng) { return std::normal_distribution<double>(0.0, 1.0)(rng); }

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

inline int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

inline Vec random_vec(Rng& rng, std::size_t n) {
  Vec v(n);
  for (double& x : v) x = normal(rng);
  return v;
}

inline Mat random_mat(Rng& rng, std::size_t r, std::size_t c) {
  Mat m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = normal(rng);
  return m;
}

// Modified Gram–Schmidt on the columns of a Gaussian matrix, re-run once.
inline Mat random_orthogonal(Rng& rng, std::size_t n) {
  Mat q = random_mat(rng, n, n);
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t j = 0; j < n; ++j) {
      Vec v = q.col(j);
      for (std::size_t k = 0; k < j; ++k) {
        const Vec u = q.col(k);
        v = axpy(v, -dot(u, v), u);
      }
      q.set_col(j, scaled(v, 1.0 / norm(v)));
    }
  }
  return q;
}

inline Mat rotation2(double theta) { return Mat{{std::cos(theta), -std::sin(theta)}, {std::sin(theta), std::cos(theta)}}; }

// Q·diag(d)·Qᵀ
inline Mat conjugate_diag(const Mat& q, const Vec& d) { return q * Mat::diag(d) * q.transpose(); }

// Gauss–Jordan with partial pivoting.
inline Mat gj_inverse(const Mat& m) {
  const std::size_t n = m.rows();
  Mat a = m;
  Mat inv = Mat::identity(n);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a(r, c)) > std::abs(a(piv, c))) piv = r;
    for (std::size_t j = 0; j < n; ++j) {
      std::swap(a(c, j), a(piv, j));
      std::swap(inv(c, j), inv(piv, j));
    }
    const double d = a(c, c);
    for (std::size_t j = 0; j < n; ++j) {
      a(c, j) /= d;
      inv(c, j) /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = a(r, c);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) {
        a(r, j) -= f * a(c, j);
        inv(r, j) -= f * inv(c, j);
      }
    }
  }
  return inv;
}

// Largest eigenvalue of a symmetric PSD matrix by power iteration.
inline double power_lambda_max(const Mat& s, int iters = 5000) {
  Vec v(s.rows(), 1.0);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] += 0.1 * static_cast<double>(i);
  double lambda = 0.0;
  for (int k = 0; k < iters; ++k) {
    Vec w = matvec(s, v);
    const double nw = norm(w);
    if (nw == 0.0) return 0.0;
    lambda = dot(v, w) / dot(v, v);
    v = scaled(w, 1.0 / nw);
  }
  return lambda;
}

// Random frame whose frame operator has singular values in [lo, hi]:
// F = U·[diag(s) 0]·Vᵀ.
inline Mat conditioned_synthesis(Rng& rng, std::size_t n, std::size_t m, double lo, double hi) {
  if (m < n) throw std::invalid_argument("conditioned_synthesis needs m >= n");
  const Mat u = random_orthogonal(rng, n);
  const Mat v = random_orthogonal(rng, m);
  Mat core(n, m);
  for (std::size_t i = 0; i < n; ++i) core(i, i) = uniform(rng, lo, hi);
  return u * core * v.transpose();
}

// Parseval K-frame: F = K·[I 0]·Vᵀ gives F·Fᵀ = K·Kᵀ.
inline Mat parseval_synthesis(Rng& rng, const Mat& k, std::size_t m) {
  const std::size_t n = k.rows();
  if (m < n) throw std::invalid_argument("parseval_synthesis needs m >= n");
  const Mat v = random_orthogonal(rng, m);
  Mat core(n, m);
  for (std::size_t i = 0; i < n; ++i) core(i, i) = 1.0;
  return k * core * v.transpose();
}

// Projection onto the first r columns of q.
inline Mat projection_onto(const Mat& q, std::size_t r) {
  Vec d(q.rows(), 0.0);
  for (std::size_t i = 0; i < r; ++i) d[i] = 1.0;
  return conjugate_diag(q, d);
}

// Exhaustive nnls oracle for one or two columns: grid one coordinate with
// step h, minimize the other exactly (a clamped 1-D least squares), both
// orderings. Returns the best residual found.
inline double nnls_grid_residual(const Mat& a, const Vec& b, double h, double wmax) {
  auto resid = [&](const Vec& w) { return norm(sub(matvec(a, w), b)); };
  auto clamp_ls = [&](std::size_t j, const Vec& rhs) {
    const Vec col = a.col(j);
    const double cc = dot(col, col);
    return cc == 0.0 ? 0.0 : std::max(0.0, dot(col, rhs) / cc);
  };
  double best = norm(b);
  if (a.cols() == 1) {
    for (double t = 0.0; t <= wmax; t += h) best = std::min(best, resid(Vec{t}));
    best = std::min(best, resid(Vec{clamp_ls(0, b)}));
    return best;
  }
  for (std::size_t g = 0; g < 2; ++g) {
    const std::size_t o = 1 - g;
    for (double t = 0.0; t <= wmax; t += h) {
      Vec w(2, 0.0);
      w[g] = t;
      const Vec rhs = axpy(b, -t, a.col(g));
      w[o] = clamp_ls(o, rhs);
      best = std::min(best, resid(w));
    }
  }
  return best;
}

// Piecewise instance with PK = KP: K is block diagonal in an orthonormal basis
// whose first r vectors span ran(P).
// kind 0: valid K^p_s instance; 1: pieces fine, cross term nonzero;
// 2: X piece rescaled; 3: random frame.
struct PiecewiseInstance {
  Mat f, k, p;
  Vec a, b;
};

inline Mat block_diag(const Mat& x, const Mat& y) {
  const std::size_t r = x.rows(), s = y.rows();
  Mat out(r + s, r + s);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < r; ++j) out(i, j) = x(i, j);
  for (std::size_t i = 0; i < s; ++i)
    for (std::size_t j = 0; j < s; ++j) out(r + i, r + j) = y(i, j);
  return out;
}

// Columns g_j split as P g_j / a_j + (I − P) g_j / b_j, so the piecewise
// scaling (a, b) reassembles g.
inline Mat split_columns(const Mat& g, const Mat& p, const Vec& a, const Vec& b) {
  const Mat ip = Mat::identity(p.rows()) - p;
  Mat f(g.rows(), g.cols());
  for (std::size_t j = 0; j < g.cols(); ++j) {
    const Vec gj = g.col(j);
    f.set_col(j, add(scaled(matvec(p, gj), 1.0 / a[j]), scaled(matvec(ip, gj), 1.0 / b[j])));
  }
  return f;
}

inline PiecewiseInstance piecewise_instance(Rng& rng, int kind) {
  const std::size_t n = static_cast<std::size_t>(uniform_int(rng, 2, 5));
  const std::size_t r = static_cast<std::size_t>(uniform_int(rng, 1, static_cast<int>(n) - 1));
  const std::size_t m = static_cast<std::size_t>(uniform_int(rng, static_cast<int>(n), 2 * static_cast<int>(n)));
  const Mat q = random_orthogonal(rng, n);
  const Mat k1 = random_mat(rng, r, r);
  const Mat k2 = random_mat(rng, n - r, n - r);
  const Mat kmat = q * block_diag(k1, k2) * q.transpose();
  const Mat p = projection_onto(q, r);

  Mat g;
  if (kind == 1) {
    // each piece Parseval on its own, the two row sets not orthogonal
    const Mat vx = random_orthogonal(rng, m).columns(0, r);
    const Mat vy = random_orthogonal(rng, m).columns(0, n - r);
    const Mat gx = k1 * vx.transpose();
    const Mat gy = k2 * vy.transpose();
    Mat gb(n, m);
    for (std::size_t j = 0; j < m; ++j) {
      for (std::size_t i = 0; i < r; ++i) gb(i, j) = gx(i, j);
      for (std::size_t i = 0; i < n - r; ++i) gb(r + i, j) = gy(i, j);
    }
    g = q * gb;
  } else if (kind == 3) {
    g = random_mat(rng, n, m);
  } else {
    g = parseval_synthesis(rng, kmat, m);
  }

  Vec a(m), b(m);
  for (std::size_t j = 0; j < m; ++j) {
    a[j] = uniform(rng, 0.2, 5.0);
    b[j] = uniform(rng, 0.2, 5.0);
  }
  Mat f = split_columns(g, p, a, b);
  if (kind == 2)
    for (double& x : a) x *= 1.5;
  return {std::move(f), kmat, p, a, b};
}

// Operator with two eigenspaces E₁ ⊕ E₂ (eigenvalues κ₁, κ₂), an orthogonal U
// rotating inside each eigenspace, and a projection P onto a subspace that
// takes some directions from each. UK = KU and PK = KP; Q = UPUᵀ ≠ P.
struct CommutingTriple {
  Mat k, u, p;
};

inline CommutingTriple commuting_triple(Rng& rng, std::size_t n) {
  const std::size_t d1 = static_cast<std::size_t>(uniform_int(rng, 1, static_cast<int>(n) - 1));
  const Mat w = random_orthogonal(rng, n);
  Vec lam(n);
  const double k1 = uniform(rng, 0.5, 2.0), k2 = uniform(rng, 0.5, 2.0);
  for (std::size_t i = 0; i < n; ++i) lam[i] = i < d1 ? k1 : k2;
  const Mat u = w * block_diag(random_orthogonal(rng, d1), random_orthogonal(rng, n - d1)) * w.transpose();
  // P keeps the first direction of each eigenspace
  Vec pd(n, 0.0);
  pd[0] = 1.0;
  if (d1 < n) pd[d1] = uniform(rng, 0, 1) < 0.5 ? 1.0 : 0.0;
  return {conjugate_diag(w, lam), u, conjugate_diag(w, pd)};
}

}  // namespace kframe::testing
