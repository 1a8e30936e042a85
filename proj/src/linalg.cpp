#include "kframe/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "kframe/error.hpp"

namespace kframe {

namespace {

constexpr int kMaxSweeps = 100;

// Rotates columns p, q of m by (c, s).
void rotate_columns(Mat& m, std::size_t p, std::size_t q, double c, double s) {
  for (std::size_t k = 0; k < m.rows(); ++k) {
    const double mp = m(k, p);
    const double mq = m(k, q);
    m(k, p) = c * mp - s * mq;
    m(k, q) = s * mp + c * mq;
  }
}

void rotate_rows(Mat& m, std::size_t p, std::size_t q, double c, double s) {
  for (std::size_t k = 0; k < m.cols(); ++k) {
    const double mp = m(p, k);
    const double mq = m(q, k);
    m(p, k) = c * mp - s * mq;
    m(q, k) = s * mp + c * mq;
  }
}

// Tangent of the Jacobi angle that annihilates the (p, q) entry.
double jacobi_tangent(double app, double aqq, double apq) {
  const double theta = (aqq - app) / (2.0 * apq);
  const double t = 1.0 / (std::abs(theta) + std::sqrt(1.0 + theta * theta));
  return theta >= 0.0 ? t : -t;
}

Svd svd_tall(const Mat& a) {
  const std::size_t n = a.cols();
  Mat u = a;
  Mat v = Mat::identity(n);
  constexpr double eps = 1e-15;

  bool converged = false;
  for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
    converged = true;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (std::size_t k = 0; k < u.rows(); ++k) {
          alpha += u(k, p) * u(k, p);
          beta += u(k, q) * u(k, q);
          gamma += u(k, p) * u(k, q);
        }
        if (gamma == 0.0 || std::abs(gamma) <= eps * std::sqrt(alpha * beta)) continue;
        converged = false;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        rotate_columns(u, p, q, c, s);
        rotate_columns(v, p, q, c, s);
      }
    }
  }
  if (!converged) throw Error(ErrorCode::ConvergenceFailure, "one-sided Jacobi SVD did not converge");

  Vec sigma(n);
  for (std::size_t j = 0; j < n; ++j) sigma[j] = norm(u.col(j));

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return sigma[x] > sigma[y]; });

  Svd out{Mat(a.rows(), n), Vec(n), Mat(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t j = order[k];
    out.singular_values[k] = sigma[j];
    for (std::size_t i = 0; i < a.rows(); ++i) out.u(i, k) = sigma[j] > 0.0 ? u(i, j) / sigma[j] : 0.0;
    for (std::size_t i = 0; i < n; ++i) out.v(i, k) = v(i, j);
  }
  return out;
}

}  // namespace

SymEig sym_eig(const Mat& m) {
  if (!m.is_square()) throw Error(ErrorCode::NonSquare, "sym_eig needs a square matrix");
  const std::size_t n = m.rows();
  const double scale = m.frobenius_norm();
  const double asym = distance(m, m.transpose());
  if (asym > std::max(1e-10 * scale, 1e-12)) {
    throw Error(ErrorCode::AsymmetricInput, "‖M − Mᵀ‖_F = " + std::to_string(asym));
  }

  Mat a = symmetric_part(m);
  Mat q = Mat::identity(n);
  const double threshold = 1e-15 * scale;

  bool converged = false;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t r = p + 1; r < n; ++r) off = std::max(off, std::abs(a(p, r)));
    if (off <= threshold) {
      converged = true;
      break;
    }
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t r = p + 1; r < n; ++r) {
        const double apr = a(p, r);
        if (std::abs(apr) <= threshold) continue;
        const double t = jacobi_tangent(a(p, p), a(r, r), apr);
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        // A ← JᵀAJ with J the rotation in the (p, r) plane.
        rotate_columns(a, p, r, c, s);
        rotate_rows(a, p, r, c, s);
        a(p, r) = 0.0;
        a(r, p) = 0.0;
        rotate_columns(q, p, r, c, s);
      }
    }
  }
  if (!converged) throw Error(ErrorCode::ConvergenceFailure, "Jacobi eigensolver did not converge");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return a(x, x) < a(y, y); });

  SymEig out{Vec(n), Mat(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.eigenvalues[k] = a(order[k], order[k]);
    for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, k) = q(i, order[k]);
  }
  return out;
}

Svd svd(const Mat& m) {
  if (m.rows() >= m.cols()) return svd_tall(m);
  Svd t = svd_tall(m.transpose());
  return Svd{std::move(t.v), std::move(t.singular_values), std::move(t.u)};
}

Mat sqrt_psd(const Mat& m) {
  const SymEig eig = sym_eig(m);
  const double lambda_max = eig.eigenvalues.back();
  const double clip = lambda_max > 0.0 ? 1e-12 * lambda_max : 1e-12;
  const std::size_t n = m.rows();
  Mat root(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const double lambda = eig.eigenvalues[k];
    if (lambda < -clip) {
      throw Error(ErrorCode::NotPSD, "eigenvalue " + std::to_string(lambda) + " below clipping threshold");
    }
    const double r = std::sqrt(std::max(lambda, 0.0));
    if (r == 0.0) continue;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        root(i, j) += r * eig.eigenvectors(i, k) * eig.eigenvectors(j, k);
  }
  return symmetric_part(root);
}

Mat pinv(const Mat& m, double rtol) {
  if (!(rtol > 0.0)) throw Error(ErrorCode::InvalidArgument, "pinv rtol must be positive");
  const Svd d = svd(m);
  Mat out(m.cols(), m.rows());
  const double cut = rtol * d.singular_values.front();
  for (std::size_t k = 0; k < d.singular_values.size(); ++k) {
    const double s = d.singular_values[k];
    if (s <= cut || s == 0.0) continue;
    for (std::size_t i = 0; i < m.cols(); ++i)
      for (std::size_t j = 0; j < m.rows(); ++j) out(i, j) += d.v(i, k) * d.u(j, k) / s;
  }
  return out;
}

InverseResult checked_inverse(const Mat& m, double max_condition) {
  if (!m.is_square()) throw Error(ErrorCode::NonSquare, "inverse of non-square matrix");
  const Svd d = svd(m);
  const double smax = d.singular_values.front();
  const double smin = d.singular_values.back();
  InverseResult r;
  r.condition = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
  if (!(r.condition <= max_condition)) return r;
  r.inverse = Mat(m.cols(), m.rows());
  for (std::size_t k = 0; k < d.singular_values.size(); ++k)
    for (std::size_t i = 0; i < m.cols(); ++i)
      for (std::size_t j = 0; j < m.rows(); ++j)
        r.inverse(i, j) += d.v(i, k) * d.u(j, k) / d.singular_values[k];
  r.ok = true;
  return r;
}

double operator_norm(const Mat& m) { return svd(m).singular_values.front(); }

int numerical_rank(const Mat& m, double rtol) {
  const Svd d = svd(m);
  const double cut = rtol * d.singular_values.front();
  int rank = 0;
  for (double s : d.singular_values)
    if (s > cut && s > 0.0) ++rank;
  return rank;
}

double nnls_kkt_tolerance(const Mat& a, std::span<const double> b) {
  return std::max(1e-11 * a.frobenius_norm() * norm(b), 1e-14);
}

NnlsResult nnls(const Mat& a, std::span<const double> b) {
  if (a.rows() != b.size()) throw Error(ErrorCode::DimensionMismatch, "nnls: rhs length");
  const std::size_t n = a.cols();
  const int cap = 3 * static_cast<int>(n);
  const double tol = nnls_kkt_tolerance(a, b);

  Vec w(n, 0.0);
  std::vector<bool> passive(n, false);

  auto dual = [&](const Vec& x) {
    const Vec r = sub(b, matvec(a, x));
    return matvec(a.transpose(), r);  // −gradient of ½‖Ax − b‖²
  };

  // Least-squares solution restricted to the passive columns (others zero).
  auto solve_passive = [&](const std::vector<bool>& set) {
    std::vector<std::size_t> idx;
    for (std::size_t j = 0; j < n; ++j)
      if (set[j]) idx.push_back(j);
    Vec z(n, 0.0);
    if (idx.empty()) return z;
    const Vec zp = matvec(pinv(a.select_columns(idx)), b);
    for (std::size_t k = 0; k < idx.size(); ++k) z[idx[k]] = zp[k];
    return z;
  };

  int outer = 0;
  std::vector<bool> rejected(n, false);
  while (true) {
    const Vec g = dual(w);
    std::size_t best = n;
    double best_val = tol;
    for (std::size_t j = 0; j < n; ++j) {
      if (passive[j] || rejected[j]) continue;
      if (g[j] > best_val) {
        best_val = g[j];
        best = j;
      }
    }
    if (best == n) break;
    if (++outer > cap) {
      throw Error(ErrorCode::IterationCapExceeded, "nnls exceeded " + std::to_string(cap) + " outer iterations");
    }

    passive[best] = true;
    Vec z = solve_passive(passive);
    if (!(z[best] > 0.0)) {
      // Column numerically dependent on the passive set; it cannot improve the fit.
      passive[best] = false;
      rejected[best] = true;
      continue;
    }
    std::fill(rejected.begin(), rejected.end(), false);

    // Inner loop: step back toward feasibility until every passive entry is positive.
    while (true) {
      std::size_t blocking = n;
      double step = 1.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (passive[j] && z[j] <= 0.0) {
          const double t = w[j] / (w[j] - z[j]);
          if (blocking == n || t < step) {
            step = t;
            blocking = j;
          }
        }
      }
      if (blocking == n) {
        w = z;
        break;
      }
      for (std::size_t j = 0; j < n; ++j)
        if (passive[j]) w[j] += step * (z[j] - w[j]);
      w[blocking] = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (passive[j] && w[j] <= 0.0) {
          w[j] = 0.0;
          passive[j] = false;
        }
      }
      z = solve_passive(passive);
    }
    for (std::size_t j = 0; j < n; ++j)
      if (!passive[j]) w[j] = 0.0;
  }

  NnlsResult out;
  out.residual = norm(sub(matvec(a, w), b));
  out.w = std::move(w);
  out.iterations = outer;
  return out;
}

}  // namespace kframe
