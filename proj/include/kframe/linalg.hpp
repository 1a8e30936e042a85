#pragma once

#include <span>

#include "kframe/matrix.hpp"

namespace kframe {

// Eigen-decomposition of a symmetric matrix: M = Q·diag(λ)·Qᵀ, λ ascending.
struct SymEig {
  Vec eigenvalues;
  Mat eigenvectors;  // orthonormal columns, column k pairs with eigenvalues[k]
};

// Cyclic Jacobi. Accepts inputs symmetric within 1e-10·‖M‖_F and symmetrizes
// before factoring.
SymEig sym_eig(const Mat& m);

// Thin SVD: M = U·diag(σ)·Vᵀ with σ descending, k = min(rows, cols).
struct Svd {
  Mat u;  // rows × k
  Vec singular_values;
  Mat v;  // cols × k
};

// One-sided (Hestenes) Jacobi.
Svd svd(const Mat& m);

Mat sqrt_psd(const Mat& m);

// Moore–Penrose pseudoinverse; singular values at or below rtol·σ_max are
// treated as zero.
Mat pinv(const Mat& m, double rtol = 1e-12);

// SVD-based inverse; ok is false (and inverse left empty) when the 2-norm
// condition number exceeds max_condition.
struct InverseResult {
  Mat inverse;
  double condition = 0.0;
  bool ok = false;
};
InverseResult checked_inverse(const Mat& m, double max_condition = 1e12);

double operator_norm(const Mat& m);

// Number of singular values above rtol·σ_max.
int numerical_rank(const Mat& m, double rtol);

struct NnlsResult {
  Vec w;
  double residual = 0.0;  // ‖A·w − b‖₂
  int iterations = 0;     // outer (column-admission) iterations
};

// min ‖A·w − b‖₂ subject to w ≥ 0, Lawson–Hanson active set. Deterministic:
// ties are broken by the lowest column index.
NnlsResult nnls(const Mat& a, std::span<const double> b);

// Tolerance used for the KKT checks inside nnls.
double nnls_kkt_tolerance(const Mat& a, std::span<const double> b);

}  // namespace kframe
