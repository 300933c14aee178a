#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "qpm/errors.hpp"
#include "qpm/rng.hpp"

namespace qpm {

using cxd = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

// ============================================================================
// Scalar product convention (pinned once, used everywhere):
//   <x, y> = sum_k x_k conj(y_k)
// linear in the first slot, conjugate-linear in the second. For vectorized
// algebra elements this matches tr(a b*) under the normalized trace. The
// transfer-matrix fixed-vector tests pin the orientation.
// ============================================================================
inline cxd inner(const CVector& x, const CVector& y) { return y.dot(x); }

// <a, b> = (1/n) Tr(a b*) on n x n matrices (normalized trace pairing).
inline cxd inner_tr(const CMatrix& a, const CMatrix& b) {
  return a.cwiseProduct(b.conjugate()).sum() / static_cast<double>(a.rows());
}

// Row-major flatten scaled by 1/sqrt(n): turns the normalized trace pairing
// on M_n into the standard scalar product on C^{n^2}, and unitaries into
// unit vectors.
CVector vectorize_matrix(const CMatrix& a);

// Hermitian projection wrapper. Invariants (validated where constructed):
// mat == mat*, mat^2 == mat within tolerance; rank is the rounded trace.
struct Projection {
  CMatrix mat;

  int dim() const { return static_cast<int>(mat.rows()); }
  int rank() const;
};

// max(||A - A*||_2, ||A^2 - A||_2): zero iff A is an orthogonal projection.
double projection_defect(const CMatrix& a);

// Operator 2-norm (largest singular value).
double spectral_norm(const CMatrix& a);

double max_abs(const CMatrix& a);

bool is_hermitian(const CMatrix& a, double tol);

// ============================================================================
// Core factorizations
// ============================================================================

// Haar-distributed n x n unitary: complex Ginibre, QR, then column phases
// fixed by the R diagonal (plain QR alone is not Haar). Deterministic in the
// stream state; entry draw order is row-major, real part first.
CMatrix haar_unitary(int n, RngStream& stream);

// Unitary polar factor. M = A S B* (SVD) -> A B*; for invertible M this is
// M (M* M)^{-1/2}, and the SVD route extends it to singular M.
CMatrix polar(const CMatrix& m);

struct PinvSqrtOptions {
  // Eigenvalues <= cutoff are treated as zero. Negative cutoff means the
  // default rank cutoff: dim * 2^-52 * lambda_max.
  double cutoff = -1.0;
};

// Moore-Penrose inverse square root of a Hermitian PSD matrix:
// eigenvalues l > cutoff map to 1/sqrt(l), the rest to 0.
// Rejects non-Hermitian input and genuinely negative spectra.
CMatrix pinv_sqrt(const CMatrix& m, const PinvSqrtOptions& opts = {});

// Rank-1 projection onto a nonzero vector: v v* / ||v||^2.
Projection proj(const CVector& v);

// Gram matrix G_ab = <v_a, v_b> under the pinned scalar product.
CMatrix gram(const std::vector<CVector>& vs);

}  // namespace qpm
