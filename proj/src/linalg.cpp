#include "qpm/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <cmath>

namespace qpm {

CVector vectorize_matrix(const CMatrix& a) {
  const int n = static_cast<int>(a.rows());
  if (n == 0 || a.cols() != n) throw invalid_input("vectorize_matrix: square input required");
  CVector v(n * n);
  const double s = 1.0 / std::sqrt(static_cast<double>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) v(i * n + j) = a(i, j) * s;
  return v;
}

int Projection::rank() const {
  return static_cast<int>(std::llround(mat.trace().real()));
}

double projection_defect(const CMatrix& a) {
  const double herm = spectral_norm(a - a.adjoint());
  const double idem = spectral_norm(a * a - a);
  return std::max(herm, idem);
}

double spectral_norm(const CMatrix& a) {
  if (a.rows() == 0 || a.cols() == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> svd(a);
  return svd.singularValues()(0);
}

double max_abs(const CMatrix& a) {
  if (a.size() == 0) return 0.0;
  return a.cwiseAbs().maxCoeff();
}

bool is_hermitian(const CMatrix& a, double tol) {
  if (a.rows() != a.cols()) return false;
  return max_abs(a - a.adjoint()) <= tol;
}

CMatrix haar_unitary(int n, RngStream& stream) {
  if (n <= 0) throw invalid_input("haar_unitary: dimension must be positive");
  CMatrix g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double re = stream.normal();
      const double im = stream.normal();
      g(i, j) = cxd(re, im);
    }
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ();
  const CMatrix& qrm = qr.matrixQR();
  for (int j = 0; j < n; ++j) {
    const cxd rjj = qrm(j, j);
    const double a = std::abs(rjj);
    const cxd phase = (a > 0.0) ? rjj / a : cxd(1.0, 0.0);
    q.col(j) *= phase;
  }
  return q;
}

CMatrix polar(const CMatrix& m) {
  if (m.rows() == 0 || m.rows() != m.cols()) throw invalid_input("polar: square input required");
  Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

CMatrix pinv_sqrt(const CMatrix& m, const PinvSqrtOptions& opts) {
  const int n = static_cast<int>(m.rows());
  if (n == 0 || m.cols() != n) throw invalid_input("pinv_sqrt: square input required");
  const double fro = m.norm();
  if (max_abs(m - m.adjoint()) > 1e-10 * std::max(1.0, fro))
    throw invalid_input("pinv_sqrt: input is not Hermitian");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m);
  if (es.info() != Eigen::Success) throw invalid_input("pinv_sqrt: eigensolver failed");
  const RVector& ev = es.eigenvalues();
  const double lmax = ev.cwiseAbs().maxCoeff();
  // Default rank cutoff: dim * eps * lambda_max with eps = 2^-52.
  const double cutoff = (opts.cutoff >= 0.0) ? opts.cutoff : n * 0x1.0p-52 * lmax;
  const double neg_tol = std::max(cutoff, 1e-10 * std::max(1.0, lmax));
  RVector d(n);
  for (int i = 0; i < n; ++i) {
    const double l = ev(i);
    if (l < -neg_tol) throw invalid_input("pinv_sqrt: input has a negative eigenvalue");
    d(i) = (l > cutoff) ? 1.0 / std::sqrt(l) : 0.0;
  }
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().adjoint();
}

Projection proj(const CVector& v) {
  const double n2 = v.squaredNorm();
  if (!(n2 > 0.0)) throw invalid_input("proj: zero vector");
  Projection p;
  p.mat = (v * v.adjoint()) / n2;
  return p;
}

CMatrix gram(const std::vector<CVector>& vs) {
  const int m = static_cast<int>(vs.size());
  if (m == 0) throw invalid_input("gram: empty vector list");
  const auto dim = vs[0].size();
  for (const auto& v : vs)
    if (v.size() != dim) throw invalid_input("gram: mixed vector dimensions");
  CMatrix g(m, m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) g(a, b) = inner(vs[a], vs[b]);
  return g;
}

}  // namespace qpm
