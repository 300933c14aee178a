#include "qpm/magic.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace qpm {

namespace {

// Spectral norm of a (numerically) Hermitian deviation; cheaper than SVD and
// exact for the Gram-minus-identity matrices used below.
double herm_norm(const CMatrix& a) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

void check_grid_shape(const VectorGrid& g) {
  if (g.N < 1) throw invalid_input("grid: N must be >= 1");
  if (static_cast<int>(g.cells.size()) != g.N * g.N)
    throw invalid_input("grid: expected N*N cells");
  for (const auto& c : g.cells)
    if (c.size() != g.N) throw invalid_input("grid: cell dimension must equal N");
}

double grid_unit_defect(const VectorGrid& g) {
  check_grid_shape(g);
  double worst = 0.0;
  for (const auto& c : g.cells) worst = std::max(worst, std::abs(c.squaredNorm() - 1.0));
  return worst;
}

double grid_row_defect(const VectorGrid& g) {
  check_grid_shape(g);
  double worst = 0.0;
  CMatrix gm(g.N, g.N);
  for (int i = 0; i < g.N; ++i) {
    for (int j = 0; j < g.N; ++j)
      for (int k = 0; k < g.N; ++k) gm(j, k) = inner(g.at(i, j), g.at(i, k));
    gm -= CMatrix::Identity(g.N, g.N);
    worst = std::max(worst, herm_norm(gm));
  }
  return worst;
}

double grid_col_defect(const VectorGrid& g) {
  check_grid_shape(g);
  double worst = 0.0;
  CMatrix gm(g.N, g.N);
  for (int j = 0; j < g.N; ++j) {
    for (int i = 0; i < g.N; ++i)
      for (int k = 0; k < g.N; ++k) gm(i, k) = inner(g.at(i, j), g.at(k, j));
    gm -= CMatrix::Identity(g.N, g.N);
    worst = std::max(worst, herm_norm(gm));
  }
  return worst;
}

bool is_magic_basis(const VectorGrid& g, double tol) {
  return grid_row_defect(g) <= tol && grid_col_defect(g) <= tol;
}

MagicResidual validate_magic(const MagicUnitary& u) {
  if (u.N < 1 || static_cast<int>(u.cells.size()) != u.N * u.N)
    throw invalid_input("magic unitary: malformed");
  const auto d = u.cells[0].mat.rows();
  for (const auto& c : u.cells)
    if (c.mat.rows() != d || c.mat.cols() != d)
      throw invalid_input("magic unitary: mixed cell dimensions");
  MagicResidual r;
  const CMatrix id = CMatrix::Identity(d, d);
  for (int i = 0; i < u.N; ++i) {
    CMatrix s = CMatrix::Zero(d, d);
    for (int j = 0; j < u.N; ++j) s += u.at(i, j);
    r.row_defect = std::max(r.row_defect, spectral_norm(s - id));
  }
  for (int j = 0; j < u.N; ++j) {
    CMatrix s = CMatrix::Zero(d, d);
    for (int i = 0; i < u.N; ++i) s += u.at(i, j);
    r.col_defect = std::max(r.col_defect, spectral_norm(s - id));
  }
  for (const auto& c : u.cells) {
    const double pd = projection_defect(c.mat);
    const double tr_dev = std::abs(c.mat.trace().real() - std::llround(c.mat.trace().real())) +
                          std::abs(c.mat.trace().imag());
    r.rank_defect = std::max(r.rank_defect, std::max(pd, tr_dev));
  }
  return r;
}

MagicUnitary grid_to_unitary(const VectorGrid& g) {
  check_grid_shape(g);
  MagicUnitary u;
  u.N = g.N;
  u.cells.reserve(g.cells.size());
  for (const auto& c : g.cells) u.cells.push_back(proj(c));
  return u;
}

MagicUnitary latin_model(const LatinSquare& l, const std::vector<Projection>& ps, double tol) {
  validate_latin(l);
  if (static_cast<int>(ps.size()) != l.N)
    throw invalid_input("latin model: need exactly N projections");
  const auto d = ps[0].mat.rows();
  CMatrix sum = CMatrix::Zero(d, d);
  for (const auto& p : ps) {
    if (p.mat.rows() != d || p.mat.cols() != d)
      throw invalid_input("latin model: mixed projection dimensions");
    if (projection_defect(p.mat) > tol)
      throw invalid_input("latin model: input is not a projection within tolerance");
    sum += p.mat;
  }
  if (spectral_norm(sum - CMatrix::Identity(d, d)) > tol * l.N)
    throw invalid_input("latin model: projections do not sum to the identity");
  MagicUnitary u;
  u.N = l.N;
  u.cells.reserve(l.N * l.N);
  for (int i = 0; i < l.N; ++i)
    for (int j = 0; j < l.N; ++j) u.cells.push_back(ps[l.at(i, j)]);
  return u;
}

VectorGrid hadamard_model(const CMatrix& h, double tol) {
  const int n = static_cast<int>(h.rows());
  if (n < 1 || h.cols() != n) throw invalid_input("hadamard model: square input required");
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (std::abs(std::abs(h(i, j)) - 1.0) > tol)
        throw invalid_input("hadamard model: entries must be unimodular");
  const CMatrix gramm = h * h.adjoint();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const cxd want = (i == j) ? cxd(n, 0) : cxd(0, 0);
      if (std::abs(gramm(i, j) - want) > tol * n)
        throw invalid_input("hadamard model: rows are not orthogonal");
    }
  VectorGrid g;
  g.N = n;
  g.cells.reserve(n * n);
  const double s = 1.0 / std::sqrt(static_cast<double>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      CVector v(n);
      for (int k = 0; k < n; ++k) v(k) = h(i, k) / h(j, k) * s;
      g.cells.push_back(std::move(v));
    }
  return g;
}

namespace {

void check_algebra_member(const OrthonormalUnitaryBasis& basis, const CMatrix& x, double tol) {
  if (x.rows() != basis.n || x.cols() != basis.n)
    throw invalid_input("model: unitary has the wrong dimension for the algebra");
  if (max_abs(x.adjoint() * x - CMatrix::Identity(basis.n, basis.n)) > tol)
    throw invalid_input("model: x is not unitary within tolerance");
  if (basis.kind == OrthonormalUnitaryBasis::Algebra::diagonal) {
    CMatrix off = x;
    off.diagonal().setZero();
    if (max_abs(off) > tol)
      throw invalid_input("model: x must be diagonal for a diagonal algebra");
  }
}

}  // namespace

CVector algebra_vectorize(const OrthonormalUnitaryBasis& basis, const CMatrix& m) {
  if (m.rows() != basis.n || m.cols() != basis.n)
    throw invalid_input("algebra_vectorize: wrong dimension for the algebra");
  if (basis.kind == OrthonormalUnitaryBasis::Algebra::matrix) return vectorize_matrix(m);
  return m.diagonal() / std::sqrt(static_cast<double>(basis.n));
}

VectorGrid fully_split_model(const OrthonormalUnitaryBasis& basis, const CMatrix& x, double tol) {
  const int nd = basis.model_dim();
  if (static_cast<int>(basis.members.size()) != nd)
    throw invalid_input("model: basis member count must equal the model dimension");
  if (basis_orthonormality_defect(basis) > tol)
    throw invalid_input("model: basis is not orthonormal within tolerance");
  check_algebra_member(basis, x, tol);
  VectorGrid g;
  g.N = nd;
  g.cells.reserve(nd * nd);
  std::vector<CMatrix> gx(nd);
  for (int i = 0; i < nd; ++i) gx[i] = basis.members[i] * x;
  for (int i = 0; i < nd; ++i)
    for (int j = 0; j < nd; ++j)
      g.cells.push_back(algebra_vectorize(basis, gx[i] * basis.members[j].adjoint()));
  return g;
}

VectorGrid split_model(const OrthonormalUnitaryBasis& e, const OrthonormalUnitaryBasis& f,
                       double tol) {
  if (e.kind != f.kind || e.n != f.n)
    throw invalid_input("split model: bases live in different algebras");
  const int nd = e.model_dim();
  if (static_cast<int>(e.members.size()) != nd || static_cast<int>(f.members.size()) != nd)
    throw invalid_input("split model: basis member count must equal the model dimension");
  if (basis_orthonormality_defect(e) > tol || basis_orthonormality_defect(f) > tol)
    throw invalid_input("split model: bases are not orthonormal within tolerance");
  VectorGrid g;
  g.N = nd;
  g.cells.reserve(nd * nd);
  for (int i = 0; i < nd; ++i)
    for (int j = 0; j < nd; ++j)
      g.cells.push_back(algebra_vectorize(e, e.members[i] * f.members[j].adjoint()));
  return g;
}

CMatrix haar_algebra_unitary(const OrthonormalUnitaryBasis& basis, RngStream& stream) {
  if (basis.kind == OrthonormalUnitaryBasis::Algebra::matrix)
    return haar_unitary(basis.n, stream);
  CMatrix x = CMatrix::Zero(basis.n, basis.n);
  for (int k = 0; k < basis.n; ++k) {
    const double a = 2.0 * M_PI * stream.uniform();
    x(k, k) = cxd(std::cos(a), std::sin(a));
  }
  return x;
}

GridSampler haar_model_sampler(const OrthonormalUnitaryBasis& basis) {
  return [basis](RngStream& stream) {
    return fully_split_model(basis, haar_algebra_unitary(basis, stream));
  };
}

GridSampler random_unit_grid_sampler(int N) {
  if (N < 1) throw invalid_input("grid sampler: N must be >= 1");
  return [N](RngStream& stream) {
    VectorGrid g;
    g.N = N;
    g.cells.reserve(N * N);
    for (int c = 0; c < N * N; ++c) {
      CVector v(N);
      for (int k = 0; k < N; ++k) v(k) = cxd(stream.normal(), stream.normal());
      v /= v.norm();
      g.cells.push_back(std::move(v));
    }
    return g;
  };
}

}  // namespace qpm
