#pragma once

#include <functional>
#include <vector>

#include "qpm/group.hpp"
#include "qpm/linalg.hpp"

namespace qpm {

// ============================================================================
// Vector grids: N x N arrays of unit vectors in C^N, row-major. The grid of a
// "flat" model; rows/columns being orthonormal bases encodes the magic
// condition at the vector level.
// ============================================================================

struct VectorGrid {
  int N = 0;
  std::vector<CVector> cells;  // N*N, row-major; each of dimension N

  CVector& at(int i, int j) { return cells[i * N + j]; }
  const CVector& at(int i, int j) const { return cells[i * N + j]; }
};

// Structural check: N >= 1, N*N cells, every cell dimension N. Throws.
void check_grid_shape(const VectorGrid& g);

// max_i | ||cell_ij||^2 - 1 | over all cells.
double grid_unit_defect(const VectorGrid& g);

// Row i defect: ||G_i - I||_2 where (G_i)_{jk} = <x_ij, x_ik>. Max over rows.
double grid_row_defect(const VectorGrid& g);

// Column j defect: ||G_j - I||_2 where (G_j)_{ik} = <x_ij, x_kj>. Max over cols.
double grid_col_defect(const VectorGrid& g);

// Rows and columns all orthonormal within tol.
bool is_magic_basis(const VectorGrid& g, double tol);

// ============================================================================
// Magic unitaries: N x N grids of projections whose rows and columns sum to
// the identity. Cells are rank 1 for the flat models; latin_model may produce
// higher-rank cells.
// ============================================================================

struct MagicUnitary {
  int N = 0;
  std::vector<Projection> cells;  // N*N, row-major; each dim N (or the block dim)

  const CMatrix& at(int i, int j) const { return cells[i * N + j].mat; }
};

struct MagicResidual {
  double row_defect = 0.0;   // max_i ||sum_j u_ij - I||_2
  double col_defect = 0.0;   // max_j ||sum_i u_ij - I||_2
  double rank_defect = 0.0;  // max cell deviation from being a projection

  double max() const { return std::max(row_defect, std::max(col_defect, rank_defect)); }
};

// All three defects; zero iff the grid is exactly a magic unitary.
MagicResidual validate_magic(const MagicUnitary& u);

// Proj every cell. The result is magic iff the grid is a magic basis.
MagicUnitary grid_to_unitary(const VectorGrid& g);

// u_ij = p_{L(i,j)} for a projection list summing to the identity
// (validated within tol). Cells may have rank > 1.
MagicUnitary latin_model(const LatinSquare& l, const std::vector<Projection>& ps,
                         double tol = 1e-10);

// Cells (H_i / H_j)/sqrt(N) for a complex Hadamard matrix H (unimodular
// entries, orthogonal rows; both validated within tol). Always a magic basis.
VectorGrid hadamard_model(const CMatrix& h, double tol = 1e-10);

// Vectorization under which the algebra's normalized trace inner product
// becomes the standard one: matrix kind flattens row-major / sqrt(n),
// diagonal kind keeps the diagonal / sqrt(n).
CVector algebra_vectorize(const OrthonormalUnitaryBasis& basis, const CMatrix& m);

// Cells vec(g_i x g_j*) for an orthonormal unitary basis (g_i) and a unitary
// x of the same algebra. Grid size = model dimension of the basis.
VectorGrid fully_split_model(const OrthonormalUnitaryBasis& basis, const CMatrix& x,
                             double tol = 1e-10);

// Cells vec(e_i f_j*) for two orthonormal unitary bases of the same algebra.
VectorGrid split_model(const OrthonormalUnitaryBasis& e, const OrthonormalUnitaryBasis& f,
                       double tol = 1e-10);

// ============================================================================
// Samplers
// ============================================================================

using GridSampler = std::function<VectorGrid(RngStream&)>;

// Haar unitary of the basis algebra: full matrix kind -> Haar on U(n);
// diagonal kind -> independent uniform phases on the diagonal.
CMatrix haar_algebra_unitary(const OrthonormalUnitaryBasis& basis, RngStream& stream);

// Sampler for fully_split_model(basis, x) with x Haar in the basis algebra.
GridSampler haar_model_sampler(const OrthonormalUnitaryBasis& basis);

// Grid whose cells are independent Haar-random unit vectors (no structure).
GridSampler random_unit_grid_sampler(int N);

}  // namespace qpm
