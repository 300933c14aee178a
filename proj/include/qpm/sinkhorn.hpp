#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qpm/magic.hpp"
#include "qpm/moments.hpp"

namespace qpm {

// ============================================================================
// Alternating orthonormalization ("flattening"). One step: orthonormalize
// every grid column by a polar decomposition, then transpose; iterating
// drives a row-orthonormal grid toward a magic basis.
// ============================================================================

struct UnitaryTuple {
  int N = 0;
  std::vector<CMatrix> members;  // N unitaries of size N x N
};

// Every member unitary within tol; throws otherwise.
void check_tuple(const UnitaryTuple& u, double tol = 1e-10);

// Grid with cell (i, j) = row j of member i. Rows are exactly orthonormal.
VectorGrid tuple_grid(const UnitaryTuple& u);

// Draw of N independent Haar unitaries.
UnitaryTuple haar_tuple(int N, RngStream& stream);

// Rows of Pol(M) for the matrix M whose rows are the given vectors: the
// closest orthonormal family in the simultaneous least-squares sense.
std::vector<CVector> alpha(const std::vector<CVector>& rows);

// S p_i S for S = (sum p_i)^{-1/2} (Moore-Penrose): renormalizes a family of
// positive matrices so the family sums to the range projection.
std::vector<CMatrix> beta(const std::vector<CMatrix>& ps);

// Member j = Pol(M_j) where the rows of M_j are the column-j cells
// x_{0j}, ..., x_{N-1,j}. tuple_grid(phi_map(g)) is one flattening step;
// on a magic basis it is exactly the transpose of g.
UnitaryTuple phi_map(const VectorGrid& g);

struct MatrixGrid {
  int N = 0;
  std::vector<CMatrix> cells;  // row-major

  const CMatrix& at(int i, int j) const { return cells[i * N + j]; }
};

// Cell (i, j) = P_i^{-1/2} u_{ji} P_i^{-1/2} with P_i = sum_j u_{ji}: the
// projection-level analogue of one flattening step (column normalize and
// transpose). Column sums of the input become range projections of rows.
MatrixGrid psi_map(const MagicUnitary& u);

// prod_j |det M_j| over the column matrices M_j. Equals 1 exactly on magic
// bases and is < 1 on any other row-orthonormal grid.
double vol(const VectorGrid& g);

// ============================================================================
// Iteration driver
// ============================================================================

struct FlattenOptions {
  double tol = 1e-10;                // convergence: column defect below this
  int max_iters = 10000;
  double stall_improvement = 1e-14;  // required residual gain ...
  int stall_window = 50;             // ... within this many iterations
  bool record_metrics = true;        // per-iteration vol and f2 (NaN when off)
  bool record_f3 = false;
};

struct FlattenRow {
  int iteration = 0;  // 0 = start state
  double residual = 0.0;  // grid_col_defect
  double vol_ = std::numeric_limits<double>::quiet_NaN();
  double f2 = std::numeric_limits<double>::quiet_NaN();
  double f3 = std::numeric_limits<double>::quiet_NaN();
};

struct FlatteningTrace {
  bool converged = false;
  int iterations = 0;
  std::string stop_reason;  // "converged" | "stalled" | "max_iters"
  std::vector<FlattenRow> rows;
  UnitaryTuple final_tuple;  // generates final_grid once a step has run
  VectorGrid final_grid;
};

// Iterate g <- tuple_grid(phi_map(g)) from a unit-vector grid until the grid
// is a magic basis within tol, progress stalls, or max_iters is hit.
FlatteningTrace flatten(const VectorGrid& start, const FlattenOptions& opts = {});

// Random magic basis: flatten from a Haar tuple grid, retrying up to 5 fresh
// starts from the same stream; throws sampling_failure if none converge.
VectorGrid sample_k_n(int N, RngStream& stream, const FlattenOptions& opts = {});

// Truncated moments Tr((avg T_p)^r) of the model built over random magic
// bases, p = 1..p_max, r = 1..r_max, with Catalan reference values. Every p
// reuses the same sampled grids (streams derived from the same seed).
MomentSeries universal_moments(int N, int p_max, int r_max, long samples,
                               std::uint64_t seed, const McPolicy& policy = {});

// Label cell (i, j) by the first-row cell of largest squared overlap. On a
// grid of Latin type this recovers the underlying square; not validated here.
LatinSquare latin_label_grid(const VectorGrid& g);

}  // namespace qpm
