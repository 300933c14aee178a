#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "qpm/magic.hpp"
#include "qpm/parallel.hpp"

namespace qpm {

// ============================================================================
// Transfer matrices on (C^N)^{tensor p}. Multi-indices are flattened
// row-major: (i_1..i_p) -> sum_t i_t N^{p-t}. Entry definition:
//   T[i,j] = (1/N) <x_{i1 j1}, x_{i2 j2}> <x_{i2 j2}, x_{i3 j3}> ...
//            <x_{ip jp}, x_{i1 j1}>        (cyclic)
// ============================================================================

struct MomentTransferMatrix {
  int N = 0;
  int p = 0;
  CMatrix m;
};

MomentTransferMatrix t_matrix(const VectorGrid& g, int p);

// Re Tr(T_p) computed from the diagonal cells only (never materializes T_p).
double transfer_trace(const VectorGrid& g, int p);

// c^r = Re Tr(T^r), r = 1..r_max.
std::vector<double> truncated_moments(const MomentTransferMatrix& t, int r_max);

// ============================================================================
// Scalar/vector Monte Carlo with deterministic batching. Estimates depend
// only on (seed, samples); threads change scheduling, nothing else.
// ============================================================================

struct ScalarStat {
  double estimate = 0.0;
  double stderr_ = 0.0;
  long samples = 0;
};

struct VectorStat {
  RVector estimate;
  RVector stderr_;
  long samples = 0;
};

VectorStat mc_vector(const std::function<void(RngStream&, RVector&)>& fn, int dim,
                     long samples, std::uint64_t seed, const McPolicy& policy = {});

ScalarStat mc_scalar(const std::function<double(RngStream&)>& fn, long samples,
                     std::uint64_t seed, const McPolicy& policy = {});

// ============================================================================
// Averaged transfer matrices
// ============================================================================

struct AveragedTransfer {
  int N = 0;
  int p = 0;
  long samples = 0;
  std::uint64_t seed = 0;
  CMatrix mean;
  RMatrix entry_se;                     // per-entry SE of the complex mean
  std::vector<CMatrix> batch_means;     // kept while N^p <= 512 (jackknife)
  std::vector<double> batch_trace_means;
  std::vector<long> batch_counts;
};

AveragedTransfer averaged_t_matrix(const GridSampler& sampler, int N, int p, long samples,
                                   std::uint64_t seed, const McPolicy& policy = {});

// Same averaging for several p at once, sampling each grid exactly once and
// feeding it to every p. Result order matches ps; bitwise equal to the per-p
// calls (those rebuild identical grids from the same derived streams).
std::vector<AveragedTransfer> averaged_t_matrix_multi(const GridSampler& sampler, int N,
                                                      const std::vector<int>& ps,
                                                      long samples, std::uint64_t seed,
                                                      const McPolicy& policy = {});

// Sample mean of Re Tr(T_p^x) with its standard error; equals the r=1
// truncated moment of the averaged matrix by linearity.
ScalarStat averaged_transfer_trace(const GridSampler& sampler, int p, long samples,
                                   std::uint64_t seed, const McPolicy& policy = {});

// ============================================================================
// Moment series (shared result shape for all pipelines)
// ============================================================================

struct MomentEntry {
  int p = 0;
  int r = 0;  // 0 marks r-independent direct laws
  double estimate = 0.0;
  double stderr_ = 0.0;
  long samples = 0;
  double reference = std::numeric_limits<double>::quiet_NaN();
};

struct MomentSeries {
  std::string label;
  int N = 0;
  std::uint64_t seed = 0;
  std::vector<MomentEntry> entries;

  const MomentEntry& at(int p, int r) const;
};

// Tr((averaged T)^r) for r = 1..r_max with jackknife standard errors over the
// sample batches (r >= 2 needs the stored batch means; SE is NaN without them).
MomentSeries truncated_moments_series(const AveragedTransfer& avg, int r_max);

// Law of the model Gram matrix built from r independent Haar unitaries of the
// basis algebra: per sample the N^r x N^r Gram of the tensor vectors, with
// normalized-trace moments tr(G^p_), p = 1..p_max.
MomentSeries gram_model_moments(const OrthonormalUnitaryBasis& basis, int r, int p_max,
                                long samples, std::uint64_t seed, const McPolicy& policy = {});

// Law of the diagonal matrix L_{k1c1..krcr} = |Tr(W_{k1c1} x_1 ... W_{krcr} x_r)|^2
// under the normalized diagonal average.
MomentSeries weyl_lambda_moments(const FiniteAbelianGroup& h, int r, int p_max, long samples,
                                 std::uint64_t seed, const McPolicy& policy = {});

// Direct law of |Tr x|^2 over Haar U(n); r-independent (entries carry r = 0).
MomentSeries char_square_moments(int n, int p_max, long samples, std::uint64_t seed,
                                 const McPolicy& policy = {});

// ============================================================================
// Exact references
// ============================================================================

// #{permutations in S_p with no increasing subsequence longer than n}.
// Brute force over S_p; p <= 10.
long lis_moment(int n, int p);

// Catalan number C_p, exact up to p = 30.
unsigned long long catalan(int p);

// ============================================================================
// Partition vectors and the flatness functional
// ============================================================================

struct Partition {
  int p = 0;
  std::vector<std::vector<int>> blocks;  // 0-based positions

  static Partition singletons(int p);
  static Partition one_block(int p);
  void validate() const;  // blocks partition {0..p-1}
  bool is_noncrossing() const;
};

struct PartitionVector {
  int N = 0;
  int p = 0;
  RVector v;  // dim N^p, entries 0/1
};

// Entry at multi-index i is 1 iff i is constant on every block of pi.
// ||v||^2 = N^{#blocks}.
PartitionVector xi_partition(int N, const Partition& pi);

// Flatness functional, normalized to equal 1 exactly on magic bases:
//   f_p(x) = ||T_p^x xi_oneblock||^2 / N
//          = (1/N^3) sum_{i1..ip} | sum_j <x_{i1 j},x_{i2 j}> ... <x_{ip j},x_{i1 j}> |^2.
// Always >= 1 on unit grids (Cauchy-Schwarz against xi_oneblock).
double f_p(const VectorGrid& g, int p);

// ============================================================================
// Fixed-vector identities of T_p
// ============================================================================

struct EigenvectorReport {
  int N = 0, p = 0;
  double row_defect = 0.0, col_defect = 0.0;
  bool rows_orthonormal = false, cols_orthonormal = false;
  // ||T xi - xi|| residuals; "allones" = all-singleton vector, "oneblock" =
  // one-block vector. Adjoint rows apply T*.
  double res_allones = 0.0;
  double res_allones_adjoint = 0.0;
  double res_oneblock = 0.0;
  double res_oneblock_adjoint = 0.0;
  // |<T xi_allones, xi_allones> - N^p| and |<T xi_oneblock, xi_oneblock> - N|;
  // the latter holds for every unit grid.
  double pairing_allones_dev = 0.0;
  double pairing_oneblock_dev = 0.0;
};

EigenvectorReport eigenvector_checks(const VectorGrid& g, int p, double tol = 1e-10);

}  // namespace qpm
