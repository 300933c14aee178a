#pragma once

#include <cstdint>
#include <string>

#include "qpm/linalg.hpp"

namespace qpm {

// ============================================================================
// Randomized falsification harnesses. Each test draws random instances,
// evaluates a claimed inequality with an explicit slack, and re-checks
// near-boundary margins in extended precision before calling them
// violations. Zero violations is evidence, not proof.
// ============================================================================

enum class InequalityMode {
  full_constraints,  // ranks (p, q, q, p), all orthogonality certified
  s_zero_relaxed,    // S = 0, only PQ = 0 and im(P) ^ im(R) = 0 kept
};

std::string mode_name(InequalityMode mode);

struct ProjectionQuadruple {
  int K = 0;
  CMatrix P, Q, R, S;
  int rank_p = 0, rank_q = 0, rank_r = 0, rank_s = 0;
};

// P, Q are Haar-conjugated disjoint coordinate blocks (so PQ = 0 exactly);
// R, S the same under an independent Haar unitary. rank_s = 0 gives S = 0.
ProjectionQuadruple gen_quadruple(int K, int rank_p, int rank_q, int rank_r, int rank_s,
                                  RngStream& stream);

// rank [A B] == rank A + rank B within the SVD cutoff: certifies that the
// images intersect trivially.
bool images_independent(const CMatrix& a, const CMatrix& b, int rank_sum,
                        double cutoff = 1e-8);

struct PrimedQuadruple {
  CMatrix P, Q, R, S;     // C X C for C = (P+R)^{-1/2} resp. (Q+S)^{-1/2}
  double max_defect = 0.0;  // worst deviation of a primed cell from a projection
};

PrimedQuadruple primed_quadruple(const ProjectionQuadruple& q);

struct TrialReport {
  std::string name;
  std::string mode;
  std::string params;
  long trials = 0;
  long evaluated = 0;
  long violations = 0;
  long rejected = 0;      // instances failing certification or validity checks
  long reeval_count = 0;  // near-boundary margins re-checked in long double
  double worst_margin = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t seed = 0;
};

// Claim: Tr(PR) + Tr(QS) >= Tr(P'Q') + Tr(R'S') for the primed quadruple.
// Margins in (-10*slack, -slack) are re-evaluated in long double on the same
// random draws; only re-confirmed or clearly negative margins count as
// violations. In s_zero_relaxed mode the claim reduces to a proved statement
// and zero violations are expected.
TrialReport test_trace_inequality(long trials, int k_max, std::uint64_t seed,
                               InequalityMode mode, double slack = 1e-10);

// Claim: vol does not decrease along a flattening trajectory started from a
// Haar tuple grid. Checks every consecutive step of every trajectory.
TrialReport test_volume_monotone(int N, long trials, std::uint64_t seed,
                                 double slack = 1e-12);

// Claim: f_p does not increase under a double flattening step applied to a
// Haar tuple grid (two steps restore the orientation).
TrialReport test_fp_monotone(int N, int p, long trials, std::uint64_t seed,
                             double slack = 1e-12);

}  // namespace qpm
