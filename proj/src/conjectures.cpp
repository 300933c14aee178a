#include "qpm/conjectures.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>

#include "qpm/errors.hpp"
#include "qpm/sinkhorn.hpp"

namespace qpm {

std::string mode_name(InequalityMode mode) {
  return mode == InequalityMode::full_constraints ? "full" : "s-zero-relaxed";
}

namespace {

template <typename Real>
using CxMat = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

// Mirrors haar_unitary draw for draw, so a copied stream replays the same
// matrix in a different precision.
template <typename Real>
CxMat<Real> haar_t(int n, RngStream& stream) {
  using Cx = std::complex<Real>;
  CxMat<Real> g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double re = stream.normal();
      const double im = stream.normal();
      g(i, j) = Cx(Real(re), Real(im));
    }
  Eigen::HouseholderQR<CxMat<Real>> qr(g);
  CxMat<Real> q = qr.householderQ();
  const CxMat<Real>& qrm = qr.matrixQR();
  for (int j = 0; j < n; ++j) {
    const Cx rjj = qrm(j, j);
    const Real a = std::abs(rjj);
    const Cx phase = (a > Real(0)) ? Cx(rjj / a) : Cx(Real(1), Real(0));
    q.col(j) *= phase;
  }
  return q;
}

template <typename Real>
CxMat<Real> block_proj(const CxMat<Real>& u, int from, int count) {
  return u.middleCols(from, count) * u.middleCols(from, count).adjoint();
}

// Same cutoff rule as the double-precision pseudo inverse square root, so the
// two precisions keep or drop the same eigenvalues away from the boundary.
template <typename Real>
CxMat<Real> pinv_sqrt_t(const CxMat<Real>& m) {
  const int n = int(m.rows());
  Eigen::SelfAdjointEigenSolver<CxMat<Real>> es((m + m.adjoint()) / Real(2));
  const auto& ev = es.eigenvalues();
  const Real lmax = ev.size() ? ev.maxCoeff() : Real(0);
  const Real cutoff = Real(n) * Real(0x1.0p-52) * std::max(lmax, Real(0));
  Eigen::Matrix<Real, Eigen::Dynamic, 1> d(n);
  for (int k = 0; k < n; ++k)
    d[k] = ev[k] > cutoff ? Real(1) / std::sqrt(ev[k]) : Real(0);
  return es.eigenvectors() * d.template cast<std::complex<Real>>().asDiagonal() *
         es.eigenvectors().adjoint();
}

struct Ranks {
  int K = 0, p = 0, q = 0, r = 0, s = 0;
};

// Full inequality evaluation in the requested precision; the stream is taken
// by value so a caller can replay identical draws.
template <typename Real>
double eval_margin_t(const Ranks& rk, RngStream stream) {
  const CxMat<Real> a = haar_t<Real>(rk.K, stream);
  const CxMat<Real> b = haar_t<Real>(rk.K, stream);
  const CxMat<Real> pm = block_proj(a, 0, rk.p);
  const CxMat<Real> qm = block_proj(a, rk.p, rk.q);
  const CxMat<Real> rm = block_proj(b, 0, rk.r);
  const CxMat<Real> sm =
      rk.s > 0 ? CxMat<Real>(block_proj(b, rk.r, rk.s)) : CxMat<Real>(CxMat<Real>::Zero(rk.K, rk.K));
  const Real lhs = ((pm * rm).trace() + (qm * sm).trace()).real();
  const CxMat<Real> c = pinv_sqrt_t<Real>(pm + rm);
  const CxMat<Real> d = pinv_sqrt_t<Real>(qm + sm);
  const CxMat<Real> pp = c * pm * c;
  const CxMat<Real> rp = c * rm * c;
  const CxMat<Real> qp = d * qm * d;
  const CxMat<Real> sp = d * sm * d;
  const Real rhs = ((pp * qp).trace() + (rp * sp).trace()).real();
  return double(lhs - rhs);
}

void check_ranks(const Ranks& rk) {
  if (rk.K < 2) throw invalid_input("quadruple: K must be >= 2");
  if (rk.p < 1 || rk.q < 1 || rk.r < 1 || rk.s < 0)
    throw invalid_input("quadruple: ranks of P, Q, R must be >= 1 and rank of S >= 0");
  if (rk.p + rk.q > rk.K || rk.r + rk.s > rk.K)
    throw invalid_input("quadruple: block ranks exceed the dimension");
}

}  // namespace

ProjectionQuadruple gen_quadruple(int K, int rank_p, int rank_q, int rank_r, int rank_s,
                                  RngStream& stream) {
  const Ranks rk{K, rank_p, rank_q, rank_r, rank_s};
  check_ranks(rk);
  const CMatrix a = haar_unitary(K, stream);
  const CMatrix b = haar_unitary(K, stream);
  ProjectionQuadruple quad;
  quad.K = K;
  quad.rank_p = rank_p;
  quad.rank_q = rank_q;
  quad.rank_r = rank_r;
  quad.rank_s = rank_s;
  quad.P = block_proj<double>(a, 0, rank_p);
  quad.Q = block_proj<double>(a, rank_p, rank_q);
  quad.R = block_proj<double>(b, 0, rank_r);
  quad.S = rank_s > 0 ? CMatrix(block_proj<double>(b, rank_r, rank_s))
                      : CMatrix(CMatrix::Zero(K, K));
  return quad;
}

bool images_independent(const CMatrix& a, const CMatrix& b, int rank_sum, double cutoff) {
  if (a.rows() != b.rows()) throw invalid_input("images_independent: row mismatch");
  CMatrix stacked(a.rows(), a.cols() + b.cols());
  stacked << a, b;
  Eigen::JacobiSVD<CMatrix> svd(stacked);
  int rank = 0;
  for (int k = 0; k < svd.singularValues().size(); ++k)
    if (svd.singularValues()[k] > cutoff) ++rank;
  return rank == rank_sum;
}

PrimedQuadruple primed_quadruple(const ProjectionQuadruple& q) {
  const CMatrix c = pinv_sqrt(q.P + q.R);
  const CMatrix d = pinv_sqrt(q.Q + q.S);
  PrimedQuadruple out;
  out.P = c * q.P * c;
  out.R = c * q.R * c;
  out.Q = d * q.Q * d;
  out.S = d * q.S * d;
  out.max_defect = std::max(std::max(projection_defect(out.P), projection_defect(out.Q)),
                            std::max(projection_defect(out.R), projection_defect(out.S)));
  return out;
}

TrialReport test_trace_inequality(long trials, int k_max, std::uint64_t seed,
                               InequalityMode mode, double slack) {
  if (trials < 1) throw invalid_input("inequality test: trials must be >= 1");
  if (k_max < 2) throw invalid_input("inequality test: K_max must be >= 2");
  if (slack <= 0.0) throw invalid_input("inequality test: slack must be positive");
  TrialReport rep;
  rep.name = "trace-inequality";
  rep.mode = mode_name(mode);
  rep.params = "K_max=" + std::to_string(k_max) + ",slack=" + std::to_string(slack);
  rep.trials = trials;
  rep.seed = seed;
  double worst = std::numeric_limits<double>::infinity();
  for (long t = 0; t < trials; ++t) {
    RngStream st = RngStream::derive(seed, std::uint64_t(t));
    const int K = 2 + int(st.next_u64() % std::uint64_t(k_max - 1));
    Ranks rk;
    rk.K = K;
    rk.p = 1 + int(st.next_u64() % std::uint64_t(K - 1));
    rk.q = 1 + int(st.next_u64() % std::uint64_t(K - rk.p));
    if (mode == InequalityMode::full_constraints) {
      rk.r = rk.q;
      rk.s = rk.p;
    } else {
      rk.r = 1 + int(st.next_u64() % std::uint64_t(K - rk.p));
      rk.s = 0;
    }
    const RngStream matrix_stream = st;  // replayed for the long double pass
    const ProjectionQuadruple quad = gen_quadruple(K, rk.p, rk.q, rk.r, rk.s, st);
    bool certified = images_independent(quad.P, quad.R, rk.p + rk.r);
    if (mode == InequalityMode::full_constraints)
      certified = certified && images_independent(quad.Q, quad.S, rk.q + rk.s);
    if (!certified) {
      ++rep.rejected;
      continue;
    }
    const PrimedQuadruple primed = primed_quadruple(quad);
    if (primed.max_defect > 1e-8) {
      ++rep.rejected;
      continue;
    }
    const double lhs = ((quad.P * quad.R).trace() + (quad.Q * quad.S).trace()).real();
    const double rhs =
        ((primed.P * primed.Q).trace() + (primed.R * primed.S).trace()).real();
    double margin = lhs - rhs;
    ++rep.evaluated;
    if (margin < -10.0 * slack) {
      ++rep.violations;
    } else if (margin < -slack) {
      ++rep.reeval_count;
      margin = eval_margin_t<long double>(rk, matrix_stream);
      if (margin < -slack) ++rep.violations;
    }
    worst = std::min(worst, margin);
  }
  if (rep.evaluated > 0) rep.worst_margin = worst;
  return rep;
}

TrialReport test_volume_monotone(int N, long trials, std::uint64_t seed, double slack) {
  if (N < 1) throw invalid_input("volume test: N must be >= 1");
  if (trials < 1) throw invalid_input("volume test: trials must be >= 1");
  TrialReport rep;
  rep.name = "volume-monotone";
  rep.params = "N=" + std::to_string(N) + ",slack=" + std::to_string(slack);
  rep.trials = trials;
  rep.seed = seed;
  FlattenOptions opts;
  opts.max_iters = 500;
  double worst = std::numeric_limits<double>::infinity();
  for (long t = 0; t < trials; ++t) {
    RngStream st = RngStream::derive(seed, std::uint64_t(t));
    const VectorGrid g = tuple_grid(haar_tuple(N, st));
    const FlatteningTrace trace = flatten(g, opts);
    for (std::size_t k = 1; k < trace.rows.size(); ++k) {
      const double margin = trace.rows[k].vol_ - trace.rows[k - 1].vol_;
      ++rep.evaluated;
      if (margin < -slack) ++rep.violations;
      worst = std::min(worst, margin);
    }
  }
  if (rep.evaluated > 0) rep.worst_margin = worst;
  return rep;
}

TrialReport test_fp_monotone(int N, int p, long trials, std::uint64_t seed, double slack) {
  if (N < 1) throw invalid_input("flatness test: N must be >= 1");
  if (p < 1) throw invalid_input("flatness test: p must be >= 1");
  if (trials < 1) throw invalid_input("flatness test: trials must be >= 1");
  TrialReport rep;
  rep.name = "flatness-monotone";
  rep.params = "N=" + std::to_string(N) + ",p=" + std::to_string(p) +
               ",slack=" + std::to_string(slack);
  rep.trials = trials;
  rep.seed = seed;
  double worst = std::numeric_limits<double>::infinity();
  for (long t = 0; t < trials; ++t) {
    RngStream st = RngStream::derive(seed, std::uint64_t(t));
    const VectorGrid g = tuple_grid(haar_tuple(N, st));
    const VectorGrid g1 = tuple_grid(phi_map(g));
    const VectorGrid g2 = tuple_grid(phi_map(g1));
    const double margin = f_p(g, p) - f_p(g2, p);
    ++rep.evaluated;
    if (margin < -slack) ++rep.violations;
    worst = std::min(worst, margin);
  }
  if (rep.evaluated > 0) rep.worst_margin = worst;
  return rep;
}

}  // namespace qpm
