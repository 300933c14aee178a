#include "qpm/sinkhorn.hpp"

#include <cmath>

#include "qpm/errors.hpp"

namespace qpm {

void check_tuple(const UnitaryTuple& u, double tol) {
  if (u.N < 1 || static_cast<int>(u.members.size()) != u.N)
    throw invalid_input("tuple: need exactly N members");
  const CMatrix id = CMatrix::Identity(u.N, u.N);
  for (const auto& m : u.members) {
    if (m.rows() != u.N || m.cols() != u.N)
      throw invalid_input("tuple: member has wrong dimensions");
    if (max_abs(m.adjoint() * m - id) > tol)
      throw invalid_input("tuple: member is not unitary within tolerance");
  }
}

VectorGrid tuple_grid(const UnitaryTuple& u) {
  if (u.N < 1 || static_cast<int>(u.members.size()) != u.N)
    throw invalid_input("tuple: need exactly N members");
  VectorGrid g;
  g.N = u.N;
  g.cells.reserve(std::size_t(u.N) * u.N);
  for (int i = 0; i < u.N; ++i) {
    const CMatrix& m = u.members[std::size_t(i)];
    if (m.rows() != u.N || m.cols() != u.N)
      throw invalid_input("tuple: member has wrong dimensions");
    for (int j = 0; j < u.N; ++j) g.cells.push_back(m.row(j).transpose());
  }
  return g;
}

UnitaryTuple haar_tuple(int N, RngStream& stream) {
  if (N < 1) throw invalid_input("haar_tuple: N must be >= 1");
  UnitaryTuple u;
  u.N = N;
  u.members.reserve(std::size_t(N));
  for (int i = 0; i < N; ++i) u.members.push_back(haar_unitary(N, stream));
  return u;
}

std::vector<CVector> alpha(const std::vector<CVector>& rows) {
  const int n = static_cast<int>(rows.size());
  if (n < 1) throw invalid_input("alpha: empty family");
  for (const auto& r : rows)
    if (r.size() != n) throw invalid_input("alpha: need n vectors of dimension n");
  CMatrix m(n, n);
  for (int i = 0; i < n; ++i) m.row(i) = rows[std::size_t(i)].transpose();
  const CMatrix u = polar(m);
  std::vector<CVector> out;
  out.reserve(std::size_t(n));
  for (int i = 0; i < n; ++i) out.push_back(u.row(i).transpose());
  return out;
}

std::vector<CMatrix> beta(const std::vector<CMatrix>& ps) {
  if (ps.empty()) throw invalid_input("beta: empty family");
  const auto d = ps[0].rows();
  CMatrix sum = CMatrix::Zero(d, d);
  for (const auto& p : ps) {
    if (p.rows() != d || p.cols() != d) throw invalid_input("beta: mixed dimensions");
    sum += p;
  }
  const CMatrix s = pinv_sqrt(sum);
  std::vector<CMatrix> out;
  out.reserve(ps.size());
  for (const auto& p : ps) out.push_back(s * p * s);
  return out;
}

UnitaryTuple phi_map(const VectorGrid& g) {
  check_grid_shape(g);
  UnitaryTuple u;
  u.N = g.N;
  u.members.reserve(std::size_t(g.N));
  CMatrix m(g.N, g.N);
  for (int j = 0; j < g.N; ++j) {
    for (int i = 0; i < g.N; ++i) m.row(i) = g.at(i, j).transpose();
    u.members.push_back(polar(m));
  }
  return u;
}

MatrixGrid psi_map(const MagicUnitary& u) {
  if (u.N < 1 || static_cast<int>(u.cells.size()) != u.N * u.N)
    throw invalid_input("psi: malformed magic unitary");
  const auto d = u.cells[0].mat.rows();
  MatrixGrid out;
  out.N = u.N;
  out.cells.resize(std::size_t(u.N) * u.N);
  for (int i = 0; i < u.N; ++i) {
    CMatrix p = CMatrix::Zero(d, d);
    for (int j = 0; j < u.N; ++j) p += u.at(j, i);
    const CMatrix s = pinv_sqrt(p);
    for (int j = 0; j < u.N; ++j) out.cells[std::size_t(i) * u.N + j] = s * u.at(j, i) * s;
  }
  return out;
}

double vol(const VectorGrid& g) {
  check_grid_shape(g);
  CMatrix m(g.N, g.N);
  double v = 1.0;
  for (int j = 0; j < g.N; ++j) {
    for (int i = 0; i < g.N; ++i) m.row(i) = g.at(i, j).transpose();
    v *= std::abs(m.determinant());
  }
  return v;
}

// ----------------------------------------------------------------------------
// iteration
// ----------------------------------------------------------------------------

namespace {

FlattenRow make_row(const VectorGrid& g, int iteration, const FlattenOptions& opts) {
  FlattenRow row;
  row.iteration = iteration;
  row.residual = grid_col_defect(g);
  if (opts.record_metrics) {
    row.vol_ = vol(g);
    row.f2 = f_p(g, 2);
    if (opts.record_f3) row.f3 = f_p(g, 3);
  }
  return row;
}

}  // namespace

FlatteningTrace flatten(const VectorGrid& start, const FlattenOptions& opts) {
  check_grid_shape(start);
  if (grid_unit_defect(start) > 1e-6)
    throw invalid_input("flatten: start cells must be unit vectors");
  if (opts.max_iters < 0 || opts.tol <= 0.0) throw invalid_input("flatten: bad options");

  FlatteningTrace trace;
  VectorGrid g = start;
  trace.rows.push_back(make_row(g, 0, opts));

  // The start grid need not have orthonormal rows, so convergence at
  // iteration 0 checks both defects; later iterates have exact rows.
  if (trace.rows[0].residual <= opts.tol && grid_row_defect(g) <= opts.tol) {
    trace.converged = true;
    trace.iterations = 0;
    trace.stop_reason = "converged";
    trace.final_grid = g;
    trace.final_tuple = phi_map(g);
    return trace;
  }

  double best_residual = trace.rows[0].residual;
  int last_gain_iter = 0;
  UnitaryTuple tuple;
  for (int k = 1; k <= opts.max_iters; ++k) {
    tuple = phi_map(g);
    g = tuple_grid(tuple);
    trace.rows.push_back(make_row(g, k, opts));
    const double res = trace.rows.back().residual;
    trace.iterations = k;
    if (res <= opts.tol) {
      trace.converged = true;
      trace.stop_reason = "converged";
      break;
    }
    if (res < best_residual - opts.stall_improvement) {
      best_residual = res;
      last_gain_iter = k;
    } else if (k - last_gain_iter >= opts.stall_window) {
      trace.stop_reason = "stalled";
      break;
    }
    if (k == opts.max_iters) trace.stop_reason = "max_iters";
  }
  if (trace.iterations == 0) trace.stop_reason = "max_iters";  // max_iters == 0
  trace.final_grid = g;
  trace.final_tuple = trace.iterations > 0 ? tuple : phi_map(g);
  return trace;
}

VectorGrid sample_k_n(int N, RngStream& stream, const FlattenOptions& opts) {
  if (N < 1) throw invalid_input("sample_k_n: N must be >= 1");
  FlattenOptions fast = opts;
  fast.record_metrics = false;  // rows are discarded here
  constexpr int kAttempts = 5;
  for (int a = 0; a < kAttempts; ++a) {
    const VectorGrid start = tuple_grid(haar_tuple(N, stream));
    const FlatteningTrace trace = flatten(start, fast);
    if (trace.converged) return trace.final_grid;
  }
  throw sampling_failure("sample_k_n: flattening failed to converge after 5 starts");
}

MomentSeries universal_moments(int N, int p_max, int r_max, long samples,
                               std::uint64_t seed, const McPolicy& policy) {
  if (p_max < 1 || r_max < 1)
    throw invalid_input("universal_moments: p_max and r_max must be >= 1");
  const GridSampler sampler = [N](RngStream& st) { return sample_k_n(N, st); };
  MomentSeries series;
  series.label = "universal";
  series.N = N;
  series.seed = seed;
  std::vector<int> ps;
  for (int p = 1; p <= p_max; ++p) ps.push_back(p);
  const std::vector<AveragedTransfer> avgs =
      averaged_t_matrix_multi(sampler, N, ps, samples, seed, policy);
  for (const AveragedTransfer& avg : avgs) {
    const MomentSeries part = truncated_moments_series(avg, r_max);
    const double ref = double(catalan(avg.p));
    for (MomentEntry e : part.entries) {
      e.reference = ref;
      series.entries.push_back(e);
    }
  }
  return series;
}

LatinSquare latin_label_grid(const VectorGrid& g) {
  check_grid_shape(g);
  LatinSquare l;
  l.N = g.N;
  l.cells.resize(std::size_t(g.N) * g.N);
  for (int i = 0; i < g.N; ++i)
    for (int j = 0; j < g.N; ++j) {
      int best = 0;
      double best_ov = -1.0;
      for (int k = 0; k < g.N; ++k) {
        const double ov = std::norm(inner(g.at(i, j), g.at(0, k)));
        if (ov > best_ov) {
          best_ov = ov;
          best = k;
        }
      }
      l.cells[std::size_t(i) * g.N + j] = best;
    }
  return l;
}

}  // namespace qpm
