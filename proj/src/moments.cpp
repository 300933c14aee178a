#include "qpm/moments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qpm/errors.hpp"

namespace qpm {

namespace {

// ----------------------------------------------------------------------------
// guards
// ----------------------------------------------------------------------------

long ipow_guarded(int base, int exp, long cap, const char* what) {
  if (base < 1 || exp < 0) throw invalid_input("ipow: bad base/exponent");
  long v = 1;
  for (int t = 0; t < exp; ++t) {
    if (v > cap / base) throw resource_limit(std::string(what) + ": dimension exceeds cap");
    v *= base;
  }
  return v;
}

constexpr long kTensorRowCap = 1L << 20;     // xi vectors, trace walks
constexpr long kMatrixEntryCap = 1L << 26;   // ~1 GB of complex doubles
constexpr int kBatchMatrixDimLimit = 512;    // keep batch means below this dim

void check_matrix_size(long rows, const char* what) {
  if (rows > kTensorRowCap || rows * rows > kMatrixEntryCap)
    throw resource_limit(std::string(what) + ": transfer matrix too large");
}

// ----------------------------------------------------------------------------
// transfer fill
// ----------------------------------------------------------------------------

// S(q1, q2) = <cell q1, cell q2> over composite cell indices q = i*N + j.
void build_pair_table(const VectorGrid& g, CMatrix& s) {
  const int nc = g.N * g.N;
  s.resize(nc, nc);
  for (int q1 = 0; q1 < nc; ++q1)
    for (int q2 = 0; q2 < nc; ++q2) s(q1, q2) = inner(g.cells[q1], g.cells[q2]);
}

void fill_rec(const CMatrix& s, CMatrix& out, int N, int p, int level, int q_first,
              int q_prev, long row, long col, cxd prod) {
  if (level == p) {
    out(row, col) = prod * s(q_prev, q_first) / double(N);
    return;
  }
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      const int q = i * N + j;
      fill_rec(s, out, N, p, level + 1, q_first, q, row * N + i, col * N + j,
               prod * s(q_prev, q));
    }
}

void t_matrix_into(const VectorGrid& g, int p, CMatrix& out, CMatrix& s_scratch) {
  const int N = g.N;
  const long rows = ipow_guarded(N, p, kTensorRowCap, "t_matrix");
  check_matrix_size(rows, "t_matrix");
  build_pair_table(g, s_scratch);
  out.resize(rows, rows);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      const int q = i * N + j;
      fill_rec(s_scratch, out, N, p, 1, q, q, i, j, cxd(1.0, 0.0));
    }
}

void trace_rec(const CMatrix& d, int N, int p, int level, int i_first, int i_prev,
               cxd prod, Kahan& re, Kahan& im) {
  if (level == p) {
    const cxd v = prod * d(i_prev, i_first);
    re.add(v.real());
    im.add(v.imag());
    return;
  }
  for (int i = 0; i < N; ++i)
    trace_rec(d, N, p, level + 1, i_first, i, prod * d(i_prev, i), re, im);
}

}  // namespace

MomentTransferMatrix t_matrix(const VectorGrid& g, int p) {
  if (p < 1) throw invalid_input("t_matrix: p must be >= 1");
  check_grid_shape(g);
  MomentTransferMatrix t;
  t.N = g.N;
  t.p = p;
  CMatrix s;
  t_matrix_into(g, p, t.m, s);
  return t;
}

double transfer_trace(const VectorGrid& g, int p) {
  if (p < 1) throw invalid_input("transfer_trace: p must be >= 1");
  check_grid_shape(g);
  const int N = g.N;
  ipow_guarded(N, p, kTensorRowCap, "transfer_trace");
  CMatrix d(N, N);
  for (int a = 0; a < N; ++a)
    for (int b = 0; b < N; ++b) d(a, b) = inner(g.at(a, a), g.at(b, b));
  Kahan re, im;
  for (int i = 0; i < N; ++i) trace_rec(d, N, p, 1, i, i, cxd(1.0, 0.0), re, im);
  return re.sum / double(N);
}

std::vector<double> truncated_moments(const MomentTransferMatrix& t, int r_max) {
  if (r_max < 1) throw invalid_input("truncated_moments: r_max must be >= 1");
  std::vector<double> out;
  out.reserve(r_max);
  CMatrix power = t.m;
  out.push_back(power.trace().real());
  for (int r = 2; r <= r_max; ++r) {
    power = power * t.m;
    out.push_back(power.trace().real());
  }
  return out;
}

// ----------------------------------------------------------------------------
// Monte Carlo scaffolding
// ----------------------------------------------------------------------------

VectorStat mc_vector(const std::function<void(RngStream&, RVector&)>& fn, int dim,
                     long samples, std::uint64_t seed, const McPolicy& policy) {
  if (dim < 1) throw invalid_input("mc_vector: dim must be >= 1");
  if (samples < 1) throw invalid_input("mc_vector: samples must be >= 1");
  const auto plan = batch_plan(samples, policy);
  const int nb = int(plan.size());
  std::vector<RVector> bsum(nb), bsq(nb);
  for_each_batch(nb, policy, [&](int b) {
    const auto [start, count] = plan[b];
    std::vector<Kahan> acc(dim), acc2(dim);
    RVector val(dim);
    for (long k = 0; k < count; ++k) {
      RngStream st = RngStream::derive(seed, std::uint64_t(start + k));
      fn(st, val);
      for (int d = 0; d < dim; ++d) {
        acc[d].add(val[d]);
        acc2[d].add(val[d] * val[d]);
      }
    }
    bsum[b] = RVector(dim);
    bsq[b] = RVector(dim);
    for (int d = 0; d < dim; ++d) {
      bsum[b][d] = acc[d].sum;
      bsq[b][d] = acc2[d].sum;
    }
  });
  VectorStat out;
  out.samples = samples;
  out.estimate = RVector(dim);
  out.stderr_ = RVector(dim);
  for (int d = 0; d < dim; ++d) {
    Kahan tot, tot2;
    for (int b = 0; b < nb; ++b) {
      tot.add(bsum[b][d]);
      tot2.add(bsq[b][d]);
    }
    const double m = double(samples);
    out.estimate[d] = tot.sum / m;
    if (samples > 1) {
      const double num = std::max(0.0, tot2.sum - tot.sum * tot.sum / m);
      out.stderr_[d] = std::sqrt(num / (m * (m - 1.0)));
    } else {
      out.stderr_[d] = 0.0;
    }
  }
  return out;
}

ScalarStat mc_scalar(const std::function<double(RngStream&)>& fn, long samples,
                     std::uint64_t seed, const McPolicy& policy) {
  const VectorStat v = mc_vector(
      [&fn](RngStream& st, RVector& out) { out[0] = fn(st); }, 1, samples, seed, policy);
  return ScalarStat{v.estimate[0], v.stderr_[0], v.samples};
}

// ----------------------------------------------------------------------------
// averaged transfer
// ----------------------------------------------------------------------------

std::vector<AveragedTransfer> averaged_t_matrix_multi(const GridSampler& sampler, int N,
                                                      const std::vector<int>& ps,
                                                      long samples, std::uint64_t seed,
                                                      const McPolicy& policy) {
  if (N < 1 || ps.empty()) throw invalid_input("averaged_t_matrix: need N >= 1, some p");
  if (samples < 1) throw invalid_input("averaged_t_matrix: samples must be >= 1");
  const int np = int(ps.size());
  std::vector<long> rows_of(static_cast<std::size_t>(np));
  for (int q = 0; q < np; ++q) {
    if (ps[std::size_t(q)] < 1) throw invalid_input("averaged_t_matrix: p must be >= 1");
    const long rows = ipow_guarded(N, ps[std::size_t(q)], kTensorRowCap, "averaged_t_matrix");
    check_matrix_size(rows, "averaged_t_matrix");
    rows_of[std::size_t(q)] = rows;
  }
  const auto plan = batch_plan(samples, policy);
  const int nb = int(plan.size());
  // bsum[q][b], bsq[q][b]: per-p per-batch accumulators. Each sampled grid is
  // shared by every p, so the p-values see identical draws.
  std::vector<std::vector<CMatrix>> bsum(static_cast<std::size_t>(np));
  std::vector<std::vector<RMatrix>> bsq(static_cast<std::size_t>(np));
  for (int q = 0; q < np; ++q) {
    bsum[std::size_t(q)].resize(std::size_t(nb));
    bsq[std::size_t(q)].resize(std::size_t(nb));
  }
  for_each_batch(nb, policy, [&](int b) {
    const auto [start, count] = plan[b];
    std::vector<CMatrix> sum(static_cast<std::size_t>(np));
    std::vector<RMatrix> sq(static_cast<std::size_t>(np));
    for (int q = 0; q < np; ++q) {
      sum[std::size_t(q)] = CMatrix::Zero(rows_of[std::size_t(q)], rows_of[std::size_t(q)]);
      sq[std::size_t(q)] = RMatrix::Zero(rows_of[std::size_t(q)], rows_of[std::size_t(q)]);
    }
    CMatrix scratch, pair_scratch;
    for (long k = 0; k < count; ++k) {
      RngStream st = RngStream::derive(seed, std::uint64_t(start + k));
      const VectorGrid g = sampler(st);
      if (g.N != N) throw invalid_input("averaged_t_matrix: sampler grid size mismatch");
      for (int q = 0; q < np; ++q) {
        t_matrix_into(g, ps[std::size_t(q)], scratch, pair_scratch);
        sum[std::size_t(q)] += scratch;
        sq[std::size_t(q)] += scratch.array().abs2().matrix();
      }
    }
    for (int q = 0; q < np; ++q) {
      bsum[std::size_t(q)][std::size_t(b)] = std::move(sum[std::size_t(q)]);
      bsq[std::size_t(q)][std::size_t(b)] = std::move(sq[std::size_t(q)]);
    }
  });
  std::vector<AveragedTransfer> outs;
  outs.reserve(std::size_t(np));
  const double m = double(samples);
  for (int q = 0; q < np; ++q) {
    const long rows = rows_of[std::size_t(q)];
    const auto& qsum = bsum[std::size_t(q)];
    const auto& qsq = bsq[std::size_t(q)];
    AveragedTransfer out;
    out.N = N;
    out.p = ps[std::size_t(q)];
    out.samples = samples;
    out.seed = seed;
    out.mean = CMatrix(rows, rows);
    out.entry_se = RMatrix(rows, rows);
    for (long i = 0; i < rows; ++i)
      for (long j = 0; j < rows; ++j) {
        Kahan re, im, sqk;
        for (int b = 0; b < nb; ++b) {
          re.add(qsum[std::size_t(b)](i, j).real());
          im.add(qsum[std::size_t(b)](i, j).imag());
          sqk.add(qsq[std::size_t(b)](i, j));
        }
        out.mean(i, j) = cxd(re.sum / m, im.sum / m);
        if (samples > 1) {
          const double num =
              std::max(0.0, sqk.sum - (re.sum * re.sum + im.sum * im.sum) / m);
          out.entry_se(i, j) = std::sqrt(num / (m * (m - 1.0)));
        } else {
          out.entry_se(i, j) = 0.0;
        }
      }
    out.batch_counts.reserve(std::size_t(nb));
    out.batch_trace_means.reserve(std::size_t(nb));
    const bool keep = rows <= kBatchMatrixDimLimit;
    for (int b = 0; b < nb; ++b) {
      const double cnt = double(plan[std::size_t(b)].second);
      out.batch_counts.push_back(plan[std::size_t(b)].second);
      out.batch_trace_means.push_back(qsum[std::size_t(b)].trace().real() / cnt);
      if (keep) out.batch_means.push_back(qsum[std::size_t(b)] / cnt);
    }
    outs.push_back(std::move(out));
  }
  return outs;
}

AveragedTransfer averaged_t_matrix(const GridSampler& sampler, int N, int p, long samples,
                                   std::uint64_t seed, const McPolicy& policy) {
  return std::move(
      averaged_t_matrix_multi(sampler, N, {p}, samples, seed, policy).front());
}

ScalarStat averaged_transfer_trace(const GridSampler& sampler, int p, long samples,
                                   std::uint64_t seed, const McPolicy& policy) {
  return mc_scalar(
      [&sampler, p](RngStream& st) {
        const VectorGrid g = sampler(st);
        return transfer_trace(g, p);
      },
      samples, seed, policy);
}

// ----------------------------------------------------------------------------
// moment series
// ----------------------------------------------------------------------------

const MomentEntry& MomentSeries::at(int p, int r) const {
  for (const auto& e : entries)
    if (e.p == p && e.r == r) return e;
  throw invalid_input("MomentSeries::at: no entry for requested (p, r)");
}

namespace {

// Leave-one-batch-out jackknife over per-batch totals theta_b.
double jackknife_se(const std::vector<double>& theta) {
  const int nb = int(theta.size());
  if (nb < 2) return std::numeric_limits<double>::quiet_NaN();
  Kahan mean_acc;
  for (double t : theta) mean_acc.add(t);
  const double mean = mean_acc.sum / nb;
  Kahan dev;
  for (double t : theta) dev.add((t - mean) * (t - mean));
  return std::sqrt(dev.sum * double(nb - 1) / double(nb));
}

}  // namespace

MomentSeries truncated_moments_series(const AveragedTransfer& avg, int r_max) {
  if (r_max < 1) throw invalid_input("truncated_moments_series: r_max must be >= 1");
  MomentSeries series;
  series.label = "transfer";
  series.N = avg.N;
  series.seed = avg.seed;
  const int nb = int(avg.batch_counts.size());
  const double m = double(avg.samples);
  Kahan trace_tot_acc;
  for (int b = 0; b < nb; ++b)
    trace_tot_acc.add(avg.batch_trace_means[b] * double(avg.batch_counts[b]));
  const double trace_total = trace_tot_acc.sum;
  const bool have_batches = !avg.batch_means.empty();

  CMatrix power = avg.mean;
  for (int r = 1; r <= r_max; ++r) {
    if (r > 1) power = power * avg.mean;
    MomentEntry e;
    e.p = avg.p;
    e.r = r;
    e.samples = avg.samples;
    e.estimate = power.trace().real();
    if (r == 1) {
      std::vector<double> theta(nb);
      for (int b = 0; b < nb; ++b) {
        const double cnt = double(avg.batch_counts[b]);
        theta[b] = (trace_total - avg.batch_trace_means[b] * cnt) / (m - cnt);
      }
      e.stderr_ = jackknife_se(theta);
    } else if (have_batches) {
      std::vector<double> theta(nb);
      for (int b = 0; b < nb; ++b) {
        const double cnt = double(avg.batch_counts[b]);
        const CMatrix loo = (avg.mean * m - avg.batch_means[b] * cnt) / (m - cnt);
        CMatrix lp = loo;
        for (int rr = 2; rr <= r; ++rr) lp = lp * loo;
        theta[b] = lp.trace().real();
      }
      e.stderr_ = jackknife_se(theta);
    } else {
      e.stderr_ = std::numeric_limits<double>::quiet_NaN();
    }
    series.entries.push_back(e);
  }
  return series;
}

// ----------------------------------------------------------------------------
// Gram pipeline
// ----------------------------------------------------------------------------

namespace {

// g_i x g_j^* vectorized, for every cell (i, j), using the basis vectorization.
std::vector<CVector> conjugated_cells(const OrthonormalUnitaryBasis& basis,
                                      const CMatrix& x) {
  const int N = basis.model_dim();
  std::vector<CMatrix> gx(N);
  for (int i = 0; i < N; ++i) gx[i] = basis.members[i] * x;
  std::vector<CVector> cells;
  cells.reserve(std::size_t(N) * N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      cells.push_back(algebra_vectorize(basis, gx[i] * basis.members[j].adjoint()));
  return cells;
}

void gram_rec(const std::vector<CMatrix>& tables, int N, int r, int level, int i_first,
              int j_first, int i_prev, int j_prev, long row, long col, cxd prod,
              CMatrix& gmat) {
  if (level == r) {
    gmat(row, col) = prod * tables[std::size_t(r - 1)](i_prev * N + i_first, j_prev * N + j_first);
    return;
  }
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      gram_rec(tables, N, r, level + 1, i_first, j_first, i, j, row * N + i, col * N + j,
               prod * tables[std::size_t(level - 1)](i_prev * N + i, j_prev * N + j), gmat);
}

}  // namespace

MomentSeries gram_model_moments(const OrthonormalUnitaryBasis& basis, int r, int p_max,
                                long samples, std::uint64_t seed, const McPolicy& policy) {
  if (r < 1) throw invalid_input("gram_model_moments: r must be >= 1");
  if (p_max < 1) throw invalid_input("gram_model_moments: p_max must be >= 1");
  const int N = basis.model_dim();
  const long dim_g = ipow_guarded(N, r, 4096, "gram_model_moments");
  const auto fn = [&basis, r, p_max, N, dim_g](RngStream& st, RVector& out) {
    CMatrix gmat(dim_g, dim_g);
    if (r == 1) {
      const CMatrix x = haar_algebra_unitary(basis, st);
      std::vector<CVector> diag(N);
      for (int i = 0; i < N; ++i)
        diag[i] = algebra_vectorize(
            basis, basis.members[i] * x * basis.members[i].adjoint());
      for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) gmat(i, j) = inner(diag[i], diag[j]);
    } else {
      // tables[t]((i,i'),(j,j')) = <cell_t(i,i'), cell_t(j,j')>; the Gram entry
      // at (ivec, jvec) is the cyclic product of table lookups.
      std::vector<CMatrix> tables(r);
      for (int t = 0; t < r; ++t) {
        const CMatrix x = haar_algebra_unitary(basis, st);
        const auto cells = conjugated_cells(basis, x);
        tables[t].resize(N * N, N * N);
        for (int q1 = 0; q1 < N * N; ++q1)
          for (int q2 = 0; q2 < N * N; ++q2)
            tables[t](q1, q2) = inner(cells[q1], cells[q2]);
      }
      for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
          gram_rec(tables, N, r, 1, i, j, i, j, i, j, cxd(1.0, 0.0), gmat);
    }
    CMatrix power = gmat;
    out[0] = power.trace().real() / double(dim_g);
    for (int p = 2; p <= p_max; ++p) {
      power = power * gmat;
      out[p - 1] = power.trace().real() / double(dim_g);
    }
  };
  const VectorStat stat = mc_vector(fn, p_max, samples, seed, policy);
  MomentSeries series;
  series.label = "gram";
  series.N = N;
  series.seed = seed;
  for (int p = 1; p <= p_max; ++p) {
    MomentEntry e;
    e.p = p;
    e.r = r;
    e.estimate = stat.estimate[p - 1];
    e.stderr_ = stat.stderr_[p - 1];
    e.samples = samples;
    series.entries.push_back(e);
  }
  return series;
}

// ----------------------------------------------------------------------------
// diagonal pipeline
// ----------------------------------------------------------------------------

namespace {

void lambda_rec(const std::vector<std::vector<CMatrix>>& factors, int r, int level,
                const CMatrix& prefix, int p_max, std::vector<Kahan>& acc) {
  const auto& layer = factors[std::size_t(level)];
  for (const CMatrix& a : layer) {
    const CMatrix next = prefix * a;
    if (level + 1 == r) {
      const double lam = std::norm(next.trace());
      double w = lam;
      for (int p = 0; p < p_max; ++p) {
        acc[std::size_t(p)].add(w);
        w *= lam;
      }
    } else {
      lambda_rec(factors, r, level + 1, next, p_max, acc);
    }
  }
}

}  // namespace

MomentSeries weyl_lambda_moments(const FiniteAbelianGroup& h, int r, int p_max, long samples,
                                 std::uint64_t seed, const McPolicy& policy) {
  if (r < 1) throw invalid_input("weyl_lambda_moments: r must be >= 1");
  if (p_max < 1) throw invalid_input("weyl_lambda_moments: p_max must be >= 1");
  const int n = int(h.order());
  const long diag_dim = ipow_guarded(n * n, r, 1L << 16, "weyl_lambda_moments");
  const OrthonormalUnitaryBasis basis = weyl_basis(h);
  const double norm = double(diag_dim);
  const auto fn = [&basis, r, p_max, n, norm](RngStream& st, RVector& out) {
    std::vector<std::vector<CMatrix>> factors(static_cast<std::size_t>(r));
    for (int t = 0; t < r; ++t) {
      const CMatrix x = haar_unitary(n, st);
      factors[std::size_t(t)].reserve(basis.members.size());
      for (const CMatrix& w : basis.members) factors[std::size_t(t)].push_back(w * x);
    }
    std::vector<Kahan> acc(static_cast<std::size_t>(p_max));
    lambda_rec(factors, r, 0, CMatrix::Identity(n, n), p_max, acc);
    for (int p = 0; p < p_max; ++p) out[p] = acc[std::size_t(p)].sum / norm;
  };
  const VectorStat stat = mc_vector(fn, p_max, samples, seed, policy);
  MomentSeries series;
  series.label = "weyl-diag";
  series.N = n * n;
  series.seed = seed;
  for (int p = 1; p <= p_max; ++p) {
    MomentEntry e;
    e.p = p;
    e.r = r;
    e.estimate = stat.estimate[p - 1];
    e.stderr_ = stat.stderr_[p - 1];
    e.samples = samples;
    series.entries.push_back(e);
  }
  return series;
}

MomentSeries char_square_moments(int n, int p_max, long samples, std::uint64_t seed,
                                 const McPolicy& policy) {
  if (n < 1) throw invalid_input("char_square_moments: n must be >= 1");
  if (p_max < 1) throw invalid_input("char_square_moments: p_max must be >= 1");
  const auto fn = [n, p_max](RngStream& st, RVector& out) {
    const CMatrix x = haar_unitary(n, st);
    const double v = std::norm(x.trace());
    double w = v;
    for (int p = 0; p < p_max; ++p) {
      out[p] = w;
      w *= v;
    }
  };
  const VectorStat stat = mc_vector(fn, p_max, samples, seed, policy);
  MomentSeries series;
  series.label = "char-square";
  series.N = n;
  series.seed = seed;
  for (int p = 1; p <= p_max; ++p) {
    MomentEntry e;
    e.p = p;
    e.r = 0;
    e.estimate = stat.estimate[p - 1];
    e.stderr_ = stat.stderr_[p - 1];
    e.samples = samples;
    series.entries.push_back(e);
  }
  return series;
}

// ----------------------------------------------------------------------------
// exact references
// ----------------------------------------------------------------------------

long lis_moment(int n, int p) {
  if (n < 1) throw invalid_input("lis_moment: n must be >= 1");
  if (p < 1 || p > 10) throw resource_limit("lis_moment: p out of range [1, 10]");
  std::vector<int> perm(static_cast<std::size_t>(p));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> tails;
  tails.reserve(std::size_t(p));
  long count = 0;
  do {
    tails.clear();
    for (int v : perm) {
      auto it = std::lower_bound(tails.begin(), tails.end(), v);
      if (it == tails.end())
        tails.push_back(v);
      else
        *it = v;
    }
    if (int(tails.size()) <= n) ++count;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return count;
}

unsigned long long catalan(int p) {
  if (p < 0 || p > 30) throw resource_limit("catalan: p out of range [0, 30]");
  unsigned long long c = 1;
  for (int k = 0; k < p; ++k) c = c * 2ULL * (2ULL * k + 1ULL) / (k + 2ULL);
  return c;
}

// ----------------------------------------------------------------------------
// partitions and flatness
// ----------------------------------------------------------------------------

Partition Partition::singletons(int p) {
  Partition pi;
  pi.p = p;
  for (int t = 0; t < p; ++t) pi.blocks.push_back({t});
  return pi;
}

Partition Partition::one_block(int p) {
  Partition pi;
  pi.p = p;
  pi.blocks.emplace_back();
  for (int t = 0; t < p; ++t) pi.blocks.back().push_back(t);
  return pi;
}

void Partition::validate() const {
  if (p < 1) throw invalid_input("Partition: p must be >= 1");
  std::vector<int> seen(std::size_t(p), 0);
  for (const auto& blk : blocks) {
    if (blk.empty()) throw invalid_input("Partition: empty block");
    for (int t : blk) {
      if (t < 0 || t >= p) throw invalid_input("Partition: position out of range");
      if (seen[std::size_t(t)]++) throw invalid_input("Partition: repeated position");
    }
  }
  for (int t = 0; t < p; ++t)
    if (!seen[std::size_t(t)]) throw invalid_input("Partition: uncovered position");
}

bool Partition::is_noncrossing() const {
  validate();
  std::vector<int> block_of(static_cast<std::size_t>(p));
  for (int b = 0; b < int(blocks.size()); ++b)
    for (int t : blocks[std::size_t(b)]) block_of[std::size_t(t)] = b;
  // a < b < c < d with block(a) = block(c) != block(b) = block(d) is a crossing
  for (int a = 0; a < p; ++a)
    for (int b = a + 1; b < p; ++b)
      for (int c = b + 1; c < p; ++c)
        for (int d = c + 1; d < p; ++d)
          if (block_of[a] == block_of[c] && block_of[b] == block_of[d] &&
              block_of[a] != block_of[b])
            return false;
  return true;
}

PartitionVector xi_partition(int N, const Partition& pi) {
  if (N < 1) throw invalid_input("xi_partition: N must be >= 1");
  pi.validate();
  const long rows = ipow_guarded(N, pi.p, kTensorRowCap, "xi_partition");
  PartitionVector out;
  out.N = N;
  out.p = pi.p;
  out.v = RVector::Zero(rows);
  std::vector<int> digits(static_cast<std::size_t>(pi.p));
  for (long idx = 0; idx < rows; ++idx) {
    long rem = idx;
    for (int t = pi.p - 1; t >= 0; --t) {
      digits[std::size_t(t)] = int(rem % N);
      rem /= N;
    }
    bool ok = true;
    for (const auto& blk : pi.blocks) {
      const int v0 = digits[std::size_t(blk.front())];
      for (int t : blk)
        if (digits[std::size_t(t)] != v0) {
          ok = false;
          break;
        }
      if (!ok) break;
    }
    if (ok) out.v[idx] = 1.0;
  }
  return out;
}

namespace {

void fp_rec(const std::vector<CMatrix>& col_tables, int N, int p, int level, int i_first,
            int i_prev, const std::vector<cxd>& w, Kahan& acc) {
  if (level == p) {
    cxd z(0.0, 0.0);
    for (int j = 0; j < N; ++j) z += w[std::size_t(j)] * col_tables[std::size_t(j)](i_prev, i_first);
    acc.add(std::norm(z));
    return;
  }
  std::vector<cxd> next(static_cast<std::size_t>(N));
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < N; ++j)
      next[std::size_t(j)] = w[std::size_t(j)] * col_tables[std::size_t(j)](i_prev, i);
    fp_rec(col_tables, N, p, level + 1, i_first, i, next, acc);
  }
}

}  // namespace

double f_p(const VectorGrid& g, int p) {
  if (p < 1) throw invalid_input("f_p: p must be >= 1");
  check_grid_shape(g);
  const int N = g.N;
  ipow_guarded(N, p, 1L << 22, "f_p");
  std::vector<CMatrix> col_tables(static_cast<std::size_t>(N));
  for (int j = 0; j < N; ++j) {
    col_tables[std::size_t(j)].resize(N, N);
    for (int a = 0; a < N; ++a)
      for (int b = 0; b < N; ++b) col_tables[std::size_t(j)](a, b) = inner(g.at(a, j), g.at(b, j));
  }
  Kahan acc;
  const std::vector<cxd> ones(std::size_t(N), cxd(1.0, 0.0));
  for (int i = 0; i < N; ++i) fp_rec(col_tables, N, p, 1, i, i, ones, acc);
  return acc.sum / (double(N) * N * N);
}

EigenvectorReport eigenvector_checks(const VectorGrid& g, int p, double tol) {
  const MomentTransferMatrix t = t_matrix(g, p);
  const long rows = t.m.rows();
  EigenvectorReport rep;
  rep.N = g.N;
  rep.p = p;
  rep.row_defect = grid_row_defect(g);
  rep.col_defect = grid_col_defect(g);
  rep.rows_orthonormal = rep.row_defect <= tol;
  rep.cols_orthonormal = rep.col_defect <= tol;
  const CVector xi_all = xi_partition(g.N, Partition::singletons(p)).v.cast<cxd>();
  const CVector xi_one = xi_partition(g.N, Partition::one_block(p)).v.cast<cxd>();
  const CVector t_all = t.m * xi_all;
  const CVector t_one = t.m * xi_one;
  rep.res_allones = (t_all - xi_all).norm();
  rep.res_allones_adjoint = (t.m.adjoint() * xi_all - xi_all).norm();
  rep.res_oneblock = (t_one - xi_one).norm();
  rep.res_oneblock_adjoint = (t.m.adjoint() * xi_one - xi_one).norm();
  double npow = 1.0;
  for (int k = 0; k < p; ++k) npow *= g.N;
  (void)rows;
  rep.pairing_allones_dev = std::abs(inner(t_all, xi_all) - cxd(npow, 0.0));
  rep.pairing_oneblock_dev = std::abs(inner(t_one, xi_one) - cxd(double(g.N), 0.0));
  return rep;
}

}  // namespace qpm
