#include "qpm/group.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <queue>
#include <set>

namespace qpm {

// ============================================================================
// FiniteAbelianGroup
// ============================================================================

FiniteAbelianGroup::FiniteAbelianGroup(std::vector<int> orders) : orders_(std::move(orders)) {
  if (orders_.empty()) throw invalid_input("group: at least one cyclic factor required");
  long long prod = 1;
  for (int n : orders_) {
    if (n < 1) throw invalid_input("group: cyclic orders must be >= 1");
    prod *= n;
    if (prod > (1ll << 30)) throw resource_limit("group: order too large");
  }
  order_ = static_cast<int>(prod);
}

GroupElement FiniteAbelianGroup::element(int index) const {
  if (index < 0 || index >= order_) throw invalid_input("group: element index out of range");
  GroupElement g;
  g.r.resize(orders_.size());
  int rest = index;
  for (int j = static_cast<int>(orders_.size()) - 1; j >= 0; --j) {
    g.r[j] = rest % orders_[j];
    rest /= orders_[j];
  }
  return g;
}

int FiniteAbelianGroup::index(const GroupElement& g) const {
  if (g.r.size() != orders_.size()) throw invalid_input("group: residue count mismatch");
  long long idx = 0;
  for (size_t j = 0; j < orders_.size(); ++j) {
    int r = g.r[j] % orders_[j];
    if (r < 0) r += orders_[j];
    idx = idx * orders_[j] + r;
  }
  return static_cast<int>(idx);
}

int FiniteAbelianGroup::add(int a, int b) const {
  GroupElement ga = element(a), gb = element(b);
  for (size_t j = 0; j < orders_.size(); ++j) ga.r[j] = (ga.r[j] + gb.r[j]) % orders_[j];
  return index(ga);
}

int FiniteAbelianGroup::neg(int a) const {
  GroupElement g = element(a);
  for (size_t j = 0; j < orders_.size(); ++j) g.r[j] = (orders_[j] - g.r[j]) % orders_[j];
  return index(g);
}

FiniteAbelianGroup parse_group(const std::string& text) {
  std::vector<int> orders;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t next = std::min(text.size(), std::min(text.find('x', pos), text.find('X', pos)));
    std::string tok = text.substr(pos, next - pos);
    if (tok.size() < 2 || (tok[0] != 'Z' && tok[0] != 'z'))
      throw invalid_input("group spec: expected tokens like Z2, Z3, Z2xZ2; got '" + text + "'");
    int n = 0;
    for (size_t i = 1; i < tok.size(); ++i) {
      if (!std::isdigit(static_cast<unsigned char>(tok[i])))
        throw invalid_input("group spec: bad cyclic order in '" + text + "'");
      n = n * 10 + (tok[i] - '0');
      if (n > 100000) throw invalid_input("group spec: cyclic order too large");
    }
    if (n < 1) throw invalid_input("group spec: cyclic order must be >= 1");
    orders.push_back(n);
    if (next == text.size()) break;
    pos = next + 1;
  }
  return FiniteAbelianGroup(orders);
}

// ============================================================================
// Pairing (exact on denominators 1, 2, 4)
// ============================================================================

cxd pairing(const FiniteAbelianGroup& h, int i, int a) {
  const GroupElement gi = h.element(i), ga = h.element(a);
  long long lcm = 1;
  for (int n : h.orders()) lcm = std::lcm(lcm, static_cast<long long>(n));
  long long num = 0;
  for (size_t j = 0; j < h.orders().size(); ++j) {
    const long long nj = h.orders()[j];
    const long long t = (static_cast<long long>(gi.r[j]) * ga.r[j]) % nj;
    num = (num + t * (lcm / nj)) % lcm;
  }
  const long long g = std::gcd(num, lcm);
  const long long rn = (g > 0) ? num / g : 0;
  const long long rd = (g > 0) ? lcm / g : 1;
  // Exact roots of unity for the small denominators that the Z2/Z4 models hit.
  if (rd == 1) return cxd(1.0, 0.0);
  if (rd == 2) return cxd(-1.0, 0.0);
  if (rd == 4) return (rn == 1) ? cxd(0.0, 1.0) : cxd(0.0, -1.0);
  const double ang = 2.0 * M_PI * static_cast<double>(num) / static_cast<double>(lcm);
  return cxd(std::cos(ang), std::sin(ang));
}

// ============================================================================
// Multiplication tables and cocycles
// ============================================================================

void FiniteGroupTable::validate() const {
  if (n < 1 || static_cast<int>(mul.size()) != n * n || static_cast<int>(inv.size()) != n)
    throw invalid_input("group table: malformed");
  for (int v : mul)
    if (v < 0 || v >= n) throw invalid_input("group table: entry out of range");
  for (int g = 0; g < n; ++g)
    if (times(identity, g) != g || times(g, identity) != g)
      throw invalid_input("group table: identity fails");
  for (int g = 0; g < n; ++g)
    if (times(g, inv[g]) != identity || times(inv[g], g) != identity)
      throw invalid_input("group table: inverses fail");
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        if (times(times(a, b), c) != times(a, times(b, c)))
          throw invalid_input("group table: associativity fails");
}

FiniteGroupTable table_of(const FiniteAbelianGroup& h) {
  FiniteGroupTable t;
  t.n = h.order();
  if (static_cast<long long>(t.n) * t.n > (1ll << 24))
    throw resource_limit("group table: order too large for a dense table");
  t.mul.resize(t.n * t.n);
  t.inv.resize(t.n);
  t.identity = 0;
  for (int a = 0; a < t.n; ++a) {
    t.inv[a] = h.neg(a);
    for (int b = 0; b < t.n; ++b) t.mul[a * t.n + b] = h.add(a, b);
  }
  return t;
}

Cocycle standard_cocycle(const FiniteAbelianGroup& h) {
  std::vector<int> dorders = h.orders();
  dorders.insert(dorders.end(), h.orders().begin(), h.orders().end());
  FiniteAbelianGroup g(dorders);  // flat index (i,a) -> i*|H| + a
  Cocycle c;
  c.group = table_of(g);
  const int nh = h.order();
  const int ng = g.order();
  c.table = CMatrix(ng, ng);
  for (int x = 0; x < ng; ++x) {
    const int i = x / nh;
    for (int y = 0; y < ng; ++y) {
      const int b = y % nh;
      c.table(x, y) = pairing(h, i, b);
    }
  }
  return c;
}

double cocycle_check(const Cocycle& c) {
  const int n = c.group.n;
  if (c.table.rows() != n || c.table.cols() != n) throw invalid_input("cocycle: table shape mismatch");
  double worst = 0.0;
  const int e = c.group.identity;
  for (int g = 0; g < n; ++g) {
    worst = std::max(worst, std::abs(c.sigma(g, e) - cxd(1.0, 0.0)));
    worst = std::max(worst, std::abs(c.sigma(e, g) - cxd(1.0, 0.0)));
  }
  for (int g = 0; g < n; ++g)
    for (int h = 0; h < n; ++h) {
      const int gh = c.group.times(g, h);
      const cxd left_base = c.sigma(g, h);
      for (int k = 0; k < n; ++k) {
        const cxd lhs = c.sigma(gh, k) * left_base;
        const cxd rhs = c.sigma(g, c.group.times(h, k)) * c.sigma(h, k);
        worst = std::max(worst, std::abs(lhs - rhs));
      }
    }
  return worst;
}

// ============================================================================
// Weyl matrices, phi, regular representations, Fourier
// ============================================================================

CMatrix weyl_matrix(const FiniteAbelianGroup& h, int k, int c) {
  const int n = h.order();
  CMatrix w = CMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i) w(h.add(i, c), i) = pairing(h, k, i);
  return w;
}

int OrthonormalUnitaryBasis::model_dim() const {
  return kind == Algebra::matrix ? n * n : n;
}

CVector OrthonormalUnitaryBasis::vectorized(int i) const {
  if (i < 0 || i >= static_cast<int>(members.size()))
    throw invalid_input("basis: member index out of range");
  if (kind == Algebra::matrix) return vectorize_matrix(members[i]);
  return members[i].diagonal() / std::sqrt(static_cast<double>(n));
}

double basis_orthonormality_defect(const OrthonormalUnitaryBasis& b) {
  const int m = static_cast<int>(b.members.size());
  double worst = 0.0;
  for (int x = 0; x < m; ++x)
    for (int y = 0; y < m; ++y) {
      const cxd v = inner_tr(b.members[x], b.members[y]);
      worst = std::max(worst, std::abs(v - (x == y ? cxd(1, 0) : cxd(0, 0))));
    }
  return worst;
}

OrthonormalUnitaryBasis weyl_basis(const FiniteAbelianGroup& h) {
  const int n = h.order();
  OrthonormalUnitaryBasis b;
  b.kind = OrthonormalUnitaryBasis::Algebra::matrix;
  b.n = n;
  b.members.reserve(n * n);
  b.labels.reserve(n * n);
  for (int k = 0; k < n; ++k)
    for (int c = 0; c < n; ++c) {
      b.members.push_back(weyl_matrix(h, k, c));
      b.labels.push_back({k, c});
    }
  return b;
}

CMatrix phi_iso(const FiniteAbelianGroup& h, int i, int a) {
  const int n = h.order();
  CMatrix m = CMatrix::Zero(n, n);
  for (int k = 0; k < n; ++k) m(k, h.add(k, i)) = pairing(h, k, a);
  return m;
}

OrthonormalUnitaryBasis phi_basis(const FiniteAbelianGroup& h) {
  const int n = h.order();
  OrthonormalUnitaryBasis b;
  b.kind = OrthonormalUnitaryBasis::Algebra::matrix;
  b.n = n;
  b.members.reserve(n * n);
  b.labels.reserve(n * n);
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < n; ++a) {
      b.members.push_back(phi_iso(h, i, a));
      b.labels.push_back({i, a});
    }
  return b;
}

CMatrix twisted_regular_rep(const Cocycle& c, int g) {
  const int n = c.group.n;
  if (g < 0 || g >= n) throw invalid_input("regular rep: element out of range");
  CMatrix m = CMatrix::Zero(n, n);
  for (int h = 0; h < n; ++h) m(c.group.times(g, h), h) = c.sigma(g, h);
  return m;
}

OrthonormalUnitaryBasis twisted_regular_basis(const Cocycle& c) {
  OrthonormalUnitaryBasis b;
  b.kind = OrthonormalUnitaryBasis::Algebra::matrix;
  b.n = c.group.n;
  b.members.reserve(b.n);
  b.labels.reserve(b.n);
  for (int g = 0; g < b.n; ++g) {
    b.members.push_back(twisted_regular_rep(c, g));
    b.labels.push_back({g, 0});
  }
  return b;
}

CMatrix fourier_matrix(const FiniteAbelianGroup& h) {
  const int n = h.order();
  CMatrix f(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) f(i, j) = pairing(h, i, j);
  return f;
}

OrthonormalUnitaryBasis fourier_diagonal_basis(const FiniteAbelianGroup& h) {
  const CMatrix f = fourier_matrix(h);
  const int n = h.order();
  OrthonormalUnitaryBasis b;
  b.kind = OrthonormalUnitaryBasis::Algebra::diagonal;
  b.n = n;
  for (int i = 0; i < n; ++i) {
    b.members.push_back(CMatrix(f.row(i).asDiagonal()));
    b.labels.push_back({i, 0});
  }
  return b;
}

// ============================================================================
// Latin squares
// ============================================================================

void validate_latin(const LatinSquare& l) {
  const int n = l.N;
  if (n < 1 || static_cast<int>(l.cells.size()) != n * n)
    throw invalid_input("latin square: malformed");
  std::vector<bool> seen(n);
  for (int i = 0; i < n; ++i) {
    std::fill(seen.begin(), seen.end(), false);
    for (int j = 0; j < n; ++j) {
      const int v = l.at(i, j);
      if (v < 0 || v >= n || seen[v]) throw invalid_input("latin square: row is not a permutation");
      seen[v] = true;
    }
  }
  for (int j = 0; j < n; ++j) {
    std::fill(seen.begin(), seen.end(), false);
    for (int i = 0; i < n; ++i) {
      const int v = l.at(i, j);
      if (seen[v]) throw invalid_input("latin square: column is not a permutation");
      seen[v] = true;
    }
  }
}

LatinSquare latin_square_of_group(const FiniteAbelianGroup& h) {
  LatinSquare l;
  l.N = h.order();
  l.cells.resize(l.N * l.N);
  for (int i = 0; i < l.N; ++i)
    for (int j = 0; j < l.N; ++j) l.cells[i * l.N + j] = h.add(i, j);
  return l;
}

LatinSquare latin_square_of_group(const FiniteGroupTable& t) {
  LatinSquare l;
  l.N = t.n;
  l.cells = t.mul;
  validate_latin(l);
  return l;
}

GeneratedPermutationGroup latin_square_group(const LatinSquare& l, long max_order) {
  validate_latin(l);
  const int n = l.N;
  std::vector<std::vector<int>> gens;
  for (int i = 0; i < n; ++i) {
    std::vector<int> row(n);
    for (int j = 0; j < n; ++j) row[j] = l.at(i, j);
    gens.push_back(std::move(row));
  }
  std::set<std::vector<int>> closed(gens.begin(), gens.end());
  std::queue<std::vector<int>> work;
  for (const auto& g : gens) work.push(g);
  std::vector<int> comp(n);
  while (!work.empty()) {
    const std::vector<int> cur = std::move(work.front());
    work.pop();
    for (const auto& g : gens) {
      for (int j = 0; j < n; ++j) comp[j] = cur[g[j]];
      if (closed.insert(comp).second) {
        if (static_cast<long>(closed.size()) > max_order)
          throw resource_limit("latin square group: closure exceeds the enumeration cap");
        work.push(comp);
      }
    }
  }
  GeneratedPermutationGroup out;
  out.order = static_cast<long>(closed.size());
  out.elements.assign(closed.begin(), closed.end());
  return out;
}

}  // namespace qpm
