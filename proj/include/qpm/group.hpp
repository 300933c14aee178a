#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "qpm/linalg.hpp"

namespace qpm {

// ============================================================================
// Finite abelian groups Z_{n_1} x ... x Z_{n_k}. Elements travel as flat
// indices in [0, order) under row-major (first factor outermost) flattening;
// GroupElement is the residue-vector view.
// ============================================================================

struct GroupElement {
  std::vector<int> r;
};

class FiniteAbelianGroup {
 public:
  explicit FiniteAbelianGroup(std::vector<int> orders);

  const std::vector<int>& orders() const { return orders_; }
  int order() const { return order_; }

  GroupElement element(int index) const;
  int index(const GroupElement& g) const;

  int add(int a, int b) const;
  int neg(int a) const;
  int zero() const { return 0; }

 private:
  std::vector<int> orders_;
  int order_ = 1;
};

// "Z2", "Z3", "Z2xZ2" (case-insensitive, 'x'-separated). Malformed input
// raises invalid_input.
FiniteAbelianGroup parse_group(const std::string& text);

// Dual pairing <i, a> = exp(2*pi*I * sum_j i_j a_j / n_j). The dual group is
// identified with H itself through this pairing. Phases whose reduced
// denominator is 1, 2, or 4 are returned exactly (+-1, +-I), which makes the
// Z2/Z4 constructions bit-reproducible.
cxd pairing(const FiniteAbelianGroup& h, int i, int a);

// ============================================================================
// Generic finite group multiplication tables (for cocycle checks and twisted
// regular representations; abelian groups embed via table_of).
// ============================================================================

struct FiniteGroupTable {
  int n = 0;
  std::vector<int> mul;  // n*n, row-major: mul[g*n + h] = g.h
  int identity = 0;
  std::vector<int> inv;

  int times(int g, int h) const { return mul[g * n + h]; }
  // Checks closure, associativity, identity, inverses; throws invalid_input.
  void validate() const;
};

FiniteGroupTable table_of(const FiniteAbelianGroup& h);

// 2-cocycle on a finite group, stored densely.
struct Cocycle {
  FiniteGroupTable group;
  CMatrix table;  // |G| x |G|

  cxd sigma(int g, int h) const { return table(g, h); }
};

// The bicharacter cocycle on G = H x H^ (dual identified with H):
// sigma((i,a),(j,b)) = <i,b>. Flattening: (i,a) -> i*|H| + a.
Cocycle standard_cocycle(const FiniteAbelianGroup& h);

// Max deviation from the cocycle identity
//   sigma(gh,k) sigma(g,h) = sigma(g,hk) sigma(h,k)
// and the normalization sigma(g,1) = sigma(1,g) = 1, over all triples.
double cocycle_check(const Cocycle& c);

// ============================================================================
// Weyl matrices and friends
// ============================================================================

// W_{kc}: e_i -> <k,i> e_{i+c}, i.e. W[(i+c), i] = <k,i>, on C^{|H|}.
CMatrix weyl_matrix(const FiniteAbelianGroup& h, int k, int c);

// Families of unitaries, pairwise orthonormal under the normalized trace
// (1/n) Tr(a b*). Two realizations are used:
//   matrix   - members span all of M_n (n^2 members), model dimension n^2;
//   diagonal - members are diagonal n x n unitaries spanning a copy of C^n
//              (n members), model dimension n.
struct OrthonormalUnitaryBasis {
  enum class Algebra { matrix, diagonal };

  Algebra kind = Algebra::matrix;
  int n = 0;                      // matrix dimension of the members
  std::vector<CMatrix> members;
  std::vector<std::array<int, 2>> labels;  // construction labels, e.g. (k,c)

  // Dimension of the vectorized model space (= number of members).
  int model_dim() const;
  // Member `i` as a unit vector in C^{model_dim()} under the pinned pairing.
  CVector vectorized(int i) const;
};

// max |(1/n) tr(m_a m_b*) - delta_ab| over all member pairs.
double basis_orthonormality_defect(const OrthonormalUnitaryBasis& b);

// All W_{kc}, (k,c) in H x H, labels (k,c), flat order k*|H| + c.
OrthonormalUnitaryBasis weyl_basis(const FiniteAbelianGroup& h);

// The matrix-units image of the standard-cocycle group element g_{ia}:
// phi(g_{ia}) = sum_k <k,a> E_{k, k+i}. Satisfies
//   phi(g_{ia}) phi(g_{jb}) = <i,b> phi(g_{i+j, a+b})
//   phi(g_{ia})* = <i,a> phi(g_{-i,-a})
// and phi(g_{ia}) = <-i,a> W_{a,-i} entrywise.
CMatrix phi_iso(const FiniteAbelianGroup& h, int i, int a);

// All phi(g_{ia}) as a matrix-kind family on C^{|H|} (n^2 members, labels
// (i,a)): the n x n realization of the standard-cocycle twisted group algebra.
OrthonormalUnitaryBasis phi_basis(const FiniteAbelianGroup& h);

// sigma-twisted left regular representation: lambda(g) e_h = sigma(g,h) e_{gh}.
CMatrix twisted_regular_rep(const Cocycle& c, int g);

// All lambda(g) as a matrix-kind family on C^{|G|}; orthonormal under the
// normalized trace for any cocycle (the diagonal of lambda(g) vanishes for
// g != 1). Spans M_n only for nondegenerate cocycles such as standard_cocycle.
OrthonormalUnitaryBasis twisted_regular_basis(const Cocycle& c);

// F(i,j) = <i,j>: unimodular entries, F F* = |H| I (a complex Hadamard
// matrix). Z2 gives [[1,1],[1,-1]]; products give Kronecker products.
CMatrix fourier_matrix(const FiniteAbelianGroup& h);

// Diagonal-kind basis whose members are diag(row_i of fourier_matrix):
// a realization of the group algebra of H as diagonal unitaries.
OrthonormalUnitaryBasis fourier_diagonal_basis(const FiniteAbelianGroup& h);

// ============================================================================
// Latin squares
// ============================================================================

struct LatinSquare {
  int N = 0;
  std::vector<int> cells;  // row-major, values 0..N-1

  int at(int i, int j) const { return cells[i * N + j]; }
};

// Throws invalid_input unless every row and column is a permutation of 0..N-1.
void validate_latin(const LatinSquare& l);

// Cayley table as a Latin square: L_{ij} = i + j for abelian groups,
// L_{ij} = i.j for general tables (0-indexed labels).
LatinSquare latin_square_of_group(const FiniteAbelianGroup& h);
LatinSquare latin_square_of_group(const FiniteGroupTable& t);

struct GeneratedPermutationGroup {
  long order = 0;
  std::vector<std::vector<int>> elements;  // sorted one-line permutations
};

// Closure of the square's rows (as permutations j -> L_{ij}) under
// composition. `max_order` caps the enumeration (resource_limit beyond it).
GeneratedPermutationGroup latin_square_group(const LatinSquare& l, long max_order = 1000000);

}  // namespace qpm
