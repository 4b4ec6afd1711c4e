#pragma once

#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "vnpair/numkernel.hpp"

namespace vnpair {

// Unital *-subalgebra of n x n matrices, held as an orthonormal (Hilbert-Schmidt) basis of its span.
class VnAlgebra {
 public:
  VnAlgebra() = default;
  // Trusted constructor: the basis must already be orthonormal.
  static VnAlgebra from_orthonormal_basis(std::size_t n, std::vector<CMatrix> basis);

  std::size_t ambient_dim() const;
  std::size_t dim() const;
  const std::vector<CMatrix>& basis() const;
  const CMatrix& basis_element(std::size_t k) const { return basis()[k]; }

  // <b_k, x> for every basis element
  std::vector<cd> coefficients(const CMatrix& x) const;
  CMatrix combine(const std::vector<cd>& coeffs) const;
  CMatrix project(const CMatrix& x) const;
  // ||x - project(x)||_F / max(1, ||x||_F)
  double span_residual(const CMatrix& x) const;

  struct Validation {
    double unital = 0.0;
    double star = 0.0;
    double product = 0.0;
    double worst() const { return std::max({unital, star, product}); }
  };
  Validation validate() const;

  // exact structural equality (same basis entries); see equals() for span equality
  bool operator==(const VnAlgebra& o) const;

 struct Impl;

 private:
  std::shared_ptr<const Impl> impl_;
};

using BlockList = std::vector<std::pair<std::size_t, std::size_t>>;  // (irrep dim, multiplicity)

struct BlockSignature {
  std::vector<std::pair<std::size_t, std::size_t>> blocks;  // (irrep dim, multiplicity), descending
  std::vector<CMatrix> central_projections;                  // aligned with blocks
};

VnAlgebra from_generators(std::size_t n, const std::vector<CMatrix>& gens, Tolerance tol = {});
VnAlgebra commutant(const VnAlgebra& a, Tolerance tol = {});
VnAlgebra center(const VnAlgebra& a, Tolerance tol = {});
BlockSignature block_decompose(const VnAlgebra& a, std::uint64_t seed = 0x5eed, Tolerance tol = {});

// Matrix unit e_pq of block `block` in the standard layout of (+)_i M_{a_i} (x) I_{m_i}.
CMatrix block_unit(const std::vector<std::pair<std::size_t, std::size_t>>& blocks, std::size_t block, std::size_t p,
                   std::size_t q);
// Matrix unit of the commuting factor I_{a_i} (x) e_rs in the same layout.
CMatrix block_commutant_unit(const std::vector<std::pair<std::size_t, std::size_t>>& blocks, std::size_t block,
                             std::size_t r, std::size_t s);

VnAlgebra random_algebra(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& blocks,
                         std::uint64_t seed, Tolerance tol = {});

// Random block list with total size in [1, max_n]; irrep dims up to 4, multiplicities up to 3.
BlockList random_block_list(Rng& rng, std::size_t max_n);
std::size_t layout_dim(const BlockList& blocks);

struct EqualsResult {
  bool equal;
  double residual;  // ||P_a - P_b||_F
};
EqualsResult equals(const VnAlgebra& a, const VnAlgebra& b, Tolerance tol = {});

// span(a) contained in span(b): worst projection residual over a's basis
double containment_residual(const VnAlgebra& a, const VnAlgebra& b);

}  // namespace vnpair
