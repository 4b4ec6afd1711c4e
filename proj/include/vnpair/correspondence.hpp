#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "vnpair/endo.hpp"

namespace vnpair {

// A-B correspondence as a commuting pair of representations on a carrier C^h: rho of the left
// algebra A and rho_prime of the commutant B' of the right algebra B. The element space is
// {x : C^n -> C^h : rho_prime(b') x = x b'}.
class Correspondence {
 public:
  Correspondence() = default;

  // Commutants are computed here. rho_images follow left.basis(), rho_prime_images follow commutant(right).basis().
  static Correspondence make(const VnAlgebra& left, const VnAlgebra& right, std::vector<CMatrix> rho_images,
                             std::vector<CMatrix> rho_prime_images, Tolerance tol = {});
  // All four algebras supplied; rho is over `left`, rho_prime over `right_commutant`.
  static Correspondence make(VnAlgebra left, VnAlgebra left_commutant, VnAlgebra right, VnAlgebra right_commutant,
                             AlgebraMap rho, AlgebraMap rho_prime, Tolerance tol = {});
  // Same as make without validation; the caller guarantees every invariant.
  static Correspondence make_unchecked(VnAlgebra left, VnAlgebra left_commutant, VnAlgebra right,
                                       VnAlgebra right_commutant, AlgebraMap rho, AlgebraMap rho_prime,
                                       Tolerance tol = {});

  const VnAlgebra& left() const;
  const VnAlgebra& left_commutant() const;
  const VnAlgebra& right() const;
  const VnAlgebra& right_commutant() const;
  const AlgebraMap& rho() const;
  const AlgebraMap& rho_prime() const;
  std::size_t carrier_dim() const;
  Tolerance tolerance() const;

  // orthonormal basis (h x n matrices), computed once on first use
  const std::vector<CMatrix>& element_space() const;

  struct Validation {
    AlgebraMap::HomResiduals rho, rho_prime;
    double commuting = 0.0;
    double inner_products = 0.0;  // worst x^dagger y outside span(right)
    std::size_t span_rank = 0;    // rank of E C^n, must equal carrier_dim
    bool nondegenerate = false;
    double worst() const;
  };
  Validation validate() const;

  // structural equality of the stored triple and algebras
  bool operator==(const Correspondence& o) const;

  struct Impl;

 private:
  friend Correspondence commutant(const Correspondence& e);
  std::shared_ptr<const Impl> impl_;
};

Correspondence of_endomorphism(const Endomorphism& theta, Tolerance tol = {});
Correspondence intertwiner_space(const Endomorphism& theta, Tolerance tol = {});
// same, reusing an already computed commutant of theta's domain
Correspondence of_endomorphism(const Endomorphism& theta, const VnAlgebra& domain_commutant, Tolerance tol = {});
Correspondence intertwiner_space(const Endomorphism& theta, const VnAlgebra& domain_commutant, Tolerance tol = {});
Correspondence identity_correspondence(const VnAlgebra& b, Tolerance tol = {});
// swaps the two representations; exact
Correspondence commutant(const Correspondence& e);

// E (.) H~ for e: A -> B and f: B -> C. Raw vectors x_i (x) e_p are indexed i * f.carrier_dim() + p,
// with x_i the element-space basis of e.
struct TensorProduct {
  Correspondence result;
  std::vector<CMatrix> left_elements;  // element-space basis of e
  std::size_t right_carrier = 0;       // f.carrier_dim()
  CMatrix embed;                       // carrier x raw, embed^dagger embed = Gram
  CMatrix lift;                        // raw x carrier, embed * lift = I

  std::size_t raw_dim() const { return left_elements.size() * right_carrier; }
  // carrier vector of x (.) h for x in e's element space and h in f's carrier
  CMatrix vector_of(const CMatrix& x, const CMatrix& h) const;
  // operator g -> x (.) (y g) into the tensor carrier, for x in e's and y in f's element space
  CMatrix pair_operator(const CMatrix& x, const CMatrix& y) const;
};
// With validate_result = false the result is not re-validated (callers that check a unitary onto a
// validated correspondence get validity from bilinearity).
TensorProduct tensor_product(const Correspondence& e, const Correspondence& f, Tolerance tol = {},
                             bool validate_result = true);
inline Correspondence tensor(const Correspondence& e, const Correspondence& f, Tolerance tol = {}) {
  return tensor_product(e, f, tol).result;
}

// Unitary from the carrier of tensor(e, f) onto that of tensor(commutant(f), commutant(e)),
// x (.) (y' g) -> y' (.) (x g).
struct CommutantSwap {
  CMatrix unitary;
  double isometry = 0.0;
  double intertwining = 0.0;
};
CommutantSwap tensor_commutant_iso(const Correspondence& e, const Correspondence& f, Tolerance tol = {});

// multiplicities of (A-block i, B'-block j) irreducibles in the carrier
struct MultiplicityTable {
  BlockList left_blocks;             // block signature of the left algebra
  BlockList right_commutant_blocks;  // block signature of the commutant of the right algebra
  std::vector<std::vector<std::size_t>> m;
  bool operator==(const MultiplicityTable& o) const { return m == o.m; }
};
MultiplicityTable multiplicity_table(const Correspondence& e, Tolerance tol = {});

struct IsomorphismResult {
  bool found = false;
  CMatrix unitary;  // carrier of e -> carrier of f
  MultiplicityTable table_e, table_f;
  double residual = 0.0;
  int attempts = 0;
};
IsomorphismResult find_isomorphism(const Correspondence& e, const Correspondence& f, std::uint64_t seed = 0x150,
                                   Tolerance tol = {});
// intertwining and unitarity residual of a candidate bimodule unitary u: carrier(e) -> carrier(f)
double bimodule_unitary_residual(const Correspondence& e, const Correspondence& f, const CMatrix& u);

// left action injective
bool is_left_faithful(const Correspondence& e, Tolerance tol = {});
// span{x^dagger y a : x, y in E} is the whole right algebra
bool is_strongly_full(const Correspondence& e, Tolerance tol = {});

// Algebra of the form w (+)_i (M_{a_i} (x) I_{m_i}) w^dagger with the frame kept, for building representations.
struct FramedAlgebra {
  VnAlgebra algebra;
  BlockList blocks;
  CMatrix frame;
  VnAlgebra commutant_algebra;

  static FramedAlgebra random(const BlockList& blocks, std::uint64_t seed, Tolerance tol = {});
  // component of x in block i, a_i x a_i
  CMatrix irrep(const CMatrix& x, std::size_t i) const;
  // component of a commutant element in block i, m_i x m_i
  CMatrix commutant_irrep(const CMatrix& x, std::size_t i) const;
};

// Random A-B correspondence with a random multiplicity table, carrier at most max_carrier.
Correspondence random_correspondence(const FramedAlgebra& left, const FramedAlgebra& right, std::size_t max_carrier,
                                     std::uint64_t seed, Tolerance tol = {});

}  // namespace vnpair
