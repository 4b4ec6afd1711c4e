#pragma once

#include <memory>
#include <vector>

#include "vnpair/algebra.hpp"

namespace vnpair {

// Linear map from the span of an algebra into h x h matrices, held by the images of the basis.
class AlgebraMap {
 public:
  AlgebraMap() = default;
  AlgebraMap(VnAlgebra domain, std::vector<CMatrix> images);

  const VnAlgebra& domain() const { return domain_; }
  const std::vector<CMatrix>& images() const { return images_; }
  std::size_t target_dim() const { return target_dim_; }

  // applies to the projection of x onto the domain span
  CMatrix apply(const CMatrix& x) const;
  CMatrix apply_coefficients(const std::vector<cd>& c) const;

  struct HomResiduals {
    double unital = 0.0;
    double multiplicative = 0.0;
    double star = 0.0;
    double worst() const { return std::max({unital, multiplicative, star}); }
  };
  // unital *-homomorphism laws on basis pairs
  HomResiduals hom_residuals() const;

  bool operator==(const AlgebraMap& o) const { return domain_ == o.domain_ && images_ == o.images_; }

 private:
  VnAlgebra domain_;
  std::vector<CMatrix> images_;
  std::size_t target_dim_ = 0;
  std::shared_ptr<const CMatrix> stacked_;  // target_dim^2 x d, column k = vec(image_k)
};

class Endomorphism {
 public:
  Endomorphism() = default;
  static Endomorphism make(VnAlgebra domain, std::vector<CMatrix> images, Tolerance tol = {});
  static Endomorphism identity(const VnAlgebra& domain);

  const VnAlgebra& domain() const { return map_.domain(); }
  const std::vector<CMatrix>& images() const { return map_.images(); }
  const AlgebraMap& map() const { return map_; }
  CMatrix apply(const CMatrix& x) const { return map_.apply(x); }

  bool operator==(const Endomorphism& o) const { return map_ == o.map_; }

 private:
  explicit Endomorphism(AlgebraMap m) : map_(std::move(m)) {}
  AlgebraMap map_;
};

enum class Conjugation {
  ByAdjoint,  // b -> u^dagger b u
  Direct,     // b -> u b u^dagger
};

Endomorphism from_unitary(const VnAlgebra& b, const CMatrix& u, Conjugation dir, Tolerance tol = {});
// Extends gens[k] -> images[k] multiplicatively; the gens must generate the domain.
Endomorphism from_generator_images(const VnAlgebra& domain, const std::vector<CMatrix>& gens,
                                   const std::vector<CMatrix>& images, Tolerance tol = {});
// f after g
Endomorphism compose(const Endomorphism& f, const Endomorphism& g, Tolerance tol = {});
Endomorphism power(const Endomorphism& f, std::size_t k, Tolerance tol = {});

struct FaithfulnessReport {
  double smallest_singular = 0.0;
  std::size_t rank = 0;
  bool injective = false;
  bool surjective = false;
};
FaithfulnessReport faithfulness(const Endomorphism& f, Tolerance tol = {});
bool is_faithful(const Endomorphism& f, Tolerance tol = {});
bool is_automorphism(const Endomorphism& f, Tolerance tol = {});

}  // namespace vnpair

namespace vnpair {

// Unitary normalizing random_algebra(n, blocks, alg_seed): a permutation of equally shaped blocks
// followed by random unitaries of the algebra and of its commutant.
CMatrix random_normalizing_unitary(const BlockList& blocks, std::uint64_t alg_seed, std::uint64_t seed);

// Unital endomorphism of random_algebra(n, blocks, alg_seed). Each target block receives a direct sum of
// source blocks with matching total size, then an inner automorphism is applied first. With `faithful`
// every source block is used.
Endomorphism random_endomorphism(const VnAlgebra& domain, const BlockList& blocks, std::uint64_t alg_seed,
                                 std::uint64_t seed, bool faithful, Tolerance tol = {});

}  // namespace vnpair
