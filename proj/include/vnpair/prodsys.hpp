#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "vnpair/correspondence.hpp"

namespace vnpair {

// Product system over {0, ..., N}. Products are unitaries from the carrier of tensor(E_s, E_t)
// onto the carrier of E_{s+t}, for s + t <= N.
class DiscreteProductSystem {
 public:
  DiscreteProductSystem() = default;
  DiscreteProductSystem(VnAlgebra algebra, std::vector<Correspondence> members,
                        std::vector<std::vector<TensorProduct>> tensors, std::vector<std::vector<CMatrix>> products);

  std::size_t horizon() const { return members_.empty() ? 0 : members_.size() - 1; }
  const VnAlgebra& algebra() const { return algebra_; }
  const Correspondence& member(std::size_t t) const { return members_.at(t); }
  const TensorProduct& tensor(std::size_t s, std::size_t t) const { return tensors_.at(s).at(t); }
  const CMatrix& product(std::size_t s, std::size_t t) const { return products_.at(s).at(t); }

  // carrier map h -> u_{s,t}(x (.) h) for x in E_s
  CMatrix left_multiplier(std::size_t s, std::size_t t, const CMatrix& x) const;
  // the element x y of E_{s+t}
  CMatrix multiply(std::size_t s, std::size_t t, const CMatrix& x, const CMatrix& y) const {
    return left_multiplier(s, t, x) * y;
  }

  struct Validation {
    double unitarity = 0.0;
    double bilinearity = 0.0;
    double associativity = 0.0;
    double marginal = 0.0;
    bool identity_unit = false;  // E_0 is the identity correspondence of the algebra
    double worst() const { return std::max({unitarity, bilinearity, associativity, marginal, identity_unit ? 0.0 : 1.0}); }
  };
  Validation validate(Tolerance tol = {}) const;

 private:
  VnAlgebra algebra_;
  std::vector<Correspondence> members_;
  std::vector<std::vector<TensorProduct>> tensors_;
  std::vector<std::vector<CMatrix>> products_;
};

enum class DilationSide { Left, Right };

// Left: v_t from the carrier of tensor(E, E_t) onto that of E. Right: w_t from the carrier of
// tensor(E_t, H) onto H, with H a correspondence from the algebra to C.
struct DilationFamily {
  DilationSide side = DilationSide::Left;
  Correspondence space;
  std::vector<TensorProduct> tensors;
  std::vector<CMatrix> maps;
  std::size_t carrier_dim() const { return space.carrier_dim(); }
};

struct DilationValidation {
  double unitarity = 0.0;
  double bilinearity = 0.0;
  double associativity = 0.0;
  double worst() const { return std::max({unitarity, bilinearity, associativity}); }
};
// carrier map g -> v_t(x (.) g) (left) or w_t(x (.) g) (right) for x in the first tensor factor
CMatrix dilation_multiplier(const DilationFamily& d, std::size_t t, const CMatrix& x);
DilationValidation validate_dilation(const DiscreteProductSystem& p, const DilationFamily& d, Tolerance tol = {});

struct EndomorphismSystem {
  DiscreteProductSystem system;
  DilationFamily left;
  std::vector<Endomorphism> powers;
  double recovery = 0.0;  // worst of v_t (b (.) id) v_t^dagger against theta^t(b)
};
EndomorphismSystem from_endomorphism(const Endomorphism& theta, std::size_t horizon, Tolerance tol = {});

struct CommutantSystem {
  DiscreteProductSystem system;
  double order_check = 0.0;  // worst distance between u'_{t,s} and the commutant-induced u_{s,t}
};
CommutantSystem commutant_system(const EndomorphismSystem& p, Tolerance tol = {});

struct BhatSystem {
  std::vector<CMatrix> spaces;                  // orthonormal columns spanning Theta_t(gamma gamma^dagger) C^n
  std::vector<std::vector<CMatrix>> products;   // U_{s,t}: h_s (x) h_t -> h_{s+t}
  std::vector<CMatrix> dilation;                // V_t: C^n (x) h_t -> C^n
  double unitarity = 0.0;
  double associativity = 0.0;
  double recovery = 0.0;
  double worst() const { return std::max({unitarity, associativity, recovery}); }
};
BhatSystem bhat_system(const Endomorphism& theta, const CMatrix& gamma, std::size_t horizon, Tolerance tol = {});

// H as a correspondence from `b` to C given by a representation of b on C^h.
Correspondence module_over_scalars(const VnAlgebra& b, std::vector<CMatrix> rho_images, Tolerance tol = {});

// w_t(x (.) g) = U^t x g on H = C^n, for a unitary U with theta = U^dagger . U on the algebra.
DilationFamily right_dilation_from_unitary(const EndomorphismSystem& p, const CMatrix& u, Tolerance tol = {});
// w_t(x' (.) g) = x' g, the identity right dilation of a commutant system on C^n.
DilationFamily identity_right_dilation(const DiscreteProductSystem& p, Tolerance tol = {});

class Representation {
 public:
  Representation() = default;
  Representation(std::vector<TensorProduct> tensors, std::vector<CMatrix> maps)
      : tensors_(std::move(tensors)), maps_(std::move(maps)) {}
  std::size_t horizon() const { return maps_.empty() ? 0 : maps_.size() - 1; }
  // eta_t(x) as an operator on H
  CMatrix eta(std::size_t t, const CMatrix& x) const;
  // theta^w_t(a') = w_t (id_t (.) a') w_t^dagger for a' commuting with the left action on H
  CMatrix induced(std::size_t t, const CMatrix& a) const;

 private:
  std::vector<TensorProduct> tensors_;
  std::vector<CMatrix> maps_;
};

struct RepresentationCheck {
  double multiplicativity = 0.0;
  double isometry = 0.0;
  double covariance = 0.0;  // theta^w_t(a') eta_t(x) = eta_t(x) a'
  double worst() const { return std::max({multiplicativity, isometry, covariance}); }
};
Representation representation_from_right_dilation(const DiscreteProductSystem& p, const DilationFamily& w,
                                                  RepresentationCheck* check = nullptr, std::uint64_t seed = 0x4e7,
                                                  Tolerance tol = {});

struct DilationCommutant {
  DiscreteProductSystem f_prime;
  CMatrix xi;                       // unit vector of C_B(B(C^n, H)), an isometry C^n -> H
  std::vector<CMatrix> projections;  // theta^w_t(xi xi^dagger)
  std::vector<CMatrix> frames;       // orthonormal columns of each range
  std::vector<CMatrix> upsilon;      // Upsilon_t : C^n -> H
  std::vector<CMatrix> nu;           // carrier maps frames_t^dagger Upsilon_t
  double unitarity = 0.0;
  double well_defined = 0.0;
  double intertwining = 0.0;
  double product = 0.0;
  double worst() const { return std::max({unitarity, well_defined, intertwining, product}); }
};
// Without `xi` the unit vector is the isometric part of a random element. The commutant system is rebuilt internally.
DilationCommutant commutant_via_dilation(const EndomorphismSystem& p, const DilationFamily& w,
                                         std::optional<CMatrix> xi = std::nullopt, std::uint64_t seed = 0x10,
                                         Tolerance tol = {});

}  // namespace vnpair
