#pragma once

#include <vector>

#include "vnpair/prodsys.hpp"

namespace vnpair {

// theta on B and theta' on B' are paired via U when U^dagger b U = theta(b) and U b' U^dagger = theta'(b').
struct PairingCertificate {
  bool paired = false;
  CMatrix unitary;
  double relation_b = 0.0;
  double relation_b_prime = 0.0;
  // filled when not paired
  MultiplicityTable table_e, table_f;
};

// Checks both relations for U and for U^k against the k-th powers, k <= horizon.
PairingCertificate check_pairing(const CMatrix& u, const Endomorphism& theta, const Endomorphism& theta_prime,
                                 std::size_t horizon = 3, Tolerance tol = {});

// x -> U x from the correspondence of theta onto the commutant of the correspondence of theta'
struct PairingIsomorphism {
  CMatrix unitary;  // carrier map, also the element map by left multiplication
  Correspondence source, target;
  double inner_products = 0.0;
  double right_linearity = 0.0;
  double covariance = 0.0;   // u(theta(b) x) = b u(x)
  double target_span = 0.0;  // U E against the element space of the target
  double bimodule = 0.0;
  double worst() const { return std::max({inner_products, right_linearity, covariance, target_span, bimodule}); }
};
PairingIsomorphism isomorphism_from_pairing(const CMatrix& u, const Endomorphism& theta, const Endomorphism& theta_prime,
                                            Tolerance tol = {});

struct PairingFromIsomorphism {
  PairingCertificate certificate;
  double dilation_consistency = 0.0;  // the map v_1(x (.) x_1) h -> x w_1(u x_1 (.) h) against U
};
PairingFromIsomorphism pairing_from_isomorphism(const CMatrix& u, const Endomorphism& theta,
                                                const Endomorphism& theta_prime, Tolerance tol = {});

PairingCertificate can_pair(const Endomorphism& theta, const Endomorphism& theta_prime, std::uint64_t seed = 0x150,
                            Tolerance tol = {});

struct RestrictionVerdict {
  bool algebra = false;    // U^dagger B U inside B
  bool commutant = false;  // U B' U^dagger inside B'
  double algebra_residual = 0.0;
  double commutant_residual = 0.0;
};
RestrictionVerdict restriction_symmetry(const CMatrix& u, const VnAlgebra& b, Tolerance tol = {});

// c_0 = 1, c_1 = U_2^dagger U_1, c_{s+t} = c_s theta1^s(c_t); theta2^n = c_n theta1^n(.) c_n^dagger
struct CocycleFamily {
  std::vector<CMatrix> c;
  CMatrix u1, u2;
  double residual = 0.0;
};
CocycleFamily cocycle_link(const Endomorphism& theta1, const Endomorphism& theta2, const Endomorphism& theta_prime,
                           std::size_t horizon, Tolerance tol = {});

}  // namespace vnpair
