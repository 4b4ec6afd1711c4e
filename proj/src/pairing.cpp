#include "vnpair/pairing.hpp"

#include <algorithm>
#include <string>

#include "vnpair/error.hpp"

namespace vnpair {

namespace {

void require_unitary(const CMatrix& u, std::size_t n, Tolerance tol) {
  if (u.rows() != n || u.cols() != n) fail(ErrorKind::DimensionMismatch, "unitary must be " + std::to_string(n) + " x " + std::to_string(n));
  const double r = unitarity_residual(u);
  if (r > tol.eps) fail(ErrorKind::NotUnitary, "U is not unitary", r);
}

void require_commutant_domains(const Endomorphism& theta, const Endomorphism& theta_prime, Tolerance tol) {
  const auto eq = equals(theta_prime.domain(), commutant(theta.domain(), tol), tol);
  if (!eq.equal) fail(ErrorKind::DomainsNotCommutant, "theta' must act on the commutant of theta's algebra", eq.residual);
}

Correspondence source_of(const Endomorphism& theta, const Endomorphism& theta_prime, Tolerance tol) {
  return of_endomorphism(theta, theta_prime.domain(), tol);
}

Correspondence target_of(const Endomorphism& theta, const Endomorphism& theta_prime, Tolerance tol) {
  return commutant(of_endomorphism(theta_prime, theta.domain(), tol));
}

}  // namespace

PairingCertificate check_pairing(const CMatrix& u, const Endomorphism& theta, const Endomorphism& theta_prime,
                                 std::size_t horizon, Tolerance tol) {
  const VnAlgebra& b = theta.domain();
  const VnAlgebra& bc = theta_prime.domain();
  require_unitary(u, b.ambient_dim(), tol);
  require_commutant_domains(theta, theta_prime, tol);
  PairingCertificate out;
  out.unitary = u;
  CMatrix uk = u;
  Endomorphism tk = theta, tpk = theta_prime;
  for (std::size_t k = 1; k <= std::max<std::size_t>(horizon, 1); ++k) {
    if (k > 1) {
      uk = uk * u;
      tk = compose(theta, tk, tol);
      tpk = compose(theta_prime, tpk, tol);
    }
    const CMatrix uka = uk.adjoint();
    double rb = 0.0, rbp = 0.0;
    for (const auto& x : b.basis()) rb = std::max(rb, scaled_residual(uka * x * uk, tk.apply(x)));
    for (const auto& x : bc.basis()) rbp = std::max(rbp, scaled_residual(uk * x * uka, tpk.apply(x)));
    const std::string at = " at power " + std::to_string(k);
    if (rb > tol.eps) fail(ErrorKind::RelationB, "U^dagger b U != theta(b)" + at, rb);
    if (rbp > tol.eps) fail(ErrorKind::RelationBPrime, "U b' U^dagger != theta'(b')" + at, rbp);
    if (k == 1) {
      out.relation_b = rb;
      out.relation_b_prime = rbp;
    }
  }
  out.paired = true;
  return out;
}

PairingIsomorphism isomorphism_from_pairing(const CMatrix& u, const Endomorphism& theta, const Endomorphism& theta_prime,
                                            Tolerance tol) {
  check_pairing(u, theta, theta_prime, 1, tol);
  PairingIsomorphism out;
  out.unitary = u;
  out.source = source_of(theta, theta_prime, tol);
  out.target = target_of(theta, theta_prime, tol);
  const VnAlgebra& b = theta.domain();
  const auto& xs = out.source.element_space();
  const auto& ys = out.target.element_space();
  for (const auto& x : xs) {
    const CMatrix ux = u * x;
    for (const auto& y : xs) out.inner_products = std::max(out.inner_products, scaled_residual(ux.adjoint() * (u * y), x.adjoint() * y));
    for (const auto& a : b.basis()) {
      out.right_linearity = std::max(out.right_linearity, scaled_residual(u * (x * a), ux * a));
      out.covariance = std::max(out.covariance, scaled_residual(u * (theta.apply(a) * x), a * ux));
    }
    CMatrix proj(ux.rows(), ux.cols());
    for (const auto& y : ys) proj.add_scaled(hs_inner(y, ux), y);
    out.target_span = std::max(out.target_span, scaled_residual(proj, ux));
  }
  if (xs.size() != ys.size()) out.target_span = std::max(out.target_span, 1.0);
  out.bimodule = bimodule_unitary_residual(out.source, out.target, u);
  if (out.worst() > tol.eps) fail(ErrorKind::ValidationFailure, "x -> U x is not a bimodule unitary onto the target", out.worst());
  return out;
}

PairingFromIsomorphism pairing_from_isomorphism(const CMatrix& u, const Endomorphism& theta,
                                                const Endomorphism& theta_prime, Tolerance tol) {
  const VnAlgebra& b = theta.domain();
  const std::size_t n = b.ambient_dim();
  require_commutant_domains(theta, theta_prime, tol);
  if (u.rows() != n || u.cols() != n) fail(ErrorKind::DimensionMismatch, "isomorphism must act on C^n");
  const Correspondence src = source_of(theta, theta_prime, tol), dst = target_of(theta, theta_prime, tol);
  const double bim = bimodule_unitary_residual(src, dst, u);
  if (bim > tol.eps) fail(ErrorKind::ValidationFailure, "u is not a bimodule unitary", bim);
  // u(1): the image of the unit of B
  const CMatrix big_u = u * CMatrix::identity(n);
  const double ur = unitarity_residual(big_u);
  if (ur > tol.eps) fail(ErrorKind::NotUnitaryImage, "u(1) is not unitary", ur);
  PairingFromIsomorphism out;
  try {
    out.certificate = check_pairing(big_u, theta, theta_prime, 3, tol);
  } catch (const Error& e) {
    fail(ErrorKind::PairingCheckFailed, std::string("u(1) does not pair: ") + e.what(), e.residual());
  }
  // v_1(x (.) x_1) h -> x w_1(u x_1 (.) h), with v the left dilation and w the identity right dilation
  const EndomorphismSystem left = from_endomorphism(theta, 1, tol);
  const CommutantSystem inter = commutant_system(from_endomorphism(theta_prime, 1, tol), tol);
  const DilationFamily w = identity_right_dilation(inter.system, tol);
  for (const auto& x : b.basis())
    for (const auto& x1 : left.system.member(1).element_space()) {
      const CMatrix lhs = big_u * (dilation_multiplier(left.left, 1, x) * x1);
      const CMatrix rhs = x * dilation_multiplier(w, 1, u * x1);
      out.dilation_consistency = std::max(out.dilation_consistency, scaled_residual(lhs, rhs));
    }
  if (out.dilation_consistency > tol.eps)
    fail(ErrorKind::PairingCheckFailed, "dilation map differs from left multiplication by u(1)", out.dilation_consistency);
  return out;
}

PairingCertificate can_pair(const Endomorphism& theta, const Endomorphism& theta_prime, std::uint64_t seed,
                            Tolerance tol) {
  if (!is_faithful(theta, tol)) fail(ErrorKind::NotFaithful, "theta is not faithful");
  if (!is_faithful(theta_prime, tol)) fail(ErrorKind::NotFaithful, "theta' is not faithful");
  require_commutant_domains(theta, theta_prime, tol);
  const Correspondence e = source_of(theta, theta_prime, tol), f = target_of(theta, theta_prime, tol);
  const IsomorphismResult iso = find_isomorphism(e, f, seed, tol);
  if (iso.found) return pairing_from_isomorphism(iso.unitary, theta, theta_prime, tol).certificate;
  if (iso.table_e == iso.table_f && e.carrier_dim() == f.carrier_dim())
    fail(ErrorKind::InternalError, "equal multiplicity tables but no isomorphism");
  PairingCertificate out;
  out.table_e = iso.table_e;
  out.table_f = iso.table_f;
  return out;
}

RestrictionVerdict restriction_symmetry(const CMatrix& u, const VnAlgebra& b, Tolerance tol) {
  require_unitary(u, b.ambient_dim(), tol);
  const VnAlgebra bc = commutant(b, tol);
  const CMatrix ua = u.adjoint();
  RestrictionVerdict v;
  for (const auto& x : b.basis()) v.algebra_residual = std::max(v.algebra_residual, b.span_residual(ua * x * u));
  for (const auto& x : bc.basis()) v.commutant_residual = std::max(v.commutant_residual, bc.span_residual(u * x * ua));
  v.algebra = v.algebra_residual <= tol.eps;
  v.commutant = v.commutant_residual <= tol.eps;
  if (v.algebra != v.commutant)
    fail(ErrorKind::InternalError, "restriction verdicts disagree", std::max(v.algebra_residual, v.commutant_residual));
  return v;
}

CocycleFamily cocycle_link(const Endomorphism& theta1, const Endomorphism& theta2, const Endomorphism& theta_prime,
                           std::size_t horizon, Tolerance tol) {
  if (!equals(theta1.domain(), theta2.domain(), tol).equal)
    fail(ErrorKind::DomainMismatch, "theta1 and theta2 act on different algebras");
  const PairingCertificate p1 = can_pair(theta1, theta_prime, 0x150, tol);
  if (!p1.paired) fail(ErrorKind::NotPairedInput, "theta1 and theta' cannot be paired");
  const PairingCertificate p2 = can_pair(theta2, theta_prime, 0x150, tol);
  if (!p2.paired) fail(ErrorKind::NotPairedInput, "theta2 and theta' cannot be paired");
  const VnAlgebra& b = theta1.domain();
  const std::size_t n = b.ambient_dim();
  CocycleFamily out;
  out.u1 = p1.unitary;
  out.u2 = p2.unitary;
  const CMatrix c1 = out.u2.adjoint() * out.u1;
  const double in_b = b.span_residual(c1);
  if (in_b > tol.eps) fail(ErrorKind::InternalError, "U_2^dagger U_1 does not lie in the algebra", in_b);
  out.c = {CMatrix::identity(n), c1};
  Endomorphism t1 = Endomorphism::identity(b), t2 = Endomorphism::identity(b);
  for (std::size_t k = 1; k <= horizon; ++k) {
    // c_k = c_{k-1} theta1^{k-1}(c_1)
    if (k > 1) out.c.push_back(out.c[k - 1] * t1.apply(c1));
    t1 = compose(theta1, t1, tol);
    t2 = compose(theta2, t2, tol);
    const CMatrix& ck = out.c[k];
    double r = unitarity_residual(ck);
    for (const auto& x : b.basis()) r = std::max(r, scaled_residual(t2.apply(x), ck * t1.apply(x) * ck.adjoint()));
    if (r > tol.eps) fail(ErrorKind::CocycleResidual, "theta2^n != c_n theta1^n c_n^dagger at n = " + std::to_string(k), r);
    out.residual = std::max(out.residual, r);
  }
  if (horizon == 0) out.c.resize(1);
  return out;
}

}  // namespace vnpair
