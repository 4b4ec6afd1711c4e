#include <gtest/gtest.h>

#include <cmath>
#include <functional>

#include "vnpair/error.hpp"
#include "vnpair/multiplier.hpp"
#include "vnpair/pairing.hpp"

using namespace vnpair;

namespace {

VnAlgebra d2() { return from_generators(2, {CMatrix::unit(2, 0, 0)}); }
VnAlgebra full(std::size_t n) {
  std::vector<CMatrix> g;
  for (std::size_t i = 0; i + 1 < n; ++i) g.push_back(CMatrix::unit(n, i, i + 1));
  return from_generators(n, g);
}
const CMatrix pauli_x{{0, 1}, {1, 0}};

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::InternalError;
}

struct Instance {
  VnAlgebra b, bc;
  CMatrix u;
  Endomorphism theta, theta_prime;
};

// theta = Ad(u^dagger) on b, theta' = Ad(u) on b' with u normalizing a random algebra
Instance random_instance(Rng& rng, std::size_t max_n) {
  const BlockList blocks = random_block_list(rng, max_n);
  const std::uint64_t as = rng.next();
  const std::uint64_t us = rng.next();
  VnAlgebra b = random_algebra(layout_dim(blocks), blocks, as);
  VnAlgebra bc = commutant(b);
  CMatrix u = random_normalizing_unitary(blocks, as, us);
  Endomorphism th = from_unitary(b, u, Conjugation::ByAdjoint);
  Endomorphism thp = from_unitary(bc, u, Conjugation::Direct);
  return {b, bc, u, th, thp};
}

}  // namespace

TEST(CheckPairing, Examples) {
  const VnAlgebra m3 = full(3);
  const VnAlgebra scalars = commutant(m3);
  const CMatrix u = random_unitary(3, 4);
  const auto c = check_pairing(u, from_unitary(m3, u, Conjugation::ByAdjoint), Endomorphism::identity(scalars));
  EXPECT_TRUE(c.paired);
  EXPECT_LT(c.relation_b, 1e-12);

  const VnAlgebra b = d2();
  const VnAlgebra bc = commutant(b);
  const Endomorphism swap = from_unitary(b, pauli_x, Conjugation::ByAdjoint);
  const Endomorphism swap_c = from_unitary(bc, pauli_x, Conjugation::Direct);
  EXPECT_TRUE(check_pairing(pauli_x, swap, swap_c).paired);
  EXPECT_EQ(kind_of([&] { check_pairing(pauli_x, swap, Endomorphism::identity(bc)); }), ErrorKind::RelationBPrime);
  EXPECT_EQ(kind_of([&] { check_pairing(CMatrix::identity(2), swap, Endomorphism::identity(bc)); }), ErrorKind::RelationB);
  EXPECT_EQ(kind_of([&] { check_pairing(2.0 * pauli_x, swap, swap_c); }), ErrorKind::NotUnitary);
  EXPECT_EQ(kind_of([&] { check_pairing(pauli_x, swap, Endomorphism::identity(full(2))); }), ErrorKind::DomainsNotCommutant);
}

TEST(IsomorphismFromPairing, Examples) {
  const VnAlgebra b = d2();
  const VnAlgebra bc = commutant(b);
  const auto id = isomorphism_from_pairing(CMatrix::identity(2), Endomorphism::identity(b), Endomorphism::identity(bc));
  EXPECT_LT(scaled_residual(id.unitary, CMatrix::identity(2)), 1e-15);
  EXPECT_LT(id.worst(), 1e-12);

  const Endomorphism swap = from_unitary(b, pauli_x, Conjugation::ByAdjoint);
  const Endomorphism swap_c = from_unitary(bc, pauli_x, Conjugation::Direct);
  const auto sw = isomorphism_from_pairing(pauli_x, swap, swap_c);
  // X D_2 is the antidiagonal span, which is the target's element space
  const auto& ys = sw.target.element_space();
  ASSERT_EQ(ys.size(), 2u);
  for (const auto& y : ys) {
    EXPECT_LT(std::abs(y(0, 0)) + std::abs(y(1, 1)), 1e-12);
  }
  for (const auto& x : b.basis()) {
    const CMatrix ux = pauli_x * x;
    EXPECT_LT(std::abs(ux(0, 0)) + std::abs(ux(1, 1)), 1e-15);
  }
  EXPECT_LT(sw.worst(), 1e-12);
}

TEST(PairingFromIsomorphism, Examples) {
  const VnAlgebra b = d2();
  const VnAlgebra bc = commutant(b);
  const auto id = pairing_from_isomorphism(CMatrix::identity(2), Endomorphism::identity(b), Endomorphism::identity(bc));
  EXPECT_LT(scaled_residual(id.certificate.unitary, CMatrix::identity(2)), 1e-15);

  const Endomorphism swap = from_unitary(b, pauli_x, Conjugation::ByAdjoint);
  const Endomorphism swap_c = from_unitary(bc, pauli_x, Conjugation::Direct);
  const auto sw = pairing_from_isomorphism(pauli_x, swap, swap_c);
  EXPECT_TRUE(sw.certificate.paired);
  EXPECT_LT(scaled_residual(sw.certificate.unitary, pauli_x), 1e-15);
  EXPECT_LT(sw.dilation_consistency, 1e-12);
  // identity on C^2 is not a bimodule map for the swap pair
  EXPECT_EQ(kind_of([&] { pairing_from_isomorphism(CMatrix::identity(2), swap, swap_c); }), ErrorKind::ValidationFailure);
}

TEST(CanPair, Examples) {
  const VnAlgebra b = d2();
  const VnAlgebra bc = commutant(b);
  const Endomorphism swap = from_unitary(b, pauli_x, Conjugation::ByAdjoint);
  const Endomorphism swap_c = from_unitary(bc, pauli_x, Conjugation::Direct);
  const auto p = can_pair(swap, swap_c);
  ASSERT_TRUE(p.paired);
  EXPECT_TRUE(check_pairing(p.unitary, swap, swap_c).paired);

  const auto q = can_pair(swap, Endomorphism::identity(bc));
  EXPECT_FALSE(q.paired);
  EXPECT_NE(q.table_e.m, q.table_f.m);
  // oracle: U would commute with D_2, so it is diagonal; no diagonal unitary conjugates diag(a,b) to diag(b,a)
  double best = 1e9;
  for (int i = 0; i < 64; ++i)
    for (int j = 0; j < 64; ++j) {
      const CMatrix u = CMatrix::diag({std::polar(1.0, 0.0982 * i), std::polar(1.0, 0.0982 * j)});
      double r = 0.0;
      for (const auto& x : b.basis()) r = std::max(r, scaled_residual(u.adjoint() * x * u, swap.apply(x)));
      best = std::min(best, r);
    }
  EXPECT_GT(best, 0.1);

  const auto idp = can_pair(Endomorphism::identity(b), Endomorphism::identity(bc));
  EXPECT_TRUE(idp.paired);

  const Endomorphism kill = Endomorphism::make(b, [&] {
    std::vector<CMatrix> im;
    for (const auto& x : b.basis()) im.push_back(x(0, 0) * CMatrix::identity(2));
    return im;
  }());
  EXPECT_EQ(kind_of([&] { can_pair(kill, swap_c); }), ErrorKind::NotFaithful);
  EXPECT_EQ(kind_of([&] { can_pair(swap, Endomorphism::identity(full(2))); }), ErrorKind::DomainsNotCommutant);
}

TEST(RestrictionSymmetry, Examples) {
  const VnAlgebra b = d2();
  const auto x = restriction_symmetry(pauli_x, b);
  EXPECT_TRUE(x.algebra && x.commutant);
  const auto g = restriction_symmetry(random_unitary(2, 17), b);
  EXPECT_FALSE(g.algebra || g.commutant);
  const auto in = restriction_symmetry(CMatrix::diag({std::polar(1.0, 0.3), std::polar(1.0, -1.1)}), b);
  EXPECT_TRUE(in.algebra && in.commutant);
  EXPECT_EQ(kind_of([&] { restriction_symmetry(2.0 * pauli_x, b); }), ErrorKind::NotUnitary);
}

TEST(CocycleLink, Examples) {
  const VnAlgebra b = d2();
  const VnAlgebra bc = commutant(b);
  const Endomorphism swap = from_unitary(b, pauli_x, Conjugation::ByAdjoint);
  const Endomorphism swap_c = from_unitary(bc, pauli_x, Conjugation::Direct);
  const auto same = cocycle_link(swap, swap, swap_c, 4);
  ASSERT_EQ(same.c.size(), 5u);
  EXPECT_LT(same.residual, 1e-12);

  // theta2 = Ad(W) o theta1 with W in M_2 (x) I_2 on C^4, theta' shared
  Rng rng(5);
  const BlockList blocks{{2, 2}};
  const VnAlgebra m = random_algebra(4, blocks, 21);
  const VnAlgebra mc = commutant(m);
  const CMatrix u = random_normalizing_unitary(blocks, 21, 22);
  const Endomorphism t1 = from_unitary(m, u, Conjugation::ByAdjoint);
  const Endomorphism tp = from_unitary(mc, u, Conjugation::Direct);
  CMatrix w = CMatrix::zeros(4, 4);
  {
    // unitary of the algebra: isometric part of a random element
    for (const auto& x : m.basis()) w.add_scaled(rng.cnormal(), x);
    w = polar_unitary(w);
  }
  ASSERT_LT(m.span_residual(w), 1e-10);
  std::vector<CMatrix> im;
  for (const auto& x : m.basis()) im.push_back(w * t1.apply(x) * w.adjoint());
  const Endomorphism t2 = Endomorphism::make(m, im);
  const auto link = cocycle_link(t1, t2, tp, 6);
  for (std::size_t n = 0; n <= 6; ++n) EXPECT_LT(m.span_residual(link.c[n]), 1e-10);
  // c_1 implements the twist: c_1 theta1(b) c_1^dagger = w theta1(b) w^dagger
  for (const auto& x : m.basis())
    EXPECT_LT(scaled_residual(link.c[1] * t1.apply(x) * link.c[1].adjoint(), w * t1.apply(x) * w.adjoint()), 1e-10);

  EXPECT_EQ(kind_of([&] { cocycle_link(swap, Endomorphism::identity(b), swap_c, 2); }), ErrorKind::NotPairedInput);
}

TEST(Properties, RandomRoundTrips) {
  Rng rng(0x601);
  for (int k = 0; k < 12; ++k) {
    const Instance in = random_instance(rng, 7);
    const auto p = can_pair(in.theta, in.theta_prime, rng.next());
    ASSERT_TRUE(p.paired);
    EXPECT_LT(check_pairing(p.unitary, in.theta, in.theta_prime).relation_b, 1e-8);
    const auto iso = isomorphism_from_pairing(p.unitary, in.theta, in.theta_prime);
    const auto back = pairing_from_isomorphism(iso.unitary, in.theta, in.theta_prime);
    EXPECT_TRUE(back.certificate.paired);
    EXPECT_LT(back.dilation_consistency, 1e-8);
    // trivial multiplier over the powers of the pairing unitary
    std::vector<CMatrix> fam{CMatrix::identity(in.b.ambient_dim())};
    for (int t = 1; t <= 4; ++t) fam.push_back(fam.back() * p.unitary);
    const Multiplier m = extract(fam);
    for (std::size_t s = 0; s <= 4; ++s)
      for (std::size_t t = 0; s + t <= 4; ++t) EXPECT_LT(std::abs(m(s, t) - 1.0), 1e-10);
  }
}

TEST(Properties, RestrictionVerdictsAgree) {
  Rng rng(0x19);
  for (int k = 0; k < 40; ++k) {
    const BlockList blocks = random_block_list(rng, 6);
    const std::uint64_t as = rng.next();
    const std::uint64_t us = rng.next();
    const VnAlgebra b = random_algebra(layout_dim(blocks), blocks, as);
    const CMatrix u = k % 2 ? random_normalizing_unitary(blocks, as, us) : random_unitary(b.ambient_dim(), us);
    const auto v = restriction_symmetry(u, b);
    EXPECT_EQ(v.algebra, v.commutant);
    if (k % 2) EXPECT_TRUE(v.algebra);
  }
}

TEST(Properties, CocycleIdentityOnSplittings) {
  Rng rng(0x66);
  for (int k = 0; k < 6; ++k) {
    const Instance in = random_instance(rng, 6);
    CMatrix w = CMatrix::zeros(in.b.ambient_dim(), in.b.ambient_dim());
    for (const auto& x : in.b.basis()) w.add_scaled(rng.cnormal(), x);
    w = polar_unitary(w);
    std::vector<CMatrix> im;
    for (const auto& x : in.b.basis()) im.push_back(w * in.theta.apply(x) * w.adjoint());
    const Endomorphism t2 = Endomorphism::make(in.b, im);
    const auto link = cocycle_link(in.theta, t2, in.theta_prime, 6);
    std::vector<Endomorphism> pw{Endomorphism::identity(in.b)};
    for (int t = 1; t <= 6; ++t) pw.push_back(compose(in.theta, pw.back()));
    for (std::size_t s = 0; s <= 6; ++s)
      for (std::size_t t = 0; s + t <= 6; ++t)
        EXPECT_LT(scaled_residual(link.c[s + t], link.c[s] * pw[s].apply(link.c[t])), 1e-9);
  }
}
