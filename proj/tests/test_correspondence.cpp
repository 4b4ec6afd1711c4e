#include <gtest/gtest.h>

#include "oracle.hpp"
#include "vnpair/correspondence.hpp"
#include "vnpair/error.hpp"

using namespace vnpair;

namespace {

VnAlgebra d2() { return from_generators(2, {CMatrix::unit(2, 0, 0)}); }
VnAlgebra m2() { return from_generators(2, {CMatrix::unit(2, 0, 1)}); }
const CMatrix pauli_x{{0, 1}, {1, 0}};

Endomorphism swap_d2() { return from_unitary(d2(), pauli_x, Conjugation::ByAdjoint); }

Endomorphism copy_first() {
  std::vector<CMatrix> g;
  for (std::size_t off : {0, 2}) {
    g.push_back(CMatrix::unit(4, off, off));
    g.push_back(CMatrix::unit(4, off, off + 1));
  }
  const VnAlgebra a = from_generators(4, g);
  std::vector<CMatrix> images;
  for (const auto& x : a.basis()) {
    CMatrix y(4, 4);
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j) y(i, j) = y(i + 2, j + 2) = x(i, j);
    images.push_back(y);
  }
  return Endomorphism::make(a, images);
}

// Gram of raw vectors x_i (x) e_p, assembled without the library's tensor code
Eigen::MatrixXcd raw_gram(const Correspondence& e, const Correspondence& f) {
  const auto& xs = e.element_space();
  const std::size_t h = f.carrier_dim(), n = xs.size() * h;
  Eigen::MatrixXcd g(n, n);
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = 0; j < xs.size(); ++j) {
      const CMatrix m = f.rho().apply(xs[i].adjoint() * xs[j]);
      for (std::size_t p = 0; p < h; ++p)
        for (std::size_t q = 0; q < h; ++q) g(i * h + p, j * h + q) = m(p, q);
    }
  return g;
}

struct Pair {
  Correspondence e, f;
};

FramedAlgebra random_framed(Rng& rng, std::size_t max_ambient) {
  const BlockList blocks = random_block_list(rng, max_ambient);
  return FramedAlgebra::random(blocks, rng.next());
}

Pair random_pair(Rng& rng, std::size_t max_ambient, std::size_t max_carrier) {
  const auto fa = random_framed(rng, max_ambient);
  const auto fb = random_framed(rng, max_ambient);
  const auto fc = random_framed(rng, max_ambient);
  Correspondence e = random_correspondence(fa, fb, max_carrier, rng.next());
  Correspondence f = random_correspondence(fb, fc, max_carrier, rng.next());
  return {e, f};
}

}  // namespace

TEST(OfEndomorphism, Examples) {
  const auto id = of_endomorphism(Endomorphism::identity(m2()));
  EXPECT_EQ(id.element_space().size(), 4u);
  EXPECT_EQ(id.carrier_dim(), 2u);
  const VnAlgebra full2 = m2();
  for (const auto& b : full2.basis()) EXPECT_LT(frobenius_diff(id.rho().apply(b), b), 1e-14);

  const auto sw = of_endomorphism(swap_d2());
  const VnAlgebra dc = commutant(d2());
  std::vector<CMatrix> p = dc.basis(), q = dc.basis();
  EXPECT_EQ(sw.element_space().size(), oracle::intertwiner_dim(p, q, 2, 2));
  EXPECT_EQ(sw.element_space().size(), 2u);
  for (const auto& x : sw.element_space()) EXPECT_LT(d2().span_residual(x), 1e-12);

  const auto cf = of_endomorphism(copy_first());
  EXPECT_LT(cf.validate().worst(), 1e-10);
  EXPECT_FALSE(is_left_faithful(cf));
}

TEST(IntertwinerSpace, Examples) {
  const auto id = intertwiner_space(Endomorphism::identity(m2()));
  ASSERT_EQ(id.element_space().size(), 1u);
  EXPECT_NEAR(std::abs(hs_inner(id.element_space()[0], CMatrix::identity(2))), std::sqrt(2.0), 1e-12);

  const auto sw = intertwiner_space(swap_d2());
  ASSERT_EQ(sw.element_space().size(), 2u);
  for (const auto& x : sw.element_space()) {
    EXPECT_LT(std::abs(x(0, 0)) + std::abs(x(1, 1)), 1e-12);
  }

  const std::size_t n = 3;
  const CMatrix u = random_unitary(n, 5);
  const VnAlgebra full = from_generators(n, {CMatrix::unit(n, 0, 1), CMatrix::unit(n, 1, 2)});
  // b -> u^dagger b u is intertwined by u^dagger; b -> u b u^dagger by u
  const auto ad = intertwiner_space(from_unitary(full, u, Conjugation::ByAdjoint));
  ASSERT_EQ(ad.element_space().size(), 1u);
  EXPECT_NEAR(std::abs(hs_inner(ad.element_space()[0], u.adjoint())), std::sqrt(double(n)), 1e-10);
  const auto ad2 = intertwiner_space(from_unitary(full, u, Conjugation::Direct));
  ASSERT_EQ(ad2.element_space().size(), 1u);
  EXPECT_NEAR(std::abs(hs_inner(ad2.element_space()[0], u)), std::sqrt(double(n)), 1e-10);
}

TEST(Commutant, Examples) {
  const auto e = of_endomorphism(swap_d2());
  EXPECT_TRUE(commutant(commutant(e)) == e);
  EXPECT_TRUE(commutant(e) == intertwiner_space(swap_d2()));
  const auto cf = copy_first();
  EXPECT_TRUE(commutant(of_endomorphism(cf)) == intertwiner_space(cf));

  const VnAlgebra b = random_algebra(4, {{1, 2}, {2, 1}}, 9);
  const auto c = commutant(identity_correspondence(b));
  const auto idc = identity_correspondence(commutant(b));
  const auto iso = find_isomorphism(c, idc);
  ASSERT_TRUE(iso.found);
  EXPECT_LT(iso.residual, 1e-9);
}

TEST(Tensor, IdentityOnTheLeftIsCanonical) {
  Rng rng(12);
  const auto fb = FramedAlgebra::random({{2, 1}, {1, 2}}, 3);
  const auto fc = FramedAlgebra::random({{1, 3}}, 4);
  const auto f = random_correspondence(fb, fc, 8, 77);
  const auto t = tensor_product(identity_correspondence(fb.algebra), f);
  EXPECT_EQ(t.result.carrier_dim(), f.carrier_dim());
  // b (x) h -> rho(b) h
  CMatrix raw(f.carrier_dim(), t.raw_dim());
  for (std::size_t i = 0; i < t.left_elements.size(); ++i) {
    const CMatrix m = f.rho().apply(t.left_elements[i]);
    raw.set_block(0, i * f.carrier_dim(), m);
  }
  const CMatrix u = raw * t.lift;
  EXPECT_LT(bimodule_unitary_residual(t.result, f, u), 1e-10);
  EXPECT_TRUE(find_isomorphism(t.result, f).found);
}

TEST(Tensor, AutomorphismsCompose) {
  const VnAlgebra b = random_algebra(4, {{1, 2}, {1, 2}}, 21);
  const auto fb = BlockList{{1, 2}, {1, 2}};
  const auto theta = random_endomorphism(b, fb, 21, 1, true);
  const auto psi = random_endomorphism(b, fb, 21, 2, true);
  const auto t = tensor(of_endomorphism(theta), of_endomorphism(psi));
  EXPECT_EQ(t.carrier_dim(), 4u);
  const auto iso = find_isomorphism(t, of_endomorphism(compose(psi, theta)));
  EXPECT_TRUE(iso.found);
}

TEST(Tensor, GramRankExample) {
  const auto e = of_endomorphism(swap_d2());
  const auto t = tensor_product(e, e);
  EXPECT_EQ(t.raw_dim(), 4u);
  EXPECT_EQ(oracle::psd_rank(raw_gram(e, e)), 2u);
  EXPECT_EQ(t.result.carrier_dim(), 2u);
}

TEST(Tensor, AlgebraMismatch) {
  const auto e = of_endomorphism(swap_d2());
  const auto f = identity_correspondence(m2());
  try {
    tensor(e, f);
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.kind(), ErrorKind::AlgebraMismatch);
  }
}

TEST(TensorCommutantIso, Examples) {
  const auto id = identity_correspondence(m2());
  const auto s = tensor_commutant_iso(id, id);
  EXPECT_LT(s.isometry, 1e-10);
  EXPECT_LT(s.intertwining, 1e-10);
  EXPECT_EQ(s.unitary.rows(), 2u);

  const auto sw = of_endomorphism(swap_d2());
  const auto r = tensor_commutant_iso(sw, of_endomorphism(Endomorphism::identity(d2())));
  EXPECT_EQ(r.unitary.rows(), 2u);
  EXPECT_LT(r.intertwining, 1e-10);
}

TEST(FindIsomorphism, Examples) {
  const auto sw = of_endomorphism(swap_d2());
  const auto self = find_isomorphism(sw, sw);
  EXPECT_TRUE(self.found);

  const auto id = of_endomorphism(Endomorphism::identity(d2()));
  const auto no = find_isomorphism(sw, id);
  EXPECT_FALSE(no.found);
  EXPECT_FALSE(no.table_e == no.table_f);
  // no nonzero bimodule map exists at all
  std::vector<CMatrix> p, q;
  const VnAlgebra diag2 = d2(), diag2c = commutant(diag2);
  for (const auto& b : diag2.basis()) {
    p.push_back(id.rho().apply(b));
    q.push_back(sw.rho().apply(b));
  }
  for (const auto& b : diag2c.basis()) {
    p.push_back(b);
    q.push_back(b);
  }
  EXPECT_EQ(oracle::intertwiner_dim(p, q, 2, 2), 0u);

  const BlockList blocks{{2, 1}, {1, 2}};
  const VnAlgebra b = random_algebra(4, blocks, 31);
  const auto theta = random_endomorphism(b, blocks, 31, 4, false);
  // an element unitary of b: drop the commutant part by projecting the frame-built unitary
  Rng rng(3);
  CMatrix herm(4, 4);
  for (const auto& x : b.basis()) herm.add_scaled(rng.cnormal(), x);
  herm = herm + herm.adjoint();
  const auto eig = herm_eig(herm);
  std::vector<cd> phases;
  for (double v : eig.values) phases.push_back(std::polar(1.0, v));
  const CMatrix wb = eig.vectors * CMatrix::diag(phases) * eig.vectors.adjoint();
  ASSERT_LT(b.span_residual(wb), 1e-10);
  const auto perturbed = compose(from_unitary(b, wb, Conjugation::Direct), theta);
  const auto e1 = of_endomorphism(perturbed), e2 = of_endomorphism(theta);
  EXPECT_LT(bimodule_unitary_residual(e1, e2, wb.adjoint()), 1e-10);
  const auto found = find_isomorphism(e1, e2);
  ASSERT_TRUE(found.found);
  EXPECT_LT(found.residual, 1e-9);
}

TEST(Properties, InvolutionFaithfulnessAndDimensionLaw) {
  Rng rng(77);
  for (int trial = 0; trial < 25; ++trial) {
    const auto fa = random_framed(rng, 5);
    const auto fb = random_framed(rng, 5);
    const auto e = random_correspondence(fa, fb, 10, rng.next());
    EXPECT_TRUE(commutant(commutant(e)) == e);
    EXPECT_EQ(is_left_faithful(e), is_strongly_full(commutant(e)));
    EXPECT_EQ(is_left_faithful(commutant(e)), is_strongly_full(e));

    const auto sig = block_decompose(e.right_commutant());
    std::size_t predicted = 0;
    for (std::size_t j = 0; j < sig.blocks.size(); ++j) {
      const double hj = e.rho_prime().apply(sig.central_projections[j]).trace().real() / double(sig.blocks[j].first);
      predicted += sig.blocks[j].second * static_cast<std::size_t>(std::llround(hj));
    }
    EXPECT_EQ(e.element_space().size(), predicted);
  }
}

TEST(Properties, TensorCarrierIsGramRank) {
  Rng rng(78);
  for (int trial = 0; trial < 15; ++trial) {
    const auto [e, f] = random_pair(rng, 4, 8);
    const auto t = tensor_product(e, f);
    EXPECT_EQ(t.result.carrier_dim(), oracle::psd_rank(raw_gram(e, f)));
    EXPECT_LE(t.result.carrier_dim(), t.raw_dim());
  }
}

TEST(Properties, AntiMultiplicativity) {
  Rng rng(79);
  for (int trial = 0; trial < 15; ++trial) {
    const auto [e, f] = random_pair(rng, 4, 8);
    const auto s = tensor_commutant_iso(e, f);
    EXPECT_LT(s.isometry, 1e-8);
    EXPECT_LT(s.intertwining, 1e-8);
  }
}
