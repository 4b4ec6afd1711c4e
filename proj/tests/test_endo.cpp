#include <gtest/gtest.h>

#include "vnpair/endo.hpp"
#include "vnpair/error.hpp"

using namespace vnpair;

namespace {

VnAlgebra d2() { return from_generators(2, {CMatrix::unit(2, 0, 0)}); }
VnAlgebra m2() { return from_generators(2, {CMatrix::unit(2, 0, 1)}); }
const CMatrix pauli_x{{0, 1}, {1, 0}};

CMatrix swap_diag(const CMatrix& x) { return CMatrix::diag({x(1, 1), x(0, 0)}); }

// (a, b) -> (a, a) on M2 (+) M2 inside M4
CMatrix copy_first(const CMatrix& x) {
  CMatrix y(4, 4);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) y(i, j) = y(i + 2, j + 2) = x(i, j);
  return y;
}

VnAlgebra m2_plus_m2() {
  std::vector<CMatrix> g;
  for (std::size_t off : {0, 2}) {
    g.push_back(CMatrix::unit(4, off, off));
    g.push_back(CMatrix::unit(4, off, off + 1));
  }
  return from_generators(4, g);
}

template <class F>
Endomorphism from_function(const VnAlgebra& a, F f) {
  std::vector<CMatrix> images;
  for (const auto& b : a.basis()) images.push_back(f(b));
  return Endomorphism::make(a, images);
}

double map_distance(const Endomorphism& f, const Endomorphism& g) {
  double r = 0.0;
  for (const auto& b : f.domain().basis()) r = std::max(r, scaled_residual(f.apply(b), g.apply(b)));
  return r;
}

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::InternalError;
}

}  // namespace

TEST(Make, Examples) {
  const auto id = Endomorphism::identity(m2());
  EXPECT_NO_THROW(Endomorphism::make(m2(), id.images()));

  // the three laws for the swap, checked on the diagonal matrix units directly
  const CMatrix e11 = CMatrix::unit(2, 0, 0), e22 = CMatrix::unit(2, 1, 1);
  EXPECT_EQ(swap_diag(e11), e22);
  EXPECT_EQ(swap_diag(e11 * e22), swap_diag(e11) * swap_diag(e22));
  EXPECT_EQ(swap_diag(e11 + e22), CMatrix::identity(2));
  const auto sw = from_function(d2(), swap_diag);
  EXPECT_TRUE(is_automorphism(sw));

  const auto cf = from_function(m2_plus_m2(), copy_first);
  EXPECT_FALSE(is_faithful(cf));
  // kernel is 0 (+) M2: dimension 8 - rank 4
  EXPECT_EQ(faithfulness(cf).rank, 4u);
}

TEST(Make, NamedFailures) {
  const VnAlgebra a = d2();
  EXPECT_EQ(kind_of([&] { from_function(a, [](const CMatrix& x) { return 2.0 * x; }); }), ErrorKind::NotUnital);
  // x -> trace(x)/2 I is unital and star but not multiplicative
  EXPECT_EQ(kind_of([&] { from_function(a, [](const CMatrix& x) { return 0.5 * x.trace() * CMatrix::identity(2); }); }),
            ErrorKind::NotMultiplicative);
  EXPECT_EQ(kind_of([&] { from_function(m2(), [](const CMatrix& x) { return x.transpose(); }); }),
            ErrorKind::NotMultiplicative);
  // similarity by a non-unitary invertible is a unital homomorphism that breaks adjoints
  const CMatrix s = CMatrix::diag({2.0, 1.0}), s_inv = CMatrix::diag({0.5, 1.0});
  EXPECT_EQ(kind_of([&] { from_function(m2(), [&](const CMatrix& x) { return s * x * s_inv; }); }), ErrorKind::NotStar);
  EXPECT_EQ(kind_of([&] { from_function(a, [](const CMatrix& x) { return x + CMatrix::unit(2, 0, 1) * x(0, 0); }); }),
            ErrorKind::ImageOutsideAlgebra);
  EXPECT_EQ(kind_of([&] { Endomorphism::make(a, {CMatrix::identity(2)}); }), ErrorKind::DimensionMismatch);
}

TEST(FromUnitary, Examples) {
  const auto sw = from_unitary(d2(), pauli_x, Conjugation::ByAdjoint);
  EXPECT_LT(map_distance(sw, from_function(d2(), swap_diag)), 1e-14);

  const CMatrix u = random_unitary(2, 3);
  const auto inner = from_unitary(m2(), u, Conjugation::Direct);
  EXPECT_TRUE(is_automorphism(inner));

  const double s = 1.0 / std::sqrt(2.0);
  const CMatrix had{{s, s}, {s, -s}};
  EXPECT_EQ(kind_of([&] { from_unitary(d2(), had, Conjugation::ByAdjoint); }), ErrorKind::AlgebraNotInvariant);
  EXPECT_EQ(kind_of([&] { from_unitary(d2(), 2.0 * pauli_x, Conjugation::ByAdjoint); }), ErrorKind::NotUnitary);
}

TEST(Compose, Examples) {
  const auto sw = from_function(d2(), swap_diag);
  EXPECT_LT(map_distance(power(sw, 2), Endomorphism::identity(d2())), 1e-14);
  EXPECT_LT(map_distance(compose(sw, Endomorphism::identity(d2())), sw), 1e-14);
  const auto cf = from_function(m2_plus_m2(), copy_first);
  EXPECT_LT(map_distance(power(cf, 2), cf), 1e-14);
  EXPECT_LT(map_distance(power(cf, 0), Endomorphism::identity(cf.domain())), 1e-14);
  EXPECT_EQ(kind_of([&] { compose(sw, Endomorphism::identity(m2_plus_m2())); }), ErrorKind::DomainMismatch);
  EXPECT_EQ(kind_of([&] { compose(sw, Endomorphism::identity(from_generators(2, {}))); }), ErrorKind::DomainMismatch);
}

TEST(FromGeneratorImages, MatchesDirectConstruction) {
  const auto sw = from_generator_images(d2(), {CMatrix::unit(2, 0, 0)}, {CMatrix::unit(2, 1, 1)});
  EXPECT_LT(map_distance(sw, from_function(d2(), swap_diag)), 1e-13);
  const VnAlgebra a = m2_plus_m2();
  const auto cf = from_generator_images(
      a, {CMatrix::unit(4, 0, 1), CMatrix::unit(4, 2, 3), CMatrix::unit(4, 0, 0), CMatrix::unit(4, 2, 2)},
      {copy_first(CMatrix::unit(2, 0, 1)), CMatrix::zeros(4, 4), copy_first(CMatrix::unit(2, 0, 0)),
       CMatrix::zeros(4, 4)});
  EXPECT_FALSE(is_faithful(cf));
  EXPECT_LT(map_distance(cf, from_function(a, copy_first)), 1e-13);
  // generators that do not generate the domain
  EXPECT_EQ(kind_of([&] { from_generator_images(a, {CMatrix::unit(4, 0, 1)}, {CMatrix::unit(4, 0, 1)}); }),
            ErrorKind::ValidationFailure);
}

TEST(Properties, InjectiveIffSurjectiveAndPowerLaw) {
  Rng rng(41);
  for (int trial = 0; trial < 30; ++trial) {
    const BlockList blocks = random_block_list(rng, 7);
    const std::size_t n = layout_dim(blocks);
    const std::uint64_t as = rng.next();
    const VnAlgebra b = random_algebra(n, blocks, as);
    const bool faithful = trial % 2 == 0;
    const Endomorphism f = random_endomorphism(b, blocks, as, rng.next(), faithful);
    const auto rep = faithfulness(f);
    EXPECT_EQ(rep.injective, rep.surjective);
    if (faithful) EXPECT_TRUE(is_automorphism(f));
    const std::size_t j = rng.below(3), k = rng.below(3);
    EXPECT_LT(map_distance(power(f, j + k), compose(power(f, j), power(f, k))), 1e-10);
  }
}

TEST(Properties, InverseDirectionRecoversIdentity) {
  Rng rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    const BlockList blocks = random_block_list(rng, 8);
    const std::size_t n = layout_dim(blocks);
    const std::uint64_t as = rng.next();
    const VnAlgebra b = random_algebra(n, blocks, as);
    const CMatrix u = random_normalizing_unitary(blocks, as, rng.next());
    const auto f = from_unitary(b, u, Conjugation::Direct);
    const auto g = from_unitary(b, u, Conjugation::ByAdjoint);
    EXPECT_LT(map_distance(compose(f, g), Endomorphism::identity(b)), 1e-10);
    EXPECT_LT(map_distance(compose(g, f), Endomorphism::identity(b)), 1e-10);
  }
}
