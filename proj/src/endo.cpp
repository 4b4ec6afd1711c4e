#include "vnpair/endo.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>

#include "vnpair/error.hpp"

namespace vnpair {

AlgebraMap::AlgebraMap(VnAlgebra domain, std::vector<CMatrix> images)
    : domain_(std::move(domain)), images_(std::move(images)) {
  if (images_.size() != domain_.dim()) fail(ErrorKind::DimensionMismatch, "one image per basis element expected");
  target_dim_ = images_.empty() ? 0 : images_.front().rows();
  auto st = std::make_shared<CMatrix>(target_dim_ * target_dim_, images_.size());
  for (std::size_t k = 0; k < images_.size(); ++k) {
    if (images_[k].rows() != target_dim_ || images_[k].cols() != target_dim_)
      fail(ErrorKind::DimensionMismatch, "images must share one square shape");
    for (std::size_t e = 0; e < images_[k].size(); ++e) (*st)(e, k) = images_[k].data()[e];
  }
  stacked_ = std::move(st);
}

CMatrix AlgebraMap::apply_coefficients(const std::vector<cd>& c) const {
  if (c.size() != images_.size()) fail(ErrorKind::DimensionMismatch, "coefficient count");
  return (*stacked_ * CMatrix::column(c)).reshaped(target_dim_, target_dim_);
}

CMatrix AlgebraMap::apply(const CMatrix& x) const { return apply_coefficients(domain_.coefficients(x)); }

AlgebraMap::HomResiduals AlgebraMap::hom_residuals() const {
  HomResiduals r;
  const auto& b = domain_.basis();
  r.unital = scaled_residual(apply(CMatrix::identity(domain_.ambient_dim())), CMatrix::identity(target_dim_));
  for (std::size_t i = 0; i < b.size(); ++i) {
    r.star = std::max(r.star, scaled_residual(apply(b[i].adjoint()), images_[i].adjoint()));
    for (std::size_t j = 0; j < b.size(); ++j)
      r.multiplicative = std::max(r.multiplicative, scaled_residual(apply(b[i] * b[j]), images_[i] * images_[j]));
  }
  return r;
}

Endomorphism Endomorphism::make(VnAlgebra domain, std::vector<CMatrix> images, Tolerance tol) {
  AlgebraMap m(std::move(domain), std::move(images));
  if (m.target_dim() != m.domain().ambient_dim())
    fail(ErrorKind::DimensionMismatch, "images must live in the ambient space of the domain");
  double outside = 0.0;
  for (const auto& im : m.images()) outside = std::max(outside, m.domain().span_residual(im));
  if (outside > tol.eps) fail(ErrorKind::ImageOutsideAlgebra, "an image leaves the domain span", outside);
  const auto r = m.hom_residuals();
  if (r.unital > tol.eps) fail(ErrorKind::NotUnital, "image of the identity is not the identity", r.unital);
  if (r.star > tol.eps) fail(ErrorKind::NotStar, "adjoints are not preserved", r.star);
  if (r.multiplicative > tol.eps) fail(ErrorKind::NotMultiplicative, "products are not preserved", r.multiplicative);
  return Endomorphism(std::move(m));
}

Endomorphism Endomorphism::identity(const VnAlgebra& domain) {
  return Endomorphism(AlgebraMap(domain, domain.basis()));
}

Endomorphism from_unitary(const VnAlgebra& b, const CMatrix& u, Conjugation dir, Tolerance tol) {
  if (u.rows() != b.ambient_dim() || !u.is_square()) fail(ErrorKind::DimensionMismatch, "unitary shape");
  const double ur = unitarity_residual(u);
  if (ur > tol.eps) fail(ErrorKind::NotUnitary, "conjugating matrix is not unitary", ur);
  const CMatrix ua = u.adjoint();
  std::vector<CMatrix> images;
  double worst = 0.0;
  for (const auto& x : b.basis()) {
    images.push_back(dir == Conjugation::ByAdjoint ? ua * x * u : u * x * ua);
    worst = std::max(worst, b.span_residual(images.back()));
  }
  if (worst > tol.eps) fail(ErrorKind::AlgebraNotInvariant, "conjugation leaves the algebra", worst);
  return Endomorphism::make(b, std::move(images), tol);
}

Endomorphism from_generator_images(const VnAlgebra& domain, const std::vector<CMatrix>& gens,
                                   const std::vector<CMatrix>& images, Tolerance tol) {
  if (gens.size() != images.size()) fail(ErrorKind::DimensionMismatch, "one image per generator expected");
  const std::size_t n = domain.ambient_dim();
  struct Pair {
    CMatrix w, v;
  };
  std::vector<Pair> letters;
  for (std::size_t k = 0; k < gens.size(); ++k) {
    if (gens[k].rows() != n || gens[k].cols() != n || images[k].rows() != n || images[k].cols() != n)
      fail(ErrorKind::DimensionMismatch, "generator or image shape");
    const double nrm = frobenius(gens[k]);
    if (nrm == 0.0) continue;
    letters.push_back({(1.0 / nrm) * gens[k], (1.0 / nrm) * images[k]});
    letters.push_back({letters.back().w.adjoint(), letters.back().v.adjoint()});
  }
  // orthonormal words together with their images, carried through the same Gram-Schmidt steps
  const double s0 = 1.0 / std::sqrt(static_cast<double>(n));
  std::vector<Pair> basis{{s0 * CMatrix::identity(n), s0 * CMatrix::identity(n)}};
  std::deque<std::size_t> queue{0};
  const double cut = std::max(10.0 * tol.eps, 1e-12);
  while (!queue.empty()) {
    const std::size_t w = queue.front();
    queue.pop_front();
    for (const auto& s : letters) {
      CMatrix cw = s.w * basis[w].w;
      CMatrix cv = s.v * basis[w].v;
      const double nrm = frobenius(cw);
      if (nrm <= cut) continue;
      cw *= 1.0 / nrm;
      cv *= 1.0 / nrm;
      for (int pass = 0; pass < 2; ++pass)
        for (const auto& e : basis) {
          const cd c = hs_inner(e.w, cw);
          cw.add_scaled(-c, e.w);
          cv.add_scaled(-c, e.v);
        }
      const double rn = frobenius(cw);
      if (rn <= cut) continue;
      basis.push_back({(1.0 / rn) * cw, (1.0 / rn) * cv});
      queue.push_back(basis.size() - 1);
      if (basis.size() > n * n) fail(ErrorKind::NonConvergence, "word span exceeds n^2");
    }
  }
  if (basis.size() != domain.dim())
    fail(ErrorKind::ValidationFailure, "generators span a " + std::to_string(basis.size()) +
                                           "-dimensional algebra, domain has dimension " +
                                           std::to_string(domain.dim()));
  std::vector<CMatrix> out;
  for (const auto& b : domain.basis()) {
    CMatrix img(n, n);
    for (const auto& e : basis) img.add_scaled(hs_inner(e.w, b), e.v);
    out.push_back(std::move(img));
  }
  return Endomorphism::make(domain, std::move(out), tol);
}

Endomorphism compose(const Endomorphism& f, const Endomorphism& g, Tolerance tol) {
  if (f.domain().ambient_dim() != g.domain().ambient_dim() ||
      (!(f.domain() == g.domain()) && !equals(f.domain(), g.domain(), tol).equal))
    fail(ErrorKind::DomainMismatch, "compose needs a common domain");
  std::vector<CMatrix> images;
  for (const auto& x : g.images()) images.push_back(f.apply(x));
  return Endomorphism::make(g.domain(), std::move(images), tol);
}

Endomorphism power(const Endomorphism& f, std::size_t k, Tolerance tol) {
  Endomorphism r = Endomorphism::identity(f.domain());
  for (std::size_t i = 0; i < k; ++i) r = compose(f, r, tol);
  return r;
}

FaithfulnessReport faithfulness(const Endomorphism& f, Tolerance tol) {
  const std::size_t d = f.domain().dim();
  CMatrix k(d, d);
  for (std::size_t c = 0; c < d; ++c) {
    const auto coeffs = f.domain().coefficients(f.images()[c]);
    for (std::size_t r = 0; r < d; ++r) k(r, c) = coeffs[r];
  }
  const auto s = singular_values(k);
  FaithfulnessReport rep;
  rep.smallest_singular = s.empty() ? 0.0 : s.back();
  rep.rank = rank(k, tol);
  rep.injective = rep.smallest_singular > tol.eps;
  rep.surjective = rep.rank == d;
  return rep;
}

bool is_faithful(const Endomorphism& f, Tolerance tol) { return faithfulness(f, tol).injective; }

bool is_automorphism(const Endomorphism& f, Tolerance tol) {
  const auto rep = faithfulness(f, tol);
  if (rep.injective != rep.surjective)
    fail(ErrorKind::InternalError, "injectivity and surjectivity tests disagree", rep.smallest_singular);
  return rep.surjective;
}

}  // namespace vnpair

namespace vnpair {

namespace {

// random element of the unitary group of (+) M_{a_i} (x) I_{m_i}, or of (+) I_{a_i} (x) M_{m_i}
CMatrix layout_unitary(const BlockList& blocks, Rng& rng, bool commutant_side) {
  const std::size_t n = layout_dim(blocks);
  CMatrix u(n, n);
  std::size_t off = 0;
  for (auto [a, m] : blocks) {
    const std::size_t k = commutant_side ? m : a;
    const CMatrix w = random_unitary(k, rng.next());
    for (std::size_t p = 0; p < a; ++p)
      for (std::size_t q = 0; q < a; ++q)
        for (std::size_t r = 0; r < m; ++r)
          for (std::size_t s = 0; s < m; ++s) {
            const cd v = commutant_side ? (p == q ? w(r, s) : cd{}) : (r == s ? w(p, q) : cd{});
            if (v != cd{}) u(off + p * m + r, off + q * m + s) = v;
          }
    off += a * m;
  }
  return u;
}

}  // namespace

CMatrix random_normalizing_unitary(const BlockList& blocks, std::uint64_t alg_seed, std::uint64_t seed) {
  const std::size_t n = layout_dim(blocks);
  Rng rng(seed);
  // shuffle blocks within each class of equal shape
  std::vector<std::size_t> perm(blocks.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  for (std::size_t i = perm.size(); i > 1; --i) {
    const std::size_t j = rng.below(i);
    if (blocks[perm[i - 1]] == blocks[perm[j]]) std::swap(perm[i - 1], perm[j]);
  }
  std::vector<std::size_t> offs(blocks.size());
  for (std::size_t i = 1; i < blocks.size(); ++i) offs[i] = offs[i - 1] + blocks[i - 1].first * blocks[i - 1].second;
  CMatrix p(n, n);
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const std::size_t sz = blocks[i].first * blocks[i].second;
    for (std::size_t e = 0; e < sz; ++e) p(offs[perm[i]] + e, offs[i] + e) = 1.0;
  }
  const CMatrix w = random_unitary(n, alg_seed);
  const CMatrix layout = layout_unitary(blocks, rng, false) * layout_unitary(blocks, rng, true) * p;
  return w * layout * w.adjoint();
}

Endomorphism random_endomorphism(const VnAlgebra& domain, const BlockList& blocks, std::uint64_t alg_seed,
                                 std::uint64_t seed, bool faithful, Tolerance tol) {
  const std::size_t n = layout_dim(blocks);
  if (domain.ambient_dim() != n) fail(ErrorKind::DimensionMismatch, "block list does not match the domain");
  Rng rng(seed);
  // sources[j] lists the source blocks stacked inside target block j
  std::vector<std::vector<std::size_t>> sources;
  for (int attempt = 0; attempt < 16; ++attempt) {
    sources.assign(blocks.size(), {});
    for (std::size_t j = 0; j < blocks.size(); ++j) {
      std::size_t left = blocks[j].first;
      for (int guard = 0; left > 0 && guard < 64; ++guard) {
        const std::size_t i = rng.below(blocks.size());
        if (blocks[i].first <= left) {
          sources[j].push_back(i);
          left -= blocks[i].first;
        }
      }
      if (left > 0) sources[j] = {j};
    }
    if (!faithful) break;
    std::vector<bool> used(blocks.size(), false);
    for (const auto& s : sources)
      for (auto i : s) used[i] = true;
    if (std::all_of(used.begin(), used.end(), [](bool b) { return b; })) break;
    sources.clear();
  }
  if (sources.empty()) {
    sources.resize(blocks.size());
    for (std::size_t j = 0; j < blocks.size(); ++j) sources[j] = {j};
  }
  const CMatrix w = random_unitary(n, alg_seed);
  std::vector<CMatrix> gens, images;
  for (std::size_t i = 0; i < blocks.size(); ++i)
    for (std::size_t p = 0; p < blocks[i].first; ++p)
      for (std::size_t q = 0; q < blocks[i].first; ++q) {
        CMatrix img(n, n);
        for (std::size_t j = 0; j < blocks.size(); ++j) {
          std::size_t o = 0;
          for (auto s : sources[j]) {
            if (s == i) img += block_unit(blocks, j, o + p, o + q);
            o += blocks[s].first;
          }
        }
        gens.push_back(w * block_unit(blocks, i, p, q) * w.adjoint());
        images.push_back(w * img * w.adjoint());
      }
  const Endomorphism base = from_generator_images(domain, gens, images, tol);
  const CMatrix inner = w * layout_unitary(blocks, rng, false) * w.adjoint();
  return compose(base, from_unitary(domain, inner, Conjugation::Direct, tol), tol);
}

}  // namespace vnpair
