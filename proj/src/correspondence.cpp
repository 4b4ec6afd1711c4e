#include "vnpair/correspondence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>

#include "vnpair/error.hpp"

namespace vnpair {

struct Correspondence::Impl {
  VnAlgebra left, left_comm, right, right_comm;
  AlgebraMap rho, rho_prime;
  std::size_t h = 0;
  Tolerance tol;
  mutable std::once_flag once;
  mutable std::vector<CMatrix> elements;
};

namespace {

const Correspondence::Impl& must(const std::shared_ptr<const Correspondence::Impl>& p) {
  if (!p) fail(ErrorKind::InternalError, "empty correspondence");
  return *p;
}

std::shared_ptr<Correspondence::Impl> new_impl(VnAlgebra left, VnAlgebra left_comm, VnAlgebra right,
                                               VnAlgebra right_comm, AlgebraMap rho, AlgebraMap rho_prime,
                                               Tolerance tol) {
  auto p = std::make_shared<Correspondence::Impl>();
  p->left = std::move(left);
  p->left_comm = std::move(left_comm);
  p->right = std::move(right);
  p->right_comm = std::move(right_comm);
  p->rho = std::move(rho);
  p->rho_prime = std::move(rho_prime);
  p->h = p->rho.target_dim();
  p->tol = tol;
  return p;
}

}  // namespace

const VnAlgebra& Correspondence::left() const { return must(impl_).left; }
const VnAlgebra& Correspondence::left_commutant() const { return must(impl_).left_comm; }
const VnAlgebra& Correspondence::right() const { return must(impl_).right; }
const VnAlgebra& Correspondence::right_commutant() const { return must(impl_).right_comm; }
const AlgebraMap& Correspondence::rho() const { return must(impl_).rho; }
const AlgebraMap& Correspondence::rho_prime() const { return must(impl_).rho_prime; }
std::size_t Correspondence::carrier_dim() const { return must(impl_).h; }
Tolerance Correspondence::tolerance() const { return must(impl_).tol; }

const std::vector<CMatrix>& Correspondence::element_space() const {
  const Impl& im = must(impl_);
  std::call_once(im.once, [&im] {
    std::vector<CMatrix> p, q;
    for (std::size_t k = 0; k < im.right_comm.dim(); ++k) {
      p.push_back(im.rho_prime.images()[k]);
      q.push_back(im.right_comm.basis()[k]);
    }
    im.elements = intertwiner_space(p, q, im.h, im.right.ambient_dim(), im.tol);
  });
  return im.elements;
}

double Correspondence::Validation::worst() const {
  return std::max({rho.worst(), rho_prime.worst(), commuting, inner_products, nondegenerate ? 0.0 : 1.0});
}

Correspondence::Validation Correspondence::validate() const {
  const Impl& im = must(impl_);
  Validation v;
  v.rho = im.rho.hom_residuals();
  v.rho_prime = im.rho_prime.hom_residuals();
  for (const auto& a : im.rho.images())
    for (const auto& b : im.rho_prime.images()) v.commuting = std::max(v.commuting, scaled_residual(a * b, b * a));
  const auto& e = element_space();
  if (!e.empty()) v.span_rank = rank(hstack(e), im.tol);
  v.nondegenerate = v.span_rank == im.h;
  for (const auto& x : e) {
    const CMatrix xa = x.adjoint();
    for (const auto& y : e) v.inner_products = std::max(v.inner_products, im.right.span_residual(xa * y));
  }
  return v;
}

bool Correspondence::operator==(const Correspondence& o) const {
  const Impl &a = must(impl_), &b = must(o.impl_);
  return a.left == b.left && a.left_comm == b.left_comm && a.right == b.right && a.right_comm == b.right_comm &&
         a.rho == b.rho && a.rho_prime == b.rho_prime;
}

Correspondence Correspondence::make(VnAlgebra left, VnAlgebra left_commutant, VnAlgebra right,
                                    VnAlgebra right_commutant, AlgebraMap rho, AlgebraMap rho_prime, Tolerance tol) {
  if (!(rho.domain() == left) || !(rho_prime.domain() == right_commutant))
    fail(ErrorKind::AlgebraMismatch, "representation domains must be the stored algebras");
  if (rho.target_dim() != rho_prime.target_dim()) fail(ErrorKind::DimensionMismatch, "representations act on different carriers");
  if (left.ambient_dim() != left_commutant.ambient_dim() || right.ambient_dim() != right_commutant.ambient_dim())
    fail(ErrorKind::DimensionMismatch, "commutant ambient dimension");
  Correspondence c;
  c.impl_ = new_impl(std::move(left), std::move(left_commutant), std::move(right), std::move(right_commutant),
                     std::move(rho), std::move(rho_prime), tol);
  const auto v = c.validate();
  if (v.rho.unital > tol.eps || v.rho_prime.unital > tol.eps)
    fail(ErrorKind::NotUnital, "representation is not unital", std::max(v.rho.unital, v.rho_prime.unital));
  if (v.rho.star > tol.eps || v.rho_prime.star > tol.eps)
    fail(ErrorKind::NotStar, "representation does not preserve adjoints", std::max(v.rho.star, v.rho_prime.star));
  if (v.rho.multiplicative > tol.eps || v.rho_prime.multiplicative > tol.eps)
    fail(ErrorKind::NotMultiplicative, "representation does not preserve products",
         std::max(v.rho.multiplicative, v.rho_prime.multiplicative));
  if (v.commuting > tol.eps) fail(ErrorKind::ValidationFailure, "representations do not commute", v.commuting);
  if (!v.nondegenerate)
    fail(ErrorKind::ValidationFailure, "element space does not span the carrier (rank " + std::to_string(v.span_rank) +
                                           " of " + std::to_string(c.carrier_dim()) + ")");
  if (v.inner_products > tol.eps)
    fail(ErrorKind::ValidationFailure, "inner products leave the right algebra", v.inner_products);
  return c;
}

Correspondence Correspondence::make_unchecked(VnAlgebra left, VnAlgebra left_commutant, VnAlgebra right,
                                              VnAlgebra right_commutant, AlgebraMap rho, AlgebraMap rho_prime,
                                              Tolerance tol) {
  if (rho.target_dim() != rho_prime.target_dim()) fail(ErrorKind::DimensionMismatch, "representations act on different carriers");
  Correspondence c;
  c.impl_ = new_impl(std::move(left), std::move(left_commutant), std::move(right), std::move(right_commutant),
                     std::move(rho), std::move(rho_prime), tol);
  return c;
}

Correspondence Correspondence::make(const VnAlgebra& left, const VnAlgebra& right, std::vector<CMatrix> rho_images,
                                    std::vector<CMatrix> rho_prime_images, Tolerance tol) {
  VnAlgebra lc = commutant(left, tol), rc = commutant(right, tol);
  AlgebraMap rho(left, std::move(rho_images)), rp(rc, std::move(rho_prime_images));
  return make(left, std::move(lc), right, std::move(rc), std::move(rho), std::move(rp), tol);
}

Correspondence of_endomorphism(const Endomorphism& theta, const VnAlgebra& bc, Tolerance tol) {
  const VnAlgebra& b = theta.domain();
  AlgebraMap id_c(bc, bc.basis());
  return Correspondence::make(b, bc, b, bc, theta.map(), std::move(id_c), tol);
}

Correspondence intertwiner_space(const Endomorphism& theta, const VnAlgebra& bc, Tolerance tol) {
  const VnAlgebra& b = theta.domain();
  AlgebraMap id_c(bc, bc.basis());
  return Correspondence::make(bc, b, bc, b, std::move(id_c), theta.map(), tol);
}

Correspondence of_endomorphism(const Endomorphism& theta, Tolerance tol) {
  return of_endomorphism(theta, commutant(theta.domain(), tol), tol);
}

Correspondence intertwiner_space(const Endomorphism& theta, Tolerance tol) {
  return intertwiner_space(theta, commutant(theta.domain(), tol), tol);
}

Correspondence identity_correspondence(const VnAlgebra& b, Tolerance tol) {
  return of_endomorphism(Endomorphism::identity(b), tol);
}

Correspondence commutant(const Correspondence& e) {
  const auto& im = must(e.impl_);
  Correspondence c;
  c.impl_ = new_impl(im.right_comm, im.right, im.left_comm, im.left, im.rho_prime, im.rho, im.tol);
  return c;
}

namespace {

bool same_algebra(const VnAlgebra& a, const VnAlgebra& b, Tolerance tol) {
  if (a.ambient_dim() != b.ambient_dim()) return false;
  return a == b || equals(a, b, tol).equal;
}

// G ~ L L^dagger by diagonal pivoting, fetching one Gram column at a time.
template <class Column>
CMatrix pivoted_cholesky(std::vector<double> diag, Column column, Tolerance tol) {
  const std::size_t n = diag.size();
  const double top = n ? *std::max_element(diag.begin(), diag.end()) : 0.0;
  const double low = n ? *std::min_element(diag.begin(), diag.end()) : 0.0;
  if (low < -tol.eps * std::max(top, 1.0)) fail(ErrorKind::GramNotPSD, "negative Gram diagonal", -low);
  std::vector<std::vector<cd>> cols;
  // entries are bounded by 1 (unit elements, contractive representation), so noise sits near 1e-16
  const double cut = std::max(tol.eps * top, 1e-13);
  while (top > 0.0 && cols.size() < n) {
    const std::size_t k = static_cast<std::size_t>(std::max_element(diag.begin(), diag.end()) - diag.begin());
    if (diag[k] <= cut) break;
    std::vector<cd> c = column(k);
    for (const auto& l : cols) {
      const cd lk = std::conj(l[k]);
      for (std::size_t i = 0; i < n; ++i) c[i] -= l[i] * lk;
    }
    const double piv = std::sqrt(diag[k]);
    for (std::size_t i = 0; i < n; ++i) {
      c[i] /= piv;
      diag[i] -= std::norm(c[i]);
    }
    diag[k] = 0.0;
    cols.push_back(std::move(c));
  }
  const double rest = n ? *std::min_element(diag.begin(), diag.end()) : 0.0;
  if (rest < -tol.eps * std::max(top, 1.0)) fail(ErrorKind::GramNotPSD, "Gram matrix has a negative direction", -rest);
  CMatrix l(n, cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j)
    for (std::size_t i = 0; i < n; ++i) l(i, j) = cols[j][i];
  return l;
}

CMatrix vec_columns(const std::vector<CMatrix>& xs, std::size_t rows) {
  CMatrix m(rows, xs.size());
  for (std::size_t k = 0; k < xs.size(); ++k)
    for (std::size_t e = 0; e < rows; ++e) m(e, k) = xs[k].data()[e];
  return m;
}

}  // namespace

CMatrix TensorProduct::vector_of(const CMatrix& x, const CMatrix& h) const {
  const std::size_t d = left_elements.size();
  CMatrix raw(raw_dim(), 1);
  for (std::size_t i = 0; i < d; ++i) {
    const cd c = hs_inner(left_elements[i], x);
    for (std::size_t p = 0; p < right_carrier; ++p) raw(i * right_carrier + p, 0) = c * h(p, 0);
  }
  return embed * raw;
}

CMatrix TensorProduct::pair_operator(const CMatrix& x, const CMatrix& y) const {
  const std::size_t d = left_elements.size();
  if (y.rows() != right_carrier) fail(ErrorKind::DimensionMismatch, "pair_operator: y does not map into the right carrier");
  CMatrix acc(embed.rows(), right_carrier);
  for (std::size_t i = 0; i < d; ++i) {
    const cd c = hs_inner(left_elements[i], x);
    if (c == cd{}) continue;
    acc.add_scaled(c, embed.block(0, i * right_carrier, embed.rows(), right_carrier));
  }
  return acc * y;
}

TensorProduct tensor_product(const Correspondence& e, const Correspondence& f, Tolerance tol, bool validate_result) {
  if (!same_algebra(e.right(), f.left(), tol))
    fail(ErrorKind::AlgebraMismatch, "right algebra of the first factor differs from the left algebra of the second");
  TensorProduct t;
  t.left_elements = e.element_space();
  t.right_carrier = f.carrier_dim();
  const std::size_t d = t.left_elements.size(), hf = t.right_carrier, raw = d * hf;
  const AlgebraMap& pi = f.rho();
  std::vector<CMatrix> adj;
  for (const auto& x : t.left_elements) adj.push_back(x.adjoint());

  std::vector<double> diag(raw);
  for (std::size_t i = 0; i < d; ++i) {
    const CMatrix m = pi.apply(adj[i] * t.left_elements[i]);
    for (std::size_t p = 0; p < hf; ++p) diag[i * hf + p] = m(p, p).real();
  }
  std::vector<std::vector<CMatrix>> cache(d);
  auto column = [&](std::size_t k) {
    const std::size_t j = k / hf, q = k % hf;
    if (cache[j].empty())
      for (std::size_t i = 0; i < d; ++i) cache[j].push_back(pi.apply(adj[i] * t.left_elements[j]));
    std::vector<cd> c(raw);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t p = 0; p < hf; ++p) c[i * hf + p] = cache[j][i](p, q);
    return c;
  };
  const CMatrix l = pivoted_cholesky(std::move(diag), column, tol);
  const std::size_t r = l.cols();
  t.embed = l.adjoint();
  const CMatrix ll = t.embed * l;
  t.lift = l * pseudo_inverse(ll, Tolerance{1e-14});

  // rho(a): (a x) (x) h ; rho'(c'): x (x) rho'_f(c') h
  std::vector<CMatrix> rho_images, rho_prime_images;
  const CMatrix lift_rows = t.lift.reshaped(d, hf * r);
  for (const auto& a : e.left().basis()) {
    const CMatrix ra = e.rho().apply(a);
    CMatrix c(d, d);
    for (std::size_t i = 0; i < d; ++i) {
      const CMatrix y = ra * t.left_elements[i];
      for (std::size_t j = 0; j < d; ++j) c(j, i) = hs_inner(t.left_elements[j], y);
    }
    rho_images.push_back(t.embed * (c * lift_rows).reshaped(raw, r));
  }
  for (const auto& p : f.rho_prime().images()) {
    CMatrix moved(raw, r);
    for (std::size_t i = 0; i < d; ++i) moved.set_block(i * hf, 0, p * t.lift.block(i * hf, 0, hf, r));
    rho_prime_images.push_back(t.embed * moved);
  }
  AlgebraMap rho(e.left(), std::move(rho_images)), rp(f.right_commutant(), std::move(rho_prime_images));
  t.result = validate_result ? Correspondence::make(e.left(), e.left_commutant(), f.right(), f.right_commutant(),
                                                    std::move(rho), std::move(rp), tol)
                             : Correspondence::make_unchecked(e.left(), e.left_commutant(), f.right(),
                                                              f.right_commutant(), std::move(rho), std::move(rp), tol);
  return t;
}

CommutantSwap tensor_commutant_iso(const Correspondence& e, const Correspondence& f, Tolerance tol) {
  const TensorProduct t = tensor_product(e, f, tol, false);
  const Correspondence fc = commutant(f), ec = commutant(e);
  const TensorProduct s = tensor_product(fc, ec, tol, false);
  const auto& ex = e.element_space();
  const auto& fy = fc.element_space();
  const std::size_t rt = t.embed.rows(), rs = s.embed.rows(), n = e.right().ambient_dim();
  if (ex.empty() || fy.empty()) fail(ErrorKind::NotIsometric, "empty element space");
  Rng rng(0x7e50 + rt * 131 + rs);
  const std::size_t samples = rt + 4;
  CMatrix a(rt, samples), b(rs, samples);
  for (std::size_t k = 0; k < samples; ++k) {
    CMatrix x(ex.front().rows(), ex.front().cols()), y(fy.front().rows(), fy.front().cols());
    for (const auto& v : ex) x.add_scaled(rng.cnormal(), v);
    for (const auto& v : fy) y.add_scaled(rng.cnormal(), v);
    const CMatrix g = rng.unit_vector(n);
    a.set_block(0, k, t.vector_of(x, y * g));
    b.set_block(0, k, s.vector_of(y, x * g));
  }
  CommutantSwap out;
  out.isometry = scaled_residual(a.adjoint() * a, b.adjoint() * b);
  if (rt != rs) fail(ErrorKind::NotIsometric, "tensor carriers differ in dimension", 1.0);
  out.unitary = b * pseudo_inverse(a, tol);
  out.isometry = std::max(out.isometry, unitarity_residual(out.unitary));
  if (out.isometry > tol.eps) fail(ErrorKind::NotIsometric, "swap map is not isometric", out.isometry);
  const Correspondence& te = t.result;
  const Correspondence& se = s.result;
  for (std::size_t k = 0; k < te.rho().images().size(); ++k)
    out.intertwining = std::max(out.intertwining, scaled_residual(out.unitary * te.rho().images()[k],
                                                                  se.rho_prime().images()[k] * out.unitary));
  for (std::size_t k = 0; k < te.rho_prime().images().size(); ++k)
    out.intertwining = std::max(out.intertwining, scaled_residual(out.unitary * te.rho_prime().images()[k],
                                                                  se.rho().images()[k] * out.unitary));
  if (out.intertwining > tol.eps) fail(ErrorKind::NotIntertwining, "swap map does not intertwine", out.intertwining);
  return out;
}

namespace {

MultiplicityTable table_with(const Correspondence& e, const BlockSignature& left, const BlockSignature& rc,
                             Tolerance tol) {
  MultiplicityTable t;
  t.left_blocks = left.blocks;
  t.right_commutant_blocks = rc.blocks;
  t.m.assign(left.blocks.size(), std::vector<std::size_t>(rc.blocks.size(), 0));
  for (std::size_t i = 0; i < left.blocks.size(); ++i) {
    const CMatrix zi = e.rho().apply(left.central_projections[i]);
    for (std::size_t j = 0; j < rc.blocks.size(); ++j) {
      const CMatrix p = zi * e.rho_prime().apply(rc.central_projections[j]);
      // a projection: its rank is its trace
      const double r = p.trace().real();
      const double unit = static_cast<double>(left.blocks[i].first * rc.blocks[j].first);
      const double m = r / unit;
      if (std::abs(m - std::round(m)) > 1e-6 || m < -0.5)
        fail(ErrorKind::NonConvergence, "non-integral multiplicity " + std::to_string(m), std::abs(m - std::round(m)));
      t.m[i][j] = static_cast<std::size_t>(std::llround(m));
    }
  }
  (void)tol;
  return t;
}

}  // namespace

MultiplicityTable multiplicity_table(const Correspondence& e, Tolerance tol) {
  return table_with(e, block_decompose(e.left(), 0x5eed, tol), block_decompose(e.right_commutant(), 0x5eed, tol), tol);
}

double bimodule_unitary_residual(const Correspondence& e, const Correspondence& f, const CMatrix& u) {
  if (u.rows() != f.carrier_dim() || u.cols() != e.carrier_dim()) fail(ErrorKind::DimensionMismatch, "unitary shape");
  double r = unitarity_residual(u);
  for (const auto& a : e.left().basis()) r = std::max(r, scaled_residual(u * e.rho().apply(a), f.rho().apply(a) * u));
  for (const auto& b : e.right_commutant().basis())
    r = std::max(r, scaled_residual(u * e.rho_prime().apply(b), f.rho_prime().apply(b) * u));
  return r;
}

IsomorphismResult find_isomorphism(const Correspondence& e, const Correspondence& f, std::uint64_t seed,
                                   Tolerance tol) {
  if (!same_algebra(e.left(), f.left(), tol) || !same_algebra(e.right(), f.right(), tol))
    fail(ErrorKind::AlgebraMismatch, "correspondences over different algebras");
  const BlockSignature left = block_decompose(e.left(), 0x5eed, tol);
  const BlockSignature rc = block_decompose(e.right_commutant(), 0x5eed, tol);
  IsomorphismResult out;
  out.table_e = table_with(e, left, rc, tol);
  out.table_f = table_with(f, left, rc, tol);
  if (e.carrier_dim() != f.carrier_dim() || !(out.table_e == out.table_f)) return out;

  std::vector<CMatrix> p, q;
  for (const auto& a : e.left().basis()) {
    p.push_back(f.rho().apply(a));
    q.push_back(e.rho().apply(a));
  }
  for (const auto& b : e.right_commutant().basis()) {
    p.push_back(f.rho_prime().apply(b));
    q.push_back(e.rho_prime().apply(b));
  }
  const std::size_t h = e.carrier_dim();
  const auto space = intertwiner_space(p, q, h, h, tol);
  double best = std::numeric_limits<double>::infinity();
  for (int attempt = 0; attempt < 8; ++attempt) {
    out.attempts = attempt + 1;
    Rng rng(seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(attempt));
    CMatrix x(h, h);
    for (const auto& v : space) x.add_scaled(rng.cnormal(), v);
    CMatrix u;
    try {
      u = polar_unitary(x, tol);
    } catch (const Error&) {
      continue;
    }
    const double r = bimodule_unitary_residual(e, f, u);
    best = std::min(best, r);
    if (r <= tol.eps) {
      out.found = true;
      out.unitary = std::move(u);
      out.residual = r;
      return out;
    }
  }
  fail(ErrorKind::PolarRetryExhausted, "no invertible intertwiner after 8 seeds", best);
}

bool is_left_faithful(const Correspondence& e, Tolerance tol) {
  const std::size_t h = e.carrier_dim();
  return rank(vec_columns(e.rho().images(), h * h), tol) == e.left().dim();
}

bool is_strongly_full(const Correspondence& e, Tolerance tol) {
  const auto& xs = e.element_space();
  std::vector<CMatrix> prods;
  for (const auto& x : xs) {
    const CMatrix xa = x.adjoint();
    for (const auto& y : xs) prods.push_back(xa * y);
  }
  if (prods.empty()) return false;
  const std::size_t n = e.right().ambient_dim();
  return rank(vec_columns(prods, n * n), tol) == e.right().dim();
}

FramedAlgebra FramedAlgebra::random(const BlockList& blocks, std::uint64_t seed, Tolerance tol) {
  FramedAlgebra f;
  const std::size_t n = layout_dim(blocks);
  f.algebra = random_algebra(n, blocks, seed, tol);
  f.blocks = blocks;
  f.frame = random_unitary(n, seed);
  f.commutant_algebra = commutant(f.algebra, tol);
  return f;
}

namespace {
std::size_t offset_of(const BlockList& blocks, std::size_t i) {
  std::size_t off = 0;
  for (std::size_t k = 0; k < i; ++k) off += blocks[k].first * blocks[k].second;
  return off;
}
}  // namespace

CMatrix FramedAlgebra::irrep(const CMatrix& x, std::size_t i) const {
  const CMatrix l = frame.adjoint() * x * frame;
  const auto [a, m] = blocks.at(i);
  const std::size_t off = offset_of(blocks, i);
  CMatrix out(a, a);
  for (std::size_t p = 0; p < a; ++p)
    for (std::size_t q = 0; q < a; ++q) out(p, q) = l(off + p * m, off + q * m);
  return out;
}

CMatrix FramedAlgebra::commutant_irrep(const CMatrix& x, std::size_t i) const {
  const CMatrix l = frame.adjoint() * x * frame;
  const std::size_t m = blocks.at(i).second, off = offset_of(blocks, i);
  CMatrix out(m, m);
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t s = 0; s < m; ++s) out(r, s) = l(off + r, off + s);
  return out;
}

Correspondence random_correspondence(const FramedAlgebra& left, const FramedAlgebra& right, std::size_t max_carrier,
                                     std::uint64_t seed, Tolerance tol) {
  Rng rng(seed);
  struct Summand {
    std::size_t i, j, a, b;
  };
  std::vector<Summand> parts;
  std::size_t h = 0;
  const std::size_t ni = left.blocks.size(), nj = right.blocks.size();
  std::vector<std::size_t> order(ni * nj);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t k = order.size(); k > 1; --k) std::swap(order[k - 1], order[rng.below(k)]);
  for (std::size_t k : order) {
    const std::size_t i = k / nj, j = k % nj;
    const std::size_t sz = left.blocks[i].first * right.blocks[j].second;
    const std::size_t mult = rng.below(3);
    for (std::size_t c = 0; c < mult && h + sz <= max_carrier; ++c) {
      parts.push_back({i, j, left.blocks[i].first, right.blocks[j].second});
      h += sz;
    }
  }
  if (parts.empty()) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < ni * nj; ++k)
      if (left.blocks[k / nj].first * right.blocks[k % nj].second <
          left.blocks[best / nj].first * right.blocks[best % nj].second)
        best = k;
    const std::size_t i = best / nj, j = best % nj;
    parts.push_back({i, j, left.blocks[i].first, right.blocks[j].second});
    h = parts.back().a * parts.back().b;
    if (h > max_carrier) fail(ErrorKind::DimensionMismatch, "carrier bound too small for any irreducible summand");
  }
  const CMatrix v = random_unitary(h, rng.next());
  auto assemble = [&](auto&& piece) {
    CMatrix m(h, h);
    std::size_t off = 0;
    for (const auto& s : parts) {
      m.set_block(off, off, piece(s));
      off += s.a * s.b;
    }
    return v * m * v.adjoint();
  };
  std::vector<CMatrix> rho, rho_prime;
  for (const auto& x : left.algebra.basis())
    rho.push_back(assemble([&](const Summand& s) { return kron(left.irrep(x, s.i), CMatrix::identity(s.b)); }));
  for (const auto& y : right.commutant_algebra.basis())
    rho_prime.push_back(
        assemble([&](const Summand& s) { return kron(CMatrix::identity(s.a), right.commutant_irrep(y, s.j)); }));
  return Correspondence::make(left.algebra, left.commutant_algebra, right.algebra, right.commutant_algebra,
                              AlgebraMap(left.algebra, std::move(rho)),
                              AlgebraMap(right.commutant_algebra, std::move(rho_prime)), tol);
}

}  // namespace vnpair
