#include "vnpair/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>

#include "vnpair/error.hpp"

namespace vnpair {

struct VnAlgebra::Impl {
  std::size_t n = 0;
  std::vector<CMatrix> basis;
  CMatrix coeff_map;  // d x n^2, row k = conj(vec b_k)
  CMatrix span_map;   // n^2 x d, column k = vec b_k
};

namespace {

const VnAlgebra::Impl& must(const std::shared_ptr<const VnAlgebra::Impl>& p) {
  if (!p) fail(ErrorKind::ValidationFailure, "use of an empty algebra");
  return *p;
}

// Gram-Schmidt helper: residual of x against an orthonormal list, two passes.
CMatrix orthogonal_residual(const std::vector<CMatrix>& basis, CMatrix x) {
  for (int pass = 0; pass < 2; ++pass)
    for (const auto& b : basis) x.add_scaled(-hs_inner(b, x), b);
  return x;
}

double gs_cut(Tolerance tol) { return std::max(10.0 * tol.eps, 1e-12); }

}  // namespace

VnAlgebra VnAlgebra::from_orthonormal_basis(std::size_t n, std::vector<CMatrix> basis) {
  auto impl = std::make_shared<Impl>();
  impl->n = n;
  const std::size_t d = basis.size();
  impl->coeff_map = CMatrix(d, n * n);
  impl->span_map = CMatrix(n * n, d);
  for (std::size_t k = 0; k < d; ++k) {
    if (basis[k].rows() != n || basis[k].cols() != n) fail(ErrorKind::DimensionMismatch, "basis element shape");
    for (std::size_t e = 0; e < n * n; ++e) {
      impl->coeff_map(k, e) = std::conj(basis[k].data()[e]);
      impl->span_map(e, k) = basis[k].data()[e];
    }
  }
  impl->basis = std::move(basis);
  VnAlgebra a;
  a.impl_ = std::move(impl);
  return a;
}

std::size_t VnAlgebra::ambient_dim() const { return must(impl_).n; }
std::size_t VnAlgebra::dim() const { return must(impl_).basis.size(); }
const std::vector<CMatrix>& VnAlgebra::basis() const { return must(impl_).basis; }

std::vector<cd> VnAlgebra::coefficients(const CMatrix& x) const {
  const Impl& im = must(impl_);
  if (x.rows() != im.n || x.cols() != im.n) fail(ErrorKind::DimensionMismatch, "coefficients: shape");
  const CMatrix c = im.coeff_map * x.reshaped(im.n * im.n, 1);
  return c.values();
}

CMatrix VnAlgebra::combine(const std::vector<cd>& coeffs) const {
  const Impl& im = must(impl_);
  if (coeffs.size() != im.basis.size()) fail(ErrorKind::DimensionMismatch, "combine: coefficient count");
  if (coeffs.empty()) return CMatrix(im.n, im.n);
  return (im.span_map * CMatrix::column(coeffs)).reshaped(im.n, im.n);
}

CMatrix VnAlgebra::project(const CMatrix& x) const { return combine(coefficients(x)); }

double VnAlgebra::span_residual(const CMatrix& x) const {
  return frobenius_diff(x, project(x)) / std::max(1.0, frobenius(x));
}

VnAlgebra::Validation VnAlgebra::validate() const {
  const Impl& im = must(impl_);
  Validation v;
  v.unital = span_residual(CMatrix::identity(im.n));
  for (std::size_t i = 0; i < im.basis.size(); ++i) {
    v.star = std::max(v.star, span_residual(im.basis[i].adjoint()));
    for (std::size_t j = 0; j < im.basis.size(); ++j)
      v.product = std::max(v.product, span_residual(im.basis[i] * im.basis[j]));
  }
  return v;
}

bool VnAlgebra::operator==(const VnAlgebra& o) const {
  if (impl_ == o.impl_) return true;
  if (!impl_ || !o.impl_) return false;
  return impl_->n == o.impl_->n && impl_->basis == o.impl_->basis;
}

VnAlgebra from_generators(std::size_t n, const std::vector<CMatrix>& gens, Tolerance tol) {
  if (n == 0) fail(ErrorKind::DimensionMismatch, "ambient dimension must be positive");
  std::vector<CMatrix> letters;
  for (const auto& g : gens) {
    if (g.rows() != n || g.cols() != n) fail(ErrorKind::DimensionMismatch, "generator shape");
    const double nrm = frobenius(g);
    if (nrm == 0.0) continue;
    letters.push_back((1.0 / nrm) * g);
    letters.push_back(letters.back().adjoint());
  }
  std::vector<CMatrix> basis{(1.0 / std::sqrt(static_cast<double>(n))) * CMatrix::identity(n)};
  std::deque<std::size_t> queue{0};
  const double cut = gs_cut(tol);
  // left-closure of span{I} under the letters = span of all words
  while (!queue.empty()) {
    const std::size_t w = queue.front();
    queue.pop_front();
    for (const auto& s : letters) {
      const CMatrix cand = s * basis[w];
      const double nrm = frobenius(cand);
      if (nrm <= cut) continue;
      CMatrix r = orthogonal_residual(basis, (1.0 / nrm) * cand);
      const double rn = frobenius(r);
      if (rn <= cut) continue;
      basis.push_back((1.0 / rn) * r);
      queue.push_back(basis.size() - 1);
      if (basis.size() > n * n) fail(ErrorKind::NonConvergence, "span dimension exceeds n^2");
    }
  }
  return VnAlgebra::from_orthonormal_basis(n, std::move(basis));
}

VnAlgebra commutant(const VnAlgebra& a, Tolerance tol) {
  const std::size_t n = a.ambient_dim();
  auto basis = intertwiner_space(a.basis(), a.basis(), n, n, tol);
  return VnAlgebra::from_orthonormal_basis(n, std::move(basis));
}

VnAlgebra center(const VnAlgebra& a, Tolerance tol) {
  const VnAlgebra ac = commutant(a, tol);
  const std::size_t n = a.ambient_dim();
  CMatrix m(a.dim(), ac.dim());
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < ac.dim(); ++j) m(i, j) = hs_inner(a.basis()[i], ac.basis()[j]);
  const Svd s = svd(m);
  std::vector<CMatrix> out;
  const double cut = std::max(100.0 * tol.eps, 1e-12);
  for (std::size_t k = 0; k < s.s.size(); ++k) {
    // candidate direction inside a; keep it when it also lies in the commutant
    CMatrix v(n, n);
    for (std::size_t i = 0; i < a.dim(); ++i) v.add_scaled(s.u(i, k), a.basis()[i]);
    if (ac.span_residual(v) > cut) continue;
    CMatrix r = orthogonal_residual(out, v);
    const double rn = frobenius(r);
    if (rn <= 0.5) continue;
    out.push_back((1.0 / rn) * r);
  }
  return VnAlgebra::from_orthonormal_basis(n, std::move(out));
}

BlockSignature block_decompose(const VnAlgebra& a, std::uint64_t seed, Tolerance tol) {
  const VnAlgebra z = center(a, tol);
  const std::size_t n = a.ambient_dim();
  std::vector<CMatrix> herm;
  for (const auto& c : z.basis()) {
    CMatrix re = c + c.adjoint();
    re *= 0.5;
    CMatrix im = c - c.adjoint();
    im *= cd(0.0, -0.5);
    if (frobenius(re) > 1e-12) herm.push_back(std::move(re));
    if (frobenius(im) > 1e-12) herm.push_back(std::move(im));
  }
  for (int attempt = 0; attempt < 8; ++attempt) {
    Rng rng(seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(attempt));
    CMatrix h(n, n);
    for (const auto& b : herm) h.add_scaled(rng.normal(), b);
    const HermEig e = herm_eig(h);
    double scale = 0.0;
    for (double v : e.values) scale = std::max(scale, std::abs(v));
    const double gap = 1e-6 * std::max(scale, 1e-300);
    std::vector<std::pair<std::size_t, std::size_t>> clusters;  // [start, end)
    std::size_t start = 0;
    for (std::size_t k = 1; k <= n; ++k) {
      if (k == n || e.values[k] - e.values[k - 1] > gap) {
        clusters.emplace_back(start, k);
        start = k;
      }
    }
    if (clusters.size() != z.dim()) continue;
    struct Entry {
      std::size_t a, m;
      CMatrix proj;
    };
    std::vector<Entry> entries;
    bool ok = true;
    for (auto [s0, s1] : clusters) {
      const CMatrix v = e.vectors.block(0, s0, n, s1 - s0);
      CMatrix p = v * v.adjoint();
      CMatrix cols(n * n, a.dim());
      for (std::size_t k = 0; k < a.dim(); ++k) {
        const CMatrix zb = p * a.basis()[k];
        for (std::size_t q = 0; q < n * n; ++q) cols(q, k) = zb.data()[q];
      }
      const std::size_t d2 = rank(cols, tol);
      const auto ai = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(d2))));
      const std::size_t rk = s1 - s0;
      if (ai == 0 || ai * ai != d2 || rk % ai != 0) {
        ok = false;
        break;
      }
      entries.push_back({ai, rk / ai, std::move(p)});
    }
    if (!ok) continue;
    std::stable_sort(entries.begin(), entries.end(), [](const Entry& x, const Entry& y) {
      return x.a != y.a ? x.a > y.a : x.m > y.m;
    });
    BlockSignature sig;
    for (auto& en : entries) {
      sig.blocks.emplace_back(en.a, en.m);
      sig.central_projections.push_back(std::move(en.proj));
    }
    return sig;
  }
  fail(ErrorKind::DegenerateCenterElement, "no generic central element after 8 seeds");
}

namespace {
std::size_t block_offset(const std::vector<std::pair<std::size_t, std::size_t>>& blocks, std::size_t block) {
  std::size_t off = 0;
  for (std::size_t i = 0; i < block; ++i) off += blocks[i].first * blocks[i].second;
  return off;
}
}  // namespace

std::size_t layout_dim(const BlockList& blocks) { return block_offset(blocks, blocks.size()); }

BlockList random_block_list(Rng& rng, std::size_t max_n) {
  BlockList b;
  std::size_t left = 1 + rng.below(max_n);
  while (left > 0) {
    const std::size_t a = 1 + rng.below(std::min<std::size_t>(left, 4));
    const std::size_t m = 1 + rng.below(std::min<std::size_t>(left / a, 3));
    b.emplace_back(a, m);
    left -= a * m;
  }
  return b;
}

CMatrix block_unit(const std::vector<std::pair<std::size_t, std::size_t>>& blocks, std::size_t block, std::size_t p,
                   std::size_t q) {
  const std::size_t n = layout_dim(blocks), off = block_offset(blocks, block);
  const auto [a, m] = blocks.at(block);
  if (p >= a || q >= a) fail(ErrorKind::DimensionMismatch, "block_unit index");
  CMatrix u(n, n);
  for (std::size_t r = 0; r < m; ++r) u(off + p * m + r, off + q * m + r) = 1.0;
  return u;
}

CMatrix block_commutant_unit(const std::vector<std::pair<std::size_t, std::size_t>>& blocks, std::size_t block,
                             std::size_t r, std::size_t s) {
  const std::size_t n = layout_dim(blocks), off = block_offset(blocks, block);
  const auto [a, m] = blocks.at(block);
  if (r >= m || s >= m) fail(ErrorKind::DimensionMismatch, "block_commutant_unit index");
  CMatrix u(n, n);
  for (std::size_t p = 0; p < a; ++p) u(off + p * m + r, off + p * m + s) = 1.0;
  return u;
}

VnAlgebra random_algebra(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& blocks,
                         std::uint64_t seed, Tolerance tol) {
  if (blocks.empty() || layout_dim(blocks) != n) fail(ErrorKind::DimensionMismatch, "block sizes must sum to n");
  for (auto [a, m] : blocks)
    if (a == 0 || m == 0) fail(ErrorKind::DimensionMismatch, "block sizes must be positive");
  const CMatrix w = random_unitary(n, seed);
  std::vector<CMatrix> gens;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    gens.push_back(w * block_unit(blocks, i, 0, 0) * w.adjoint());
    for (std::size_t p = 0; p + 1 < blocks[i].first; ++p) gens.push_back(w * block_unit(blocks, i, p, p + 1) * w.adjoint());
  }
  return from_generators(n, gens, tol);
}

EqualsResult equals(const VnAlgebra& a, const VnAlgebra& b, Tolerance tol) {
  if (a.ambient_dim() != b.ambient_dim()) fail(ErrorKind::DimensionMismatch, "equals: ambient dimensions differ");
  // ||P_a - P_b||_F^2 = sum over b's basis of ||(1 - P_a) y||^2 + the symmetric term
  double sq = 0.0;
  for (const auto& y : b.basis()) {
    const double r = frobenius_diff(y, a.project(y));
    sq += r * r;
  }
  for (const auto& x : a.basis()) {
    const double r = frobenius_diff(x, b.project(x));
    sq += r * r;
  }
  const double res = std::sqrt(sq);
  const double scale = std::sqrt(static_cast<double>(std::max<std::size_t>({1, a.dim(), b.dim()})));
  return {res <= tol.eps * scale, res};
}

double containment_residual(const VnAlgebra& a, const VnAlgebra& b) {
  double worst = 0.0;
  for (const auto& x : a.basis()) worst = std::max(worst, b.span_residual(x));
  return worst;
}

}  // namespace vnpair
