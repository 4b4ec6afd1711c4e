#include "vnpair/prodsys.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "vnpair/error.hpp"

namespace vnpair {

namespace {

// sum_i <x_i, x> embed_i : the carrier map h -> x (.) h
CMatrix pairing_block(const TensorProduct& t, const CMatrix& x) {
  const std::size_t hf = t.right_carrier;
  CMatrix acc(t.embed.rows(), hf);
  for (std::size_t i = 0; i < t.left_elements.size(); ++i) {
    const cd c = hs_inner(t.left_elements[i], x);
    if (c == cd{}) continue;
    acc.add_scaled(c, t.embed.block(0, i * hf, t.embed.rows(), hf));
  }
  return acc;
}

// raw map x_i (x) e_p -> f(x_i) e_p, pushed to the carrier
template <class F>
CMatrix carrier_map(const TensorProduct& t, F image_of) {
  const std::size_t hf = t.right_carrier;
  CMatrix raw;
  for (std::size_t i = 0; i < t.left_elements.size(); ++i) {
    const CMatrix m = image_of(t.left_elements[i]);
    if (i == 0) raw = CMatrix(m.rows(), t.raw_dim());
    raw.set_block(0, i * hf, m);
  }
  if (t.left_elements.empty()) return CMatrix(0, t.lift.cols());
  return raw * t.lift;
}

// embed (I (x) a) lift
CMatrix second_factor(const TensorProduct& t, const CMatrix& a) {
  const std::size_t hf = t.right_carrier, r = t.lift.cols();
  CMatrix moved(t.raw_dim(), r);
  for (std::size_t i = 0; i < t.left_elements.size(); ++i)
    moved.set_block(i * hf, 0, a * t.lift.block(i * hf, 0, hf, r));
  return t.embed * moved;
}

double intertwining_residual(const CMatrix& u, const Correspondence& from, const Correspondence& to) {
  double r = 0.0;
  for (const auto& a : from.left().basis()) r = std::max(r, scaled_residual(u * from.rho().apply(a), to.rho().apply(a) * u));
  for (const auto& b : from.right_commutant().basis())
    r = std::max(r, scaled_residual(u * from.rho_prime().apply(b), to.rho_prime().apply(b) * u));
  return r;
}

void require(double residual, Tolerance tol, const std::string& what) {
  if (residual > tol.eps) fail(ErrorKind::ValidationFailure, what, residual);
}

}  // namespace

DiscreteProductSystem::DiscreteProductSystem(VnAlgebra algebra, std::vector<Correspondence> members,
                                             std::vector<std::vector<TensorProduct>> tensors,
                                             std::vector<std::vector<CMatrix>> products)
    : algebra_(std::move(algebra)),
      members_(std::move(members)),
      tensors_(std::move(tensors)),
      products_(std::move(products)) {
  const std::size_t n = members_.size();
  if (n == 0) fail(ErrorKind::DimensionMismatch, "a product system needs at least E_0");
  if (tensors_.size() != n || products_.size() != n) fail(ErrorKind::DimensionMismatch, "product table size");
  for (std::size_t s = 0; s < n; ++s)
    if (tensors_[s].size() != n - s || products_[s].size() != n - s)
      fail(ErrorKind::DimensionMismatch, "product table row " + std::to_string(s));
}

CMatrix DiscreteProductSystem::left_multiplier(std::size_t s, std::size_t t, const CMatrix& x) const {
  return product(s, t) * pairing_block(tensor(s, t), x);
}

DiscreteProductSystem::Validation DiscreteProductSystem::validate(Tolerance tol) const {
  Validation v;
  const std::size_t n_max = horizon();
  const Correspondence& e0 = member(0);
  v.identity_unit = e0.carrier_dim() == algebra_.ambient_dim();
  if (v.identity_unit) {
    double r = 0.0;
    for (const auto& b : e0.left().basis()) r = std::max(r, scaled_residual(e0.rho().apply(b), b));
    for (const auto& b : e0.right_commutant().basis()) r = std::max(r, scaled_residual(e0.rho_prime().apply(b), b));
    v.identity_unit = r <= tol.eps && equals(e0.left(), algebra_, tol).equal && equals(e0.right(), algebra_, tol).equal;
  }
  for (std::size_t s = 0; s <= n_max; ++s)
    for (std::size_t t = 0; s + t <= n_max; ++t) {
      const CMatrix& u = product(s, t);
      v.unitarity = std::max(v.unitarity, unitarity_residual(u));
      v.bilinearity = std::max(v.bilinearity, intertwining_residual(u, tensor(s, t).result, member(s + t)));
    }
  // marginals: b (.) h -> rho(b) h and x (.) g -> x g
  for (std::size_t t = 0; t <= n_max; ++t) {
    const Correspondence& et = member(t);
    const CMatrix left = carrier_map(tensor(0, t), [&](const CMatrix& b) { return et.rho().apply(b); });
    const CMatrix right = carrier_map(tensor(t, 0), [](const CMatrix& x) { return x; });
    v.marginal = std::max({v.marginal, scaled_residual(left, product(0, t)), scaled_residual(right, product(t, 0))});
  }
  for (std::size_t r = 1; r <= n_max; ++r)
    for (std::size_t s = 1; r + s < n_max; ++s)
      for (std::size_t t = 1; r + s + t <= n_max; ++t) {
        const TensorProduct& st = tensor(s, t);
        const std::size_t ht = st.right_carrier;
        for (const auto& x : tensor(r, s).left_elements) {
          const CMatrix lhs_x = left_multiplier(r, s + t, x) * product(s, t);
          for (std::size_t j = 0; j < st.left_elements.size(); ++j) {
            const CMatrix lhs = lhs_x * st.embed.block(0, j * ht, st.embed.rows(), ht);
            const CMatrix rhs = left_multiplier(r + s, t, multiply(r, s, x, st.left_elements[j]));
            v.associativity = std::max(v.associativity, scaled_residual(lhs, rhs));
          }
        }
      }
  return v;
}

CMatrix dilation_multiplier(const DilationFamily& d, std::size_t t, const CMatrix& x) {
  return d.maps.at(t) * pairing_block(d.tensors.at(t), x);
}

DilationValidation validate_dilation(const DiscreteProductSystem& p, const DilationFamily& d, Tolerance tol) {
  (void)tol;
  DilationValidation v;
  const std::size_t n_max = p.horizon();
  if (d.maps.size() != n_max + 1 || d.tensors.size() != n_max + 1)
    fail(ErrorKind::DimensionMismatch, "dilation family does not match the horizon");
  for (std::size_t t = 0; t <= n_max; ++t) {
    v.unitarity = std::max(v.unitarity, unitarity_residual(d.maps[t]));
    // a left dilation is only right linear: it carries a (.) id_t to theta_t(a), checked as recovery
    if (d.side == DilationSide::Left) {
      const Correspondence& from = d.tensors[t].result;
      for (const auto& b : from.right_commutant().basis())
        v.bilinearity = std::max(v.bilinearity, scaled_residual(d.maps[t] * from.rho_prime().apply(b),
                                                                d.space.rho_prime().apply(b) * d.maps[t]));
    } else {
      v.bilinearity = std::max(v.bilinearity, intertwining_residual(d.maps[t], d.tensors[t].result, d.space));
    }
  }
  auto lmul = [&](std::size_t t, const CMatrix& x) { return dilation_multiplier(d, t, x); };
  if (d.side == DilationSide::Left) {
    // v_t(v_s(x (.) y) (.) z) = v_{s+t}(x (.) u_{s,t}(y (.) z))
    for (std::size_t s = 1; s < n_max; ++s)
      for (std::size_t t = 1; s + t <= n_max; ++t) {
        const TensorProduct& st = p.tensor(s, t);
        const std::size_t ht = st.right_carrier;
        for (const auto& x : d.tensors[s].left_elements) {
          const CMatrix rhs_x = lmul(s + t, x) * p.product(s, t);
          for (std::size_t j = 0; j < st.left_elements.size(); ++j) {
            const CMatrix rhs = rhs_x * st.embed.block(0, j * ht, st.embed.rows(), ht);
            const CMatrix lhs = lmul(t, lmul(s, x) * st.left_elements[j]);
            v.associativity = std::max(v.associativity, scaled_residual(lhs, rhs));
          }
        }
      }
  } else {
    // w_s(x (.) w_t(y (.) h)) = w_{s+t}(x y (.) h)
    for (std::size_t s = 1; s < n_max; ++s)
      for (std::size_t t = 1; s + t <= n_max; ++t)
        for (const auto& x : d.tensors[s].left_elements) {
          const CMatrix ex = lmul(s, x);
          for (const auto& y : d.tensors[t].left_elements)
            v.associativity = std::max(v.associativity, scaled_residual(ex * lmul(t, y), lmul(s + t, p.multiply(s, t, x, y))));
        }
  }
  return v;
}

EndomorphismSystem from_endomorphism(const Endomorphism& theta, std::size_t horizon, Tolerance tol) {
  if (horizon == 0) fail(ErrorKind::DimensionMismatch, "horizon must be positive");
  const VnAlgebra& b = theta.domain();
  const VnAlgebra bc = commutant(b, tol);
  EndomorphismSystem out;
  out.powers.push_back(Endomorphism::identity(b));
  for (std::size_t t = 1; t <= horizon; ++t) out.powers.push_back(compose(theta, out.powers.back(), tol));
  std::vector<Correspondence> members;
  for (const auto& f : out.powers) members.push_back(of_endomorphism(f, bc, tol));
  std::vector<std::vector<TensorProduct>> tensors(horizon + 1);
  std::vector<std::vector<CMatrix>> products(horizon + 1);
  for (std::size_t s = 0; s <= horizon; ++s)
    for (std::size_t t = 0; s + t <= horizon; ++t) {
      tensors[s].push_back(tensor_product(members[s], members[t], tol, false));
      // x (.) h -> theta^t(x) h
      products[s].push_back(carrier_map(tensors[s].back(), [&](const CMatrix& x) { return out.powers[t].apply(x); }));
    }
  out.system = DiscreteProductSystem(b, members, tensors, products);
  out.left.side = DilationSide::Left;
  out.left.space = members[0];
  for (std::size_t t = 0; t <= horizon; ++t) {
    out.left.tensors.push_back(tensors[0][t]);
    out.left.maps.push_back(products[0][t]);
  }
  for (std::size_t t = 0; t <= horizon; ++t) {
    const CMatrix& v = out.left.maps[t];
    const Correspondence& bt = out.left.tensors[t].result;
    for (const auto& x : b.basis())
      out.recovery = std::max(out.recovery, scaled_residual(v * bt.rho().apply(x) * v.adjoint(), out.powers[t].apply(x)));
  }
  const auto sv = out.system.validate(tol);
  if (!sv.identity_unit) fail(ErrorKind::ValidationFailure, "E_0 is not the identity correspondence");
  require(sv.unitarity, tol, "product maps are not unitary");
  require(sv.bilinearity, tol, "product maps are not bilinear");
  require(sv.marginal, tol, "marginal products are not the canonical identifications");
  require(sv.associativity, tol, "product is not associative");
  const auto dv = validate_dilation(out.system, out.left, tol);
  require(dv.worst(), tol, "left dilation identities fail");
  require(out.recovery, tol, "left dilation does not recover the endomorphism");
  return out;
}

CommutantSystem commutant_system(const EndomorphismSystem& p, Tolerance tol) {
  if (p.powers.size() < 2 || !is_faithful(p.powers[1], tol))
    fail(ErrorKind::NotFaithful, "commutant system needs a faithful endomorphism");
  const std::size_t horizon = p.system.horizon();
  std::vector<Correspondence> members;
  for (std::size_t t = 0; t <= horizon; ++t) members.push_back(commutant(p.system.member(t)));
  std::vector<std::vector<TensorProduct>> tensors(horizon + 1);
  std::vector<std::vector<CMatrix>> products(horizon + 1);
  for (std::size_t t = 0; t <= horizon; ++t)
    for (std::size_t s = 0; s + t <= horizon; ++s) {
      tensors[t].push_back(tensor_product(members[t], members[s], tol, false));
      // x' (.) h -> x' h
      products[t].push_back(carrier_map(tensors[t].back(), [](const CMatrix& x) { return x; }));
    }
  CommutantSystem out;
  out.system = DiscreteProductSystem(members[0].left(), members, tensors, products);
  for (std::size_t s = 0; s <= horizon; ++s)
    for (std::size_t t = 0; s + t <= horizon; ++t) {
      const auto swap = tensor_commutant_iso(p.system.member(s), p.system.member(t), tol);
      out.order_check = std::max(out.order_check, scaled_residual(p.system.product(s, t) * swap.unitary.adjoint(),
                                                                  out.system.product(t, s)));
    }
  const auto sv = out.system.validate(tol);
  if (!sv.identity_unit) fail(ErrorKind::ValidationFailure, "E'_0 is not the identity correspondence");
  require(sv.unitarity, tol, "commutant products are not unitary");
  require(sv.bilinearity, tol, "commutant products are not bilinear");
  require(sv.marginal, tol, "commutant marginals are not canonical");
  require(sv.associativity, tol, "commutant product is not associative");
  require(out.order_check, tol, "commutant product differs from the induced product");
  return out;
}

BhatSystem bhat_system(const Endomorphism& theta, const CMatrix& gamma, std::size_t horizon, Tolerance tol) {
  const VnAlgebra& b = theta.domain();
  const std::size_t n = b.ambient_dim();
  if (b.dim() != n * n) fail(ErrorKind::NotFullAlgebra, "the algebra must be all of B(C^n)");
  if (gamma.rows() != n || gamma.cols() != 1) fail(ErrorKind::DimensionMismatch, "gamma must be a column of length n");
  const double norm_err = std::abs(frobenius(gamma) - 1.0);
  if (norm_err > tol.eps) fail(ErrorKind::NotUnitVector, "gamma is not a unit vector", norm_err);
  std::vector<Endomorphism> powers{Endomorphism::identity(b)};
  for (std::size_t t = 1; t <= horizon; ++t) powers.push_back(compose(theta, powers.back(), tol));
  BhatSystem out;
  const CMatrix gg = gamma * gamma.adjoint();
  for (std::size_t t = 0; t <= horizon; ++t) out.spaces.push_back(range_basis(powers[t].apply(gg), tol));
  const CMatrix ga = gamma.adjoint();
  out.products.resize(horizon + 1);
  for (std::size_t s = 0; s <= horizon; ++s)
    for (std::size_t t = 0; s + t <= horizon; ++t) {
      const CMatrix &qs = out.spaces[s], &qt = out.spaces[t], &qst = out.spaces[s + t];
      CMatrix u(qst.cols(), qs.cols() * qt.cols());
      for (std::size_t a = 0; a < qs.cols(); ++a) {
        const CMatrix m = qst.adjoint() * powers[t].apply(qs.col(a) * ga) * qt;
        u.set_block(0, a * qt.cols(), m);
      }
      out.products[s].push_back(u);
      out.unitarity = std::max(out.unitarity, unitarity_residual(u));
    }
  for (std::size_t t = 0; t <= horizon; ++t) {
    const CMatrix& qt = out.spaces[t];
    CMatrix v(n, n * qt.cols());
    for (std::size_t i = 0; i < n; ++i) {
      CMatrix e(n, 1);
      e(i, 0) = 1.0;
      v.set_block(0, i * qt.cols(), powers[t].apply(e * ga) * qt);
    }
    out.dilation.push_back(v);
    out.unitarity = std::max(out.unitarity, unitarity_residual(v));
    const CMatrix id_t = CMatrix::identity(qt.cols());
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const CMatrix eij = CMatrix::unit(n, i, j);
        out.recovery = std::max(out.recovery, scaled_residual(v * kron(eij, id_t) * v.adjoint(), powers[t].apply(eij)));
      }
  }
  for (std::size_t r = 0; r <= horizon; ++r)
    for (std::size_t s = 0; r + s <= horizon; ++s)
      for (std::size_t t = 0; r + s + t <= horizon; ++t) {
        const std::size_t kr = out.spaces[r].cols(), kt = out.spaces[t].cols();
        const CMatrix lhs = out.products[r + s][t] * kron(out.products[r][s], CMatrix::identity(kt));
        const CMatrix rhs = out.products[r][s + t] * kron(CMatrix::identity(kr), out.products[s][t]);
        out.associativity = std::max(out.associativity, scaled_residual(lhs, rhs));
      }
  for (std::size_t s = 0; s <= horizon; ++s)
    for (std::size_t t = 0; s + t <= horizon; ++t) {
      const std::size_t kt = out.spaces[t].cols();
      const CMatrix lhs = out.dilation[t] * kron(out.dilation[s], CMatrix::identity(kt));
      const CMatrix rhs = out.dilation[s + t] * kron(CMatrix::identity(n), out.products[s][t]);
      out.associativity = std::max(out.associativity, scaled_residual(lhs, rhs));
    }
  return out;
}

Correspondence module_over_scalars(const VnAlgebra& b, std::vector<CMatrix> rho_images, Tolerance tol) {
  const VnAlgebra scalars = from_generators(1, {}, tol);
  const std::size_t h = rho_images.empty() ? 0 : rho_images.front().rows();
  AlgebraMap rho(b, std::move(rho_images));
  AlgebraMap rp(scalars, {CMatrix::identity(h)});
  return Correspondence::make(b, commutant(b, tol), scalars, scalars, std::move(rho), std::move(rp), tol);
}

namespace {

DilationFamily right_dilation_with(const DiscreteProductSystem& p, const Correspondence& h,
                                   const std::function<CMatrix(std::size_t, const CMatrix&)>& image, Tolerance tol) {
  DilationFamily w;
  w.side = DilationSide::Right;
  w.space = h;
  for (std::size_t t = 0; t <= p.horizon(); ++t) {
    w.tensors.push_back(tensor_product(p.member(t), h, tol, false));
    w.maps.push_back(carrier_map(w.tensors.back(), [&](const CMatrix& x) { return image(t, x); }));
  }
  require(validate_dilation(p, w, tol).worst(), tol, "right dilation identities fail");
  return w;
}

}  // namespace

DilationFamily right_dilation_from_unitary(const EndomorphismSystem& p, const CMatrix& u, Tolerance tol) {
  const VnAlgebra& b = p.system.algebra();
  const std::size_t n = b.ambient_dim();
  if (u.rows() != n || u.cols() != n) fail(ErrorKind::DimensionMismatch, "unitary shape");
  const double ur = unitarity_residual(u);
  if (ur > tol.eps) fail(ErrorKind::NotUnitary, "dilation unitary is not unitary", ur);
  std::vector<CMatrix> pw{CMatrix::identity(n)};
  for (std::size_t t = 1; t <= p.system.horizon(); ++t) pw.push_back(u * pw.back());
  const Correspondence h = module_over_scalars(b, b.basis(), tol);
  return right_dilation_with(p.system, h, [&](std::size_t t, const CMatrix& x) { return pw[t] * x; }, tol);
}

DilationFamily identity_right_dilation(const DiscreteProductSystem& p, Tolerance tol) {
  const VnAlgebra& b = p.algebra();
  const Correspondence h = module_over_scalars(b, b.basis(), tol);
  return right_dilation_with(p, h, [](std::size_t, const CMatrix& x) { return x; }, tol);
}

CMatrix Representation::eta(std::size_t t, const CMatrix& x) const {
  return maps_.at(t) * pairing_block(tensors_.at(t), x);
}

CMatrix Representation::induced(std::size_t t, const CMatrix& a) const {
  const CMatrix& w = maps_.at(t);
  return w * second_factor(tensors_.at(t), a) * w.adjoint();
}

Representation representation_from_right_dilation(const DiscreteProductSystem& p, const DilationFamily& w,
                                                  RepresentationCheck* check, std::uint64_t seed, Tolerance tol) {
  if (w.side != DilationSide::Right) fail(ErrorKind::DimensionMismatch, "a right dilation is required");
  const auto dv = validate_dilation(p, w, tol);
  require(dv.worst(), tol, "right dilation identities fail");
  Representation rep(w.tensors, w.maps);
  RepresentationCheck c;
  c.multiplicativity = dv.associativity;
  const std::size_t h = w.carrier_dim();
  for (std::size_t t = 0; t <= p.horizon(); ++t) {
    const auto& xs = w.tensors[t].left_elements;
    for (const auto& x : xs) {
      const CMatrix ex = rep.eta(t, x).adjoint();
      for (const auto& y : xs)
        c.isometry = std::max(c.isometry, scaled_residual(ex * rep.eta(t, y), rep.eta(0, x.adjoint() * y)));
    }
  }
  // random elements of the commutant of the left action on H
  std::vector<CMatrix> left;
  for (const auto& b : w.space.left().basis()) left.push_back(w.space.rho().apply(b));
  const auto comm = intertwiner_space(left, left, h, h, tol);
  Rng rng(seed);
  for (int k = 0; k < 3; ++k) {
    CMatrix a(h, h);
    for (const auto& z : comm) a.add_scaled(rng.cnormal(), z);
    for (std::size_t t = 0; t <= p.horizon(); ++t) {
      const CMatrix ind = rep.induced(t, a);
      for (const auto& x : w.tensors[t].left_elements) {
        const CMatrix ex = rep.eta(t, x);
        c.covariance = std::max(c.covariance, scaled_residual(ind * ex, ex * a));
      }
    }
  }
  require(c.isometry, tol, "eta_t(x)^dagger eta_t(y) differs from eta_0(<x, y>)");
  require(c.covariance, tol, "induced endomorphism does not intertwine eta");
  if (check) *check = c;
  return rep;
}

DilationCommutant commutant_via_dilation(const EndomorphismSystem& p, const DilationFamily& w,
                                         std::optional<CMatrix> xi, std::uint64_t seed, Tolerance tol) {
  const VnAlgebra& b = p.system.algebra();
  const std::size_t n = b.ambient_dim(), h = w.carrier_dim(), horizon = p.system.horizon();
  const Correspondence& hs = w.space;
  std::vector<CMatrix> rho_h;
  for (const auto& x : b.basis()) rho_h.push_back(hs.rho().apply(x));

  // unit vector exists iff every irreducible of b occurs in H at least as often as in C^n
  const BlockSignature sig = block_decompose(b, 0x5eed, tol);
  std::string table;
  bool enough = true;
  for (std::size_t i = 0; i < sig.blocks.size(); ++i) {
    const double have = hs.rho().apply(sig.central_projections[i]).trace().real() / double(sig.blocks[i].first);
    const std::size_t have_i = static_cast<std::size_t>(std::llround(have));
    table += " block " + std::to_string(i) + ": need " + std::to_string(sig.blocks[i].second) + ", have " +
             std::to_string(have_i) + ";";
    enough = enough && have_i >= sig.blocks[i].second;
  }
  if (!enough) fail(ErrorKind::NoUnitVector, "no isometry C^n -> H intertwines the algebra:" + table);

  const auto e_prime = intertwiner_space(rho_h, b.basis(), h, n, tol);
  DilationCommutant out;
  if (xi) {
    if (xi->rows() != h || xi->cols() != n) fail(ErrorKind::DimensionMismatch, "unit vector shape");
    double r = isometry_residual(*xi);
    for (std::size_t k = 0; k < b.dim(); ++k) r = std::max(r, scaled_residual(rho_h[k] * *xi, *xi * b.basis()[k]));
    if (r > tol.eps) fail(ErrorKind::NotUnitVector, "xi is not an intertwining isometry", r);
    out.xi = *xi;
  }
  for (int attempt = 0; attempt < 8 && out.xi.empty(); ++attempt) {
    Rng rng(seed + 7919 * static_cast<std::uint64_t>(attempt));
    CMatrix x(h, n);
    for (const auto& z : e_prime) x.add_scaled(rng.cnormal(), z);
    try {
      out.xi = isometric_part(x, tol);
    } catch (const Error&) {
    }
  }
  if (out.xi.empty()) fail(ErrorKind::NoUnitVector, "no invertible element found in C_B(B(C^n, H))" + table);

  RepresentationCheck rc;
  const Representation rep = representation_from_right_dilation(p.system, w, &rc, seed, tol);
  const CMatrix xa = out.xi.adjoint();
  const VnAlgebra& bc = p.system.member(0).right_commutant();

  for (std::size_t t = 0; t <= horizon; ++t) {
    const CMatrix pt = rep.induced(t, out.xi * xa);
    out.projections.push_back(pt);
    if (t == 0) {
      out.frames.push_back(out.xi);
    } else {
      const HermEig eig = herm_eig(pt);
      std::vector<std::size_t> keep;
      for (std::size_t k = 0; k < eig.values.size(); ++k)
        if (eig.values[k] > 0.5) keep.push_back(k);
      CMatrix q(h, keep.size());
      for (std::size_t c = 0; c < keep.size(); ++c) q.set_block(0, c, eig.vectors.col(keep[c]));
      out.frames.push_back(q);
    }
    const CMatrix ups = rep.eta(t, CMatrix::identity(n)) * out.xi;
    out.upsilon.push_back(ups);
    out.nu.push_back(out.frames[t].adjoint() * ups);
    out.unitarity = std::max({out.unitarity, isometry_residual(ups), scaled_residual(ups * ups.adjoint(), pt),
                              unitarity_residual(out.nu.back())});
    for (const auto& x : p.system.member(t).element_space())
      out.well_defined = std::max(out.well_defined, scaled_residual(rep.eta(t, x) * out.xi, ups * x));
  }

  CommutantSystem cs = commutant_system(p, tol);
  const DiscreteProductSystem& ep = cs.system;
  for (std::size_t t = 0; t <= horizon; ++t) {
    const CMatrix& ups = out.upsilon[t];
    for (const auto& xp : ep.member(t).element_space()) {
      const CMatrix img = ups * xp;
      for (const auto& bp : bc.basis())
        out.intertwining = std::max(out.intertwining,
                                    scaled_residual(ups * bp * xp, rep.induced(t, out.xi * bp * xa) * img));
      for (std::size_t k = 0; k < b.dim(); ++k)
        out.intertwining = std::max(out.intertwining, scaled_residual(rho_h[k] * img, img * b.basis()[k]));
    }
  }
  for (std::size_t s = 0; s <= horizon; ++s)
    for (std::size_t t = 0; s + t <= horizon; ++t)
      for (const auto& xs : ep.member(s).element_space()) {
        const CMatrix left = rep.induced(t, out.upsilon[s] * xs * xa);
        for (const auto& xt : ep.member(t).element_space())
          out.product = std::max(out.product, scaled_residual(out.upsilon[s + t] * xs * xt, left * out.upsilon[t] * xt));
      }

  // F'_t in the coordinates of the frames
  std::vector<Correspondence> members;
  for (std::size_t t = 0; t <= horizon; ++t) {
    const CMatrix& q = out.frames[t];
    std::vector<CMatrix> left, right;
    for (const auto& bp : bc.basis()) left.push_back(q.adjoint() * rep.induced(t, out.xi * bp * xa) * q);
    for (const auto& r : rho_h) right.push_back(q.adjoint() * r * q);
    const Correspondence& et = ep.member(t);
    members.push_back(Correspondence::make(et.left(), et.left_commutant(), et.right(), et.right_commutant(),
                                           AlgebraMap(et.left(), std::move(left)),
                                           AlgebraMap(et.right_commutant(), std::move(right)), tol));
  }
  std::vector<std::vector<TensorProduct>> tensors(horizon + 1);
  std::vector<std::vector<CMatrix>> products(horizon + 1);
  for (std::size_t s = 0; s <= horizon; ++s)
    for (std::size_t t = 0; s + t <= horizon; ++t) {
      tensors[s].push_back(tensor_product(members[s], members[t], tol, false));
      const CMatrix &qs = out.frames[s], &qt = out.frames[t], &qst = out.frames[s + t];
      products[s].push_back(carrier_map(tensors[s].back(), [&](const CMatrix& y) {
        return qst.adjoint() * rep.induced(t, qs * y * xa) * qt;
      }));
    }
  out.f_prime = DiscreteProductSystem(bc, members, tensors, products);
  const auto fv = out.f_prime.validate(tol);
  out.product = std::max(out.product, fv.worst());

  require(out.unitarity, tol, "Upsilon_t is not a unitary onto theta^w_t(xi xi^dagger) H");
  require(out.well_defined, tol, "eta_t(x) xi differs from Upsilon_t x");
  require(out.intertwining, tol, "nu_t is not bilinear");
  require(out.product, tol, "nu does not respect the products");
  return out;
}

}  // namespace vnpair
