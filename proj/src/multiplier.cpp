#include "vnpair/multiplier.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vnpair/error.hpp"

namespace vnpair {

namespace {

constexpr double kModulusTol = 1e-12;

std::string at(std::size_t s, std::size_t t) { return "(" + std::to_string(s) + "," + std::to_string(t) + ")"; }

void same_grid(const Multiplier& a, const Multiplier& b) {
  if (a.grid() != b.grid() || a.shape() != b.shape()) fail(ErrorKind::GridMismatch, "multipliers live on different grids");
}

}  // namespace

bool Multiplier::contains(std::size_t s, std::size_t t) const {
  if (shape_ == GridShape::Square) return s <= n_ && t <= n_;
  return s + t <= n_;
}

cd Multiplier::operator()(std::size_t s, std::size_t t) const {
  if (!contains(s, t)) fail(ErrorKind::GridMismatch, "point " + at(s, t) + " is off the grid");
  return v_[s * (n_ + 1) + t];
}

Multiplier Multiplier::constant(std::size_t n, GridShape shape, cd c) {
  return validate(n, shape, std::vector<cd>((n + 1) * (n + 1), c));
}

Multiplier Multiplier::validate(const std::vector<std::vector<cd>>& grid, GridShape shape, Tolerance tol) {
  if (grid.empty()) fail(ErrorKind::GridMismatch, "empty grid");
  const std::size_t side = grid.size();
  std::vector<cd> v;
  for (const auto& row : grid) {
    if (row.size() != side) fail(ErrorKind::GridMismatch, "grid is not square");
    v.insert(v.end(), row.begin(), row.end());
  }
  return validate(side - 1, shape, std::move(v), tol);
}

Multiplier Multiplier::validate(std::size_t n, GridShape shape, std::vector<cd> values, Tolerance tol) {
  if (values.size() != (n + 1) * (n + 1)) fail(ErrorKind::GridMismatch, "expected (N+1)^2 values");
  Multiplier m;
  m.n_ = n;
  m.shape_ = shape;
  m.v_ = std::move(values);
  for (std::size_t s = 0; s <= n; ++s)
    for (std::size_t t = 0; t <= n; ++t)
      if (!m.contains(s, t)) m.v_[s * (n + 1) + t] = cd{};
  Residuals& r = m.res_;
  for (std::size_t s = 0; s <= n; ++s)
    for (std::size_t t = 0; t <= n; ++t) {
      if (!m.contains(s, t)) continue;
      const double d = std::abs(std::abs(m(s, t)) - 1.0);
      if (!std::isfinite(d) || d > kModulusTol) fail(ErrorKind::NotUnimodular, "|m" + at(s, t) + "| != 1", d);
      r.unimodular = std::max(r.unimodular, d);
    }
  auto cocycle = [&](bool with_zero) {
    for (std::size_t a = 0; a <= n; ++a)
      for (std::size_t s = 0; s <= n; ++s)
        for (std::size_t t = 0; t <= n; ++t) {
          if ((a == 0 || s == 0 || t == 0) != with_zero) continue;
          if (!m.contains(a, s) || !m.contains(a + s, t) || !m.contains(a, s + t) || !m.contains(s, t)) continue;
          const double d = std::abs(m(a, s) * m(a + s, t) - m(a, s + t) * m(s, t));
          if (d > tol.eps)
            fail(ErrorKind::CocycleViolation,
                 "cocycle fails at (r,s,t) = (" + std::to_string(a) + "," + std::to_string(s) + "," + std::to_string(t) + ")", d);
          r.cocycle = std::max(r.cocycle, d);
        }
  };
  // triples with a zero index reduce to boundary constancy, so they are checked after it
  cocycle(false);
  const cd m00 = m(0, 0);
  for (std::size_t t = 1; t <= n; ++t)
    for (const auto& [a, b] : {std::pair{std::size_t{0}, t}, std::pair{t, std::size_t{0}}}) {
      if (!m.contains(a, b)) continue;
      const double d = std::abs(m(a, b) - m00);
      if (d > tol.eps) fail(ErrorKind::BoundaryViolation, "m" + at(a, b) + " differs from m(0,0)", d);
      r.boundary = std::max(r.boundary, d);
    }
  cocycle(true);
  return m;
}

double trivialization_residual(const Multiplier& m, const std::vector<cd>& f) {
  if (f.size() != m.max_sum() + 1) fail(ErrorKind::GridMismatch, "f has the wrong length");
  double r = 0.0;
  for (std::size_t s = 0; s <= m.grid(); ++s)
    for (std::size_t t = 0; t <= m.grid(); ++t)
      if (m.contains(s, t)) r = std::max(r, std::abs(m(s, t) * f[s + t] - f[s] * f[t]));
  return r;
}

Trivialization trivialize(const Multiplier& m, Tolerance tol) {
  const cd m00 = m(0, 0);
  const std::size_t top = m.max_sum();
  // normalized multiplier is 1 on the boundary; f~(0) = f~(1) = 1 and f~(a+b) = f~(a) f~(b) / m~(a,b)
  std::vector<cd> g(top + 1, cd{1.0});
  for (std::size_t k = 2; k <= top; ++k) {
    std::size_t a = 1;
    while (!m.contains(a, k - a)) ++a;
    g[k] = g[a] * g[k - a] / (m(a, k - a) / m00);
    g[k] /= std::abs(g[k]);
  }
  Trivialization out;
  for (const cd& x : g) out.f.push_back(m00 * x);
  out.residual = trivialization_residual(m, out.f);
  if (out.residual > tol.eps) fail(ErrorKind::TrivializationResidual, "f(s) f(t) != m(s,t) f(s+t)", out.residual);
  return out;
}

Multiplier transpose(const Multiplier& m, Tolerance tol) {
  const std::size_t n = m.grid();
  std::vector<cd> v((n + 1) * (n + 1));
  for (std::size_t s = 0; s <= n; ++s)
    for (std::size_t t = 0; t <= n; ++t)
      if (m.contains(t, s)) v[s * (n + 1) + t] = m(t, s);
  return Multiplier::validate(n, m.shape(), std::move(v), tol);
}

Multiplier pointwise_product(const Multiplier& a, const Multiplier& b, Tolerance tol) {
  same_grid(a, b);
  const std::size_t n = a.grid();
  std::vector<cd> v((n + 1) * (n + 1));
  for (std::size_t s = 0; s <= n; ++s)
    for (std::size_t t = 0; t <= n; ++t)
      if (a.contains(s, t)) v[s * (n + 1) + t] = a(s, t) * b(s, t);
  return Multiplier::validate(n, a.shape(), std::move(v), tol);
}

Multiplier inverse(const Multiplier& m, Tolerance tol) {
  const std::size_t n = m.grid();
  std::vector<cd> v((n + 1) * (n + 1));
  for (std::size_t s = 0; s <= n; ++s)
    for (std::size_t t = 0; t <= n; ++t)
      if (m.contains(s, t)) v[s * (n + 1) + t] = std::conj(m(s, t));
  return Multiplier::validate(n, m.shape(), std::move(v), tol);
}

double scalar_deviation(const CMatrix& a) {
  const std::size_t n = a.rows();
  const cd lambda = a.trace() / double(n);
  return frobenius_diff(a, lambda * CMatrix::identity(n)) / std::max(1.0, frobenius(a));
}

Multiplier extract(const std::vector<CMatrix>& family, Tolerance tol) {
  if (family.empty()) fail(ErrorKind::DimensionMismatch, "empty unitary family");
  const std::size_t n = family.size() - 1, dim = family.front().rows();
  for (std::size_t t = 0; t <= n; ++t) {
    if (family[t].rows() != dim || family[t].cols() != dim) fail(ErrorKind::DimensionMismatch, "family members differ in shape");
    const double r = unitarity_residual(family[t]);
    if (r > tol.eps) fail(ErrorKind::NotUnitary, "U_" + std::to_string(t) + " is not unitary", r);
  }
  std::vector<cd> v((n + 1) * (n + 1));
  for (std::size_t s = 0; s <= n; ++s)
    for (std::size_t t = 0; s + t <= n; ++t) {
      const CMatrix q = family[s + t].adjoint() * family[t] * family[s];
      const double d = scalar_deviation(q);
      if (d > tol.eps) fail(ErrorKind::NotScalar, "U_t U_s U_{s+t}^dagger is not scalar at " + at(s, t), d);
      const cd lambda = q.trace() / double(dim);
      v[s * (n + 1) + t] = lambda / std::abs(lambda);
    }
  return Multiplier::validate(n, GridShape::Triangle, std::move(v), tol);
}

}  // namespace vnpair
