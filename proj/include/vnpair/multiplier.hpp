#pragma once

#include <vector>

#include "vnpair/numkernel.hpp"

namespace vnpair {

// Square: 0 <= s, t <= N. Triangle: s + t <= N (what a unitary family over {0..N} determines).
enum class GridShape { Square, Triangle };

// Unit-modulus function on a finite grid satisfying the cocycle identity wherever all four
// arguments lie on the grid, and constant on the boundary.
class Multiplier {
 public:
  Multiplier() = default;

  // values row-major over (N+1) x (N+1); entries outside the shape are ignored
  static Multiplier validate(std::size_t n, GridShape shape, std::vector<cd> values, Tolerance tol = {});
  static Multiplier validate(const std::vector<std::vector<cd>>& grid, GridShape shape = GridShape::Square,
                             Tolerance tol = {});
  static Multiplier constant(std::size_t n, GridShape shape, cd c);

  std::size_t grid() const { return n_; }
  GridShape shape() const { return shape_; }
  bool contains(std::size_t s, std::size_t t) const;
  // largest s + t on the grid
  std::size_t max_sum() const { return shape_ == GridShape::Square ? 2 * n_ : n_; }
  cd operator()(std::size_t s, std::size_t t) const;

  struct Residuals {
    double unimodular = 0.0;
    double boundary = 0.0;
    double cocycle = 0.0;
    double worst() const { return std::max({unimodular, boundary, cocycle}); }
  };
  const Residuals& residuals() const { return res_; }

  // exact equality of the grid values
  bool operator==(const Multiplier& o) const { return n_ == o.n_ && shape_ == o.shape_ && v_ == o.v_; }

 private:
  std::size_t n_ = 0;
  GridShape shape_ = GridShape::Square;
  std::vector<cd> v_;
  Residuals res_;
};

// m(s,t) f(s+t) = f(s) f(t) on the whole grid; f has max_sum() + 1 entries
struct Trivialization {
  std::vector<cd> f;
  double residual = 0.0;
};
Trivialization trivialize(const Multiplier& m, Tolerance tol = {});
// worst |m(s,t) f(s+t) - f(s) f(t)| over the grid
double trivialization_residual(const Multiplier& m, const std::vector<cd>& f);

Multiplier transpose(const Multiplier& m, Tolerance tol = {});
Multiplier pointwise_product(const Multiplier& a, const Multiplier& b, Tolerance tol = {});
Multiplier inverse(const Multiplier& m, Tolerance tol = {});

// m(s,t) with U_t U_s = U_{s+t} m(s,t), on the triangle of the family's horizon
Multiplier extract(const std::vector<CMatrix>& family, Tolerance tol = {});
// distance of a from C I, relative to max(1, ||a||)
double scalar_deviation(const CMatrix& a);

}  // namespace vnpair
