#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace vnpair {

using cd = std::complex<double>;

// Dense complex matrix, row-major.
class CMatrix {
 public:
  CMatrix() = default;
  CMatrix(std::size_t rows, std::size_t cols);
  CMatrix(std::size_t rows, std::size_t cols, std::vector<cd> data);
  CMatrix(std::initializer_list<std::initializer_list<cd>> rows);

  static CMatrix identity(std::size_t n);
  static CMatrix zeros(std::size_t rows, std::size_t cols) { return CMatrix(rows, cols); }
  static CMatrix unit(std::size_t n, std::size_t i, std::size_t j);  // matrix unit e_ij
  static CMatrix diag(const std::vector<cd>& d);
  static CMatrix column(const std::vector<cd>& v);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }
  bool is_square() const { return rows_ == cols_; }

  cd* data() { return data_.data(); }
  const cd* data() const { return data_.data(); }
  const std::vector<cd>& values() const { return data_; }

  cd& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const cd& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  CMatrix adjoint() const;
  CMatrix transpose() const;
  CMatrix conj() const;
  cd trace() const;
  bool all_finite() const;

  CMatrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;
  void set_block(std::size_t r0, std::size_t c0, const CMatrix& b);
  CMatrix col(std::size_t j) const;
  // same entries, new shape (row-major order preserved)
  CMatrix reshaped(std::size_t rows, std::size_t cols) const;

  CMatrix& operator+=(const CMatrix& o);
  CMatrix& operator-=(const CMatrix& o);
  CMatrix& operator*=(cd s);
  void add_scaled(cd alpha, const CMatrix& x);  // this += alpha x

  bool operator==(const CMatrix& o) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cd> data_;
};

CMatrix operator+(CMatrix a, const CMatrix& b);
CMatrix operator-(CMatrix a, const CMatrix& b);
CMatrix operator*(const CMatrix& a, const CMatrix& b);
CMatrix operator*(cd s, CMatrix a);
CMatrix operator*(CMatrix a, cd s);

CMatrix kron(const CMatrix& a, const CMatrix& b);
CMatrix hstack(const std::vector<CMatrix>& parts);
CMatrix vstack(const std::vector<CMatrix>& parts);

// trace(a^dagger b)
cd hs_inner(const CMatrix& a, const CMatrix& b);
double frobenius(const CMatrix& a);
double frobenius_diff(const CMatrix& a, const CMatrix& b);
// ||a - b||_F / max(1, ||a||_F, ||b||_F)
double scaled_residual(const CMatrix& a, const CMatrix& b);
// scaled distance of u^dagger u and u u^dagger from the identity
double unitarity_residual(const CMatrix& u);
double isometry_residual(const CMatrix& v);  // v^dagger v against I

struct Tolerance {
  double eps = 1e-9;
  static Tolerance from_env();  // VNPAIR_TOL if set and valid, else the default
};

struct ApproxResult {
  bool equal;
  double residual;  // ||a - b||_F
};

ApproxResult approx_equal(const CMatrix& a, const CMatrix& b, Tolerance tol = {});

// Orthonormal (under hs_inner) basis of {X rows x cols : L_k vec(X) = 0 for all k}.
// Each constraint L_k has rows*cols columns; vec is row-major.
std::vector<CMatrix> null_space(const std::vector<CMatrix>& constraints, std::size_t rows, std::size_t cols,
                                Tolerance tol = {});

// Orthonormal basis of {X h x n : P_k X = X Q_k for all k}, P_k h x h, Q_k n x n.
std::vector<CMatrix> intertwiner_space(const std::vector<CMatrix>& p, const std::vector<CMatrix>& q, std::size_t h,
                                       std::size_t n, Tolerance tol = {});

// Numerical rank of the stacked constraints (cutoff eps * sigma_max).
std::size_t stacked_rank(const std::vector<CMatrix>& constraints, Tolerance tol = {});

CMatrix polar_unitary(const CMatrix& t, Tolerance tol = {});
// t (t^dagger t)^(-1/2) for a tall matrix of full column rank
CMatrix isometric_part(const CMatrix& t, Tolerance tol = {});

CMatrix random_unitary(std::size_t n, std::uint64_t seed);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  double normal() { return normal_(eng_); }
  cd cnormal() { return {normal_(eng_) / 1.4142135623730951, normal_(eng_) / 1.4142135623730951}; }
  double uniform() { return uniform_(eng_); }
  std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : eng_() % n; }
  std::uint64_t next() { return eng_(); }
  CMatrix gaussian(std::size_t rows, std::size_t cols);
  CMatrix hermitian(std::size_t n);
  CMatrix unit_vector(std::size_t n);

 private:
  std::mt19937_64 eng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

// Eigen-backed decompositions.
struct Svd {
  CMatrix u;
  std::vector<double> s;  // descending
  CMatrix v;
};
Svd svd(const CMatrix& a);  // thin
std::vector<double> singular_values(const CMatrix& a);
std::size_t rank(const CMatrix& a, Tolerance tol = {});

struct HermEig {
  std::vector<double> values;  // ascending
  CMatrix vectors;             // columns
};
HermEig herm_eig(const CMatrix& a);

// Moore-Penrose inverse (singular values below eps * sigma_max dropped).
CMatrix pseudo_inverse(const CMatrix& a, Tolerance tol = {});

// Orthonormal basis (columns) of the range of a (cutoff eps * sigma_max).
CMatrix range_basis(const CMatrix& a, Tolerance tol = {});

}  // namespace vnpair
