#include "vnpair/numkernel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include "vnpair/error.hpp"
#include "vnpair/simd.hpp"

namespace vnpair {

namespace {
void require_same_shape(const CMatrix& a, const CMatrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    fail(ErrorKind::DimensionMismatch, std::string(op) + ": " + std::to_string(a.rows()) + "x" +
                                           std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                                           std::to_string(b.cols()));
  }
}
}  // namespace

CMatrix::CMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

CMatrix::CMatrix(std::size_t rows, std::size_t cols, std::vector<cd> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) fail(ErrorKind::DimensionMismatch, "entry count does not match shape");
}

CMatrix::CMatrix(std::initializer_list<std::initializer_list<cd>> rows) {
  rows_ = rows.size();
  cols_ = rows_ ? rows.begin()->size() : 0;
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) fail(ErrorKind::DimensionMismatch, "ragged initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

CMatrix CMatrix::identity(std::size_t n) {
  CMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

CMatrix CMatrix::unit(std::size_t n, std::size_t i, std::size_t j) {
  CMatrix m(n, n);
  m(i, j) = 1.0;
  return m;
}

CMatrix CMatrix::diag(const std::vector<cd>& d) {
  CMatrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

CMatrix CMatrix::column(const std::vector<cd>& v) { return CMatrix(v.size(), 1, v); }

CMatrix CMatrix::adjoint() const {
  CMatrix r(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) r(j, i) = std::conj((*this)(i, j));
  return r;
}

CMatrix CMatrix::transpose() const {
  CMatrix r(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
  return r;
}

CMatrix CMatrix::conj() const {
  CMatrix r = *this;
  for (auto& z : r.data_) z = std::conj(z);
  return r;
}

cd CMatrix::trace() const {
  cd t = 0.0;
  for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
  return t;
}

bool CMatrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](const cd& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

CMatrix CMatrix::block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
  if (r0 + nr > rows_ || c0 + nc > cols_) fail(ErrorKind::DimensionMismatch, "block out of range");
  CMatrix b(nr, nc);
  for (std::size_t i = 0; i < nr; ++i)
    std::copy_n(data_.data() + (r0 + i) * cols_ + c0, nc, b.data() + i * nc);
  return b;
}

void CMatrix::set_block(std::size_t r0, std::size_t c0, const CMatrix& b) {
  if (r0 + b.rows() > rows_ || c0 + b.cols() > cols_) fail(ErrorKind::DimensionMismatch, "block out of range");
  for (std::size_t i = 0; i < b.rows(); ++i)
    std::copy_n(b.data() + i * b.cols(), b.cols(), data_.data() + (r0 + i) * cols_ + c0);
}

CMatrix CMatrix::col(std::size_t j) const { return block(0, j, rows_, 1); }

CMatrix CMatrix::reshaped(std::size_t rows, std::size_t cols) const { return CMatrix(rows, cols, data_); }

CMatrix& CMatrix::operator+=(const CMatrix& o) {
  require_same_shape(*this, o, "add");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

CMatrix& CMatrix::operator-=(const CMatrix& o) {
  require_same_shape(*this, o, "subtract");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  return *this;
}

CMatrix& CMatrix::operator*=(cd s) {
  for (auto& z : data_) z *= s;
  return *this;
}

void CMatrix::add_scaled(cd alpha, const CMatrix& x) {
  require_same_shape(*this, x, "axpy");
  simd::active_kernels().axpy(alpha, x.data(), data(), data_.size());
}

CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }

CMatrix operator*(const CMatrix& a, const CMatrix& b) {
  if (a.cols() != b.rows()) {
    fail(ErrorKind::DimensionMismatch, "multiply: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                                           " by " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  }
  CMatrix c(a.rows(), b.cols());
  if (c.size() == 0) return c;
  simd::active_kernels().gemm(a.data(), b.data(), c.data(), a.rows(), a.cols(), b.cols());
  return c;
}

CMatrix operator*(cd s, CMatrix a) { return a *= s; }
CMatrix operator*(CMatrix a, cd s) { return a *= s; }

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix k(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const cd aij = a(i, j);
      if (aij == cd{}) continue;
      for (std::size_t p = 0; p < b.rows(); ++p)
        for (std::size_t q = 0; q < b.cols(); ++q) k(i * b.rows() + p, j * b.cols() + q) = aij * b(p, q);
    }
  return k;
}

CMatrix hstack(const std::vector<CMatrix>& parts) {
  if (parts.empty()) return {};
  std::size_t rows = parts.front().rows(), cols = 0;
  for (const auto& p : parts) {
    if (p.rows() != rows) fail(ErrorKind::DimensionMismatch, "hstack row mismatch");
    cols += p.cols();
  }
  CMatrix r(rows, cols);
  std::size_t c0 = 0;
  for (const auto& p : parts) {
    r.set_block(0, c0, p);
    c0 += p.cols();
  }
  return r;
}

CMatrix vstack(const std::vector<CMatrix>& parts) {
  if (parts.empty()) return {};
  std::size_t cols = parts.front().cols(), rows = 0;
  for (const auto& p : parts) {
    if (p.cols() != cols) fail(ErrorKind::DimensionMismatch, "vstack column mismatch");
    rows += p.rows();
  }
  std::vector<cd> data;
  data.reserve(rows * cols);
  for (const auto& p : parts) data.insert(data.end(), p.values().begin(), p.values().end());
  return CMatrix(rows, cols, std::move(data));
}

cd hs_inner(const CMatrix& a, const CMatrix& b) {
  require_same_shape(a, b, "hs_inner");
  return simd::active_kernels().dotc(a.data(), b.data(), a.size());
}

double frobenius(const CMatrix& a) { return std::sqrt(simd::active_kernels().norm_sq(a.data(), a.size())); }

double frobenius_diff(const CMatrix& a, const CMatrix& b) {
  require_same_shape(a, b, "frobenius_diff");
  return std::sqrt(simd::active_kernels().diff_norm_sq(a.data(), b.data(), a.size()));
}

double scaled_residual(const CMatrix& a, const CMatrix& b) {
  return frobenius_diff(a, b) / std::max({1.0, frobenius(a), frobenius(b)});
}

double unitarity_residual(const CMatrix& u) {
  if (!u.is_square()) fail(ErrorKind::DimensionMismatch, "unitarity check needs a square matrix");
  const CMatrix id = CMatrix::identity(u.rows());
  return std::max(scaled_residual(u.adjoint() * u, id), scaled_residual(u * u.adjoint(), id));
}

double isometry_residual(const CMatrix& v) {
  return scaled_residual(v.adjoint() * v, CMatrix::identity(v.cols()));
}

Tolerance Tolerance::from_env() {
  Tolerance t;
  if (const char* env = std::getenv("VNPAIR_TOL")) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end != env && *end == '\0' && v > 0.0 && v < 1.0) t.eps = v;
  }
  return t;
}

ApproxResult approx_equal(const CMatrix& a, const CMatrix& b, Tolerance tol) {
  const double r = frobenius_diff(a, b);
  return {r <= tol.eps * std::max({1.0, frobenius(a), frobenius(b)}), r};
}

CMatrix Rng::gaussian(std::size_t rows, std::size_t cols) {
  CMatrix m(rows, cols);
  for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = cnormal();
  return m;
}

CMatrix Rng::hermitian(std::size_t n) {
  CMatrix g = gaussian(n, n);
  CMatrix h = g + g.adjoint();
  h *= 0.5;
  return h;
}

CMatrix Rng::unit_vector(std::size_t n) {
  CMatrix v = gaussian(n, 1);
  v *= 1.0 / frobenius(v);
  return v;
}

}  // namespace vnpair
