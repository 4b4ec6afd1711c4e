// Decompositions backed by Eigen; everything else in the library goes through CMatrix.
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>

#include "vnpair/error.hpp"
#include "vnpair/numkernel.hpp"

namespace vnpair {

namespace {

using EMat = Eigen::MatrixXcd;
using RowMap = Eigen::Map<const Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

EMat to_eigen(const CMatrix& a) { return RowMap(a.data(), a.rows(), a.cols()); }

CMatrix from_eigen(const EMat& e) {
  CMatrix m(e.rows(), e.cols());
  for (Eigen::Index i = 0; i < e.rows(); ++i)
    for (Eigen::Index j = 0; j < e.cols(); ++j) m(i, j) = e(i, j);
  return m;
}

// Gate for candidate null directions taken from the Gram spectrum, relative to its top eigenvalue.
// Candidates are then classified against eps * sigma_max on the unsquared constraint matrix.
constexpr double kGramGate = 1e-6;

// Shared tail of both null-space routes: spectral candidates from the Gram operator,
// then an exact singular-value decision on the constraints restricted to those candidates.
// `scale` is the Frobenius norm of the stacked constraints; a Gram spectrum at rounding level
// relative to it means the constraints vanish identically.
std::vector<CMatrix> refine_null(const CMatrix& gram, const std::function<EMat(const EMat&)>& apply,
                                 std::size_t rows, std::size_t cols, double scale, Tolerance tol) {
  const std::size_t d = rows * cols;
  Eigen::SelfAdjointEigenSolver<EMat> es(to_eigen(gram));
  const auto& lam = es.eigenvalues();
  const double lam_max = d ? std::max(0.0, lam(d - 1)) : 0.0;
  std::vector<CMatrix> out;
  // sigma_max measured on the constraints themselves; the Gram spectrum is only trusted as a gate
  const double sigma_top = d ? apply(es.eigenvectors().col(d - 1)).norm() : 0.0;
  if (sigma_top <= 1e-13 * scale) {
    for (std::size_t k = 0; k < d; ++k) {
      CMatrix x(rows, cols);
      x.data()[k] = 1.0;
      out.push_back(std::move(x));
    }
    return out;
  }
  const double sigma_max = std::max(sigma_top, std::sqrt(lam_max));
  const double gate = std::max(kGramGate * lam_max, 1e-14 * scale * scale);
  std::vector<Eigen::Index> cand;
  for (std::size_t k = 0; k < d; ++k)
    if (lam(k) <= gate) cand.push_back(static_cast<Eigen::Index>(k));
  if (cand.empty()) return out;
  EMat z(d, cand.size());
  for (std::size_t c = 0; c < cand.size(); ++c) z.col(c) = es.eigenvectors().col(cand[c]);
  EMat m = apply(z);
  const Eigen::Index c = z.cols();
  EMat r;
  if (m.rows() > c) {
    Eigen::HouseholderQR<EMat> qr(m);
    r = qr.matrixQR().topRows(c).triangularView<Eigen::Upper>();
  } else {
    r = m;
  }
  Eigen::JacobiSVD<EMat> sv(r, Eigen::ComputeFullV);
  const auto& s = sv.singularValues();
  const double cutoff = tol.eps * sigma_max;
  EMat basis = z * sv.matrixV();
  for (Eigen::Index k = 0; k < c; ++k) {
    const bool null = k >= s.size() || s(k) <= cutoff;
    if (!null) continue;
    CMatrix x(rows, cols);
    for (std::size_t e = 0; e < d; ++e) x.data()[e] = basis(e, k);
    out.push_back(std::move(x));
  }
  return out;
}

}  // namespace

Svd svd(const CMatrix& a) {
  Eigen::BDCSVD<EMat> sv(to_eigen(a), Eigen::ComputeThinU | Eigen::ComputeThinV);
  Svd out{from_eigen(sv.matrixU()), {}, from_eigen(sv.matrixV())};
  for (Eigen::Index i = 0; i < sv.singularValues().size(); ++i) out.s.push_back(sv.singularValues()(i));
  return out;
}

std::vector<double> singular_values(const CMatrix& a) {
  if (a.size() == 0) return {};
  Eigen::BDCSVD<EMat> sv(to_eigen(a));
  std::vector<double> s;
  for (Eigen::Index i = 0; i < sv.singularValues().size(); ++i) s.push_back(sv.singularValues()(i));
  return s;
}

std::size_t rank(const CMatrix& a, Tolerance tol) {
  const auto s = singular_values(a);
  if (s.empty() || s.front() == 0.0) return 0;
  return static_cast<std::size_t>(
      std::count_if(s.begin(), s.end(), [&](double x) { return x > tol.eps * s.front(); }));
}

HermEig herm_eig(const CMatrix& a) {
  if (!a.is_square()) fail(ErrorKind::DimensionMismatch, "herm_eig needs a square matrix");
  CMatrix h = a + a.adjoint();
  h *= 0.5;
  Eigen::SelfAdjointEigenSolver<EMat> es(to_eigen(h));
  HermEig out{{}, from_eigen(es.eigenvectors())};
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) out.values.push_back(es.eigenvalues()(i));
  return out;
}

CMatrix pseudo_inverse(const CMatrix& a, Tolerance tol) {
  if (a.size() == 0) return CMatrix(a.cols(), a.rows());
  const Svd s = svd(a);
  CMatrix out(a.cols(), a.rows());
  for (std::size_t k = 0; k < s.s.size(); ++k) {
    if (s.s[k] <= tol.eps * s.s.front()) break;
    const CMatrix vk = s.v.col(k), uk = s.u.col(k);
    out.add_scaled(1.0 / s.s[k], vk * uk.adjoint());
  }
  return out;
}

CMatrix range_basis(const CMatrix& a, Tolerance tol) {
  if (a.size() == 0) return CMatrix(a.rows(), 0);
  const Svd s = svd(a);
  std::size_t r = 0;
  if (!s.s.empty() && s.s.front() > 0.0)
    while (r < s.s.size() && s.s[r] > tol.eps * s.s.front()) ++r;
  return s.u.block(0, 0, a.rows(), r);
}

std::vector<CMatrix> null_space(const std::vector<CMatrix>& constraints, std::size_t rows, std::size_t cols,
                                Tolerance tol) {
  const std::size_t d = rows * cols;
  if (d == 0) return {};
  CMatrix gram(d, d);
  double scale_sq = 0.0;
  for (const auto& l : constraints) {
    if (l.cols() != d) fail(ErrorKind::DimensionMismatch, "constraint width does not match the unknown");
    gram += l.adjoint() * l;
    scale_sq += frobenius(l) * frobenius(l);
  }
  auto apply = [&](const EMat& z) {
    Eigen::Index total = 0;
    for (const auto& l : constraints) total += l.rows();
    EMat m(total, z.cols());
    Eigen::Index r0 = 0;
    for (const auto& l : constraints) {
      m.middleRows(r0, l.rows()) = to_eigen(l) * z;
      r0 += l.rows();
    }
    return m;
  };
  return refine_null(gram, apply, rows, cols, std::sqrt(scale_sq), tol);
}

std::size_t stacked_rank(const std::vector<CMatrix>& constraints, Tolerance tol) {
  if (constraints.empty()) return 0;
  return rank(vstack(constraints), tol);
}

std::vector<CMatrix> intertwiner_space(const std::vector<CMatrix>& p, const std::vector<CMatrix>& q, std::size_t h,
                                       std::size_t n, Tolerance tol) {
  if (p.size() != q.size()) fail(ErrorKind::DimensionMismatch, "intertwiner constraint lists differ in length");
  const std::size_t d = h * n;
  if (d == 0) return {};
  const std::size_t kcount = p.size();
  CMatrix spp(h, h), sqq(n, n);
  double scale_sq = 0.0;
  // cross term C = sum_k kron(P_k^dagger, Q_k^T), assembled from one product of stacked vecs
  CMatrix va(h * h, kcount), vb(n * n, kcount);
  for (std::size_t k = 0; k < kcount; ++k) {
    if (p[k].rows() != h || p[k].cols() != h || q[k].rows() != n || q[k].cols() != n)
      fail(ErrorKind::DimensionMismatch, "intertwiner constraint shape");
    scale_sq += std::pow(frobenius(p[k]), 2) * n + std::pow(frobenius(q[k]), 2) * h;
    spp += p[k].adjoint() * p[k];
    sqq += q[k] * q[k].adjoint();
    const CMatrix pa = p[k].adjoint();
    for (std::size_t i = 0; i < h * h; ++i) va(i, k) = pa.data()[i];
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t l = 0; l < n; ++l) vb(j * n + l, k) = q[k](l, j);  // Q^T(j,l)
  }
  const CMatrix t = va * vb.transpose();  // t((i,a),(j,b)) = sum_k P^dag(i,a) Q^T(j,b)
  CMatrix gram(d, d);
  const CMatrix sqq_c = sqq.conj();
  for (std::size_t i = 0; i < h; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t a = 0; a < h; ++a)
        for (std::size_t b = 0; b < n; ++b) {
          cd g = -t(i * h + a, j * n + b) - std::conj(t(a * h + i, b * n + j));
          if (j == b) g += spp(i, a);
          if (i == a) g += sqq_c(j, b);
          gram(i * n + j, a * n + b) = g;
        }
  auto apply = [&](const EMat& z) {
    EMat m(kcount * d, z.cols());
    for (Eigen::Index c = 0; c < z.cols(); ++c) {
      CMatrix x(h, n);
      for (std::size_t e = 0; e < d; ++e) x.data()[e] = z(e, c);
      for (std::size_t k = 0; k < kcount; ++k) {
        const CMatrix r = p[k] * x - x * q[k];
        for (std::size_t e = 0; e < d; ++e) m(k * d + e, c) = r.data()[e];
      }
    }
    return m;
  };
  return refine_null(gram, apply, h, n, std::sqrt(scale_sq), tol);
}

CMatrix polar_unitary(const CMatrix& t, Tolerance tol) {
  if (!t.is_square()) fail(ErrorKind::DimensionMismatch, "polar_unitary needs a square matrix");
  return isometric_part(t, tol);
}

CMatrix isometric_part(const CMatrix& t, Tolerance tol) {
  if (t.rows() < t.cols()) fail(ErrorKind::DimensionMismatch, "isometric_part needs rows >= cols");
  if (t.size() == 0) return t;
  const Svd s = svd(t);
  if (s.s.back() <= tol.eps * s.s.front())
    fail(ErrorKind::SingularInput, "smallest singular value below eps * largest", s.s.back() / s.s.front());
  return s.u * s.v.adjoint();
}

CMatrix random_unitary(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  const EMat z = to_eigen(rng.gaussian(n, n));
  Eigen::HouseholderQR<EMat> qr(z);
  EMat q = qr.householderQ() * EMat::Identity(n, n);
  const EMat r = qr.matrixQR();
  for (std::size_t j = 0; j < n; ++j) {
    const cd d = r(j, j);
    const double a = std::abs(d);
    q.col(j) *= (a > 0.0 ? d / a : cd(1.0));
  }
  return from_eigen(q);
}

}  // namespace vnpair
