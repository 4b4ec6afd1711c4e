#pragma once
// Independent reference computations for tests: plain Eigen LU/SVD on explicitly stacked systems.
#include <Eigen/Dense>

#include "vnpair/numkernel.hpp"

namespace oracle {

inline Eigen::MatrixXcd to_eigen(const vnpair::CMatrix& a) {
  Eigen::MatrixXcd e(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) e(i, j) = a(i, j);
  return e;
}

// dimension of {X h x n : P_k X = X Q_k}, by full-pivot LU on the stacked Kronecker system
inline std::size_t intertwiner_dim(const std::vector<vnpair::CMatrix>& p, const std::vector<vnpair::CMatrix>& q,
                                   std::size_t h, std::size_t n) {
  const std::size_t d = h * n;
  Eigen::MatrixXcd big(d * p.size(), d);
  for (std::size_t k = 0; k < p.size(); ++k) {
    Eigen::MatrixXcd blk = Eigen::MatrixXcd::Zero(d, d);
    for (std::size_t i = 0; i < h; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        // (P X)_{ij} = sum_a P_ia X_aj ; (X Q)_{ij} = sum_b X_ib Q_bj
        for (std::size_t a = 0; a < h; ++a) blk(i * n + j, a * n + j) += p[k](i, a);
        for (std::size_t b = 0; b < n; ++b) blk(i * n + j, i * n + b) -= q[k](b, j);
      }
    big.middleRows(k * d, d) = blk;
  }
  if (p.empty()) return d;
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(big);
  lu.setThreshold(1e-10);
  return d - lu.rank();
}

// dimension of span of matrices, by SVD of their stacked vecs
inline std::size_t span_dim(const std::vector<vnpair::CMatrix>& ms) {
  if (ms.empty()) return 0;
  Eigen::MatrixXcd m(ms.front().size(), ms.size());
  for (std::size_t k = 0; k < ms.size(); ++k)
    for (std::size_t e = 0; e < ms[k].size(); ++e) m(e, k) = ms[k].data()[e];
  Eigen::JacobiSVD<Eigen::MatrixXcd> sv(m);
  sv.setThreshold(1e-9);
  return sv.rank();
}

// numerical rank of a Hermitian PSD matrix with O(1) entries (relative cutoff, absolute floor)
inline std::size_t psd_rank(const Eigen::MatrixXcd& g, double rel = 1e-9) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g);
  const double top = es.eigenvalues().maxCoeff();
  std::size_t r = 0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) r += es.eigenvalues()(i) > std::max(rel * top, 1e-12);
  return r;
}

}  // namespace oracle
