#include "fracflow/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/QR>

#include "fracflow/error.hpp"

namespace fracflow {

Svd jacobi_svd(const Matrix& a, double tol, int max_sweeps) {
  const bool transposed = a.rows() < a.cols();
  Matrix w = transposed ? Matrix(a.transpose()) : a;
  const Eigen::Index n = w.cols();
  if (w.rows() > 2 * n) {
    // Tall input: rotate the small triangular factor instead.
    const Eigen::HouseholderQR<Matrix> qr(w);
    const Matrix r = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
    Svd inner = jacobi_svd(r, tol, max_sweeps);
    Matrix q = qr.householderQ() * Matrix::Identity(w.rows(), n);
    Svd out{q * inner.U, std::move(inner.S), std::move(inner.V)};
    if (transposed) std::swap(out.U, out.V);
    return out;
  }
  Matrix v = Matrix::Identity(n, n);

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    bool rotated = false;
    for (Eigen::Index p = 0; p + 1 < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double alpha = w.col(p).squaredNorm();
        const double beta = w.col(q).squaredNorm();
        const double gamma = w.col(p).dot(w.col(q));
        if (gamma == 0.0 || std::abs(gamma) <= tol * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (Eigen::Index i = 0; i < w.rows(); ++i) {
          const double wp = w(i, p), wq = w(i, q);
          w(i, p) = c * wp - s * wq;
          w(i, q) = s * wp + c * wq;
        }
        for (Eigen::Index i = 0; i < n; ++i) {
          const double vp = v(i, p), vq = v(i, q);
          v(i, p) = c * vp - s * vq;
          v(i, q) = s * vp + c * vq;
        }
      }
    }
    if (!rotated) break;
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  Vector norms(n);
  for (Eigen::Index j = 0; j < n; ++j) norms(j) = w.col(j).norm();
  std::stable_sort(order.begin(), order.end(), [&](auto x, auto y) { return norms(x) > norms(y); });

  Svd out;
  out.S.resize(n);
  out.U.resize(w.rows(), n);
  out.V.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto j = order[static_cast<std::size_t>(k)];
    out.S(k) = norms(j);
    out.U.col(k) = norms(j) > 0.0 ? Vector(w.col(j) / norms(j)) : Vector::Zero(w.rows());
    out.V.col(k) = v.col(j);
  }
  if (transposed) std::swap(out.U, out.V);
  return out;
}

Matrix low_rank(const Svd& svd, Eigen::Index k) {
  if (k < 0 || k > svd.S.size()) throw Error("rank out of range");
  return svd.U.leftCols(k) * svd.S.head(k).asDiagonal() * svd.V.leftCols(k).transpose();
}

}  // namespace fracflow
