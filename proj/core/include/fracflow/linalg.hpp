#pragma once

#include "fracflow/table.hpp"

namespace fracflow {

/// Thin SVD, A = U * diag(S) * V^T with S sorted descending.
struct Svd {
  Matrix U;
  Vector S;
  Matrix V;
};

/// One-sided (Hestenes) Jacobi SVD. Deterministic: fixed cyclic pair order.
Svd jacobi_svd(const Matrix& a, double tol = 1e-15, int max_sweeps = 100);

/// Best rank-k reconstruction from a computed SVD.
Matrix low_rank(const Svd& svd, Eigen::Index k);

}  // namespace fracflow
