#pragma once

#include <vector>

#include "spectran/numkit/matrix.hpp"

namespace spectran::spectral {

using numkit::Matrix;

/// Thin SVD factors E = U diag(sigma) Vt of an N x l matrix.
///
/// Invariants: U^T U = I and Vt Vt^T = I within 1e-6 Frobenius; sigma is
/// nonincreasing and positive; trailing values below 1e-10 * sigma[0] are
/// trimmed from the effective rank. Sign convention: in each column of U the
/// entry of largest magnitude (first such row on ties) is positive, which
/// makes the factorization deterministic for distinct singular values.
struct SvdFactors {
  Matrix u;                   // N x r
  std::vector<double> sigma;  // r values
  Matrix vt;                  // r x l

  int rank() const { return static_cast<int>(sigma.size()); }
};

/// One-sided Jacobi SVD. Deterministic: fixed sweep order, no threading.
SvdFactors svd_decompose(const Matrix& e);

/// Principal-component projection keeping singular-value weights:
/// E_s = U[:, :d] * diag(sigma_1..sigma_d), equal to E * V[:, :d].
Matrix truncate_project(const SvdFactors& f, int d);

/// Whitened principal directions: E_s = U[:, :d].
Matrix identity_project(const SvdFactors& f, int d);

}  // namespace spectran::spectral
