#include "spectran/spectral/svd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "spectran/errors.hpp"

namespace spectran::spectral {

namespace {

// One-sided Jacobi on the columns of a (m x n, m >= n preferred): plane
// rotations orthogonalize column pairs until all are numerically orthogonal.
// On exit a holds U*Sigma column-wise and v (n x n) accumulates the right
// factors. Converges quadratically; the sweep cap is a safety net.
void jacobi_orthogonalize(Matrix& a, Matrix& v) {
  const std::size_t m = a.rows(), n = a.cols();
  v = Matrix::identity(n);
  const double tol = 1e-13;
  const int max_sweeps = 64;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double app = 0.0, aqq = 0.0, apq = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
          const double x = a(i, p), y = a(i, q);
          app += x * x;
          aqq += y * y;
          apq += x * y;
        }
        if (app * aqq == 0.0) continue;
        if (std::abs(apq) <= tol * std::sqrt(app * aqq)) continue;
        rotated = true;
        const double zeta = (aqq - app) / (2.0 * apq);
        const double t =
            (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t i = 0; i < m; ++i) {
          const double x = a(i, p), y = a(i, q);
          a(i, p) = c * x - s * y;
          a(i, q) = s * x + c * y;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const double x = v(i, p), y = v(i, q);
          v(i, p) = c * x - s * y;
          v(i, q) = s * x + c * y;
        }
      }
    }
    if (!rotated) return;
  }
  throw NumericError("svd_decompose: Jacobi sweeps did not converge");
}

}  // namespace

SvdFactors svd_decompose(const Matrix& e) {
  if (e.rows() < 1 || e.cols() < 1) throw DimensionError("svd_decompose: empty matrix");
  if (!e.all_finite()) throw DataError("svd_decompose: input has non-finite entries");

  // Work on the orientation with fewer columns; cost scales with n^2 * m.
  const bool transposed = e.cols() > e.rows();
  Matrix a = transposed ? numkit::transpose(e) : e;
  const std::size_t n = a.cols();

  Matrix right;
  jacobi_orthogonalize(a, right);

  // Column norms are the singular values; sort descending, index ascending on
  // ties so the ordering is deterministic.
  std::vector<double> norms(n);
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) s += a(i, j) * a(i, j);
    norms[j] = std::sqrt(s);
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    if (norms[x] != norms[y]) return norms[x] > norms[y];
    return x < y;
  });

  const double s1 = norms[order[0]];
  std::size_t r = 0;
  while (r < n && norms[order[r]] > 1e-10 * s1 && norms[order[r]] > 0.0) ++r;

  // Left factors = normalized columns of a; right factors from the rotation
  // accumulator. Undo the transposition if needed.
  Matrix left(a.rows(), r);
  Matrix rightv(n, r);
  std::vector<double> sigma(r);
  for (std::size_t k = 0; k < r; ++k) {
    const std::size_t j = order[k];
    sigma[k] = norms[j];
    const double inv = 1.0 / norms[j];
    for (std::size_t i = 0; i < a.rows(); ++i) left(i, k) = a(i, j) * inv;
    for (std::size_t i = 0; i < n; ++i) rightv(i, k) = right(i, j);
  }

  SvdFactors f;
  f.sigma = std::move(sigma);
  if (transposed) {
    f.u = std::move(rightv);  // N x r
    f.vt = numkit::transpose(left);
  } else {
    f.u = std::move(left);
    f.vt = numkit::transpose(rightv);
  }

  // Sign convention: largest-magnitude entry of each U column positive.
  for (std::size_t k = 0; k < f.sigma.size(); ++k) {
    std::size_t arg = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < f.u.rows(); ++i) {
      const double mag = std::abs(f.u(i, k));
      if (mag > best) {
        best = mag;
        arg = i;
      }
    }
    if (f.u(arg, k) < 0.0) {
      for (std::size_t i = 0; i < f.u.rows(); ++i) f.u(i, k) = -f.u(i, k);
      for (std::size_t j = 0; j < f.vt.cols(); ++j) f.vt(k, j) = -f.vt(k, j);
    }
  }
  return f;
}

Matrix truncate_project(const SvdFactors& f, int d) {
  if (d < 1 || d > f.rank())
    throw DimensionError("truncate_project: d must be in [1, rank], got " + std::to_string(d));
  Matrix out(f.u.rows(), static_cast<std::size_t>(d));
  for (std::size_t i = 0; i < out.rows(); ++i)
    for (int j = 0; j < d; ++j)
      out(i, static_cast<std::size_t>(j)) =
          f.u(i, static_cast<std::size_t>(j)) * f.sigma[static_cast<std::size_t>(j)];
  return out;
}

Matrix identity_project(const SvdFactors& f, int d) {
  if (d < 1 || d > f.rank())
    throw DimensionError("identity_project: d must be in [1, rank], got " + std::to_string(d));
  if (!(f.sigma[static_cast<std::size_t>(d - 1)] > 0.0))
    throw NumericError("identity_project: sigma_d is zero");
  Matrix out(f.u.rows(), static_cast<std::size_t>(d));
  for (std::size_t i = 0; i < out.rows(); ++i)
    for (int j = 0; j < d; ++j) out(i, static_cast<std::size_t>(j)) = f.u(i, static_cast<std::size_t>(j));
  return out;
}

}  // namespace spectran::spectral
