#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "spectran/errors.hpp"
#include "spectran/spectral/spectrum.hpp"
#include "spectran/spectral/svd.hpp"

using namespace spectran;
using numkit::Matrix;
using numkit::Rng;
using spectral::SvdFactors;

namespace {

Matrix diag32() {
  Matrix e(2, 2);
  e(0, 0) = 3.0;
  e(1, 1) = 2.0;
  return e;
}

Matrix reconstruct(const SvdFactors& f) {
  Matrix us = f.u;
  for (std::size_t i = 0; i < us.rows(); ++i)
    for (std::size_t j = 0; j < us.cols(); ++j) us(i, j) *= f.sigma[j];
  return numkit::matmul(us, f.vt);
}

double orthonormality_residual(const Matrix& u) {
  const Matrix gram = numkit::matmul_tn(u, u);
  return numkit::sub(gram, Matrix::identity(u.cols())).frobenius_norm();
}

// Planted-factor synthetic matrix with known singular values.
Matrix planted(Rng& rng, std::size_t n, std::size_t l, const std::vector<double>& s) {
  // Orthonormalize two Gaussian draws by Gram-Schmidt.
  auto orth = [&](std::size_t rows, std::size_t cols) {
    Matrix q = oracles::random_matrix(rng, rows, cols);
    for (std::size_t j = 0; j < cols; ++j) {
      for (std::size_t p = 0; p < j; ++p) {
        double dot = 0.0;
        for (std::size_t i = 0; i < rows; ++i) dot += q(i, p) * q(i, j);
        for (std::size_t i = 0; i < rows; ++i) q(i, j) -= dot * q(i, p);
      }
      double norm = 0.0;
      for (std::size_t i = 0; i < rows; ++i) norm += q(i, j) * q(i, j);
      norm = std::sqrt(norm);
      for (std::size_t i = 0; i < rows; ++i) q(i, j) /= norm;
    }
    return q;
  };
  const Matrix u = orth(n, s.size());
  const Matrix v = orth(l, s.size());
  Matrix e(n, l);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < l; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < s.size(); ++k) acc += u(i, k) * s[k] * v(j, k);
      e(i, j) = acc;
    }
  return e;
}

}  // namespace

TEST_CASE("svd of a diagonal matrix") {
  const SvdFactors f = spectral::svd_decompose(diag32());
  REQUIRE(f.rank() == 2);
  CHECK(f.sigma[0] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(f.sigma[1] == doctest::Approx(2.0).epsilon(1e-12));
  // Identity factors under the sign convention.
  CHECK(f.u(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(f.u(1, 1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(f.u(0, 1)) <= 1e-12);
  CHECK(f.vt(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(f.vt(1, 1) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("svd singular values from the characteristic polynomial") {
  // E = [[1,1],[0,1]]; eigenvalues of E^T E are (3 +- sqrt(5))/2, so the
  // singular values are the golden ratio and its reciprocal.
  Matrix e(2, 2);
  e(0, 0) = 1;
  e(0, 1) = 1;
  e(1, 1) = 1;
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  const SvdFactors f = spectral::svd_decompose(e);
  REQUIRE(f.rank() == 2);
  CHECK(f.sigma[0] == doctest::Approx(phi).epsilon(1e-12));
  CHECK(f.sigma[1] == doctest::Approx(1.0 / phi).epsilon(1e-12));
}

TEST_CASE("svd reconstruction and orthonormality on random matrices") {
  Rng rng(21);
  for (int trial = 0; trial < 6; ++trial) {
    const std::size_t n = trial % 2 == 0 ? 40 : 17;
    const std::size_t l = trial % 2 == 0 ? 100 : 9;
    const Matrix e = oracles::random_matrix(rng, n, l);
    const SvdFactors f = spectral::svd_decompose(e);
    CHECK(numkit::sub(reconstruct(f), e).frobenius_norm() <= 1e-5 * e.frobenius_norm());
    CHECK(orthonormality_residual(f.u) <= 1e-6);
    CHECK(orthonormality_residual(numkit::transpose(f.vt)) <= 1e-6);
    for (std::size_t k = 1; k < f.sigma.size(); ++k) CHECK(f.sigma[k - 1] >= f.sigma[k]);
  }
}

TEST_CASE("svd rejects non-finite input and is deterministic") {
  Matrix bad(2, 2, 1.0);
  bad(0, 1) = std::nan("");
  CHECK_THROWS_AS(spectral::svd_decompose(bad), DataError);

  Rng rng(5);
  const Matrix e = oracles::random_matrix(rng, 12, 8);
  const SvdFactors a = spectral::svd_decompose(e);
  const SvdFactors b = spectral::svd_decompose(e);
  CHECK(a.u == b.u);
  CHECK(a.vt == b.vt);
  CHECK(a.sigma == b.sigma);
  // Largest-magnitude entry of each left column is positive.
  for (int k = 0; k < a.rank(); ++k) {
    double best = 0.0;
    for (std::size_t i = 0; i < a.u.rows(); ++i)
      if (std::abs(a.u(i, static_cast<std::size_t>(k))) > std::abs(best))
        best = a.u(i, static_cast<std::size_t>(k));
    CHECK(best > 0.0);
  }
}

TEST_CASE("truncate_project keeps singular-value weights") {
  const SvdFactors f = spectral::svd_decompose(diag32());
  const Matrix t1 = spectral::truncate_project(f, 1);
  CHECK(t1(0, 0) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(std::abs(t1(1, 0)) <= 1e-12);
  CHECK_THROWS_AS(spectral::truncate_project(f, 3), DimensionError);
  CHECK_THROWS_AS(spectral::truncate_project(f, 0), DimensionError);
}

TEST_CASE("truncate_project at full rank equals E V and keeps energy") {
  Rng rng(31);
  const Matrix e = oracles::random_matrix(rng, 15, 6);
  const SvdFactors f = spectral::svd_decompose(e);
  const Matrix es = spectral::truncate_project(f, f.rank());
  const Matrix ev = numkit::matmul(e, numkit::transpose(f.vt));
  CHECK(oracles::max_abs_diff(es, ev) <= 1e-6);
  CHECK(std::abs(es.frobenius_norm() - e.frobenius_norm()) <= 1e-6);
}

TEST_CASE("truncate_project captures all energy of a planted low-rank matrix") {
  Rng rng(77);
  const std::vector<double> s{4.0, 2.0, 1.0, 0.5};
  const Matrix e = planted(rng, 30, 12, s);
  const SvdFactors f = spectral::svd_decompose(e);
  REQUIRE(f.rank() == 4);
  const Matrix es = spectral::truncate_project(f, 4);
  CHECK(es.frobenius_norm() == doctest::Approx(e.frobenius_norm()).epsilon(1e-6));
  for (int k = 0; k < 4; ++k)
    CHECK(f.sigma[static_cast<std::size_t>(k)] ==
          doctest::Approx(s[static_cast<std::size_t>(k)]).epsilon(1e-9));
}

TEST_CASE("identity_project yields whitened orthonormal directions") {
  const SvdFactors fd = spectral::svd_decompose(diag32());
  const Matrix i1 = spectral::identity_project(fd, 1);
  CHECK(i1(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(i1(1, 0)) <= 1e-12);

  Rng rng(13);
  const Matrix e = oracles::random_matrix(rng, 25, 10);
  const SvdFactors f = spectral::svd_decompose(e);
  const Matrix u4 = spectral::identity_project(f, 4);
  CHECK(orthonormality_residual(u4) <= 1e-6);

  // Uncentered covariance of the whitened output is exactly flat.
  const auto rep = spectral::cumulative_spectrum(u4, 4, /*center=*/false);
  for (int k = 0; k < 4; ++k)
    CHECK(rep.cumulative_fraction[static_cast<std::size_t>(k)] ==
          doctest::Approx((k + 1) / 4.0).epsilon(1e-6));
}

TEST_CASE("truncate and identity projections differ by the singular weights") {
  Rng rng(17);
  const Matrix e = oracles::random_matrix(rng, 20, 9);
  const SvdFactors f = spectral::svd_decompose(e);
  const int d = 5;
  const Matrix t = spectral::truncate_project(f, d);
  const Matrix u = spectral::identity_project(f, d);
  for (std::size_t i = 0; i < t.rows(); ++i)
    for (int j = 0; j < d; ++j)
      CHECK(std::abs(t(i, static_cast<std::size_t>(j)) -
                     f.sigma[static_cast<std::size_t>(j)] * u(i, static_cast<std::size_t>(j))) <=
            1e-9);
}

TEST_CASE("rank-d spectral reconstruction beats random alternatives") {
  Rng rng(41);
  const Matrix e = oracles::random_matrix(rng, 18, 7);
  const SvdFactors f = spectral::svd_decompose(e);
  const int d = 3;
  Matrix us = spectral::truncate_project(f, d);  // U_d Sigma_d
  Matrix vt_d(static_cast<std::size_t>(d), f.vt.cols());
  for (int k = 0; k < d; ++k)
    for (std::size_t j = 0; j < f.vt.cols(); ++j)
      vt_d(static_cast<std::size_t>(k), j) = f.vt(static_cast<std::size_t>(k), j);
  const double best = numkit::sub(numkit::matmul(us, vt_d), e).frobenius_norm();
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix a = oracles::random_matrix(rng, 18, d);
    const Matrix b = oracles::random_matrix(rng, d, 7);
    CHECK(best <= numkit::sub(numkit::matmul(a, b), e).frobenius_norm());
  }
}

TEST_CASE("cumulative_spectrum on hand-built covariance structures") {
  // Columns with population variances 9 and 1, zero covariance.
  Matrix e(4, 2);
  e(0, 0) = 3;
  e(1, 0) = -3;
  e(2, 0) = 3;
  e(3, 0) = -3;
  e(0, 1) = 1;
  e(1, 1) = 1;
  e(2, 1) = -1;
  e(3, 1) = -1;
  const auto rep = spectral::cumulative_spectrum(e, 2);
  CHECK(rep.eigenvalues[0] == doctest::Approx(9.0).epsilon(1e-9));
  CHECK(rep.eigenvalues[1] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(rep.cumulative_fraction[0] == doctest::Approx(0.9).epsilon(1e-9));
  CHECK(rep.cumulative_fraction[1] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(rep.rank95() == 2);

  // Duplicated columns collapse to one direction.
  Matrix dup(5, 3);
  Rng rng(3);
  for (std::size_t i = 0; i < 5; ++i) {
    const double v = rng.normal();
    dup(i, 0) = v;
    dup(i, 1) = v;
    dup(i, 2) = v;
  }
  const auto rep2 = spectral::cumulative_spectrum(dup, 3);
  CHECK(rep2.cumulative_fraction[0] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(rep2.rank95() == 1);
}

TEST_CASE("cumulative_spectrum contract checks and invariances") {
  Rng rng(9);
  const Matrix e = oracles::random_matrix(rng, 12, 5);
  CHECK_THROWS_AS(spectral::cumulative_spectrum(e, 6), DimensionError);
  CHECK_THROWS_AS(spectral::cumulative_spectrum(Matrix(1, 4, 1.0), 2), ContractError);

  const auto rep = spectral::cumulative_spectrum(e, 5);
  for (std::size_t k = 1; k < rep.cumulative_fraction.size(); ++k)
    CHECK(rep.cumulative_fraction[k] >= rep.cumulative_fraction[k - 1]);
  CHECK(rep.cumulative_fraction.back() == doctest::Approx(1.0).epsilon(1e-9));

  // Row permutation leaves the spectrum unchanged.
  Matrix p(e.rows(), e.cols());
  for (std::size_t i = 0; i < e.rows(); ++i)
    for (std::size_t j = 0; j < e.cols(); ++j) p(i, j) = e((i + 5) % e.rows(), j);
  const auto rep_p = spectral::cumulative_spectrum(p, 5);
  for (std::size_t k = 0; k < rep.eigenvalues.size(); ++k)
    CHECK(rep.eigenvalues[k] == doctest::Approx(rep_p.eigenvalues[k]).epsilon(1e-9));
}
