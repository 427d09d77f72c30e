#include "spectran/adapter/spectran.hpp"

#include <cmath>

#include "spectran/errors.hpp"

namespace spectran::adapter {

void init_spectran_params(numkit::ParamStore& params, const SpecTranConfig& cfg, int rank,
                          numkit::Rng& rng) {
  const int d = cfg.d, m = cfg.inner();
  if (d < 1 || m < 1 || rank < d)
    throw ConfigError("spectran: need 1 <= d <= rank and m >= 1");
  Matrix q(static_cast<std::size_t>(d), static_cast<std::size_t>(m));
  for (std::size_t i = 0; i < q.size(); ++i) q.data()[i] = 0.1 * rng.normal();
  Matrix k(static_cast<std::size_t>(rank), static_cast<std::size_t>(m));
  for (std::size_t i = 0; i < k.size(); ++i) k.data()[i] = 0.1 * rng.normal();
  Matrix alpha(1, static_cast<std::size_t>(cfg.taylor_n + 1), 1.0);
  Matrix lambda_raw(1, 1, 0.0);
  params.add(kSpectranQ, std::move(q));
  params.add(kSpectranK, std::move(k));
  params.add(kSpectranAlpha, std::move(alpha));
  params.add(kSpectranLambda, std::move(lambda_raw));
}

std::vector<double> taylor_diag(const std::vector<double>& sigma,
                                const std::vector<double>& alpha, int d) {
  if (sigma.empty() || !(sigma[0] > 0.0))
    throw NumericError("taylor_diag: leading singular value must be > 0");
  if (d < 1 || static_cast<std::size_t>(d) > sigma.size())
    throw DimensionError("taylor_diag: d must be in [1, rank]");
  std::vector<double> w(static_cast<std::size_t>(d));
  const double s1 = sigma[0];
  for (int i = 0; i < d; ++i) {
    const double sbar = sigma[static_cast<std::size_t>(i)] / s1;
    double acc = 0.0, p = 1.0;
    for (double a : alpha) {
      acc += a * p;
      p *= sbar;
    }
    w[static_cast<std::size_t>(i)] = s1 * acc;
  }
  return w;
}

Matrix build_positional_encoding(const SvdFactors& f, const std::vector<double>& alpha, int d) {
  const std::vector<double> w = taylor_diag(f.sigma, alpha, d);
  Matrix a(static_cast<std::size_t>(d), static_cast<std::size_t>(f.rank()));
  for (int i = 0; i < d; ++i)
    a(static_cast<std::size_t>(i), static_cast<std::size_t>(i)) = w[static_cast<std::size_t>(i)];
  return a;
}

Matrix spectran_project(const SvdFactors& f, const Matrix& q, const Matrix& k,
                        const std::vector<double>& alpha, double lambda_raw) {
  const int d = static_cast<int>(q.rows());
  if (k.rows() != static_cast<std::size_t>(f.rank()) || q.cols() != k.cols())
    throw DimensionError("spectran_project: Q is dxm and K must be rxm");
  const Matrix scores = numkit::softshrink(numkit::matmul_nt(q, k), std::abs(lambda_raw));
  const Matrix w = numkit::add(scores, build_positional_encoding(f, alpha, d));
  return numkit::matmul_nt(f.u, w);  // N x d
}

numkit::Tape::Id spectran_project_node(numkit::Tape& tape, numkit::Tape::Id u_node,
                                       const std::vector<double>& sigma,
                                       numkit::ParamStore& params, int d) {
  const auto q = tape.param(params, kSpectranQ);
  const auto k = tape.param(params, kSpectranK);
  const auto alpha = tape.param(params, kSpectranAlpha);
  const auto lambda_raw = tape.param(params, kSpectranLambda);
  const auto lam = tape.abs_scalar(lambda_raw);
  const auto scores = tape.softshrink(tape.matmul_nt(q, k), lam);
  const auto a = tape.diag_block(tape.taylor_weights(alpha, sigma, d),
                                 static_cast<int>(tape.val(u_node).cols()));
  const auto w = tape.add(scores, a);
  return tape.matmul_nt(u_node, w);
}

SpectralWeightReport spectral_weight_report(const SvdFactors& f, const Matrix& q, const Matrix& k,
                                            const std::vector<double>& alpha, double lambda_raw,
                                            int d) {
  const Matrix scores = numkit::softshrink(numkit::matmul_nt(q, k), std::abs(lambda_raw));
  const Matrix w = numkit::add(scores, build_positional_encoding(f, alpha, d));
  SpectralWeightReport rep;
  for (std::size_t i = 0; i < w.rows(); ++i)
    for (std::size_t j = 0; j < w.cols(); ++j) {
      if (j < static_cast<std::size_t>(d))
        rep.principal_total += std::abs(w(i, j));
      else
        rep.subordinate_total += std::abs(w(i, j));
    }
  return rep;
}

}  // namespace spectran::adapter
