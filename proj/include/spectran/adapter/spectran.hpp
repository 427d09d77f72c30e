#pragma once

#include <vector>

#include "spectran/numkit/param_store.hpp"
#include "spectran/numkit/rng.hpp"
#include "spectran/numkit/tape.hpp"
#include "spectran/spectral/svd.hpp"

namespace spectran::adapter {

using numkit::Matrix;
using spectral::SvdFactors;

/// Shapes and hyperparameters of the spectral attention adapter. The
/// learnable tensors live in a ParamStore under the names below.
struct SpecTranConfig {
  int d = 128;       // output embedding dimension
  int m = 0;         // attention inner dimension; 0 means m = d
  int taylor_n = 3;  // Taylor expansion order (n+1 coefficients)

  int inner() const { return m > 0 ? m : d; }
};

// ParamStore keys.
inline constexpr const char* kSpectranQ = "adapter.q";
inline constexpr const char* kSpectranK = "adapter.k";
inline constexpr const char* kSpectranAlpha = "adapter.alpha";
inline constexpr const char* kSpectranLambda = "adapter.lambda";

/// Register Q (d x m), K (r x m), alpha (1 x (n+1)) and the raw threshold
/// (1 x 1) with their standard initializations: Q, K ~ N(0, 0.1^2), alpha = 1,
/// lambda_raw = 0. The threshold used at run time is |lambda_raw|.
void init_spectran_params(numkit::ParamStore& params, const SpecTranConfig& cfg, int rank,
                          numkit::Rng& rng);

/// Per-component diagonal weights: sigma_1 * sum_k alpha_k (sigma_i/sigma_1)^k
/// for i = 1..d. Requires sigma_1 > 0 and d <= sigma.size().
std::vector<double> taylor_diag(const std::vector<double>& sigma,
                                const std::vector<double>& alpha, int d);

/// Positional encoding A = [diag(taylor weights), 0] of shape d x r.
Matrix build_positional_encoding(const SvdFactors& f, const std::vector<double>& alpha, int d);

/// Plain forward pass of the spectral attention transform:
/// E_s = U (softshrink(Q K^T, |lambda_raw|) + A)^T, shape N x d.
Matrix spectran_project(const SvdFactors& f, const Matrix& q, const Matrix& k,
                        const std::vector<double>& alpha, double lambda_raw);

/// Differentiable version over a tape; `u_node` must hold U (N x r).
numkit::Tape::Id spectran_project_node(numkit::Tape& tape, numkit::Tape::Id u_node,
                                       const std::vector<double>& sigma,
                                       numkit::ParamStore& params, int d);

/// Aggregated absolute combination weights, split at column d into the
/// principal block and the subordinate block.
struct SpectralWeightReport {
  double principal_total = 0.0;
  double subordinate_total = 0.0;
};
SpectralWeightReport spectral_weight_report(const SvdFactors& f, const Matrix& q, const Matrix& k,
                                            const std::vector<double>& alpha, double lambda_raw,
                                            int d);

}  // namespace spectran::adapter
