#pragma once

#include <functional>
#include <string>

#include "spectran/numkit/param_store.hpp"

namespace spectran::numkit {

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::string worst_param;
  std::size_t worst_coord = 0;
};

/// Compare analytic gradients against central finite differences.
///
/// `loss` evaluates a scalar function of the parameters; when `with_grad` is
/// true it must also leave gradients in the store (one backward pass).
/// Relative error per coordinate uses max(|analytic|, |numeric|, 1e-8) as the
/// denominator.
GradCheckResult finite_diff_gradcheck(
    ParamStore& params, const std::function<double(ParamStore&, bool with_grad)>& loss,
    double h);

}  // namespace spectran::numkit
