#include "spectran/numkit/gradcheck.hpp"

#include <cmath>

#include "spectran/errors.hpp"

namespace spectran::numkit {

GradCheckResult finite_diff_gradcheck(
    ParamStore& params, const std::function<double(ParamStore&, bool with_grad)>& loss,
    double h) {
  if (!(h > 0.0)) throw ContractError("finite_diff_gradcheck: h must be > 0");

  params.zero_grads();
  const double base = loss(params, true);
  if (!std::isfinite(base)) throw NumericError("finite_diff_gradcheck: loss is not finite");

  std::vector<Matrix> analytic;
  analytic.reserve(params.entries().size());
  for (const auto& e : params.entries()) analytic.push_back(e.grad);
  params.zero_grads();

  GradCheckResult result;
  for (std::size_t p = 0; p < params.entries().size(); ++p) {
    auto& e = params.entries()[p];
    for (std::size_t i = 0; i < e.value.size(); ++i) {
      const double orig = e.value.data()[i];
      e.value.data()[i] = orig + h;
      const double f_plus = loss(params, false);
      e.value.data()[i] = orig - h;
      const double f_minus = loss(params, false);
      e.value.data()[i] = orig;
      if (!std::isfinite(f_plus) || !std::isfinite(f_minus))
        throw NumericError("finite_diff_gradcheck: perturbed loss is not finite");

      const double numeric = (f_plus - f_minus) / (2.0 * h);
      const double a = analytic[p].data()[i];
      const double denom = std::max({std::abs(a), std::abs(numeric), 1e-8});
      const double rel = std::abs(a - numeric) / denom;
      if (rel > result.max_rel_error) {
        result.max_rel_error = rel;
        result.worst_param = e.name;
        result.worst_coord = i;
      }
    }
  }
  return result;
}

}  // namespace spectran::numkit
