#include "spectran/spectral/spectrum.hpp"

#include <cmath>
#include <ostream>

#include "spectran/numkit/format.hpp"

#include "spectran/errors.hpp"
#include "spectran/spectral/svd.hpp"

namespace spectran::spectral {

int SpectrumReport::rank95() const {
  for (std::size_t k = 0; k < cumulative_fraction.size(); ++k)
    if (cumulative_fraction[k] >= 0.95) return static_cast<int>(k) + 1;
  return static_cast<int>(cumulative_fraction.size());
}

void SpectrumReport::write_csv(std::ostream& os) const {
  os << "rank,eigenvalue,cumulative_fraction\n";
  for (int k = 0; k < top_k; ++k)
    os << (k + 1) << ',' << numkit::fmt_double(eigenvalues[static_cast<std::size_t>(k)]) << ','
       << numkit::fmt_double(cumulative_fraction[static_cast<std::size_t>(k)]) << '\n';
}

SpectrumReport cumulative_spectrum(const numkit::Matrix& e, int top_k, bool center) {
  if (e.rows() < 2) throw ContractError("cumulative_spectrum: need at least 2 rows");
  if (top_k < 1 || static_cast<std::size_t>(top_k) > e.cols())
    throw DimensionError("cumulative_spectrum: top_k out of range");
  if (!e.all_finite()) throw DataError("cumulative_spectrum: non-finite input");

  numkit::Matrix centered = e;
  if (center) {
    for (std::size_t j = 0; j < e.cols(); ++j) {
      double mean = 0.0;
      for (std::size_t i = 0; i < e.rows(); ++i) mean += e(i, j);
      mean /= static_cast<double>(e.rows());
      for (std::size_t i = 0; i < e.rows(); ++i) centered(i, j) -= mean;
    }
  }

  SpectrumReport rep;
  rep.top_k = top_k;
  rep.eigenvalues.assign(e.cols(), 0.0);
  const double total_sq = centered.frobenius_norm();
  if (total_sq > 0.0) {
    const SvdFactors f = svd_decompose(centered);
    const double inv_n = 1.0 / static_cast<double>(e.rows());
    for (std::size_t k = 0; k < f.sigma.size() && k < rep.eigenvalues.size(); ++k)
      rep.eigenvalues[k] = f.sigma[k] * f.sigma[k] * inv_n;
  }

  double total = 0.0;
  for (double v : rep.eigenvalues) total += v;
  rep.cumulative_fraction.assign(e.cols(), 1.0);  // degenerate all-constant input
  if (total > 0.0) {
    double run = 0.0;
    for (std::size_t k = 0; k < rep.eigenvalues.size(); ++k) {
      run += rep.eigenvalues[k];
      rep.cumulative_fraction[k] = run / total;
    }
  }
  return rep;
}

}  // namespace spectran::spectral
