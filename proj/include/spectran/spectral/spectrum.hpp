#pragma once

#include <iosfwd>
#include <vector>

#include "spectran/numkit/matrix.hpp"

namespace spectran::spectral {

/// Covariance-eigenvalue spectrum of an embedding matrix: the collapse
/// diagnostic. Eigenvalues are those of the column-covariance of the rows
/// (columns centered by their means), sorted descending, padded with exact
/// zeros beyond the rank.
struct SpectrumReport {
  std::vector<double> eigenvalues;          // one per column
  std::vector<double> cumulative_fraction;  // nondecreasing, last == 1
  int top_k = 0;                            // rows emitted by write_csv

  /// Smallest k whose cumulative fraction reaches 0.95.
  int rank95() const;

  /// CSV rows "rank,eigenvalue,cumulative_fraction" for ranks 1..top_k.
  void write_csv(std::ostream& os) const;
};

/// Requires at least 2 rows and top_k in [1, cols]. Column centering can be
/// disabled to diagnose the raw (uncentered) second-moment spectrum.
SpectrumReport cumulative_spectrum(const numkit::Matrix& e, int top_k, bool center = true);

}  // namespace spectran::spectral
