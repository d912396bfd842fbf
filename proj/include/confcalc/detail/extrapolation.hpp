#pragma once

// Sequence acceleration used by the limit estimators.

#include <cstddef>
#include <span>

namespace confcalc::detail {

struct Extrapolated {
  double value = 0.0;
  double error = 0.0;
  std::size_t column = 0;  // extrapolation depth that produced value
  std::size_t row = 0;     // finest input index that value depends on
};

/// Neville/Richardson tableau for values[i] = A(h_0 * ratio^i) with
/// A(h) = A_0 + c_1 h^p + c_2 h^{2p} + ..., p = power_step.
///
/// Returns the tableau entry with the smallest error estimate, where the
/// estimate is the larger of the distances to the two entries it was built
/// from. Stops early once the diagonal error exceeds twice the best seen
/// (roundoff has taken over).
Extrapolated richardson(std::span<const double> values, double ratio, int power_step);

/// Wynn epsilon algorithm. Handles sums of geometric error terms, which is
/// what limits along t_k = a + h 2^{-k} of (t - a)^{1-alpha} f'(t) produce.
Extrapolated wynn_epsilon(std::span<const double> sequence);

/// True when each of the last `run` consecutive ratios |m[i+1]| / |m[i]| is
/// at least min_ratio.
bool sustained_growth(std::span<const double> magnitudes, double min_ratio, std::size_t run);

}  // namespace confcalc::detail
