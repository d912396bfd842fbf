#include <confcalc/detail/extrapolation.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace confcalc::detail {

Extrapolated richardson(std::span<const double> values, double ratio, int power_step) {
  constexpr double kSafe = 2.0;
  // the first rows can be dominated by higher-order terms; never stop inside them
  constexpr std::size_t kMinRows = 6;
  const std::size_t n = values.size();
  Extrapolated best{n ? values[0] : 0.0, std::numeric_limits<double>::infinity(), 0, 0};
  if (n == 0) return best;
  if (n == 1) return best;

  std::vector<double> prev(values.begin(), values.begin() + 1);
  std::vector<double> cur;
  const double step = std::pow(1.0 / ratio, power_step);
  for (std::size_t i = 1; i < n; ++i) {
    cur.assign(i + 1, 0.0);
    cur[0] = values[i];
    double fac = step;
    for (std::size_t j = 1; j <= i; ++j) {
      cur[j] = (cur[j - 1] * fac - prev[j - 1]) / (fac - 1.0);
      fac *= step;
      double err = std::max(std::abs(cur[j] - cur[j - 1]), std::abs(cur[j] - prev[j - 1]));
      if (err <= best.error) best = {cur[j], err, j, i};
    }
    if (i >= kMinRows && std::abs(cur[i] - prev[i - 1]) >= kSafe * best.error) break;
    prev.swap(cur);
  }
  return best;
}

Extrapolated wynn_epsilon(std::span<const double> sequence) {
  const std::size_t n = sequence.size();
  Extrapolated best{n ? sequence[n - 1] : 0.0, std::numeric_limits<double>::infinity(), 0, n ? n - 1 : 0};
  if (n < 3) {
    if (n == 2) best.error = std::abs(sequence[1] - sequence[0]);
    return best;
  }

  // columns[k][m] = eps_k^{(m)}; column -1 is implicit zeros
  std::vector<std::vector<double>> cols;
  cols.emplace_back(sequence.begin(), sequence.end());
  std::vector<double> minus_one(n + 1, 0.0);

  // plain sequence estimate
  best = {sequence[n - 1], std::abs(sequence[n - 1] - sequence[n - 2]), 0, n - 1};
  if (best.error == 0.0) return best;

  for (std::size_t k = 1; k < n; ++k) {
    const std::vector<double>& c_km1 = cols[k - 1];
    const std::vector<double>& c_km2 = k >= 2 ? cols[k - 2] : minus_one;
    std::vector<double> next;
    next.reserve(c_km1.size() - 1);
    bool broke = false;
    for (std::size_t m = 0; m + 1 < c_km1.size(); ++m) {
      double diff = c_km1[m + 1] - c_km1[m];
      if (diff == 0.0 || !std::isfinite(diff)) {
        broke = true;
        break;
      }
      next.push_back(c_km2[m + 1] + 1.0 / diff);
    }
    if (broke || next.empty()) break;
    cols.push_back(std::move(next));
    if (k % 2 == 0) {
      const auto& col = cols[k];
      const auto& lower = cols[k - 2];
      double est = col.back();
      double err = col.size() >= 2 ? std::abs(est - col[col.size() - 2]) : std::abs(est - lower.back());
      if (std::isfinite(est) && err < best.error) best = {est, err, k, n - 1};
    }
  }
  return best;
}

bool sustained_growth(std::span<const double> magnitudes, double min_ratio, std::size_t run) {
  if (magnitudes.size() < run + 1) return false;
  const std::size_t start = magnitudes.size() - run - 1;
  for (std::size_t i = start; i + 1 < magnitudes.size(); ++i) {
    double lo = std::abs(magnitudes[i]);
    double hi = std::abs(magnitudes[i + 1]);
    if (!(lo > 0.0) || !(hi >= min_ratio * lo)) return false;
  }
  return true;
}

}  // namespace confcalc::detail
