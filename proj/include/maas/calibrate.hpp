#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "maas/core.hpp"

namespace maas {

/// 1-based rank k = max(1, ceil(fraction * n)), clamped to n. Products that
/// land within 1e-9 (relative) of an integer are snapped to it first, so
/// 0.07 * 100 selects rank 7 rather than 8.
Index order_rank(Index n, double fraction);

namespace detail {

template <typename Derived, typename Compare>
typename Derived::Scalar kth_element(const Eigen::DenseBase<Derived>& values, double fraction, Compare cmp) {
  const Index n = values.size();
  if (n == 0) throw Error(ErrorCode::EmptyInput, "order statistic of an empty sequence");
  std::vector<typename Derived::Scalar> buf;
  buf.reserve(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) buf.push_back(values.derived().coeff(i));
  const auto k = static_cast<std::size_t>(order_rank(n, fraction) - 1);
  std::nth_element(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(k), buf.end(), cmp);
  return buf[k];
}

}  // namespace detail

/// k-th largest value, k = order_rank(size, alpha). Duplicates count with
/// multiplicity. Throws EmptyInput.
template <typename Derived>
typename Derived::Scalar order_stat_high(const Eigen::DenseBase<Derived>& values, double alpha) {
  return detail::kth_element(values, alpha, std::greater<>{});
}

/// k-th smallest value, k = order_rank(size, beta). Throws EmptyInput.
template <typename Derived>
typename Derived::Scalar order_stat_low(const Eigen::DenseBase<Derived>& values, double beta) {
  return detail::kth_element(values, beta, std::less<>{});
}

struct ThresholdPair {
  double abnormal = 0.0;  // Cred-a: score >= abnormal
  double normal = 0.0;    // Cred-n: score <= normal

  bool operator==(const ThresholdPair&) const = default;
};

/// Per-detector thresholds keyed by detector name.
using Thresholds = std::map<std::string, ThresholdPair>;

/// Calibrates Cred-a / Cred-n thresholds for each named detector from its
/// (already smoothed) training scores:
///   abnormal = kth-largest(alpha) * gamma_a(detector)
///   normal   = kth-smallest(beta) * gamma_n
/// Throws UnknownDetector, or DegenerateThresholds when normal >= abnormal.
Thresholds calibrate_thresholds(const DetectorBank& train, const std::vector<std::string>& detectors,
                                const HyperParams& hp);

}  // namespace maas
