#include "maas/calibrate.hpp"

#include <sstream>

namespace maas {

Index order_rank(Index n, double fraction) {
  if (n <= 0) throw Error(ErrorCode::EmptyInput, "order statistic of an empty sequence");
  const double x = fraction * static_cast<double>(n);
  const double nearest = std::round(x);
  const double snapped = std::abs(x - nearest) <= 1e-9 * std::max(1.0, std::abs(x)) ? nearest : std::ceil(x);
  const auto k = static_cast<Index>(snapped);
  return std::clamp<Index>(k, 1, n);
}

Thresholds calibrate_thresholds(const DetectorBank& train, const std::vector<std::string>& detectors,
                                const HyperParams& hp) {
  Thresholds out;
  for (const auto& name : detectors) {
    const auto scores = train.column(name);
    ThresholdPair thr;
    thr.abnormal = order_stat_high(scores, hp.alpha) * hp.gamma_a_for(name);
    thr.normal = order_stat_low(scores, hp.beta) * hp.gamma_n;
    if (!(thr.normal < thr.abnormal)) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "detector '" << name << "': thr_n " << thr.normal << " >= thr_a " << thr.abnormal
          << "; training scores too narrow for alpha/beta/gamma";
      throw Error(ErrorCode::DegenerateThresholds, msg.str());
    }
    out.emplace(name, thr);
  }
  return out;
}

}  // namespace maas
