#pragma once

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "maas/calibrate.hpp"
#include "maas/core.hpp"
#include "maas/credible.hpp"

namespace maas {

enum class Strategy {
  MaasSoft,
  MaasDiscard,
  WeightedSum,
  WeightedSumNorm,
  CompetitionMax,
  CompetitionMin,
  CascadeNormal,
  CascadeAbnormal,
  Raw,
};

inline constexpr Strategy kAllStrategies[] = {
    Strategy::MaasSoft,       Strategy::MaasDiscard,    Strategy::WeightedSum,
    Strategy::WeightedSumNorm, Strategy::CompetitionMax, Strategy::CompetitionMin,
    Strategy::CascadeNormal,  Strategy::CascadeAbnormal, Strategy::Raw,
};

std::string_view to_string(Strategy s) noexcept;
/// Throws UnknownStrategy.
Strategy parse_strategy(std::string_view id);
/// Strategies refining a single named master detector.
bool needs_master(Strategy s) noexcept;

/// Ranking key: tier first, then value.
struct TieredScore {
  int tier = 0;
  double value = 0.0;

  auto operator<=>(const TieredScore&) const = default;
};

struct FusedTrack {
  VideoGrid grid;
  Strategy strategy = Strategy::Raw;
  Vector values;
  /// Present for tiered strategies (maas-discard, cascade-*).
  std::optional<IntVector> tiers;
  /// Present for maas-soft.
  std::optional<Vector> soft_weights;

  Index size() const noexcept { return values.size(); }
  bool tiered() const noexcept { return tiers.has_value(); }
  std::vector<TieredScore> keys() const;
};

/// (1 + f'_a * lambda) / (1 + f'_n * lambda) per frame. Throws NotFilled.
Vector soft_weights(const FreqTrack& freq, double lambda);

/// master * weights. Throws LengthMismatch.
FusedTrack maas_aggregate(const ScoreTrack& master, const Vector& weights);

/// Tier -1 / 0 / +1 for weight < 1 / == 1 / > 1, value = master score.
/// Throws LengthMismatch.
FusedTrack discard_aggregate(const ScoreTrack& master, const Vector& weights);

/// Sum of w_i * s_i. Throws MissingWeight.
FusedTrack weighted_sum(const DetectorBank& bank, const std::map<std::string, double>& weights);

/// Min-max normalization over the whole track. Throws ConstantTrack.
ScoreTrack minmax_normalize(const ScoreTrack& track);

enum class CombineMode { Sum, Max, Min };

/// What to do with a detector whose normalization is undefined.
enum class ConstantPolicy { Error, Zeros };

/// Normalizes every detector, then combines pointwise. Throws
/// ConstantTrack naming the detector unless `policy` is Zeros.
FusedTrack combine_normalized(const DetectorBank& bank, CombineMode mode,
                              ConstantPolicy policy = ConstantPolicy::Error);

enum class CascadeMode { Normal, Abnormal };

/// Serial early rejection. Every stage but the last discards surviving
/// frames it judges credible (Cred-n for Normal, Cred-a for Abnormal);
/// discards get tier -1 (Normal) or +1 (Abnormal). Values are always the
/// last detector's score. Throws UnknownDetector, MissingThreshold.
FusedTrack cascade(const DetectorBank& test, const Thresholds& thr, const std::vector<std::string>& order,
                   CascadeMode mode);

}  // namespace maas
