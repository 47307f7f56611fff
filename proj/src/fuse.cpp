#include "maas/fuse.hpp"

namespace maas {

std::string_view to_string(Strategy s) noexcept {
  switch (s) {
    case Strategy::MaasSoft: return "maas-soft";
    case Strategy::MaasDiscard: return "maas-discard";
    case Strategy::WeightedSum: return "weighted-sum";
    case Strategy::WeightedSumNorm: return "weighted-sum-norm";
    case Strategy::CompetitionMax: return "competition-max";
    case Strategy::CompetitionMin: return "competition-min";
    case Strategy::CascadeNormal: return "cascade-normal";
    case Strategy::CascadeAbnormal: return "cascade-abnormal";
    case Strategy::Raw: return "raw";
  }
  return "unknown";
}

Strategy parse_strategy(std::string_view id) {
  for (Strategy s : kAllStrategies)
    if (to_string(s) == id) return s;
  throw Error(ErrorCode::UnknownStrategy, "unknown strategy '" + std::string(id) + "'");
}

bool needs_master(Strategy s) noexcept {
  return s == Strategy::MaasSoft || s == Strategy::MaasDiscard || s == Strategy::Raw;
}

std::vector<TieredScore> FusedTrack::keys() const {
  std::vector<TieredScore> out(static_cast<std::size_t>(values.size()));
  for (Index t = 0; t < values.size(); ++t) out[static_cast<std::size_t>(t)] = {tiers ? (*tiers)[t] : 0, values[t]};
  return out;
}

Vector soft_weights(const FreqTrack& freq, double lambda) {
  if (!freq.filled) throw Error(ErrorCode::NotFilled, "soft weights require continuity-filled frequencies");
  const auto fa = freq.f_a.cast<double>().array();
  const auto fn = freq.f_n.cast<double>().array();
  return ((1.0 + fa * lambda) / (1.0 + fn * lambda)).matrix();
}

namespace {

void require_same_length(const ScoreTrack& master, const Vector& weights) {
  if (master.size() != weights.size())
    throw Error(ErrorCode::LengthMismatch, "master has " + std::to_string(master.size()) + " frames, weights " +
                                               std::to_string(weights.size()));
}

}  // namespace

FusedTrack maas_aggregate(const ScoreTrack& master, const Vector& weights) {
  require_same_length(master, weights);
  FusedTrack out;
  out.grid = master.grid;
  out.strategy = Strategy::MaasSoft;
  out.values = master.values.cwiseProduct(weights);
  out.soft_weights = weights;
  return out;
}

FusedTrack discard_aggregate(const ScoreTrack& master, const Vector& weights) {
  require_same_length(master, weights);
  FusedTrack out;
  out.grid = master.grid;
  out.strategy = Strategy::MaasDiscard;
  out.values = master.values;
  IntVector tiers(weights.size());
  for (Index t = 0; t < weights.size(); ++t) tiers[t] = weights[t] < 1.0 ? -1 : (weights[t] > 1.0 ? 1 : 0);
  out.tiers = std::move(tiers);
  return out;
}

FusedTrack weighted_sum(const DetectorBank& bank, const std::map<std::string, double>& weights) {
  Vector w(static_cast<Index>(bank.size()));
  for (std::size_t d = 0; d < bank.size(); ++d) {
    auto it = weights.find(bank.names()[d]);
    if (it == weights.end())
      throw Error(ErrorCode::MissingWeight, "no baseline weight for detector '" + bank.names()[d] + "'");
    w[static_cast<Index>(d)] = it->second;
  }
  FusedTrack out;
  out.grid = bank.grid();
  out.strategy = Strategy::WeightedSum;
  out.values = bank.scores() * w;
  return out;
}

ScoreTrack minmax_normalize(const ScoreTrack& track) {
  if (track.size() == 0) throw Error(ErrorCode::EmptyInput, "cannot normalize an empty track");
  const double lo = track.values.minCoeff();
  const double hi = track.values.maxCoeff();
  if (!(hi > lo)) throw Error(ErrorCode::ConstantTrack, "track is constant");
  return {track.grid, ((track.values.array() - lo) / (hi - lo)).matrix()};
}

FusedTrack combine_normalized(const DetectorBank& bank, CombineMode mode, ConstantPolicy policy) {
  Matrix normalized(bank.frames(), static_cast<Index>(bank.size()));
  for (std::size_t d = 0; d < bank.size(); ++d) {
    const auto& name = bank.names()[d];
    try {
      normalized.col(static_cast<Index>(d)) = minmax_normalize(bank.track(name)).values;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ConstantTrack) throw;
      if (policy == ConstantPolicy::Error)
        throw Error(ErrorCode::ConstantTrack, "detector '" + name + "' is constant and cannot be normalized");
      normalized.col(static_cast<Index>(d)).setZero();
    }
  }

  FusedTrack out;
  out.grid = bank.grid();
  switch (mode) {
    case CombineMode::Sum:
      out.strategy = Strategy::WeightedSumNorm;
      out.values = normalized.rowwise().sum();
      break;
    case CombineMode::Max:
      out.strategy = Strategy::CompetitionMax;
      out.values = normalized.rowwise().maxCoeff();
      break;
    case CombineMode::Min:
      out.strategy = Strategy::CompetitionMin;
      out.values = normalized.rowwise().minCoeff();
      break;
  }
  return out;
}

FusedTrack cascade(const DetectorBank& test, const Thresholds& thr, const std::vector<std::string>& order,
                   CascadeMode mode) {
  if (order.size() < 2)
    throw Error(ErrorCode::MissingConfig, "cascade order needs at least two detectors");
  for (const auto& name : order) test.index_of(name);

  const Index frames = test.frames();
  const int discard_tier = mode == CascadeMode::Normal ? -1 : 1;
  IntVector tiers = IntVector::Zero(frames);

  for (std::size_t stage = 0; stage + 1 < order.size(); ++stage) {
    const auto& name = order[stage];
    auto it = thr.find(name);
    if (it == thr.end()) throw Error(ErrorCode::MissingThreshold, "no threshold for cascade stage '" + name + "'");
    const auto scores = test.column(name);
    for (Index t = 0; t < frames; ++t) {
      if (tiers[t] != 0) continue;
      const bool credible =
          mode == CascadeMode::Normal ? scores[t] <= it->second.normal : scores[t] >= it->second.abnormal;
      if (credible) tiers[t] = discard_tier;
    }
  }

  FusedTrack out;
  out.grid = test.grid();
  out.strategy = mode == CascadeMode::Normal ? Strategy::CascadeNormal : Strategy::CascadeAbnormal;
  out.values = test.column(order.back());
  out.tiers = std::move(tiers);
  return out;
}

}  // namespace maas
