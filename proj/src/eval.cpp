#include "maas/eval.hpp"

namespace maas {

ScoreTrack median_smooth(const ScoreTrack& track, Index radius) {
  if (radius <= 0) return track;
  ScoreTrack out{track.grid, Vector(track.size())};
  std::vector<double> window;
  window.reserve(static_cast<std::size_t>(2 * radius + 1));
  for (std::size_t v = 0; v < track.grid.size(); ++v) {
    const Index start = track.grid.offset(v);
    const Index len = track.grid.frames(v);
    for (Index t = 0; t < len; ++t) {
      const Index lo = std::max<Index>(0, t - radius);
      const Index hi = std::min<Index>(len - 1, t + radius);
      window.assign(track.values.data() + start + lo, track.values.data() + start + hi + 1);
      const auto mid = window.begin() + static_cast<std::ptrdiff_t>(window.size() / 2);
      std::nth_element(window.begin(), mid, window.end());
      double median = *mid;
      if (window.size() % 2 == 0) {
        const double lower = *std::max_element(window.begin(), mid);
        median = (lower + median) / 2.0;
      }
      out.values[start + t] = median;
    }
  }
  return out;
}

DetectorBank median_smooth(const DetectorBank& bank, Index radius) {
  if (radius <= 0) return bank;
  Matrix smoothed(bank.frames(), static_cast<Index>(bank.size()));
  for (std::size_t d = 0; d < bank.size(); ++d)
    smoothed.col(static_cast<Index>(d)) = median_smooth(bank.track(bank.names()[d]), radius).values;
  return {bank.grid(), bank.names(), std::move(smoothed)};
}

double roc_auc(const Vector& keys, const LabelTrack& labels) {
  return roc_auc(std::span<const double>(keys.data(), static_cast<std::size_t>(keys.size())), labels);
}

double roc_auc(const FusedTrack& fused, const LabelTrack& labels) {
  if (!fused.tiered()) return roc_auc(fused.values, labels);
  const auto keys = fused.keys();
  return roc_auc(std::span<const TieredScore>(keys), labels);
}

namespace {

PipelineOptions validated(PipelineOptions options) {
  options.hp.validate();
  return options;
}

}  // namespace

Pipeline::Pipeline(const DetectorBank& train, const DetectorBank& test, PipelineOptions options)
    : options_(validated(std::move(options))),
      train_(median_smooth(train, options_.hp.smooth_radius)),
      test_(median_smooth(test, options_.hp.smooth_radius)) {}

MaasTrace Pipeline::maas(const std::string& master, Strategy aggregate) const {
  MaasTrace trace;
  trace.master = master;
  trace.master_scores = test_.track(master);
  train_.index_of(master);
  for (const auto& name : test_.names())
    if (name != master) trace.auxiliaries.push_back(name);

  const auto& hp = options_.hp;
  const auto& ablation = options_.ablation;
  trace.thresholds = calibrate_thresholds(train_, trace.auxiliaries, hp);
  trace.masks = cred_masks(test_, trace.thresholds);
  trace.raw_freq = frequencies(trace.masks);
  if (!ablation.cred_a) trace.raw_freq.f_a.setZero();
  if (!ablation.cred_n) trace.raw_freq.f_n.setZero();
  trace.filled_freq = ablation.continuity ? fill_frequencies(trace.raw_freq, hp) : fill_frequencies(trace.raw_freq, 0, 0);
  trace.weights = soft_weights(trace.filled_freq, hp.lambda);

  switch (aggregate) {
    case Strategy::MaasSoft: trace.fused = maas_aggregate(trace.master_scores, trace.weights); break;
    case Strategy::MaasDiscard: trace.fused = discard_aggregate(trace.master_scores, trace.weights); break;
    default:
      throw Error(ErrorCode::UnknownStrategy,
                  "'" + std::string(to_string(aggregate)) + "' is not a master-auxiliary aggregation");
  }
  return trace;
}

FusedTrack Pipeline::cascade_run(CascadeMode mode) const {
  const auto& order = options_.cascade_order;
  if (order.size() < 2) throw Error(ErrorCode::MissingConfig, "cascade strategies need cascade_order with >= 2 detectors");
  for (const auto& name : order) test_.index_of(name);
  const std::vector<std::string> stages(order.begin(), order.end() - 1);
  const auto thr = calibrate_thresholds(train_, stages, options_.hp);
  return cascade(test_, thr, order, mode);
}

FusedTrack Pipeline::run(Strategy strategy, const std::optional<std::string>& master) const {
  if (needs_master(strategy) && !master)
    throw Error(ErrorCode::MissingConfig, "strategy '" + std::string(to_string(strategy)) + "' needs a master detector");
  switch (strategy) {
    case Strategy::MaasSoft:
    case Strategy::MaasDiscard: return maas(*master, strategy).fused;
    case Strategy::Raw: {
      FusedTrack out;
      out.grid = test_.grid();
      out.strategy = Strategy::Raw;
      out.values = test_.column(*master);
      return out;
    }
    case Strategy::WeightedSum: return weighted_sum(test_, options_.hp.baseline_weights);
    case Strategy::WeightedSumNorm: return combine_normalized(test_, CombineMode::Sum, options_.constant_policy);
    case Strategy::CompetitionMax: return combine_normalized(test_, CombineMode::Max, options_.constant_policy);
    case Strategy::CompetitionMin: return combine_normalized(test_, CombineMode::Min, options_.constant_policy);
    case Strategy::CascadeNormal: return cascade_run(CascadeMode::Normal);
    case Strategy::CascadeAbnormal: return cascade_run(CascadeMode::Abnormal);
  }
  throw Error(ErrorCode::UnknownStrategy, "unhandled strategy");
}

FusedTrack run_strategy(const DetectorBank& train, const DetectorBank& test, Strategy strategy,
                        const std::optional<std::string>& master, const PipelineOptions& options) {
  return Pipeline(train, test, options).run(strategy, master);
}

StrategyReport compare(const BankTriple& inputs, const std::vector<Strategy>& strategies,
                       const std::vector<std::string>& masters, const PipelineOptions& options) {
  if (strategies.empty()) throw Error(ErrorCode::MissingConfig, "no strategies requested");
  const Pipeline pipeline(inputs.train, inputs.test, options);

  StrategyReport report;
  report.config_echo = pipeline.options();
  for (Strategy s : strategies) {
    if (!needs_master(s)) {
      report.rows.push_back({s, std::nullopt, roc_auc(pipeline.run(s, std::nullopt), inputs.labels), std::nullopt});
      continue;
    }
    if (masters.empty())
      throw Error(ErrorCode::MissingConfig, "strategy '" + std::string(to_string(s)) + "' needs at least one master");
    for (const auto& m : masters) {
      ReportRow row{s, m, roc_auc(pipeline.run(s, m), inputs.labels), std::nullopt};
      if (s != Strategy::Raw) row.master_auc = roc_auc(pipeline.run(Strategy::Raw, m), inputs.labels);
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

}  // namespace maas
