#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "maas/calibrate.hpp"
#include "maas/core.hpp"
#include "maas/credible.hpp"
#include "maas/fuse.hpp"

namespace maas {

/// Per-video running median over [t - radius, t + radius], clipped to the
/// video. Even-sized (clipped) windows take the mean of the two middle
/// values. Radius 0 is the identity.
ScoreTrack median_smooth(const ScoreTrack& track, Index radius);
DetectorBank median_smooth(const DetectorBank& bank, Index radius);

/// Frame-level area under the ROC curve with ties counted as 1/2:
///   (#{key_p > key_n} + 0.5 #{key_p == key_n}) / (P N)
/// computed by sorting. Throws LengthMismatch or SingleClassLabels.
template <typename Key>
double roc_auc(std::span<const Key> keys, const LabelTrack& labels) {
  const auto n = static_cast<Index>(keys.size());
  if (n != labels.size())
    throw Error(ErrorCode::LengthMismatch, "keys have " + std::to_string(n) + " frames, labels " +
                                               std::to_string(labels.size()));
  const auto positives = static_cast<std::uint64_t>(labels.positives());
  const auto negatives = static_cast<std::uint64_t>(n) - positives;
  if (positives == 0 || negatives == 0)
    throw Error(ErrorCode::SingleClassLabels, "labels need at least one positive and one negative frame");

  std::vector<std::size_t> order(keys.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });

  // Walk groups of equal keys in ascending order.
  std::uint64_t wins = 0, ties = 0, negatives_below = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    std::uint64_t pos = 0, neg = 0;
    while (j < order.size() && !(keys[order[i]] < keys[order[j]])) {
      (labels.values[static_cast<Index>(order[j])] != 0 ? pos : neg) += 1;
      ++j;
    }
    wins += pos * negatives_below;
    ties += pos * neg;
    negatives_below += neg;
    i = j;
  }
  return (static_cast<double>(wins) + 0.5 * static_cast<double>(ties)) /
         (static_cast<double>(positives) * static_cast<double>(negatives));
}

double roc_auc(const Vector& keys, const LabelTrack& labels);
double roc_auc(const FusedTrack& fused, const LabelTrack& labels);

/// Switches for the credibility ablations.
struct MaasAblation {
  bool cred_a = true;
  bool cred_n = true;
  bool continuity = true;

  bool operator==(const MaasAblation&) const = default;
};

struct PipelineOptions {
  HyperParams hp;
  std::vector<std::string> cascade_order;
  ConstantPolicy constant_policy = ConstantPolicy::Error;
  MaasAblation ablation;
};

/// Every intermediate of one master-auxiliary aggregation run.
struct MaasTrace {
  std::string master;
  std::vector<std::string> auxiliaries;
  Thresholds thresholds;
  CredMasks masks;
  FreqTrack raw_freq;
  FreqTrack filled_freq;
  Vector weights;
  ScoreTrack master_scores;
  FusedTrack fused;
};

/// Smooths both banks once, then runs any strategy on them.
class Pipeline {
 public:
  Pipeline(const DetectorBank& train, const DetectorBank& test, PipelineOptions options);

  const DetectorBank& train() const noexcept { return train_; }
  const DetectorBank& test() const noexcept { return test_; }
  const PipelineOptions& options() const noexcept { return options_; }

  /// `master` is required for maas-soft, maas-discard and raw (MissingConfig).
  FusedTrack run(Strategy strategy, const std::optional<std::string>& master) const;
  MaasTrace maas(const std::string& master, Strategy aggregate = Strategy::MaasSoft) const;

 private:
  FusedTrack cascade_run(CascadeMode mode) const;

  PipelineOptions options_;
  DetectorBank train_;
  DetectorBank test_;
};

FusedTrack run_strategy(const DetectorBank& train, const DetectorBank& test, Strategy strategy,
                        const std::optional<std::string>& master, const PipelineOptions& options);

struct ReportRow {
  Strategy strategy = Strategy::Raw;
  std::optional<std::string> master;
  double auc = 0.0;
  /// Raw AUC of the master, filled for maas-* rows.
  std::optional<double> master_auc;

  bool operator==(const ReportRow&) const = default;
};

struct Provenance {
  std::string role;
  std::string path;
  std::string sha256;

  bool operator==(const Provenance&) const = default;
};

struct StrategyReport {
  std::vector<ReportRow> rows;
  PipelineOptions config_echo;
  std::vector<Provenance> provenance;
};

/// One row per strategy, expanded over `masters` for master-based
/// strategies, in request order.
StrategyReport compare(const BankTriple& inputs, const std::vector<Strategy>& strategies,
                       const std::vector<std::string>& masters, const PipelineOptions& options);

}  // namespace maas
