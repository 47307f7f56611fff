#pragma once

#include <Eigen/Dense>

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "maas/error.hpp"

namespace maas {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using IntVector = Eigen::VectorXi;
using Matrix = Eigen::MatrixXd;
using BoolMatrix = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

struct Video {
  std::string id;
  Index frames = 0;

  bool operator==(const Video&) const = default;
};

/// Ordered list of videos. Global frame order is video order, then frame
/// order within the video (0-based).
class VideoGrid {
 public:
  VideoGrid() = default;
  explicit VideoGrid(std::vector<Video> videos);

  const std::vector<Video>& videos() const noexcept { return videos_; }
  std::size_t size() const noexcept { return videos_.size(); }
  Index total_frames() const noexcept { return offsets_.empty() ? 0 : offsets_.back(); }

  /// Global index of the first frame of video `v`.
  Index offset(std::size_t v) const { return offsets_.at(v); }
  Index frames(std::size_t v) const { return videos_.at(v).frames; }

  bool operator==(const VideoGrid&) const = default;

 private:
  std::vector<Video> videos_;
  std::vector<Index> offsets_;
};

struct ScoreTrack {
  VideoGrid grid;
  Vector values;

  Index size() const noexcept { return values.size(); }
  bool operator==(const ScoreTrack& o) const { return grid == o.grid && values == o.values; }
};

struct LabelTrack {
  VideoGrid grid;
  IntVector values;

  Index size() const noexcept { return values.size(); }
  Index positives() const { return values.count(); }
  bool operator==(const LabelTrack& o) const { return grid == o.grid && values == o.values; }
};

/// Named, frame-aligned detector scores stored column-wise: scores() is
/// T x D with one column per detector, in insertion order.
class DetectorBank {
 public:
  DetectorBank() = default;
  DetectorBank(VideoGrid grid, std::vector<std::string> names, Matrix scores);

  const VideoGrid& grid() const noexcept { return grid_; }
  const std::vector<std::string>& names() const noexcept { return names_; }
  const Matrix& scores() const noexcept { return scores_; }

  std::size_t size() const noexcept { return names_.size(); }
  Index frames() const noexcept { return scores_.rows(); }

  bool contains(const std::string& name) const;
  /// Throws UnknownDetector.
  Index index_of(const std::string& name) const;
  auto column(const std::string& name) const { return scores_.col(index_of(name)); }
  ScoreTrack track(const std::string& name) const;

  bool operator==(const DetectorBank& o) const {
    return grid_ == o.grid_ && names_ == o.names_ && scores_ == o.scores_;
  }

 private:
  VideoGrid grid_;
  std::vector<std::string> names_;
  Matrix scores_;
};

/// Aggregation hyperparameters. Defaults reproduce the reference
/// configuration for an {int, grad, flow, adv} detector bank.
struct HyperParams {
  double alpha = 0.01;
  double beta = 0.1;
  double gamma_a = 2.0;
  double gamma_n = 0.99;
  std::map<std::string, double> gamma_a_overrides{{"adv", 1.01}};
  Index eps_a = 80;
  Index eps_n = 40;
  double lambda = 10.0;
  Index smooth_radius = 15;
  std::map<std::string, double> baseline_weights{
      {"int", 1.0}, {"grad", 1.0}, {"flow", 2.0}, {"adv", 0.05}};

  double gamma_a_for(const std::string& detector) const;

  /// Throws InvalidConfig naming the first out-of-range field.
  void validate() const;

  bool operator==(const HyperParams&) const = default;
};

struct BankTriple {
  DetectorBank train;
  DetectorBank test;
  LabelTrack labels;
};

/// Bank-only part of validate_bank, for runs without labels.
void validate_banks(const DetectorBank& train, const DetectorBank& test);

/// Returns the inputs unchanged when they are mutually consistent.
/// Throws EmptyBank, MismatchedDetectors, GridMismatch or NonFiniteScore.
BankTriple validate_bank(DetectorBank train, DetectorBank test, LabelTrack labels);

}  // namespace maas
