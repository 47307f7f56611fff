#include "maas/core.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace maas {

VideoGrid::VideoGrid(std::vector<Video> videos) : videos_(std::move(videos)) {
  if (videos_.empty()) throw Error(ErrorCode::InvalidGrid, "grid has no videos");
  std::set<std::string> seen;
  offsets_.reserve(videos_.size() + 1);
  offsets_.push_back(0);
  for (const auto& v : videos_) {
    if (v.id.empty()) throw Error(ErrorCode::InvalidGrid, "empty video id");
    if (!seen.insert(v.id).second) throw Error(ErrorCode::InvalidGrid, "duplicate video id '" + v.id + "'");
    if (v.frames < 1) throw Error(ErrorCode::InvalidGrid, "video '" + v.id + "' has no frames");
    offsets_.push_back(offsets_.back() + v.frames);
  }
}

DetectorBank::DetectorBank(VideoGrid grid, std::vector<std::string> names, Matrix scores)
    : grid_(std::move(grid)), names_(std::move(names)), scores_(std::move(scores)) {
  if (static_cast<Index>(names_.size()) != scores_.cols())
    throw Error(ErrorCode::LengthMismatch, "bank has " + std::to_string(names_.size()) + " names but " +
                                               std::to_string(scores_.cols()) + " score columns");
  if (scores_.rows() != grid_.total_frames())
    throw Error(ErrorCode::LengthMismatch, "bank has " + std::to_string(scores_.rows()) +
                                               " rows but grid has " + std::to_string(grid_.total_frames()) +
                                               " frames");
  std::set<std::string> seen;
  for (const auto& n : names_) {
    if (n.empty()) throw Error(ErrorCode::MismatchedDetectors, "empty detector name");
    if (!seen.insert(n).second) throw Error(ErrorCode::MismatchedDetectors, "duplicate detector '" + n + "'");
  }
}

bool DetectorBank::contains(const std::string& name) const {
  return std::find(names_.begin(), names_.end(), name) != names_.end();
}

Index DetectorBank::index_of(const std::string& name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) throw Error(ErrorCode::UnknownDetector, "no detector named '" + name + "'");
  return static_cast<Index>(it - names_.begin());
}

ScoreTrack DetectorBank::track(const std::string& name) const { return {grid_, column(name)}; }

double HyperParams::gamma_a_for(const std::string& detector) const {
  auto it = gamma_a_overrides.find(detector);
  return it == gamma_a_overrides.end() ? gamma_a : it->second;
}

void HyperParams::validate() const {
  auto fail = [](const std::string& field, const std::string& rule) {
    throw Error(ErrorCode::InvalidConfig, "hyperparams." + field + " must be " + rule);
  };
  if (!(alpha > 0.0 && alpha <= 1.0)) fail("alpha", "in (0, 1]");
  if (!(beta > 0.0 && beta <= 1.0)) fail("beta", "in (0, 1]");
  if (!(gamma_a > 1.0)) fail("gamma_a", "> 1");
  if (!(gamma_n > 0.0 && gamma_n < 1.0)) fail("gamma_n", "in (0, 1)");
  for (const auto& [name, g] : gamma_a_overrides)
    if (!(g > 1.0)) fail("gamma_a_overrides." + name, "> 1");
  if (eps_a < 0) fail("eps_a", ">= 0");
  if (eps_n < 0) fail("eps_n", ">= 0");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) fail("lambda", "finite and >= 0");
  if (smooth_radius < 0) fail("smooth_radius", ">= 0");
  for (const auto& [name, w] : baseline_weights)
    if (!(w >= 0.0) || !std::isfinite(w)) fail("baseline_weights." + name, "finite and >= 0");
}

namespace {

void check_finite(const DetectorBank& bank, const char* which) {
  for (Index d = 0; d < bank.scores().cols(); ++d) {
    const auto col = bank.scores().col(d);
    for (Index t = 0; t < col.size(); ++t) {
      if (!std::isfinite(col[t]))
        throw Error(ErrorCode::NonFiniteScore, std::string(which) + " detector '" + bank.names()[d] +
                                                   "' frame " + std::to_string(t) + " is not finite");
    }
  }
}

}  // namespace

void validate_banks(const DetectorBank& train, const DetectorBank& test) {
  if (train.size() == 0 || train.frames() == 0) throw Error(ErrorCode::EmptyBank, "training bank is empty");
  if (test.size() == 0 || test.frames() == 0) throw Error(ErrorCode::EmptyBank, "test bank is empty");

  std::set<std::string> train_names(train.names().begin(), train.names().end());
  std::set<std::string> test_names(test.names().begin(), test.names().end());
  if (train_names != test_names)
    throw Error(ErrorCode::MismatchedDetectors, "train and test banks hold different detector sets");
  check_finite(train, "train");
  check_finite(test, "test");
}

BankTriple validate_bank(DetectorBank train, DetectorBank test, LabelTrack labels) {
  validate_banks(train, test);

  if (!(labels.grid == test.grid()))
    throw Error(ErrorCode::GridMismatch, "label grid differs from test grid");
  if (labels.values.size() != labels.grid.total_frames())
    throw Error(ErrorCode::GridMismatch, "label track length differs from its grid");
  for (Index t = 0; t < labels.values.size(); ++t) {
    if (labels.values[t] != 0 && labels.values[t] != 1)
      throw Error(ErrorCode::ParseError, "label at frame " + std::to_string(t) + " is not 0 or 1");
  }
  return {std::move(train), std::move(test), std::move(labels)};
}

}  // namespace maas
