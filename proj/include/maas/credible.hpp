#pragma once

#include <string>
#include <vector>

#include "maas/calibrate.hpp"
#include "maas/core.hpp"

namespace maas {

/// Per-auxiliary credibility masks, T x A with one column per entry of
/// `names`.
struct CredMasks {
  VideoGrid grid;
  std::vector<std::string> names;
  BoolMatrix cred_a;
  BoolMatrix cred_n;
};

/// Per-frame vote counts. `filled` records whether continuity inference
/// has been applied.
struct FreqTrack {
  VideoGrid grid;
  IntVector f_a;
  IntVector f_n;
  bool filled = false;

  bool operator==(const FreqTrack& o) const {
    return grid == o.grid && f_a == o.f_a && f_n == o.f_n && filled == o.filled;
  }
};

/// cred_a = score >= thr.abnormal, cred_n = score <= thr.normal, one
/// column per threshold entry. Throws UnknownDetector.
CredMasks cred_masks(const DetectorBank& test, const Thresholds& thr);

/// Counts Cred-a / Cred-n votes across detectors at every frame.
FreqTrack frequencies(const CredMasks& masks);

/// Gap inference on one video. Frames with f > 0 are anchors; a run of
/// zeros bounded by anchors t1 < t2 with t2 - t1 <= eps takes
/// min(f(t1), f(t2)). Leading and trailing runs are never filled, and
/// inferred frames do not act as anchors.
IntVector continuity_fill(const Eigen::Ref<const IntVector>& f, Index eps);

/// Applies continuity_fill per video: eps_a to f_a, eps_n to f_n.
/// Throws AlreadyFilled.
FreqTrack fill_frequencies(const FreqTrack& freq, Index eps_a, Index eps_n);
FreqTrack fill_frequencies(const FreqTrack& freq, const HyperParams& hp);

}  // namespace maas
