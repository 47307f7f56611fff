#include "maas/credible.hpp"

#include <cassert>

namespace maas {

CredMasks cred_masks(const DetectorBank& test, const Thresholds& thr) {
  CredMasks out;
  out.grid = test.grid();
  const Index frames = test.frames();
  const auto cols = static_cast<Index>(thr.size());
  out.cred_a.resize(frames, cols);
  out.cred_n.resize(frames, cols);

  Index c = 0;
  for (const auto& [name, pair] : thr) {
    const auto scores = test.column(name).array();
    out.cred_a.col(c) = scores >= pair.abnormal;
    out.cred_n.col(c) = scores <= pair.normal;
    assert(!(out.cred_a.col(c) && out.cred_n.col(c)).any() || !(pair.normal < pair.abnormal));
    out.names.push_back(name);
    ++c;
  }
  return out;
}

FreqTrack frequencies(const CredMasks& masks) {
  FreqTrack out;
  out.grid = masks.grid;
  if (masks.cred_a.cols() == 0) {
    out.f_a = IntVector::Zero(masks.grid.total_frames());
    out.f_n = IntVector::Zero(masks.grid.total_frames());
    return out;
  }
  out.f_a = masks.cred_a.cast<int>().rowwise().sum().matrix();
  out.f_n = masks.cred_n.cast<int>().rowwise().sum().matrix();
  return out;
}

IntVector continuity_fill(const Eigen::Ref<const IntVector>& f, Index eps) {
  IntVector out = f;
  Index prev = -1;
  for (Index t = 0; t < f.size(); ++t) {
    if (f[t] <= 0) continue;
    if (prev >= 0 && t - prev >= 2 && t - prev <= eps) {
      out.segment(prev + 1, t - prev - 1).setConstant(std::min(f[prev], f[t]));
    }
    prev = t;
  }
  return out;
}

FreqTrack fill_frequencies(const FreqTrack& freq, Index eps_a, Index eps_n) {
  if (freq.filled) throw Error(ErrorCode::AlreadyFilled, "frequencies have already been continuity-filled");
  FreqTrack out = freq;
  for (std::size_t v = 0; v < freq.grid.size(); ++v) {
    const Index start = freq.grid.offset(v);
    const Index len = freq.grid.frames(v);
    out.f_a.segment(start, len) = continuity_fill(freq.f_a.segment(start, len), eps_a);
    out.f_n.segment(start, len) = continuity_fill(freq.f_n.segment(start, len), eps_n);
  }
  out.filled = true;
  return out;
}

FreqTrack fill_frequencies(const FreqTrack& freq, const HyperParams& hp) {
  return fill_frequencies(freq, hp.eps_a, hp.eps_n);
}

}  // namespace maas
