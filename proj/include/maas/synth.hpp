#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "maas/core.hpp"

namespace maas {

struct DetectorProfile {
  std::string name;
  double hit_rate = 1.0;  // probability of responding to a given event
  double mu_normal = 0.0;
  double mu_abnormal = 1.0;
  double sigma = 0.1;

  bool operator==(const DetectorProfile&) const = default;
};

struct SynthSpec {
  std::uint64_t seed = 0;
  Index n_videos_train = 1;
  Index n_videos_test = 1;
  Index frames_per_video = 100;
  double event_rate = 0.01;  // per-frame probability that an event begins
  Index event_len_min = 10;
  Index event_len_max = 50;
  std::vector<DetectorProfile> detectors;
  /// Detectors in this group split the events: each event is hit by exactly
  /// one of them (uniformly chosen), and their hit_rate is ignored.
  std::vector<std::string> partition;

  /// Throws InvalidSpec naming the offending field.
  void validate() const;

  bool operator==(const SynthSpec&) const = default;
};

struct SynthData {
  DetectorBank train;
  DetectorBank test;
  LabelTrack labels;
};

/// Deterministic in `spec` (including seed). Draws come from std::mt19937_64
/// substreams keyed by (seed, role, video, detector) through splitmix64;
/// normals use Box-Muller so output does not depend on the standard
/// library's distribution implementations.
SynthData generate(const SynthSpec& spec);

/// An {int, grad, flow, adv} bank with a noisy "int" master, two auxiliaries
/// (grad, flow) whose hit events partition the event set, and a weak
/// all-event auxiliary (adv). Reference fixture for the ablation checks.
SynthSpec complementary_fixture(std::uint64_t seed);

}  // namespace maas
