#include "maas/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <set>

namespace maas {

void SynthSpec::validate() const {
  auto fail = [](const std::string& field, const std::string& rule) {
    throw Error(ErrorCode::InvalidSpec, field + " must be " + rule);
  };
  if (n_videos_train < 1) fail("n_videos_train", ">= 1");
  if (n_videos_test < 1) fail("n_videos_test", ">= 1");
  if (frames_per_video < 1) fail("frames_per_video", ">= 1");
  if (!(event_rate >= 0.0 && event_rate <= 1.0)) fail("event_rate", "in [0, 1]");
  if (event_len_min < 1) fail("event_len.min", ">= 1");
  if (event_len_max < event_len_min) fail("event_len.max", ">= event_len.min");
  if (detectors.empty()) fail("detectors", "nonempty");
  std::set<std::string> names;
  for (std::size_t i = 0; i < detectors.size(); ++i) {
    const auto& d = detectors[i];
    const std::string field = "detectors[" + std::to_string(i) + "]";
    if (d.name.empty()) fail(field + ".name", "nonempty");
    if (!names.insert(d.name).second) fail(field + ".name", "unique");
    if (!(d.hit_rate >= 0.0 && d.hit_rate <= 1.0)) fail(field + ".hit_rate", "in [0, 1]");
    if (!std::isfinite(d.mu_normal)) fail(field + ".mu_normal", "finite");
    if (!std::isfinite(d.mu_abnormal) || !(d.mu_normal < d.mu_abnormal))
      fail(field + ".mu_abnormal", "finite and > mu_normal");
    if (!(d.sigma > 0.0) || !std::isfinite(d.sigma)) fail(field + ".sigma", "finite and > 0");
  }
  std::set<std::string> group;
  for (const auto& p : partition) {
    if (!names.count(p)) fail("partition", "a subset of detector names (unknown '" + p + "')");
    if (!group.insert(p).second) fail("partition", "free of duplicates");
  }
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

enum class Role : std::uint64_t { TrainScores = 1, TestEvents = 2, TestScores = 3 };

class Stream {
 public:
  Stream(std::uint64_t seed, Role role, std::uint64_t video, std::uint64_t detector)
      : engine_(splitmix64(seed ^ splitmix64((static_cast<std::uint64_t>(role) << 56) ^ (video << 24) ^ detector))) {}

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  Index uniform_int(Index lo, Index hi) {
    const auto span = static_cast<double>(hi - lo + 1);
    return std::min(hi, lo + static_cast<Index>(uniform() * span));
  }

  double normal(double mu, double sigma) {
    if (has_spare_) {
      has_spare_ = false;
      return mu + sigma * spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
    has_spare_ = true;
    return mu + sigma * r * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

std::string video_name(const char* prefix, Index v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s_%03ld", prefix, static_cast<long>(v));
  return buf;
}

std::vector<std::string> detector_names(const SynthSpec& spec) {
  std::vector<std::string> names;
  for (const auto& d : spec.detectors) names.push_back(d.name);
  return names;
}

}  // namespace

SynthData generate(const SynthSpec& spec) {
  spec.validate();
  const Index fpv = spec.frames_per_video;
  const auto n_det = static_cast<Index>(spec.detectors.size());

  std::vector<Video> train_videos, test_videos;
  for (Index v = 0; v < spec.n_videos_train; ++v) train_videos.push_back({video_name("train", v), fpv});
  for (Index v = 0; v < spec.n_videos_test; ++v) test_videos.push_back({video_name("test", v), fpv});
  VideoGrid train_grid(std::move(train_videos));
  VideoGrid test_grid(std::move(test_videos));

  Matrix train(train_grid.total_frames(), n_det);
  for (Index v = 0; v < spec.n_videos_train; ++v) {
    for (Index d = 0; d < n_det; ++d) {
      const auto& prof = spec.detectors[static_cast<std::size_t>(d)];
      Stream rng(spec.seed, Role::TrainScores, static_cast<std::uint64_t>(v), static_cast<std::uint64_t>(d));
      for (Index t = 0; t < fpv; ++t) train(v * fpv + t, d) = rng.normal(prof.mu_normal, prof.sigma);
    }
  }

  std::vector<Index> partition_idx;
  for (const auto& p : spec.partition) {
    const auto it = std::find_if(spec.detectors.begin(), spec.detectors.end(),
                                 [&](const DetectorProfile& d) { return d.name == p; });
    partition_idx.push_back(static_cast<Index>(it - spec.detectors.begin()));
  }

  Matrix test(test_grid.total_frames(), n_det);
  IntVector labels = IntVector::Zero(test_grid.total_frames());
  for (Index v = 0; v < spec.n_videos_test; ++v) {
    const Index base = v * fpv;
    // hit(t, d): frame t belongs to an event detector d responds to.
    BoolMatrix hit = BoolMatrix::Constant(fpv, n_det, false);
    Stream events(spec.seed, Role::TestEvents, static_cast<std::uint64_t>(v), 0);
    for (Index t = 0; t < fpv;) {
      if (!(events.uniform() < spec.event_rate)) {
        ++t;
        continue;
      }
      const Index len = std::min(events.uniform_int(spec.event_len_min, spec.event_len_max), fpv - t);
      labels.segment(base + t, len).setOnes();
      Index chosen = -1;
      if (!partition_idx.empty())
        chosen = partition_idx[static_cast<std::size_t>(
            events.uniform_int(0, static_cast<Index>(partition_idx.size()) - 1))];
      for (Index d = 0; d < n_det; ++d) {
        const bool in_group = std::find(partition_idx.begin(), partition_idx.end(), d) != partition_idx.end();
        const double u = events.uniform();
        const bool responds = in_group ? d == chosen : u < spec.detectors[static_cast<std::size_t>(d)].hit_rate;
        if (responds) hit.col(d).segment(t, len).setConstant(true);
      }
      t += len;
    }

    for (Index d = 0; d < n_det; ++d) {
      const auto& prof = spec.detectors[static_cast<std::size_t>(d)];
      Stream rng(spec.seed, Role::TestScores, static_cast<std::uint64_t>(v), static_cast<std::uint64_t>(d));
      for (Index t = 0; t < fpv; ++t)
        test(base + t, d) = rng.normal(hit(t, d) ? prof.mu_abnormal : prof.mu_normal, prof.sigma);
    }
  }

  const auto names = detector_names(spec);
  return {DetectorBank(train_grid, names, std::move(train)), DetectorBank(test_grid, names, std::move(test)),
          LabelTrack{test_grid, std::move(labels)}};
}

SynthSpec complementary_fixture(std::uint64_t seed) {
  SynthSpec spec;
  spec.seed = seed;
  spec.n_videos_train = 4;
  spec.n_videos_test = 6;
  spec.frames_per_video = 600;
  spec.event_rate = 0.004;
  spec.event_len_min = 40;
  spec.event_len_max = 120;
  // grad and flow split the events and respond close to their Cred-a
  // threshold, so detections are intermittent inside events. Their low
  // noise keeps them from voting Cred-n. adv sees every event weakly and is
  // the main source of Cred-n votes.
  spec.detectors = {
      {"int", 1.0, 1.0, 1.25, 0.6},
      {"grad", 0.0, 1.0, 2.03, 0.03},
      {"flow", 0.0, 1.0, 2.03, 0.03},
      {"adv", 1.0, 0.5, 0.8, 0.5},
  };
  spec.partition = {"grad", "flow"};
  return spec;
}

}  // namespace maas
