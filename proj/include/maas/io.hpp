#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "maas/core.hpp"
#include "maas/eval.hpp"
#include "maas/synth.hpp"

namespace maas::io {

// Score files: header `video_id,frame,<detector>...`, one row per frame,
// frames contiguous from 0 within each video, video blocks contiguous.
// Label files: `video_id,frame,label`.

DetectorBank parse_scores(std::istream& in, const std::string& source = "<stream>");
std::string format_scores(const DetectorBank& bank);
DetectorBank read_scores(const std::filesystem::path& path);

LabelTrack parse_labels(std::istream& in, const std::string& source = "<stream>");
std::string format_labels(const LabelTrack& labels);
LabelTrack read_labels(const std::filesystem::path& path);

/// Shortest decimal that round-trips to the same double.
std::string format_double(double x);

struct RunConfig {
  PipelineOptions pipeline;
  std::optional<std::string> master;
  /// Masters swept by `compare`; falls back to {master} when empty.
  std::vector<std::string> masters;
  std::vector<Strategy> strategies;

  std::vector<std::string> compare_masters() const;
};

/// JSON document whose keys mirror RunConfig. Unknown keys and type or
/// range errors throw InvalidConfig naming the field.
RunConfig parse_config(std::string_view text);
RunConfig read_config(const std::filesystem::path& path);

/// Unknown keys and malformed fields throw InvalidSpec naming the field.
SynthSpec parse_synth_spec(std::string_view text);
SynthSpec read_synth_spec(const std::filesystem::path& path);
std::string format_synth_spec(const SynthSpec& spec);

std::string report_json(const StrategyReport& report);
std::string report_table(const StrategyReport& report);

/// `video_id,frame,value[,tier][,weight]`.
std::string format_fused(const FusedTrack& fused);

/// Long-format per-frame rows `video_id,frame,field,value` for the
/// intermediate tracks of one master-auxiliary run.
std::string format_maas_trace(const MaasTrace& trace);
/// Same row format for any fused track (value, and tier / weight when present).
std::string format_fused_trace(const FusedTrack& fused);

std::string sha256_file(const std::filesystem::path& path);

/// Writes to a sibling temporary file, then renames over `path`.
void write_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace maas::io
