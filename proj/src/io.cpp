#include "maas/io.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <set>
#include <sstream>

#include <json.hpp>

namespace maas::io {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

std::vector<std::string_view> split_row(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

bool next_line(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

[[noreturn]] void parse_fail(const std::string& source, std::size_t line_no, const std::string& what) {
  throw Error(ErrorCode::ParseError, source + ":" + std::to_string(line_no) + ": " + what);
}

template <typename T>
T parse_number(std::string_view cell, const std::string& source, std::size_t line_no, const char* what) {
  T value{};
  const auto* first = cell.data();
  const auto* last = cell.data() + cell.size();
  const auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc() || res.ptr != last || cell.empty())
    parse_fail(source, line_no, std::string("bad ") + what + " '" + std::string(cell) + "'");
  return value;
}

/// Shared reader for the frame-indexed formats: calls `on_row` with the
/// value cells of each row and returns the implied grid.
template <typename OnRow>
VideoGrid read_frame_rows(std::istream& in, const std::string& source, std::size_t value_cols, OnRow on_row) {
  std::vector<Video> videos;
  std::set<std::string> finished;
  std::string line;
  std::size_t line_no = 1;
  while (next_line(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split_row(line);
    if (cells.size() != value_cols + 2)
      parse_fail(source, line_no, "expected " + std::to_string(value_cols + 2) + " columns, got " +
                                      std::to_string(cells.size()));
    const std::string id(cells[0]);
    if (id.empty()) parse_fail(source, line_no, "empty video_id");
    const auto frame = parse_number<long long>(cells[1], source, line_no, "frame");
    if (videos.empty() || videos.back().id != id) {
      if (!videos.empty()) finished.insert(videos.back().id);
      if (finished.count(id)) parse_fail(source, line_no, "video '" + id + "' is not contiguous");
      videos.push_back({id, 0});
    }
    if (frame != videos.back().frames)
      parse_fail(source, line_no, "video '" + id + "' expected frame " + std::to_string(videos.back().frames) +
                                      ", got " + std::to_string(frame));
    ++videos.back().frames;
    on_row(cells, line_no);
  }
  if (videos.empty()) throw Error(ErrorCode::EmptyBank, source + ": no data rows");
  return VideoGrid(std::move(videos));
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IOError, "cannot open '" + path.string() + "'");
  return in;
}

std::string slurp(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

DetectorBank parse_scores(std::istream& in, const std::string& source) {
  std::string header;
  if (!next_line(in, header)) throw Error(ErrorCode::ParseError, source + ": missing header");
  const auto cols = split_row(header);
  if (cols.size() < 3 || cols[0] != "video_id" || cols[1] != "frame")
    throw Error(ErrorCode::ParseError, source + ":1: header must be video_id,frame,<detector>...");
  std::vector<std::string> names(cols.begin() + 2, cols.end());
  const std::size_t n_det = names.size();

  std::vector<double> flat;
  auto grid = read_frame_rows(in, source, n_det, [&](const std::vector<std::string_view>& cells, std::size_t line_no) {
    for (std::size_t d = 0; d < n_det; ++d) {
      const double v = parse_number<double>(cells[d + 2], source, line_no, "score");
      if (!std::isfinite(v))
        throw Error(ErrorCode::NonFiniteScore, source + ":" + std::to_string(line_no) + ": detector '" + names[d] +
                                                   "' score is not finite");
      flat.push_back(v);
    }
  });
  const Index frames = grid.total_frames();
  Matrix scores = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      flat.data(), frames, static_cast<Index>(n_det));
  return {std::move(grid), std::move(names), std::move(scores)};
}

std::string format_scores(const DetectorBank& bank) {
  std::string out = "video_id,frame";
  for (const auto& n : bank.names()) out += "," + n;
  out += '\n';
  const auto& grid = bank.grid();
  for (std::size_t v = 0; v < grid.size(); ++v) {
    for (Index t = 0; t < grid.frames(v); ++t) {
      out += grid.videos()[v].id + "," + std::to_string(t);
      for (Index d = 0; d < bank.scores().cols(); ++d) out += "," + format_double(bank.scores()(grid.offset(v) + t, d));
      out += '\n';
    }
  }
  return out;
}

DetectorBank read_scores(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_scores(in, path.string());
}

LabelTrack parse_labels(std::istream& in, const std::string& source) {
  std::string header;
  if (!next_line(in, header)) throw Error(ErrorCode::ParseError, source + ": missing header");
  if (header != "video_id,frame,label")
    throw Error(ErrorCode::ParseError, source + ":1: header must be video_id,frame,label");
  std::vector<int> values;
  auto grid = read_frame_rows(in, source, 1, [&](const std::vector<std::string_view>& cells, std::size_t line_no) {
    const int v = parse_number<int>(cells[2], source, line_no, "label");
    if (v != 0 && v != 1) parse_fail(source, line_no, "label must be 0 or 1");
    values.push_back(v);
  });
  return {std::move(grid), Eigen::Map<const IntVector>(values.data(), static_cast<Index>(values.size()))};
}

std::string format_labels(const LabelTrack& labels) {
  std::string out = "video_id,frame,label\n";
  const auto& grid = labels.grid;
  for (std::size_t v = 0; v < grid.size(); ++v)
    for (Index t = 0; t < grid.frames(v); ++t)
      out += grid.videos()[v].id + "," + std::to_string(t) + "," + std::to_string(labels.values[grid.offset(v) + t]) +
             '\n';
  return out;
}

LabelTrack read_labels(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_labels(in, path.string());
}

// ---------------------------------------------------------------------------
// JSON documents

namespace {

class Fields {
 public:
  Fields(const json& obj, std::string path, ErrorCode code) : obj_(obj), path_(std::move(path)), code_(code) {
    if (!obj_.is_object()) fail(path_.empty() ? "document" : path_, "must be an object");
  }

  void allow_only(std::initializer_list<const char*> keys) const {
    const std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [k, _] : obj_.items())
      if (!allowed.count(k)) fail(name(k), "is not a recognized key");
  }

  bool has(const char* key) const { return obj_.contains(key); }
  const json& raw(const char* key) const { return obj_.at(key); }
  std::string name(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  [[noreturn]] void fail(const std::string& field, const std::string& what) const {
    throw Error(code_, field + " " + what);
  }

  void number(const char* key, double& out) const {
    if (!has(key)) return;
    const auto& v = raw(key);
    if (!v.is_number()) fail(name(key), "must be a number");
    out = v.get<double>();
  }

  template <typename Int>
  void integer(const char* key, Int& out) const {
    if (!has(key)) return;
    const auto& v = raw(key);
    if (!v.is_number_integer()) fail(name(key), "must be an integer");
    if constexpr (std::is_unsigned_v<Int>) {
      if (v.is_number_unsigned()) {
        out = v.get<Int>();
        return;
      }
      fail(name(key), "must be a nonnegative integer");
    } else {
      out = v.get<Int>();
    }
  }

  void boolean(const char* key, bool& out) const {
    if (!has(key)) return;
    if (!raw(key).is_boolean()) fail(name(key), "must be true or false");
    out = raw(key).get<bool>();
  }

  void string(const char* key, std::string& out) const {
    if (!has(key)) return;
    if (!raw(key).is_string()) fail(name(key), "must be a string");
    out = raw(key).get<std::string>();
  }

  void strings(const char* key, std::vector<std::string>& out) const {
    if (!has(key)) return;
    const auto& v = raw(key);
    if (!v.is_array()) fail(name(key), "must be an array of strings");
    out.clear();
    for (const auto& e : v) {
      if (!e.is_string()) fail(name(key), "must be an array of strings");
      out.push_back(e.get<std::string>());
    }
  }

  void number_map(const char* key, std::map<std::string, double>& out) const {
    if (!has(key)) return;
    const auto& v = raw(key);
    if (!v.is_object()) fail(name(key), "must be an object of numbers");
    out.clear();
    for (const auto& [k, e] : v.items()) {
      if (!e.is_number()) fail(name(key) + "." + k, "must be a number");
      out[k] = e.get<double>();
    }
  }

 private:
  const json& obj_;
  std::string path_;
  ErrorCode code_;
};

json parse_document(std::string_view text, ErrorCode code) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(code, std::string("malformed JSON: ") + e.what());
  }
}

HyperParams parse_hyperparams(const json& obj) {
  Fields f(obj, "hyperparams", ErrorCode::InvalidConfig);
  f.allow_only({"alpha", "beta", "gamma_a", "gamma_n", "gamma_a_overrides", "eps_a", "eps_n", "lambda",
                "smooth_radius", "baseline_weights"});
  HyperParams hp;
  f.number("alpha", hp.alpha);
  f.number("beta", hp.beta);
  f.number("gamma_a", hp.gamma_a);
  f.number("gamma_n", hp.gamma_n);
  f.number_map("gamma_a_overrides", hp.gamma_a_overrides);
  f.integer("eps_a", hp.eps_a);
  f.integer("eps_n", hp.eps_n);
  f.number("lambda", hp.lambda);
  f.integer("smooth_radius", hp.smooth_radius);
  f.number_map("baseline_weights", hp.baseline_weights);
  hp.validate();
  return hp;
}

ordered_json hyperparams_json(const HyperParams& hp) {
  ordered_json j;
  j["alpha"] = hp.alpha;
  j["beta"] = hp.beta;
  j["gamma_a"] = hp.gamma_a;
  j["gamma_n"] = hp.gamma_n;
  j["gamma_a_overrides"] = ordered_json::object();
  for (const auto& [k, v] : hp.gamma_a_overrides) j["gamma_a_overrides"][k] = v;
  j["eps_a"] = hp.eps_a;
  j["eps_n"] = hp.eps_n;
  j["lambda"] = hp.lambda;
  j["smooth_radius"] = hp.smooth_radius;
  j["baseline_weights"] = ordered_json::object();
  for (const auto& [k, v] : hp.baseline_weights) j["baseline_weights"][k] = v;
  return j;
}

}  // namespace

std::vector<std::string> RunConfig::compare_masters() const {
  if (!masters.empty()) return masters;
  if (master) return {*master};
  return {};
}

RunConfig parse_config(std::string_view text) {
  const json doc = parse_document(text, ErrorCode::InvalidConfig);
  Fields f(doc, "", ErrorCode::InvalidConfig);
  f.allow_only({"hyperparams", "master", "masters", "cascade_order", "strategies", "constant_track_policy", "ablation"});

  RunConfig cfg;
  if (f.has("hyperparams")) cfg.pipeline.hp = parse_hyperparams(f.raw("hyperparams"));
  if (f.has("master")) {
    std::string m;
    f.string("master", m);
    if (m.empty()) f.fail("master", "must be nonempty");
    cfg.master = m;
  }
  f.strings("masters", cfg.masters);
  f.strings("cascade_order", cfg.pipeline.cascade_order);

  std::vector<std::string> ids;
  f.strings("strategies", ids);
  for (const auto& id : ids) {
    try {
      cfg.strategies.push_back(parse_strategy(id));
    } catch (const Error&) {
      f.fail("strategies", "contains unknown strategy '" + id + "'");
    }
  }

  if (f.has("constant_track_policy")) {
    std::string policy;
    f.string("constant_track_policy", policy);
    if (policy == "error") cfg.pipeline.constant_policy = ConstantPolicy::Error;
    else if (policy == "zeros") cfg.pipeline.constant_policy = ConstantPolicy::Zeros;
    else f.fail("constant_track_policy", "must be \"error\" or \"zeros\"");
  }

  if (f.has("ablation")) {
    Fields a(f.raw("ablation"), "ablation", ErrorCode::InvalidConfig);
    a.allow_only({"cred_a", "cred_n", "continuity"});
    a.boolean("cred_a", cfg.pipeline.ablation.cred_a);
    a.boolean("cred_n", cfg.pipeline.ablation.cred_n);
    a.boolean("continuity", cfg.pipeline.ablation.continuity);
  }
  return cfg;
}

RunConfig read_config(const std::filesystem::path& path) { return parse_config(slurp(path)); }

SynthSpec parse_synth_spec(std::string_view text) {
  const json doc = parse_document(text, ErrorCode::InvalidSpec);
  Fields f(doc, "", ErrorCode::InvalidSpec);
  f.allow_only({"seed", "n_videos_train", "n_videos_test", "frames_per_video", "event_rate", "event_len",
                "detectors", "partition"});
  SynthSpec spec;
  if (!f.has("seed")) f.fail("seed", "is required");
  f.integer("seed", spec.seed);
  f.integer("n_videos_train", spec.n_videos_train);
  f.integer("n_videos_test", spec.n_videos_test);
  f.integer("frames_per_video", spec.frames_per_video);
  f.number("event_rate", spec.event_rate);
  if (f.has("event_len")) {
    Fields e(f.raw("event_len"), "event_len", ErrorCode::InvalidSpec);
    e.allow_only({"min", "max"});
    e.integer("min", spec.event_len_min);
    e.integer("max", spec.event_len_max);
  }
  if (!f.has("detectors") || !f.raw("detectors").is_array()) f.fail("detectors", "must be an array of profiles");
  const auto& dets = f.raw("detectors");
  for (std::size_t i = 0; i < dets.size(); ++i) {
    Fields d(dets[i], "detectors[" + std::to_string(i) + "]", ErrorCode::InvalidSpec);
    d.allow_only({"name", "hit_rate", "mu_normal", "mu_abnormal", "sigma"});
    if (!d.has("name")) d.fail(d.name("name"), "is required");
    DetectorProfile p;
    d.string("name", p.name);
    d.number("hit_rate", p.hit_rate);
    d.number("mu_normal", p.mu_normal);
    d.number("mu_abnormal", p.mu_abnormal);
    d.number("sigma", p.sigma);
    spec.detectors.push_back(std::move(p));
  }
  f.strings("partition", spec.partition);
  spec.validate();
  return spec;
}

SynthSpec read_synth_spec(const std::filesystem::path& path) { return parse_synth_spec(slurp(path)); }

std::string format_synth_spec(const SynthSpec& spec) {
  ordered_json j;
  j["seed"] = spec.seed;
  j["n_videos_train"] = spec.n_videos_train;
  j["n_videos_test"] = spec.n_videos_test;
  j["frames_per_video"] = spec.frames_per_video;
  j["event_rate"] = spec.event_rate;
  j["event_len"] = {{"min", spec.event_len_min}, {"max", spec.event_len_max}};
  j["detectors"] = ordered_json::array();
  for (const auto& d : spec.detectors) {
    ordered_json p;
    p["name"] = d.name;
    p["hit_rate"] = d.hit_rate;
    p["mu_normal"] = d.mu_normal;
    p["mu_abnormal"] = d.mu_abnormal;
    p["sigma"] = d.sigma;
    j["detectors"].push_back(std::move(p));
  }
  j["partition"] = spec.partition;
  return j.dump(2) + "\n";
}

std::string report_json(const StrategyReport& report) {
  ordered_json j;
  j["rows"] = ordered_json::array();
  for (const auto& row : report.rows) {
    ordered_json r;
    r["strategy"] = std::string(to_string(row.strategy));
    r["master"] = row.master ? ordered_json(*row.master) : ordered_json(nullptr);
    r["master_auc"] = row.master_auc ? ordered_json(*row.master_auc) : ordered_json(nullptr);
    r["auc"] = row.auc;
    j["rows"].push_back(std::move(r));
  }
  const auto& opt = report.config_echo;
  ordered_json cfg;
  cfg["hyperparams"] = hyperparams_json(opt.hp);
  cfg["cascade_order"] = opt.cascade_order;
  cfg["constant_track_policy"] = opt.constant_policy == ConstantPolicy::Error ? "error" : "zeros";
  cfg["ablation"] = {{"cred_a", opt.ablation.cred_a},
                     {"cred_n", opt.ablation.cred_n},
                     {"continuity", opt.ablation.continuity}};
  j["config"] = std::move(cfg);
  j["provenance"] = ordered_json::array();
  for (const auto& p : report.provenance)
    j["provenance"].push_back({{"role", p.role}, {"path", p.path}, {"sha256", p.sha256}});
  return j.dump(2) + "\n";
}

std::string report_table(const StrategyReport& report) {
  std::ostringstream out;
  out << std::left << std::setw(20) << "strategy" << std::setw(12) << "master" << std::setw(12) << "master_auc"
      << "auc\n";
  out << std::fixed << std::setprecision(6);
  for (const auto& row : report.rows) {
    out << std::setw(20) << to_string(row.strategy) << std::setw(12) << row.master.value_or("-");
    if (row.master_auc)
      out << std::setw(12) << *row.master_auc;
    else
      out << std::setw(12) << "-";
    out << row.auc << '\n';
  }
  return out.str();
}

std::string format_fused(const FusedTrack& fused) {
  std::string out = "video_id,frame,value";
  if (fused.tiers) out += ",tier";
  if (fused.soft_weights) out += ",weight";
  out += '\n';
  const auto& grid = fused.grid;
  for (std::size_t v = 0; v < grid.size(); ++v) {
    for (Index t = 0; t < grid.frames(v); ++t) {
      const Index g = grid.offset(v) + t;
      out += grid.videos()[v].id + "," + std::to_string(t) + "," + format_double(fused.values[g]);
      if (fused.tiers) out += "," + std::to_string((*fused.tiers)[g]);
      if (fused.soft_weights) out += "," + format_double((*fused.soft_weights)[g]);
      out += '\n';
    }
  }
  return out;
}

namespace {

struct TraceField {
  const char* name;
  std::function<std::string(Index)> value;
};

std::string format_long(const VideoGrid& grid, const std::vector<TraceField>& fields) {
  std::string out = "video_id,frame,field,value\n";
  for (std::size_t v = 0; v < grid.size(); ++v) {
    for (Index t = 0; t < grid.frames(v); ++t) {
      const Index g = grid.offset(v) + t;
      for (const auto& f : fields)
        out += grid.videos()[v].id + "," + std::to_string(t) + "," + f.name + "," + f.value(g) + '\n';
    }
  }
  return out;
}

auto real_field(const char* name, const Vector& v) {
  return TraceField{name, [&v](Index g) { return format_double(v[g]); }};
}

auto int_field(const char* name, const IntVector& v) {
  return TraceField{name, [&v](Index g) { return std::to_string(v[g]); }};
}

}  // namespace

std::string format_maas_trace(const MaasTrace& trace) {
  std::vector<TraceField> fields{
      real_field("master", trace.master_scores.values), int_field("f_a", trace.raw_freq.f_a),
      int_field("f_n", trace.raw_freq.f_n),           int_field("f_a_filled", trace.filled_freq.f_a),
      int_field("f_n_filled", trace.filled_freq.f_n), real_field("weight", trace.weights),
      real_field("fused", trace.fused.values),
  };
  if (trace.fused.tiers) fields.push_back(int_field("tier", *trace.fused.tiers));
  return format_long(trace.fused.grid, fields);
}

std::string format_fused_trace(const FusedTrack& fused) {
  std::vector<TraceField> fields{real_field("value", fused.values)};
  if (fused.tiers) fields.push_back(int_field("tier", *fused.tiers));
  if (fused.soft_weights) fields.push_back(real_field("weight", *fused.soft_weights));
  return format_long(fused.grid, fields);
}

std::string sha256_file(const std::filesystem::path& path) {
  const std::string data = slurp(path);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error(ErrorCode::IOError, "sha256 failed for '" + path.string() + "'");
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return hex.str();
}

void write_atomic(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IOError, "cannot write '" + tmp.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.close();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw Error(ErrorCode::IOError, "short write to '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::IOError, "cannot rename into '" + path.string() + "'");
  }
}

}  // namespace maas::io
