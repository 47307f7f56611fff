#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "hand_fixture.hpp"
#include "maas/io.hpp"
#include "test_util.hpp"

using namespace maas;
using namespace maas::testing;
namespace fs = std::filesystem;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::IOError;
}

DetectorBank scores_from(const std::string& text) {
  std::istringstream in(text);
  return io::parse_scores(in, "mem");
}

LabelTrack labels_from(const std::string& text) {
  std::istringstream in(text);
  return io::parse_labels(in, "mem");
}

std::string detail_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.detail();
  }
  return {};
}

}  // namespace

TEST_CASE("score files round-trip exactly") {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> d(0, 1e3);
  for (int i = 0; i < 50; ++i) {
    const auto g = grid_of({1 + i % 7, 3, 1 + i});
    std::vector<Vector> cols(3, Vector(g.total_frames()));
    for (auto& c : cols)
      for (Index t = 0; t < c.size(); ++t) c[t] = d(rng) * std::pow(10.0, static_cast<double>(t % 9) - 4.0);
    const auto bank = bank_of(g, {"int", "grad", "flow"}, cols);
    const auto text = io::format_scores(bank);
    CHECK(scores_from(text) == bank);
    CHECK(io::format_scores(scores_from(text)) == text);
  }
}

TEST_CASE("label files round-trip") {
  const auto g = grid_of({3, 2});
  const LabelTrack labels{g, ivec({0, 1, 1, 0, 0})};
  const auto text = io::format_labels(labels);
  CHECK(text == "video_id,frame,label\nv0,0,0\nv0,1,1\nv0,2,1\nv1,0,0\nv1,1,0\n");
  CHECK(labels_from(text) == labels);
}

TEST_CASE("score parse errors") {
  CHECK(code_of([] { scores_from(""); }) == ErrorCode::ParseError);
  CHECK(code_of([] { scores_from("video,frame,a\n"); }) == ErrorCode::ParseError);
  CHECK(code_of([] { scores_from("video_id,frame,a\n"); }) == ErrorCode::EmptyBank);
  CHECK(code_of([] { scores_from("video_id,frame,a\nv,0,1,2\n"); }) == ErrorCode::ParseError);
  CHECK(code_of([] { scores_from("video_id,frame,a\nv,0,x\n"); }) == ErrorCode::ParseError);
  CHECK(code_of([] { scores_from("video_id,frame,a\nv,1,1\n"); }) == ErrorCode::ParseError);
  CHECK(code_of([] { scores_from("video_id,frame,a\nv,0,1\nw,0,1\nv,1,1\n"); }) == ErrorCode::ParseError);
  CHECK(code_of([] { scores_from("video_id,frame,a\nv,0,nan\n"); }) == ErrorCode::NonFiniteScore);
  CHECK(code_of([] { scores_from("video_id,frame,a\nv,0,inf\n"); }) == ErrorCode::NonFiniteScore);
  CHECK(code_of([] { scores_from("video_id,frame,a,a\nv,0,1,1\n"); }) == ErrorCode::MismatchedDetectors);
  CHECK(detail_of([] { scores_from("video_id,frame,a\nv,0,1\nv,2,1\n"); }).starts_with("mem:3"));
  CHECK(code_of([] { io::read_scores("/nonexistent/scores.csv"); }) == ErrorCode::IOError);
}

TEST_CASE("label parse errors") {
  CHECK(code_of([] { labels_from("video_id,frame,score\nv,0,1\n"); }) == ErrorCode::ParseError);
  CHECK(code_of([] { labels_from("video_id,frame,label\nv,0,2\n"); }) == ErrorCode::ParseError);
  CHECK(code_of([] { labels_from("video_id,frame,label\nv,0,0.5\n"); }) == ErrorCode::ParseError);
}

TEST_CASE("config parsing") {
  const auto cfg = io::parse_config(R"({
    "hyperparams": {"alpha": 0.05, "lambda": 0, "eps_a": 10, "gamma_a_overrides": {}},
    "master": "int",
    "masters": ["int", "adv"],
    "cascade_order": ["grad", "int"],
    "strategies": ["maas-soft", "raw"],
    "constant_track_policy": "zeros",
    "ablation": {"continuity": false}
  })");
  CHECK(cfg.pipeline.hp.alpha == 0.05);
  CHECK(cfg.pipeline.hp.beta == 0.1);
  CHECK(cfg.pipeline.hp.lambda == 0.0);
  CHECK(cfg.pipeline.hp.eps_a == 10);
  CHECK(cfg.pipeline.hp.gamma_a_overrides.empty());
  CHECK(cfg.master == "int");
  CHECK(cfg.compare_masters() == std::vector<std::string>{"int", "adv"});
  CHECK(cfg.pipeline.cascade_order == std::vector<std::string>{"grad", "int"});
  CHECK(cfg.strategies == std::vector<Strategy>{Strategy::MaasSoft, Strategy::Raw});
  CHECK(cfg.pipeline.constant_policy == ConstantPolicy::Zeros);
  CHECK_FALSE(cfg.pipeline.ablation.continuity);
  CHECK(cfg.pipeline.ablation.cred_a);

  const auto defaults = io::parse_config("{}");
  CHECK(defaults.pipeline.hp.gamma_a_for("adv") == 1.01);
  CHECK(defaults.compare_masters().empty());
  CHECK(io::parse_config(R"({"master": "m"})").compare_masters() == std::vector<std::string>{"m"});
}

TEST_CASE("config errors name the field") {
  CHECK(code_of([] { io::parse_config("{"); }) == ErrorCode::InvalidConfig);
  CHECK(code_of([] { io::parse_config("[]"); }) == ErrorCode::InvalidConfig);
  CHECK(detail_of([] { io::parse_config(R"({"lambada": 1})"); }).find("lambada") != std::string::npos);
  CHECK(detail_of([] { io::parse_config(R"({"hyperparams": {"alpha": "x"}})"); }).find("alpha") != std::string::npos);
  CHECK(detail_of([] { io::parse_config(R"({"hyperparams": {"eps_a": 1.5}})"); }).find("eps_a") != std::string::npos);
  CHECK(code_of([] { io::parse_config(R"({"hyperparams": {"alpha": 2}})"); }) == ErrorCode::InvalidConfig);
  CHECK(code_of([] { io::parse_config(R"({"hyperparams": {"lambda": -1}})"); }) == ErrorCode::InvalidConfig);
  CHECK(detail_of([] { io::parse_config(R"({"strategies": ["maas"]})"); }).find("maas") != std::string::npos);
  CHECK(code_of([] { io::parse_config(R"({"constant_track_policy": "skip"})"); }) == ErrorCode::InvalidConfig);
  CHECK(code_of([] { io::parse_config(R"({"ablation": {"fill": false}})"); }) == ErrorCode::InvalidConfig);
  CHECK(code_of([] { io::parse_config(R"({"master": ""})"); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("synth spec parsing") {
  const auto spec = io::parse_synth_spec(io::format_synth_spec(complementary_fixture(5)));
  CHECK(spec == complementary_fixture(5));

  const auto minimal = io::parse_synth_spec(R"({"seed": 1, "detectors": [{"name": "d"}]})");
  CHECK(minimal.detectors.size() == 1);
  CHECK(minimal.seed == 1);

  CHECK(detail_of([] { io::parse_synth_spec(R"({"detectors": [{"name": "d"}]})"); }).starts_with("seed"));
  CHECK(detail_of([] { io::parse_synth_spec(R"({"seed": 1})"); }).starts_with("detectors"));
  CHECK(detail_of([] { io::parse_synth_spec(R"({"seed": 1, "detectors": [{"name": "d", "sigma": -1}]})"); })
            .starts_with("detectors[0].sigma"));
  CHECK(detail_of([] { io::parse_synth_spec(R"({"seed": 1, "detectors": [{"nom": "d"}]})"); })
            .find("detectors[0].nom") != std::string::npos);
  CHECK(detail_of([] { io::parse_synth_spec(R"({"seed": 1, "event_len": {"min": 9, "max": 3},
                                                "detectors": [{"name": "d"}]})"); })
            .starts_with("event_len.max"));
  CHECK(code_of([] { io::parse_synth_spec("not json"); }) == ErrorCode::InvalidSpec);
}

TEST_CASE("report and fused output") {
  const Pipeline p(hand::train(), hand::test(), hand::options());
  StrategyReport report;
  report.config_echo = p.options();
  report.rows = {{Strategy::MaasSoft, "m", 0.75, 0.5}, {Strategy::WeightedSum, std::nullopt, 0.625, std::nullopt}};
  const auto json = io::report_json(report);
  CHECK(json == io::report_json(report));
  CHECK(json.find("\"strategy\": \"maas-soft\"") != std::string::npos);
  CHECK(json.find("\"master\": null") != std::string::npos);
  const auto table = io::report_table(report);
  CHECK(table.find("0.750000") != std::string::npos);
  CHECK(table.find("weighted-sum") != std::string::npos);

  const auto fused = p.run(Strategy::MaasSoft, "m");
  const auto text = io::format_fused(fused);
  CHECK(text.starts_with("video_id,frame,value,weight\nclip_a,0,0.125,1\n"));
  CHECK(text.find("clip_a,7,21,21\n") != std::string::npos);  // 1.0 * 21

  const auto trace = io::format_maas_trace(p.maas("m"));
  CHECK(trace.starts_with("video_id,frame,field,value\nclip_a,0,master,0.125\n"));
  CHECK(trace.find("clip_a,5,f_a,0\nclip_a,5,f_n,0\nclip_a,5,f_a_filled,1\n") != std::string::npos);
  CHECK(trace.find("clip_b,25,f_n_filled,1\n") != std::string::npos);

  const auto discard = io::format_fused(p.run(Strategy::MaasDiscard, "m"));
  CHECK(discard.starts_with("video_id,frame,value,tier\n"));
}

TEST_CASE("write_atomic and sha256") {
  const auto dir = fs::temp_directory_path() / "maas_io_test";
  fs::create_directories(dir);
  const auto path = dir / "a.txt";
  io::write_atomic(path, "abc");
  io::write_atomic(path, "abc");
  CHECK_FALSE(fs::exists(dir / "a.txt.tmp"));
  CHECK(io::sha256_file(path) == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  fs::remove_all(dir);
  CHECK(code_of([&] { io::sha256_file(path); }) == ErrorCode::IOError);
}

TEST_CASE("format_double is shortest round-trip") {
  CHECK(io::format_double(0.1) == "0.1");
  CHECK(io::format_double(21.0) == "21");
  CHECK(io::format_double(-2.5e-7) == "-2.5e-07");
  const double x = 1.0 / 3.0;
  CHECK(std::stod(io::format_double(x)) == x);
}
