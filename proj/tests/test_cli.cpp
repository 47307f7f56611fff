#include <doctest.h>

#include <algorithm>
#include <filesystem>

#include "cli_util.hpp"
#include "maas/eval.hpp"
#include "maas/io.hpp"

using namespace maas;
using namespace maas::testing;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::current_path() / "cli_scratch" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

/// Generates the seed-42 fixture into `dir` once per test.
void synth_into(const fs::path& dir) {
  const auto r = run_cli("synth --spec " + fixture("complementary_seed42.json") + " --out-dir " + q(dir), dir);
  REQUIRE(r.status == 0);
}

std::string compare_args(const fs::path& data, const std::string& config, const fs::path& out) {
  return "compare --train " + q(data / "train.csv") + " --test " + q(data / "test.csv") + " --labels " +
         q(data / "labels.csv") + " --config " + config + " --out " + q(out);
}

std::size_t lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE("synth writes three reproducible files") {
  const auto a = scratch("synth_a");
  const auto b = scratch("synth_b");
  synth_into(a);
  synth_into(b);
  for (const char* f : {"train.csv", "test.csv", "labels.csv"}) {
    CHECK(fs::exists(a / f));
    CHECK(slurp(a / f) == slurp(b / f));
  }
  CHECK(lines(slurp(a / "train.csv")) == 1 + 4 * 600);
  CHECK(lines(slurp(a / "test.csv")) == 1 + 6 * 600);
  CHECK(lines(slurp(a / "labels.csv")) == 1 + 6 * 600);
  CHECK(slurp(a / "train.csv").starts_with("video_id,frame,int,grad,flow,adv\ntrain_000,0,"));
}

TEST_CASE("synth rejects a malformed spec and names the field") {
  const auto dir = scratch("synth_bad");
  {
    std::ofstream(dir / "spec.json") << R"({"seed": 1, "detectors": [{"name": "d", "hit_rate": 3}]})";
  }
  const auto r = run_cli("synth --spec " + q(dir / "spec.json") + " --out-dir " + q(dir / "out"), dir);
  CHECK(r.status == exit_status(ErrorCode::InvalidSpec));
  CHECK(r.err.find("InvalidSpec") != std::string::npos);
  CHECK(r.err.find("detectors[0].hit_rate") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "out" / "train.csv"));
}

TEST_CASE("compare runs every strategy and writes traces") {
  const auto dir = scratch("compare");
  synth_into(dir);
  const auto r = run_cli(compare_args(dir, fixture("config_all.json"), dir / "report.json") + " --trace " +
                             q(dir / "trace"),
                         dir, "table.txt");
  REQUIRE(r.status == 0);
  const auto report = slurp(dir / "report.json");
  // 3 master-based strategies x 4 masters + 6 others.
  CHECK(lines(slurp(dir / "table.txt")) == 1 + 18);
  for (Strategy s : kAllStrategies)
    CHECK(report.find("\"strategy\": \"" + std::string(to_string(s)) + "\"") != std::string::npos);
  CHECK(report.find("\"role\": \"labels\"") != std::string::npos);
  CHECK(fs::exists(dir / "trace" / "maas-soft__int.csv"));
  CHECK(fs::exists(dir / "trace" / "cascade-normal.csv"));
  const auto trace = slurp(dir / "trace" / "maas-soft__grad.csv");
  CHECK(trace.starts_with("video_id,frame,field,value\ntest_000,0,master,"));
  CHECK(lines(trace) == 1 + 6 * 600 * 7);

  // The trace rows for maas-soft match the library run.
  const auto inputs = validate_bank(io::read_scores(dir / "train.csv"), io::read_scores(dir / "test.csv"),
                                    io::read_labels(dir / "labels.csv"));
  const Pipeline p(inputs.train, inputs.test, io::read_config(fs::path(MAAS_FIXTURE_DIR) / "config_all.json").pipeline);
  CHECK(trace == io::format_maas_trace(p.maas("grad")));
}

TEST_CASE("lambda 0 makes maas-soft equal to the raw master") {
  const auto dir = scratch("lambda0");
  synth_into(dir);
  REQUIRE(run_cli(compare_args(dir, fixture("config_lambda0.json"), dir / "report.json"), dir).status == 0);
  const auto j = slurp(dir / "report.json");
  const auto soft = j.find("\"auc\"");
  const auto raw = j.find("\"auc\"", soft + 1);
  REQUIRE(raw != std::string::npos);
  CHECK(j.substr(soft, j.find('\n', soft) - soft) == j.substr(raw, j.find('\n', raw) - raw));
}

TEST_CASE("fuse raw equals the smoothed master") {
  const auto dir = scratch("fuse");
  synth_into(dir);
  const auto r = run_cli("fuse --train " + q(dir / "train.csv") + " --test " + q(dir / "test.csv") + " --config " +
                             fixture("config_all.json") + " --strategy raw --out " + q(dir / "raw.csv"),
                         dir);
  REQUIRE(r.status == 0);
  const auto test = io::read_scores(dir / "test.csv");
  FusedTrack expect{test.grid(), Strategy::Raw, median_smooth(test, 15).column("int"), std::nullopt, std::nullopt};
  CHECK(slurp(dir / "raw.csv") == io::format_fused(expect));

  const auto bad = run_cli("fuse --train " + q(dir / "train.csv") + " --test " + q(dir / "test.csv") +
                               " --config " + fixture("config_all.json") + " --strategy maas --out " +
                               q(dir / "x.csv"),
                           dir);
  CHECK(bad.status == exit_status(ErrorCode::UnknownStrategy));
  CHECK_FALSE(fs::exists(dir / "x.csv"));
}

TEST_CASE("errors map to nonzero exits and leave no partial outputs") {
  const auto dir = scratch("errors");
  synth_into(dir);

  const auto missing = run_cli("compare --train " + q(dir / "train.csv") + " --test " + q(dir / "test.csv") +
                                   " --labels " + q(dir / "nope.csv") + " --config " + fixture("config_all.json") +
                                   " --out " + q(dir / "r.json"),
                               dir);
  CHECK(missing.status == exit_status(ErrorCode::IOError));
  CHECK(missing.err.find("IOError") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "r.json"));

  {
    std::ofstream(dir / "cascade.json") << R"({"strategies": ["cascade-normal"]})";
  }
  const auto cascade = run_cli(compare_args(dir, q(dir / "cascade.json"), dir / "r.json"), dir);
  CHECK(cascade.status == exit_status(ErrorCode::MissingConfig));
  CHECK(cascade.err.find("MissingConfig") != std::string::npos);

  // Traces are written before the report; an unwritable report path fails
  // after them and the trace files are removed.
  const auto late = run_cli(compare_args(dir, fixture("config_all.json"), dir / "no_such_dir" / "r.json") +
                                " --trace " + q(dir / "trace"),
                            dir);
  CHECK(late.status == exit_status(ErrorCode::IOError));
  CHECK(fs::is_directory(dir / "trace"));
  CHECK(fs::is_empty(dir / "trace"));

  const auto usage = run_cli("compare --train x", dir);
  CHECK(usage.status != 0);
}
