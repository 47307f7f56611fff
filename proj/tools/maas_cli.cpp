// maas: synthetic bank generation, strategy comparison and score fusion.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "maas/core.hpp"
#include "maas/eval.hpp"
#include "maas/io.hpp"
#include "maas/synth.hpp"

namespace fs = std::filesystem;

namespace {

/// Tracks files written by a command so they can be removed on failure.
class OutputSet {
 public:
  void write(const fs::path& path, const std::string& content) {
    maas::io::write_atomic(path, content);
    written_.push_back(path);
  }

  void discard() noexcept {
    for (const auto& p : written_) {
      std::error_code ec;
      fs::remove(p, ec);
    }
    written_.clear();
  }

 private:
  std::vector<fs::path> written_;
};

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir))
    throw maas::Error(maas::ErrorCode::IOError, "cannot create directory '" + dir.string() + "'");
}

void run_synth(const fs::path& spec_path, const fs::path& out_dir, OutputSet& out) {
  const auto spec = maas::io::read_synth_spec(spec_path);
  const auto data = maas::generate(spec);
  ensure_dir(out_dir);
  out.write(out_dir / "train.csv", maas::io::format_scores(data.train));
  out.write(out_dir / "test.csv", maas::io::format_scores(data.test));
  out.write(out_dir / "labels.csv", maas::io::format_labels(data.labels));
}

std::string trace_name(maas::Strategy s, const std::optional<std::string>& master) {
  std::string name(maas::to_string(s));
  if (master) name += "__" + *master;
  return name + ".csv";
}

void run_compare(const fs::path& train_path, const fs::path& test_path, const fs::path& labels_path,
                 const fs::path& config_path, const fs::path& out_path, const std::optional<fs::path>& trace_dir,
                 OutputSet& out) {
  const auto cfg = maas::io::read_config(config_path);
  auto inputs = maas::validate_bank(maas::io::read_scores(train_path), maas::io::read_scores(test_path),
                                    maas::io::read_labels(labels_path));
  const auto masters = cfg.compare_masters();
  auto report = maas::compare(inputs, cfg.strategies, masters, cfg.pipeline);
  report.provenance = {
      {"train", train_path.string(), maas::io::sha256_file(train_path)},
      {"test", test_path.string(), maas::io::sha256_file(test_path)},
      {"labels", labels_path.string(), maas::io::sha256_file(labels_path)},
      {"config", config_path.string(), maas::io::sha256_file(config_path)},
  };

  if (trace_dir) {
    ensure_dir(*trace_dir);
    const maas::Pipeline pipeline(inputs.train, inputs.test, cfg.pipeline);
    for (const auto& row : report.rows) {
      const auto path = *trace_dir / trace_name(row.strategy, row.master);
      if (row.strategy == maas::Strategy::MaasSoft || row.strategy == maas::Strategy::MaasDiscard)
        out.write(path, maas::io::format_maas_trace(pipeline.maas(*row.master, row.strategy)));
      else
        out.write(path, maas::io::format_fused_trace(pipeline.run(row.strategy, row.master)));
    }
  }
  out.write(out_path, maas::io::report_json(report));
  std::cout << maas::io::report_table(report);
}

void run_fuse(const fs::path& train_path, const fs::path& test_path, const fs::path& config_path,
              const std::string& strategy_id, const fs::path& out_path, OutputSet& out) {
  const auto cfg = maas::io::read_config(config_path);
  const auto strategy = maas::parse_strategy(strategy_id);
  const auto train = maas::io::read_scores(train_path);
  const auto test = maas::io::read_scores(test_path);
  maas::validate_banks(train, test);
  const auto fused = maas::run_strategy(train, test, strategy, cfg.master, cfg.pipeline);
  out.write(out_path, maas::io::format_fused(fused));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Master-auxiliary aggregation of per-frame anomaly scores"};
  app.require_subcommand(1);

  std::string spec_path, out_dir;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic detector bank");
  synth->add_option("--spec", spec_path, "Synthetic spec (JSON)")->required();
  synth->add_option("--out-dir", out_dir, "Directory for train.csv, test.csv, labels.csv")->required();

  std::string train, test, labels, config, out, strategy;
  std::optional<std::string> trace_dir;
  auto* cmp = app.add_subcommand("compare", "Compute AUCs of aggregation strategies");
  cmp->add_option("--train", train, "Training score file")->required();
  cmp->add_option("--test", test, "Test score file")->required();
  cmp->add_option("--labels", labels, "Test label file")->required();
  cmp->add_option("--config", config, "Run config (JSON)")->required();
  cmp->add_option("--out", out, "Report output (JSON)")->required();
  cmp->add_option("--trace", trace_dir, "Directory for per-frame trace rows");

  auto* fuse = app.add_subcommand("fuse", "Write fused per-frame scores for one strategy");
  fuse->add_option("--train", train, "Training score file")->required();
  fuse->add_option("--test", test, "Test score file")->required();
  fuse->add_option("--config", config, "Run config (JSON)")->required();
  fuse->add_option("--strategy", strategy, "Strategy identifier")->required();
  fuse->add_option("--out", out, "Fused score output")->required();

  CLI11_PARSE(app, argc, argv);

  OutputSet outputs;
  try {
    if (synth->parsed()) run_synth(spec_path, out_dir, outputs);
    else if (cmp->parsed())
      run_compare(train, test, labels, config, out,
                  trace_dir ? std::optional<fs::path>(*trace_dir) : std::nullopt, outputs);
    else if (fuse->parsed()) run_fuse(train, test, config, strategy, out, outputs);
  } catch (const maas::Error& e) {
    outputs.discard();
    std::cerr << "maas: error: " << e.what() << '\n';
    return maas::exit_status(e.code());
  } catch (const std::exception& e) {
    outputs.discard();
    std::cerr << "maas: error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
