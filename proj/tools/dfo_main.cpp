// dfo: command-line driver for the feature-selection experiment pipeline.

#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "dfo/config.hpp"
#include "dfo/errors.hpp"
#include "dfo/pipeline.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitStage = 4;

// Only the output directory may come from the environment.
constexpr const char* kOutDirEnv = "DFO_OUT_DIR";

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Embedded feature selection over pooled CNN/transformer embeddings"};
  app.require_subcommand(1);

  std::string config_path, out_dir, fractions;
  std::uint64_t seed = 0;
  unsigned jobs = 1;
  bool quiet = false;

  const char* names[][2] = {
      {"ingest", "Pool the manifest's feature tensors into the feature store"},
      {"split", "Stratified train/validation/test split"},
      {"train", "Tune and fit every classifier on the full feature set"},
      {"select", "Rank features with each selector"},
      {"sweep", "Tune and evaluate every classifier on each top-p subset"},
      {"report", "Write the report CSV, tables and confusion matrices"},
      {"all", "Run every stage in order"},
  };
  for (const auto& [name, help] : names) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "Experiment config file")->required();
    sub->add_option("--out", out_dir, "Output directory (overrides the config and DFO_OUT_DIR)");
    sub->add_option("--seed", seed, "Master seed (overrides the config)");
    sub->add_option("--jobs", jobs, "Parallel workers")->check(CLI::PositiveNumber);
    sub->add_option("--fractions", fractions, "Comma-separated feature fractions in (0,1]");
    sub->add_flag("--quiet,-q", quiet, "Suppress progress output");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  auto* sub = app.get_subcommands().front();
  try {
    auto config = dfo::load_config(config_path);
    if (sub->count("--seed") > 0) config.seed = seed;
    if (sub->count("--fractions") > 0) config.fractions = dfo::parse_fraction_list(fractions);
    if (const char* env = std::getenv(kOutDirEnv); env && *env) config.output_dir = env;
    if (!out_dir.empty()) config.output_dir = out_dir;

    dfo::Pipeline pipeline(std::move(config), jobs, quiet ? nullptr : &std::cerr);
    const std::string cmd = sub->get_name();
    if (cmd == "ingest") pipeline.ingest();
    else if (cmd == "split") pipeline.split();
    else if (cmd == "train") pipeline.train();
    else if (cmd == "select") pipeline.select();
    else if (cmd == "sweep") pipeline.sweep();
    else if (cmd == "report") pipeline.report();
    else pipeline.run_all();
    return kExitOk;
  } catch (const dfo::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const dfo::StageError& e) {
    std::cerr << "stage error: " << e.what() << '\n';
    return kExitStage;
  } catch (const dfo::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInternal;
  }
}
