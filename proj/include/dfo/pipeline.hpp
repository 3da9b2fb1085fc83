#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "dfo/config.hpp"

namespace dfo {

/// Staged experiment runner over one output directory:
///
///   store/     features.npy, labels.npy, meta.json        (ingest)
///   split/     split.json                                 (split)
///   train/K/   model.dfom, trials.csv, result.json        (train)
///   select/M/  ranking.csv, meta.json                     (select)
///   sweep/S/   model.dfom, trials.csv, result.json        (sweep)
///   report/    report.csv, <table>.csv/.txt, confusion/   (report)
///   ledger.json
///
/// Each stage's JSON record carries a hash of the inputs that determine it
/// and is written last, after its artifacts. A record with the expected hash
/// makes the stage a no-op; a different hash raises StageError, as does a
/// missing prerequisite. Every file is written atomically.
class Pipeline {
 public:
  /// `log` may be null.
  Pipeline(ExperimentConfig config, unsigned jobs, std::ostream* log = nullptr);

  void ingest();
  void split();
  void train();
  void select();
  void sweep();
  void report();
  void run_all();

  const ExperimentConfig& config() const noexcept { return config_; }
  const std::filesystem::path& out_dir() const noexcept { return config_.output_dir; }

 private:
  struct Context;

  Context load_context(const std::string& stage) const;
  void record(const std::string& stage, double seconds, const std::vector<std::filesystem::path>& artifacts);
  void say(const std::string& line) const;

  ExperimentConfig config_;
  unsigned jobs_;
  std::ostream* log_;
};

}  // namespace dfo
