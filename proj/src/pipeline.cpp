#include "dfo/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <exception>
#include <mutex>
#include <numeric>
#include <ostream>
#include <thread>

#include "json.hpp"

#include "dfo/errors.hpp"
#include "dfo/evaluation.hpp"
#include "dfo/fs_util.hpp"
#include "dfo/pooling.hpp"
#include "dfo/random.hpp"
#include "dfo/tensor_io.hpp"

namespace dfo {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kToolVersion = "dfo 0.1.0";

std::mutex g_log_mutex;

json read_json(const fs::path& path) {
  try {
    return json::parse(read_file_text(path));
  } catch (const json::exception& e) {
    throw StageError(path.string() + " is not valid JSON: " + e.what());
  }
}

void write_json(const fs::path& path, const json& doc) { write_file_atomic(path, doc.dump(2) + "\n"); }

// True when the stage record exists with the expected hash; throws when it
// exists with another one.
bool up_to_date(const std::string& stage, const fs::path& record, const std::string& expected) {
  if (!fs::exists(record)) return false;
  const auto doc = read_json(record);
  const auto stored = doc.value("stage_hash", std::string());
  if (stored == expected) return true;
  throw StageError(stage + ": " + record.string() + " was produced by a different configuration (stored hash " +
                   stored + ", expected " + expected + "); use a fresh output directory");
}

void require(const std::string& stage, const std::string& prerequisite, const fs::path& record) {
  if (!fs::exists(record)) {
    throw StageError(stage + " requires the " + prerequisite + " stage output " + record.string() + "; run '" +
                     prerequisite + "' first");
  }
}

std::string objective_name(TuningObjective o) { return o == TuningObjective::kAccuracy ? "accuracy" : "macro_f1"; }

// Runs task(i) for i in [0, n) on up to `jobs` threads. Every task runs even
// when one fails, so completed cells persist; the first failure by index is
// rethrown afterwards.
template <typename Task>
void run_queue(std::size_t n, unsigned jobs, Task&& task) {
  std::vector<std::exception_ptr> errors(n);
  auto guarded = [&](std::size_t i) {
    try {
      task(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, jobs), n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) guarded(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) guarded(i);
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string seconds_text(double s) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", s);
  return buf;
}

json confusion_to_json(const ConfusionMatrix& cm) {
  json rows = json::array();
  for (int i = 0; i < cm.num_classes; ++i) {
    json row = json::array();
    for (int j = 0; j < cm.num_classes; ++j) row.push_back(cm.at(i, j));
    rows.push_back(row);
  }
  return rows;
}

ConfusionMatrix confusion_from_json(const json& rows) {
  ConfusionMatrix cm;
  cm.num_classes = static_cast<int>(rows.size());
  for (const auto& row : rows) {
    if (row.size() != rows.size()) throw StageError("confusion matrix in a result record is not square");
    for (const auto& v : row) cm.counts.push_back(v.get<std::size_t>());
  }
  return cm;
}

}  // namespace

struct Pipeline::Context {
  Matrix x;
  LabelVector y;
  std::vector<std::string> sample_ids;
  std::string feature_set;
  SplitIndices split;
  std::string ingest_hash;
  std::string split_hash;

  // Hash of the inputs that determine one model's tuning and fit, apart from
  // the data it sees.
  std::string model_spec(const ExperimentConfig& c, ClassifierKind kind) const {
    return StableHasher()
        .add(kind_name(kind))
        .add(c.budget)
        .add(objective_name(c.objective))
        .add(c.standardizes(kind) ? "std" : "raw")
        .hex();
  }
  std::string train_hash(const ExperimentConfig& c, ClassifierKind kind) const {
    return StableHasher().add("train").add(split_hash).add(model_spec(c, kind)).hex();
  }
  std::string select_hash(const ExperimentConfig& c, SelectorMethod m) const {
    auto h = StableHasher().add("select").add(split_hash).add(method_name(m));
    if (m == SelectorMethod::kLasso) h.add(c.standardize_lasso ? "std" : "raw");
    return h.hex();
  }
  std::string cell_hash(const ExperimentConfig& c, SelectorMethod m, double p, ClassifierKind kind) const {
    return StableHasher().add("cell").add(select_hash(c, m)).add(model_spec(c, kind)).add(format_double(p)).hex();
  }
};

namespace {

struct CellRun {
  SearchResult search;
  std::vector<std::uint8_t> model_bytes;
  ConfusionMatrix cm;
};

// Tunes on train/val and evaluates the refit best model on test. The seed
// depends on the classifier and the exact feature list only, so a subset
// covering every feature reproduces the full-feature cell.
template <typename Ctx>
CellRun run_cell(const Ctx& ctx, const ExperimentConfig& cfg, ClassifierKind kind,
                 const std::vector<std::size_t>& features, unsigned inner_jobs) {
  const Matrix x = features.size() == ctx.x.cols() ? ctx.x : apply_subset(ctx.x, features);
  Matrix xtr = take_rows(x, ctx.split.train), xva = take_rows(x, ctx.split.val), xte = take_rows(x, ctx.split.test);
  if (cfg.standardizes(kind)) {
    const auto s = standardize_fit(xtr);
    xtr = s.apply(xtr);
    xva = s.apply(xva);
    xte = s.apply(xte);
  }
  const auto ytr = take_labels(ctx.y, ctx.split.train), yva = take_labels(ctx.y, ctx.split.val),
             yte = take_labels(ctx.y, ctx.split.test);

  StableHasher subset;
  for (auto f : features) subset.add(static_cast<std::uint64_t>(f));
  const std::uint64_t seed =
      derive_seed(derive_seed(derive_seed(cfg.seed, "tune"), kind_name(kind)), subset.value());

  CellRun run;
  run.search = random_search(kind, default_search_space(kind), cfg.budget, xtr, ytr, xva, yva, seed, cfg.objective,
                             inner_jobs);
  const auto model = fit(kind, xtr, ytr, run.search.best_params, run.search.best().seed);
  run.model_bytes = serialize_model(model);
  run.cm = confusion(yte.labels, predict(model, xte), ctx.y.num_classes());
  return run;
}

json cell_record(const std::string& hash, const CellConfig& c, const CellRun& run,
                 const std::vector<std::size_t>* features) {
  json doc;
  doc["stage_hash"] = hash;
  doc["classifier"] = std::string(kind_name(c.classifier));
  doc["selector"] = c.selector;
  doc["fraction"] = c.fraction;
  doc["dimension"] = c.dimension;
  if (features) doc["features"] = *features;
  doc["best_trial"] = run.search.best_trial;
  doc["best_seed"] = run.search.best().seed;
  doc["best_params"] = json::parse(run.search.best_params.to_json());
  doc["val_score"] = run.search.best().val_score;
  doc["confusion"] = confusion_to_json(run.cm);
  return doc;
}

}  // namespace

Pipeline::Pipeline(ExperimentConfig config, unsigned jobs, std::ostream* log)
    : config_(std::move(config)), jobs_(std::max(1u, jobs)), log_(log) {}

void Pipeline::say(const std::string& line) const {
  if (!log_) return;
  std::lock_guard lock(g_log_mutex);
  *log_ << line << '\n' << std::flush;
}

void Pipeline::record(const std::string& stage, double seconds, const std::vector<fs::path>& artifacts) {
  const fs::path path = out_dir() / "ledger.json";
  json doc = json::object();
  if (fs::exists(path)) {
    try {
      doc = json::parse(read_file_text(path));
    } catch (const json::exception&) {
      doc = json::object();
    }
  }
  doc["version"] = kToolVersion;
  doc["config_hash"] = config_hash(config_);
  std::vector<std::string> rel;
  for (const auto& a : artifacts) rel.push_back(fs::relative(a, out_dir()).generic_string());
  std::sort(rel.begin(), rel.end());
  // Entries of other stages whose files have since been deleted are dropped,
  // so every artifact listed is present on disk.
  json stages = json::object();
  if (doc.contains("stages") && doc["stages"].is_object()) {
    for (const auto& [name, entry] : doc["stages"].items()) {
      bool present = name != stage && entry.contains("artifacts");
      for (const auto& a : present ? entry["artifacts"] : json::array()) {
        present = present && fs::exists(out_dir() / a.get<std::string>());
      }
      if (present) stages[name] = entry;
    }
  }
  for (const auto& a : rel) {
    if (!fs::exists(out_dir() / a)) throw StageError("stage " + stage + " did not produce " + a);
  }
  stages[stage] = {{"seconds", seconds}, {"artifacts", rel}};
  doc["stages"] = stages;
  write_json(path, doc);
}

// ---------------------------------------------------------------- ingest --

void Pipeline::ingest() {
  const auto start = std::chrono::steady_clock::now();
  const auto manifest_bytes = read_file_bytes(config_.manifest);
  const std::string hash =
      StableHasher()
          .add("ingest")
          .add(std::string_view(reinterpret_cast<const char*>(manifest_bytes.data()), manifest_bytes.size()))
          .add(config_.feature_set)
          .hex();
  const fs::path dir = out_dir() / "store";
  const std::vector<fs::path> artifacts{dir / "features.npy", dir / "labels.npy", dir / "meta.json"};
  if (up_to_date("ingest", dir / "meta.json", hash)) {
    say("[ingest] up to date");
    return;
  }

  const auto manifest = load_manifest(config_.manifest);
  auto [features, labels] = pool_dataset(manifest, jobs_);

  std::string feature_set = config_.feature_set;
  if (feature_set.empty()) {
    const auto& e = manifest.entries.front();
    feature_set = e.backbone.empty() && e.stage.empty() ? "features" : e.backbone + "/" + e.stage;
  }

  const auto& m = features.values;
  write_array_file(artifacts[0], Tensor({m.rows(), m.cols()}, std::vector<double>(m.values().begin(), m.values().end())));
  std::vector<std::int64_t> y(labels.labels.begin(), labels.labels.end());
  const std::size_t n = y.size();
  write_array_file(artifacts[1], Tensor(std::vector<std::size_t>{n}, std::move(y)));
  json meta;
  meta["stage_hash"] = hash;
  meta["feature_set"] = feature_set;
  meta["rows"] = m.rows();
  meta["feature_dim"] = m.cols();
  meta["class_names"] = labels.class_names;
  meta["sample_ids"] = features.sample_ids;
  write_json(artifacts[2], meta);

  say("[ingest] " + std::to_string(m.rows()) + " samples x " + std::to_string(m.cols()) + " features, " +
      std::to_string(labels.num_classes()) + " classes (" + feature_set + ")");
  record("ingest", seconds_since(start), artifacts);
}

// Loads the store and, when the split exists, the split; both hashes are
// checked against the current config.
Pipeline::Context Pipeline::load_context(const std::string& stage) const {
  Context ctx;
  const fs::path store = out_dir() / "store";
  require(stage, "ingest", store / "meta.json");
  const auto manifest_bytes = read_file_bytes(config_.manifest);
  const std::string ingest_hash =
      StableHasher()
          .add("ingest")
          .add(std::string_view(reinterpret_cast<const char*>(manifest_bytes.data()), manifest_bytes.size()))
          .add(config_.feature_set)
          .hex();
  up_to_date(stage, store / "meta.json", ingest_hash);
  const auto meta = read_json(store / "meta.json");
  ctx.ingest_hash = ingest_hash;
  ctx.feature_set = meta.at("feature_set").get<std::string>();
  ctx.sample_ids = meta.at("sample_ids").get<std::vector<std::string>>();
  ctx.y.class_names = meta.at("class_names").get<std::vector<std::string>>();

  const auto xt = read_array_file(store / "features.npy");
  const auto yt = read_array_file(store / "labels.npy");
  if (xt.rank() != 2 || yt.rank() != 1 || xt.shape()[0] != yt.shape()[0]) {
    throw StageError(stage + ": the feature store has inconsistent shapes; rerun ingest in a fresh directory");
  }
  ctx.x = Matrix(xt.shape()[0], xt.shape()[1], xt.to_f64());
  for (double v : yt.to_f64()) ctx.y.labels.push_back(static_cast<int>(v));

  ctx.split_hash = StableHasher()
                       .add("split")
                       .add(ingest_hash)
                       .add(config_.seed)
                       .add(format_double(config_.ratios[0]))
                       .add(format_double(config_.ratios[1]))
                       .add(format_double(config_.ratios[2]))
                       .hex();
  if (stage != "split") {
    const fs::path split_path = out_dir() / "split" / "split.json";
    require(stage, "split", split_path);
    up_to_date(stage, split_path, ctx.split_hash);
    const auto doc = read_json(split_path);
    ctx.split.train = doc.at("train").get<std::vector<std::size_t>>();
    ctx.split.val = doc.at("val").get<std::vector<std::size_t>>();
    ctx.split.test = doc.at("test").get<std::vector<std::size_t>>();
  }
  return ctx;
}

// ----------------------------------------------------------------- split --

void Pipeline::split() {
  const auto start = std::chrono::steady_clock::now();
  const auto ctx = load_context("split");
  const fs::path path = out_dir() / "split" / "split.json";
  if (up_to_date("split", path, ctx.split_hash)) {
    say("[split] up to date");
    return;
  }
  const auto s = stratified_split(ctx.y, config_.ratios, derive_seed(config_.seed, "split"));
  json doc;
  doc["stage_hash"] = ctx.split_hash;
  doc["ratios"] = config_.ratios;
  doc["train"] = s.train;
  doc["val"] = s.val;
  doc["test"] = s.test;
  write_json(path, doc);
  say("[split] train " + std::to_string(s.train.size()) + ", val " + std::to_string(s.val.size()) + ", test " +
      std::to_string(s.test.size()));
  record("split", seconds_since(start), {path});
}

// ----------------------------------------------------------------- train --

void Pipeline::train() {
  const auto start = std::chrono::steady_clock::now();
  const auto ctx = load_context("train");
  std::vector<std::size_t> all(ctx.x.cols());
  std::iota(all.begin(), all.end(), std::size_t{0});

  std::vector<ClassifierKind> pending;
  std::vector<fs::path> artifacts;
  for (auto kind : config_.classifiers) {
    const fs::path dir = out_dir() / "train" / std::string(kind_name(kind));
    artifacts.insert(artifacts.end(), {dir / "model.dfom", dir / "trials.csv", dir / "result.json"});
    if (up_to_date("train", dir / "result.json", ctx.train_hash(config_, kind))) {
      say("[train] " + std::string(kind_name(kind)) + " up to date");
    } else {
      pending.push_back(kind);
    }
  }

  const unsigned inner = std::max(1u, jobs_ / static_cast<unsigned>(std::max<std::size_t>(1, pending.size())));
  run_queue(pending.size(), jobs_, [&](std::size_t i) {
    const auto kind = pending[i];
    const auto t0 = std::chrono::steady_clock::now();
    const fs::path dir = out_dir() / "train" / std::string(kind_name(kind));
    const auto run = run_cell(ctx, config_, kind, all, inner);
    CellConfig cell{ctx.feature_set, "none", 1.0, ctx.x.cols(), kind};
    write_file_atomic(dir / "model.dfom", run.model_bytes);
    write_file_atomic(dir / "trials.csv", trials_to_csv(run.search.trials));
    write_json(dir / "result.json", cell_record(ctx.train_hash(config_, kind), cell, run, nullptr));
    say("[train] " + std::string(kind_name(kind)) + ": val " + format_percent(run.search.best().val_score) +
        "%, test " + format_percent(metrics(run.cm).accuracy) + "% (" + seconds_text(seconds_since(t0)) + " s)");
  });
  record("train", seconds_since(start), artifacts);
}

// ---------------------------------------------------------------- select --

void Pipeline::select() {
  const auto start = std::chrono::steady_clock::now();
  const auto ctx = load_context("select");
  const Matrix xtr = take_rows(ctx.x, ctx.split.train), xva = take_rows(ctx.x, ctx.split.val);
  const auto ytr = take_labels(ctx.y, ctx.split.train), yva = take_labels(ctx.y, ctx.split.val);

  std::vector<SelectorMethod> pending;
  std::vector<fs::path> artifacts;
  for (auto m : config_.selectors) {
    const fs::path dir = out_dir() / "select" / std::string(method_name(m));
    artifacts.insert(artifacts.end(), {dir / "ranking.csv", dir / "meta.json"});
    if (up_to_date("select", dir / "meta.json", ctx.select_hash(config_, m))) {
      say("[select] " + std::string(method_name(m)) + " up to date");
    } else {
      pending.push_back(m);
    }
  }

  run_queue(pending.size(), jobs_, [&](std::size_t i) {
    const auto m = pending[i];
    const fs::path dir = out_dir() / "select" / std::string(method_name(m));
    const std::uint64_t seed = derive_seed(derive_seed(config_.seed, "select"), method_name(m));
    json meta;
    meta["stage_hash"] = ctx.select_hash(config_, m);
    meta["method"] = std::string(method_name(m));
    ImportanceRanking ranking;
    if (m == SelectorMethod::kGbdt) {
      ranking = rank_by_gbdt(xtr, ytr, default_gbdt_selector_params(), seed);
    } else if (m == SelectorMethod::kRf) {
      ranking = rank_by_rf(xtr, ytr, default_rf_selector_params(), seed);
    } else {
      Matrix a = xtr, b = xva;
      if (config_.standardize_lasso) {
        const auto s = standardize_fit(xtr);
        a = s.apply(xtr);
        b = s.apply(xva);
      }
      auto sel = rank_by_lasso_validated(a, ytr, b, yva);
      meta["lambda"] = sel.lambda;
      meta["val_accuracy"] = sel.val_accuracy;
      ranking = std::move(sel.ranking);
    }
    meta["converged"] = ranking.converged;
    meta["top_features"] =
        std::vector<std::size_t>(ranking.order.begin(), ranking.order.begin() + std::min<std::size_t>(10, ranking.order.size()));
    write_file_atomic(dir / "ranking.csv", ranking_to_csv(ranking));
    write_json(dir / "meta.json", meta);
    say("[select] " + std::string(method_name(m)) + ": top feature " + std::to_string(ranking.order.front()) +
        (ranking.converged ? "" : " (solver hit max_iter)"));
  });
  record("select", seconds_since(start), artifacts);
}

// ----------------------------------------------------------------- sweep --

void Pipeline::sweep() {
  const auto start = std::chrono::steady_clock::now();
  const auto ctx = load_context("sweep");

  struct Job {
    SelectorMethod method;
    double fraction;
    ClassifierKind kind;
    std::vector<std::size_t> features;
    fs::path dir;
    std::string hash;
  };
  std::vector<Job> pending;
  std::vector<fs::path> artifacts;
  std::size_t reused = 0;
  for (auto m : config_.selectors) {
    const fs::path sel_dir = out_dir() / "select" / std::string(method_name(m));
    require("sweep", "select", sel_dir / "meta.json");
    up_to_date("sweep", sel_dir / "meta.json", ctx.select_hash(config_, m));
    const auto ranking = ranking_from_csv(read_file_text(sel_dir / "ranking.csv"));
    if (ranking.scores.size() != ctx.x.cols()) {
      throw StageError("sweep: " + (sel_dir / "ranking.csv").string() + " does not cover the stored features");
    }
    for (double p : config_.fractions) {
      const auto features = select_top_fraction(ranking, p);
      for (auto kind : config_.classifiers) {
        const CellConfig cell{ctx.feature_set, std::string(method_name(m)), p, features.size(), kind};
        const fs::path dir = out_dir() / "sweep" / cell_stem(cell);
        artifacts.insert(artifacts.end(), {dir / "model.dfom", dir / "trials.csv", dir / "result.json"});
        const auto hash = ctx.cell_hash(config_, m, p, kind);
        if (up_to_date("sweep", dir / "result.json", hash)) {
          ++reused;
        } else {
          pending.push_back({m, p, kind, features, dir, hash});
        }
      }
    }
  }
  say("[sweep] " + std::to_string(pending.size()) + " cells to run, " + std::to_string(reused) + " up to date");

  std::atomic<std::size_t> done{0};
  run_queue(pending.size(), jobs_, [&](std::size_t i) {
    const auto& job = pending[i];
    const auto run = run_cell(ctx, config_, job.kind, job.features, 1);
    const CellConfig cell{ctx.feature_set, std::string(method_name(job.method)), job.fraction, job.features.size(),
                          job.kind};
    write_file_atomic(job.dir / "model.dfom", run.model_bytes);
    write_file_atomic(job.dir / "trials.csv", trials_to_csv(run.search.trials));
    write_json(job.dir / "result.json", cell_record(job.hash, cell, run, &job.features));
    say("[sweep] " + std::to_string(++done) + "/" + std::to_string(pending.size()) + " " + cell_stem(cell) +
        ": test " + format_percent(metrics(run.cm).accuracy) + "%");
  });
  record("sweep", seconds_since(start), artifacts);
}

// ---------------------------------------------------------------- report --

void Pipeline::report() {
  const auto start = std::chrono::steady_clock::now();
  const auto ctx = load_context("report");

  std::vector<ReportCell> cells;
  StableHasher report_hash;
  report_hash.add("report").add(ctx.feature_set);
  auto add_cell = [&](const fs::path& record, const std::string& stage, const std::string& hash) {
    require("report", stage, record);
    up_to_date("report", record, hash);
    const auto doc = read_json(record);
    ReportCell cell;
    cell.config.feature_set = ctx.feature_set;
    cell.config.selector = doc.at("selector").get<std::string>();
    cell.config.fraction = doc.at("fraction").get<double>();
    cell.config.dimension = doc.at("dimension").get<std::size_t>();
    cell.config.classifier = *parse_kind(doc.at("classifier").get<std::string>());
    cell.confusion = confusion_from_json(doc.at("confusion"));
    cell.metrics = metrics(cell.confusion);
    cells.push_back(std::move(cell));
    report_hash.add(hash);
  };

  for (auto kind : config_.classifiers) {
    add_cell(out_dir() / "train" / std::string(kind_name(kind)) / "result.json", "train",
             ctx.train_hash(config_, kind));
  }
  for (auto m : config_.selectors) {
    const fs::path sel_dir = out_dir() / "select" / std::string(method_name(m));
    require("report", "select", sel_dir / "meta.json");
    const auto ranking = ranking_from_csv(read_file_text(sel_dir / "ranking.csv"));
    for (double p : config_.fractions) {
      const auto dim = subset_size(ranking.scores.size(), p);
      for (auto kind : config_.classifiers) {
        const CellConfig cell{ctx.feature_set, std::string(method_name(m)), p, dim, kind};
        add_cell(out_dir() / "sweep" / cell_stem(cell) / "result.json", "sweep", ctx.cell_hash(config_, m, p, kind));
      }
    }
  }

  const fs::path dir = out_dir() / "report";
  const auto built = build_report(cells, ctx.y.class_names);
  std::vector<fs::path> artifacts{dir / "report.csv", dir / "meta.json"};
  for (const auto& t : built.tables) {
    artifacts.push_back(dir / (t.name + ".csv"));
    artifacts.push_back(dir / (t.name + ".txt"));
  }
  for (const auto& [stem, csv] : built.confusion_csvs) artifacts.push_back(dir / "confusion" / (stem + ".csv"));

  if (fs::exists(dir / "meta.json") && read_json(dir / "meta.json").value("stage_hash", "") == report_hash.hex()) {
    say("[report] up to date");
    return;
  }
  // The report is a pure function of the cell records, so a stale one is
  // simply replaced rather than treated as a conflict.
  write_file_atomic(dir / "report.csv", built.report_csv);
  for (const auto& t : built.tables) {
    write_file_atomic(dir / (t.name + ".csv"), t.csv);
    write_file_atomic(dir / (t.name + ".txt"), t.text);
  }
  for (const auto& [stem, csv] : built.confusion_csvs) write_file_atomic(dir / "confusion" / (stem + ".csv"), csv);
  write_json(dir / "meta.json", {{"stage_hash", report_hash.hex()}, {"cells", cells.size()}});
  for (const auto& t : built.tables) say(t.text);
  say("[report] " + std::to_string(cells.size()) + " cells -> " + (dir / "report.csv").string());
  record("report", seconds_since(start), artifacts);
}

void Pipeline::run_all() {
  ingest();
  split();
  train();
  select();
  sweep();
  report();
}

}  // namespace dfo
