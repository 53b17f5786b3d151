#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "elastika/pf.hpp"
#include "elastika/stats.hpp"
#include "elastika/tuning.hpp"

namespace elastika {

/// One finished experiment: a classifier evaluated on one dataset split.
/// Records are stored as JSON lines, one object per line, append-only.
struct RunRecord {
  std::string dataset;
  std::string classifier;
  std::string model_json; // TrainedModel or forest-config JSON object
  double test_accuracy = 0.0;
  double train_seconds = 0.0;
  double test_seconds = 0.0;
  std::uint64_t seed = 0;
  std::string version;
};

[[nodiscard]] std::string record_to_json(const RunRecord& record);
[[nodiscard]] RunRecord record_from_json(const std::string& line);

/// Loads a JSON-lines record file, skipping blank lines. A missing file is
/// an empty store when `missing_ok` (the resume case) and an IoError
/// otherwise (the report-input case).
[[nodiscard]] std::vector<RunRecord> load_records(const std::filesystem::path& path,
                                                  bool missing_ok);
void append_records(const std::filesystem::path& path, const std::vector<RunRecord>& records);

/// A parsed classifier id. The grammar is
///   <distance>(^<gamma>|+<set>)(_<per_gamma>)?   for tuned classifiers
///   pf | pf+                                     for proximity forests
/// where <distance> is dtw, dtwf (full-window dtw) or adtw, <gamma> is a
/// positive real, <set> one of a/b/c, and <per_gamma> a positive per-gamma
/// search budget (default 100, omitted from canonical ids; dtwf searches
/// no window so it takes no budget suffix).
struct ClassifierSpec {
  enum class Kind { Tuned, Forest };
  Kind kind = Kind::Tuned;
  TunedKind distance = TunedKind::Dtw;
  bool full_window = false;
  bool fixed_gamma = false;
  double gamma = 1.0;
  ExponentSetName set_name = ExponentSetName::A;
  std::size_t per_gamma = 100;
  bool plus_mode = false; // forests
};

[[nodiscard]] ClassifierSpec parse_classifier_id(const std::string& id);
[[nodiscard]] std::string classifier_id(const ClassifierSpec& spec);

/// Shared experiment knobs a sweep applies to every classifier it runs.
struct RunOptions {
  std::filesystem::path data_dir;
  std::uint64_t seed = 0;
  std::size_t pf_trees = 100;
  std::size_t pf_candidates = 5;
};

/// Trains and evaluates one classifier on one dataset; pure apart from
/// reading the dataset directory.
[[nodiscard]] RunRecord run_classifier(const std::string& dataset, const ClassifierSpec& spec,
                                       const RunOptions& options);

struct SweepOptions {
  RunOptions run;
  std::vector<std::string> datasets;
  std::vector<std::string> classifiers; // ids
  std::filesystem::path out;            // JSON-lines record store
  std::filesystem::path failures;       // manifest; defaults to out + ".failures"
};

struct SweepOutcome {
  std::size_t completed = 0; // new records appended
  std::size_t skipped = 0;   // (dataset, classifier, seed) already present
  std::size_t failed = 0;    // recorded in the failure manifest
};

/// Runs every (dataset, classifier) pair, appending records as they
/// finish. Pairs already in the store are skipped, so a finished sweep
/// rerun with the same arguments appends nothing. Dataset failures are
/// appended to the failure manifest and do not stop the sweep.
SweepOutcome cmd_sweep(const SweepOptions& options);

/// Reads a dataset-list file: one name per line, blank lines and
/// #-comments ignored.
[[nodiscard]] std::vector<std::string> read_dataset_list(const std::filesystem::path& file);

struct NoiseOptions {
  SweepOptions sweep;
  double scale = 0.0;
  std::string split = "both"; // both | train | test
  std::filesystem::path work_dir; // where noisy copies are written
};

/// Materializes noisy copies of the datasets (independent per-split seeds
/// derived from the sweep seed) under work_dir, then delegates to
/// cmd_sweep over the copies.
SweepOutcome cmd_noise(const NoiseOptions& options);

/// Trains a proximity forest, evaluates it, appends a record, and
/// optionally writes the forest JSON next to it.
struct PfOptions {
  RunOptions run;
  std::string dataset;
  bool plus_mode = false;
  std::filesystem::path out;        // record store
  std::filesystem::path forest_out; // empty = do not dump the forest
};
RunRecord cmd_pf(const PfOptions& options);

/// Reloads a serialized forest plus its training data and labels every
/// series in the query file.
[[nodiscard]] std::vector<int> cmd_pf_predict(const std::filesystem::path& forest_file,
                                              const std::filesystem::path& data_dir,
                                              const std::string& dataset,
                                              const std::filesystem::path& query_file);

struct ReportOptions {
  std::vector<std::filesystem::path> records; // one or more stores
  std::vector<std::string> classifiers;       // ids to compare
  std::filesystem::path out;                  // artifact base path
  double alpha = 0.05;
};

struct ScatterReport {
  PairedAccuracies pairs;
  WilcoxonResult wilcoxon;
  WinTieLoss wtl;
};

/// Joins two classifiers' records per dataset (accuracies averaged over
/// seeds) and emits the scatter CSV/SVG. Exactly two classifier ids.
ScatterReport cmd_report_scatter(const ReportOptions& options);

struct CdReport {
  RankTable table;
  std::vector<std::vector<std::size_t>> groups;
  std::size_t dataset_count = 0;
};

/// Builds the accuracy matrix for k >= 2 classifiers; every classifier
/// must cover exactly the same datasets (mixed sets are a usage error).
/// Emits the CD CSV/SVG.
CdReport cmd_report_cd(const ReportOptions& options);

struct BenchResult {
  std::string backend;
  std::size_t elements = 0;
  double seconds_pow = 0.0;
  // Fast-path speedups over the general-pow kernel at the same gamma.
  double speedup_sqrt = 0.0;
  double speedup_abs = 0.0;
  double speedup_square = 0.0;
};

/// Times the pointwise-cost kernels: each specialized path against the
/// general pow route evaluating the same exponent.
[[nodiscard]] BenchResult cmd_bench(std::size_t elements, std::size_t reps);

} // namespace elastika
