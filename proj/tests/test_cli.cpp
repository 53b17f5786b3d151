#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <doctest.h>

#include "elastika/cli.hpp"
#include "elastika/common.hpp"
#include "elastika/version.hpp"

using namespace elastika;

namespace {

std::filesystem::path source_dir() {
  const char* dir = std::getenv("ELASTIKA_SOURCE_DIR");
  return dir != nullptr ? std::filesystem::path(dir) : std::filesystem::path(".");
}

std::filesystem::path bundled_data() { return source_dir() / "data"; }

/// Unique scratch directory, removed on destruction.
struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag) {
    path = std::filesystem::temp_directory_path() /
           (tag + "-" + std::to_string(splitmix64(reinterpret_cast<std::uintptr_t>(this))));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
};

RunRecord make_record(const std::string& dataset, const std::string& classifier, double acc,
                      std::uint64_t seed = 1) {
  RunRecord r;
  r.dataset = dataset;
  r.classifier = classifier;
  r.model_json = "{\"kind\":\"test\"}";
  r.test_accuracy = acc;
  r.train_seconds = 0.5;
  r.test_seconds = 0.25;
  r.seed = seed;
  r.version = kVersion;
  return r;
}

int spawn_cli(const std::string& args) {
  const char* cli = std::getenv("ELASTIKA_CLI");
  REQUIRE(cli != nullptr);
  const int status = std::system((std::string(cli) + " " + args).c_str());
  REQUIRE(status != -1);
  return WEXITSTATUS(status);
}

} // namespace

TEST_CASE("classifier ids round-trip through parse and render") {
  const std::vector<std::string> canonical = {
      "dtw+a",     "dtw+b",   "dtw+c",    "adtw+a",   "dtw^1",      "dtw^2",
      "dtw^0.5",   "adtw^2",  "dtw+a_500", "adtw+c_7", "dtw^1_500",  "adtw^1.5_250",
      "dtwf+a",    "dtwf^2",  "pf",        "pf+"};
  for (const std::string& id : canonical) {
    CAPTURE(id);
    CHECK(classifier_id(parse_classifier_id(id)) == id);
  }

  // Non-canonical spellings normalize: the default budget is omitted and
  // gamma renders shortest.
  CHECK(classifier_id(parse_classifier_id("dtw+a_100")) == "dtw+a");
  CHECK(classifier_id(parse_classifier_id("dtw^1.0")) == "dtw^1");
  CHECK(classifier_id(parse_classifier_id("dtw^2.50")) == "dtw^2.5");

  const ClassifierSpec plus = parse_classifier_id("pf+");
  CHECK(plus.kind == ClassifierSpec::Kind::Forest);
  CHECK(plus.plus_mode);
  const ClassifierSpec legacy = parse_classifier_id("pf");
  CHECK_FALSE(legacy.plus_mode);

  const ClassifierSpec full = parse_classifier_id("dtwf+a");
  CHECK(full.full_window);
  CHECK(full.distance == TunedKind::Dtw);

  const ClassifierSpec fixed = parse_classifier_id("adtw^1.5_250");
  CHECK(fixed.distance == TunedKind::Adtw);
  CHECK(fixed.fixed_gamma);
  CHECK(fixed.gamma == 1.5);
  CHECK(fixed.per_gamma == 250);
}

TEST_CASE("malformed classifier ids are usage errors") {
  const std::vector<std::string> bad = {
      "",        "x",        "dtw",      "adtw",     "dtwf",    "dtw^",    "dtw+",
      "dtw^0",   "dtw^-1",   "dtw^abc",  "dtw^1x",   "dtw+d",   "dtw+aa",  "dtw+a_",
      "dtw+a_0", "dtw+a_-5", "dtw+a_x",  "dtwf+a_50", "pf_10",  "pf++",    "dtw^1^2"};
  for (const std::string& id : bad) {
    CAPTURE(id);
    CHECK_THROWS_AS((void)parse_classifier_id(id), UsageError);
  }
  // Rendering a custom set has no id to render to.
  ClassifierSpec spec;
  spec.set_name = ExponentSetName::Custom;
  CHECK_THROWS_AS((void)classifier_id(spec), UsageError);
}

TEST_CASE("run records survive the JSON-lines store") {
  TempDir tmp("elastika-records");
  const std::filesystem::path store = tmp.path / "runs.jsonl";

  const RunRecord a = make_record("HeadTail", "dtw+a", 0.95);
  const RunRecord b = make_record("StepLevels", "pf+", 1.0, 7);
  append_records(store, {a});
  append_records(store, {b});

  const std::vector<RunRecord> loaded = load_records(store, false);
  REQUIRE(loaded.size() == 2);
  CHECK(loaded[0].dataset == "HeadTail");
  CHECK(loaded[0].classifier == "dtw+a");
  CHECK(loaded[0].test_accuracy == 0.95);
  CHECK(loaded[0].train_seconds == 0.5);
  CHECK(loaded[0].seed == 1);
  CHECK(loaded[0].version == kVersion);
  CHECK(loaded[1].seed == 7);

  // Lossless: re-serialization is byte-identical.
  CHECK(record_to_json(loaded[0]) == record_to_json(a));
  CHECK(record_to_json(loaded[1]) == record_to_json(b));

  // Blank lines are skipped.
  {
    std::ofstream out(store, std::ios::app);
    out << "\n  \n";
  }
  CHECK(load_records(store, false).size() == 2);

  // Missing files: empty store when resuming, an error when reporting.
  CHECK(load_records(tmp.path / "absent.jsonl", true).empty());
  CHECK_THROWS_AS((void)load_records(tmp.path / "absent.jsonl", false), IoError);
}

TEST_CASE("invalid records are rejected on both paths") {
  RunRecord bad = make_record("D", "dtw+a", 1.5);
  CHECK_THROWS_AS((void)record_to_json(bad), InternalError);
  bad.test_accuracy = 0.5;
  bad.train_seconds = -1.0;
  CHECK_THROWS_AS((void)record_to_json(bad), InternalError);

  CHECK_THROWS_AS((void)record_from_json("not json"), ParseError);
  CHECK_THROWS_AS((void)record_from_json("{}"), ParseError);
  const std::string good = record_to_json(make_record("D", "dtw+a", 0.5));
  std::string tampered = good;
  const std::size_t at = tampered.find("0.5");
  tampered.replace(at, 3, "1.7");
  CHECK_THROWS_AS((void)record_from_json(tampered), ParseError);

  TempDir tmp("elastika-badstore");
  const std::filesystem::path store = tmp.path / "runs.jsonl";
  {
    std::ofstream out(store);
    out << good << '\n' << "garbage\n";
  }
  CHECK_THROWS_WITH_AS((void)load_records(store, false),
                       doctest::Contains(":2:"), ParseError);
}

TEST_CASE("run_classifier honors the id naming contract on bundled data") {
  RunOptions options;
  options.data_dir = bundled_data();
  options.seed = 1;

  const RunRecord plain = run_classifier("StepLevels", parse_classifier_id("dtw+a"), options);
  CHECK(plain.classifier == "dtw+a");
  CHECK(plain.dataset == "StepLevels");
  CHECK(plain.test_accuracy == 1.0); // well-separated constants
  CHECK(plain.train_seconds >= 0.0);
  CHECK(plain.test_seconds >= 0.0);
  CHECK(plain.version == kVersion);
  const TrainedModel model = model_from_json(plain.model_json);
  CHECK(model.kind == TunedKind::Dtw);

  const RunRecord fixed = run_classifier("StepLevels", parse_classifier_id("dtw^1_500"), options);
  CHECK(fixed.classifier == "dtw^1_500");
  const TrainedModel fixed_model = model_from_json(fixed.model_json);
  CHECK(fixed_model.gamma == 1.0);

  options.pf_trees = 5;
  const RunRecord forest = run_classifier("StepLevels", parse_classifier_id("pf+"), options);
  CHECK(forest.classifier == "pf+");
  CHECK(forest.test_accuracy == 1.0);
  CHECK(forest.model_json.find("\"num_trees\":5") != std::string::npos);
}

TEST_CASE("sweeps resume instead of recomputing") {
  TempDir tmp("elastika-sweep");
  SweepOptions options;
  options.run.data_dir = bundled_data();
  options.run.seed = 11;
  options.run.pf_trees = 5;
  options.datasets = {"StepLevels", "WarpShift"};
  options.classifiers = {"dtw^2", "pf"};
  options.out = tmp.path / "runs.jsonl";

  const SweepOutcome first = cmd_sweep(options);
  CHECK(first.completed == 4);
  CHECK(first.skipped == 0);
  CHECK(first.failed == 0);

  // Idempotent: the rerun appends nothing.
  const SweepOutcome again = cmd_sweep(options);
  CHECK(again.completed == 0);
  CHECK(again.skipped == 4);
  const std::vector<RunRecord> records = load_records(options.out, false);
  CHECK(records.size() == 4);

  // Remove one record; only that triple is recomputed, identically.
  std::vector<RunRecord> pruned = records;
  const RunRecord removed = pruned[1];
  pruned.erase(pruned.begin() + 1);
  std::filesystem::remove(options.out);
  append_records(options.out, pruned);
  const SweepOutcome repair = cmd_sweep(options);
  CHECK(repair.completed == 1);
  CHECK(repair.skipped == 3);
  const std::vector<RunRecord> repaired = load_records(options.out, false);
  REQUIRE(repaired.size() == 4);
  // The recomputed record lands at the end and matches the original run
  // in everything but wall-clock timings.
  CHECK(repaired.back().dataset == removed.dataset);
  CHECK(repaired.back().classifier == removed.classifier);
  CHECK(repaired.back().seed == removed.seed);
  CHECK(repaired.back().test_accuracy == removed.test_accuracy);
  CHECK(repaired.back().model_json == removed.model_json);

  // A different seed is a different triple.
  options.run.seed = 12;
  const SweepOutcome reseeded = cmd_sweep(options);
  CHECK(reseeded.completed == 4);
  CHECK(load_records(options.out, false).size() == 8);
}

TEST_CASE("sweep continues past failing datasets and logs them") {
  TempDir tmp("elastika-sweepfail");
  // A dataset that fails the gate: one class appears only once.
  const std::filesystem::path dir = tmp.path / "data" / "Lonely";
  std::filesystem::create_directories(dir);
  {
    std::ofstream train(dir / "Lonely_TRAIN.tsv");
    train << "1\t0.0\t0.1\t0.2\n1\t0.1\t0.2\t0.1\n2\t5.0\t5.1\t5.2\n";
    std::ofstream test(dir / "Lonely_TEST.tsv");
    test << "1\t0.0\t0.1\t0.3\n";
  }
  // And a healthy copy of StepLevels alongside it.
  for (const std::string& split : {"TRAIN", "TEST"}) {
    const auto src = bundled_data() / "StepLevels" / ("StepLevels_" + split + ".tsv");
    const auto dst_dir = tmp.path / "data" / "StepLevels";
    std::filesystem::create_directories(dst_dir);
    std::filesystem::copy_file(src, dst_dir / ("StepLevels_" + split + ".tsv"));
  }

  SweepOptions options;
  options.run.data_dir = tmp.path / "data";
  options.run.seed = 3;
  options.datasets = {"Lonely", "StepLevels", "Absent"};
  options.classifiers = {"dtw^2"};
  options.out = tmp.path / "runs.jsonl";

  const SweepOutcome outcome = cmd_sweep(options);
  CHECK(outcome.completed == 1);
  CHECK(outcome.failed == 2);

  const std::vector<RunRecord> records = load_records(options.out, false);
  REQUIRE(records.size() == 1);
  CHECK(records[0].dataset == "StepLevels");

  // The manifest names both failures with their exit codes.
  std::ifstream manifest(tmp.path / "runs.jsonl.failures");
  REQUIRE(manifest.good());
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(manifest, line)) { lines.push_back(line); }
  REQUIRE(lines.size() == 2);
  CHECK(lines[0].find("\"Lonely\"") != std::string::npos);
  CHECK(lines[0].find("\"exit_code\":3") != std::string::npos);
  CHECK(lines[1].find("\"Absent\"") != std::string::npos);
  CHECK(lines[1].find("\"exit_code\":4") != std::string::npos);

  // Failures are retried on the next run (they never enter the store).
  const SweepOutcome again = cmd_sweep(options);
  CHECK(again.skipped == 1);
  CHECK(again.failed == 2);
}

TEST_CASE("sweep rejects empty plans up front") {
  SweepOptions options;
  options.out = "/tmp/unused.jsonl";
  options.classifiers = {"dtw+a"};
  CHECK_THROWS_AS((void)cmd_sweep(options), UsageError);
  options.datasets = {"StepLevels"};
  options.classifiers = {};
  CHECK_THROWS_AS((void)cmd_sweep(options), UsageError);
  options.classifiers = {"dtw+a"};
  options.out = "";
  CHECK_THROWS_AS((void)cmd_sweep(options), UsageError);
  // Bad ids fail before any dataset is touched.
  options.out = "/tmp/unused.jsonl";
  options.classifiers = {"dtw+a", "broken^id^"};
  CHECK_THROWS_AS((void)cmd_sweep(options), UsageError);
}

TEST_CASE("dataset lists ignore blanks and comments") {
  TempDir tmp("elastika-list");
  const std::filesystem::path file = tmp.path / "list.txt";
  {
    std::ofstream out(file);
    out << "HeadTail\n\n# a comment\n  StepLevels  \r\n\t\nWarpShift\n";
  }
  const std::vector<std::string> names = read_dataset_list(file);
  REQUIRE(names.size() == 3);
  CHECK(names[0] == "HeadTail");
  CHECK(names[1] == "StepLevels");
  CHECK(names[2] == "WarpShift");
  CHECK_THROWS_AS((void)read_dataset_list(tmp.path / "absent.txt"), IoError);
}

TEST_CASE("zero noise reproduces the clean sweep bit for bit") {
  TempDir tmp("elastika-noise");
  SweepOptions clean;
  clean.run.data_dir = bundled_data();
  clean.run.seed = 5;
  clean.run.pf_trees = 5;
  clean.datasets = {"StepLevels", "HeadTail"};
  clean.classifiers = {"dtw^2", "pf"};
  clean.out = tmp.path / "clean.jsonl";
  cmd_sweep(clean);

  NoiseOptions noise;
  noise.sweep = clean;
  noise.sweep.out = tmp.path / "noise0.jsonl";
  noise.scale = 0.0;
  noise.work_dir = tmp.path / "copies";
  const SweepOutcome outcome = cmd_noise(noise);
  CHECK(outcome.completed == 4);

  const std::vector<RunRecord> a = load_records(clean.out, false);
  const std::vector<RunRecord> b = load_records(noise.sweep.out, false);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CAPTURE(a[i].dataset);
    CHECK(a[i].classifier == b[i].classifier);
    CHECK(a[i].test_accuracy == b[i].test_accuracy);
    CHECK(a[i].model_json == b[i].model_json);
  }

  // The materialized copies carry the original values.
  const auto [orig_train, orig_test] = load_dataset_dir(bundled_data(), "StepLevels");
  const auto [copy_train, copy_test] = load_dataset_dir(noise.work_dir, "StepLevels");
  REQUIRE(orig_train.size() == copy_train.size());
  for (std::size_t i = 0; i < orig_train.size(); ++i) {
    CHECK(orig_train[i].values == copy_train[i].values);
  }
  REQUIRE(orig_test.size() == copy_test.size());
  for (std::size_t i = 0; i < orig_test.size(); ++i) {
    CHECK(orig_test[i].values == copy_test[i].values);
  }
}

TEST_CASE("noise runs are seed-deterministic and split-scoped") {
  TempDir tmp("elastika-noise2");
  NoiseOptions noise;
  noise.sweep.run.data_dir = bundled_data();
  noise.sweep.run.seed = 9;
  noise.sweep.datasets = {"StepLevels"};
  noise.sweep.classifiers = {"dtw^2"};
  noise.sweep.out = tmp.path / "a.jsonl";
  noise.scale = 1.0;
  noise.work_dir = tmp.path / "a-copies";
  cmd_noise(noise);

  NoiseOptions rerun = noise;
  rerun.sweep.out = tmp.path / "b.jsonl";
  rerun.work_dir = tmp.path / "b-copies";
  cmd_noise(rerun);

  const std::vector<RunRecord> a = load_records(noise.sweep.out, false);
  const std::vector<RunRecord> b = load_records(rerun.sweep.out, false);
  REQUIRE(a.size() == 1);
  REQUIRE(b.size() == 1);
  CHECK(a[0].test_accuracy == b[0].test_accuracy);
  const auto [train_a, test_a] = load_dataset_dir(noise.work_dir, "StepLevels");
  const auto [train_b, test_b] = load_dataset_dir(rerun.work_dir, "StepLevels");
  for (std::size_t i = 0; i < train_a.size(); ++i) {
    CHECK(train_a[i].values == train_b[i].values);
  }

  // split=train leaves the test file untouched (and vice versa).
  NoiseOptions train_only = noise;
  train_only.sweep.out = tmp.path / "c.jsonl";
  train_only.work_dir = tmp.path / "c-copies";
  train_only.split = "train";
  cmd_noise(train_only);
  const auto [train_c, test_c] = load_dataset_dir(train_only.work_dir, "StepLevels");
  const auto [orig_train, orig_test] = load_dataset_dir(bundled_data(), "StepLevels");
  bool train_changed = false;
  for (std::size_t i = 0; i < train_c.size(); ++i) {
    if (train_c[i].values != orig_train[i].values) { train_changed = true; }
  }
  CHECK(train_changed);
  for (std::size_t i = 0; i < test_c.size(); ++i) {
    CHECK(test_c[i].values == orig_test[i].values);
  }
  // The train stream is shared across split modes: same noisy train split.
  for (std::size_t i = 0; i < train_c.size(); ++i) {
    CHECK(train_c[i].values == train_a[i].values);
  }

  NoiseOptions bad = noise;
  bad.split = "everything";
  CHECK_THROWS_AS((void)cmd_noise(bad), UsageError);
  bad = noise;
  bad.scale = -0.5;
  CHECK_THROWS_AS((void)cmd_noise(bad), UsageError);
}

TEST_CASE("scatter reports join on dataset and average over seeds") {
  TempDir tmp("elastika-scatter");
  const std::filesystem::path store = tmp.path / "runs.jsonl";
  append_records(store, {
      make_record("D1", "dtw+a", 0.8, 1), make_record("D1", "dtw+a", 0.6, 2), // mean 0.7
      make_record("D1", "adtw+a", 0.7, 1),
      make_record("D2", "dtw+a", 0.5, 1), make_record("D2", "adtw+a", 0.9, 1),
      make_record("D3", "dtw+a", 0.4, 1), // missing for adtw+a: dropped from the join
  });

  ReportOptions options;
  options.records = {store};
  options.classifiers = {"dtw+a", "adtw+a"};
  const ScatterReport report = cmd_report_scatter(options);
  REQUIRE(report.pairs.size() == 2);
  CHECK(report.pairs[0].dataset == "D1");
  CHECK(report.pairs[0].acc_a == 0.7);
  CHECK(report.pairs[0].acc_b == 0.7);
  CHECK(report.pairs[1].dataset == "D2");
  CHECK(report.wtl.ties == 1);
  CHECK(report.wtl.wins_b == 1);

  // Identical records for both ids: every point on the diagonal, p = 1.
  const std::filesystem::path same = tmp.path / "same.jsonl";
  append_records(same, {
      make_record("D1", "dtw+a", 0.8), make_record("D1", "adtw+a", 0.8),
      make_record("D2", "dtw+a", 0.6), make_record("D2", "adtw+a", 0.6),
  });
  ReportOptions identical;
  identical.records = {same};
  identical.classifiers = {"dtw+a", "adtw+a"};
  identical.out = tmp.path / "artifact";
  const ScatterReport flat = cmd_report_scatter(identical);
  for (const PairedRow& row : flat.pairs) { CHECK(row.acc_a == row.acc_b); }
  CHECK(flat.wilcoxon.p_value == 1.0);
  CHECK(flat.wilcoxon.n_effective == 0);
  CHECK(flat.wtl.ties == 2);
  CHECK(std::filesystem::exists(tmp.path / "artifact.csv"));
  CHECK(std::filesystem::exists(tmp.path / "artifact.svg"));

  // Ids are canonicalized before matching records.
  ReportOptions spelled = options;
  spelled.classifiers = {"dtw+a_100", "adtw+a"};
  CHECK(cmd_report_scatter(spelled).pairs.size() == 2);

  ReportOptions wrong = options;
  wrong.classifiers = {"dtw+a"};
  CHECK_THROWS_AS((void)cmd_report_scatter(wrong), UsageError);
  wrong.classifiers = {"dtw+a", "dtw+a"};
  CHECK_THROWS_AS((void)cmd_report_scatter(wrong), UsageError);
  wrong.classifiers = {"dtw+a", "pf"};
  CHECK_THROWS_AS((void)cmd_report_scatter(wrong), UsageError); // no pf records
  ReportOptions missing = options;
  missing.records = {tmp.path / "absent.jsonl"};
  missing.classifiers = {"dtw+a", "adtw+a"};
  CHECK_THROWS_AS((void)cmd_report_scatter(missing), IoError);
}

TEST_CASE("cd reports demand identical dataset coverage") {
  TempDir tmp("elastika-cd");
  const std::filesystem::path store = tmp.path / "runs.jsonl";
  std::vector<RunRecord> records;
  const std::vector<std::string> ids = {"dtw+a", "adtw+a", "pf+"};
  const std::vector<std::string> datasets = {"D1", "D2", "D3", "D4"};
  double acc = 0.5;
  for (const std::string& dataset : datasets) {
    for (const std::string& id : ids) {
      records.push_back(make_record(dataset, id, acc));
      acc = acc < 0.9 ? acc + 0.05 : 0.5;
    }
  }
  append_records(store, records);

  ReportOptions options;
  options.records = {store};
  options.classifiers = ids;
  options.out = tmp.path / "cd";
  const CdReport report = cmd_report_cd(options);
  CHECK(report.dataset_count == 4);
  REQUIRE(report.table.classifiers.size() == 3);
  // Per-dataset ranks sum to k(k+1)/2, so mean ranks sum to it too.
  const double rank_sum =
      report.table.mean_rank[0] + report.table.mean_rank[1] + report.table.mean_rank[2];
  CHECK(rank_sum == doctest::Approx(6.0).epsilon(1e-12));
  CHECK(std::filesystem::exists(tmp.path / "cd.csv"));
  CHECK(std::filesystem::exists(tmp.path / "cd.svg"));

  // Remove one dataset's records for one id: coverage differs, usage error.
  append_records(tmp.path / "partial.jsonl", {
      make_record("D1", "dtw+a", 0.5), make_record("D2", "dtw+a", 0.6),
      make_record("D1", "adtw+a", 0.7),
  });
  ReportOptions mixed;
  mixed.records = {tmp.path / "partial.jsonl"};
  mixed.classifiers = {"dtw+a", "adtw+a"};
  CHECK_THROWS_WITH_AS((void)cmd_report_cd(mixed), doctest::Contains("different dataset sets"),
                       UsageError);

  ReportOptions dupes = options;
  dupes.classifiers = {"dtw+a", "dtw+a"};
  CHECK_THROWS_AS((void)cmd_report_cd(dupes), UsageError);
  ReportOptions single = options;
  single.classifiers = {"dtw+a"};
  CHECK_THROWS_AS((void)cmd_report_cd(single), UsageError);
}

TEST_CASE("pf command dumps a forest that predicts identically when reloaded") {
  TempDir tmp("elastika-pfcmd");
  PfOptions options;
  options.run.data_dir = bundled_data();
  options.run.seed = 21;
  options.run.pf_trees = 7;
  options.dataset = "WarpShift";
  options.plus_mode = true;
  options.out = tmp.path / "runs.jsonl";
  options.forest_out = tmp.path / "forest.json";

  const RunRecord record = cmd_pf(options);
  CHECK(record.classifier == "pf+");
  CHECK(record.test_accuracy >= 0.5);
  CHECK(load_records(options.out, false).size() == 1);

  const std::vector<int> predicted = cmd_pf_predict(
      options.forest_out, bundled_data(), "WarpShift",
      bundled_data() / "WarpShift" / "WarpShift_TEST.tsv");
  const auto [train, test] = load_dataset_dir(bundled_data(), "WarpShift");
  std::ifstream in(options.forest_out);
  std::string json((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const ProximityForest forest = pf_from_json(json);
  const std::vector<int> direct = pf_predict_all(forest, train, test);
  CHECK(predicted == direct);

  std::size_t agree = 0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    if (predicted[i] == test[i].label) { ++agree; }
  }
  CHECK(static_cast<double>(agree) / static_cast<double>(test.size()) == record.test_accuracy);

  CHECK_THROWS_AS((void)cmd_pf_predict(tmp.path / "absent.json", bundled_data(), "WarpShift",
                                       bundled_data() / "WarpShift" / "WarpShift_TEST.tsv"),
                  IoError);
}

TEST_CASE("kernel benchmark returns sane measurements") {
  const BenchResult result = cmd_bench(4096, 2);
  CHECK(!result.backend.empty());
  CHECK(result.elements == 4096);
  CHECK(result.seconds_pow > 0.0);
  CHECK(result.speedup_sqrt > 0.0);
  CHECK(result.speedup_abs > 0.0);
  CHECK(result.speedup_square > 0.0);
  CHECK_THROWS_AS((void)cmd_bench(0, 1), UsageError);
  CHECK_THROWS_AS((void)cmd_bench(16, 0), UsageError);
}

TEST_CASE("the installed binary maps errors to the documented exit codes") {
  if (std::getenv("ELASTIKA_CLI") == nullptr) {
    MESSAGE("ELASTIKA_CLI not set; skipping subprocess checks");
    return;
  }
  TempDir tmp("elastika-exit");
  const std::string data = (source_dir() / "data").string();

  CHECK(spawn_cli("--help > /dev/null 2>&1") == 0);
  CHECK(spawn_cli("--version > /dev/null 2>&1") == 0);
  CHECK(spawn_cli("definitely-not-a-command > /dev/null 2>&1") == 2);
  CHECK(spawn_cli("tune --data-dir " + data + " --dataset StepLevels --set q --seed 1 --out " +
                  (tmp.path / "r.jsonl").string() + " > /dev/null 2>&1") == 2);
  CHECK(spawn_cli("tune --data-dir " + data + " --dataset Absent --set a --seed 1 --out " +
                  (tmp.path / "r.jsonl").string() + " > /dev/null 2>&1") == 4);

  // Gate failure: singleton class.
  const std::filesystem::path dir = tmp.path / "data" / "Lonely";
  std::filesystem::create_directories(dir);
  {
    std::ofstream train(dir / "Lonely_TRAIN.tsv");
    train << "1\t0.0\t0.1\t0.2\n2\t5.0\t5.1\t5.2\n2\t5.0\t5.2\t5.3\n";
    std::ofstream test(dir / "Lonely_TEST.tsv");
    test << "1\t0.0\t0.1\t0.3\n";
  }
  CHECK(spawn_cli("tune --data-dir " + (tmp.path / "data").string() +
                  " --dataset Lonely --set a --seed 1 --out " + (tmp.path / "r.jsonl").string() +
                  " > /dev/null 2>&1") == 3);

  // A successful tune writes the record it reports.
  CHECK(spawn_cli("tune --data-dir " + data + " --dataset StepLevels --set a --seed 1 --out " +
                  (tmp.path / "ok.jsonl").string() + " > /dev/null 2>&1") == 0);
  const std::vector<RunRecord> written = load_records(tmp.path / "ok.jsonl", false);
  REQUIRE(written.size() == 1);
  CHECK(written[0].classifier == "dtw+a");

  // Config file supplies flags; explicit flags override it.
  {
    std::ofstream config(tmp.path / "config.json");
    config << "{\"data-dir\": \"" << data << "\", \"dataset\": \"StepLevels\", "
           << "\"set\": \"a\", \"seed\": 5}";
  }
  CHECK(spawn_cli("tune --config " + (tmp.path / "config.json").string() + " --seed 6 --out " +
                  (tmp.path / "cfg.jsonl").string() + " > /dev/null 2>&1") == 0);
  const std::vector<RunRecord> viaconfig = load_records(tmp.path / "cfg.jsonl", false);
  REQUIRE(viaconfig.size() == 1);
  CHECK(viaconfig[0].seed == 6);
}
