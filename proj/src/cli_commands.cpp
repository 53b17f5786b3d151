#include "elastika/cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string_view>
#include <tuple>

#include <json.hpp>

#include "elastika/common.hpp"
#include "elastika/cost_kernels.hpp"
#include "elastika/version.hpp"

namespace elastika {

namespace {

std::string render_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double seconds_between(std::chrono::steady_clock::time_point a,
                       std::chrono::steady_clock::time_point b) {
  return std::chrono::duration<double>(b - a).count();
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (const unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string slurp_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) { throw IoError("cannot open '" + path.string() + "'"); }
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) { throw IoError("failed while reading '" + path.string() + "'"); }
  return buf.str();
}

nlohmann::json pf_config_json(const PFConfig& config) {
  nlohmann::json model;
  model["type"] = "pf";
  model["num_trees"] = config.num_trees;
  model["candidates_per_node"] = config.candidates_per_node;
  model["plus_mode"] = config.plus_mode;
  nlohmann::json set;
  set["label"] = exponent_set_label(config.exponent_set.name);
  nlohmann::json gammas = nlohmann::json::array();
  for (const CostExponent& g : config.exponent_set.exponents) { gammas.push_back(g.gamma); }
  set["gammas"] = std::move(gammas);
  model["exponent_set"] = std::move(set);
  return model;
}

struct PfRun {
  ProximityForest forest;
  double accuracy = 0.0;
  double train_seconds = 0.0;
  double test_seconds = 0.0;
};

PfRun run_pf(const Dataset& train, const Dataset& test, const PFConfig& config) {
  PfRun run;
  const auto t0 = std::chrono::steady_clock::now();
  run.forest = train_pf(train, config);
  const auto t1 = std::chrono::steady_clock::now();
  run.accuracy = pf_accuracy(run.forest, train, test);
  const auto t2 = std::chrono::steady_clock::now();
  run.train_seconds = seconds_between(t0, t1);
  run.test_seconds = seconds_between(t1, t2);
  return run;
}

} // namespace

std::string record_to_json(const RunRecord& record) {
  internal_check(record.test_accuracy >= 0.0 && record.test_accuracy <= 1.0,
                 "record accuracy out of [0,1]");
  internal_check(record.train_seconds >= 0.0 && record.test_seconds >= 0.0,
                 "record timing fields must be nonnegative");
  nlohmann::json doc;
  doc["dataset"] = record.dataset;
  doc["classifier"] = record.classifier;
  doc["model"] =
      record.model_json.empty() ? nlohmann::json() : nlohmann::json::parse(record.model_json);
  doc["test_accuracy"] = record.test_accuracy;
  doc["train_seconds"] = record.train_seconds;
  doc["test_seconds"] = record.test_seconds;
  doc["seed"] = record.seed;
  doc["version"] = record.version;
  return doc.dump();
}

RunRecord record_from_json(const std::string& line) {
  try {
    const nlohmann::json doc = nlohmann::json::parse(line);
    RunRecord record;
    record.dataset = doc.at("dataset").get<std::string>();
    record.classifier = doc.at("classifier").get<std::string>();
    record.model_json = doc.at("model").is_null() ? "" : doc.at("model").dump();
    record.test_accuracy = doc.at("test_accuracy").get<double>();
    record.train_seconds = doc.at("train_seconds").get<double>();
    record.test_seconds = doc.at("test_seconds").get<double>();
    record.seed = doc.at("seed").get<std::uint64_t>();
    record.version = doc.at("version").get<std::string>();
    if (!(record.test_accuracy >= 0.0 && record.test_accuracy <= 1.0)) {
      throw ParseError("record accuracy out of [0,1]");
    }
    if (record.train_seconds < 0.0 || record.test_seconds < 0.0) {
      throw ParseError("record timing fields must be nonnegative");
    }
    return record;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("record JSON: ") + e.what());
  }
}

std::vector<RunRecord> load_records(const std::filesystem::path& path, bool missing_ok) {
  if (!std::filesystem::exists(path)) {
    if (missing_ok) { return {}; }
    throw IoError("records file '" + path.string() + "' does not exist");
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) { throw IoError("cannot open '" + path.string() + "'"); }

  std::vector<RunRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') { line.pop_back(); }
    if (line.find_first_not_of(" \t") == std::string::npos) { continue; }
    try {
      records.push_back(record_from_json(line));
    } catch (const ParseError& e) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (in.bad()) { throw IoError("failed while reading '" + path.string() + "'"); }
  return records;
}

void append_records(const std::filesystem::path& path, const std::vector<RunRecord>& records) {
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) { throw IoError("cannot open '" + path.string() + "' for appending"); }
  for (const RunRecord& record : records) { out << record_to_json(record) << '\n'; }
  out.flush();
  if (!out.good()) { throw IoError("failed while writing '" + path.string() + "'"); }
}

ClassifierSpec parse_classifier_id(const std::string& id) {
  ClassifierSpec spec;
  if (id == "pf" || id == "pf+") {
    spec.kind = ClassifierSpec::Kind::Forest;
    spec.plus_mode = id == "pf+";
    return spec;
  }

  std::string_view rest = id;
  if (rest.substr(0, 4) == "dtwf") {
    spec.distance = TunedKind::Dtw;
    spec.full_window = true;
    rest.remove_prefix(4);
  } else if (rest.substr(0, 4) == "adtw") {
    spec.distance = TunedKind::Adtw;
    rest.remove_prefix(4);
  } else if (rest.substr(0, 3) == "dtw") {
    spec.distance = TunedKind::Dtw;
    rest.remove_prefix(3);
  } else {
    throw UsageError("unknown classifier id '" + id + "'");
  }
  if (rest.empty() || (rest[0] != '^' && rest[0] != '+')) {
    throw UsageError("classifier id '" + id + "' needs ^<gamma> or +<set> after the distance");
  }

  const std::size_t us = rest.find('_');
  const std::string_view head = rest.substr(0, us);
  if (head[0] == '^') {
    const std::string_view num = head.substr(1);
    double gamma = 0.0;
    const auto res = std::from_chars(num.data(), num.data() + num.size(), gamma);
    if (res.ec != std::errc() || res.ptr != num.data() + num.size()) {
      throw UsageError("classifier id '" + id + "' has an unreadable gamma");
    }
    spec.fixed_gamma = true;
    spec.gamma = CostExponent(gamma).gamma; // validates > 0, finite
  } else {
    spec.set_name = ExponentSet::named(std::string(head.substr(1))).name;
  }

  if (us != std::string_view::npos) {
    if (spec.full_window) {
      throw UsageError("classifier id '" + id +
                       "': full-window dtw searches no window, so a per-gamma "
                       "budget does not apply");
    }
    const std::string_view num = rest.substr(us + 1);
    std::size_t budget = 0;
    const auto res = std::from_chars(num.data(), num.data() + num.size(), budget);
    if (res.ec != std::errc() || res.ptr != num.data() + num.size() || budget == 0) {
      throw UsageError("classifier id '" + id + "' has an unreadable per-gamma budget");
    }
    spec.per_gamma = budget;
  }
  return spec;
}

std::string classifier_id(const ClassifierSpec& spec) {
  if (spec.kind == ClassifierSpec::Kind::Forest) { return spec.plus_mode ? "pf+" : "pf"; }
  internal_check(!spec.full_window || spec.distance == TunedKind::Dtw,
                 "full-window ids apply to dtw only");
  std::string id = spec.full_window ? "dtwf" : tuned_kind_name(spec.distance);
  if (spec.fixed_gamma) {
    id += "^" + render_double(CostExponent(spec.gamma).gamma);
  } else {
    if (spec.set_name == ExponentSetName::Custom) {
      throw UsageError("classifier ids name the sets a, b, or c");
    }
    id += "+";
    id += exponent_set_label(spec.set_name);
  }
  if (!spec.full_window && spec.per_gamma != 100) { id += "_" + std::to_string(spec.per_gamma); }
  return id;
}

RunRecord run_classifier(const std::string& dataset, const ClassifierSpec& spec,
                         const RunOptions& options) {
  const auto [train, test] = load_dataset_dir(options.data_dir, dataset);

  RunRecord record;
  record.dataset = dataset;
  record.classifier = classifier_id(spec);
  record.seed = options.seed;
  record.version = kVersion;

  if (spec.kind == ClassifierSpec::Kind::Tuned) {
    const ExponentSet set = spec.fixed_gamma ? ExponentSet::single(spec.gamma)
                                             : ExponentSet::named(spec.set_name);
    const auto t0 = std::chrono::steady_clock::now();
    const TrainedModel model =
        spec.full_window ? train_full_window(train, set, options.seed)
                         : train_plus(train, spec.distance, set, spec.per_gamma, options.seed);
    const auto t1 = std::chrono::steady_clock::now();
    record.test_accuracy = classify_accuracy(model, train, test);
    const auto t2 = std::chrono::steady_clock::now();
    record.model_json = model_to_json(model);
    record.train_seconds = seconds_between(t0, t1);
    record.test_seconds = seconds_between(t1, t2);
  } else {
    PFConfig config;
    config.num_trees = options.pf_trees;
    config.candidates_per_node = options.pf_candidates;
    config.plus_mode = spec.plus_mode;
    config.seed = options.seed;
    const PfRun run = run_pf(train, test, config);
    record.test_accuracy = run.accuracy;
    record.model_json = pf_config_json(config).dump();
    record.train_seconds = run.train_seconds;
    record.test_seconds = run.test_seconds;
  }
  return record;
}

std::vector<std::string> read_dataset_list(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) { throw IoError("cannot open dataset list '" + file.string() + "'"); }
  std::vector<std::string> names;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') { line.pop_back(); }
    const std::size_t start = line.find_first_not_of(" \t");
    if (start == std::string::npos || line[start] == '#') { continue; }
    const std::size_t stop = line.find_last_not_of(" \t");
    names.push_back(line.substr(start, stop - start + 1));
  }
  if (in.bad()) { throw IoError("failed while reading '" + file.string() + "'"); }
  return names;
}

SweepOutcome cmd_sweep(const SweepOptions& options) {
  if (options.datasets.empty()) { throw UsageError("sweep needs at least one dataset"); }
  if (options.classifiers.empty()) { throw UsageError("sweep needs at least one classifier id"); }
  if (options.out.empty()) { throw UsageError("sweep needs an output records file"); }

  std::vector<ClassifierSpec> specs;
  specs.reserve(options.classifiers.size());
  for (const std::string& id : options.classifiers) {
    specs.push_back(parse_classifier_id(id));
  }

  std::set<std::tuple<std::string, std::string, std::uint64_t>> done;
  for (const RunRecord& record : load_records(options.out, /*missing_ok=*/true)) {
    done.emplace(record.dataset, record.classifier, record.seed);
  }

  std::filesystem::path failures = options.failures;
  if (failures.empty()) {
    failures = options.out;
    failures += ".failures";
  }

  SweepOutcome outcome;
  for (const std::string& dataset : options.datasets) {
    for (const ClassifierSpec& spec : specs) {
      const std::string id = classifier_id(spec);
      if (done.count({dataset, id, options.run.seed}) != 0) {
        ++outcome.skipped;
        continue;
      }
      try {
        const RunRecord record = run_classifier(dataset, spec, options.run);
        append_records(options.out, {record});
        ++outcome.completed;
      } catch (const Error& e) {
        std::cerr << "excluding " << dataset << " for " << id << ": " << e.what() << '\n';
        nlohmann::json f;
        f["dataset"] = dataset;
        f["classifier"] = id;
        f["exit_code"] = e.exit_code();
        f["error"] = e.what();
        std::ofstream out(failures, std::ios::binary | std::ios::app);
        if (!out) { throw IoError("cannot open '" + failures.string() + "' for appending"); }
        out << f.dump() << '\n';
        ++outcome.failed;
      }
    }
  }
  return outcome;
}

SweepOutcome cmd_noise(const NoiseOptions& options) {
  if (options.split != "both" && options.split != "train" && options.split != "test") {
    throw UsageError("noise split must be both, train, or test");
  }
  if (!(std::isfinite(options.scale) && options.scale >= 0.0)) {
    throw UsageError("noise scale must be finite and >= 0");
  }
  if (options.sweep.datasets.empty()) { throw UsageError("noise needs at least one dataset"); }
  if (options.sweep.out.empty()) { throw UsageError("noise needs an output records file"); }

  std::filesystem::path work_dir = options.work_dir;
  if (work_dir.empty()) {
    work_dir = options.sweep.out;
    work_dir += ".data";
  }

  const Rng master(options.sweep.run.seed);
  for (const std::string& dataset : options.sweep.datasets) {
    auto [train, test] = load_dataset_dir(options.sweep.run.data_dir, dataset);
    const std::uint64_t h = fnv1a(dataset);
    if (options.split != "test") {
      Rng rng = master.spawn(h ^ 0x545241494eull); // per-dataset train stream
      train = add_noise(train, options.scale, rng);
    }
    if (options.split != "train") {
      Rng rng = master.spawn(h ^ 0x54455354ull); // per-dataset test stream
      test = add_noise(test, options.scale, rng);
    }
    std::error_code ec;
    std::filesystem::create_directories(work_dir / dataset, ec);
    if (ec) {
      throw IoError("cannot create '" + (work_dir / dataset).string() + "': " + ec.message());
    }
    write_ucr_tsv(train, work_dir / dataset / (dataset + "_TRAIN.tsv"));
    write_ucr_tsv(test, work_dir / dataset / (dataset + "_TEST.tsv"));
  }

  SweepOptions sub = options.sweep;
  sub.run.data_dir = work_dir;
  return cmd_sweep(sub);
}

RunRecord cmd_pf(const PfOptions& options) {
  if (options.out.empty()) { throw UsageError("pf needs an output records file"); }
  const auto [train, test] = load_dataset_dir(options.run.data_dir, options.dataset);

  PFConfig config;
  config.num_trees = options.run.pf_trees;
  config.candidates_per_node = options.run.pf_candidates;
  config.plus_mode = options.plus_mode;
  config.seed = options.run.seed;
  const PfRun run = run_pf(train, test, config);

  RunRecord record;
  record.dataset = options.dataset;
  record.classifier = options.plus_mode ? "pf+" : "pf";
  record.model_json = pf_config_json(config).dump();
  record.test_accuracy = run.accuracy;
  record.train_seconds = run.train_seconds;
  record.test_seconds = run.test_seconds;
  record.seed = options.run.seed;
  record.version = kVersion;
  append_records(options.out, {record});

  if (!options.forest_out.empty()) {
    std::ofstream out(options.forest_out, std::ios::binary);
    if (!out) {
      throw IoError("cannot open '" + options.forest_out.string() + "' for writing");
    }
    out << pf_to_json(run.forest) << '\n';
    out.flush();
    if (!out.good()) {
      throw IoError("failed while writing '" + options.forest_out.string() + "'");
    }
  }
  return record;
}

std::vector<int> cmd_pf_predict(const std::filesystem::path& forest_file,
                                const std::filesystem::path& data_dir,
                                const std::string& dataset,
                                const std::filesystem::path& query_file) {
  const ProximityForest forest = pf_from_json(slurp_file(forest_file));
  const std::filesystem::path train_file = data_dir / dataset / (dataset + "_TRAIN.tsv");
  const Dataset train = load_ucr_tsv(train_file, dataset, "TRAIN");
  const Dataset queries = load_ucr_tsv(query_file, query_file.stem().string(), "QUERY");
  return pf_predict_all(forest, train, queries);
}

namespace {

/// dataset -> mean accuracy for one classifier id (averaged over seeds).
std::map<std::string, double> accuracy_by_dataset(const std::vector<RunRecord>& records,
                                                  const std::string& id) {
  std::map<std::string, std::pair<double, std::size_t>> sums;
  for (const RunRecord& record : records) {
    if (record.classifier != id) { continue; }
    auto& slot = sums[record.dataset];
    slot.first += record.test_accuracy;
    slot.second += 1;
  }
  std::map<std::string, double> means;
  for (const auto& [dataset, slot] : sums) {
    means[dataset] = slot.first / static_cast<double>(slot.second);
  }
  return means;
}

std::vector<RunRecord> load_all_records(const ReportOptions& options) {
  if (options.records.empty()) { throw UsageError("report needs at least one records file"); }
  std::vector<RunRecord> all;
  for (const std::filesystem::path& path : options.records) {
    std::vector<RunRecord> part = load_records(path, /*missing_ok=*/false);
    all.insert(all.end(), std::make_move_iterator(part.begin()),
               std::make_move_iterator(part.end()));
  }
  return all;
}

std::string canonical_id(const std::string& id) { return classifier_id(parse_classifier_id(id)); }

} // namespace

ScatterReport cmd_report_scatter(const ReportOptions& options) {
  if (options.classifiers.size() != 2) {
    throw UsageError("scatter compares exactly two classifier ids");
  }
  const std::string id_a = canonical_id(options.classifiers[0]);
  const std::string id_b = canonical_id(options.classifiers[1]);
  if (id_a == id_b) { throw UsageError("scatter needs two distinct classifier ids"); }

  const std::vector<RunRecord> all = load_all_records(options);
  const auto acc_a = accuracy_by_dataset(all, id_a);
  const auto acc_b = accuracy_by_dataset(all, id_b);

  ScatterReport report;
  for (const auto& [dataset, a] : acc_a) {
    const auto it = acc_b.find(dataset);
    if (it == acc_b.end()) { continue; }
    report.pairs.push_back({dataset, a, it->second});
  }
  if (report.pairs.empty()) {
    throw UsageError("no dataset has records for both '" + id_a + "' and '" + id_b + "'");
  }
  report.wilcoxon = wilcoxon_signed_rank(report.pairs);
  report.wtl = win_tie_loss(report.pairs);
  if (!options.out.empty()) { emit_scatter(report.pairs, id_a, id_b, options.out); }
  return report;
}

CdReport cmd_report_cd(const ReportOptions& options) {
  if (options.classifiers.size() < 2) {
    throw UsageError("a critical-difference report needs at least two classifier ids");
  }
  std::vector<std::string> ids;
  ids.reserve(options.classifiers.size());
  for (const std::string& id : options.classifiers) { ids.push_back(canonical_id(id)); }
  if (std::set<std::string>(ids.begin(), ids.end()).size() != ids.size()) {
    throw UsageError("classifier ids must be distinct");
  }

  const std::vector<RunRecord> all = load_all_records(options);
  std::vector<std::map<std::string, double>> per_id;
  per_id.reserve(ids.size());
  for (const std::string& id : ids) {
    per_id.push_back(accuracy_by_dataset(all, id));
    if (per_id.back().empty()) { throw UsageError("no records found for '" + id + "'"); }
  }
  for (std::size_t c = 1; c < ids.size(); ++c) {
    if (per_id[c].size() != per_id[0].size() ||
        !std::equal(per_id[c].begin(), per_id[c].end(), per_id[0].begin(),
                    [](const auto& x, const auto& y) { return x.first == y.first; })) {
      throw UsageError("classifiers cover different dataset sets ('" + ids[0] + "' vs '" +
                       ids[c] + "'); a rank comparison needs identical coverage");
    }
  }

  AccuracyMatrix matrix;
  matrix.classifiers = ids;
  for (const auto& [dataset, acc] : per_id[0]) {
    matrix.datasets.push_back(dataset);
    std::vector<double> row;
    row.reserve(ids.size());
    for (const auto& by_dataset : per_id) { row.push_back(by_dataset.at(dataset)); }
    matrix.accuracies.push_back(std::move(row));
    (void)acc;
  }

  CdReport report;
  report.table = mean_ranks(matrix);
  report.groups = cliques(matrix, options.alpha);
  report.dataset_count = matrix.datasets.size();
  if (!options.out.empty()) { emit_cd(report.table, report.groups, options.out); }
  return report;
}

BenchResult cmd_bench(std::size_t elements, std::size_t reps) {
  if (elements == 0 || reps == 0) { throw UsageError("bench needs elements >= 1 and reps >= 1"); }

  const kernels::Backend& backend = kernels::active_backend();
  std::vector<double> values(elements);
  std::vector<double> out(elements);
  Rng rng(1234);
  for (double& v : values) { v = rng.next_real(-2.0, 2.0); }

  double sink = 0.0;
  const auto time_path = [&](FastPath path, double gamma) {
    double best = kPositiveInfinity;
    for (std::size_t r = 0; r < reps; ++r) {
      const auto t0 = std::chrono::steady_clock::now();
      backend.row[static_cast<int>(path)](0.37, values.data(), out.data(), elements, gamma);
      const auto t1 = std::chrono::steady_clock::now();
      best = std::min(best, seconds_between(t0, t1));
      sink += out[elements / 2];
    }
    return best;
  };

  BenchResult result;
  result.backend = backend.name;
  result.elements = elements;
  const double pow_sqrt = time_path(FastPath::GeneralPow, 0.5);
  const double pow_abs = time_path(FastPath::GeneralPow, 1.0);
  const double pow_square = time_path(FastPath::GeneralPow, 2.0);
  result.seconds_pow = pow_square;
  result.speedup_sqrt = pow_sqrt / time_path(FastPath::Sqrt, 0.5);
  result.speedup_abs = pow_abs / time_path(FastPath::Abs, 1.0);
  result.speedup_square = pow_square / time_path(FastPath::Square, 2.0);
  internal_check(std::isfinite(sink), "benchmark kernels produced non-finite values");
  return result;
}

} // namespace elastika
