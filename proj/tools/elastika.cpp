#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "elastika/cli.hpp"
#include "elastika/common.hpp"
#include "elastika/cost_kernels.hpp"
#include "elastika/version.hpp"

namespace {

using elastika::ClassifierSpec;
using elastika::IoError;
using elastika::ParseError;
using elastika::UsageError;

/// Turns one config value into a `--key=value` token.
std::string config_token(const std::string& key, const nlohmann::json& value) {
  if (value.is_string()) { return "--" + key + "=" + value.get<std::string>(); }
  if (value.is_boolean()) { return "--" + key + (value.get<bool>() ? "=true" : "=false"); }
  if (value.is_number()) { return "--" + key + "=" + value.dump(); }
  throw ParseError("config key '" + key + "' must be a string, number, boolean, or array");
}

/// Replaces `--config FILE` (or `--config=FILE`) with the flags the JSON
/// object in FILE spells out, in place, so flags given after --config
/// override the file and the file overrides flags given before it. Keys
/// the active subcommand does not take are kept only if some other
/// command takes them (one config file can serve several commands);
/// keys no command knows are an error.
std::vector<std::string> expand_config(const CLI::App& app, std::vector<std::string> args) {
  const std::vector<const CLI::App*> all =
      app.get_subcommands([](const CLI::App*) { return true; });
  const CLI::App* active = nullptr;
  for (const std::string& tok : args) {
    for (const CLI::App* sub : all) {
      if (tok == sub->get_name()) {
        active = sub;
        break;
      }
    }
    if (active != nullptr) { break; }
  }

  std::vector<std::string> out;
  out.reserve(args.size());
  for (std::size_t i = 0; i < args.size(); ++i) {
    std::string file;
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) { throw UsageError("--config needs a file argument"); }
      file = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      file = args[i].substr(9);
    } else {
      out.push_back(args[i]);
      continue;
    }

    std::ifstream in(file, std::ios::binary);
    if (!in) { throw IoError("cannot open config file '" + file + "'"); }
    nlohmann::json doc;
    try {
      in >> doc;
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("config file '" + file + "': " + e.what());
    }
    if (!doc.is_object()) {
      throw ParseError("config file '" + file + "' must hold a JSON object of flag -> value");
    }
    for (const auto& [key, value] : doc.items()) {
      if (key == "config") { throw UsageError("config files cannot nest another config"); }
      const std::string flag = "--" + key;
      const bool known_here = (active != nullptr && active->get_option_no_throw(flag) != nullptr) ||
                              app.get_option_no_throw(flag) != nullptr;
      if (!known_here) {
        const bool known_elsewhere =
            std::any_of(all.begin(), all.end(), [&flag](const CLI::App* sub) {
              return sub->get_option_no_throw(flag) != nullptr;
            });
        if (!known_elsewhere) {
          throw UsageError("config key '" + key + "' is not a flag of any command");
        }
        continue; // meant for a different command
      }
      if (value.is_array()) {
        for (const nlohmann::json& item : value) { out.push_back(config_token(key, item)); }
      } else {
        out.push_back(config_token(key, value));
      }
    }
  }
  return out;
}

CLI::Option* last(CLI::Option* opt) {
  return opt->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
}

std::vector<std::string> merged_datasets(const std::string& list_file,
                                         const std::vector<std::string>& names) {
  std::vector<std::string> datasets;
  if (!list_file.empty()) { datasets = elastika::read_dataset_list(list_file); }
  datasets.insert(datasets.end(), names.begin(), names.end());
  return datasets;
}

void print_record(const elastika::RunRecord& record) {
  std::cout << record.classifier << " on " << record.dataset << ": test accuracy " << std::fixed
            << std::setprecision(4) << record.test_accuracy << " (train " << std::setprecision(2)
            << record.train_seconds << "s, test " << record.test_seconds << "s, seed "
            << record.seed << ")\n"
            << std::defaultfloat << std::setprecision(6);
}

void print_outcome(const elastika::SweepOutcome& outcome, const std::filesystem::path& out) {
  std::cout << "completed " << outcome.completed << ", skipped " << outcome.skipped << ", failed "
            << outcome.failed << " (records: " << out.string() << ")\n";
  if (outcome.failed > 0) {
    std::cout << "failures are listed in the manifest next to the record store\n";
  }
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Elastic-distance benchmark: tunable-exponent 1-NN classifiers, proximity "
               "forests, and reports"};
  app.set_version_flag("--version", elastika::kVersion);
  app.require_subcommand(1);
  app.fallthrough(); // let subcommands pass --backend up to the app
  std::string backend_name;
  last(app.add_option("--backend", backend_name,
                      "Force a pointwise-cost kernel backend (scalar, avx2)"));

  // tune ------------------------------------------------------------------
  auto* tune = app.add_subcommand("tune", "Tune one classifier on one dataset, append a record");
  struct {
    std::string data_dir, dataset, distance = "dtw", set = "a", out;
    double gamma = 1.0;
    bool full_window = false;
    std::size_t per_gamma = 100;
    std::uint64_t seed = 0;
  } tu;
  last(tune->add_option("--data-dir", tu.data_dir,
                        "Directory holding <name>/<name>_{TRAIN,TEST}.tsv"))
      ->required();
  last(tune->add_option("--dataset", tu.dataset, "Dataset name"))->required();
  last(tune->add_option("--distance", tu.distance, "dtw or adtw"))
      ->check(CLI::IsMember({"dtw", "adtw"}));
  auto* tune_set = last(tune->add_option("--set", tu.set, "Exponent set to search (a, b, c)"))
                       ->check(CLI::IsMember({"a", "b", "c"}));
  auto* tune_gamma =
      last(tune->add_option("--gamma", tu.gamma, "Fix the cost exponent instead of a set"));
  tune_set->excludes(tune_gamma);
  tune_gamma->excludes(tune_set);
  auto* tune_budget = last(tune->add_option("--per-gamma", tu.per_gamma,
                                            "Parameter candidates searched per exponent"));
  tune->add_flag("--full-window", tu.full_window,
                 "Skip the window search and keep it unlimited (dtw only)");
  last(tune->add_option("--seed", tu.seed, "RNG seed"))->required();
  last(tune->add_option("--out", tu.out, "JSON-lines record store"))->required();

  // sweep -----------------------------------------------------------------
  auto* sweep = app.add_subcommand("sweep", "Run classifiers across datasets, resumably");
  struct {
    std::string data_dir, list, out, failures, work_dir, split = "both";
    std::vector<std::string> datasets, classifiers;
    std::uint64_t seed = 0;
    std::size_t trees = 100, candidates = 5;
    double scale = 0.0;
  } sw;
  const auto add_sweep_flags = [&sw](CLI::App* cmd) {
    last(cmd->add_option("--data-dir", sw.data_dir,
                         "Directory holding <name>/<name>_{TRAIN,TEST}.tsv"))
        ->required();
    last(cmd->add_option("--list", sw.list, "File with one dataset name per line"));
    cmd->add_option("--dataset", sw.datasets, "Dataset name (repeatable)");
    cmd->add_option("--classifier", sw.classifiers, "Classifier id (repeatable)")->required();
    last(cmd->add_option("--seed", sw.seed, "RNG seed"))->required();
    last(cmd->add_option("--out", sw.out, "JSON-lines record store"))->required();
    last(cmd->add_option("--failures", sw.failures,
                         "Failure manifest (default: <out>.failures)"));
    last(cmd->add_option("--trees", sw.trees, "Trees per proximity forest"));
    last(cmd->add_option("--candidates", sw.candidates, "Candidate splitters per node"));
  };
  add_sweep_flags(sweep);

  // noise -----------------------------------------------------------------
  auto* noise =
      app.add_subcommand("noise", "Sweep over noisy copies of the datasets (v' = v + scale*N(0,sigma))");
  add_sweep_flags(noise);
  last(noise->add_option("--scale", sw.scale, "Noise scale (0 reproduces the clean sweep)"))
      ->required();
  last(noise->add_option("--split", sw.split, "Which split receives noise"))
      ->check(CLI::IsMember({"both", "train", "test"}));
  last(noise->add_option("--work-dir", sw.work_dir,
                         "Where noisy copies are written (default: <out>.data)"));

  // pf --------------------------------------------------------------------
  auto* pf = app.add_subcommand("pf", "Train and evaluate a proximity forest");
  struct {
    std::string data_dir, dataset, out, forest_out;
    bool plus = false;
    std::size_t trees = 100, candidates = 5;
    std::uint64_t seed = 0;
  } pfo;
  last(pf->add_option("--data-dir", pfo.data_dir,
                      "Directory holding <name>/<name>_{TRAIN,TEST}.tsv"))
      ->required();
  last(pf->add_option("--dataset", pfo.dataset, "Dataset name"))->required();
  pf->add_flag("--plus", pfo.plus, "Sample a cost exponent per splitter (pf+)");
  last(pf->add_option("--trees", pfo.trees, "Trees in the forest"));
  last(pf->add_option("--candidates", pfo.candidates, "Candidate splitters per node"));
  last(pf->add_option("--seed", pfo.seed, "RNG seed"))->required();
  last(pf->add_option("--out", pfo.out, "JSON-lines record store"))->required();
  last(pf->add_option("--forest-out", pfo.forest_out, "Also dump the forest as JSON"));

  // pf-predict ------------------------------------------------------------
  auto* pfp = app.add_subcommand("pf-predict", "Label query series with a serialized forest");
  struct {
    std::string forest, data_dir, dataset, query;
  } pq;
  last(pfp->add_option("--forest", pq.forest, "Forest JSON written by pf --forest-out"))
      ->required();
  last(pfp->add_option("--data-dir", pq.data_dir, "Directory the forest was trained from"))
      ->required();
  last(pfp->add_option("--dataset", pq.dataset, "Training dataset name"))->required();
  last(pfp->add_option("--query", pq.query, "TSV of series to label (labels ignored)"))
      ->required();

  // report ----------------------------------------------------------------
  auto* report = app.add_subcommand("report", "Compare classifiers from record stores");
  struct {
    std::string kind, out;
    std::vector<std::string> records, classifiers;
    double alpha = 0.05;
  } rp;
  last(report->add_option("--kind", rp.kind, "scatter (two ids) or cd (two or more)"))
      ->required()
      ->check(CLI::IsMember({"scatter", "cd"}));
  report->add_option("--records", rp.records, "JSON-lines record store (repeatable)")->required();
  report->add_option("--classifier", rp.classifiers, "Classifier id (repeatable)")->required();
  last(report->add_option("--out", rp.out, "Artifact base path (writes <out>.csv and <out>.svg)"))
      ->required();
  last(report->add_option("--alpha", rp.alpha, "Significance level for rank cliques"));

  // bench -----------------------------------------------------------------
  auto* bench = app.add_subcommand("bench", "Time the pointwise-cost kernels");
  struct {
    std::size_t elements = 1000000, reps = 5;
  } be;
  last(bench->add_option("--elements", be.elements, "Elements per kernel call"));
  last(bench->add_option("--reps", be.reps, "Repetitions (best time wins)"));

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    args = expand_config(app, std::move(args));
    std::reverse(args.begin(), args.end()); // CLI11 consumes the vector back to front
    app.parse(std::move(args));

    if (!backend_name.empty()) { elastika::kernels::force_backend(backend_name); }

    if (app.got_subcommand(tune)) {
      ClassifierSpec spec;
      spec.distance = tu.distance == "adtw" ? elastika::TunedKind::Adtw : elastika::TunedKind::Dtw;
      spec.full_window = tu.full_window;
      if (tu.full_window && spec.distance != elastika::TunedKind::Dtw) {
        throw UsageError("--full-window applies to dtw only");
      }
      if (tu.full_window && tune_budget->count() > 0) {
        throw UsageError("--full-window searches no window, so --per-gamma does not apply");
      }
      if (tune_gamma->count() > 0) {
        spec.fixed_gamma = true;
        spec.gamma = tu.gamma;
      } else {
        spec.set_name = elastika::ExponentSet::named(tu.set).name;
      }
      spec.per_gamma = tu.per_gamma;
      elastika::RunOptions run;
      run.data_dir = tu.data_dir;
      run.seed = tu.seed;
      const elastika::RunRecord record = elastika::run_classifier(tu.dataset, spec, run);
      elastika::append_records(tu.out, {record});
      print_record(record);
    } else if (app.got_subcommand(sweep) || app.got_subcommand(noise)) {
      elastika::SweepOptions options;
      options.run.data_dir = sw.data_dir;
      options.run.seed = sw.seed;
      options.run.pf_trees = sw.trees;
      options.run.pf_candidates = sw.candidates;
      options.datasets = merged_datasets(sw.list, sw.datasets);
      options.classifiers = sw.classifiers;
      options.out = sw.out;
      options.failures = sw.failures;
      elastika::SweepOutcome outcome;
      if (app.got_subcommand(noise)) {
        elastika::NoiseOptions nopt;
        nopt.sweep = options;
        nopt.scale = sw.scale;
        nopt.split = sw.split;
        nopt.work_dir = sw.work_dir;
        outcome = elastika::cmd_noise(nopt);
      } else {
        outcome = elastika::cmd_sweep(options);
      }
      print_outcome(outcome, sw.out);
    } else if (app.got_subcommand(pf)) {
      elastika::PfOptions options;
      options.run.data_dir = pfo.data_dir;
      options.run.seed = pfo.seed;
      options.run.pf_trees = pfo.trees;
      options.run.pf_candidates = pfo.candidates;
      options.dataset = pfo.dataset;
      options.plus_mode = pfo.plus;
      options.out = pfo.out;
      options.forest_out = pfo.forest_out;
      const elastika::RunRecord record = elastika::cmd_pf(options);
      print_record(record);
      if (!pfo.forest_out.empty()) { std::cout << "forest written to " << pfo.forest_out << '\n'; }
    } else if (app.got_subcommand(pfp)) {
      const std::vector<int> labels =
          elastika::cmd_pf_predict(pq.forest, pq.data_dir, pq.dataset, pq.query);
      for (const int label : labels) { std::cout << label << '\n'; }
    } else if (app.got_subcommand(report)) {
      elastika::ReportOptions options;
      options.records.assign(rp.records.begin(), rp.records.end());
      options.classifiers = rp.classifiers;
      options.out = rp.out;
      options.alpha = rp.alpha;
      if (rp.kind == "scatter") {
        const elastika::ScatterReport result = elastika::cmd_report_scatter(options);
        std::cout << "datasets compared: " << result.pairs.size() << '\n'
                  << options.classifiers[0] << " wins " << result.wtl.wins_a << ", ties "
                  << result.wtl.ties << ", " << options.classifiers[1] << " wins "
                  << result.wtl.wins_b << '\n'
                  << "wilcoxon signed-rank p = " << result.wilcoxon.p_value
                  << " (n_effective = " << result.wilcoxon.n_effective << ")\n";
      } else {
        const elastika::CdReport result = elastika::cmd_report_cd(options);
        std::cout << "datasets compared: " << result.dataset_count << "\nmean ranks:\n";
        for (std::size_t c = 0; c < result.table.classifiers.size(); ++c) {
          std::cout << "  " << result.table.classifiers[c] << "  " << result.table.mean_rank[c]
                    << '\n';
        }
        std::cout << "groups not separable at alpha " << rp.alpha << ":";
        for (const auto& group : result.groups) {
          std::cout << " {";
          for (std::size_t m = 0; m < group.size(); ++m) {
            std::cout << (m > 0 ? ", " : "") << result.table.classifiers[group[m]];
          }
          std::cout << "}";
        }
        std::cout << '\n';
      }
      std::cout << "wrote " << rp.out << ".csv and " << rp.out << ".svg\n";
    } else if (app.got_subcommand(bench)) {
      const elastika::BenchResult result = elastika::cmd_bench(be.elements, be.reps);
      std::cout << "backend: " << result.backend << ", elements: " << result.elements << '\n'
                << std::fixed << std::setprecision(6) << "pow baseline: " << result.seconds_pow
                << " s per call\n"
                << std::setprecision(2) << "speedup sqrt (gamma 0.5): " << result.speedup_sqrt
                << "x\n"
                << "speedup abs (gamma 1):    " << result.speedup_abs << "x\n"
                << "speedup square (gamma 2): " << result.speedup_square << "x\n";
    }
    return 0;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const elastika::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 5;
  }
}
