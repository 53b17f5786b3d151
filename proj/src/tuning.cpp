#include "elastika/tuning.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "elastika/common.hpp"

namespace elastika {

const char* tuned_kind_name(TunedKind kind) { return kind == TunedKind::Dtw ? "dtw" : "adtw"; }

TunedKind tuned_kind_from(const std::string& name) {
  if (name == "dtw") { return TunedKind::Dtw; }
  if (name == "adtw") { return TunedKind::Adtw; }
  throw UsageError("unknown tunable distance '" + name + "' (expected dtw or adtw)");
}

std::vector<std::size_t> window_grid(std::size_t len, std::size_t count) {
  if (len < 2) { throw UsageError("window grid needs series length >= 2"); }
  if (count < 1) { throw UsageError("window grid needs count >= 1"); }
  const std::size_t widest = len - 2;
  if (count == 1) { return {0}; }

  std::vector<std::size_t> windows;
  windows.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double exact = static_cast<double>(k) * static_cast<double>(widest) /
                         static_cast<double>(count - 1);
    const auto w = static_cast<std::size_t>(std::llround(exact));
    if (windows.empty() || windows.back() != w) { windows.push_back(w); }
  }
  return windows;
}

std::vector<double> penalty_ratios(std::size_t count) {
  if (count < 1) { throw UsageError("penalty grid needs count >= 1"); }
  std::vector<double> ratios(count);
  for (std::size_t i = 1; i <= count; ++i) {
    ratios[i - 1] = std::pow(static_cast<double>(i) / static_cast<double>(count), 5.0);
  }
  return ratios;
}

double estimate_omega_prime(const Dataset& train, const CostExponent& gamma, std::uint64_t seed) {
  const std::size_t n = train.size();
  if (n < 2) { throw UsageError("penalty scale estimation needs at least two series"); }

  const std::size_t distinct_ordered = n * (n - 1);
  double sum = 0.0;
  std::size_t samples = 0;
  if (distinct_ordered <= 4000) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) { continue; }
        sum += direct_alignment(train[i].values, train[j].values, gamma);
        ++samples;
      }
    }
  } else {
    Rng rng(seed);
    for (std::size_t k = 0; k < 4000; ++k) {
      const std::size_t i = rng.next_index(n);
      std::size_t j = rng.next_index(n - 1);
      if (j >= i) { ++j; }
      sum += direct_alignment(train[i].values, train[j].values, gamma);
      ++samples;
    }
  }
  return sum / static_cast<double>(samples);
}

ParamGrid ParamGrid::dtw(const ExponentSet& set, std::size_t len, std::size_t per_gamma_count) {
  ParamGrid grid{TunedKind::Dtw, set, per_gamma_count, {}, {}};
  const std::vector<std::size_t> windows = window_grid(len, per_gamma_count);
  grid.entries.reserve(set.size() * windows.size());
  for (std::size_t gi = 0; gi < set.size(); ++gi) {
    for (const std::size_t w : windows) {
      grid.entries.push_back({gi, WarpingWindow::bounded(w), 0.0});
    }
  }
  return grid;
}

ParamGrid ParamGrid::dtw_full(const ExponentSet& set) {
  ParamGrid grid{TunedKind::Dtw, set, 1, {}, {}};
  for (std::size_t gi = 0; gi < set.size(); ++gi) {
    grid.entries.push_back({gi, WarpingWindow::unlimited(), 0.0});
  }
  return grid;
}

ParamGrid ParamGrid::adtw(const ExponentSet& set, const Dataset& train,
                          std::size_t per_gamma_count, std::uint64_t seed) {
  ParamGrid grid{TunedKind::Adtw, set, per_gamma_count, {}, {}};
  const std::vector<double> ratios = penalty_ratios(per_gamma_count);
  grid.entries.reserve(set.size() * ratios.size());
  grid.omega_primes.reserve(set.size());
  for (std::size_t gi = 0; gi < set.size(); ++gi) {
    const double scale = estimate_omega_prime(train, set.exponents[gi], seed);
    grid.omega_primes.push_back(scale);
    for (const double r : ratios) {
      grid.entries.push_back({gi, WarpingWindow::unlimited(), scale * r});
    }
  }
  return grid;
}

double grid_distance(const ParamGrid& grid, const GridEntry& entry, const std::vector<double>& a,
                     const std::vector<double>& b) {
  const CostExponent& gamma = grid.set.exponents[entry.gamma_index];
  if (grid.kind == TunedKind::Dtw) { return dtw(a, b, entry.window, gamma); }
  return adtw(a, b, entry.omega, gamma);
}

LoocvTable loocv_table(const Dataset& train, const ParamGrid& grid) {
  require_tunable(train);
  const std::size_t n = train.size();
  LoocvTable table;
  table.total = n;
  table.correct.assign(grid.entries.size(), 0);

  parallel_for(grid.entries.size(), [&](std::size_t e) {
    const GridEntry& entry = grid.entries[e];
    std::size_t correct = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double best = kPositiveInfinity;
      std::size_t best_j = n;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) { continue; }
        const double d = grid_distance(grid, entry, train[i].values, train[j].values);
        if (d < best) {
          best = d;
          best_j = j;
        }
      }
      if (train[best_j].label == train[i].label) { ++correct; }
    }
    table.correct[e] = correct;
  });
  return table;
}

namespace {

struct Champion {
  std::size_t entry_index;
  std::size_t correct;
  std::size_t gamma_index;
};

} // namespace

std::size_t select_best_entry(const ParamGrid& grid, const std::vector<std::size_t>& correct) {
  internal_check(correct.size() == grid.entries.size(), "loocv table does not match the grid");
  internal_check(!grid.entries.empty(), "cannot select from an empty grid");

  // Stage 1: the best entry per gamma. Entries are grouped by gamma and
  // ascending in the parameter, so DTW's smallest-window tie rule is the
  // first maximum; ADTW takes the median (lower middle) of the tied run.
  std::vector<Champion> champions;
  std::size_t start = 0;
  while (start < grid.entries.size()) {
    const std::size_t gi = grid.entries[start].gamma_index;
    std::size_t end = start;
    while (end < grid.entries.size() && grid.entries[end].gamma_index == gi) { ++end; }

    std::size_t best = 0;
    for (std::size_t e = start; e < end; ++e) { best = std::max(best, correct[e]); }
    std::vector<std::size_t> tied;
    for (std::size_t e = start; e < end; ++e) {
      if (correct[e] == best) { tied.push_back(e); }
    }
    const std::size_t pick =
        grid.kind == TunedKind::Dtw ? tied.front() : tied[(tied.size() - 1) / 2];
    champions.push_back({pick, best, gi});
    start = end;
  }

  // Stage 2: among maximal-accuracy champions, take the median gamma; with
  // an even count, of the two middle ones prefer |gamma - 1| smaller, then
  // the smaller gamma.
  std::size_t best = 0;
  for (const Champion& c : champions) { best = std::max(best, c.correct); }
  std::vector<const Champion*> tied;
  for (const Champion& c : champions) {
    if (c.correct == best) { tied.push_back(&c); }
  }

  if (tied.size() % 2 == 1) { return tied[tied.size() / 2]->entry_index; }
  const Champion* lo = tied[tied.size() / 2 - 1];
  const Champion* hi = tied[tied.size() / 2];
  const double glo = grid.set.exponents[lo->gamma_index].gamma;
  const double ghi = grid.set.exponents[hi->gamma_index].gamma;
  if (std::abs(glo - 1.0) <= std::abs(ghi - 1.0)) { return lo->entry_index; }
  return hi->entry_index;
}

namespace {

TrainedModel finish_model(const Dataset& train, const ParamGrid& grid, std::uint64_t seed,
                          bool full_window) {
  const LoocvTable table = loocv_table(train, grid);
  const std::size_t pick = select_best_entry(grid, table.correct);
  const GridEntry& entry = grid.entries[pick];

  TrainedModel model;
  model.kind = grid.kind;
  model.gamma = grid.set.exponents[entry.gamma_index].gamma;
  model.window = entry.window;
  model.omega = entry.omega;
  model.train_correct = table.correct[pick];
  model.train_total = table.total;
  model.set_label = exponent_set_label(grid.set.name);
  model.per_gamma_count = grid.per_gamma_count;
  model.seed = seed;
  model.full_window = full_window;
  return model;
}

} // namespace

TrainedModel train_plus(const Dataset& train, TunedKind kind, const ExponentSet& set,
                        std::size_t per_gamma_count, std::uint64_t seed) {
  require_tunable(train);
  const ParamGrid grid = kind == TunedKind::Dtw
                             ? ParamGrid::dtw(set, train.length(), per_gamma_count)
                             : ParamGrid::adtw(set, train, per_gamma_count, seed);
  return finish_model(train, grid, seed, false);
}

TrainedModel train_full_window(const Dataset& train, const ExponentSet& set, std::uint64_t seed) {
  require_tunable(train);
  return finish_model(train, ParamGrid::dtw_full(set), seed, true);
}

double model_distance(const TrainedModel& model, const std::vector<double>& a,
                      const std::vector<double>& b) {
  const CostExponent gamma(model.gamma);
  if (model.kind == TunedKind::Dtw) { return dtw(a, b, model.window, gamma); }
  return adtw(a, b, model.omega, gamma);
}

std::vector<int> classify(const TrainedModel& model, const Dataset& train, const Dataset& test) {
  if (train.empty()) { throw EmptyDatasetError("train split holds no series"); }
  if (test.empty()) { throw UsageError("cannot classify an empty test split"); }
  require_same_length(train, test);

  std::vector<int> labels(test.size(), 0);
  parallel_for(test.size(), [&](std::size_t t) {
    double best = kPositiveInfinity;
    std::size_t best_j = 0;
    for (std::size_t j = 0; j < train.size(); ++j) {
      const double d = model_distance(model, test[t].values, train[j].values);
      if (d < best) {
        best = d;
        best_j = j;
      }
    }
    labels[t] = train[best_j].label;
  });
  return labels;
}

double classify_accuracy(const TrainedModel& model, const Dataset& train, const Dataset& test) {
  const std::vector<int> labels = classify(model, train, test);
  std::size_t correct = 0;
  for (std::size_t t = 0; t < test.size(); ++t) {
    if (labels[t] == test[t].label) { ++correct; }
  }
  return static_cast<double>(correct) / static_cast<double>(test.size());
}

std::string model_to_json(const TrainedModel& model) {
  nlohmann::json doc;
  doc["distance"] = tuned_kind_name(model.kind);
  doc["gamma"] = model.gamma;
  if (model.kind == TunedKind::Dtw) {
    if (model.window.is_unlimited()) {
      doc["param"] = "full";
    } else {
      doc["param"] = model.window.bound();
    }
  } else {
    doc["param"] = model.omega;
  }
  doc["train_accuracy"] = model.train_accuracy();
  doc["train_correct"] = model.train_correct;
  doc["train_total"] = model.train_total;
  doc["grid"] = {{"set", model.set_label}, {"per_gamma_count", model.per_gamma_count}};
  doc["seed"] = model.seed;
  return doc.dump();
}

TrainedModel model_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad model document: ") + e.what());
  }
  try {
    TrainedModel model;
    model.kind = tuned_kind_from(doc.at("distance").get<std::string>());
    model.gamma = doc.at("gamma").get<double>();
    const auto& param = doc.at("param");
    if (model.kind == TunedKind::Dtw) {
      if (param.is_string() && param.get<std::string>() == "full") {
        model.window = WarpingWindow::unlimited();
        model.full_window = true;
      } else {
        model.window = WarpingWindow::bounded(param.get<std::size_t>());
      }
    } else {
      model.omega = param.get<double>();
    }
    model.train_correct = doc.at("train_correct").get<std::size_t>();
    model.train_total = doc.at("train_total").get<std::size_t>();
    model.set_label = doc.at("grid").at("set").get<std::string>();
    model.per_gamma_count = doc.at("grid").at("per_gamma_count").get<std::size_t>();
    model.seed = doc.at("seed").get<std::uint64_t>();
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad model document: ") + e.what());
  }
}

} // namespace elastika
