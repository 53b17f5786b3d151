#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "elastika/cost.hpp"
#include "elastika/distances.hpp"
#include "elastika/series.hpp"

namespace elastika {

enum class TunedKind { Dtw, Adtw };

[[nodiscard]] const char* tuned_kind_name(TunedKind kind);
[[nodiscard]] TunedKind tuned_kind_from(const std::string& name);

/// Evenly spaced integer windows over [0, L-2]: round(k(L-2)/(count-1)) for
/// k = 0..count-1, deduplicated ascending. Always contains 0 and L-2.
[[nodiscard]] std::vector<std::size_t> window_grid(std::size_t len, std::size_t count);

/// Penalty ratios (i/count)^5 for i = 1..count, ascending; the last is
/// exactly 1. At count = 100 these are the hundred nominal steps.
[[nodiscard]] std::vector<double> penalty_ratios(std::size_t count);

/// Mean direct alignment over up to 4000 seeded random ordered pairs of
/// distinct train series (all distinct pairs when fewer exist).
[[nodiscard]] double estimate_omega_prime(const Dataset& train, const CostExponent& gamma,
                                          std::uint64_t seed);

/// One searchable configuration: an exponent plus the kind-specific
/// parameter (window for DTW, penalty for ADTW).
struct GridEntry {
  std::size_t gamma_index = 0;
  WarpingWindow window;
  double omega = 0.0;
};

/// The full (gamma x parameter) search grid, entries grouped by gamma in
/// set order and ascending in the parameter within each gamma.
struct ParamGrid {
  TunedKind kind = TunedKind::Dtw;
  ExponentSet set;
  std::size_t per_gamma_count = 0;
  std::vector<GridEntry> entries;
  /// Per-gamma scale for ADTW penalties (empty for DTW grids).
  std::vector<double> omega_primes;

  /// Entry count before window deduplication.
  [[nodiscard]] std::size_t nominal_size() const { return set.size() * per_gamma_count; }

  [[nodiscard]] static ParamGrid dtw(const ExponentSet& set, std::size_t len,
                                     std::size_t per_gamma_count);
  /// One unlimited-window entry per gamma (full-window DTW mode).
  [[nodiscard]] static ParamGrid dtw_full(const ExponentSet& set);
  [[nodiscard]] static ParamGrid adtw(const ExponentSet& set, const Dataset& train,
                                      std::size_t per_gamma_count, std::uint64_t seed);
};

/// Distance between two series under one grid configuration.
[[nodiscard]] double grid_distance(const ParamGrid& grid, const GridEntry& entry,
                                   const std::vector<double>& a, const std::vector<double>& b);

/// Per-entry leave-one-out correct counts.
struct LoocvTable {
  std::vector<std::size_t> correct;
  std::size_t total = 0;
};

/// Leave-one-out 1-NN correct count for every grid entry. Nearest-neighbor
/// distance ties break toward the smallest item index.
[[nodiscard]] LoocvTable loocv_table(const Dataset& train, const ParamGrid& grid);

/// Grid-entry choice given a LOOCV table, applying the tie hierarchy:
/// per gamma keep the best entry (ties: smallest window for DTW, median
/// grid index for ADTW, lower middle when even); across gamma champions
/// keep the maximal-accuracy ones and take the median gamma (even count:
/// of the two middle ones prefer the gamma with smaller |gamma - 1|, then
/// the smaller gamma).
[[nodiscard]] std::size_t select_best_entry(const ParamGrid& grid,
                                            const std::vector<std::size_t>& correct);

struct TrainedModel {
  TunedKind kind = TunedKind::Dtw;
  double gamma = 2.0;
  WarpingWindow window;
  double omega = 0.0;
  std::size_t train_correct = 0;
  std::size_t train_total = 0;
  std::string set_label;
  std::size_t per_gamma_count = 0;
  std::uint64_t seed = 0;
  bool full_window = false;

  [[nodiscard]] double train_accuracy() const {
    return train_total == 0 ? 0.0
                            : static_cast<double>(train_correct) / static_cast<double>(train_total);
  }
};

/// LOOCV-tunes (gamma, parameter) over the grid and returns the champion.
[[nodiscard]] TrainedModel train_plus(const Dataset& train, TunedKind kind,
                                      const ExponentSet& set, std::size_t per_gamma_count,
                                      std::uint64_t seed);

/// Full-window variant: only gamma is searched; the window stays unlimited.
[[nodiscard]] TrainedModel train_full_window(const Dataset& train, const ExponentSet& set,
                                             std::uint64_t seed);

/// Distance under a trained model's configuration.
[[nodiscard]] double model_distance(const TrainedModel& model, const std::vector<double>& a,
                                    const std::vector<double>& b);

/// 1-NN labels for each test item (ties toward the smallest train index).
[[nodiscard]] std::vector<int> classify(const TrainedModel& model, const Dataset& train,
                                        const Dataset& test);

/// Fraction of test items whose 1-NN in train shares their label.
[[nodiscard]] double classify_accuracy(const TrainedModel& model, const Dataset& train,
                                       const Dataset& test);

/// JSON round-trip for persistence; the document carries distance, gamma,
/// param, train accuracy, grid provenance, and seed.
[[nodiscard]] std::string model_to_json(const TrainedModel& model);
[[nodiscard]] TrainedModel model_from_json(const std::string& text);

} // namespace elastika
