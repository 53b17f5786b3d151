#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "elastika/cost.hpp"
#include "elastika/distances.hpp"
#include "elastika/series.hpp"

namespace elastika {

/// The eleven node-splitter distances. The gamma-aware ones (SQED and the
/// DTW family) draw their cost exponent from the configured set when
/// plus_mode is on; the edit family keeps its original costs.
enum class SplitterKind {
  Sqed,
  DtwFull,
  DtwWindow,
  DdtwFull,
  DdtwWindow,
  Wdtw,
  Dwdtw,
  Lcss,
  Erp,
  Msm,
  Twe,
};

inline constexpr std::size_t kSplitterKindCount = 11;

[[nodiscard]] const char* splitter_kind_name(SplitterKind kind);
[[nodiscard]] SplitterKind splitter_kind_from(const std::string& name);
[[nodiscard]] bool splitter_kind_gamma_aware(SplitterKind kind);
[[nodiscard]] bool splitter_kind_derivative(SplitterKind kind);

struct PFConfig {
  std::size_t num_trees = 100;
  std::size_t candidates_per_node = 5;
  bool plus_mode = false;
  ExponentSet exponent_set = ExponentSet::named(ExponentSetName::A);
  std::uint64_t seed = 0;
};

/// One sampled proximity split: a distance configuration plus one exemplar
/// per class present at the node (ascending class order).
struct Splitter {
  SplitterKind kind = SplitterKind::Sqed;
  double gamma = 2.0;
  std::size_t window = 0;
  double epsilon = 0.0;
  double gap_value = 0.0;
  double g = 0.0;
  double cost_c = 0.0;
  double nu = 0.0;
  double lambda = 0.0;
  /// Indices into the training set.
  std::vector<std::size_t> exemplars;
};

struct PFNode {
  bool is_leaf = false;
  int label = 0;
  Splitter splitter;
  /// Child node indices, parallel to splitter.exemplars.
  std::vector<std::size_t> children;
};

struct ProximityTree {
  /// Index 0 is the root.
  std::vector<PFNode> nodes;
};

struct ProximityForest {
  PFConfig config;
  std::vector<ProximityTree> trees;
};

/// Gini impurity 1 - sum(p^2). Throws UsageError on an all-zero count set.
[[nodiscard]] double gini(const std::vector<std::size_t>& class_counts);

/// Weighted mean child impurity; lower is a better split.
[[nodiscard]] double split_quality(const std::vector<std::vector<std::size_t>>& child_counts);

/// Population standard deviation over every value in the dataset (the
/// scale used when sampling LCSS/ERP parameters).
[[nodiscard]] double dataset_value_std(const Dataset& data);

/// Draws a random splitter for a node: uniform distance kind, kind-specific
/// parameters from the published sampling spaces, gamma from the exponent
/// set for gamma-aware kinds in plus mode (gamma = 2 otherwise), and one
/// uniform exemplar per class present. Derivative kinds are skipped when
/// the series are too short to differentiate.
[[nodiscard]] Splitter sample_splitter(const Dataset& train,
                                       const std::vector<std::size_t>& node_items,
                                       const PFConfig& config, double sigma_d, Rng& rng);

/// Distance from a query to a train exemplar under a splitter. Derivative
/// kinds take the precomputed derivative series instead.
[[nodiscard]] double splitter_distance(const Splitter& splitter, const std::vector<double>& query,
                                       const std::vector<double>& query_deriv,
                                       const std::vector<double>& exemplar,
                                       const std::vector<double>& exemplar_deriv);

/// Grows config.num_trees independent proximity trees. Tree t draws from
/// the substream spawn(t) of the master seed, so parallel and serial
/// training produce identical forests.
[[nodiscard]] ProximityForest train_pf(const Dataset& train, const PFConfig& config);

/// Majority vote over trees; ties take the smallest label.
[[nodiscard]] int pf_predict(const ProximityForest& forest, const Dataset& train,
                             const std::vector<double>& query);
[[nodiscard]] std::vector<int> pf_predict_all(const ProximityForest& forest, const Dataset& train,
                                              const Dataset& test);
[[nodiscard]] double pf_accuracy(const ProximityForest& forest, const Dataset& train,
                                 const Dataset& test);

/// JSON round-trip; exemplars are stored as train-set indices, so
/// prediction needs the same training data the forest was grown on.
[[nodiscard]] std::string pf_to_json(const ProximityForest& forest);
[[nodiscard]] ProximityForest pf_from_json(const std::string& text);

} // namespace elastika
