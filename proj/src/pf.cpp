#include "elastika/pf.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>

#include <json.hpp>

#include "elastika/common.hpp"

namespace elastika {

namespace {

constexpr std::array<SplitterKind, kSplitterKindCount> kAllKinds = {
    SplitterKind::Sqed,       SplitterKind::DtwFull, SplitterKind::DtwWindow,
    SplitterKind::DdtwFull,   SplitterKind::DdtwWindow,
    SplitterKind::Wdtw,       SplitterKind::Dwdtw,
    SplitterKind::Lcss,       SplitterKind::Erp,
    SplitterKind::Msm,        SplitterKind::Twe,
};

/// 100 geometrically spaced MSM costs from 0.01 to 100.
const std::vector<double>& msm_cost_ladder() {
  static const std::vector<double> ladder = [] {
    std::vector<double> v(100);
    for (std::size_t i = 0; i < 100; ++i) {
      v[i] = std::pow(10.0, -2.0 + 4.0 * static_cast<double>(i) / 99.0);
    }
    return v;
  }();
  return ladder;
}

/// The classic stiffness ladder for TWE's nu parameter.
const std::vector<double>& twe_nu_ladder() {
  static const std::vector<double> ladder = {1e-5, 1e-4, 5e-4, 1e-3, 5e-3,
                                             1e-2, 5e-2, 0.1,  0.5,  1.0};
  return ladder;
}

bool kind_uses_window(SplitterKind kind) {
  return kind == SplitterKind::DtwWindow || kind == SplitterKind::DdtwWindow ||
         kind == SplitterKind::Lcss || kind == SplitterKind::Erp;
}

const std::vector<double>& deriv_or_empty(const std::vector<std::vector<double>>& deriv,
                                          std::size_t idx) {
  static const std::vector<double> kEmpty;
  return deriv.empty() ? kEmpty : deriv[idx];
}

/// Most frequent label; ties take the smallest label (map order is ascending).
int majority_label(const std::map<int, std::size_t>& counts) {
  int best = 0;
  std::size_t best_n = 0;
  for (const auto& [label, n] : counts) {
    if (n > best_n) {
      best = label;
      best_n = n;
    }
  }
  return best;
}

struct TreeContext {
  const Dataset& train;
  const std::vector<std::vector<double>>& deriv; // empty when derivatives are unused
  const PFConfig& config;
  double sigma_d;
};

/// Sends every item to the branch of its nearest exemplar (strict <, so
/// distance ties keep the earliest exemplar, i.e. the smallest class).
std::vector<std::vector<std::size_t>> route_items(const TreeContext& ctx, const Splitter& splitter,
                                                  const std::vector<std::size_t>& items) {
  std::vector<std::vector<std::size_t>> branches(splitter.exemplars.size());
  for (const std::size_t item : items) {
    const std::vector<double>& q = ctx.train[item].values;
    const std::vector<double>& qd = deriv_or_empty(ctx.deriv, item);
    double best = kPositiveInfinity;
    std::size_t best_branch = 0;
    for (std::size_t b = 0; b < splitter.exemplars.size(); ++b) {
      const std::size_t ex = splitter.exemplars[b];
      const double d = splitter_distance(splitter, q, qd, ctx.train[ex].values,
                                         deriv_or_empty(ctx.deriv, ex));
      if (d < best) {
        best = d;
        best_branch = b;
      }
    }
    branches[best_branch].push_back(item);
  }
  return branches;
}

std::vector<std::vector<std::size_t>> branch_class_counts(
    const TreeContext& ctx, const std::vector<std::vector<std::size_t>>& branches,
    const std::map<int, std::size_t>& label_slot) {
  std::vector<std::vector<std::size_t>> counts(branches.size(),
                                               std::vector<std::size_t>(label_slot.size(), 0));
  for (std::size_t b = 0; b < branches.size(); ++b) {
    for (const std::size_t item : branches[b]) {
      ++counts[b][label_slot.at(ctx.train[item].label)];
    }
  }
  return counts;
}

std::size_t make_leaf(ProximityTree& tree, int label) {
  PFNode node;
  node.is_leaf = true;
  node.label = label;
  tree.nodes.push_back(std::move(node));
  return tree.nodes.size() - 1;
}

std::size_t grow_node(const TreeContext& ctx, Rng& rng, const std::vector<std::size_t>& items,
                      ProximityTree& tree) {
  internal_check(!items.empty(), "tree growth reached an empty node");

  std::map<int, std::size_t> counts;
  for (const std::size_t item : items) { ++counts[ctx.train[item].label]; }
  if (counts.size() == 1) { return make_leaf(tree, counts.begin()->first); }

  // Identical series with conflicting labels cannot be separated by any
  // distance; collapse them into a majority leaf.
  const std::vector<double>& first = ctx.train[items.front()].values;
  const bool all_identical =
      std::all_of(items.begin(), items.end(),
                  [&](std::size_t item) { return ctx.train[item].values == first; });
  if (all_identical) { return make_leaf(tree, majority_label(counts)); }

  std::map<int, std::size_t> label_slot;
  for (const auto& [label, n] : counts) {
    label_slot.emplace(label, label_slot.size());
    (void)n;
  }

  Splitter best_splitter;
  std::vector<std::vector<std::size_t>> best_branches;
  double best_quality = kPositiveInfinity;
  for (std::size_t c = 0; c < ctx.config.candidates_per_node; ++c) {
    Splitter candidate = sample_splitter(ctx.train, items, ctx.config, ctx.sigma_d, rng);
    std::vector<std::vector<std::size_t>> branches = route_items(ctx, candidate, items);
    const double quality = split_quality(branch_class_counts(ctx, branches, label_slot));
    if (quality < best_quality) {
      best_quality = quality;
      best_splitter = std::move(candidate);
      best_branches = std::move(branches);
    }
  }

  // A candidate set can fail to separate anything (e.g. exemplars of
  // different classes with identical series); stop rather than recurse on
  // the same item set forever.
  const bool no_progress = std::any_of(
      best_branches.begin(), best_branches.end(),
      [&](const std::vector<std::size_t>& b) { return b.size() == items.size(); });
  if (no_progress) { return make_leaf(tree, majority_label(counts)); }

  PFNode node;
  node.splitter = best_splitter;
  tree.nodes.push_back(std::move(node));
  const std::size_t idx = tree.nodes.size() - 1;
  for (std::size_t b = 0; b < best_branches.size(); ++b) {
    std::size_t child;
    if (best_branches[b].empty()) {
      child = make_leaf(tree, ctx.train[best_splitter.exemplars[b]].label);
    } else {
      child = grow_node(ctx, rng, best_branches[b], tree);
    }
    tree.nodes[idx].children.push_back(child);
  }
  return idx;
}

bool forest_uses_derivative(const ProximityForest& forest) {
  for (const ProximityTree& tree : forest.trees) {
    for (const PFNode& node : tree.nodes) {
      if (!node.is_leaf && splitter_kind_derivative(node.splitter.kind)) { return true; }
    }
  }
  return false;
}

std::vector<std::vector<double>> dataset_derivatives(const Dataset& data) {
  std::vector<std::vector<double>> deriv;
  deriv.reserve(data.size());
  for (const Series& s : data.items) { deriv.push_back(derivative_values(s.values)); }
  return deriv;
}

void require_forest_matches(const ProximityForest& forest, const Dataset& train) {
  for (const ProximityTree& tree : forest.trees) {
    for (const PFNode& node : tree.nodes) {
      if (node.is_leaf) { continue; }
      for (const std::size_t ex : node.splitter.exemplars) {
        if (ex >= train.size()) {
          throw UsageError("forest references a training item out of range; "
                           "was it grown on a different training set?");
        }
      }
    }
  }
}

int tree_predict(const ProximityTree& tree, const Dataset& train,
                 const std::vector<std::vector<double>>& train_deriv,
                 const std::vector<double>& query, const std::vector<double>& query_deriv) {
  std::size_t idx = 0;
  while (true) {
    internal_check(idx < tree.nodes.size(), "tree traversal left the node table");
    const PFNode& node = tree.nodes[idx];
    if (node.is_leaf) { return node.label; }
    double best = kPositiveInfinity;
    std::size_t best_branch = 0;
    for (std::size_t b = 0; b < node.splitter.exemplars.size(); ++b) {
      const std::size_t ex = node.splitter.exemplars[b];
      const double d = splitter_distance(node.splitter, query, query_deriv, train[ex].values,
                                         deriv_or_empty(train_deriv, ex));
      if (d < best) {
        best = d;
        best_branch = b;
      }
    }
    idx = node.children[best_branch];
  }
}

int vote(const ProximityForest& forest, const Dataset& train,
         const std::vector<std::vector<double>>& train_deriv, const std::vector<double>& query,
         const std::vector<double>& query_deriv) {
  std::map<int, std::size_t> votes;
  for (const ProximityTree& tree : forest.trees) {
    ++votes[tree_predict(tree, train, train_deriv, query, query_deriv)];
  }
  return majority_label(votes);
}

} // namespace

const char* splitter_kind_name(SplitterKind kind) {
  switch (kind) {
    case SplitterKind::Sqed: return "sqed";
    case SplitterKind::DtwFull: return "dtw";
    case SplitterKind::DtwWindow: return "dtw_w";
    case SplitterKind::DdtwFull: return "ddtw";
    case SplitterKind::DdtwWindow: return "ddtw_w";
    case SplitterKind::Wdtw: return "wdtw";
    case SplitterKind::Dwdtw: return "dwdtw";
    case SplitterKind::Lcss: return "lcss";
    case SplitterKind::Erp: return "erp";
    case SplitterKind::Msm: return "msm";
    case SplitterKind::Twe: return "twe";
  }
  throw InternalError("unknown splitter kind");
}

SplitterKind splitter_kind_from(const std::string& name) {
  for (const SplitterKind kind : kAllKinds) {
    if (name == splitter_kind_name(kind)) { return kind; }
  }
  throw ParseError("unknown splitter kind '" + name + "'");
}

bool splitter_kind_gamma_aware(SplitterKind kind) {
  switch (kind) {
    case SplitterKind::Sqed:
    case SplitterKind::DtwFull:
    case SplitterKind::DtwWindow:
    case SplitterKind::DdtwFull:
    case SplitterKind::DdtwWindow:
    case SplitterKind::Wdtw:
    case SplitterKind::Dwdtw: return true;
    default: return false;
  }
}

bool splitter_kind_derivative(SplitterKind kind) {
  return kind == SplitterKind::DdtwFull || kind == SplitterKind::DdtwWindow ||
         kind == SplitterKind::Dwdtw;
}

double gini(const std::vector<std::size_t>& class_counts) {
  std::size_t total = 0;
  for (const std::size_t c : class_counts) { total += c; }
  if (total == 0) { throw UsageError("gini needs a nonzero total count"); }
  double sum_sq = 0.0;
  for (const std::size_t c : class_counts) {
    const double p = static_cast<double>(c) / static_cast<double>(total);
    sum_sq += p * p;
  }
  return 1.0 - sum_sq;
}

double split_quality(const std::vector<std::vector<std::size_t>>& child_counts) {
  std::size_t total = 0;
  for (const auto& child : child_counts) {
    for (const std::size_t c : child) { total += c; }
  }
  if (total == 0) { throw UsageError("split quality needs a nonzero total count"); }
  double quality = 0.0;
  for (const auto& child : child_counts) {
    std::size_t n = 0;
    for (const std::size_t c : child) { n += c; }
    if (n == 0) { continue; }
    quality += (static_cast<double>(n) / static_cast<double>(total)) * gini(child);
  }
  return quality;
}

double dataset_value_std(const Dataset& data) {
  std::size_t n = 0;
  double mean = 0.0;
  for (const Series& s : data.items) {
    for (const double v : s.values) {
      ++n;
      mean += v;
    }
  }
  if (n == 0) { throw UsageError("dataset has no values"); }
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (const Series& s : data.items) {
    for (const double v : s.values) { var += (v - mean) * (v - mean); }
  }
  return std::sqrt(var / static_cast<double>(n));
}

Splitter sample_splitter(const Dataset& train, const std::vector<std::size_t>& node_items,
                         const PFConfig& config, double sigma_d, Rng& rng) {
  if (node_items.empty()) { throw UsageError("cannot sample a splitter for an empty node"); }
  if (!(std::isfinite(sigma_d) && sigma_d >= 0.0)) {
    throw UsageError("sigma_d must be finite and >= 0");
  }

  std::map<int, std::vector<std::size_t>> by_class;
  for (const std::size_t item : node_items) { by_class[train[item].label].push_back(item); }
  if (by_class.size() < 2) {
    throw UsageError("cannot sample a splitter for a single-class node");
  }

  const std::size_t len = train.length();
  std::vector<SplitterKind> allowed;
  allowed.reserve(kSplitterKindCount);
  for (const SplitterKind kind : kAllKinds) {
    if (splitter_kind_derivative(kind) && len < 3) { continue; }
    allowed.push_back(kind);
  }

  // Draw order is part of the reproducibility contract: kind, then gamma
  // (plus mode, gamma-aware kinds only), then kind parameters, then one
  // exemplar per class in ascending class order.
  Splitter sp;
  sp.kind = allowed[rng.next_index(allowed.size())];
  sp.gamma = 2.0;
  if (config.plus_mode && splitter_kind_gamma_aware(sp.kind)) {
    sp.gamma = config.exponent_set.exponents[rng.next_index(config.exponent_set.size())].gamma;
  }

  const std::size_t max_band = len / 4;
  switch (sp.kind) {
    case SplitterKind::Sqed:
    case SplitterKind::DtwFull:
    case SplitterKind::DdtwFull: break;
    case SplitterKind::DtwWindow:
    case SplitterKind::DdtwWindow: sp.window = rng.next_index(max_band + 1); break;
    case SplitterKind::Wdtw:
    case SplitterKind::Dwdtw: sp.g = rng.next_real(0.0, 1.0); break;
    case SplitterKind::Lcss: {
      // A flat dataset (sigma 0) would give epsilon 0, which LCSS rejects;
      // any positive threshold behaves identically there.
      const double u = rng.next_unit();
      sp.epsilon = sigma_d > 0.0 ? sigma_d / 5.0 + (sigma_d - sigma_d / 5.0) * u : 1.0;
      sp.window = rng.next_index(max_band + 1);
      break;
    }
    case SplitterKind::Erp: {
      const double u = rng.next_unit();
      sp.gap_value = sigma_d > 0.0 ? sigma_d / 5.0 + (sigma_d - sigma_d / 5.0) * u : 0.0;
      sp.window = rng.next_index(max_band + 1);
      break;
    }
    case SplitterKind::Msm: sp.cost_c = msm_cost_ladder()[rng.next_index(100)]; break;
    case SplitterKind::Twe:
      sp.nu = twe_nu_ladder()[rng.next_index(10)];
      sp.lambda = static_cast<double>(rng.next_index(10)) * 0.1 / 9.0;
      break;
  }

  sp.exemplars.reserve(by_class.size());
  for (const auto& [label, members] : by_class) {
    sp.exemplars.push_back(members[rng.next_index(members.size())]);
    (void)label;
  }
  return sp;
}

double splitter_distance(const Splitter& splitter, const std::vector<double>& query,
                         const std::vector<double>& query_deriv,
                         const std::vector<double>& exemplar,
                         const std::vector<double>& exemplar_deriv) {
  const CostExponent gamma(splitter.gamma);
  switch (splitter.kind) {
    case SplitterKind::Sqed: return direct_alignment(query, exemplar, gamma);
    case SplitterKind::DtwFull:
      return dtw(query, exemplar, WarpingWindow::unlimited(), gamma);
    case SplitterKind::DtwWindow:
      return dtw(query, exemplar, WarpingWindow::bounded(splitter.window), gamma);
    case SplitterKind::DdtwFull:
      return dtw(query_deriv, exemplar_deriv, WarpingWindow::unlimited(), gamma);
    case SplitterKind::DdtwWindow:
      return dtw(query_deriv, exemplar_deriv, WarpingWindow::bounded(splitter.window), gamma);
    case SplitterKind::Wdtw: return wdtw(query, exemplar, splitter.g, gamma);
    case SplitterKind::Dwdtw: return wdtw(query_deriv, exemplar_deriv, splitter.g, gamma);
    case SplitterKind::Lcss:
      return lcss(query, exemplar, splitter.epsilon, WarpingWindow::bounded(splitter.window));
    case SplitterKind::Erp:
      return erp(query, exemplar, splitter.gap_value, WarpingWindow::bounded(splitter.window));
    case SplitterKind::Msm: return msm(query, exemplar, splitter.cost_c);
    case SplitterKind::Twe: return twe(query, exemplar, splitter.nu, splitter.lambda);
  }
  throw InternalError("unknown splitter kind");
}

ProximityForest train_pf(const Dataset& train, const PFConfig& config) {
  if (train.empty()) { throw EmptyDatasetError("training set is empty"); }
  if (config.num_trees < 1) { throw UsageError("num_trees must be >= 1"); }
  if (config.candidates_per_node < 1) { throw UsageError("candidates_per_node must be >= 1"); }
  if (config.plus_mode && config.exponent_set.size() == 0) {
    throw UsageError("plus mode needs a nonempty exponent set");
  }

  const double sigma_d = dataset_value_std(train);
  std::vector<std::vector<double>> deriv;
  if (train.length() >= 3) { deriv = dataset_derivatives(train); }

  std::vector<std::size_t> all_items(train.size());
  std::iota(all_items.begin(), all_items.end(), std::size_t{0});

  ProximityForest forest;
  forest.config = config;
  forest.trees.resize(config.num_trees);
  const Rng master(config.seed);
  const TreeContext ctx{train, deriv, config, sigma_d};
  parallel_for(config.num_trees, [&](std::size_t t) {
    Rng rng = master.spawn(t);
    ProximityTree tree;
    const std::size_t root = grow_node(ctx, rng, all_items, tree);
    internal_check(root == 0, "tree root must be node 0");
    forest.trees[t] = std::move(tree);
  });
  return forest;
}

int pf_predict(const ProximityForest& forest, const Dataset& train,
               const std::vector<double>& query) {
  if (forest.trees.empty()) { throw UsageError("forest has no trees"); }
  if (train.empty()) { throw EmptyDatasetError("training set is empty"); }
  if (query.size() != train.length()) {
    throw LengthMismatchError("query length does not match the training series length");
  }
  require_forest_matches(forest, train);

  std::vector<std::vector<double>> train_deriv;
  std::vector<double> query_deriv;
  if (forest_uses_derivative(forest)) {
    train_deriv = dataset_derivatives(train);
    query_deriv = derivative_values(query);
  }
  return vote(forest, train, train_deriv, query, query_deriv);
}

std::vector<int> pf_predict_all(const ProximityForest& forest, const Dataset& train,
                                const Dataset& test) {
  if (forest.trees.empty()) { throw UsageError("forest has no trees"); }
  if (train.empty()) { throw EmptyDatasetError("training set is empty"); }
  if (test.empty()) { throw UsageError("test set is empty"); }
  require_same_length(train, test);
  require_forest_matches(forest, train);

  std::vector<std::vector<double>> train_deriv;
  const bool use_deriv = forest_uses_derivative(forest);
  if (use_deriv) { train_deriv = dataset_derivatives(train); }

  std::vector<int> predictions(test.size());
  parallel_for(test.size(), [&](std::size_t i) {
    std::vector<double> query_deriv;
    if (use_deriv) { query_deriv = derivative_values(test[i].values); }
    predictions[i] = vote(forest, train, train_deriv, test[i].values, query_deriv);
  });
  return predictions;
}

double pf_accuracy(const ProximityForest& forest, const Dataset& train, const Dataset& test) {
  const std::vector<int> predictions = pf_predict_all(forest, train, test);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    if (predictions[i] == test[i].label) { ++correct; }
  }
  return static_cast<double>(correct) / static_cast<double>(test.size());
}

std::string pf_to_json(const ProximityForest& forest) {
  nlohmann::json doc;
  doc["num_trees"] = forest.config.num_trees;
  doc["candidates_per_node"] = forest.config.candidates_per_node;
  doc["plus_mode"] = forest.config.plus_mode;
  doc["seed"] = forest.config.seed;

  nlohmann::json set;
  set["label"] = exponent_set_label(forest.config.exponent_set.name);
  nlohmann::json gammas = nlohmann::json::array();
  for (const CostExponent& g : forest.config.exponent_set.exponents) { gammas.push_back(g.gamma); }
  set["gammas"] = std::move(gammas);
  doc["exponent_set"] = std::move(set);

  nlohmann::json trees = nlohmann::json::array();
  for (const ProximityTree& tree : forest.trees) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const PFNode& node : tree.nodes) {
      nlohmann::json n;
      if (node.is_leaf) {
        n["leaf"] = node.label;
      } else {
        const Splitter& sp = node.splitter;
        n["kind"] = splitter_kind_name(sp.kind);
        if (splitter_kind_gamma_aware(sp.kind)) { n["gamma"] = sp.gamma; }
        if (kind_uses_window(sp.kind)) { n["window"] = sp.window; }
        switch (sp.kind) {
          case SplitterKind::Wdtw:
          case SplitterKind::Dwdtw: n["g"] = sp.g; break;
          case SplitterKind::Lcss: n["epsilon"] = sp.epsilon; break;
          case SplitterKind::Erp: n["gap"] = sp.gap_value; break;
          case SplitterKind::Msm: n["c"] = sp.cost_c; break;
          case SplitterKind::Twe:
            n["nu"] = sp.nu;
            n["lambda"] = sp.lambda;
            break;
          default: break;
        }
        n["exemplars"] = sp.exemplars;
        n["children"] = node.children;
      }
      nodes.push_back(std::move(n));
    }
    nlohmann::json t;
    t["nodes"] = std::move(nodes);
    trees.push_back(std::move(t));
  }
  doc["trees"] = std::move(trees);
  return doc.dump();
}

ProximityForest pf_from_json(const std::string& text) {
  try {
    const nlohmann::json doc = nlohmann::json::parse(text);

    ProximityForest forest;
    forest.config.num_trees = doc.at("num_trees").get<std::size_t>();
    forest.config.candidates_per_node = doc.at("candidates_per_node").get<std::size_t>();
    forest.config.plus_mode = doc.at("plus_mode").get<bool>();
    forest.config.seed = doc.at("seed").get<std::uint64_t>();

    const nlohmann::json& set = doc.at("exponent_set");
    const std::string label = set.at("label").get<std::string>();
    const std::vector<double> gammas = set.at("gammas").get<std::vector<double>>();
    if (label == "custom") {
      forest.config.exponent_set = ExponentSet::custom(gammas);
    } else {
      forest.config.exponent_set = ExponentSet::named(label);
      if (forest.config.exponent_set.size() != gammas.size()) {
        throw ParseError("exponent set gammas do not match label '" + label + "'");
      }
      for (std::size_t i = 0; i < gammas.size(); ++i) {
        if (forest.config.exponent_set.exponents[i].gamma != gammas[i]) {
          throw ParseError("exponent set gammas do not match label '" + label + "'");
        }
      }
    }

    const nlohmann::json& trees = doc.at("trees");
    if (!trees.is_array() || trees.size() != forest.config.num_trees) {
      throw ParseError("forest JSON tree count does not match num_trees");
    }
    for (const nlohmann::json& t : trees) {
      const nlohmann::json& nodes = t.at("nodes");
      if (!nodes.is_array() || nodes.empty()) {
        throw ParseError("forest JSON tree has no nodes");
      }
      ProximityTree tree;
      tree.nodes.reserve(nodes.size());
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        const nlohmann::json& n = nodes[i];
        PFNode node;
        if (n.contains("leaf")) {
          node.is_leaf = true;
          node.label = n.at("leaf").get<int>();
        } else {
          Splitter& sp = node.splitter;
          sp.kind = splitter_kind_from(n.at("kind").get<std::string>());
          sp.gamma = splitter_kind_gamma_aware(sp.kind) ? n.at("gamma").get<double>() : 2.0;
          if (kind_uses_window(sp.kind)) { sp.window = n.at("window").get<std::size_t>(); }
          switch (sp.kind) {
            case SplitterKind::Wdtw:
            case SplitterKind::Dwdtw: sp.g = n.at("g").get<double>(); break;
            case SplitterKind::Lcss: sp.epsilon = n.at("epsilon").get<double>(); break;
            case SplitterKind::Erp: sp.gap_value = n.at("gap").get<double>(); break;
            case SplitterKind::Msm: sp.cost_c = n.at("c").get<double>(); break;
            case SplitterKind::Twe:
              sp.nu = n.at("nu").get<double>();
              sp.lambda = n.at("lambda").get<double>();
              break;
            default: break;
          }
          sp.exemplars = n.at("exemplars").get<std::vector<std::size_t>>();
          node.children = n.at("children").get<std::vector<std::size_t>>();
          if (sp.exemplars.empty() || node.children.size() != sp.exemplars.size()) {
            throw ParseError("forest JSON node children do not match its exemplars");
          }
          // Children must point forward; this is what makes traversal finite.
          for (const std::size_t child : node.children) {
            if (child <= i || child >= nodes.size()) {
              throw ParseError("forest JSON node has an out-of-order child index");
            }
          }
        }
        tree.nodes.push_back(std::move(node));
      }
      forest.trees.push_back(std::move(tree));
    }
    return forest;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("forest JSON: ") + e.what());
  }
}

} // namespace elastika
