#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "elastika/common.hpp"

namespace elastika {

/// One dataset's test accuracies under two classifiers.
struct PairedRow {
  std::string dataset;
  double acc_a = 0.0;
  double acc_b = 0.0;
};
using PairedAccuracies = std::vector<PairedRow>;

struct WilcoxonResult {
  double p_value = 1.0;
  std::size_t n_effective = 0;
};

/// Two-sided Wilcoxon signed-rank test on acc_a - acc_b. Zero differences
/// are discarded (n_effective counts the rest) and tied magnitudes share
/// averaged ranks. The null distribution is enumerated exactly up to
/// n_effective = 25; beyond that a normal approximation with continuity
/// and tie corrections is used. No nonzero differences → p = 1.
[[nodiscard]] WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& differences);
[[nodiscard]] WilcoxonResult wilcoxon_signed_rank(const PairedAccuracies& pairs);

struct WinTieLoss {
  std::size_t wins_a = 0;
  std::size_t ties = 0;
  std::size_t wins_b = 0;
};

/// Exact comparison per dataset; the three counts sum to pairs.size().
[[nodiscard]] WinTieLoss win_tie_loss(const PairedAccuracies& pairs);

/// Test accuracies of k classifiers over n datasets (rows are datasets).
struct AccuracyMatrix {
  std::vector<std::string> classifiers;
  std::vector<std::string> datasets;
  std::vector<std::vector<double>> accuracies;
};

struct RankTable {
  std::vector<std::string> classifiers;
  std::vector<double> mean_rank;
};

/// Mean rank per classifier, ranking each dataset's accuracies in
/// descending order (rank 1 = most accurate) with averaged ties, so each
/// dataset's ranks sum to k(k+1)/2 exactly.
[[nodiscard]] RankTable mean_ranks(const AccuracyMatrix& matrix);

/// Maximal groups of classifiers in which every pair fails the Wilcoxon
/// test at `alpha` (no pair is significantly different). Each group is
/// ascending; groups are in lexicographic order.
[[nodiscard]] std::vector<std::vector<std::size_t>> cliques(const AccuracyMatrix& matrix,
                                                            double alpha = 0.05);

/// Writes <out_base>.csv (`dataset,acc_a,acc_b` rows) and <out_base>.svg,
/// an accuracy-vs-accuracy scatter with the diagonal and win/tie/loss
/// annotation. Throws IoError when the files cannot be written.
void emit_scatter(const PairedAccuracies& pairs, const std::string& label_a,
                  const std::string& label_b, const std::filesystem::path& out_base);

/// Writes <out_base>.csv (`classifier,mean_rank` rows) and <out_base>.svg,
/// a critical-difference diagram: mean ranks on an axis, a bar per clique
/// of two or more classifiers.
void emit_cd(const RankTable& table, const std::vector<std::vector<std::size_t>>& groups,
             const std::filesystem::path& out_base);

} // namespace elastika
