#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "elastika/common.hpp"

namespace elastika {

/// A univariate series with an integer class label. Values are finite.
struct Series {
  int label = 0;
  std::vector<double> values;

  [[nodiscard]] std::size_t size() const { return values.size(); }
  [[nodiscard]] const double* data() const { return values.data(); }
};

/// A set of equal-length labelled series, typically one split of a dataset.
struct Dataset {
  std::string name;
  std::string split;
  std::vector<Series> items;

  [[nodiscard]] std::size_t size() const { return items.size(); }
  [[nodiscard]] bool empty() const { return items.empty(); }
  [[nodiscard]] const Series& operator[](std::size_t i) const { return items[i]; }

  /// Shared series length. Datasets are validated to be rectangular on load.
  [[nodiscard]] std::size_t length() const { return items.empty() ? 0 : items[0].size(); }

  /// Distinct labels in ascending order.
  [[nodiscard]] std::vector<int> labels() const;

  /// Label -> number of series carrying it.
  [[nodiscard]] std::map<int, std::size_t> class_counts() const;
};

/// Parses a tab-separated file where each line is `<label>\t<v1>\t...<vL>`.
/// Labels must be integers (integer-valued reals accepted); values must be
/// finite reals. Throws ParseError (bad token, with line number),
/// VariableLengthError (ragged rows), or EmptyDatasetError.
[[nodiscard]] Dataset load_ucr_tsv(const std::filesystem::path& file, std::string name = "",
                                   std::string split = "");

/// Writes `dataset` in the same tab-separated format. Values are rendered
/// with shortest round-trip formatting, so load(write(d)) == d bit for bit.
void write_ucr_tsv(const Dataset& dataset, const std::filesystem::path& file);

/// Loads `<dir>/<name>/<name>_TRAIN.tsv` and `<name>_TEST.tsv`.
[[nodiscard]] std::pair<Dataset, Dataset> load_dataset_dir(const std::filesystem::path& dir,
                                                           const std::string& name);

/// Leave-one-out tuning needs every class to appear at least twice; throws
/// SingletonClassError otherwise.
void require_tunable(const Dataset& train);

/// Throws LengthMismatchError unless both splits share one series length.
void require_same_length(const Dataset& a, const Dataset& b);

/// Returns a copy with v' = v + scale * N(0, sigma_s) added elementwise,
/// where sigma_s is the population standard deviation of the series the
/// value belongs to. Consumes `rng` sequentially (series by series, element
/// by element) so a seed fully determines the result.
[[nodiscard]] Dataset add_noise(const Dataset& dataset, double scale, Rng& rng);

/// First central-difference derivative: d_i = ((s_i - s_{i-1}) +
/// (s_{i+1} - s_{i-1}) / 2) / 2 for interior points, endpoints copying their
/// neighbour. Throws SeriesTooShortError when the series has fewer than
/// three points.
[[nodiscard]] std::vector<double> derivative_values(const std::vector<double>& values);
[[nodiscard]] Series derivative_series(const Series& s);
[[nodiscard]] Dataset derivative_dataset(const Dataset& dataset);

} // namespace elastika
