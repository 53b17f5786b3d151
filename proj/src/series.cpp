#include "elastika/series.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <string_view>
#include <system_error>

namespace elastika {

namespace {

double parse_double(std::string_view field, const std::filesystem::path& file,
                    std::size_t line_no, const char* what) {
  double value = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || field.empty()) {
    throw ParseError(file.string() + ":" + std::to_string(line_no) + ": bad " + what + " '" +
                     std::string(field) + "'");
  }
  return value;
}

int parse_label(std::string_view field, const std::filesystem::path& file, std::size_t line_no) {
  const double value = parse_double(field, file, line_no, "label");
  const double rounded = std::nearbyint(value);
  if (!(rounded == value) || value < std::numeric_limits<int>::min() ||
      value > std::numeric_limits<int>::max()) {
    throw ParseError(file.string() + ":" + std::to_string(line_no) + ": label '" +
                     std::string(field) + "' is not an integer");
  }
  return static_cast<int>(rounded);
}

void render_double(std::string& out, double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  internal_check(ec == std::errc(), "to_chars failed");
  out.append(buf, ptr);
}

} // namespace

std::vector<int> Dataset::labels() const {
  std::set<int> distinct;
  for (const Series& s : items) { distinct.insert(s.label); }
  return {distinct.begin(), distinct.end()};
}

std::map<int, std::size_t> Dataset::class_counts() const {
  std::map<int, std::size_t> counts;
  for (const Series& s : items) { ++counts[s.label]; }
  return counts;
}

Dataset load_ucr_tsv(const std::filesystem::path& file, std::string name, std::string split) {
  std::ifstream in(file);
  if (!in) { throw IoError("cannot open '" + file.string() + "' for reading"); }

  Dataset dataset;
  dataset.name = std::move(name);
  dataset.split = std::move(split);
  if (dataset.name.empty()) { dataset.name = file.stem().string(); }

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') { line.pop_back(); }
    if (line.empty()) { continue; }

    Series series;
    std::string_view rest(line);
    bool first_field = true;
    while (true) {
      const std::size_t tab = rest.find('\t');
      const std::string_view field = rest.substr(0, tab);
      if (first_field) {
        series.label = parse_label(field, file, line_no);
        first_field = false;
      } else {
        const double v = parse_double(field, file, line_no, "value");
        if (!std::isfinite(v)) {
          throw ParseError(file.string() + ":" + std::to_string(line_no) +
                           ": non-finite value '" + std::string(field) + "'");
        }
        series.values.push_back(v);
      }
      if (tab == std::string_view::npos) { break; }
      rest.remove_prefix(tab + 1);
    }

    if (series.values.empty()) {
      throw ParseError(file.string() + ":" + std::to_string(line_no) + ": row has no values");
    }
    if (!dataset.items.empty() && series.size() != dataset.length()) {
      throw VariableLengthError(file.string() + ":" + std::to_string(line_no) + ": row has " +
                                std::to_string(series.size()) + " values, expected " +
                                std::to_string(dataset.length()));
    }
    dataset.items.push_back(std::move(series));
  }

  if (in.bad()) { throw IoError("error while reading '" + file.string() + "'"); }
  if (dataset.items.empty()) { throw EmptyDatasetError("'" + file.string() + "' holds no series"); }
  return dataset;
}

void write_ucr_tsv(const Dataset& dataset, const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) { throw IoError("cannot open '" + file.string() + "' for writing"); }
  std::string line;
  for (const Series& s : dataset.items) {
    line.clear();
    line += std::to_string(s.label);
    for (const double v : s.values) {
      line += '\t';
      render_double(line, v);
    }
    line += '\n';
    out << line;
  }
  out.flush();
  if (!out) { throw IoError("error while writing '" + file.string() + "'"); }
}

std::pair<Dataset, Dataset> load_dataset_dir(const std::filesystem::path& dir,
                                             const std::string& name) {
  const std::filesystem::path base = dir / name;
  Dataset train = load_ucr_tsv(base / (name + "_TRAIN.tsv"), name, "TRAIN");
  Dataset test = load_ucr_tsv(base / (name + "_TEST.tsv"), name, "TEST");
  require_same_length(train, test);
  return {std::move(train), std::move(test)};
}

void require_tunable(const Dataset& train) {
  if (train.empty()) { throw EmptyDatasetError("train split holds no series"); }
  for (const auto& [label, count] : train.class_counts()) {
    if (count < 2) {
      throw SingletonClassError("class " + std::to_string(label) +
                                " has a single train series; leave-one-out tuning needs two");
    }
  }
}

void require_same_length(const Dataset& a, const Dataset& b) {
  if (!a.empty() && !b.empty() && a.length() != b.length()) {
    throw LengthMismatchError("series length differs between splits: " +
                              std::to_string(a.length()) + " vs " + std::to_string(b.length()));
  }
}

Dataset add_noise(const Dataset& dataset, double scale, Rng& rng) {
  if (!(std::isfinite(scale) && scale >= 0.0)) {
    throw UsageError("noise scale must be finite and >= 0");
  }
  Dataset noisy = dataset;
  for (Series& s : noisy.items) {
    const std::size_t n = s.size();
    double mean = 0.0;
    for (const double v : s.values) { mean += v; }
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (const double v : s.values) { var += (v - mean) * (v - mean); }
    var /= static_cast<double>(n);
    const double sigma = std::sqrt(var);
    for (double& v : s.values) { v += scale * sigma * rng.next_normal(); }
  }
  return noisy;
}

std::vector<double> derivative_values(const std::vector<double>& values) {
  const std::size_t n = values.size();
  if (n < 3) {
    throw SeriesTooShortError("derivative needs at least 3 points, got " + std::to_string(n));
  }
  std::vector<double> out(n);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    out[i] = ((values[i] - values[i - 1]) + (values[i + 1] - values[i - 1]) / 2.0) / 2.0;
  }
  out[0] = out[1];
  out[n - 1] = out[n - 2];
  return out;
}

Series derivative_series(const Series& s) { return {s.label, derivative_values(s.values)}; }

Dataset derivative_dataset(const Dataset& dataset) {
  Dataset out;
  out.name = dataset.name;
  out.split = dataset.split;
  out.items.reserve(dataset.size());
  for (const Series& s : dataset.items) { out.items.push_back(derivative_series(s)); }
  return out;
}

} // namespace elastika
