#include "elastika/stats.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <sstream>

namespace elastika {

namespace {

/// Shortest decimal form that parses back to the same double.
std::string render_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

/// Fixed two-decimal form for SVG coordinates.
std::string coord(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, 2);
  return std::string(buf, res.ptr);
}

std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (const char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) { throw IoError("cannot open '" + path.string() + "' for writing"); }
  out << content;
  out.flush();
  if (!out.good()) { throw IoError("failed while writing '" + path.string() + "'"); }
}

/// Ranks of |differences| (ascending, averaged ties), paired with signs.
struct SignedRanks {
  std::vector<double> ranks; // rank of each nonzero difference
  std::vector<int> signs;    // +1 / -1, parallel to ranks
  std::vector<std::size_t> tie_sizes;
};

SignedRanks signed_ranks(const std::vector<double>& differences) {
  SignedRanks sr;
  std::vector<double> mags;
  for (const double d : differences) {
    if (!std::isfinite(d)) { throw UsageError("differences must be finite"); }
    if (d == 0.0) { continue; }
    mags.push_back(std::abs(d));
    sr.signs.push_back(d > 0.0 ? 1 : -1);
  }
  const std::size_t n = mags.size();
  sr.ranks.resize(n);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return mags[a] < mags[b]; });

  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && mags[order[j]] == mags[order[i]]) { ++j; }
    const double avg = static_cast<double>(i + 1 + j) / 2.0; // mean of ranks i+1 .. j
    for (std::size_t k = i; k < j; ++k) { sr.ranks[order[k]] = avg; }
    sr.tie_sizes.push_back(j - i);
    i = j;
  }
  return sr;
}

/// Exact two-sided p by dynamic programming over the 2^n sign assignments.
/// Ranks are half-integers, so doubling them gives exact integer weights;
/// all counts stay far below 2^53 for n <= 25, so the double arithmetic is
/// exact and the result is identical regardless of summation order.
double exact_p(const SignedRanks& sr) {
  const std::size_t n = sr.ranks.size();
  std::int64_t w2_obs = 0;
  std::int64_t t2 = 0;
  std::vector<std::int64_t> r2(n);
  for (std::size_t i = 0; i < n; ++i) {
    r2[i] = std::llround(2.0 * sr.ranks[i]);
    t2 += r2[i];
    if (sr.signs[i] > 0) { w2_obs += r2[i]; }
  }

  std::vector<double> counts(static_cast<std::size_t>(t2) + 1, 0.0);
  counts[0] = 1.0;
  std::int64_t reached = 0;
  for (std::size_t i = 0; i < n; ++i) {
    reached += r2[i];
    for (std::int64_t w = reached; w >= r2[i]; --w) {
      counts[static_cast<std::size_t>(w)] += counts[static_cast<std::size_t>(w - r2[i])];
    }
  }

  double below = 0.0;
  double above = 0.0;
  for (std::int64_t w = 0; w <= t2; ++w) {
    if (w <= w2_obs) { below += counts[static_cast<std::size_t>(w)]; }
    if (w >= w2_obs) { above += counts[static_cast<std::size_t>(w)]; }
  }
  const double total = std::ldexp(1.0, static_cast<int>(n));
  return std::min(1.0, 2.0 * std::min(below, above) / total);
}

double approx_p(const SignedRanks& sr) {
  const double n = static_cast<double>(sr.ranks.size());
  double w_plus = 0.0;
  for (std::size_t i = 0; i < sr.ranks.size(); ++i) {
    if (sr.signs[i] > 0) { w_plus += sr.ranks[i]; }
  }
  const double mu = n * (n + 1.0) / 4.0;
  double tie_term = 0.0;
  for (const std::size_t t : sr.tie_sizes) {
    const double td = static_cast<double>(t);
    tie_term += td * td * td - td;
  }
  const double var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term / 48.0;
  if (var <= 0.0) { return 1.0; }
  const double z = std::max(0.0, std::abs(w_plus - mu) - 0.5) / std::sqrt(var);
  return std::min(1.0, std::erfc(z / std::sqrt(2.0)));
}

void validate_matrix(const AccuracyMatrix& m) {
  if (m.classifiers.size() < 2) {
    throw UsageError("rank statistics need at least two classifiers");
  }
  if (m.accuracies.empty()) { throw UsageError("rank statistics need at least one dataset"); }
  if (m.datasets.size() != m.accuracies.size()) {
    throw UsageError("accuracy matrix has a dataset-name/row count mismatch");
  }
  for (const auto& row : m.accuracies) {
    if (row.size() != m.classifiers.size()) {
      throw UsageError("accuracy matrix is ragged: every dataset needs one "
                       "entry per classifier");
    }
    for (const double a : row) {
      if (!std::isfinite(a)) { throw UsageError("accuracies must be finite"); }
    }
  }
}

/// Bron-Kerbosch with pivoting over the "not significantly different"
/// graph. Vertices are explored in ascending order, so the output is
/// deterministic.
void bron_kerbosch(const std::vector<std::vector<bool>>& adj, std::vector<std::size_t>& r,
                   std::vector<std::size_t> p, std::vector<std::size_t> x,
                   std::vector<std::vector<std::size_t>>& out) {
  if (p.empty() && x.empty()) {
    out.push_back(r);
    return;
  }
  std::size_t pivot = 0;
  std::size_t pivot_degree = 0;
  bool have_pivot = false;
  for (const auto& pool : {p, x}) {
    for (const std::size_t u : pool) {
      std::size_t deg = 0;
      for (const std::size_t v : p) {
        if (adj[u][v]) { ++deg; }
      }
      if (!have_pivot || deg > pivot_degree) {
        have_pivot = true;
        pivot = u;
        pivot_degree = deg;
      }
    }
  }

  std::vector<std::size_t> candidates;
  for (const std::size_t v : p) {
    if (!adj[pivot][v]) { candidates.push_back(v); }
  }
  for (const std::size_t v : candidates) {
    std::vector<std::size_t> p2;
    std::vector<std::size_t> x2;
    for (const std::size_t w : p) {
      if (adj[v][w]) { p2.push_back(w); }
    }
    for (const std::size_t w : x) {
      if (adj[v][w]) { x2.push_back(w); }
    }
    r.push_back(v);
    bron_kerbosch(adj, r, std::move(p2), std::move(x2), out);
    r.pop_back();
    p.erase(std::find(p.begin(), p.end(), v));
    x.insert(std::lower_bound(x.begin(), x.end(), v), v);
  }
}

} // namespace

WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& differences) {
  if (differences.empty()) { throw UsageError("wilcoxon test needs at least one pair"); }
  const SignedRanks sr = signed_ranks(differences);
  const std::size_t n = sr.ranks.size();
  if (n == 0) { return {1.0, 0}; }
  const double p = n <= 25 ? exact_p(sr) : approx_p(sr);
  return {p, n};
}

WilcoxonResult wilcoxon_signed_rank(const PairedAccuracies& pairs) {
  std::vector<double> diffs;
  diffs.reserve(pairs.size());
  for (const PairedRow& row : pairs) { diffs.push_back(row.acc_a - row.acc_b); }
  return wilcoxon_signed_rank(diffs);
}

WinTieLoss win_tie_loss(const PairedAccuracies& pairs) {
  WinTieLoss wtl;
  for (const PairedRow& row : pairs) {
    if (row.acc_a > row.acc_b) {
      ++wtl.wins_a;
    } else if (row.acc_a < row.acc_b) {
      ++wtl.wins_b;
    } else {
      ++wtl.ties;
    }
  }
  return wtl;
}

RankTable mean_ranks(const AccuracyMatrix& matrix) {
  validate_matrix(matrix);
  const std::size_t k = matrix.classifiers.size();
  const std::size_t n = matrix.accuracies.size();

  std::vector<double> sums(k, 0.0);
  std::vector<std::size_t> order(k);
  for (const auto& row : matrix.accuracies) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return row[a] > row[b]; });
    std::size_t i = 0;
    while (i < k) {
      std::size_t j = i;
      while (j < k && row[order[j]] == row[order[i]]) { ++j; }
      const double avg = static_cast<double>(i + 1 + j) / 2.0;
      for (std::size_t c = i; c < j; ++c) { sums[order[c]] += avg; }
      i = j;
    }
  }

  RankTable table;
  table.classifiers = matrix.classifiers;
  table.mean_rank.resize(k);
  for (std::size_t c = 0; c < k; ++c) {
    table.mean_rank[c] = sums[c] / static_cast<double>(n);
  }
  return table;
}

std::vector<std::vector<std::size_t>> cliques(const AccuracyMatrix& matrix, double alpha) {
  validate_matrix(matrix);
  if (!(std::isfinite(alpha) && alpha > 0.0 && alpha < 1.0)) {
    throw UsageError("alpha must lie strictly between 0 and 1");
  }
  const std::size_t k = matrix.classifiers.size();

  std::vector<std::vector<bool>> adj(k, std::vector<bool>(k, false));
  std::vector<double> diffs(matrix.accuracies.size());
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a + 1; b < k; ++b) {
      for (std::size_t d = 0; d < matrix.accuracies.size(); ++d) {
        diffs[d] = matrix.accuracies[d][a] - matrix.accuracies[d][b];
      }
      const bool connected = wilcoxon_signed_rank(diffs).p_value >= alpha;
      adj[a][b] = connected;
      adj[b][a] = connected;
    }
  }

  std::vector<std::size_t> p(k);
  std::iota(p.begin(), p.end(), std::size_t{0});
  std::vector<std::size_t> r;
  std::vector<std::vector<std::size_t>> out;
  bron_kerbosch(adj, r, std::move(p), {}, out);
  for (auto& clique : out) { std::sort(clique.begin(), clique.end()); }
  std::sort(out.begin(), out.end());
  return out;
}

void emit_scatter(const PairedAccuracies& pairs, const std::string& label_a,
                  const std::string& label_b, const std::filesystem::path& out_base) {
  if (pairs.empty()) { throw UsageError("scatter needs at least one pair"); }

  std::string csv = "dataset,acc_a,acc_b\n";
  for (const PairedRow& row : pairs) {
    csv += row.dataset;
    csv += ',';
    csv += render_double(row.acc_a);
    csv += ',';
    csv += render_double(row.acc_b);
    csv += '\n';
  }

  const double size = 640.0;
  const double margin = 70.0;
  const double span = size - 2.0 * margin;
  const auto px = [&](double a) { return margin + a * span; };
  const auto py = [&](double b) { return size - margin - b * span; };
  const WinTieLoss wtl = win_tie_loss(pairs);

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"640\" "
         "height=\"640\" viewBox=\"0 0 640 640\">\n"
      << "<rect x=\"0\" y=\"0\" width=\"640\" height=\"640\" fill=\"#ffffff\"/>\n";
  for (int tick = 0; tick <= 4; ++tick) {
    const double f = static_cast<double>(tick) / 4.0;
    svg << "<line x1=\"" << coord(px(f)) << "\" y1=\"" << coord(py(0.0)) << "\" x2=\""
        << coord(px(f)) << "\" y2=\"" << coord(py(1.0))
        << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    svg << "<line x1=\"" << coord(px(0.0)) << "\" y1=\"" << coord(py(f)) << "\" x2=\""
        << coord(px(1.0)) << "\" y2=\"" << coord(py(f))
        << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    svg << "<text x=\"" << coord(px(f)) << "\" y=\"" << coord(py(0.0) + 24.0)
        << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">"
        << render_double(f) << "</text>\n";
    svg << "<text x=\"" << coord(px(0.0) - 10.0) << "\" y=\"" << coord(py(f) + 4.0)
        << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"end\">"
        << render_double(f) << "</text>\n";
  }
  svg << "<line x1=\"" << coord(px(0.0)) << "\" y1=\"" << coord(py(0.0)) << "\" x2=\""
      << coord(px(1.0)) << "\" y2=\"" << coord(py(1.0))
      << "\" stroke=\"#888888\" stroke-width=\"1.5\"/>\n";
  for (const PairedRow& row : pairs) {
    svg << "<circle cx=\"" << coord(px(row.acc_a)) << "\" cy=\"" << coord(py(row.acc_b))
        << "\" r=\"4\" fill=\"#1f77b4\" fill-opacity=\"0.75\"><title>"
        << xml_escape(row.dataset) << "</title></circle>\n";
  }
  svg << "<text x=\"" << coord(px(0.5)) << "\" y=\"" << coord(size - 18.0)
      << "\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\">"
      << xml_escape(label_a) << " accuracy</text>\n";
  svg << "<text x=\"20\" y=\"" << coord(py(0.5))
      << "\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\" "
         "transform=\"rotate(-90 20 "
      << coord(py(0.5)) << ")\">" << xml_escape(label_b) << " accuracy</text>\n";
  svg << "<text x=\"" << coord(px(0.04)) << "\" y=\"" << coord(py(0.96))
      << "\" font-family=\"sans-serif\" font-size=\"13\">" << xml_escape(label_b) << " wins "
      << wtl.wins_b << "</text>\n";
  svg << "<text x=\"" << coord(px(0.96)) << "\" y=\"" << coord(py(0.04))
      << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"end\">"
      << xml_escape(label_a) << " wins " << wtl.wins_a << "</text>\n";
  svg << "<text x=\"" << coord(px(0.96)) << "\" y=\"" << coord(py(0.96))
      << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"end\">ties " << wtl.ties
      << "</text>\n";
  svg << "</svg>\n";

  std::filesystem::path csv_path = out_base;
  csv_path += ".csv";
  std::filesystem::path svg_path = out_base;
  svg_path += ".svg";
  write_file(csv_path, csv);
  write_file(svg_path, svg.str());
}

void emit_cd(const RankTable& table, const std::vector<std::vector<std::size_t>>& groups,
             const std::filesystem::path& out_base) {
  const std::size_t k = table.classifiers.size();
  if (k < 2) { throw UsageError("critical-difference diagram needs at least two classifiers"); }
  if (table.mean_rank.size() != k) {
    throw UsageError("rank table has a classifier/rank count mismatch");
  }
  for (const double r : table.mean_rank) {
    if (!std::isfinite(r)) { throw UsageError("mean ranks must be finite"); }
  }
  for (const auto& group : groups) {
    for (const std::size_t c : group) {
      if (c >= k) { throw UsageError("clique refers to an unknown classifier"); }
    }
  }

  std::string csv = "classifier,mean_rank\n";
  for (std::size_t c = 0; c < k; ++c) {
    csv += table.classifiers[c];
    csv += ',';
    csv += render_double(table.mean_rank[c]);
    csv += '\n';
  }

  // Bars only for real groupings.
  std::vector<std::vector<std::size_t>> bars;
  for (const auto& group : groups) {
    if (group.size() >= 2) { bars.push_back(group); }
  }

  const double width = 800.0;
  const double x0 = 90.0;
  const double x1 = width - 90.0;
  const double axis_y = 48.0;
  const auto px = [&](double rank) {
    return x0 + (rank - 1.0) / (static_cast<double>(k) - 1.0) * (x1 - x0);
  };
  const double bars_top = axis_y + 14.0;
  const double bar_step = 10.0;
  const double labels_top = bars_top + static_cast<double>(bars.size()) * bar_step + 16.0;
  const double label_step = 20.0;
  const std::size_t left_count = (k + 1) / 2;
  const std::size_t label_rows = std::max(left_count, k - left_count);
  const double height = labels_top + static_cast<double>(label_rows) * label_step + 16.0;

  // Classifiers from best (rank 1, left) to worst; ties keep input order.
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return table.mean_rank[a] < table.mean_rank[b];
  });

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << coord(width)
      << "\" height=\"" << coord(height) << "\" viewBox=\"0 0 " << coord(width) << " "
      << coord(height) << "\">\n"
      << "<rect x=\"0\" y=\"0\" width=\"" << coord(width) << "\" height=\"" << coord(height)
      << "\" fill=\"#ffffff\"/>\n";
  svg << "<line x1=\"" << coord(x0) << "\" y1=\"" << coord(axis_y) << "\" x2=\"" << coord(x1)
      << "\" y2=\"" << coord(axis_y) << "\" stroke=\"#000000\" stroke-width=\"1.5\"/>\n";
  for (std::size_t r = 1; r <= k; ++r) {
    const double x = px(static_cast<double>(r));
    svg << "<line x1=\"" << coord(x) << "\" y1=\"" << coord(axis_y - 6.0) << "\" x2=\""
        << coord(x) << "\" y2=\"" << coord(axis_y) << "\" stroke=\"#000000\" "
        << "stroke-width=\"1\"/>\n";
    svg << "<text x=\"" << coord(x) << "\" y=\"" << coord(axis_y - 12.0)
        << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">" << r
        << "</text>\n";
  }
  for (std::size_t b = 0; b < bars.size(); ++b) {
    double lo = kPositiveInfinity;
    double hi = -kPositiveInfinity;
    for (const std::size_t c : bars[b]) {
      lo = std::min(lo, table.mean_rank[c]);
      hi = std::max(hi, table.mean_rank[c]);
    }
    const double y = bars_top + static_cast<double>(b) * bar_step;
    svg << "<line x1=\"" << coord(px(lo) - 3.0) << "\" y1=\"" << coord(y) << "\" x2=\""
        << coord(px(hi) + 3.0) << "\" y2=\"" << coord(y)
        << "\" stroke=\"#000000\" stroke-width=\"4\"/>\n";
  }
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t c = order[i];
    const double x = px(table.mean_rank[c]);
    const bool left = i < left_count;
    const std::size_t row = left ? i : i - left_count;
    const double label_y = labels_top + static_cast<double>(row) * label_step;
    const double label_x = left ? x0 - 8.0 : x1 + 8.0;
    svg << "<line x1=\"" << coord(x) << "\" y1=\"" << coord(axis_y) << "\" x2=\"" << coord(x)
        << "\" y2=\"" << coord(label_y - 5.0) << "\" stroke=\"#555555\" stroke-width=\"1\"/>\n";
    svg << "<line x1=\"" << coord(x) << "\" y1=\"" << coord(label_y - 5.0) << "\" x2=\""
        << coord(label_x) << "\" y2=\"" << coord(label_y - 5.0)
        << "\" stroke=\"#555555\" stroke-width=\"1\"/>\n";
    svg << "<text x=\"" << coord(label_x) << "\" y=\"" << coord(label_y)
        << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\""
        << (left ? "end" : "start") << "\">" << xml_escape(table.classifiers[c]) << " ("
        << render_double(table.mean_rank[c]) << ")</text>\n";
  }
  svg << "</svg>\n";

  std::filesystem::path csv_path = out_base;
  csv_path += ".csv";
  std::filesystem::path svg_path = out_base;
  svg_path += ".svg";
  write_file(csv_path, csv);
  write_file(svg_path, svg.str());
}

} // namespace elastika
