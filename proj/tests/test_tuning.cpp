#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <vector>

#include "elastika/common.hpp"
#include "elastika/tuning.hpp"

using namespace elastika;

namespace {

Dataset random_dataset(Rng& rng, std::size_t n, std::size_t len, int classes) {
  Dataset ds;
  for (std::size_t i = 0; i < n; ++i) {
    Series s;
    s.label = static_cast<int>(i % static_cast<std::size_t>(classes)) + 1;
    const double shift = static_cast<double>(s.label) * 0.6;
    for (std::size_t k = 0; k < len; ++k) { s.values.push_back(shift + rng.next_real(-1.0, 1.0)); }
    ds.items.push_back(std::move(s));
  }
  return ds;
}

Dataset separable_dataset(std::size_t per_class, std::size_t len) {
  Dataset ds;
  Rng rng(99);
  for (std::size_t i = 0; i < per_class; ++i) {
    Series lo;
    lo.label = 1;
    Series hi;
    hi.label = 2;
    for (std::size_t k = 0; k < len; ++k) {
      lo.values.push_back(rng.next_real(-0.1, 0.1));
      hi.values.push_back(10.0 + rng.next_real(-0.1, 0.1));
    }
    ds.items.push_back(std::move(lo));
    ds.items.push_back(std::move(hi));
  }
  return ds;
}

/// Naive LOOCV: no parallelism, no shared structure; recomputes every
/// distance directly from the public kernels.
std::vector<std::size_t> naive_loocv(const Dataset& train, const ParamGrid& grid) {
  std::vector<std::size_t> correct(grid.entries.size(), 0);
  for (std::size_t e = 0; e < grid.entries.size(); ++e) {
    for (std::size_t i = 0; i < train.size(); ++i) {
      double best = kPositiveInfinity;
      std::size_t arg = train.size();
      for (std::size_t j = 0; j < train.size(); ++j) {
        if (j == i) { continue; }
        const CostExponent g = grid.set.exponents[grid.entries[e].gamma_index];
        const double d = grid.kind == TunedKind::Dtw
                             ? dtw(train[i].values, train[j].values, grid.entries[e].window, g)
                             : adtw(train[i].values, train[j].values, grid.entries[e].omega, g);
        if (d < best) {
          best = d;
          arg = j;
        }
      }
      if (train[arg].label == train[i].label) { ++correct[e]; }
    }
  }
  return correct;
}

} // namespace

TEST_CASE("window grid spacing") {
  CHECK(window_grid(12, 100) ==
        std::vector<std::size_t>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
  CHECK(window_grid(12, 1) == std::vector<std::size_t>{0});

  const auto g = window_grid(102, 100);
  REQUIRE(g.size() == 100);
  CHECK(g.front() == 0);
  CHECK(g.back() == 100);
  for (std::size_t i = 1; i < g.size(); ++i) { CHECK(g[i - 1] < g[i]); }

  CHECK(window_grid(2, 100) == std::vector<std::size_t>{0});
  CHECK_THROWS_AS((void)window_grid(1, 100), UsageError);
  CHECK_THROWS_AS((void)window_grid(12, 0), UsageError);
}

TEST_CASE("penalty ratio ladder") {
  const auto r = penalty_ratios(100);
  REQUIRE(r.size() == 100);
  CHECK(r.back() == 1.0);
  CHECK(r.front() == std::pow(1.0 / 100.0, 5.0));
  for (std::size_t i = 1; i < r.size(); ++i) { CHECK(r[i - 1] < r[i]); }

  const auto r5 = penalty_ratios(5);
  CHECK(r5.back() == 1.0);
  CHECK(r5[0] == std::pow(1.0 / 5.0, 5.0));
  CHECK_THROWS_AS((void)penalty_ratios(0), UsageError);
}

TEST_CASE("omega prime estimation") {
  Dataset twins;
  twins.items = {{1, {1.0, 2.0, 3.0}}, {1, {1.0, 2.0, 3.0}}};
  CHECK(estimate_omega_prime(twins, CostExponent(2.0), 1) == 0.0);

  Dataset pair;
  pair.items = {{1, {0.0, 0.0, 0.0}}, {2, {2.0, 2.0, 2.0}}};
  CHECK(estimate_omega_prime(pair, CostExponent(1.0), 1) == 6.0);

  // Small dataset: every ordered pair is used, so the value is the exact
  // exhaustive mean.
  Rng rng(3);
  const Dataset small = random_dataset(rng, 10, 8, 2);
  const CostExponent g(1.5);
  double exhaustive = 0.0;
  for (std::size_t i = 0; i < small.size(); ++i) {
    for (std::size_t j = 0; j < small.size(); ++j) {
      if (i != j) { exhaustive += direct_alignment(small[i].values, small[j].values, g); }
    }
  }
  exhaustive /= static_cast<double>(small.size() * (small.size() - 1));
  CHECK(estimate_omega_prime(small, g, 7) == doctest::Approx(exhaustive).epsilon(1e-12));

  // Large dataset: sampling kicks in (70*69 > 4000); seeded and close to
  // the exhaustive mean.
  const Dataset big = random_dataset(rng, 70, 6, 2);
  double big_mean = 0.0;
  for (std::size_t i = 0; i < big.size(); ++i) {
    for (std::size_t j = 0; j < big.size(); ++j) {
      if (i != j) { big_mean += direct_alignment(big[i].values, big[j].values, g); }
    }
  }
  big_mean /= static_cast<double>(big.size() * (big.size() - 1));
  const double sampled = estimate_omega_prime(big, g, 11);
  CHECK(sampled == doctest::Approx(big_mean).epsilon(0.05));
  CHECK(estimate_omega_prime(big, g, 11) == sampled);

  Dataset one;
  one.items = {{1, {0.0}}};
  CHECK_THROWS_AS((void)estimate_omega_prime(one, g, 1), UsageError);
}

TEST_CASE("grid construction and accounting") {
  const ExponentSet a = ExponentSet::named("a");

  const ParamGrid dg = ParamGrid::dtw(a, 102, 100);
  CHECK(dg.nominal_size() == 500);
  CHECK(dg.entries.size() == 500);
  CHECK(dg.entries.front().window.bound() == 0);
  CHECK(dg.entries[99].window.bound() == 100);
  CHECK(dg.entries[100].gamma_index == 1);

  Rng rng(5);
  const Dataset train = random_dataset(rng, 8, 12, 2);
  const ParamGrid ag = ParamGrid::adtw(a, train, 100, 17);
  CHECK(ag.nominal_size() == 500);
  CHECK(ag.entries.size() == 500);
  REQUIRE(ag.omega_primes.size() == 5);
  for (std::size_t gi = 0; gi < 5; ++gi) {
    const double scale = ag.omega_primes[gi];
    CHECK(scale > 0.0);
    CHECK(ag.entries[gi * 100 + 99].omega == scale);
    CHECK(ag.entries[gi * 100].omega == scale * std::pow(0.01, 5.0));
    for (std::size_t k = 1; k < 100; ++k) {
      CHECK(ag.entries[gi * 100 + k - 1].omega < ag.entries[gi * 100 + k].omega);
    }
  }

  const ParamGrid fg = ParamGrid::dtw_full(a);
  CHECK(fg.entries.size() == 5);
  CHECK(fg.entries[0].window.is_unlimited());
}

TEST_CASE("loocv matches a naive reimplementation") {
  Rng rng(21);
  const Dataset train = random_dataset(rng, 8, 10, 2);
  const ExponentSet a = ExponentSet::named("a");

  const ParamGrid dg = ParamGrid::dtw(a, train.length(), 5);
  const LoocvTable dt = loocv_table(train, dg);
  CHECK(dt.total == train.size());
  CHECK(dt.correct == naive_loocv(train, dg));

  const ParamGrid ag = ParamGrid::adtw(a, train, 7, 3);
  const LoocvTable at = loocv_table(train, ag);
  CHECK(at.correct == naive_loocv(train, ag));
}

TEST_CASE("loocv is scheduling independent") {
  Rng rng(22);
  const Dataset train = random_dataset(rng, 8, 10, 2);
  const ParamGrid grid = ParamGrid::dtw(ExponentSet::named("a"), train.length(), 5);

  setenv("ELASTIKA_THREADS", "1", 1);
  const LoocvTable serial = loocv_table(train, grid);
  setenv("ELASTIKA_THREADS", "4", 1);
  const LoocvTable parallel = loocv_table(train, grid);
  unsetenv("ELASTIKA_THREADS");
  CHECK(serial.correct == parallel.correct);
}

TEST_CASE("loocv degenerate cases") {
  const Dataset sep = separable_dataset(3, 8);
  const ParamGrid grid = ParamGrid::dtw(ExponentSet::named("a"), sep.length(), 4);
  const LoocvTable table = loocv_table(sep, grid);
  for (const std::size_t c : table.correct) { CHECK(c == sep.size()); }

  // Identical twins in a class are always classified correctly.
  Dataset twins;
  twins.items = {{1, {0.0, 0.0, 5.0}}, {1, {0.0, 0.0, 5.0}},
                 {2, {9.0, 9.0, 9.0}}, {2, {4.0, 4.0, 4.0}}};
  const ParamGrid g2 = ParamGrid::dtw(ExponentSet::named("a"), 3, 2);
  const LoocvTable t2 = loocv_table(twins, g2);
  for (const std::size_t c : t2.correct) { CHECK(c >= 2); }

  Dataset singleton;
  singleton.items = {{1, {0.0}}, {1, {0.1}}, {2, {5.0}}};
  const ParamGrid g3 = ParamGrid::dtw_full(ExponentSet::named("a"));
  CHECK_THROWS_AS((void)loocv_table(singleton, g3), SingletonClassError);
}

TEST_CASE("tie-break hierarchy on constructed tables") {
  const ExponentSet a = ExponentSet::named("a");

  // All entries tie: gamma = 1 (median of five), smallest window.
  {
    const ParamGrid grid = ParamGrid::dtw(a, 12, 9);
    const std::vector<std::size_t> correct(grid.entries.size(), 6);
    const std::size_t pick = select_best_entry(grid, correct);
    CHECK(grid.set.exponents[grid.entries[pick].gamma_index].gamma == 1.0);
    CHECK(grid.entries[pick].window.bound() == 0);
  }

  // Champions tie across {1.5, 2}: closer-to-1 wins.
  {
    const ParamGrid grid = ParamGrid::dtw(a, 12, 3);
    std::vector<std::size_t> correct(grid.entries.size(), 1);
    const std::size_t per = grid.entries.size() / 5;
    correct[3 * per + 1] = 6;
    correct[4 * per + 2] = 6;
    const std::size_t pick = select_best_entry(grid, correct);
    CHECK(grid.set.exponents[grid.entries[pick].gamma_index].gamma == 1.5);
    CHECK(pick == 3 * per + 1);
  }

  // Champions tie across {0.5, 2}: |0.5-1| < |2-1| picks 0.5.
  {
    const ParamGrid grid = ParamGrid::dtw(a, 12, 3);
    std::vector<std::size_t> correct(grid.entries.size(), 1);
    const std::size_t per = grid.entries.size() / 5;
    correct[0 * per + 0] = 6;
    correct[4 * per + 0] = 6;
    const std::size_t pick = select_best_entry(grid, correct);
    CHECK(grid.set.exponents[grid.entries[pick].gamma_index].gamma == 0.5);
  }

  // Four tied champions: middle pair {1/1.5, 1}; gamma = 1 is closer to 1.
  {
    const ParamGrid grid = ParamGrid::dtw(a, 12, 3);
    std::vector<std::size_t> correct(grid.entries.size(), 1);
    const std::size_t per = grid.entries.size() / 5;
    for (const std::size_t gi : {0, 1, 2, 3}) { correct[gi * per] = 6; }
    const std::size_t pick = select_best_entry(grid, correct);
    CHECK(grid.set.exponents[grid.entries[pick].gamma_index].gamma == 1.0);
  }

  // ADTW within-gamma ties resolve to the median index (lower middle).
  {
    ParamGrid grid{TunedKind::Adtw, ExponentSet::single(2.0), 4, {}, {1.0}};
    for (const double omega : {0.1, 0.2, 0.3, 0.4}) {
      grid.entries.push_back({0, WarpingWindow::unlimited(), omega});
    }
    CHECK(select_best_entry(grid, {5, 5, 5, 5}) == 1);
    CHECK(select_best_entry(grid, {5, 5, 5, 2}) == 1);
    CHECK(select_best_entry(grid, {2, 5, 5, 5}) == 2);
    CHECK(select_best_entry(grid, {2, 5, 2, 5}) == 1);
    CHECK(select_best_entry(grid, {2, 2, 5, 2}) == 2);
  }

  // DTW within-gamma ties resolve to the smallest window.
  {
    const ParamGrid grid = ParamGrid::dtw(ExponentSet::single(2.0), 12, 4);
    CHECK(select_best_entry(grid, {3, 3, 3, 3}) == 0);
    CHECK(select_best_entry(grid, {1, 3, 3, 1}) == 1);
  }
}

TEST_CASE("train_plus end to end") {
  const Dataset train = separable_dataset(4, 10);

  const TrainedModel m1 = train_plus(train, TunedKind::Dtw, ExponentSet::named("a"), 5, 42);
  CHECK(m1.train_accuracy() == 1.0);
  CHECK(m1.gamma == 1.0);
  CHECK(m1.window.bound() == 0);
  CHECK(m1.set_label == "a");
  CHECK(m1.per_gamma_count == 5);

  const TrainedModel m2 = train_plus(train, TunedKind::Dtw, ExponentSet::named("a"), 5, 42);
  CHECK(m2.gamma == m1.gamma);
  CHECK(m2.window == m1.window);
  CHECK(m2.train_correct == m1.train_correct);

  const TrainedModel ma = train_plus(train, TunedKind::Adtw, ExponentSet::named("a"), 5, 42);
  CHECK(ma.train_accuracy() == 1.0);
  CHECK(ma.kind == TunedKind::Adtw);

  // Dominance: the tuned champion is at least as good on train as every
  // fixed-gamma champion with the same per-gamma budget.
  Rng rng(33);
  const Dataset hard = random_dataset(rng, 12, 10, 3);
  const TrainedModel tuned = train_plus(hard, TunedKind::Dtw, ExponentSet::named("a"), 6, 1);
  for (const double g : {0.5, 1.0 / 1.5, 1.0, 1.5, 2.0}) {
    const TrainedModel fixed = train_plus(hard, TunedKind::Dtw, ExponentSet::single(g), 6, 1);
    CHECK(tuned.train_correct >= fixed.train_correct);
  }
}

TEST_CASE("full-window training fixes the window and tunes gamma") {
  const Dataset train = separable_dataset(3, 9);
  const TrainedModel m = train_full_window(train, ExponentSet::named("a"), 5);
  CHECK(m.window.is_unlimited());
  CHECK(m.full_window);
  CHECK(m.train_accuracy() == 1.0);
  CHECK(m.gamma == 1.0);
}

TEST_CASE("classification") {
  const Dataset train = separable_dataset(4, 10);
  const TrainedModel model = train_plus(train, TunedKind::Dtw, ExponentSet::named("a"), 5, 42);

  Dataset test;
  test.items = {train.items[0], train.items[1], train.items[2]};
  CHECK(classify_accuracy(model, train, test) == 1.0);

  const std::vector<int> labels = classify(model, train, test);
  CHECK(labels == std::vector<int>{1, 2, 1});

  Dataset empty;
  CHECK_THROWS_AS((void)classify(model, train, empty), UsageError);

  Dataset shorter;
  shorter.items = {{1, {0.0, 0.0}}};
  CHECK_THROWS_AS((void)classify(model, train, shorter), LengthMismatchError);
}

TEST_CASE("model json round-trip") {
  const Dataset train = separable_dataset(3, 9);

  const TrainedModel m1 = train_plus(train, TunedKind::Dtw, ExponentSet::named("a"), 5, 42);
  const TrainedModel r1 = model_from_json(model_to_json(m1));
  CHECK(r1.kind == m1.kind);
  CHECK(r1.gamma == m1.gamma);
  CHECK(r1.window == m1.window);
  CHECK(r1.train_correct == m1.train_correct);
  CHECK(r1.train_total == m1.train_total);
  CHECK(r1.set_label == m1.set_label);
  CHECK(r1.per_gamma_count == m1.per_gamma_count);
  CHECK(r1.seed == m1.seed);

  const TrainedModel m2 = train_plus(train, TunedKind::Adtw, ExponentSet::named("a"), 5, 42);
  const TrainedModel r2 = model_from_json(model_to_json(m2));
  CHECK(r2.kind == TunedKind::Adtw);
  CHECK(r2.omega == m2.omega);

  const TrainedModel m3 = train_full_window(train, ExponentSet::named("a"), 5);
  const TrainedModel r3 = model_from_json(model_to_json(m3));
  CHECK(r3.window.is_unlimited());
  CHECK(r3.full_window);

  CHECK_THROWS_AS((void)model_from_json("not json"), ParseError);
  CHECK_THROWS_AS((void)model_from_json("{\"distance\":\"dtw\"}"), ParseError);
}
