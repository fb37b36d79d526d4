#include "support.hpp"

#include "sypi/dsep_oracle.hpp"
#include "sypi/error.hpp"
#include "sypi/lag_finder.hpp"
#include "sypi/scm_sim.hpp"

#include <gtest/gtest.h>

#include <random>

namespace sypi {
namespace {

using testing::make_spec;
using testing::normal_vector;

TEST(FindMinLag, IndependentNoiseHasNoLag) {
  std::mt19937_64 rng(1);
  for (int rep = 0; rep < 10; ++rep) {
    EXPECT_FALSE(find_min_lag(normal_vector(rng, 2000), normal_vector(rng, 2000)).has_value());
  }
}

TEST(FindMinLag, ChainThroughHiddenSeries) {
  const FullTimeGraphSpec spec = make_spec(1, 1, {{0, 1, 1, 0.9}, {1, 2, 1, 0.9}});
  const TimeSeriesPanel p = simulate_panel(spec, 2000, 21);
  EXPECT_EQ(find_min_lag(p.candidates.col(0), p.target), 2);
}

TEST(FindMinLag, AutoregressiveTargetWithDirectDriver) {
  FullTimeGraphSpec spec = make_spec(1, 0, {{0, 1, 1, 0.85}});
  spec.self_weight = {0.5, 0.8};
  const TimeSeriesPanel p = simulate_panel(spec, 2000, 22);
  const LagSearch s = lag_search(p.candidates.col(0), p.target);
  ASSERT_TRUE(s.lag.has_value());
  EXPECT_EQ(*s.lag, 1);
  EXPECT_GE(std::abs(s.coefficients(1)), 0.1);
}

TEST(FindMinLag, ConfoundedByMemorylessHiddenSeriesGivesZero) {
  const FullTimeGraphSpec spec = make_spec(1, 1, {{1, 0, 1, 0.9}, {1, 2, 1, 0.9}});
  const TimeSeriesPanel p = simulate_panel(spec, 2000, 23);
  EXPECT_EQ(find_min_lag(p.candidates.col(0), p.target), 0);
  EXPECT_EQ(graphical_lags(spec).lags[0], 0);
}

TEST(FindMinLag, ThresholdZeroAcceptsAnyNonzeroCoefficient) {
  std::mt19937_64 rng(2);
  const Vector x = normal_vector(rng, 500);
  Vector y = normal_vector(rng, 500);
  y.tail(497) += 0.08 * x.head(497);
  LagOptions o;
  o.coef_threshold = 0.0;
  const LagSearch s = lag_search(x, y, o);
  ASSERT_TRUE(s.lag.has_value());
  EXPECT_NE(s.coefficients(*s.lag), 0.0);
  for (int k = 0; k < *s.lag; ++k) EXPECT_EQ(s.coefficients(k), 0.0);
}

TEST(FindMinLag, ConstantCandidateHasNoLag) {
  std::mt19937_64 rng(3);
  const LagSearch s = lag_search(Vector::Constant(400, 2.0), normal_vector(rng, 400));
  EXPECT_TRUE(s.constant_candidate);
  EXPECT_FALSE(s.lag.has_value());
}

TEST(FindMinLag, RejectsShortSeriesAndBadOptions) {
  std::mt19937_64 rng(4);
  EXPECT_THROW(find_min_lag(normal_vector(rng, 100), normal_vector(rng, 100)), Error);
  EXPECT_THROW(find_min_lag(normal_vector(rng, 500), normal_vector(rng, 499)), Error);
  LagOptions bad;
  bad.max_lag = 0;
  EXPECT_THROW(find_min_lag(normal_vector(rng, 500), normal_vector(rng, 500), bad), Error);
  bad = {};
  bad.target_lags = -1;
  EXPECT_THROW(find_min_lag(normal_vector(rng, 500), normal_vector(rng, 500), bad), Error);
}

TEST(FindAllLags, TwoPathGraph) {
  const TimeSeriesPanel p = simulate_panel(testing::two_path_spec(), 2000, 24);
  const LagTable lags = find_all_lags(p);
  EXPECT_EQ(lags.lags[0], 2);
  EXPECT_EQ(lags.lags[1], 1);
  EXPECT_EQ(lags.relative(0, 1), 1);
}

TEST(FindAllLags, IndependentCandidatesAllAbsent) {
  std::mt19937_64 rng(5);
  TimeSeriesPanel p;
  p.candidates = testing::normal_matrix(rng, 2000, 3);
  p.target = normal_vector(rng, 2000);
  p.names = {"a", "b", "c"};
  const LagTable lags = find_all_lags(p);
  for (int j = 0; j < 3; ++j) EXPECT_FALSE(lags.present(j));
}

TEST(FindAllLags, Deterministic) {
  GraphConfig cfg;
  cfg.n_obs = 5;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const TimeSeriesPanel p = simulate_panel(sample_graph_spec(cfg, seed), 1000, seed + 100);
    EXPECT_EQ(find_all_lags(p), find_all_lags(p));
  }
}

// Raising the coefficient threshold can remove a lag or move it later, never
// earlier.
TEST(FindAllLags, ThresholdMonotone) {
  GraphConfig cfg;
  cfg.n_obs = 4;
  cfg.p_cross = 0.25;
  cfg.p_target = 0.4;
  const std::vector<double> thresholds{0.0, 0.02, 0.05, 0.1, 0.12, 0.2, 0.4};
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    const TimeSeriesPanel p = simulate_panel(sample_graph_spec(cfg, seed), 800, seed + 7);
    std::vector<LagTable> tables;
    for (double t : thresholds) {
      LagOptions o;
      o.coef_threshold = t;
      tables.push_back(find_all_lags(p, o));
    }
    for (size_t k = 1; k < tables.size(); ++k) {
      for (int j = 0; j < p.n_candidates(); ++j) {
        if (!tables[k].present(j)) continue;
        ASSERT_TRUE(tables[k - 1].present(j));
        EXPECT_GE(tables[k].lag(j), tables[k - 1].lag(j));
      }
    }
  }
}

TEST(FindAllLags, AgreesWithGraphicalLagsOnSimpleGraphs) {
  const std::vector<FullTimeGraphSpec> specs{
      testing::two_path_spec(),
      make_spec(1, 1, {{0, 1, 1, 0.9}, {1, 2, 1, 0.9}}),
      make_spec(2, 0, {{0, 1, 1, 0.9}, {1, 2, 1, 0.9}}),
      make_spec(2, 1, {{2, 0, 1, 0.9}, {2, 3, 1, 0.9}, {1, 3, 1, 0.8}}),
  };
  std::uint64_t seed = 30;
  for (const FullTimeGraphSpec& spec : specs) {
    const TimeSeriesPanel p = simulate_panel(spec, 3000, ++seed);
    EXPECT_EQ(find_all_lags(p), graphical_lags(spec));
  }
}

}  // namespace
}  // namespace sypi
