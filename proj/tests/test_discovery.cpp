#include "support.hpp"

#include "sypi/discovery.hpp"
#include "sypi/error.hpp"
#include "sypi/scm_sim.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

namespace sypi {
namespace {

using testing::normal_matrix;
using testing::normal_vector;

LagTable table(std::vector<std::optional<int>> lags) { return LagTable{std::move(lags)}; }

TEST(ConditioningSet, SingleCandidateIsEmpty) { EXPECT_TRUE(build_conditioning_set(0, table({3})).empty()); }

TEST(ConditioningSet, OneNodePerOtherLaggedCandidate) {
  const ConditioningSet s = build_conditioning_set(0, table({2, 1}));
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0], (NodeRef{1, 0}));

  EXPECT_THROW(build_conditioning_set(1, table({4, std::nullopt})), Error);
  const ConditioningSet u = build_conditioning_set(2, table({4, std::nullopt, 1, 0}));
  ASSERT_EQ(u.size(), 2u);
  EXPECT_EQ(u[0], (NodeRef{0, -4}));
  EXPECT_EQ(u[1], (NodeRef{3, 0}));
}

TEST(ConditioningSet, NeverContainsCandidateOrTarget) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> lag(-1, 6);
  for (int rep = 0; rep < 500; ++rep) {
    const int d = 1 + rep % 7;
    LagTable t;
    for (int j = 0; j < d; ++j) {
      const int w = lag(rng);
      t.lags.push_back(w < 0 ? std::nullopt : std::optional<int>(w));
    }
    for (int i = 0; i < d; ++i) {
      if (!t.present(i)) continue;
      const ConditioningSet s = build_conditioning_set(i, t);
      std::vector<int> seen;
      for (const NodeRef& r : s) {
        EXPECT_NE(r.series, i);
        EXPECT_NE(r.series, kTarget);
        EXPECT_TRUE(t.present(r.series));
        EXPECT_EQ(r.offset, t.lag(i) - t.lag(r.series) - 1);
        seen.push_back(r.series);
      }
      std::sort(seen.begin(), seen.end());
      EXPECT_EQ(std::adjacent_find(seen.begin(), seen.end()), seen.end());
    }
  }
}

TimeSeriesPanel ramp_panel(long T, int d) {
  TimeSeriesPanel p;
  p.candidates.resize(T, d);
  for (int j = 0; j < d; ++j) p.candidates.col(j) = Vector::LinSpaced(T, 0, T - 1).array() + 1000.0 * (j + 1);
  p.target = Vector::LinSpaced(T, 0, T - 1);
  for (int j = 0; j < d; ++j) p.names.push_back("X" + std::to_string(j + 1));
  return p;
}

TEST(AlignSamples, WindowArithmetic) {
  const TimeSeriesPanel p = ramp_panel(100, 2);
  const std::vector<NodeRef> single{{0, 0}};
  EXPECT_EQ(align_samples(p, single).n_eff, 100);

  const std::vector<NodeRef> refs{{0, -1}, {kTarget, 0}, {1, 1}, {kTarget, 2}};
  const AlignedSamples s = align_samples(p, refs);
  EXPECT_EQ(s.n_eff, 97);
  // First anchor is t = 1: columns hold X1_0, Y_1, X2_2, Y_3.
  EXPECT_EQ(s.data(0, 0), 1000.0);
  EXPECT_EQ(s.data(0, 1), 1.0);
  EXPECT_EQ(s.data(0, 2), 2002.0);
  EXPECT_EQ(s.data(0, 3), 3.0);
  EXPECT_EQ(s.data(96, 3), 99.0);

  const TimeSeriesPanel q = ramp_panel(2000, 2);
  const std::vector<NodeRef> wide{{0, 0}, {kTarget, 2}, {kTarget, 1}, {1, -3}};
  EXPECT_EQ(align_samples(q, wide).n_eff, 1995);
}

TEST(AlignSamples, TooFewRowsIsDataError) {
  const TimeSeriesPanel p = ramp_panel(10, 1);
  const std::vector<NodeRef> refs{{0, -4}, {kTarget, 4}};
  try {
    align_samples(p, refs, 5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Data);
  }
}

TEST(Decide, Rule) {
  CandidateResult c;
  EXPECT_EQ(decide(c, 0.01, 0.2), Decision::NoLag);
  c.lag = 1;
  c.p1 = 0.001;
  c.p2 = 0.5;
  EXPECT_EQ(decide(c, 0.01, 0.2), Decision::Cause);
  c.p1 = 0.01;
  EXPECT_EQ(decide(c, 0.01, 0.2), Decision::NotCause);
  c.p1 = 0.001;
  c.p2 = 0.2;
  EXPECT_EQ(decide(c, 0.01, 0.2), Decision::NotCause);
  c.p2 = 0.9;
  c.degenerate = true;
  EXPECT_EQ(decide(c, 0.01, 0.2), Decision::NotCause);
}

TEST(Discover, TwoPathGraphFindsBothCauses) {
  const TimeSeriesPanel p = simulate_panel(testing::two_path_spec(), 2000, 41);
  const DiscoveryReport r = discover(p);
  EXPECT_EQ(r.causes(), (std::vector<int>{0, 1}));
  EXPECT_EQ(r.candidates[0].lag, 2);
  EXPECT_EQ(r.candidates[1].lag, 1);
  for (const CandidateResult& c : r.candidates) {
    EXPECT_TRUE(c.tested2);
    EXPECT_FALSE(c.degenerate);
  }
}

TEST(Discover, AutoregressiveTargetWithNoiseCandidates) {
  std::mt19937_64 rng(2);
  FullTimeGraphSpec spec = testing::make_spec(3, 0, {});
  spec.self_weight = {0.0, 0.0, 0.0, 0.8};
  const TimeSeriesPanel p = simulate_panel(spec, 2000, 42);
  const DiscoveryReport r = discover(p);
  EXPECT_TRUE(r.causes().empty());
  for (const CandidateResult& c : r.candidates) EXPECT_EQ(c.decision, Decision::NoLag);
}

TEST(Discover, ConfoundedCandidateRejected) {
  // U -> X1 and U -> Y only; X2 -> Y is a genuine cause.
  const FullTimeGraphSpec spec = testing::make_spec(2, 1, {{2, 0, 1, 0.9}, {2, 3, 1, 0.9}, {1, 3, 1, 0.8}});
  const TimeSeriesPanel p = simulate_panel(spec, 2000, 43);
  const DiscoveryReport r = discover(p);
  EXPECT_NE(r.candidates[0].decision, Decision::Cause);
  EXPECT_EQ(r.candidates[1].decision, Decision::Cause);
}

TEST(Discover, ScaleInvariance) {
  GraphConfig cfg;
  cfg.n_obs = 4;
  cfg.p_target = 0.5;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> scale(0.05, 20.0);
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const TimeSeriesPanel p = simulate_panel(sample_graph_spec(cfg, seed), 1500, seed + 50);
    TimeSeriesPanel q = p;
    for (int j = 0; j < q.n_candidates(); ++j) q.candidates.col(j) *= scale(rng) * (j % 2 ? -1.0 : 1.0);
    q.target *= scale(rng);
    const DiscoveryReport a = discover(p);
    const DiscoveryReport b = discover(q);
    ASSERT_EQ(a.candidates.size(), b.candidates.size());
    for (size_t j = 0; j < a.candidates.size(); ++j) {
      EXPECT_EQ(a.candidates[j].decision, b.candidates[j].decision);
      EXPECT_EQ(a.candidates[j].lag, b.candidates[j].lag);
      EXPECT_NEAR(a.candidates[j].p1, b.candidates[j].p1, 1e-6 + 1e-6 * a.candidates[j].p1);
      EXPECT_NEAR(a.candidates[j].p2, b.candidates[j].p2, 1e-6);
    }
  }
}

TEST(Discover, CandidateOrderInvariance) {
  GraphConfig cfg;
  cfg.n_obs = 5;
  cfg.p_target = 0.4;
  std::mt19937_64 rng(4);
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const TimeSeriesPanel p = simulate_panel(sample_graph_spec(cfg, seed), 1500, seed + 60);
    std::vector<int> perm(static_cast<size_t>(p.n_candidates()));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    TimeSeriesPanel q = p;
    for (size_t k = 0; k < perm.size(); ++k) {
      q.candidates.col(static_cast<Eigen::Index>(k)) = p.candidates.col(perm[k]);
      q.names[k] = p.names[static_cast<size_t>(perm[k])];
    }
    const DiscoveryReport a = discover(p);
    const DiscoveryReport b = discover(q);
    for (size_t k = 0; k < perm.size(); ++k) {
      const CandidateResult& x = a.candidates[static_cast<size_t>(perm[k])];
      const CandidateResult& y = b.candidates[k];
      EXPECT_EQ(x.decision, y.decision);
      EXPECT_EQ(x.lag, y.lag);
      EXPECT_NEAR(x.p1, y.p1, 1e-9 + 1e-9 * x.p1);
      EXPECT_NEAR(x.p2, y.p2, 1e-9);
    }
  }
}

TEST(Discover, ZeroLagInConditioningIsFlagged) {
  std::mt19937_64 rng(5);
  TimeSeriesPanel p;
  p.candidates = normal_matrix(rng, 300, 2);
  p.target = normal_vector(rng, 300);
  p.names = {"a", "b"};
  const DiscoveryReport r = discover_with_lags(p, table({1, 0}));
  EXPECT_TRUE(r.candidates[0].zero_lag_in_conditioning);
  EXPECT_FALSE(r.candidates[1].zero_lag_in_conditioning);
}

TEST(Discover, DegenerateWindowMarksNotCause) {
  std::mt19937_64 rng(6);
  TimeSeriesPanel p;
  p.candidates = normal_matrix(rng, 50, 2);
  p.target = normal_vector(rng, 50);
  p.names = {"a", "b"};
  const DiscoveryReport r = discover_with_lags(p, table({0, 45}));
  EXPECT_TRUE(r.candidates[0].degenerate);
  EXPECT_EQ(r.candidates[0].decision, Decision::NotCause);
}

TEST(Discover, CiTestSeamIsUsed) {
  std::mt19937_64 rng(7);
  TimeSeriesPanel p;
  p.candidates = normal_matrix(rng, 200, 1);
  p.target = normal_vector(rng, 200);
  p.names = {"a"};
  DiscoveryOptions o;
  int calls = 0;
  o.ci_test = [&](const Vector&, const Vector&, const Matrix& z) {
    ++calls;
    CiResult r;
    r.p = z.cols() == 1 ? 0.0 : 0.9;  // first test conditions on Y_{t+w-1} only
    return r;
  };
  const DiscoveryReport r = discover_with_lags(p, table({1}), o);
  EXPECT_EQ(calls, 2);
  EXPECT_EQ(r.candidates[0].decision, Decision::Cause);
}

TEST(Discover, RealDataPreset) {
  const DiscoveryOptions o = DiscoveryOptions::real_data();
  EXPECT_DOUBLE_EQ(o.threshold1, 0.05);
  EXPECT_DOUBLE_EQ(o.threshold2, 0.2);
  EXPECT_DOUBLE_EQ(o.lag.coef_threshold, 0.0);
}

}  // namespace
}  // namespace sypi
