#include "sypi/discovery.hpp"

#include "sypi/error.hpp"

#include <algorithm>
#include <string>

namespace sypi {

ConditioningSet build_conditioning_set(int i, const LagTable& lags) {
  if (i < 0 || i >= lags.size()) throw_usage("conditioning set: candidate index out of range");
  if (!lags.present(i)) throw_usage("conditioning set: candidate has no lag");
  ConditioningSet set;
  for (int j = 0; j < lags.size(); ++j) {
    if (j == i || !lags.present(j)) continue;
    set.push_back({j, lags.lag(i) - lags.lag(j) - 1});
  }
  return set;
}

AlignedSamples align_samples(const TimeSeriesPanel& panel, std::span<const NodeRef> refs,
                             long min_rows) {
  if (refs.empty()) throw_usage("align_samples: no node references");
  const auto [lo, hi] = std::minmax_element(refs.begin(), refs.end(), [](const NodeRef& a, const NodeRef& b) {
    return a.offset < b.offset;
  });
  const long min_offset = lo->offset;
  const long max_offset = hi->offset;
  const long T = panel.length();
  const long n_eff = T - (max_offset - min_offset);
  if (n_eff < std::max(min_rows, 1L)) {
    throw_data("align_samples: only " + std::to_string(std::max(n_eff, 0L)) +
               " aligned rows, need " + std::to_string(std::max(min_rows, 1L)));
  }

  AlignedSamples out;
  out.n_eff = n_eff;
  out.data.resize(n_eff, static_cast<Eigen::Index>(refs.size()));
  // First anchor t0 = -min_offset so that t0 + min_offset == 0.
  const long first = -min_offset;
  for (size_t c = 0; c < refs.size(); ++c) {
    const NodeRef& ref = refs[c];
    const long start = first + ref.offset;
    if (ref.series == kTarget) {
      out.data.col(static_cast<Eigen::Index>(c)) = panel.target.segment(start, n_eff);
    } else {
      if (ref.series < 0 || ref.series >= panel.n_candidates()) {
        throw_usage("align_samples: series index out of range");
      }
      out.data.col(static_cast<Eigen::Index>(c)) = panel.candidates.col(ref.series).segment(start, n_eff);
    }
  }
  return out;
}

const char* to_string(Decision d) {
  switch (d) {
    case Decision::Cause: return "CAUSE";
    case Decision::NotCause: return "NOT_CAUSE";
    case Decision::NoLag: return "NO_LAG";
  }
  return "?";
}

DiscoveryOptions DiscoveryOptions::real_data() {
  DiscoveryOptions o;
  o.threshold1 = 0.05;
  o.lag.coef_threshold = 0.0;
  return o;
}

std::vector<int> DiscoveryReport::causes() const {
  std::vector<int> out;
  for (size_t i = 0; i < candidates.size(); ++i) {
    if (candidates[i].decision == Decision::Cause) out.push_back(static_cast<int>(i));
  }
  return out;
}

Decision decide(const CandidateResult& c, double threshold1, double threshold2) {
  if (!c.lag) return Decision::NoLag;
  if (c.degenerate) return Decision::NotCause;
  return (c.p1 < threshold1 && c.p2 > threshold2) ? Decision::Cause : Decision::NotCause;
}

namespace {

CiResult run_test(const CiTest& test, const TimeSeriesPanel& panel, NodeRef a, NodeRef b,
                  const ConditioningSet& given) {
  std::vector<NodeRef> refs{a, b};
  refs.insert(refs.end(), given.begin(), given.end());
  const long k = static_cast<long>(given.size());
  const AlignedSamples s = align_samples(panel, refs, k + 4);
  const Vector x = s.data.col(0);
  const Vector y = s.data.col(1);
  const Matrix z = s.data.rightCols(k);
  return test ? test(x, y, z) : partial_correlation_test(x, y, z);
}

}  // namespace

DiscoveryReport discover_with_lags(const TimeSeriesPanel& panel, const LagTable& lags,
                                   const DiscoveryOptions& options) {
  panel.validate();
  if (lags.size() != panel.n_candidates()) throw_usage("discover: lag table size mismatch");

  DiscoveryReport report;
  report.names = panel.names;
  report.target_name = panel.target_name;
  report.lags = lags;
  report.threshold1 = options.threshold1;
  report.threshold2 = options.threshold2;
  report.candidates.resize(static_cast<size_t>(panel.n_candidates()));

  for (int i = 0; i < panel.n_candidates(); ++i) {
    CandidateResult& c = report.candidates[static_cast<size_t>(i)];
    c.lag = lags.lags[static_cast<size_t>(i)];
    if (!c.lag) continue;
    const int w = *c.lag;

    ConditioningSet given = build_conditioning_set(i, lags);
    for (const NodeRef& ref : given) {
      if (ref.offset == w - 1 && lags.lag(ref.series) == 0) c.zero_lag_in_conditioning = true;
    }
    given.push_back({kTarget, w - 1});

    try {
      const CiResult first = run_test(options.ci_test, panel, {i, 0}, {kTarget, w}, given);
      c.p1 = first.p;
      c.n_eff = first.n_eff;
      c.degenerate = first.degenerate;

      given.push_back({i, 0});
      const CiResult second = run_test(options.ci_test, panel, {i, -1}, {kTarget, w}, given);
      c.p2 = second.p;
      c.tested2 = true;
      c.degenerate = c.degenerate || second.degenerate;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Data) throw;
      c.degenerate = true;
    }
    c.decision = decide(c, options.threshold1, options.threshold2);
  }
  return report;
}

DiscoveryReport discover(const TimeSeriesPanel& panel, const DiscoveryOptions& options) {
  return discover_with_lags(panel, find_all_lags(panel, options.lag), options);
}

}  // namespace sypi
