#pragma once

#include "sypi/scm_sim.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace sypi::testing {

/// Spec with self-loop `memory` on observed series and the target, memoryless
/// hidden series and unit noise.
inline FullTimeGraphSpec make_spec(int n_obs, int n_hidden, std::vector<CrossEdge> edges, double memory = 0.5) {
  FullTimeGraphSpec spec;
  spec.n_obs = n_obs;
  spec.n_hidden = n_hidden;
  const int n = spec.n_series();
  spec.self_weight.assign(static_cast<size_t>(n), memory);
  for (int h = n_obs; h < n_obs + n_hidden; ++h) spec.self_weight[static_cast<size_t>(h)] = 0.0;
  spec.noise_std.assign(static_cast<size_t>(n), 1.0);
  spec.edges = std::move(edges);
  return spec;
}

/// X1 -> U -> Y and X2 -> Y with unit lags; U hidden and memoryless.
inline FullTimeGraphSpec two_path_spec() {
  return make_spec(2, 1, {{0, 2, 1, 0.9}, {2, 3, 1, 0.9}, {1, 3, 1, 0.85}});
}

inline Vector normal_vector(std::mt19937_64& rng, long n) {
  std::normal_distribution<double> z;
  Vector v(n);
  for (long i = 0; i < n; ++i) v(i) = z(rng);
  return v;
}

inline Matrix normal_matrix(std::mt19937_64& rng, long rows, long cols) {
  std::normal_distribution<double> z;
  Matrix m(rows, cols);
  for (long c = 0; c < cols; ++c)
    for (long r = 0; r < rows; ++r) m(r, c) = z(rng);
  return m;
}

/// Fresh directory under the system temp path, removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("sypi_test_" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name) const { return (path_ / name).string(); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

/// One-sample Kolmogorov-Smirnov statistic against U(0, 1).
inline double ks_uniform_statistic(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  double d = 0.0;
  for (size_t i = 0; i < values.size(); ++i) {
    d = std::max(d, static_cast<double>(i + 1) / n - values[i]);
    d = std::max(d, values[i] - static_cast<double>(i) / n);
  }
  return d;
}

/// Asymptotic KS critical value at level 0.01.
inline double ks_critical_001(size_t n) { return 1.6276 / std::sqrt(static_cast<double>(n)); }

}  // namespace sypi::testing
