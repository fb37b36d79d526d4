#include "sypi/stats_core.hpp"

#include "sypi/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sypi {

namespace {

constexpr double kRelativeVarianceFloor = 1e-12;
constexpr double kCorrelationClamp = 1.0 - 1e-12;

void require_finite(const Eigen::Ref<const Matrix>& m, const char* what) {
  if (!m.allFinite()) throw_data(std::string(what) + " contains non-finite values");
}

double population_variance(const Vector& v) {
  if (v.size() == 0) return 0.0;
  const double mean = v.mean();
  return (v.array() - mean).square().mean();
}

}  // namespace

Vector ols_residuals(const Vector& y, const Matrix& Z) {
  if (Z.rows() != y.size() && Z.cols() > 0) {
    throw_usage("ols_residuals: " + std::to_string(Z.rows()) + " conditioning rows vs " +
                std::to_string(y.size()) + " response rows");
  }
  require_finite(y, "ols_residuals response");
  require_finite(Z, "ols_residuals design");

  Vector centered = y.array() - y.mean();
  if (Z.cols() == 0) return centered;

  // Centering both sides is the same projection as augmenting with an
  // intercept column.
  Matrix Zc = Z.rowwise() - Z.colwise().mean();
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(Zc);
  cod.setThreshold(1e-10);
  const Vector beta = cod.solve(centered);
  return centered - Zc * beta;
}

Correlation pearson(const Vector& x, const Vector& y) {
  if (x.size() != y.size()) throw_usage("pearson: length mismatch");
  const Vector xc = x.array() - x.mean();
  const Vector yc = y.array() - y.mean();
  const double sxx = xc.squaredNorm();
  const double syy = yc.squaredNorm();
  if (!(sxx > 0.0) || !(syy > 0.0)) return {0.0, true};
  const double r = xc.dot(yc) / std::sqrt(sxx * syy);
  return {std::clamp(r, -1.0, 1.0), false};
}

Correlation partial_correlation(const Vector& x, const Vector& y, const Matrix& Z) {
  if (x.size() != y.size()) throw_usage("partial_correlation: length mismatch");
  const Vector rx = ols_residuals(x, Z);
  const Vector ry = ols_residuals(y, Z);
  const double vx = population_variance(x);
  const double vy = population_variance(y);
  if (population_variance(rx) <= kRelativeVarianceFloor * vx || vx == 0.0 ||
      population_variance(ry) <= kRelativeVarianceFloor * vy || vy == 0.0) {
    return {0.0, true};
  }
  return pearson(rx, ry);
}

PValue fisher_z_pvalue(double r, long n_eff, long k) {
  if (!std::isfinite(r) || std::abs(r) > 1.0 + 1e-12) throw_usage("fisher_z_pvalue: |r| > 1");
  const long dof = n_eff - k - 3;
  if (dof < 1) return {1.0, true};
  const double z = std::atanh(std::clamp(r, -kCorrelationClamp, kCorrelationClamp));
  const double statistic = std::abs(z) * std::sqrt(static_cast<double>(dof));
  // 2 * (1 - Phi(s)) == erfc(s / sqrt(2)), without cancellation in the tail.
  const double p = std::erfc(statistic / std::sqrt(2.0));
  return {std::clamp(p, 0.0, 1.0), false};
}

CiResult partial_correlation_test(const Vector& x, const Vector& y, const Matrix& Z) {
  CiResult out;
  out.n_eff = x.size();
  out.k = Z.cols();
  if (out.n_eff < out.k + 4) {
    out.degenerate = true;
    return out;
  }
  const Correlation c = partial_correlation(x, y, Z);
  out.r = c.r;
  const PValue pv = fisher_z_pvalue(c.r, out.n_eff, out.k);
  out.p = c.degenerate ? 1.0 : pv.p;
  out.degenerate = c.degenerate || pv.degenerate;
  return out;
}

LassoFit lasso_cd(const Matrix& X, const Vector& y, double lambda, const LassoOptions& options) {
  if (X.rows() != y.size()) throw_usage("lasso_cd: design rows do not match response length");
  if (!(lambda >= 0.0)) throw_usage("lasso_cd: lambda must be >= 0");
  require_finite(X, "lasso_cd design");
  require_finite(y, "lasso_cd response");

  const Eigen::Index n = X.rows();
  const Eigen::Index p = X.cols();
  LassoFit fit;
  fit.coefficients = Vector::Zero(p);
  fit.intercept = n > 0 ? y.mean() : 0.0;
  if (n == 0 || p == 0) {
    fit.converged = true;
    return fit;
  }
  const double inv_n = 1.0 / static_cast<double>(n);

  Matrix Xs(n, p);
  std::vector<bool> active(static_cast<size_t>(p), true);
  for (Eigen::Index j = 0; j < p; ++j) {
    const double mean = X.col(j).mean();
    const double mean_sq = X.col(j).squaredNorm() * inv_n;
    const double var = (X.col(j).array() - mean).square().mean();
    if (!(var > kRelativeVarianceFloor * mean_sq)) {
      active[static_cast<size_t>(j)] = false;
      fit.constant_columns.push_back(static_cast<int>(j));
      Xs.col(j).setZero();
      continue;
    }
    Xs.col(j) = (X.col(j).array() - mean) / std::sqrt(var);
  }

  Vector residual = y.array() - fit.intercept;
  Vector& beta = fit.coefficients;
  auto objective = [&] { return 0.5 * inv_n * residual.squaredNorm() + lambda * beta.lpNorm<1>(); };

  for (int sweep = 0; sweep < options.max_sweeps; ++sweep) {
    double max_change = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      if (!active[static_cast<size_t>(j)]) continue;
      const double old = beta(j);
      // Standardized columns have (1/n)||x_j||^2 = 1.
      const double updated = soft_threshold(old + inv_n * Xs.col(j).dot(residual), lambda);
      const double delta = updated - old;
      if (delta != 0.0) {
        residual.noalias() -= delta * Xs.col(j);
        beta(j) = updated;
      }
      max_change = std::max(max_change, std::abs(delta));
    }
    fit.iterations = sweep + 1;
    fit.objective.push_back(objective());
    if (max_change < options.tol) {
      fit.converged = true;
      break;
    }
  }
  return fit;
}

}  // namespace sypi
