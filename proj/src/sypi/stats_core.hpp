#pragma once

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace sypi {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;  // rows = samples, columns = variables

/// Residuals of the least-squares fit of y on [1, Z]. Rank-deficient Z is
/// handled with the minimum-norm solution.
Vector ols_residuals(const Vector& y, const Matrix& Z);

/// Pearson correlation; `degenerate` is set when either input has no spread.
struct Correlation {
  double r = 0.0;
  bool degenerate = false;
};

Correlation pearson(const Vector& x, const Vector& y);

/// Correlation of x and y after regressing both on Z (plus intercept).
/// Returns r = 0 flagged degenerate when a residual has (relative) variance
/// below 1e-12.
Correlation partial_correlation(const Vector& x, const Vector& y, const Matrix& Z);

struct PValue {
  double p = 1.0;
  bool degenerate = false;
};

/// Two-sided Fisher-z p-value for a (partial) correlation r estimated from
/// n_eff samples with k conditioning variables.
PValue fisher_z_pvalue(double r, long n_eff, long k);

struct CiResult {
  double r = 0.0;
  double p = 1.0;
  long n_eff = 0;
  long k = 0;
  bool degenerate = false;
};

/// Partial-correlation CI test of x _||_ y | Z.
CiResult partial_correlation_test(const Vector& x, const Vector& y, const Matrix& Z);

/// Seam for alternative conditional-independence tests.
using CiTest = std::function<CiResult(const Vector&, const Vector&, const Matrix&)>;

inline double soft_threshold(double value, double lambda) {
  if (value > lambda) return value - lambda;
  if (value < -lambda) return value + lambda;
  return 0.0;
}

struct LassoOptions {
  double tol = 1e-7;
  int max_sweeps = 10000;
};

struct LassoFit {
  Vector coefficients;               // standardized scale
  double intercept = 0.0;            // mean of y
  int iterations = 0;                // completed sweeps
  bool converged = false;
  std::vector<int> constant_columns; // coefficients forced to zero
  std::vector<double> objective;     // objective after each sweep
};

/// Cyclic coordinate descent for (1/(2n))||y - Xb||^2 + lambda*||b||_1 with the
/// columns of X standardized (population variance) and y centered.
LassoFit lasso_cd(const Matrix& X, const Vector& y, double lambda, const LassoOptions& options = {});

}  // namespace sypi
