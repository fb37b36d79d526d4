#include "sypi/panel.hpp"

#include "sypi/error.hpp"

#include <cmath>

namespace sypi {

namespace {

// Returns false when the column has no usable spread.
bool standardize_in_place(Eigen::Ref<Vector> v) {
  if (v.size() == 0) return false;
  const double mean = v.mean();
  const double mean_sq = v.squaredNorm() / static_cast<double>(v.size());
  v.array() -= mean;
  const double var = v.squaredNorm() / static_cast<double>(v.size());
  if (!(var > 1e-12 * mean_sq)) return false;
  v /= std::sqrt(var);
  return true;
}

}  // namespace

void TimeSeriesPanel::validate() const {
  if (candidates.rows() != target.size()) {
    throw_data("panel: candidate rows (" + std::to_string(candidates.rows()) +
               ") differ from target length (" + std::to_string(target.size()) + ")");
  }
  if (static_cast<long>(names.size()) != candidates.cols()) {
    throw_data("panel: " + std::to_string(names.size()) + " names for " +
               std::to_string(candidates.cols()) + " candidate columns");
  }
  if (!time_labels.empty() && static_cast<long>(time_labels.size()) != target.size()) {
    throw_data("panel: time label count differs from series length");
  }
  if (!candidates.allFinite() || !target.allFinite()) throw_data("panel: non-finite values");
}

void TimeSeriesPanel::standardize() {
  near_constant.assign(static_cast<size_t>(candidates.cols()), false);
  for (Eigen::Index j = 0; j < candidates.cols(); ++j) {
    near_constant[static_cast<size_t>(j)] = !standardize_in_place(candidates.col(j));
  }
  standardize_in_place(target);
}

}  // namespace sypi
