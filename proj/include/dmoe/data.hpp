#ifndef DMOE_DATA_HPP
#define DMOE_DATA_HPP

#include "dmoe/common.hpp"

namespace dmoe {

/// Observations of one time interval. Rows of X and Z carry the leading
/// intercept column; row order is the temporal order inside the interval.
struct DataBatch {
  int interval_index = 0;
  Vector y;
  Matrix X;  // N x (p+1), component covariates
  Matrix Z;  // N x (q+1), gating covariates

  Eigen::Index size() const noexcept { return y.size(); }
  bool empty() const noexcept { return y.size() == 0; }

  /// Throws InvalidInput unless y, X and Z have matching row counts and X/Z
  /// have the given column counts.
  void validate(Eigen::Index x_cols, Eigen::Index z_cols) const;
};

}  // namespace dmoe

#endif
