#include "dmoe/data.hpp"

namespace dmoe {

void DataBatch::validate(Eigen::Index x_cols, Eigen::Index z_cols) const {
  if (X.rows() != y.size() || Z.rows() != y.size()) {
    throw InvalidInput("batch " + std::to_string(interval_index) + ": row counts of y, X, Z differ");
  }
  if (X.cols() != x_cols || Z.cols() != z_cols) {
    throw InvalidInput("batch " + std::to_string(interval_index) +
                       ": covariate rows do not match the model dimensions");
  }
}

}  // namespace dmoe
