#include "dmoe/common.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

namespace dmoe {

double log_sum_exp(std::span<const double> values) {
  double max_value = -std::numeric_limits<double>::infinity();
  for (double v : values) max_value = std::max(max_value, v);
  if (!std::isfinite(max_value)) return max_value;
  double sum = 0.0;
  for (double v : values) sum += std::exp(v - max_value);
  return max_value + std::log(sum);
}

std::uint64_t double_bits(double value) noexcept { return std::bit_cast<std::uint64_t>(value); }

void fill_standard_normal(Rng& rng, Eigen::Ref<Vector> out) {
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Eigen::Index i = 0; i < out.size(); ++i) out[i] = normal(rng);
}

}  // namespace dmoe
