#ifndef DMOE_COMMON_HPP
#define DMOE_COMMON_HPP

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace dmoe {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Rng = std::mt19937_64;

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad arguments: dimension mismatch, non-finite inputs, inadmissible responses.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// A matrix that must be factorized could not be repaired into a usable one.
class NumericalSingularity : public Error {
 public:
  using Error::Error;
};

/// Every mixture term of an observation is -inf.
class DegenerateLikelihood : public Error {
 public:
  using Error::Error;
};

/// All importance weights of a filter step are -inf (or NaN).
class FilterDegeneracy : public Error {
 public:
  FilterDegeneracy(int interval_index, const std::string& what)
      : Error("interval " + std::to_string(interval_index) + ": " + what),
        interval_index_(interval_index) {}

  int interval_index() const noexcept { return interval_index_; }

 private:
  int interval_index_;
};

/// log(sum(exp(values))) with max subtraction; -inf for an empty or all -inf input.
double log_sum_exp(std::span<const double> values);

/// splitmix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed for a sub-stream identified by `tag` under `base`.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag) noexcept {
  return mix64(mix64(base) ^ mix64(tag + 0x632be59bd9b4e019ULL));
}

/// Bit pattern of a double, so real-valued grid coordinates can key a seed.
std::uint64_t double_bits(double value) noexcept;

/// Fill `out` with independent standard normal draws.
void fill_standard_normal(Rng& rng, Eigen::Ref<Vector> out);

}  // namespace dmoe

#endif
