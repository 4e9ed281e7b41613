#include "dmoe/mixture.hpp"

#include <array>
#include <cmath>
#include <limits>

namespace dmoe {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void require_finite(const Vector& v, const char* what) {
  if (!v.allFinite()) throw InvalidInput(std::string(what) + " has non-finite entries");
}

// log omega over (0, psi); writes K entries.
void log_softmax_with_reference(const double* psi, int K, double* out) {
  double max_psi = 0.0;
  for (int k = 1; k < K; ++k) max_psi = std::max(max_psi, psi[k - 1]);
  double sum = std::exp(-max_psi);
  for (int k = 1; k < K; ++k) sum += std::exp(psi[k - 1] - max_psi);
  const double log_norm = max_psi + std::log(sum);
  out[0] = -log_norm;
  for (int k = 1; k < K; ++k) out[k] = psi[k - 1] - log_norm;
}

}  // namespace

bool PoissonComponent::admissible(double y) const {
  return std::isfinite(y) && y >= 0.0 && y == std::floor(y);
}

double PoissonComponent::log_base(double y) const { return -std::lgamma(y + 1.0); }

double PoissonComponent::log_kernel(double y, double eta) const { return y * eta - std::exp(eta); }

ScalarDerivatives PoissonComponent::kernel_derivatives(double y, double eta) const {
  const double lambda = std::exp(eta);
  return {y * eta - lambda, y - lambda, -lambda};
}

double PoissonComponent::mean_parameter(double eta) const { return std::exp(eta); }

double PoissonComponent::sample(double eta, Rng& rng) const {
  std::poisson_distribution<long long> poisson(std::exp(eta));
  return static_cast<double>(poisson(rng));
}

std::shared_ptr<const ComponentDensity> make_component(const std::string& name) {
  if (name == "poisson") return std::make_shared<PoissonComponent>();
  throw InvalidInput("unknown component family '" + name + "'");
}

void MixtureSpec::validate() const {
  if (K < 1 || K > kMaxComponents) {
    throw InvalidInput("number of components must be in [1, " + std::to_string(kMaxComponents) + "]");
  }
  if (!family) throw InvalidInput("mixture has no component family");
  for (int i : x_indices)
    if (i < 0) throw InvalidInput("negative component covariate index");
  for (int i : z_indices)
    if (i < 0) throw InvalidInput("negative gating covariate index");
}

MixtureSpec make_spec(int K, std::shared_ptr<const ComponentDensity> family,
                      std::vector<int> x_indices, std::vector<int> z_indices) {
  MixtureSpec spec{K, std::move(family), std::move(x_indices), std::move(z_indices)};
  spec.validate();
  return spec;
}

Vector LinearPredictors::stacked() const {
  Vector rho(eta.size() + psi.size());
  rho << eta, psi;
  return rho;
}

LinearPredictors LinearPredictors::from_stacked(const Vector& rho, int K) {
  if (rho.size() != 2 * K - 1) throw InvalidInput("stacked predictor length must be 2K-1");
  return {rho.head(K), rho.tail(K - 1)};
}

Vector gating_weights(const Vector& psi) { return log_gating_weights(psi).array().exp(); }

Vector log_gating_weights(const Vector& psi) {
  require_finite(psi, "gating predictor");
  const int K = static_cast<int>(psi.size()) + 1;
  if (K > kMaxComponents) throw InvalidInput("too many gating predictors");
  Vector out(K);
  log_softmax_with_reference(psi.data(), K, out.data());
  return out;
}

Matrix design_matrix(const MixtureSpec& spec, const Eigen::Ref<const Vector>& x_row,
                     const Eigen::Ref<const Vector>& z_row) {
  if (x_row.size() != spec.beta_size() || z_row.size() != spec.theta_size()) {
    throw InvalidInput("covariate row length does not match the mixture spec");
  }
  Matrix W = Matrix::Zero(spec.rho_dim(), spec.dim());
  for (int k = 0; k < spec.K; ++k) W.block(k, spec.beta_offset(k), 1, spec.beta_size()) = x_row.transpose();
  for (int k = 1; k < spec.K; ++k) {
    W.block(spec.K + k - 1, spec.theta_offset(k), 1, spec.theta_size()) = z_row.transpose();
  }
  return W;
}

LinearPredictors linear_predictors(const MixtureSpec& spec, const Vector& gamma,
                                   const Eigen::Ref<const Vector>& x_row,
                                   const Eigen::Ref<const Vector>& z_row) {
  if (gamma.size() != spec.dim()) throw InvalidInput("coefficient vector length does not match the mixture spec");
  if (x_row.size() != spec.beta_size() || z_row.size() != spec.theta_size()) {
    throw InvalidInput("covariate row length does not match the mixture spec");
  }
  LinearPredictors rho{Vector(spec.K), Vector(spec.K - 1)};
  for (int k = 0; k < spec.K; ++k) rho.eta[k] = x_row.dot(gamma.segment(spec.beta_offset(k), spec.beta_size()));
  for (int k = 1; k < spec.K; ++k) {
    rho.psi[k - 1] = z_row.dot(gamma.segment(spec.theta_offset(k), spec.theta_size()));
  }
  return rho;
}

double mixture_log_density_stacked(const MixtureSpec& spec, double y, double log_base, const double* rho) {
  const int K = spec.K;
  std::array<double, kMaxComponents> pi;
  log_softmax_with_reference(rho + K, K, pi.data());
  for (int k = 0; k < K; ++k) pi[k] += spec.family->log_kernel(y, rho[k]);
  return log_sum_exp(std::span<const double>(pi.data(), K)) + log_base;
}

namespace {

void check_predictors(const MixtureSpec& spec, double y, const LinearPredictors& rho) {
  if (rho.eta.size() != spec.K || rho.psi.size() != spec.K - 1) {
    throw InvalidInput("linear predictors do not match the number of components");
  }
  require_finite(rho.eta, "component predictor");
  require_finite(rho.psi, "gating predictor");
  if (!spec.family->admissible(y)) {
    throw InvalidInput("response " + std::to_string(y) + " is inadmissible for " + spec.family->name());
  }
}

// pi_k = log omega_k + log f_k(y)
Vector log_joint_terms(const MixtureSpec& spec, double y, const LinearPredictors& rho) {
  Vector pi = log_gating_weights(rho.psi);
  const double base = spec.family->log_base(y);
  for (int k = 0; k < spec.K; ++k) pi[k] += spec.family->log_kernel(y, rho.eta[k]) + base;
  return pi;
}

}  // namespace

double mixture_log_density(const MixtureSpec& spec, double y, const LinearPredictors& rho) {
  check_predictors(spec, y, rho);
  const Vector pi = log_joint_terms(spec, y, rho);
  return log_sum_exp(std::span<const double>(pi.data(), pi.size()));
}

Vector responsibilities(const MixtureSpec& spec, double y, const LinearPredictors& rho) {
  check_predictors(spec, y, rho);
  const Vector pi = log_joint_terms(spec, y, rho);
  const double norm = log_sum_exp(std::span<const double>(pi.data(), pi.size()));
  if (!std::isfinite(norm)) throw DegenerateLikelihood("every mixture term of the observation is -inf");
  return (pi.array() - norm).exp();
}

ScalarDerivatives poisson_derivatives(double y, double eta) {
  return PoissonComponent{}.derivatives(y, eta);
}

GatingDerivatives gating_derivatives(int k, const Vector& psi) {
  const int K = static_cast<int>(psi.size()) + 1;
  if (k < 0 || k >= K) throw InvalidInput("component index out of range");
  const Vector omega = gating_weights(psi);
  const Vector omega_rest = omega.tail(K - 1);
  GatingDerivatives out;
  out.grad = -omega_rest;
  if (k > 0) out.grad[k - 1] += 1.0;
  out.hess = omega_rest * omega_rest.transpose();
  out.hess.diagonal() -= omega_rest;
  return out;
}

Vector batch_log_base(const MixtureSpec& spec, const DataBatch& batch) {
  Vector base(batch.size());
  for (Eigen::Index i = 0; i < batch.size(); ++i) base[i] = spec.family->log_base(batch.y[i]);
  return base;
}

double batch_log_likelihood(const MixtureSpec& spec, const DataBatch& batch, const Vector& gamma) {
  return batch_log_likelihood(spec, batch, batch_log_base(spec, batch), gamma);
}

double batch_log_likelihood(const MixtureSpec& spec, const DataBatch& batch, const Vector& log_base,
                            const Vector& gamma, Vector* per_obs) {
  const Eigen::Index n = batch.size();
  const int K = spec.K;
  // rho for every observation, one row each
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rho(n, spec.rho_dim());
  for (int k = 0; k < K; ++k) {
    rho.col(k).noalias() = batch.X * gamma.segment(spec.beta_offset(k), spec.beta_size());
  }
  for (int k = 1; k < K; ++k) {
    rho.col(K + k - 1).noalias() = batch.Z * gamma.segment(spec.theta_offset(k), spec.theta_size());
  }
  if (per_obs) per_obs->resize(n);
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double term = mixture_log_density_stacked(spec, batch.y[i], log_base[i], rho.row(i).data());
    if (per_obs) (*per_obs)[i] = term;
    total += term;
  }
  return std::isnan(total) ? kNegInf : total;
}

void check_admissible(const MixtureSpec& spec, const DataBatch& batch) {
  for (Eigen::Index i = 0; i < batch.size(); ++i) {
    if (!spec.family->admissible(batch.y[i])) {
      throw InvalidInput("interval " + std::to_string(batch.interval_index) + ": response " +
                         std::to_string(batch.y[i]) + " is inadmissible for " + spec.family->name());
    }
  }
}

}  // namespace dmoe
