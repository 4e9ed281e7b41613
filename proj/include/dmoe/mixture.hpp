#ifndef DMOE_MIXTURE_HPP
#define DMOE_MIXTURE_HPP

#include <memory>
#include <string>
#include <vector>

#include "dmoe/common.hpp"
#include "dmoe/data.hpp"

namespace dmoe {

/// Value of a scalar log density and its first two derivatives in eta.
struct ScalarDerivatives {
  double value = 0.0;
  double first = 0.0;
  double second = 0.0;
};

/// A single-parameter component density f(y | lambda) with eta = g(lambda).
///
/// The log density is split as log f(y | eta) = log_base(y) + log_kernel(y, eta).
/// The base term is shared by all components of one family, so mixtures can
/// factor it out of the log-sum-exp and batches can precompute it once.
class ComponentDensity {
 public:
  virtual ~ComponentDensity() = default;

  virtual std::string name() const = 0;
  virtual bool admissible(double y) const = 0;
  virtual double log_base(double y) const = 0;
  virtual double log_kernel(double y, double eta) const = 0;
  /// Kernel value with its first and second eta-derivatives.
  virtual ScalarDerivatives kernel_derivatives(double y, double eta) const = 0;
  /// Inverse link, eta -> lambda.
  virtual double mean_parameter(double eta) const = 0;
  /// One draw of y given eta.
  virtual double sample(double eta, Rng& rng) const = 0;

  double log_density(double y, double eta) const { return log_base(y) + log_kernel(y, eta); }

  ScalarDerivatives derivatives(double y, double eta) const {
    auto d = kernel_derivatives(y, eta);
    d.value += log_base(y);
    return d;
  }
};

/// Poisson counts with log link, lambda = exp(eta).
class PoissonComponent final : public ComponentDensity {
 public:
  std::string name() const override { return "poisson"; }
  bool admissible(double y) const override;
  double log_base(double y) const override;
  double log_kernel(double y, double eta) const override;
  ScalarDerivatives kernel_derivatives(double y, double eta) const override;
  double mean_parameter(double eta) const override;
  double sample(double eta, Rng& rng) const override;
};

/// Component family by name; only "poisson" is built in.
std::shared_ptr<const ComponentDensity> make_component(const std::string& name);

inline constexpr int kMaxComponents = 64;

/// Structure of a dynamic mixture of experts.
///
/// The coefficient vector is gamma = (beta_1, ..., beta_K, theta_2, ..., theta_K)
/// with beta_k of length p+1 and theta_k of length q+1; the linear predictors are
/// rho = (eta_1, ..., eta_K, psi_2, ..., psi_K). Component 1 (index 0) is the
/// gating reference category with psi_1 = 0.
struct MixtureSpec {
  int K = 1;
  std::shared_ptr<const ComponentDensity> family;
  std::vector<int> x_indices;  // covariate columns used by the components
  std::vector<int> z_indices;  // covariate columns used by the gate

  int p() const noexcept { return static_cast<int>(x_indices.size()); }
  int q() const noexcept { return static_cast<int>(z_indices.size()); }
  int beta_size() const noexcept { return p() + 1; }
  int theta_size() const noexcept { return q() + 1; }
  /// d = K(p+1) + (K-1)(q+1)
  int dim() const noexcept { return K * beta_size() + (K - 1) * theta_size(); }
  /// 2K - 1
  int rho_dim() const noexcept { return 2 * K - 1; }
  int beta_offset(int k) const noexcept { return k * beta_size(); }
  /// Offset of theta for component k, k in [1, K).
  int theta_offset(int k) const noexcept { return K * beta_size() + (k - 1) * theta_size(); }

  void validate() const;
};

MixtureSpec make_spec(int K, std::shared_ptr<const ComponentDensity> family,
                      std::vector<int> x_indices, std::vector<int> z_indices);

struct LinearPredictors {
  Vector eta;  // K
  Vector psi;  // K - 1

  /// Stacked (eta', psi')'.
  Vector stacked() const;
  static LinearPredictors from_stacked(const Vector& rho, int K);
};

struct GatingDerivatives {
  Vector grad;  // K - 1
  Matrix hess;  // (K - 1) x (K - 1)
};

/// Multinomial logit weights with component 0 as reference.
Vector gating_weights(const Vector& psi);
Vector log_gating_weights(const Vector& psi);

/// W mapping gamma to rho for one observation; rows carry the intercept.
Matrix design_matrix(const MixtureSpec& spec, const Eigen::Ref<const Vector>& x_row,
                     const Eigen::Ref<const Vector>& z_row);

LinearPredictors linear_predictors(const MixtureSpec& spec, const Vector& gamma,
                                   const Eigen::Ref<const Vector>& x_row,
                                   const Eigen::Ref<const Vector>& z_row);

double mixture_log_density(const MixtureSpec& spec, double y, const LinearPredictors& rho);

/// Posterior component-membership probabilities of one observation.
Vector responsibilities(const MixtureSpec& spec, double y, const LinearPredictors& rho);

ScalarDerivatives poisson_derivatives(double y, double eta);

/// Derivatives of log omega_k in psi, k in [0, K). The Hessian does not depend on k.
GatingDerivatives gating_derivatives(int k, const Vector& psi);

/// Hot-path variant over the stacked rho; no validation beyond what the caller did.
/// `log_base` is family->log_base(y), passed in so batches can cache it.
double mixture_log_density_stacked(const MixtureSpec& spec, double y, double log_base,
                                   const double* rho);

/// Per-observation family base terms log_base(y_i) of a batch.
Vector batch_log_base(const MixtureSpec& spec, const DataBatch& batch);

/// log prod_i f(y_i | W_i gamma) over a whole batch.
double batch_log_likelihood(const MixtureSpec& spec, const DataBatch& batch, const Vector& gamma);

/// Same with precomputed base terms; per-observation terms go to `per_obs` when non-null.
double batch_log_likelihood(const MixtureSpec& spec, const DataBatch& batch, const Vector& log_base,
                            const Vector& gamma, Vector* per_obs = nullptr);

/// Throws InvalidInput if any response is inadmissible for the family.
void check_admissible(const MixtureSpec& spec, const DataBatch& batch);

}  // namespace dmoe

#endif
