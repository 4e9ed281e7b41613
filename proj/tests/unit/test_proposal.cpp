#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "../support/fixtures.hpp"
#include "dmoe/proposal.hpp"

using namespace dmoe;
using namespace dmoe::testing;

namespace {

DataBatch gaussian_batch(Rng& rng, int n, int p) {
  DataBatch b;
  b.interval_index = 1;
  b.X.resize(n, p + 1);
  b.X.col(0).setOnes();
  b.X.rightCols(p) = Matrix::Random(n, p);
  b.Z = Matrix::Ones(n, 1);
  b.y = random_vector(rng, n);
  return b;
}

}  // namespace

TEST_CASE("batch update equals the kalman measurement update for the gaussian fixture") {
  Rng rng(21);
  const double sigma = 0.8;
  const auto spec = make_spec(1, gaussian_family(sigma), {0, 1}, {});
  const DataBatch batch = gaussian_batch(rng, 25, 2);
  const GaussianMoments prior(random_vector(rng, 3), random_spd(rng, 3));
  const auto post = update_with_batch(prior, spec, batch);
  const auto k = kalman_update({prior.mean, prior.cov}, batch.X, batch.y, sigma);
  CHECK((post.mean - k.mean).norm() < 1e-8);
  CHECK((post.cov - k.cov).norm() < 1e-8);

  // order invariance holds for the linear-Gaussian case
  std::vector<int> order(25);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  DataBatch shuffled = batch;
  for (int i = 0; i < 25; ++i) {
    shuffled.y[i] = batch.y[order[i]];
    shuffled.X.row(i) = batch.X.row(order[i]);
    shuffled.Z.row(i) = batch.Z.row(order[i]);
  }
  const auto permuted = update_with_batch(prior, spec, shuffled);
  CHECK((permuted.mean - post.mean).norm() < 1e-8);
}

TEST_CASE("proposal draws and density") {
  Rng rng(22);
  const GaussianMoments m(random_vector(rng, 3), random_spd(rng, 3));
  const auto q = ProposalDistribution::from_moments(m);
  const Matrix draws = sample(q, rng, 40000);
  const Vector mean = draws.rowwise().mean();
  const Matrix centered = draws.colwise() - mean;
  const Matrix cov = centered * centered.transpose() / 40000.0;
  CHECK((mean - m.mean).norm() < 0.05);
  CHECK((cov - m.cov).norm() < 0.05 * m.cov.norm());

  const Vector x = random_vector(rng, 3);
  const Vector r = x - m.mean;
  const double expected = -1.5 * std::log(2.0 * std::numbers::pi) - 0.5 * std::log(m.cov.determinant()) -
                          0.5 * r.dot(m.cov.inverse() * r);
  CHECK(log_density(q, x) == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("build_proposal uses the particle moments and widens with scale") {
  Rng rng(23);
  const auto spec = make_spec(1, gaussian_family(1.0), {0}, {});
  ParticleSet set;
  set.particles = Matrix::Random(2, 200);
  set.reset_weights();
  const Matrix U = 0.1 * Matrix::Identity(2, 2);
  const DataBatch batch = gaussian_batch(rng, 10, 1);
  const auto base = build_proposal(set, U, batch, spec);
  const auto expected = update_with_batch(empirical_prior_moments(set, U), spec, batch);
  CHECK((base.moments.mean - expected.mean).norm() < 1e-12);
  ProposalOptions wide;
  wide.scale = 2.0;
  const auto widened = build_proposal(set, U, batch, spec, wide);
  CHECK((widened.moments.cov - 2.0 * base.moments.cov).norm() < 1e-12);
  wide.scale = 0.5;
  CHECK_THROWS_AS(build_proposal(set, U, batch, spec, wide), InvalidInput);
  DataBatch empty;
  CHECK_THROWS_AS(build_proposal(set, U, empty, spec), InvalidInput);
}

TEST_CASE("poisson batch update moves towards the data") {
  Rng rng(24);
  const auto spec = make_spec(1, make_component("poisson"), {}, {});
  DataBatch batch;
  batch.y = Vector::Constant(50, 7.0);
  batch.X = Matrix::Ones(50, 1);
  batch.Z = Matrix::Ones(50, 1);
  const GaussianMoments prior(Vector::Zero(1), Matrix::Identity(1, 1));
  LaplaceOptions laplace;
  laplace.iterations = 25;
  const auto post = update_with_batch(prior, spec, batch, laplace);
  CHECK(post.mean[0] == doctest::Approx(std::log(7.0)).epsilon(0.02));
  CHECK(post.cov(0, 0) < 1.0 / 300.0);
}
