#include <doctest.h>

#include "dmoe/simulation.hpp"

using namespace dmoe;

TEST_CASE("dgp names") {
  CHECK(parse_dgp("m1") == DgpModel::kM1);
  CHECK(parse_dgp("M3") == DgpModel::kM3);
  CHECK(to_string(DgpModel::kM2) == "m2");
  CHECK_THROWS_AS(parse_dgp("m4"), InvalidInput);
}

TEST_CASE("simulated datasets have the requested shape") {
  for (DgpModel model : {DgpModel::kM1, DgpModel::kM2, DgpModel::kM3}) {
    DgpSpec spec;
    spec.model = model;
    spec.seed = 4;
    const auto data = simulate(spec);
    CHECK(data.batches.size() == 12);
    CHECK(data.observation_count() == 1200);
    CHECK(data.path.values.rows() == 12);
    CHECK(data.path.values.cols() == static_cast<Eigen::Index>(data.path.names.size()));
    for (const auto& b : data.batches) {
      CHECK(b.X.col(0).isOnes());
      CHECK(b.X.col(1).cwiseAbs().maxCoeff() <= 1.0);
      CHECK(b.Z.col(1).cwiseAbs().maxCoeff() <= 1.0);
      CHECK((b.y.array() >= 0.0).all());
      CHECK((b.y.array() == b.y.array().round()).all());
    }
    // days are nondecreasing and fall inside their interval
    for (std::size_t j = 0; j < data.days.size(); ++j) {
      for (int d : data.days[j]) {
        CHECK(d >= static_cast<int>(j) * spec.interval_days);
        CHECK(d < static_cast<int>(j + 1) * spec.interval_days);
      }
    }
  }
}

TEST_CASE("M1 path is constant and the dynamic paths move") {
  DgpSpec spec;
  spec.seed = 9;
  const auto m1 = simulate(spec);
  for (int j = 1; j < 12; ++j) CHECK(m1.path.values.row(j) == m1.path.values.row(0));
  CHECK(m1.path.values(0, 1) == spec.phi[1]);
  spec.model = DgpModel::kM2;
  const auto m2 = simulate(spec);
  CHECK(m2.path.values.row(11) != m2.path.values.row(0));
}

TEST_CASE("simulation is deterministic and pairs share the latent path") {
  DgpSpec spec;
  spec.model = DgpModel::kM3;
  spec.seed = 21;
  const auto a = simulate_pair(spec);
  const auto b = simulate_pair(spec);
  CHECK(a.training.batches[5].y == b.training.batches[5].y);
  CHECK(a.validation.batches[5].X == b.validation.batches[5].X);
  CHECK(a.training.path.values == a.validation.path.values);
  CHECK(a.training.batches[0].X != a.validation.batches[0].X);
  spec.seed = 22;
  CHECK(simulate_pair(spec).training.path.values != a.training.path.values);
}

TEST_CASE("pair seeds are distinct across dgps and pairs") {
  std::vector<std::uint64_t> seeds;
  for (DgpModel m : {DgpModel::kM1, DgpModel::kM2, DgpModel::kM3})
    for (int p = 0; p < 50; ++p) seeds.push_back(pair_seed(1, m, p));
  std::sort(seeds.begin(), seeds.end());
  CHECK(std::adjacent_find(seeds.begin(), seeds.end()) == seeds.end());
}

TEST_CASE("simulation model layout") {
  const auto spec = simulation_model(2);
  CHECK(spec.K == 2);
  CHECK(spec.dim() == 6);
  DgpSpec bad;
  bad.intervals = 0;
  CHECK_THROWS_AS(simulate(bad), InvalidInput);
}
