#include <doctest.h>

#include <cmath>
#include <random>

#include "nanonet/energy.hpp"
#include "support.hpp"

using namespace nanonet;
using testing_support::config_with;

TEST_CASE("layer_of examples") {
  CHECK(layer_of(4e-3, 10e-3) == 0);
  CHECK(layer_of(5e-3, 10e-3) == 1);
  CHECK(layer_of(12e-3, 10e-3) == 2);
  CHECK(layer_of(0.0, 10e-3) == 0);
}

TEST_CASE("a node exactly on a boundary lands in the outer layer") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> r(1e-4, 5e-2);
  for (int trial = 0; trial < 2000; ++trial) {
    const double range = r(rng);
    for (int m = 0; m < 60; ++m) {
      const double d = m * range / 2.0;
      CHECK(layer_of(d, range) == m);
    }
  }
}

TEST_CASE("layers are monotone in distance and half a range wide") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 0.05);
  for (int i = 0; i < 20000; ++i) {
    double a = u(rng), b = u(rng);
    if (a > b) std::swap(a, b);
    CHECK(layer_of(a, 10e-3) <= layer_of(b, 10e-3));
    const int l = layer_of(a, 10e-3);
    CHECK(l * 5e-3 <= a * (1 + 1e-12));
    CHECK(a < (l + 1) * 5e-3);
  }
}

TEST_CASE("deployment respects count, volume and layer rule") {
  const auto cfg = config_with(42);
  const Deployment d = deploy(cfg);
  REQUIRE(d.nodes.size() == 100);
  const double emax = e_nps_max(cfg->energy);
  for (std::size_t i = 0; i < d.nodes.size(); ++i) {
    const auto &n = d.nodes[i];
    CHECK(n.id == static_cast<NodeId>(i + 1));
    CHECK(std::isfinite(n.pos.x));
    const double dk = distance(n.pos, d.nc.pos);
    CHECK(dk <= 10e-3);
    CHECK(n.layer == layer_of(dk, 10e-3));
    CHECK(n.residual_energy >= 0.5 * emax * (1 - 1e-12));
    CHECK(n.residual_energy <= emax);
    const double eu = cfg->energy.e_min_j + n.energy_state * cfg->energy.e_tx_j;
    CHECK(eu <= n.residual_energy * (1 + 1e-12));
    CHECK(eu <= emax);
    CHECK(n.role != Role::NC);
  }
  CHECK(d.nc.role == Role::NC);
  CHECK(!d.nc.cluster.has_value());
}

TEST_CASE("deployment is reproducible under a seed") {
  const Deployment a = deploy(config_with(9));
  const Deployment b = deploy(config_with(9));
  const Deployment c = deploy(config_with(10));
  CHECK(coordinates_csv(a) == coordinates_csv(b));
  CHECK(coordinates_csv(a) != coordinates_csv(c));
}

TEST_CASE("empty deployment") {
  const Deployment d = deploy(config_with(1, 0));
  CHECK(d.nodes.empty());
  CHECK(coordinates_csv(d) == "id,x,y,z,layer\n");
}

TEST_CASE("cube deployments stay inside the inscribed cube") {
  SimConfig c;
  c.volume_shape = VolumeShape::Cube;
  c.node_count = 500;
  const Deployment d = deploy(validate_config(c));
  const double half = 10e-3 / std::sqrt(3.0);
  for (const auto &n : d.nodes) {
    CHECK(std::abs(n.pos.x) <= half);
    CHECK(std::abs(n.pos.y) <= half);
    CHECK(std::abs(n.pos.z) <= half);
  }
}

TEST_CASE("sphere sampling is uniform in volume") {
  // Fraction inside radius R/2 should be 1/8.
  SimConfig c;
  c.node_count = 40000;
  const Deployment d = deploy(validate_config(c));
  int inner = 0;
  for (const auto &n : d.nodes) inner += distance(n.pos, d.nc.pos) < 5e-3;
  const double p = 0.125, se = std::sqrt(p * (1 - p) / 40000.0);
  CHECK(std::abs(inner / 40000.0 - p) < 4 * se);
}

TEST_CASE("assign_layers recomputes layers for a new range") {
  Deployment d = deploy(config_with(2));
  d = assign_layers(std::move(d), 4e-3);
  for (const auto &n : d.nodes) CHECK(n.layer == layer_of(distance(n.pos, d.nc.pos), 4e-3));
}
