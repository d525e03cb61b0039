#include "nanonet/topology.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "nanonet/energy.hpp"

namespace nanonet {

const NodeState &Deployment::node(NodeId id) const {
  if (id == kNcId) return nc;
  return nodes.at(static_cast<std::size_t>(id - 1));
}

NodeState &Deployment::node(NodeId id) {
  if (id == kNcId) return nc;
  return nodes.at(static_cast<std::size_t>(id - 1));
}

namespace {

Position sample_position(std::mt19937_64 &rng, VolumeShape shape, double radius) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  if (shape == VolumeShape::Cube) {
    // Cube inscribed in the sphere so every corner stays within the radius.
    const double half = radius / std::sqrt(3.0);
    return {half * unit(rng), half * unit(rng), half * unit(rng)};
  }
  for (;;) {
    const double x = unit(rng), y = unit(rng), z = unit(rng);
    if (x * x + y * y + z * z < 1.0) return {radius * x, radius * y, radius * z};
  }
}

}  // namespace

Deployment deploy(const ValidatedConfig &vc) {
  const SimConfig &cfg = vc.get();
  Deployment dep;
  dep.rng_seed = cfg.seed;
  dep.nc.id = kNcId;
  dep.nc.role = Role::NC;
  dep.nc.mode = Mode::Idle;

  const double e_max = e_nps_max(cfg.energy);
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> energy_frac(cfg.initial_energy_min_fraction, 1.0);

  dep.nodes.reserve(static_cast<std::size_t>(cfg.node_count));
  for (int i = 0; i < cfg.node_count; ++i) {
    NodeState n;
    n.id = i + 1;
    n.pos = sample_position(rng, cfg.volume_shape, cfg.deployment_radius_m);
    n.role = Role::NCM;
    n.residual_energy = e_max * energy_frac(rng);
    n.energy_state = energy_state_of(n.residual_energy, cfg.energy);
    n.mode = Mode::Harvesting;
    dep.nodes.push_back(n);
  }
  return assign_layers(std::move(dep), cfg.tx_range_m);
}

int layer_of(double d, double tx_range) {
  if (!(tx_range > 0.0)) throw std::domain_error("layer_of: tx_range must be > 0");
  // Largest m with m * r / 2 <= d, evaluated the way boundaries are written,
  // so a node exactly on a boundary lands in the outer layer.
  int m = static_cast<int>(std::floor(2.0 * d / tx_range));
  if (m < 0) m = 0;
  while (m > 0 && (m * tx_range) / 2.0 > d) --m;
  while (((m + 1) * tx_range) / 2.0 <= d) ++m;
  return m;
}

Deployment assign_layers(Deployment dep, double tx_range) {
  for (auto &n : dep.nodes) n.layer = layer_of(distance(n.pos, dep.nc.pos), tx_range);
  return dep;
}

std::string coordinates_csv(const Deployment &dep) {
  std::ostringstream out;
  out << "id,x,y,z,layer\n";
  for (const auto &n : dep.nodes) {
    out << n.id << ',' << format_double(n.pos.x) << ',' << format_double(n.pos.y) << ','
        << format_double(n.pos.z) << ',' << n.layer + 1 << '\n';
  }
  return out.str();
}

}  // namespace nanonet
