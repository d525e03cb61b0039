#pragma once

#include <random>
#include <vector>

#include "nanonet/topology.hpp"

namespace testing_support {

using namespace nanonet;

inline NodeState node_at(NodeId id, double x, double y, double z, double energy, int layer = 0) {
  NodeState n;
  n.id = id;
  n.pos = {x, y, z};
  n.residual_energy = energy;
  n.layer = layer;
  return n;
}

// Nodes must be given in id order starting at 1.
inline Deployment manual_deployment(std::vector<NodeState> nodes) {
  Deployment d;
  d.nc.id = kNcId;
  d.nc.role = Role::NC;
  d.nodes = std::move(nodes);
  return d;
}

inline ValidatedConfig config_with(std::uint64_t seed, int nodes = 100) {
  SimConfig c;
  c.seed = seed;
  c.node_count = nodes;
  c.layer_count = 0;
  return validate_config(c);
}

}  // namespace testing_support
