#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nanonet/netmodel.hpp"

namespace nanonet {

/// Stationary node placement around the nanocontroller.
///
/// `nodes` holds the sensors (ids 1..N); the NC sits at the origin and is
/// kept separately so every sensor index maps to `id - 1`.
struct Deployment {
  std::vector<NodeState> nodes;
  NodeState nc;
  std::uint64_t rng_seed = 0;

  const NodeState &node(NodeId id) const;
  NodeState &node(NodeId id);
};

/// Uniform-in-volume positions, deterministic under the config seed. Initial
/// residual energies are drawn in [initial_energy_min_fraction, 1] x E_max.
Deployment deploy(const ValidatedConfig &cfg);

/// Layer index floor(2 d / r) for a node at distance d from the NC.
int layer_of(double d, double tx_range);

/// Registers every sensor into its layer. The NC is left untouched.
Deployment assign_layers(Deployment dep, double tx_range);

/// Coordinate dump: id,x,y,z,layer (layer is 1-based for presentation).
std::string coordinates_csv(const Deployment &dep);

}  // namespace nanonet
