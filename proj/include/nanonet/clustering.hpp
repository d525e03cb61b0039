#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "nanonet/topology.hpp"

namespace nanonet {

struct Cluster {
  int id = 0;
  int layer = 0;
  NodeId ncc = 0;
  std::vector<NodeId> members;  // rotation order: founding head first, then join order
  int formed_at = 0;
  // Packet ids held by the current head; handed to the next head on rotation.
  std::vector<std::uint64_t> info_list;

  bool operator==(const Cluster &) const = default;
};

class OrphanNode : public std::runtime_error {
 public:
  OrphanNode(NodeId id, int layer);
  NodeId node() const { return node_; }

 private:
  NodeId node_;
};

/// Normalised residual energy E_residual / E_max. Throws std::domain_error for
/// e_max <= 0.
double weight(const NodeState &node, double e_max);

struct ElectionOptions {
  double advert_range = 0.0;  // neighbours within this distance compete and join
  double e_max = 0.0;
  int max_rounds = 0;         // 0: repeat rounds until every node is clustered
};

/// Head election and membership. Per layer, each unclustered node whose
/// weight beats every unclustered neighbour within the advertisement range
/// (ties to the lower id) becomes a head; unclustered nodes in range of a
/// head join the nearest one. Rounds repeat over the leftovers until all are
/// clustered or max_rounds is reached, in which case OrphanNode is thrown.
std::vector<Cluster> elect_nccs(const Deployment &dep, const ElectionOptions &opt);

/// Advances the head to the next member in rotation order, wrapping.
Cluster rotate_ncc(Cluster cluster);

/// Writes roles and cluster ids from `clusters` into the deployment.
void apply_clusters(Deployment &dep, const std::vector<Cluster> &clusters);

/// Empty when every sensor is in exactly one cluster, each head is a member
/// and each cluster is single-layer; otherwise a description of the first
/// violation.
std::string check_partition(const Deployment &dep, const std::vector<Cluster> &clusters);

/// cluster_id,layer,ncc_id,member_ids (members ';'-separated, layer 1-based).
std::string clusters_csv(const std::vector<Cluster> &clusters);

}  // namespace nanonet
