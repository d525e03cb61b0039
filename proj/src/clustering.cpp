#include "nanonet/clustering.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <sstream>

namespace nanonet {

OrphanNode::OrphanNode(NodeId id, int layer)
    : std::runtime_error("node " + std::to_string(id) + " in layer " + std::to_string(layer + 1) +
                         " has no cluster head within range"),
      node_(id) {}

double weight(const NodeState &node, double e_max) {
  if (!(e_max > 0.0)) throw std::domain_error("weight: e_max must be > 0");
  return node.residual_energy / e_max;
}

namespace {

// a outranks b: larger weight, ties to the lower id.
bool outranks(double wa, NodeId a, double wb, NodeId b) {
  return wa > wb || (wa == wb && a < b);
}

}  // namespace

std::vector<Cluster> elect_nccs(const Deployment &dep, const ElectionOptions &opt) {
  std::map<int, std::vector<const NodeState *>> by_layer;
  for (const auto &n : dep.nodes) by_layer[n.layer].push_back(&n);

  std::vector<Cluster> clusters;
  for (auto &[layer, nodes] : by_layer) {
    std::sort(nodes.begin(), nodes.end(),
              [](const NodeState *a, const NodeState *b) { return a->id < b->id; });
    const std::size_t n = nodes.size();
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = weight(*nodes[i], opt.e_max);

    std::vector<int> owner(n, -1);  // index into `clusters`, -1 while unclustered
    std::size_t remaining = n;
    for (int round = 0; remaining > 0; ++round) {
      if (opt.max_rounds > 0 && round >= opt.max_rounds) {
        for (std::size_t i = 0; i < n; ++i) {
          if (owner[i] < 0) throw OrphanNode(nodes[i]->id, layer);
        }
      }
      // Heads: unclustered nodes unbeaten by any unclustered neighbour.
      std::vector<std::size_t> heads;
      for (std::size_t i = 0; i < n; ++i) {
        if (owner[i] >= 0) continue;
        bool best = true;
        for (std::size_t j = 0; j < n && best; ++j) {
          if (j == i || owner[j] >= 0) continue;
          if (distance(nodes[i]->pos, nodes[j]->pos) > opt.advert_range) continue;
          if (outranks(w[j], nodes[j]->id, w[i], nodes[i]->id)) best = false;
        }
        if (best) heads.push_back(i);
      }
      for (std::size_t h : heads) {
        Cluster c;
        c.id = static_cast<int>(clusters.size());
        c.layer = layer;
        c.ncc = nodes[h]->id;
        c.members.push_back(nodes[h]->id);
        c.formed_at = 0;
        owner[h] = c.id;
        clusters.push_back(std::move(c));
        --remaining;
      }
      // Joins: nearest head of this layer within range (any round's heads).
      std::vector<std::pair<std::size_t, int>> joins;
      for (std::size_t i = 0; i < n; ++i) {
        if (owner[i] >= 0) continue;
        double best_d = std::numeric_limits<double>::infinity();
        int best_c = -1;
        for (std::size_t k = 0; k < clusters.size(); ++k) {
          const Cluster &c = clusters[k];
          if (c.layer != layer) continue;
          const double d = distance(nodes[i]->pos, dep.node(c.ncc).pos);
          if (d <= opt.advert_range && (d < best_d || (d == best_d && c.ncc < clusters[best_c].ncc))) {
            best_d = d;
            best_c = static_cast<int>(k);
          }
        }
        if (best_c >= 0) joins.emplace_back(i, best_c);
      }
      for (auto [i, c] : joins) {
        owner[i] = c;
        clusters[c].members.push_back(nodes[i]->id);
        --remaining;
      }
    }
  }
  return clusters;
}

Cluster rotate_ncc(Cluster cluster) {
  if (cluster.members.empty()) return cluster;
  auto it = std::find(cluster.members.begin(), cluster.members.end(), cluster.ncc);
  const std::size_t idx = it == cluster.members.end()
                              ? 0
                              : static_cast<std::size_t>(it - cluster.members.begin());
  cluster.ncc = cluster.members[(idx + 1) % cluster.members.size()];
  // info_list stays with the cluster and is therefore owned by the new head.
  return cluster;
}

void apply_clusters(Deployment &dep, const std::vector<Cluster> &clusters) {
  for (const auto &c : clusters) {
    for (NodeId m : c.members) {
      NodeState &n = dep.node(m);
      n.cluster = c.id;
      n.role = m == c.ncc ? Role::NCC : Role::NCM;
    }
  }
}

std::string check_partition(const Deployment &dep, const std::vector<Cluster> &clusters) {
  std::vector<int> seen(dep.nodes.size() + 1, 0);
  for (const auto &c : clusters) {
    if (std::find(c.members.begin(), c.members.end(), c.ncc) == c.members.end()) {
      return "cluster " + std::to_string(c.id) + ": head is not a member";
    }
    for (NodeId m : c.members) {
      if (m <= 0 || m > static_cast<NodeId>(dep.nodes.size())) {
        return "cluster " + std::to_string(c.id) + ": unknown member " + std::to_string(m);
      }
      if (dep.node(m).layer != c.layer) {
        return "cluster " + std::to_string(c.id) + ": member " + std::to_string(m) +
               " is in another layer";
      }
      ++seen[m];
    }
  }
  for (const auto &n : dep.nodes) {
    if (seen[n.id] != 1) {
      return "node " + std::to_string(n.id) + " belongs to " + std::to_string(seen[n.id]) +
             " clusters";
    }
  }
  return {};
}

std::string clusters_csv(const std::vector<Cluster> &clusters) {
  std::ostringstream out;
  out << "cluster_id,layer,ncc_id,member_ids\n";
  for (const auto &c : clusters) {
    out << c.id << ',' << c.layer + 1 << ',' << c.ncc << ',';
    for (std::size_t i = 0; i < c.members.size(); ++i) {
      if (i) out << ';';
      out << c.members[i];
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace nanonet
