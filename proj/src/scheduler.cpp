#include "nanonet/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

namespace nanonet {

double layer_weight(int presented_layer, std::span<const TransmissionRequest> requests,
                    double t_per_bit, double cycle_time, double gamma_prop, double priority) {
  if (!(cycle_time > 0.0)) throw std::domain_error("layer_weight: cycle time must be > 0");
  double bits = 0.0;
  for (const auto &r : requests) bits += static_cast<double>(r.amount);
  return presented_layer * (t_per_bit + gamma_prop) / cycle_time * bits * priority;
}

ScheduleParams schedule_params(const ValidatedConfig &cfg) {
  return {cfg->slot_quantum_s, cfg->pulse_interval_s, cfg->propagation_speed_mps};
}

std::vector<Ticks> proportional_split(Ticks total, std::span<const std::int64_t> weights) {
  std::vector<Ticks> out(weights.size(), 0);
  __int128 sum = 0;
  for (auto w : weights) {
    if (w < 0) throw std::invalid_argument("proportional_split: negative weight");
    sum += w;
  }
  if (weights.empty() || sum == 0) return out;
  std::vector<__int128> rem(weights.size());
  Ticks assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const __int128 num = static_cast<__int128>(total) * weights[i];
    out[i] = static_cast<Ticks>(num / sum);
    rem[i] = num % sum;
    assigned += out[i];
  }
  std::vector<std::size_t> order(weights.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return rem[a] > rem[b]; });
  for (std::size_t k = 0; assigned < total; ++k, ++assigned) ++out[order[k % order.size()]];
  return out;
}

namespace {

struct ClusterDemand {
  int cluster = 0;
  std::int64_t bits = 0;
  std::vector<const TransmissionRequest *> requests;
};

struct LayerDemand {
  int layer = 0;
  std::int64_t bits = 0;
  double max_distance = 0.0;
  int priority = 1;
  std::vector<ClusterDemand> clusters;
  std::vector<TransmissionRequest> requests;
};

}  // namespace

Timeline build_timeline(std::span<const TransmissionRequest> requests,
                        std::span<const Cluster> clusters, const ScheduleParams &params) {
  Timeline tl;
  tl.quantum_s = params.quantum_s;

  std::map<int, const Cluster *> cluster_by_id;
  for (const auto &c : clusters) cluster_by_id[c.id] = &c;

  std::map<int, LayerDemand> layers;
  for (const auto &r : requests) {
    if (r.amount < 0) throw std::invalid_argument("build_timeline: negative amount");
    if (r.amount == 0) continue;
    auto it = cluster_by_id.find(r.cluster);
    if (it == cluster_by_id.end()) {
      throw std::invalid_argument("build_timeline: request for unknown cluster " +
                                  std::to_string(r.cluster));
    }
    if (it->second->layer != r.layer) {
      throw std::invalid_argument("build_timeline: request layer does not match its cluster");
    }
    LayerDemand &ld = layers[r.layer];
    ld.layer = r.layer;
    ld.bits += r.amount;
    ld.max_distance = std::max(ld.max_distance, r.d_k);
    ld.priority = ld.requests.empty() ? r.priority : std::max(ld.priority, r.priority);
    ld.requests.push_back(r);
  }
  if (layers.empty()) return tl;
  tl.empty = false;

  const Ticks per_bit =
      std::max<Ticks>(1, static_cast<Ticks>(std::llround(params.t_per_bit_s / params.quantum_s)));

  // Group by cluster. Clusters go in descending data order, ADTNs by id.
  for (auto &[layer, ld] : layers) {
    std::map<int, ClusterDemand> by_cluster;
    for (const auto &r : ld.requests) {
      auto &cd = by_cluster[r.cluster];
      cd.cluster = r.cluster;
      cd.bits += r.amount;
      cd.requests.push_back(&r);
    }
    for (auto &[id, cd] : by_cluster) {
      std::sort(cd.requests.begin(), cd.requests.end(),
                [](const auto *a, const auto *b) { return a->ncm_id < b->ncm_id; });
      ld.clusters.push_back(std::move(cd));
    }
    std::stable_sort(ld.clusters.begin(), ld.clusters.end(),
                     [](const ClusterDemand &a, const ClusterDemand &b) { return a.bits > b.bits; });
  }

  // Phase 1: layer lengths and the cycle time.
  struct Sizing {
    Ticks data = 0, forward = 0, guard = 0;
    Ticks total() const { return data + forward + guard; }
  };
  std::map<int, Sizing> sizing;
  for (const auto &[layer, ld] : layers) {
    Sizing s;
    s.data = ld.bits * per_bit;
    s.forward = ld.bits * per_bit * (layer + 1);
    s.guard = static_cast<Ticks>(
        std::ceil(ld.max_distance / params.propagation_speed_mps / params.quantum_s));
    sizing[layer] = s;
    tl.propagation[layer] = s.guard;
    tl.cycle += s.total();
  }
  const double cycle_s = static_cast<double>(tl.cycle) * params.quantum_s;
  for (const auto &[layer, ld] : layers) {
    const double gamma_s = static_cast<double>(sizing[layer].guard) * params.quantum_s;
    tl.alpha[layer] = layer_weight(layer + 1, ld.requests, params.t_per_bit_s, cycle_s, gamma_s,
                                   ld.priority);
  }
  std::vector<int> order;
  for (const auto &[layer, ld] : layers) order.push_back(layer);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return tl.alpha[a] > tl.alpha[b]; });

  Ticks cursor = 0;
  for (int layer : order) {
    const LayerDemand &ld = layers[layer];
    const Sizing &s = sizing[layer];
    tl.layer_slots.push_back({layer, cursor, s.total()});

    // Phase 2: clusters share the data part in proportion to their bits.
    std::vector<std::int64_t> cluster_bits;
    for (const auto &cd : ld.clusters) cluster_bits.push_back(cd.bits);
    const auto cluster_ticks = proportional_split(s.data, cluster_bits);
    const auto forward_ticks = proportional_split(s.forward, cluster_bits);

    Ticks c_cursor = cursor;
    auto &cslots = tl.cluster_slots[layer];
    for (std::size_t ci = 0; ci < ld.clusters.size(); ++ci) {
      const ClusterDemand &cd = ld.clusters[ci];
      cslots.push_back({cd.cluster, layer, c_cursor, cluster_ticks[ci]});

      // Phase 3: ADTNs share the cluster slot in proportion to D_Amnt.
      std::vector<std::int64_t> amounts;
      for (const auto *r : cd.requests) amounts.push_back(r->amount);
      const auto adtn_ticks = proportional_split(cluster_ticks[ci], amounts);
      Ticks a_cursor = c_cursor;
      auto &aslots = tl.adtn_slots[cd.cluster];
      for (std::size_t ai = 0; ai < cd.requests.size(); ++ai) {
        AdtnSlot a;
        a.node = cd.requests[ai]->ncm_id;
        a.cluster = cd.cluster;
        a.start = a_cursor;
        a.duration = adtn_ticks[ai];
        a.relay = cd.requests[ai]->relay;
        a.first_hop = a.relay ? (a.duration + 1) / 2 : a.duration;
        aslots.push_back(a);
        a_cursor += a.duration;
      }
      c_cursor += cluster_ticks[ci];
    }
    for (std::size_t ci = 0; ci < ld.clusters.size(); ++ci) {
      const ClusterDemand &cd = ld.clusters[ci];
      tl.forward_slots[cd.cluster] = {cd.cluster, layer, c_cursor, forward_ticks[ci], layer + 1};
      c_cursor += forward_ticks[ci];
    }
    cursor += s.total();
  }
  return tl;
}

namespace {

struct Interval {
  Ticks start, end;
  std::string what;
};

std::string check_siblings(std::vector<Interval> v, Ticks lo, Ticks hi, const std::string &parent) {
  std::sort(v.begin(), v.end(), [](const Interval &a, const Interval &b) { return a.start < b.start; });
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i].start < lo || v[i].end > hi || v[i].end < v[i].start) {
      return v[i].what + " escapes " + parent;
    }
    if (i > 0 && v[i].start < v[i - 1].end) return v[i].what + " overlaps " + v[i - 1].what;
  }
  return {};
}

}  // namespace

std::string check_timeline(const Timeline &tl) {
  std::vector<Interval> layers;
  Ticks total = 0;
  std::set<int> scheduled;
  for (std::size_t i = 0; i < tl.layer_slots.size(); ++i) {
    const auto &ls = tl.layer_slots[i];
    layers.push_back({ls.start, ls.start + ls.duration, "layer " + std::to_string(ls.layer + 1)});
    total += ls.duration;
    scheduled.insert(ls.layer);
    if (i > 0 && tl.alpha.at(tl.layer_slots[i - 1].layer) < tl.alpha.at(ls.layer)) {
      return "layer order is not by descending alpha";
    }
  }
  if (total > tl.cycle) return "layer slots exceed the cycle time";
  if (auto e = check_siblings(layers, 0, tl.cycle, "cycle"); !e.empty()) return e;

  for (const auto &ls : tl.layer_slots) {
    std::vector<Interval> kids;
    auto cs = tl.cluster_slots.find(ls.layer);
    if (cs == tl.cluster_slots.end() || cs->second.empty()) {
      return "layer " + std::to_string(ls.layer + 1) + " has a slot but no clusters";
    }
    for (const auto &c : cs->second) {
      kids.push_back({c.start, c.start + c.duration, "cluster " + std::to_string(c.cluster)});
      auto fs = tl.forward_slots.find(c.cluster);
      if (fs != tl.forward_slots.end()) {
        kids.push_back({fs->second.start, fs->second.start + fs->second.duration,
                        "forward " + std::to_string(c.cluster)});
      }
      auto as = tl.adtn_slots.find(c.cluster);
      if (as == tl.adtn_slots.end()) return "cluster " + std::to_string(c.cluster) + " has no ADTNs";
      std::vector<Interval> adtns;
      Ticks sum = 0;
      for (const auto &a : as->second) {
        adtns.push_back({a.start, a.start + a.duration, "adtn " + std::to_string(a.node)});
        sum += a.duration;
        if (a.first_hop < 0 || a.first_hop > a.duration) return "bad relay split";
      }
      if (sum != c.duration) return "cluster " + std::to_string(c.cluster) + " is not conserved";
      if (auto e = check_siblings(adtns, c.start, c.start + c.duration,
                                  "cluster " + std::to_string(c.cluster));
          !e.empty()) {
        return e;
      }
    }
    if (auto e = check_siblings(kids, ls.start, ls.start + ls.duration,
                                "layer " + std::to_string(ls.layer + 1));
        !e.empty()) {
      return e;
    }
  }
  for (const auto &[layer, cs] : tl.cluster_slots) {
    if (!scheduled.count(layer)) return "clusters scheduled in an unscheduled layer";
  }
  return {};
}

std::string timeline_csv(const Timeline &tl) {
  const double ps = tl.quantum_s / 1e-12;
  auto emit = [&](std::ostringstream &out, const char *level, long owner, Ticks start, Ticks dur) {
    out << level << ',' << owner << ',' << format_double(static_cast<double>(start) * ps) << ','
        << format_double(static_cast<double>(dur) * ps) << '\n';
  };
  std::ostringstream out;
  out << "level,owner_id,start_ps,duration_ps\n";
  for (const auto &ls : tl.layer_slots) {
    emit(out, "layer", ls.layer + 1, ls.start, ls.duration);
    for (const auto &c : tl.cluster_slots.at(ls.layer)) {
      emit(out, "cluster", c.cluster, c.start, c.duration);
      for (const auto &a : tl.adtn_slots.at(c.cluster)) emit(out, "adtn", a.node, a.start, a.duration);
    }
    for (const auto &c : tl.cluster_slots.at(ls.layer)) {
      const auto &f = tl.forward_slots.at(c.cluster);
      emit(out, "forward", f.cluster, f.start, f.duration);
    }
  }
  return out.str();
}

}  // namespace nanonet
