#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nanonet/clustering.hpp"

namespace nanonet {

/// Per-ADTN transmission request as forwarded to the NC.
struct TransmissionRequest {
  NodeId ncm_id = 0;
  NodeId nc_id = kNcId;
  double d_k = 0.0;  // m, distance to the NC
  int layer = 0;     // 0-based
  double residual = 0.0;
  std::int64_t amount = 0;  // bits, D_Amnt
  int priority = 1;
  int cluster = 0;
  std::optional<NodeId> relay;  // set when the ADTN reaches its head through a relay
};

using Ticks = std::int64_t;  // slot quanta

struct LayerSlot {
  int layer = 0;  // 0-based
  Ticks start = 0;
  Ticks duration = 0;
};

struct ClusterSlot {
  int cluster = 0;
  int layer = 0;
  Ticks start = 0;
  Ticks duration = 0;
};

struct AdtnSlot {
  NodeId node = 0;
  int cluster = 0;
  Ticks start = 0;
  Ticks duration = 0;
  std::optional<NodeId> relay;
  Ticks first_hop = 0;  // ADTN->relay share when relayed, else == duration
};

/// Window in which a cluster head forwards its aggregate towards the NC,
/// split equally across `hops`.
struct ForwardSlot {
  int cluster = 0;
  int layer = 0;
  Ticks start = 0;
  Ticks duration = 0;
  int hops = 1;
};

struct Timeline {
  double quantum_s = 1e-12;
  Ticks cycle = 0;  // T in quanta
  std::vector<LayerSlot> layer_slots;  // in transmission order
  std::map<int, std::vector<ClusterSlot>> cluster_slots;  // by layer
  std::map<int, std::vector<AdtnSlot>> adtn_slots;        // by cluster
  std::map<int, ForwardSlot> forward_slots;               // by cluster
  std::map<int, double> alpha;                            // by layer (0-based)
  std::map<int, Ticks> propagation;                       // guard per layer
  bool empty = true;
};

/// Layer ordering weight {L (t + Gamma) / T * sum M} * P, with L the 1-based
/// layer number. Used only to order layers. Throws std::domain_error for T <= 0.
double layer_weight(int presented_layer, std::span<const TransmissionRequest> requests,
                    double t_per_bit, double cycle_time, double gamma_prop, double priority);

struct ScheduleParams {
  double quantum_s = 1e-12;
  double t_per_bit_s = 10e-12;
  double propagation_speed_mps = 299792458.0;
};

ScheduleParams schedule_params(const ValidatedConfig &cfg);

/// Splits `total` quanta in proportion to `weights` by largest remainder;
/// ties go to the lower index. The parts always sum to `total`.
std::vector<Ticks> proportional_split(Ticks total, std::span<const std::int64_t> weights);

/// Nested layer -> cluster -> ADTN timeline for one cycle. Layers with no data
/// get no slot. Each layer slot holds its cluster slots, then one forwarding
/// slot per active cluster, then the propagation guard.
Timeline build_timeline(std::span<const TransmissionRequest> requests,
                        std::span<const Cluster> clusters, const ScheduleParams &params);

/// Empty when non-overlap, containment, conservation and ordering hold.
std::string check_timeline(const Timeline &tl);

/// level,owner_id,start_ps,duration_ps
std::string timeline_csv(const Timeline &tl);

}  // namespace nanonet
