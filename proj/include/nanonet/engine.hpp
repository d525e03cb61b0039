#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "nanonet/channel.hpp"
#include "nanonet/clustering.hpp"
#include "nanonet/scheduler.hpp"

namespace nanonet {

// ---------------------------------------------------------------------------
// Per-bit link energy
// ---------------------------------------------------------------------------

/// Minimum radiated energy per bit for the unshadowed SINR to reach the
/// threshold: gamma_th N d^eta e^{Kd} (4 pi f d / c)^2 / G, times the time a
/// bit occupies the channel. Throws std::domain_error for d <= 0.
double energy_per_bit(double d, const ChannelParams &ch, double bit_time_s);

/// Energy a hop costs per bit: circuit energy plus the radiated energy with
/// the fade margin applied. This is E(d) in the relay rule.
struct LinkEnergyModel {
  ChannelParams channel;
  double bit_time_s = 100e-15;
  double fade_margin_db = 3.0;
  double electronics_j_per_bit = 6e-17;

  double radiated(double d) const;
  double link(double d) const;
  /// Transmit power implied by radiated(d).
  double tx_power(double d) const;
};

LinkEnergyModel link_energy_model(const ValidatedConfig &cfg);

struct IntraPath {
  std::optional<NodeId> relay;
  double energy_per_bit = 0.0;  // along the chosen path
};

/// Direct unless some candidate j gives E(d_ij) + E(d_jz) <= E(d_iz); then the
/// candidate with the smallest sum (ties to the lower id).
IntraPath choose_intra_path(const NodeState &adtn, const NodeState &ncc,
                            std::span<const NodeState> candidates, const LinkEnergyModel &m);

/// Distance above which a midpoint relay beats the direct hop. 0 when the
/// relay wins at every distance.
double relay_crossover_distance(const LinkEnergyModel &m);

// ---------------------------------------------------------------------------
// Cycle execution
// ---------------------------------------------------------------------------

enum class EventKind { WakeUp, TxIntra, TxRelay, TxInter, Fuse, Rotate, Harvest, DeadNode };

const char *to_string(EventKind k);

struct Event {
  Ticks time = 0;
  NodeId node = 0;
  EventKind kind = EventKind::WakeUp;
  std::string detail;
  double energy = 0.0;  // J spent (Tx kinds) or gained (Harvest)
  NodeId peer = -1;     // receiver of a Tx event
  Ticks slot_start = 0;
  Ticks slot_end = 0;

  bool operator==(const Event &) const = default;
};

struct CycleTrace {
  int cycle = 0;
  Timeline timeline;
  std::vector<Event> events;  // time-ordered
  std::vector<double> residual_start;  // indexed by node id, NC at 0
  std::vector<double> residual_end;
  std::vector<double> per_node_energy_spent;
  std::vector<double> harvested;
  std::int64_t delivered_bits = 0;
  std::int64_t generated_bits = 0;
  int outage_events = 0;
  int dead_node_events = 0;
  int fusion_links = 0;        // end links assessed at fusion nodes
  int fused_deliveries = 0;    // aggregates that survived their end links
  int fused_attempts = 0;
  std::vector<int> active_clusters;
  std::vector<NodeId> heads_before;  // head per cluster id at cycle start
};

/// Everything the event loop mutates between cycles.
struct WorldState {
  explicit WorldState(const ValidatedConfig &cfg);

  ValidatedConfig cfg;
  Deployment dep;
  std::vector<Cluster> clusters;
  LinkEnergyModel model;
  std::mt19937_64 rng;
  int cycle = 0;
  std::uint64_t next_packet_id = 1;
  std::vector<TransmissionRequest> pending;
};

/// Draws this cycle's ADTNs (each NCM with adtn_probability, packet_bits each)
/// and their intra-cluster paths. Stores and returns the requests.
std::vector<TransmissionRequest> generate_requests(WorldState &state);

/// Executes one transmission cycle over `timeline` (built from state.pending):
/// wake-up per layer, intra-cluster phase, decode-and-forward towards layer 1
/// with fusion of parallel end links, head rotation, then harvesting.
CycleTrace run_cycle(WorldState &state, const Timeline &timeline);

/// generate_requests + build_timeline + run_cycle.
CycleTrace step(WorldState &state);

/// Replays a trace's energy ledger: empty when every node's end residual
/// equals start - spent + harvested exactly.
std::string check_energy_conservation(const CycleTrace &trace);

/// time_ps,node,event,detail
std::string events_csv(const CycleTrace &trace);

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

struct MetricsRow {
  std::size_t index = 0;
  std::string axis;
  double value = 0.0;
  double distance_m = 0.0;
  double energy_single_j_per_bit = 0.0;
  double energy_multi_j_per_bit = 0.0;
  double p_es = 0.0;
  double p_es_rate = 0.0;
  double capacity_single_bps = 0.0;
  double capacity_multi_bps = 0.0;
  double outage_capacity_bps = 0.0;
  double outage_probability = 0.0;
  double absorption_per_m = 0.0;

  bool operator==(const MetricsRow &) const = default;
};

using MetricsTable = std::vector<MetricsRow>;

class UnknownAxis : public std::invalid_argument {
 public:
  explicit UnknownAxis(const std::string &axis);
};

/// Axes accepted by sweep().
const std::vector<std::string> &sweep_axes();

struct SweepOptions {
  double reference_distance_m = 5e-3;  // used when the axis is not distance
  double p_out = 0.1;                  // outage level for the outage capacity column
  int k_links = 1;
};

/// One row for a single axis value; pure.
MetricsRow sweep_point(const ValidatedConfig &cfg, const std::string &axis, double value,
                       const SweepOptions &opt);

/// OpenMP over sweep points; rows are placed by index so output is identical
/// to sweep_serial().
MetricsTable sweep(const ValidatedConfig &cfg, const std::string &axis,
                   std::span<const double> values, const SweepOptions &opt = {});
MetricsTable sweep_serial(const ValidatedConfig &cfg, const std::string &axis,
                          std::span<const double> values, const SweepOptions &opt = {});

/// First sweep distance where the multihop energy drops below single hop, if any.
std::optional<double> reported_crossover(const MetricsTable &table);

std::string metrics_csv(const MetricsTable &table);

}  // namespace nanonet
