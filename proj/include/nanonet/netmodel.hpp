#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace nanonet {

// ---------------------------------------------------------------------------
// Geometry and node state
// ---------------------------------------------------------------------------

struct Position {
  double x = 0.0;  // m
  double y = 0.0;  // m
  double z = 0.0;  // m

  bool operator==(const Position &) const = default;
};

double distance(const Position &a, const Position &b);

enum class Role { NC, NCC, NCM };
enum class Mode { Harvesting, Transmitting, Idle };

const char *to_string(Role r);
const char *to_string(Mode m);

using NodeId = int;
inline constexpr NodeId kNcId = 0;

struct NodeState {
  NodeId id = 0;
  Position pos;
  Role role = Role::NCM;
  int layer = 0;                 // 0-based; presentation adds 1
  std::optional<int> cluster;    // set for NCC and NCM after clustering
  double residual_energy = 0.0;  // J
  int energy_state = 0;          // u, with E_u = E_min + u * E_tx
  Mode mode = Mode::Harvesting;
};

// ---------------------------------------------------------------------------
// Parameter blocks
// ---------------------------------------------------------------------------

struct ChannelParams {
  double frequency_hz = 1e12;
  double absorption_per_m = 0.0;      // K(f)
  double path_loss_exponent = 3.0;    // eta
  double shadowing_sigma_db = 1.0;    // sigma of xi
  double gain = 1e-9;                 // G
  double noise_power_w = 1e-10;       // N_j
  double sinr_threshold_db = 12.0;    // gamma_th
  double speed_of_light_mps = 299792458.0;

  bool operator==(const ChannelParams &) const = default;
};

struct EnergyParams {
  double c_nps_f = 9e-9;        // capacitance of the nano power source
  double v_g_v = 0.42;          // generator voltage
  double delta_q_c = 6e-12;     // harvested charge per cycle
  double tau_s = 1.0 / 50.0;    // cycle length (time between vibrations)
  double e_min_j = 0.0;         // energy at state S_0
  double e_tx_j = 100e-12;      // energy per packet used by the Markov chain

  bool operator==(const EnergyParams &) const = default;
};

enum class VolumeShape { Sphere, Cube };

const char *to_string(VolumeShape s);

struct SimConfig {
  // deployment
  int node_count = 100;
  double tx_range_m = 10e-3;
  double deployment_radius_m = 10e-3;
  VolumeShape volume_shape = VolumeShape::Sphere;
  int layer_count = 0;  // derived: ceil(2 R / r)
  double initial_energy_min_fraction = 0.5;

  // clustering
  double advert_range_m = 0.0;  // 0 selects tx_range_m / 2
  int max_election_rounds = 0;  // 0 runs rounds until every node is clustered

  // traffic and timing
  double pulse_energy_j = 100e-12;
  double pulse_duration_s = 100e-15;
  double pulse_interval_s = 10e-12;
  int packet_bits = 256;
  double message_interval_s = 0.1;
  double simulation_duration_s = 3.0;
  int initial_ttl = 1000;
  double adtn_probability = 0.5;
  double slot_quantum_s = 1e-12;
  double propagation_speed_mps = 299792458.0;
  std::map<std::string, int> priority_table{{"default", 1}};

  // link model
  ChannelParams channel;
  double bandwidth_hz = 1e12;
  double fade_margin_db = 3.0;
  double electronics_energy_j_per_bit = 6e-17;
  double tx_power_w = 0.0;  // 0 selects the power that just closes a link at tx range
  int coop_links = 1;
  int fusion_layers = 1;    // n in the DaF threshold
  double fusion_rate_bps = 1e12;

  // energy model
  EnergyParams energy;
  double theta_per_j = 1e15;

  // reproducibility
  std::uint64_t seed = 1;
  int trials = 1000000;
  double analytic_tolerance = 1e-6;

  bool operator==(const SimConfig &) const = default;
};

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

struct Violation {
  std::string field;
  std::string message;
};

class InvalidConfig : public std::invalid_argument {
 public:
  explicit InvalidConfig(Violation v);
  const std::string &field() const { return violation_.field; }
  const Violation &violation() const { return violation_; }

 private:
  Violation violation_;
};

/// Every violated invariant, in declaration order. Empty means valid.
std::vector<Violation> check_config(const SimConfig &cfg);

/// Immutable, validated configuration with derived fields filled in.
class ValidatedConfig {
 public:
  const SimConfig &get() const { return cfg_; }
  const SimConfig *operator->() const { return &cfg_; }

  /// Range at which NCC advertisements are heard.
  double advert_range() const;
  /// Transmit power used for capacity estimates.
  double tx_power() const;
  /// Full cycles fitting in the simulated duration.
  int cycle_count() const;

 private:
  friend ValidatedConfig validate_config(const SimConfig &cfg);
  explicit ValidatedConfig(SimConfig cfg) : cfg_(std::move(cfg)) {}
  SimConfig cfg_;
};

/// Fills derived fields and checks invariants. Throws InvalidConfig naming
/// the first violated field.
ValidatedConfig validate_config(const SimConfig &cfg);

int derived_layer_count(double deployment_radius_m, double tx_range_m);

// ---------------------------------------------------------------------------
// Key/value config files
// ---------------------------------------------------------------------------

class ConfigParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ConfigKey {
  const char *name;
  const char *unit;
  const char *description;
};

/// All recognised keys, in the order they are written.
const std::vector<ConfigKey> &config_keys();

SimConfig parse_config(const std::string &text);
SimConfig load_config(const std::string &path);
std::string serialize_config(const SimConfig &cfg);

/// Shortest decimal that round-trips through strtod.
std::string format_double(double v);

/// 64-bit FNV-1a, used to fingerprint configs in run manifests.
std::uint64_t fnv1a64(const std::string &s);

}  // namespace nanonet
