#include "nanonet/netmodel.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "nanonet/units.hpp"

namespace nanonet {

double distance(const Position &a, const Position &b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  const double dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

const char *to_string(Role r) {
  switch (r) {
    case Role::NC: return "NC";
    case Role::NCC: return "NCC";
    case Role::NCM: return "NCM";
  }
  return "?";
}

const char *to_string(Mode m) {
  switch (m) {
    case Mode::Harvesting: return "Harvesting";
    case Mode::Transmitting: return "Transmitting";
    case Mode::Idle: return "Idle";
  }
  return "?";
}

const char *to_string(VolumeShape s) {
  return s == VolumeShape::Sphere ? "sphere" : "cube";
}

InvalidConfig::InvalidConfig(Violation v)
    : std::invalid_argument("invalid config: " + v.field + ": " + v.message),
      violation_(std::move(v)) {}

int derived_layer_count(double deployment_radius_m, double tx_range_m) {
  return static_cast<int>(std::ceil(2.0 * deployment_radius_m / tx_range_m));
}

namespace {

double e_nps_max_of(const EnergyParams &p) {
  return 0.5 * p.c_nps_f * p.v_g_v * p.v_g_v;
}

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

std::vector<Violation> check_config(const SimConfig &c) {
  std::vector<Violation> out;
  auto need = [&](bool ok, const char *field, const char *msg) {
    if (!ok) out.push_back({field, msg});
  };

  need(c.node_count >= 0, "node_count", "must be >= 0");
  need(finite_positive(c.tx_range_m), "tx_range_m", "must be > 0");
  need(finite_positive(c.deployment_radius_m), "deployment_radius_m", "must be > 0");
  if (finite_positive(c.tx_range_m) && finite_positive(c.deployment_radius_m)) {
    need(c.layer_count == derived_layer_count(c.deployment_radius_m, c.tx_range_m),
         "layer_count", "must equal ceil(2 * deployment_radius_m / tx_range_m)");
  }
  need(c.initial_energy_min_fraction >= 0.0 && c.initial_energy_min_fraction <= 1.0,
       "initial_energy_min_fraction", "must lie in [0, 1]");
  need(std::isfinite(c.advert_range_m) && c.advert_range_m >= 0.0, "advert_range_m",
       "must be >= 0");
  need(c.max_election_rounds >= 0, "max_election_rounds", "must be >= 0");

  need(finite_positive(c.pulse_energy_j), "pulse_energy_j", "must be > 0");
  need(finite_positive(c.pulse_duration_s), "pulse_duration_s", "must be > 0");
  need(finite_positive(c.pulse_interval_s), "pulse_interval_s", "must be > 0");
  need(c.packet_bits > 0, "packet_bits", "must be > 0");
  need(finite_positive(c.message_interval_s), "message_interval_s", "must be > 0");
  need(std::isfinite(c.simulation_duration_s) && c.simulation_duration_s >= 0.0,
       "simulation_duration_s", "must be >= 0");
  need(c.initial_ttl > 0, "initial_ttl", "must be > 0");
  need(c.adtn_probability >= 0.0 && c.adtn_probability <= 1.0, "adtn_probability",
       "must lie in [0, 1]");
  need(finite_positive(c.slot_quantum_s), "slot_quantum_s", "must be > 0");
  need(finite_positive(c.propagation_speed_mps), "propagation_speed_mps", "must be > 0");
  need(!c.priority_table.empty(), "priority", "table must not be empty");
  for (const auto &[cls, p] : c.priority_table) {
    need(p > 0, "priority", "entries must be positive integers");
    (void)cls;
  }

  const auto &ch = c.channel;
  need(finite_positive(ch.frequency_hz), "frequency_hz", "must be > 0");
  need(std::isfinite(ch.absorption_per_m) && ch.absorption_per_m >= 0.0,
       "absorption_per_m", "must be >= 0");
  need(std::isfinite(ch.path_loss_exponent) && ch.path_loss_exponent >= 2.0,
       "path_loss_exponent", "must be >= 2");
  need(std::isfinite(ch.shadowing_sigma_db) && ch.shadowing_sigma_db >= 0.0,
       "shadowing_sigma_db", "must be >= 0");
  need(finite_positive(ch.gain), "gain", "must be > 0");
  need(finite_positive(ch.noise_power_w), "noise_power_w", "must be > 0");
  need(std::isfinite(ch.sinr_threshold_db), "sinr_threshold_db", "must be finite");
  need(finite_positive(ch.speed_of_light_mps), "speed_of_light_mps", "must be > 0");

  need(finite_positive(c.bandwidth_hz), "bandwidth_hz", "must be > 0");
  need(std::isfinite(c.fade_margin_db) && c.fade_margin_db >= 0.0, "fade_margin_db",
       "must be >= 0");
  need(std::isfinite(c.electronics_energy_j_per_bit) && c.electronics_energy_j_per_bit >= 0.0,
       "electronics_energy_j_per_bit", "must be >= 0");
  need(std::isfinite(c.tx_power_w) && c.tx_power_w >= 0.0, "tx_power_w", "must be >= 0");
  need(c.coop_links >= 1, "coop_links", "must be >= 1");
  need(c.fusion_layers >= 1, "fusion_layers", "must be >= 1");
  need(std::isfinite(c.fusion_rate_bps) && c.fusion_rate_bps >= 0.0, "fusion_rate_bps",
       "must be >= 0");

  const auto &e = c.energy;
  need(finite_positive(e.c_nps_f), "c_nps_f", "must be > 0");
  need(finite_positive(e.v_g_v), "v_g_v", "must be > 0");
  need(finite_positive(e.delta_q_c), "delta_q_c", "must be > 0");
  need(finite_positive(e.tau_s), "tau_s", "must be > 0");
  need(std::isfinite(e.e_min_j) && e.e_min_j >= 0.0, "e_min_j", "must be >= 0");
  need(finite_positive(e.e_tx_j), "e_tx_j", "must be > 0");
  if (finite_positive(e.c_nps_f) && finite_positive(e.v_g_v)) {
    need(e.e_min_j + e.e_tx_j <= e_nps_max_of(e), "e_tx_j",
         "e_min_j + e_tx_j must not exceed the storage limit 0.5*C*Vg^2");
  }
  need(std::isfinite(c.theta_per_j) && c.theta_per_j >= 0.0, "theta_per_j", "must be >= 0");

  need(c.trials >= 1, "trials", "must be >= 1");
  need(finite_positive(c.analytic_tolerance), "analytic_tolerance", "must be > 0");
  return out;
}

ValidatedConfig validate_config(const SimConfig &cfg) {
  SimConfig c = cfg;
  if (finite_positive(c.tx_range_m) && finite_positive(c.deployment_radius_m)) {
    c.layer_count = derived_layer_count(c.deployment_radius_m, c.tx_range_m);
  }
  auto violations = check_config(c);
  if (!violations.empty()) throw InvalidConfig(violations.front());
  return ValidatedConfig(std::move(c));
}

double ValidatedConfig::advert_range() const {
  return cfg_.advert_range_m > 0.0 ? cfg_.advert_range_m : 0.5 * cfg_.tx_range_m;
}

double ValidatedConfig::tx_power() const {
  if (cfg_.tx_power_w > 0.0) return cfg_.tx_power_w;
  // Closes a link at tx range with the fade margin on top of the threshold.
  const auto &ch = cfg_.channel;
  const double d = cfg_.tx_range_m;
  const double spreading = std::pow(4.0 * kPi * ch.frequency_hz * d / ch.speed_of_light_mps, 2);
  const double loss = std::pow(d, ch.path_loss_exponent) * std::exp(ch.absorption_per_m * d) *
                      spreading / ch.gain;
  return from_db(ch.sinr_threshold_db + cfg_.fade_margin_db) * ch.noise_power_w * loss;
}

int ValidatedConfig::cycle_count() const {
  return static_cast<int>(std::floor(cfg_.simulation_duration_s / cfg_.message_interval_s + 1e-9));
}

// ---------------------------------------------------------------------------
// Key/value format
// ---------------------------------------------------------------------------

std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc{}) return "nan";
  return std::string(buf.data(), end);
}

std::uint64_t fnv1a64(const std::string &s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

namespace {

struct Field {
  ConfigKey key;
  std::function<std::string(const SimConfig &)> get;
  std::function<void(SimConfig &, const std::string &)> set;
};

double parse_double(const std::string &key, const std::string &v) {
  double out = 0.0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size()) {
    throw ConfigParseError("key '" + key + "': not a number: '" + v + "'");
  }
  return out;
}

template <class Int>
Int parse_int(const std::string &key, const std::string &v) {
  Int out{};
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size()) {
    throw ConfigParseError("key '" + key + "': not an integer: '" + v + "'");
  }
  return out;
}

#define NANONET_DOUBLE(name, member, unit, desc)                                          \
  Field {                                                                                 \
    {name, unit, desc}, [](const SimConfig &c) { return format_double(c.member); },      \
        [](SimConfig &c, const std::string &v) { c.member = parse_double(name, v); }     \
  }
#define NANONET_INT(name, member, type, unit, desc)                                         \
  Field {                                                                                   \
    {name, unit, desc}, [](const SimConfig &c) { return std::to_string(c.member); },       \
        [](SimConfig &c, const std::string &v) { c.member = parse_int<type>(name, v); }    \
  }

const std::vector<Field> &fields() {
  static const std::vector<Field> table = {
      NANONET_INT("node_count", node_count, int, "count", "nanosensors deployed around the NC"),
      NANONET_DOUBLE("tx_range_m", tx_range_m, "m", "transmission range r"),
      NANONET_DOUBLE("deployment_radius_m", deployment_radius_m, "m",
                     "radius of the deployment volume around the NC"),
      Field{{"volume_shape", "-", "sphere or cube (cube inscribed in the radius)"},
            [](const SimConfig &c) { return std::string(to_string(c.volume_shape)); },
            [](SimConfig &c, const std::string &v) {
              if (v == "sphere") c.volume_shape = VolumeShape::Sphere;
              else if (v == "cube") c.volume_shape = VolumeShape::Cube;
              else throw ConfigParseError("key 'volume_shape': expected sphere or cube");
            }},
      NANONET_INT("layer_count", layer_count, int, "count",
                  "derived ceil(2R/r); 0 lets validation fill it in"),
      NANONET_DOUBLE("initial_energy_min_fraction", initial_energy_min_fraction, "-",
                     "initial residual energy drawn uniformly in [f, 1] x E_max"),
      NANONET_DOUBLE("advert_range_m", advert_range_m, "m",
                     "low-power advertisement range; 0 selects r/2"),
      NANONET_INT("max_election_rounds", max_election_rounds, int, "count",
                  "head election rounds; 0 repeats until all nodes are clustered"),
      NANONET_DOUBLE("pulse_energy_j", pulse_energy_j, "J", "energy of one pulse"),
      NANONET_DOUBLE("pulse_duration_s", pulse_duration_s, "s",
                     "pulse duration, also the per-bit radiating time"),
      NANONET_DOUBLE("pulse_interval_s", pulse_interval_s, "s",
                     "pulse interval, the slot time per bit"),
      NANONET_INT("packet_bits", packet_bits, int, "bits", "packet size"),
      NANONET_DOUBLE("message_interval_s", message_interval_s, "s",
                     "message generation interval, one transmission cycle"),
      NANONET_DOUBLE("simulation_duration_s", simulation_duration_s, "s", "simulated time"),
      NANONET_INT("initial_ttl", initial_ttl, int, "hops", "initial packet TTL"),
      NANONET_DOUBLE("adtn_probability", adtn_probability, "-",
                     "probability an NCM has data in a cycle"),
      NANONET_DOUBLE("slot_quantum_s", slot_quantum_s, "s", "TDMA slot quantum"),
      NANONET_DOUBLE("propagation_speed_mps", propagation_speed_mps, "m/s",
                     "propagation speed used for the delay allowance"),
      NANONET_DOUBLE("frequency_hz", channel.frequency_hz, "Hz", "carrier frequency f"),
      NANONET_DOUBLE("absorption_per_m", channel.absorption_per_m, "1/m",
                     "molecular absorption coefficient K(f)"),
      NANONET_DOUBLE("path_loss_exponent", channel.path_loss_exponent, "-",
                     "path loss exponent eta"),
      NANONET_DOUBLE("shadowing_sigma_db", channel.shadowing_sigma_db, "dB",
                     "shadowing standard deviation"),
      NANONET_DOUBLE("gain", channel.gain, "-", "gain constant G"),
      NANONET_DOUBLE("noise_power_w", channel.noise_power_w, "W", "noise power N"),
      NANONET_DOUBLE("sinr_threshold_db", channel.sinr_threshold_db, "dB", "SINR threshold"),
      NANONET_DOUBLE("speed_of_light_mps", channel.speed_of_light_mps, "m/s", "c"),
      NANONET_DOUBLE("bandwidth_hz", bandwidth_hz, "Hz", "channel bandwidth B"),
      NANONET_DOUBLE("fade_margin_db", fade_margin_db, "dB",
                     "transmit margin above the threshold-meeting energy"),
      NANONET_DOUBLE("electronics_energy_j_per_bit", electronics_energy_j_per_bit, "J/bit",
                     "per-hop circuit energy added to every link"),
      NANONET_DOUBLE("tx_power_w", tx_power_w, "W",
                     "transmit power for capacity; 0 closes the link at tx range"),
      NANONET_INT("coop_links", coop_links, int, "count",
                  "parallel links into the fusion node per forwarded aggregate"),
      NANONET_INT("fusion_layers", fusion_layers, int, "count",
                  "n in the decode-and-forward threshold 2^(nC/B)-1"),
      NANONET_DOUBLE("fusion_rate_bps", fusion_rate_bps, "bit/s",
                     "C in the decode-and-forward threshold"),
      NANONET_DOUBLE("c_nps_f", energy.c_nps_f, "F", "nano power source capacitance"),
      NANONET_DOUBLE("v_g_v", energy.v_g_v, "V", "generator voltage"),
      NANONET_DOUBLE("delta_q_c", energy.delta_q_c, "C", "harvested charge per cycle"),
      NANONET_DOUBLE("tau_s", energy.tau_s, "s", "harvesting cycle length"),
      NANONET_DOUBLE("e_min_j", energy.e_min_j, "J", "energy at state S_0"),
      NANONET_DOUBLE("e_tx_j", energy.e_tx_j, "J", "energy per packet (chain step)"),
      NANONET_DOUBLE("theta_per_j", theta_per_j, "1/J", "energy-saving rate constant"),
      NANONET_INT("seed", seed, std::uint64_t, "-", "master random seed"),
      NANONET_INT("trials", trials, int, "count", "Monte Carlo trials"),
      NANONET_DOUBLE("analytic_tolerance", analytic_tolerance, "-",
                     "root-finding tolerance for analytic calibration"),
  };
  return table;
}

#undef NANONET_DOUBLE
#undef NANONET_INT

constexpr const char *kPriorityPrefix = "priority.";

std::string trim(const std::string &s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

const std::vector<ConfigKey> &config_keys() {
  static const std::vector<ConfigKey> keys = [] {
    std::vector<ConfigKey> k;
    for (const auto &f : fields()) k.push_back(f.key);
    k.push_back({"priority.<class>", "-", "positive integer priority P of a data class"});
    return k;
  }();
  return keys;
}

SimConfig parse_config(const std::string &text) {
  SimConfig cfg;
  bool table_seen = false;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigParseError("line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.rfind(kPriorityPrefix, 0) == 0) {
      const std::string cls = key.substr(std::string(kPriorityPrefix).size());
      if (cls.empty()) throw ConfigParseError("line " + std::to_string(lineno) + ": empty class");
      if (!table_seen) {
        cfg.priority_table.clear();
        table_seen = true;
      }
      cfg.priority_table[cls] = parse_int<int>(key, value);
      continue;
    }
    bool known = false;
    for (const auto &f : fields()) {
      if (key == f.key.name) {
        f.set(cfg, value);
        known = true;
        break;
      }
    }
    if (!known) {
      throw ConfigParseError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
  return cfg;
}

SimConfig load_config(const std::string &path) {
  std::ifstream f(path);
  if (!f) throw ConfigParseError("cannot open config file: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const SimConfig &cfg) {
  std::ostringstream out;
  for (const auto &f : fields()) {
    out << "# " << f.key.description << " [" << f.key.unit << "]\n";
    out << f.key.name << " = " << f.get(cfg) << "\n";
  }
  out << "# data-class priorities P [-]\n";
  for (const auto &[cls, p] : cfg.priority_table) {
    out << kPriorityPrefix << cls << " = " << p << "\n";
  }
  return out.str();
}

}  // namespace nanonet
