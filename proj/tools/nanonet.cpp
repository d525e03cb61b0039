// nanonet: command-line driver for deployments, cycle simulation, metric
// sweeps, Monte Carlo outage and the energy chain.

#include <CLI11.hpp>
#include <json.hpp>

#include <Eigen/Core>
#include <boost/version.hpp>
#include <omp.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "nanonet/energy.hpp"
#include "nanonet/engine.hpp"
#include "nanonet/mcoutage.hpp"
#include "nanonet/topology.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace nanonet;

namespace {

enum Exit { kOk = 0, kConfig = 1, kRuntime = 2, kIo = 3 };

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// Bad command-line values count as configuration errors.
struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct Common {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::string format = "csv";
};

double parse_number(const std::string &s) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception &) {
    throw UsageError("not a number: '" + s + "'");
  }
  if (pos != s.size()) throw UsageError("not a number: '" + s + "'");
  return v;
}

// "a..b" (with `points` evenly spaced values) or "a,b,c".
std::vector<double> parse_values(const std::string &text, int points) {
  std::vector<double> out;
  if (auto dots = text.find(".."); dots != std::string::npos) {
    const double a = parse_number(text.substr(0, dots));
    const double b = parse_number(text.substr(dots + 2));
    if (points < 1) throw UsageError("--points must be >= 1");
    if (points == 1) return {a};
    for (int i = 0; i < points; ++i) out.push_back(a + (b - a) * i / (points - 1));
    return out;
  }
  std::stringstream ss(text);
  for (std::string tok; std::getline(ss, tok, ',');) {
    if (!tok.empty()) out.push_back(parse_number(tok));
  }
  if (out.empty()) throw UsageError("empty value list");
  return out;
}

ValidatedConfig load(const Common &c) {
  SimConfig cfg = c.config_path.empty() ? SimConfig{} : load_config(c.config_path);
  if (c.seed) cfg.seed = *c.seed;
  return validate_config(cfg);
}

json csv_to_json(const std::string &csv) {
  std::stringstream in(csv);
  std::string line;
  std::getline(in, line);
  std::vector<std::string> header;
  {
    std::stringstream hs(line);
    for (std::string h; std::getline(hs, h, ',');) header.push_back(h);
  }
  json rows = json::array();
  while (std::getline(in, line)) {
    std::stringstream ls(line);
    json row = json::object();
    std::size_t i = 0;
    for (std::string cell; i < header.size(); ++i) {
      if (!std::getline(ls, cell, ',')) cell.clear();
      char *end = nullptr;
      const long long n = std::strtoll(cell.c_str(), &end, 10);
      if (!cell.empty() && *end == '\0') {
        row[header[i]] = n;
        continue;
      }
      const double v = std::strtod(cell.c_str(), &end);
      if (!cell.empty() && *end == '\0') {
        row[header[i]] = v;
      } else {
        row[header[i]] = cell;
      }
    }
    rows.push_back(row);
  }
  return rows;
}

class Writer {
 public:
  explicit Writer(const Common &c) : c_(c) {
    std::error_code ec;
    fs::create_directories(c.out_dir, ec);
    if (ec || !fs::is_directory(c.out_dir)) {
      throw IoError("cannot create output directory: " + c.out_dir);
    }
  }

  // `csv` is canonical; with --format json the same table goes to <stem>.json.
  void table(const std::string &stem, const std::string &csv) {
    if (c_.format == "json") {
      raw(stem + ".json", csv_to_json(csv).dump(1) + "\n");
    } else {
      raw(stem + ".csv", csv);
    }
  }

  void raw(const std::string &name, const std::string &content) {
    const fs::path p = fs::path(c_.out_dir) / name;
    std::ofstream f(p, std::ios::binary);
    if (!f) throw IoError("cannot open for writing: " + p.string());
    f << content;
    f.close();
    if (!f) throw IoError("write failed: " + p.string());
    written_.push_back(name);
  }

  const std::vector<std::string> &written() const { return written_; }

 private:
  const Common &c_;
  std::vector<std::string> written_;
};

void write_manifest(Writer &w, const std::string &command, const Common &c,
                    const ValidatedConfig &cfg, const json &extra) {
  const std::string text = serialize_config(cfg.get());
  w.raw("config.used", text);
  std::ostringstream hash;
  hash << std::hex << fnv1a64(text);
  json m;
  m["command"] = command;
  m["config_path"] = c.config_path;
  m["config_used"] = "config.used";
  m["config_hash_fnv1a64"] = hash.str();
  m["seed"] = cfg->seed;
  m["format"] = c.format;
  m["output_dir"] = c.out_dir;
  m["arguments"] = extra;
  m["outputs"] = w.written();
  m["versions"] = {
      {"nanonet", NANONET_VERSION},
      {"compiler", __VERSION__},
      {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                    "." + std::to_string(EIGEN_MINOR_VERSION)},
      {"boost", std::to_string(BOOST_VERSION / 100000) + "." +
                    std::to_string(BOOST_VERSION / 100 % 1000) + "." +
                    std::to_string(BOOST_VERSION % 100)},
      {"openmp", _OPENMP}};
  m["threads"] = omp_get_max_threads();
  w.raw("manifest.json", m.dump(2) + "\n");
}

// --- commands --------------------------------------------------------------

void cmd_deploy(const Common &c) {
  const auto cfg = load(c);
  Writer w(c);
  WorldState world(cfg);
  w.table("coordinates", coordinates_csv(world.dep));
  w.table("clusters", clusters_csv(world.clusters));
  write_manifest(w, "deploy", c, cfg, json::object());
}

void cmd_simulate(const Common &c, int cycles, bool trace) {
  const auto cfg = load(c);
  Writer w(c);
  WorldState world(cfg);
  const int n = cycles > 0 ? cycles : cfg.cycle_count();
  std::ostringstream summary, events, timeline;
  summary << "cycle,generated_bits,delivered_bits,outage_events,dead_node_events,"
             "energy_spent_j,energy_harvested_j,active_clusters,cycle_ps\n";
  events << "cycle,time_ps,node,event,detail\n";
  timeline << "cycle,level,owner_id,start_ps,duration_ps\n";
  for (int i = 0; i < n; ++i) {
    const CycleTrace tr = step(world);
    if (const auto err = check_energy_conservation(tr); !err.empty()) {
      throw std::runtime_error("cycle " + std::to_string(i) + ": " + err);
    }
    double spent = 0.0, harvested = 0.0;
    for (double e : tr.per_node_energy_spent) spent += e;
    for (double e : tr.harvested) harvested += e;
    summary << tr.cycle << ',' << tr.generated_bits << ',' << tr.delivered_bits << ','
            << tr.outage_events << ',' << tr.dead_node_events << ',' << format_double(spent)
            << ',' << format_double(harvested) << ',' << tr.active_clusters.size() << ','
            << format_double(tr.timeline.cycle * tr.timeline.quantum_s / 1e-12) << '\n';
    auto append = [&](std::ostringstream &out, const std::string &csv) {
      std::stringstream in(csv);
      std::string line;
      std::getline(in, line);  // header
      while (std::getline(in, line)) out << tr.cycle << ',' << line << '\n';
    };
    append(timeline, timeline_csv(tr.timeline));
    if (trace) append(events, events_csv(tr));
  }
  w.table("cycles", summary.str());
  w.table("timeline", timeline.str());
  if (trace) w.table("events", events.str());
  write_manifest(w, "simulate", c, cfg, {{"cycles", n}, {"trace", trace}});
}

void cmd_sweep(const Common &c, const std::string &axis, const std::string &values, int points,
               const SweepOptions &opt) {
  const auto cfg = load(c);
  const auto xs = parse_values(values, points);
  Writer w(c);
  const MetricsTable t = sweep(cfg, axis, xs, opt);
  w.table("metrics", metrics_csv(t));
  json extra{{"axis", axis},
             {"values", xs},
             {"reference_distance_m", opt.reference_distance_m},
             {"p_out", opt.p_out},
             {"k_links", opt.k_links}};
  if (axis == "distance") {
    const auto d = reported_crossover(t);
    extra["crossover_m"] = d ? json(*d) : json(nullptr);
  }
  write_manifest(w, "sweep", c, cfg, extra);
}

void cmd_mc(const Common &c, const std::string &ks, const std::optional<std::string> &gamma,
            int points, std::optional<double> trials, std::optional<double> offset) {
  const auto cfg = load(c);
  McRun run = mc_run_from_config(cfg);
  run.k_links.clear();
  for (double k : parse_values(ks, 1)) {
    if (k < 1 || k != std::floor(k)) throw UsageError("--k entries must be positive integers");
    run.k_links.push_back(static_cast<int>(k));
  }
  if (gamma) run.gamma_axis_db = parse_values(*gamma, points);
  if (trials) {
    if (*trials < 1 || *trials != std::floor(*trials)) throw UsageError("--trials must be >= 1");
    run.trials = static_cast<long>(*trials);
  }
  if (offset) run.mean_offset_db = *offset;
  check_run(run);
  Writer w(c);
  const auto pts = mc_outage(run);
  w.table("outage", mc_csv(pts));
  int outside = 0;
  for (const auto &p : pts) outside += !within_binomial_envelope(p);
  write_manifest(w, "mc-outage", c, cfg,
                 {{"k", run.k_links},
                  {"trials", run.trials},
                  {"gamma_axis_db", run.gamma_axis_db},
                  {"sigma_db", run.sigma_db},
                  {"threshold_db", run.threshold_db},
                  {"mean_offset_db", run.mean_offset_db},
                  {"batches", run.batches},
                  {"max_abs_deviation", mc_vs_analytic_report(pts)},
                  {"points_outside_3sigma", outside}});
}

void cmd_chain(const Common &c, std::optional<double> consume) {
  const auto cfg = load(c);
  const double rate = consume ? *consume : cfg->energy.e_tx_j / cfg->message_interval_s;
  if (!(rate > 0.0)) throw UsageError("--consume-rate must be > 0");
  Writer w(c);
  const EnergyChain chain = build_chain(cfg->energy, rate);
  const Eigen::VectorXd pi = stationary_distribution(chain);
  w.table("chain", chain_csv(chain, pi));
  write_manifest(w, "chain", c, cfg, {{"consume_rate_w", rate}, {"states", chain.states()}});
}

std::string keys_help() {
  std::ostringstream out;
  out << "Config file: one `key = value` per line, `#` starts a comment.\nKeys:\n";
  for (const auto &k : config_keys()) {
    out << "  " << k.name << " [" << k.unit << "]  " << k.description << "\n";
  }
  out << "Environment: NANONET_THREADS caps the worker threads.\n"
      << "Exit codes: 1 config/usage error, 2 runtime error, 3 output I/O error.\n";
  return out.str();
}

void apply_thread_cap() {
  if (const char *env = std::getenv("NANONET_THREADS")) {
    char *end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || n < 1) {
      throw UsageError("NANONET_THREADS must be a positive integer, got '" + std::string(env) + "'");
    }
    omp_set_num_threads(static_cast<int>(n));
  }
}

int fail(int code, const std::string &kind, const std::string &msg, const std::string &field = {}) {
  json e{{"error", kind}, {"message", msg}, {"exit_code", code}};
  if (!field.empty()) e["field"] = field;
  std::cerr << e.dump() << "\n";
  return code;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"THz body nanonetwork simulator"};
  app.footer(keys_help());
  app.require_subcommand(1);

  Common common;
  auto add_common = [&](CLI::App *sub) {
    sub->add_option("--config", common.config_path, "config file (key = value)");
    sub->add_option("--out", common.out_dir, "output directory")->capture_default_str();
    sub->add_option("--seed", common.seed, "override the config seed");
    sub->add_option("--format", common.format, "table format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    sub->footer(keys_help());
  };

  auto *deploy_cmd = app.add_subcommand("deploy", "place nodes, assign layers, elect heads");
  add_common(deploy_cmd);

  int cycles = 0;
  bool trace = false;
  auto *sim_cmd = app.add_subcommand("simulate", "run transmission cycles");
  add_common(sim_cmd);
  sim_cmd->add_option("--cycles", cycles, "cycles to run (default: duration / interval)");
  sim_cmd->add_flag("--trace", trace, "also write the per-event log");

  std::string axis = "distance", values = "1e-3..10e-3";
  int points = 10;
  SweepOptions sopt;
  auto *sweep_cmd = app.add_subcommand("sweep", "evaluate link metrics along one axis");
  add_common(sweep_cmd);
  std::string axes_list;
  for (const auto &a : sweep_axes()) axes_list += (axes_list.empty() ? "" : ", ") + a;
  sweep_cmd->add_option("--axis", axis, "one of: " + axes_list)->capture_default_str();
  sweep_cmd->add_option("--values", values, "a..b or a,b,c (axis units)")->capture_default_str();
  sweep_cmd->add_option("--points", points, "points for a..b ranges")->capture_default_str();
  sweep_cmd->add_option("--distance", sopt.reference_distance_m, "distance for non-distance axes [m]")
      ->capture_default_str();
  sweep_cmd->add_option("--p-out", sopt.p_out, "outage level for outage capacity [-]")
      ->capture_default_str();
  sweep_cmd->add_option("--k", sopt.k_links, "parallel links for the outage column")
      ->capture_default_str();

  std::string ks = "1,2,4";
  std::optional<std::string> gamma;
  int gamma_points = 21;
  std::optional<double> trials, offset;
  auto *mc_cmd = app.add_subcommand("mc-outage", "Monte Carlo fusion outage vs analytic");
  add_common(mc_cmd);
  mc_cmd->add_option("--k", ks, "comma-separated link counts")->capture_default_str();
  mc_cmd->add_option("--gamma", gamma, "axis points [dB], a..b or a,b,c (default 0..20)");
  mc_cmd->add_option("--points", gamma_points, "points for a..b ranges")->capture_default_str();
  mc_cmd->add_option("--trials", trials, "trials per point (default: config trials)");
  mc_cmd->add_option("--offset", offset,
                     "mean SINR offset [dB] (default: calibrated to 0.12 at axis 10, one link)");

  std::optional<double> consume;
  auto *chain_cmd = app.add_subcommand("chain", "energy Markov chain and stationary law");
  add_common(chain_cmd);
  chain_cmd->add_option("--consume-rate", consume,
                        "average consumption [W] (default: e_tx / message_interval)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    return fail(kConfig, "usage", e.what());
  }

  try {
    apply_thread_cap();
    if (*deploy_cmd) cmd_deploy(common);
    if (*sim_cmd) cmd_simulate(common, cycles, trace);
    if (*sweep_cmd) cmd_sweep(common, axis, values, points, sopt);
    if (*mc_cmd) cmd_mc(common, ks, gamma, gamma_points, trials, offset);
    if (*chain_cmd) cmd_chain(common, consume);
  } catch (const InvalidConfig &e) {
    return fail(kConfig, "config", e.what(), e.field());
  } catch (const ConfigParseError &e) {
    return fail(kConfig, "config", e.what());
  } catch (const UsageError &e) {
    return fail(kConfig, "usage", e.what());
  } catch (const UnknownAxis &e) {
    return fail(kConfig, "usage", e.what());
  } catch (const InvalidRun &e) {
    return fail(kConfig, "usage", e.what());
  } catch (const IoError &e) {
    return fail(kIo, "io", e.what());
  } catch (const std::exception &e) {
    return fail(kRuntime, "runtime", e.what());
  }
  return kOk;
}
