#include "nanonet/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include "nanonet/energy.hpp"
#include "nanonet/units.hpp"

namespace nanonet {

// ---------------------------------------------------------------------------
// Link energy
// ---------------------------------------------------------------------------

double energy_per_bit(double d, const ChannelParams &ch, double bit_time_s) {
  const double p_t = from_db(ch.sinr_threshold_db) * ch.noise_power_w / path_gain(d, ch);
  return p_t * bit_time_s;
}

double LinkEnergyModel::radiated(double d) const {
  return from_db(fade_margin_db) * energy_per_bit(d, channel, bit_time_s);
}

double LinkEnergyModel::link(double d) const { return electronics_j_per_bit + radiated(d); }

double LinkEnergyModel::tx_power(double d) const { return radiated(d) / bit_time_s; }

LinkEnergyModel link_energy_model(const ValidatedConfig &cfg) {
  return {cfg->channel, cfg->pulse_duration_s, cfg->fade_margin_db,
          cfg->electronics_energy_j_per_bit};
}

IntraPath choose_intra_path(const NodeState &adtn, const NodeState &ncc,
                            std::span<const NodeState> candidates, const LinkEnergyModel &m) {
  IntraPath best;
  best.energy_per_bit = m.link(distance(adtn.pos, ncc.pos));
  const double direct = best.energy_per_bit;
  double best_sum = std::numeric_limits<double>::infinity();
  NodeId best_id = 0;
  for (const auto &j : candidates) {
    if (j.id == adtn.id || j.id == ncc.id) continue;
    const double dij = distance(adtn.pos, j.pos);
    const double djz = distance(j.pos, ncc.pos);
    if (dij <= 0.0 || djz <= 0.0) continue;
    const double sum = m.link(dij) + m.link(djz);
    if (sum > direct) continue;  // the direct rule holds for this j
    if (sum < best_sum || (sum == best_sum && j.id < best_id)) {
      best_sum = sum;
      best_id = j.id;
    }
  }
  if (best_id != 0) {
    best.relay = best_id;
    best.energy_per_bit = best_sum;
  }
  return best;
}

double relay_crossover_distance(const LinkEnergyModel &m) {
  // g(d) = E(d) - 2 E(d/2) is increasing in d; find its root.
  auto g = [&](double d) { return m.link(d) - 2.0 * m.link(0.5 * d); };
  double lo = 1e-9, hi = 1e-9;
  if (g(lo) >= 0.0) return 0.0;
  while (g(hi) < 0.0) {
    hi *= 2.0;
    if (hi > 1e3) return std::numeric_limits<double>::infinity();
  }
  for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------
// World
// ---------------------------------------------------------------------------

const char *to_string(EventKind k) {
  switch (k) {
    case EventKind::WakeUp: return "WakeUp";
    case EventKind::TxIntra: return "TxIntra";
    case EventKind::TxRelay: return "TxRelay";
    case EventKind::TxInter: return "TxInter";
    case EventKind::Fuse: return "Fuse";
    case EventKind::Rotate: return "Rotate";
    case EventKind::Harvest: return "Harvest";
    case EventKind::DeadNode: return "DeadNode";
  }
  return "?";
}

WorldState::WorldState(const ValidatedConfig &c)
    : cfg(c), dep(deploy(c)), model(link_energy_model(c)), rng(c->seed ^ 0x9e3779b97f4a7c15ull) {
  ElectionOptions opt;
  opt.advert_range = cfg.advert_range();
  opt.e_max = e_nps_max(cfg->energy);
  opt.max_rounds = cfg->max_election_rounds;
  clusters = elect_nccs(dep, opt);
  apply_clusters(dep, clusters);
}

std::vector<TransmissionRequest> generate_requests(WorldState &st) {
  std::vector<TransmissionRequest> out;
  std::bernoulli_distribution active(st.cfg->adtn_probability);
  std::vector<int> priorities;
  for (const auto &[cls, p] : st.cfg->priority_table) priorities.push_back(p);
  std::uniform_int_distribution<std::size_t> pick_class(0, priorities.size() - 1);

  for (const auto &c : st.clusters) {
    const NodeState &head = st.dep.node(c.ncc);
    std::vector<NodeState> relays;
    for (NodeId m : c.members) {
      if (m != c.ncc) relays.push_back(st.dep.node(m));
    }
    for (NodeId m : c.members) {
      if (m == c.ncc) continue;
      if (!active(st.rng)) continue;
      const NodeState &n = st.dep.node(m);
      TransmissionRequest r;
      r.ncm_id = m;
      r.nc_id = kNcId;
      r.d_k = distance(n.pos, st.dep.nc.pos);
      r.layer = n.layer;
      r.residual = n.residual_energy;
      r.amount = st.cfg->packet_bits;
      r.priority = priorities.size() == 1 ? priorities.front() : priorities[pick_class(st.rng)];
      r.cluster = c.id;
      std::vector<NodeState> in_range;
      for (const auto &j : relays) {
        if (j.id == m) continue;
        if (distance(n.pos, j.pos) <= st.cfg->tx_range_m &&
            distance(j.pos, head.pos) <= st.cfg->tx_range_m) {
          in_range.push_back(j);
        }
      }
      r.relay = choose_intra_path(n, head, in_range, st.model).relay;
      out.push_back(r);
    }
  }
  st.pending = out;
  return out;
}

namespace {

struct Packet {
  std::uint64_t id = 0;
  std::int64_t bits = 0;
  int ttl = 0;
};

struct PlannedTx {
  NodeId tx = 0, rx = 0;
  Ticks start = 0, end = 0;
};

class CycleRunner {
 public:
  CycleRunner(WorldState &st, const Timeline &tl, CycleTrace &tr) : st_(st), tl_(tl), tr_(tr) {}

  void run() {
    std::map<NodeId, const TransmissionRequest *> req_by_node;
    for (const auto &r : st_.pending) req_by_node[r.ncm_id] = &r;

    for (const auto &ls : tl_.layer_slots) {
      event(ls.start, kNcId, EventKind::WakeUp, "layer=" + std::to_string(ls.layer + 1), 0.0, -1,
            ls.start, ls.start + ls.duration);
      const auto &cslots = tl_.cluster_slots.at(ls.layer);

      // Intra-cluster period.
      std::vector<PlannedTx> planned;
      for (const auto &cs : cslots) {
        const NodeId head = st_.clusters[cs.cluster].ncc;
        for (const auto &a : tl_.adtn_slots.at(cs.cluster)) {
          if (a.relay) {
            planned.push_back({a.node, *a.relay, a.start, a.start + a.first_hop});
            planned.push_back({*a.relay, head, a.start + a.first_hop, a.start + a.duration});
          } else {
            planned.push_back({a.node, head, a.start, a.start + a.duration});
          }
        }
      }
      std::map<int, std::vector<Packet>> aggregate;
      for (const auto &cs : cslots) {
        Cluster &cl = st_.clusters[cs.cluster];
        const NodeId head = cl.ncc;
        st_.dep.node(head).mode = Mode::Transmitting;
        for (const auto &a : tl_.adtn_slots.at(cs.cluster)) {
          const auto *req = req_by_node.at(a.node);
          st_.dep.node(a.node).mode = Mode::Transmitting;
          Packet pkt{st_.next_packet_id++, req->amount, st_.cfg->initial_ttl};
          tr_.generated_bits += pkt.bits;
          bool ok;
          if (a.relay) {
            ok = hop(a.node, *a.relay, pkt, EventKind::TxRelay, a.start, a.start, a.start + a.first_hop,
                     planned, true) &&
                 hop(*a.relay, head, pkt, EventKind::TxRelay, a.start + a.first_hop,
                     a.start + a.first_hop, a.start + a.duration, planned, true);
          } else {
            ok = hop(a.node, head, pkt, EventKind::TxIntra, a.start, a.start, a.start + a.duration,
                     planned, true);
          }
          if (ok) aggregate[cs.cluster].push_back(pkt);
        }
        cl.info_list.clear();
        for (const auto &p : aggregate[cs.cluster]) cl.info_list.push_back(p.id);
      }

      // Inter-cluster / inter-layer period.
      for (const auto &cs : cslots) forward(cs, aggregate[cs.cluster]);

      // Rotation of every cluster that transmitted in this layer.
      const Ticks layer_end = ls.start + ls.duration;
      for (const auto &cs : cslots) {
        Cluster &cl = st_.clusters[cs.cluster];
        const NodeId old_head = cl.ncc;
        cl = rotate_ncc(std::move(cl));
        st_.dep.node(old_head).role = Role::NCM;
        st_.dep.node(cl.ncc).role = Role::NCC;
        event(layer_end, cl.ncc, EventKind::Rotate,
              "cluster=" + std::to_string(cl.id) + " from=" + std::to_string(old_head), 0.0, -1,
              ls.start, layer_end);
        tr_.active_clusters.push_back(cl.id);
      }
    }
  }

 private:
  void event(Ticks t, NodeId n, EventKind k, std::string detail, double energy, NodeId peer,
             Ticks s0, Ticks s1) {
    tr_.events.push_back({t, n, k, std::move(detail), energy, peer, s0, s1});
  }

  // Spends the hop's energy and, when `assess` is set, samples the link.
  // Returns whether the packet made it across.
  bool hop(NodeId from, NodeId to, Packet &pkt, EventKind kind, Ticks t, Ticks s0, Ticks s1,
           const std::vector<PlannedTx> &planned, bool assess) {
    NodeState &tx = st_.dep.node(from);
    const NodeState &rx = st_.dep.node(to);
    const double d = distance(tx.pos, rx.pos);
    const double cost = static_cast<double>(pkt.bits) * st_.model.link(d);
    if (tx.residual_energy < cost) {
      ++tr_.dead_node_events;
      event(t, from, EventKind::DeadNode, "needed=" + format_double(cost), 0.0, to, s0, s1);
      return false;
    }
    tx.residual_energy -= cost;
    tr_.per_node_energy_spent[from] += cost;
    if (--pkt.ttl < 0) {
      event(t, from, kind, "ttl-expired", cost, to, s0, s1);
      return false;
    }
    bool lost = false;
    if (assess) lost = !link_survives(from, to, d, s0, s1, planned);
    if (lost) ++tr_.outage_events;
    event(t, from, kind, lost ? "outage" : "ok", cost, to, s0, s1);
    return !lost;
  }

  bool link_survives(NodeId from, NodeId to, double d, Ticks s0, Ticks s1,
                     const std::vector<PlannedTx> &planned) {
    const auto &ch = st_.cfg->channel;
    std::normal_distribution<double> xi(0.0, ch.shadowing_sigma_db);
    auto sample = [&] { return ch.shadowing_sigma_db > 0.0 ? xi(st_.rng) : 0.0; };
    const double p_t = st_.model.tx_power(d);
    const double p_rx = received_power(p_t, d, sample(), ch);
    std::vector<Interferer> intf;
    for (const auto &p : planned) {
      if (p.tx == from || p.end <= s0 || p.start >= s1) continue;
      const double dz = distance(st_.dep.node(p.tx).pos, st_.dep.node(to).pos);
      if (dz <= 0.0) continue;
      intf.push_back({st_.model.tx_power(distance(st_.dep.node(p.tx).pos, st_.dep.node(p.rx).pos)),
                      dz, sample()});
    }
    const double g = sinr(p_rx, interference_power(intf, ch), ch.noise_power_w);
    return to_db(g) >= ch.sinr_threshold_db;
  }

  // Nearest current head in `layer`, ties to the lower id.
  std::optional<NodeId> nearest_head(const Position &from, int layer) const {
    std::optional<NodeId> best;
    double best_d = std::numeric_limits<double>::infinity();
    for (const auto &c : st_.clusters) {
      if (c.layer != layer) continue;
      const double d = distance(from, st_.dep.node(c.ncc).pos);
      if (d < best_d || (d == best_d && best && c.ncc < *best)) {
        best_d = d;
        best = c.ncc;
      }
    }
    return best;
  }

  void forward(const ClusterSlot &cs, std::vector<Packet> &packets) {
    if (packets.empty()) return;
    const ForwardSlot &fs = tl_.forward_slots.at(cs.cluster);
    const Ticks per_hop = fs.duration / fs.hops;
    auto hop_window = [&](int h) {
      const Ticks s = fs.start + per_hop * h;
      const Ticks e = h + 1 == fs.hops ? fs.start + fs.duration : s + per_hop;
      return std::pair{s, e};
    };
    const std::vector<PlannedTx> none;

    std::int64_t bits = 0;
    for (const auto &p : packets) bits += p.bits;
    Packet agg{packets.front().id, bits, std::numeric_limits<int>::max()};
    for (const auto &p : packets) agg.ttl = std::min(agg.ttl, p.ttl);

    NodeId current = st_.clusters[cs.cluster].ncc;
    int h = 0;
    // Decode-and-forward down to the head of layer 1; intermediate hops decode
    // successfully and are not assessed for outage.
    for (int layer = cs.layer - 1; layer >= 0; --layer, ++h) {
      const auto next = nearest_head(st_.dep.node(current).pos, layer);
      if (!next) return;
      const auto [s, e] = hop_window(h);
      st_.dep.node(*next).mode = Mode::Transmitting;
      const bool last = layer == 0;
      if (!last) {
        if (!hop(current, *next, agg, EventKind::TxInter, s, s, e, none, false)) return;
      } else {
        if (!fusion_hop(current, *next, agg, s, e)) return;
      }
      current = *next;
    }
    const auto [s, e] = hop_window(h);
    if (!hop(current, kNcId, agg, EventKind::TxInter, s, s, e, none, false)) return;

    // Fusion keeps one copy per packet id.
    std::vector<std::uint64_t> ids;
    for (const auto &p : packets) ids.push_back(p.id);
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    for (const auto &p : packets) {
      if (std::binary_search(ids.begin(), ids.end(), p.id)) tr_.delivered_bits += p.bits;
    }
  }

  // Final hop into the layer-1 fusion node over coop_links parallel links.
  bool fusion_hop(NodeId from, NodeId fusion, Packet &agg, Ticks s, Ticks e) {
    const std::vector<PlannedTx> none;
    NodeState &tx = st_.dep.node(from);
    const NodeState &rx = st_.dep.node(fusion);
    const double d = distance(tx.pos, rx.pos);
    const double cost = static_cast<double>(agg.bits) * st_.model.link(d);
    if (tx.residual_energy < cost) {
      ++tr_.dead_node_events;
      event(s, from, EventKind::DeadNode, "needed=" + format_double(cost), 0.0, fusion, s, e);
      return false;
    }
    tx.residual_energy -= cost;
    tr_.per_node_energy_spent[from] += cost;
    --agg.ttl;
    const int k = st_.cfg->coop_links;
    int good = 0;
    for (int y = 0; y < k; ++y) {
      if (link_survives(from, fusion, d, s, e, none)) ++good;
    }
    tr_.fusion_links += k;
    ++tr_.fused_attempts;
    const bool delivered = good > 0;
    if (!delivered) ++tr_.outage_events;
    event(s, from, EventKind::TxInter,
          "links=" + std::to_string(k) + " ok=" + std::to_string(good) +
              (delivered ? "" : " outage"),
          cost, fusion, s, e);
    if (k > 1 && delivered) {
      event(s, fusion, EventKind::Fuse, "links=" + std::to_string(good), 0.0, kNcId, s, e);
    }
    if (delivered) ++tr_.fused_deliveries;
    return delivered;
  }

  WorldState &st_;
  const Timeline &tl_;
  CycleTrace &tr_;
};

}  // namespace

CycleTrace run_cycle(WorldState &st, const Timeline &tl) {
  CycleTrace tr;
  tr.cycle = st.cycle;
  tr.timeline = tl;
  const std::size_t n = st.dep.nodes.size() + 1;
  tr.residual_start.assign(n, 0.0);
  tr.per_node_energy_spent.assign(n, 0.0);
  tr.harvested.assign(n, 0.0);
  for (const auto &node : st.dep.nodes) tr.residual_start[node.id] = node.residual_energy;
  tr.heads_before.reserve(st.clusters.size());
  for (const auto &c : st.clusters) tr.heads_before.push_back(c.ncc);

  if (!tl.empty) CycleRunner(st, tl, tr).run();

  // Everyone except the current heads harvests until the next wake-up.
  const double cycles = st.cfg->message_interval_s / st.cfg->energy.tau_s;
  const Ticks t_end = tl.cycle;
  for (auto &node : st.dep.nodes) {
    if (node.role == Role::NCC) {
      node.mode = Mode::Idle;
    } else {
      node.mode = Mode::Harvesting;
      const double before = node.residual_energy;
      const double delta = charge(before, cycles, st.cfg->energy) - before;
      node.residual_energy += delta;
      tr.harvested[node.id] = delta;
      if (!tl.empty && delta > 0.0) {
        tr.events.push_back({t_end, node.id, EventKind::Harvest, "", delta, -1, t_end, t_end});
      }
    }
    node.energy_state = energy_state_of(node.residual_energy, st.cfg->energy);
  }
  tr.residual_end.assign(n, 0.0);
  for (const auto &node : st.dep.nodes) tr.residual_end[node.id] = node.residual_energy;

  std::stable_sort(tr.events.begin(), tr.events.end(),
                   [](const Event &a, const Event &b) { return a.time < b.time; });
  st.pending.clear();
  ++st.cycle;
  return tr;
}

CycleTrace step(WorldState &st) {
  const auto requests = generate_requests(st);
  const Timeline tl = build_timeline(requests, st.clusters, schedule_params(st.cfg));
  return run_cycle(st, tl);
}

std::string check_energy_conservation(const CycleTrace &tr) {
  std::vector<double> r = tr.residual_start;
  std::vector<double> spent(r.size(), 0.0);
  for (const auto &e : tr.events) {
    if (e.kind == EventKind::TxIntra || e.kind == EventKind::TxRelay ||
        e.kind == EventKind::TxInter) {
      r[e.node] -= e.energy;
      spent[e.node] += e.energy;
    }
  }
  for (std::size_t i = 1; i < r.size(); ++i) {
    if (spent[i] > tr.residual_start[i]) {
      return "node " + std::to_string(i) + " spent more than its starting residual";
    }
    if (spent[i] != tr.per_node_energy_spent[i]) {
      return "node " + std::to_string(i) + " spend total disagrees with its events";
    }
    r[i] += tr.harvested[i];
    if (r[i] != tr.residual_end[i]) {
      return "node " + std::to_string(i) + " residual does not balance";
    }
  }
  return {};
}

std::string events_csv(const CycleTrace &tr) {
  const double ps = tr.timeline.quantum_s / 1e-12;
  std::ostringstream out;
  out << "time_ps,node,event,detail\n";
  for (const auto &e : tr.events) {
    std::string detail = e.detail;
    if (e.peer >= 0) detail += (detail.empty() ? "" : " ") + std::string("to=") + std::to_string(e.peer);
    if (e.energy != 0.0) detail += " energy_j=" + format_double(e.energy);
    out << format_double(static_cast<double>(e.time) * ps) << ',' << e.node << ','
        << to_string(e.kind) << ',' << detail << '\n';
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

UnknownAxis::UnknownAxis(const std::string &axis)
    : std::invalid_argument("unknown sweep axis '" + axis + "'") {}

const std::vector<std::string> &sweep_axes() {
  static const std::vector<std::string> axes = {
      "distance", "p_out", "k_links", "sigma_db", "theta", "absorption", "fade_margin_db"};
  return axes;
}

MetricsRow sweep_point(const ValidatedConfig &cfg, const std::string &axis, double value,
                       const SweepOptions &opt) {
  if (std::find(sweep_axes().begin(), sweep_axes().end(), axis) == sweep_axes().end()) {
    throw UnknownAxis(axis);
  }
  LinkEnergyModel m = link_energy_model(cfg);
  double d = opt.reference_distance_m;
  double p_out = opt.p_out;
  int k = opt.k_links;
  double theta = cfg->theta_per_j;
  if (axis == "distance") d = value;
  else if (axis == "p_out") p_out = value;
  else if (axis == "k_links") k = static_cast<int>(std::lround(value));
  else if (axis == "sigma_db") m.channel.shadowing_sigma_db = value;
  else if (axis == "theta") theta = value;
  else if (axis == "absorption") m.channel.absorption_per_m = value;
  else if (axis == "fade_margin_db") m.fade_margin_db = value;
  if (k < 1) throw std::invalid_argument("sweep: k_links must be >= 1");

  MetricsRow row;
  row.axis = axis;
  row.value = value;
  row.distance_m = d;
  row.absorption_per_m = m.channel.absorption_per_m;

  const double single = m.link(d);
  const double half = m.link(0.5 * d);
  const bool relay = 2.0 * half <= single;
  row.energy_single_j_per_bit = single;
  row.energy_multi_j_per_bit = relay ? 2.0 * half : single;
  row.p_es = p_es(half, half, theta);
  row.p_es_rate = p_es_rate(half, half, theta);

  const auto &ch = m.channel;
  const double p_t = cfg.tx_power();
  const double snr_d = received_power(p_t, d, 0.0, ch) / ch.noise_power_w;
  const double snr_half = received_power(p_t, 0.5 * d, 0.0, ch) / ch.noise_power_w;
  const Subchannel direct{cfg->bandwidth_hz, snr_d};
  row.capacity_single_bps = capacity(std::span(&direct, 1));
  // Two half-duplex hops share the slot; DaF runs at the weaker hop's rate.
  const Subchannel halfhop{0.5 * cfg->bandwidth_hz, snr_half};
  row.capacity_multi_bps = relay ? capacity(std::span(&halfhop, 1)) : row.capacity_single_bps;
  row.outage_capacity_bps = outage_capacity(cfg->bandwidth_hz, snr_d, p_out);
  std::vector<DbNormal> links(static_cast<std::size_t>(k), {to_db(snr_d), ch.shadowing_sigma_db});
  row.outage_probability = fusion_outage_at(ch.sinr_threshold_db, links);
  return row;
}

MetricsTable sweep_serial(const ValidatedConfig &cfg, const std::string &axis,
                          std::span<const double> values, const SweepOptions &opt) {
  MetricsTable t;
  for (std::size_t i = 0; i < values.size(); ++i) {
    t.push_back(sweep_point(cfg, axis, values[i], opt));
    t.back().index = i;
  }
  return t;
}

MetricsTable sweep(const ValidatedConfig &cfg, const std::string &axis,
                   std::span<const double> values, const SweepOptions &opt) {
  if (std::find(sweep_axes().begin(), sweep_axes().end(), axis) == sweep_axes().end()) {
    throw UnknownAxis(axis);
  }
  MetricsTable t(values.size());
  const long n = static_cast<long>(values.size());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) {
    t[i] = sweep_point(cfg, axis, values[i], opt);
    t[i].index = static_cast<std::size_t>(i);
  }
  return t;
}

std::optional<double> reported_crossover(const MetricsTable &table) {
  for (const auto &r : table) {
    if (r.energy_multi_j_per_bit < r.energy_single_j_per_bit) return r.distance_m;
  }
  return std::nullopt;
}

std::string metrics_csv(const MetricsTable &table) {
  std::ostringstream out;
  out << "index,axis,value,distance_m,energy_single_j_per_bit,energy_multi_j_per_bit,p_es,"
         "p_es_rate,capacity_single_bps,capacity_multi_bps,outage_capacity_bps,"
         "outage_probability,absorption_per_m\n";
  for (const auto &r : table) {
    out << r.index << ',' << r.axis << ',' << format_double(r.value) << ','
        << format_double(r.distance_m) << ',' << format_double(r.energy_single_j_per_bit) << ','
        << format_double(r.energy_multi_j_per_bit) << ',' << format_double(r.p_es) << ','
        << format_double(r.p_es_rate) << ',' << format_double(r.capacity_single_bps) << ','
        << format_double(r.capacity_multi_bps) << ',' << format_double(r.outage_capacity_bps)
        << ',' << format_double(r.outage_probability) << ',' << format_double(r.absorption_per_m)
        << '\n';
  }
  return out.str();
}

}  // namespace nanonet
