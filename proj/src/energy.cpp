#include "nanonet/energy.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace nanonet {

namespace {

// V_g C / dQ, the cycle constant of the charging curve (630 for the
// default power source).
double cycle_constant(const EnergyParams &p) { return p.v_g_v * p.c_nps_f / p.delta_q_c; }

}  // namespace

double v_nps(double beta_cycles, const EnergyParams &p) {
  if (beta_cycles < 0.0) throw std::domain_error("v_nps: negative cycle count");
  return p.v_g_v * (1.0 - std::exp(-beta_cycles / cycle_constant(p)));
}

double e_nps(double beta_cycles, const EnergyParams &p) {
  const double v = v_nps(beta_cycles, p);
  return 0.5 * p.c_nps_f * v * v;
}

double e_nps_max(const EnergyParams &p) { return 0.5 * p.c_nps_f * p.v_g_v * p.v_g_v; }

double cycles_equivalent(double energy, const EnergyParams &p) {
  const double e_max = e_nps_max(p);
  if (energy < 0.0 || energy >= e_max) {
    throw std::domain_error("cycles_to_energy: energy must lie in [0, E_max)");
  }
  return -cycle_constant(p) * std::log1p(-std::sqrt(energy / e_max));
}

long cycles_to_energy(double energy, const EnergyParams &p) {
  const double x = cycles_equivalent(energy, p);
  // Absorb rounding so an energy reached after exactly n cycles maps back to n.
  return static_cast<long>(std::ceil(x - 1e-9 * std::max(1.0, x)));
}

double charge(double energy, double cycles, const EnergyParams &p) {
  const double e_max = e_nps_max(p);
  if (energy >= e_max) return e_max;
  const double start = cycles_equivalent(std::max(0.0, energy), p);
  return std::min(e_max, std::max(energy, e_nps(start + cycles, p)));
}

int chain_beta(const EnergyParams &p) {
  return static_cast<int>(std::floor((e_nps_max(p) - p.e_min_j) / p.e_tx_j));
}

int energy_state_of(double energy, const EnergyParams &p) {
  if (energy <= p.e_min_j) return 0;
  const int u = static_cast<int>(std::floor((energy - p.e_min_j) / p.e_tx_j));
  return std::clamp(u, 0, std::max(0, chain_beta(p)));
}

double harvest_rate(double e_now, double delta_e, const EnergyParams &p) {
  if (!(delta_e > 0.0)) throw std::domain_error("harvest_rate: delta_e must be > 0");
  const double e_max = e_nps_max(p);
  if (e_now < 0.0 || e_now + delta_e > e_max) {
    throw std::domain_error("harvest_rate: e_now + delta_e exceeds E_max");
  }
  // The top state may sit on E_max exactly, where the cycle count diverges;
  // step back by one ulp so the last transition stays finite.
  const double target = std::min(e_now + delta_e, std::nextafter(e_max, 0.0));
  long cycles = cycles_to_energy(target, p) - cycles_to_energy(e_now, p);
  if (cycles < 1) cycles = 1;
  const double beta = std::max(1, chain_beta(p));
  return beta * delta_e / p.tau_s / static_cast<double>(cycles);
}

EnergyChain chain_from_rates(std::vector<double> rates_h, std::vector<double> rates_c) {
  if (rates_h.size() != rates_c.size() || rates_h.empty()) {
    throw InvalidParams("chain needs equal, non-empty up and down rate lists");
  }
  EnergyChain ch;
  ch.beta = static_cast<int>(rates_h.size());
  ch.rates_h = std::move(rates_h);
  ch.rates_c = std::move(rates_c);
  const int n = ch.states();
  ch.generator = Eigen::MatrixXd::Zero(n, n);
  for (int u = 0; u < ch.beta; ++u) ch.generator(u, u + 1) = ch.rates_h[u];
  for (int u = 1; u <= ch.beta; ++u) ch.generator(u, u - 1) = ch.rates_c[u - 1];
  for (int u = 0; u < n; ++u) ch.generator(u, u) = -ch.generator.row(u).sum();
  return ch;
}

EnergyChain build_chain(const EnergyParams &p, double consume_rate_w) {
  if (!(p.e_tx_j > 0.0)) throw InvalidParams("build_chain: E_tx must be > 0");
  const int beta = chain_beta(p);
  if (beta < 1) throw InvalidParams("build_chain: fewer than two energy states fit");
  std::vector<double> up(beta), down(beta);
  for (int u = 0; u < beta; ++u) {
    const double e_u = p.e_min_j + u * p.e_tx_j;
    up[u] = harvest_rate(e_u, p.e_tx_j, p) / p.e_tx_j;
    down[u] = consume_rate_w / p.e_tx_j;
  }
  EnergyChain ch = chain_from_rates(std::move(up), std::move(down));
  ch.energies.resize(beta + 1);
  for (int u = 0; u <= beta; ++u) ch.energies[u] = p.e_min_j + u * p.e_tx_j;
  return ch;
}

Eigen::VectorXd stationary_distribution(const EnergyChain &chain) {
  for (double r : chain.rates_h) {
    if (!(r > 0.0)) throw ReducibleChain("stationary_distribution: zero harvesting rate");
  }
  for (double r : chain.rates_c) {
    if (!(r > 0.0)) throw ReducibleChain("stationary_distribution: zero consumption rate");
  }
  const int n = chain.states();
  // GTH elimination: Gaussian elimination on the off-diagonal rates with the
  // pivots formed as row sums, so nothing is ever subtracted. Entries of pi
  // span many decades and an LU solve of pi Omega = 0 loses them at
  // cond(Omega) * eps; this stays accurate componentwise.
  Eigen::MatrixXd q = chain.generator;
  for (int k = n - 1; k > 0; --k) {
    const double s = q.row(k).head(k).sum();
    q.col(k).head(k) /= s;
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j) {
        if (i != j) q(i, j) += q(i, k) * q(k, j);
      }
    }
  }
  Eigen::VectorXd pi(n);
  pi(0) = 1.0;
  for (int k = 1; k < n; ++k) pi(k) = pi.head(k).dot(q.col(k).head(k));
  return pi / pi.sum();
}

std::string chain_csv(const EnergyChain &chain, const Eigen::VectorXd &pi) {
  std::ostringstream out;
  out << "u,E_u,lambda_h,lambda_c,pi_u\n";
  for (int u = 0; u < chain.states(); ++u) {
    const double e = u < static_cast<int>(chain.energies.size()) ? chain.energies[u] : 0.0;
    const double h = u < chain.beta ? chain.rates_h[u] : 0.0;
    const double c = u > 0 ? chain.rates_c[u - 1] : 0.0;
    out << u << ',' << format_double(e) << ',' << format_double(h) << ',' << format_double(c)
        << ',' << format_double(pi(u)) << '\n';
  }
  return out.str();
}

double p_es(double e_sr, double e_rd, double theta) {
  return -std::expm1(-theta * (e_sr + e_rd));
}

double p_es_rate(double e_sr, double e_rd, double theta) {
  return theta * std::exp(-theta * (e_sr + e_rd));
}

}  // namespace nanonet
