#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nanonet/netmodel.hpp"

namespace nanonet {

// Charging curve of the nano power source -----------------------------------

/// Voltage after `beta_cycles` harvesting cycles, V_g (1 - exp(-b dQ / (V_g C))).
double v_nps(double beta_cycles, const EnergyParams &p);

/// Energy stored after `beta_cycles` cycles, 0.5 C v_nps^2.
double e_nps(double beta_cycles, const EnergyParams &p);

/// Storage limit 0.5 C V_g^2.
double e_nps_max(const EnergyParams &p);

/// Cycles needed to charge from empty to `energy`. Throws std::domain_error
/// for energy < 0 or energy >= e_nps_max (the logarithm diverges).
long cycles_to_energy(double energy, const EnergyParams &p);

/// Real-valued inverse of e_nps, used for incremental charging.
double cycles_equivalent(double energy, const EnergyParams &p);

/// Energy after harvesting for `cycles` more cycles starting at `energy`,
/// saturating at the storage limit.
double charge(double energy, double cycles, const EnergyParams &p);

/// Index u of the highest chain state with E_u <= energy, clamped to [0, beta].
int energy_state_of(double energy, const EnergyParams &p);

// Markov chain over energy states --------------------------------------------

/// Number of states above S_0: floor((E_max - E_min) / E_tx).
int chain_beta(const EnergyParams &p);

/// Harvesting rate in J/s when charging from `e_now` by `delta_e`:
/// (beta dE / tau) / (beta(e_now + dE) - beta(e_now)), beta the chain's state
/// bound. A zero cycle difference is clamped to one cycle.
double harvest_rate(double e_now, double delta_e, const EnergyParams &p);

struct EnergyChain {
  int beta = 0;
  std::vector<double> energies;  // E_u, u = 0..beta
  std::vector<double> rates_h;   // lambda_u^H, u = 0..beta-1
  std::vector<double> rates_c;   // lambda_u^C, u = 1..beta (index u-1)
  Eigen::MatrixXd generator;     // (beta+1)^2, rows sum to zero

  int states() const { return beta + 1; }
};

class InvalidParams : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ReducibleChain : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Chain with harvest rates from harvest_rate() and a constant consumption
/// rate lambda_x^C / E_tx. Throws InvalidParams if fewer than two states fit.
EnergyChain build_chain(const EnergyParams &p, double consume_rate_w);

/// Assembles a birth-death chain from explicit rates. Used for analysis of
/// arbitrary chains; rates_h.size() must equal rates_c.size().
EnergyChain chain_from_rates(std::vector<double> rates_h, std::vector<double> rates_c);

/// Solves pi * Omega = 0 with sum(pi) = 1 by dense GTH elimination. Throws
/// ReducibleChain when a neighbouring rate is zero.
Eigen::VectorXd stationary_distribution(const EnergyChain &chain);

/// u,E_u,lambda_h,lambda_c,pi_u
std::string chain_csv(const EnergyChain &chain, const Eigen::VectorXd &pi);

// Multihop energy saving -------------------------------------------------------

/// 1 - exp(-theta (e_sr + e_rd)).
double p_es(double e_sr, double e_rd, double theta);

/// theta exp(-theta (e_sr + e_rd)).
double p_es_rate(double e_sr, double e_rd, double theta);

}  // namespace nanonet
