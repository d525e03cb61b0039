#pragma once

#include <span>
#include <vector>

#include "nanonet/netmodel.hpp"

namespace nanonet {

/// Mean and standard deviation of a quantity that is normal in dB.
struct DbNormal {
  double mean_db = 0.0;
  double std_db = 0.0;

  bool operator==(const DbNormal &) const = default;
};

struct LinkBudget {
  double p_rx = 0.0;            // W
  double p_interference = 0.0;  // W
  double sinr = 0.0;            // linear
  double sinr_db_mean = 0.0;    // phi_j
  double sinr_db_std = 0.0;     // sigma_j
};

struct Interferer {
  double p_t = 0.0;    // W
  double d = 0.0;      // m
  double xi_db = 0.0;  // shadowing sample
};

/// Deterministic path gain G d^-eta e^{-K d} (4 pi f d / c)^-2, no shadowing.
double path_gain(double d, const ChannelParams &ch);

/// Received power with molecular absorption, spreading loss and a shadowing
/// sample xi (dB). Throws std::domain_error for d <= 0.
double received_power(double p_t, double d, double xi_db, const ChannelParams &ch);

/// Sum of interfering received powers, written in the c^2 / (16 pi^2 f^2
/// d^(eta+2)) form.
double interference_power(std::span<const Interferer> interferers, const ChannelParams &ch);

double sinr(double p_rx, double p_i, double n0);

/// Fenton-Wilkinson fit: moment-matched lognormal for a sum of independent
/// lognormal components, each given as a dB-domain normal.
DbNormal lognormal_fit(std::span<const DbNormal> components);

/// Linear-domain mean and variance of a sum of independent lognormals.
struct LinearMoments {
  double mean = 0.0;
  double variance = 0.0;
};
LinearMoments linear_moments(std::span<const DbNormal> components);
LinearMoments linear_moments(const DbNormal &fit);

/// SINR distribution of a link whose signal and interferers are shadowed
/// with the channel sigma. Noise enters as a zero-variance component.
LinkBudget link_budget(double p_t, double d, std::span<const Interferer> interferers,
                       const ChannelParams &ch);

/// P(gamma < gamma_th): the lower-tail normal CDF in dB. With sigma = 0 the
/// result is the step 1{phi < gamma_th}.
double outage_single(double gamma_th_db, double phi_db, double sigma_db);

/// Decode-and-forward threshold 2^(nC/B) - 1 (linear).
double daf_threshold(int n_layers, double rate_bps, double bandwidth_hz);

/// Product of per-link outage factors at a threshold given in dB.
double fusion_outage_at(double threshold_db, std::span<const DbNormal> links);

/// Product over links of P(gamma_y < 2^(nC/B) - 1). A non-positive linear
/// threshold gives 0.
double fusion_outage(std::span<const DbNormal> links, int n_layers, double rate_bps,
                     double bandwidth_hz);

struct Subchannel {
  double bandwidth_hz = 0.0;
  double gamma = 0.0;
};

/// Sum of B_i log2(1 + gamma_i), each term rounded to whole bits per second.
double capacity(std::span<const Subchannel> subchannels);

/// B log2(1 + gamma) (1 - p_out), the capacity rounded as in capacity().
double outage_capacity(double bandwidth_hz, double gamma, double p_out);

}  // namespace nanonet
