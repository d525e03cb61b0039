#include "nanonet/channel.hpp"

#include <cmath>
#include <stdexcept>

#include "nanonet/units.hpp"

namespace nanonet {

namespace {

void require_distance(double d) {
  if (!(d > 0.0)) throw std::domain_error("channel: link distance must be > 0");
}

}  // namespace

double path_gain(double d, const ChannelParams &ch) {
  require_distance(d);
  const double spreading = 4.0 * kPi * ch.frequency_hz * d / ch.speed_of_light_mps;
  return ch.gain * std::pow(d, -ch.path_loss_exponent) * std::exp(-ch.absorption_per_m * d) /
         (spreading * spreading);
}

double received_power(double p_t, double d, double xi_db, const ChannelParams &ch) {
  return p_t * path_gain(d, ch) * from_db(xi_db);
}

double interference_power(std::span<const Interferer> interferers, const ChannelParams &ch) {
  const double c2 = ch.speed_of_light_mps * ch.speed_of_light_mps;
  const double f2 = ch.frequency_hz * ch.frequency_hz;
  double total = 0.0;
  for (const auto &z : interferers) {
    require_distance(z.d);
    total += z.p_t * ch.gain * from_db(z.xi_db) * c2 * std::exp(-ch.absorption_per_m * z.d) /
             (16.0 * kPi * kPi * f2 * std::pow(z.d, ch.path_loss_exponent + 2.0));
  }
  return total;
}

double sinr(double p_rx, double p_i, double n0) { return p_rx / (p_i + n0); }

LinearMoments linear_moments(std::span<const DbNormal> components) {
  LinearMoments m;
  for (const auto &c : components) {
    if (c.std_db < 0.0) throw std::domain_error("lognormal_fit: negative std");
    const double mu = kLn10Over10 * c.mean_db;
    const double s2 = std::pow(kLn10Over10 * c.std_db, 2);
    const double mean = std::exp(mu + 0.5 * s2);
    m.mean += mean;
    m.variance += mean * mean * std::expm1(s2);
  }
  return m;
}

LinearMoments linear_moments(const DbNormal &fit) {
  return linear_moments(std::span<const DbNormal>(&fit, 1));
}

DbNormal lognormal_fit(std::span<const DbNormal> components) {
  if (components.empty()) throw std::invalid_argument("lognormal_fit: empty component list");
  if (components.size() == 1) return components.front();
  const LinearMoments m = linear_moments(components);
  const double s2 = std::log1p(m.variance / (m.mean * m.mean));
  const double mu = std::log(m.mean) - 0.5 * s2;
  return {mu / kLn10Over10, std::sqrt(s2) / kLn10Over10};
}

LinkBudget link_budget(double p_t, double d, std::span<const Interferer> interferers,
                       const ChannelParams &ch) {
  LinkBudget lb;
  lb.p_rx = received_power(p_t, d, 0.0, ch);
  lb.p_interference = interference_power(interferers, ch);
  lb.sinr = sinr(lb.p_rx, lb.p_interference, ch.noise_power_w);

  std::vector<DbNormal> denominator;
  denominator.reserve(interferers.size() + 1);
  denominator.push_back({to_db(ch.noise_power_w), 0.0});
  for (const auto &z : interferers) {
    Interferer mean_path = z;
    mean_path.xi_db = 0.0;
    const double p = interference_power(std::span<const Interferer>(&mean_path, 1), ch);
    denominator.push_back({to_db(p), ch.shadowing_sigma_db});
  }
  const DbNormal den = lognormal_fit(denominator);
  lb.sinr_db_mean = to_db(lb.p_rx) - den.mean_db;
  lb.sinr_db_std = std::hypot(ch.shadowing_sigma_db, den.std_db);
  return lb;
}

double outage_single(double gamma_th_db, double phi_db, double sigma_db) {
  if (sigma_db < 0.0) throw std::domain_error("outage_single: negative sigma");
  if (sigma_db == 0.0) return phi_db < gamma_th_db ? 1.0 : 0.0;
  return normal_cdf((gamma_th_db - phi_db) / sigma_db);
}

double daf_threshold(int n_layers, double rate_bps, double bandwidth_hz) {
  if (!(bandwidth_hz > 0.0)) throw std::domain_error("daf_threshold: bandwidth must be > 0");
  return std::exp2(n_layers * rate_bps / bandwidth_hz) - 1.0;
}

double fusion_outage_at(double threshold_db, std::span<const DbNormal> links) {
  if (links.empty()) throw std::invalid_argument("fusion_outage: no links");
  double p = 1.0;
  for (const auto &l : links) p *= outage_single(threshold_db, l.mean_db, l.std_db);
  return p;
}

double fusion_outage(std::span<const DbNormal> links, int n_layers, double rate_bps,
                     double bandwidth_hz) {
  if (links.empty()) throw std::invalid_argument("fusion_outage: no links");
  const double th = daf_threshold(n_layers, rate_bps, bandwidth_hz);
  if (!(th > 0.0)) return 0.0;
  return fusion_outage_at(to_db(th), links);
}

namespace {

// Whole bits per second. Integers below 2^53 add exactly, so totals do not
// depend on how subchannels are grouped.
double subchannel_capacity(double bandwidth_hz, double gamma) {
  return std::nearbyint(bandwidth_hz * std::log2(1.0 + gamma));
}

}  // namespace

double capacity(std::span<const Subchannel> subchannels) {
  double c = 0.0;
  for (const auto &s : subchannels) c += subchannel_capacity(s.bandwidth_hz, s.gamma);
  return c;
}

double outage_capacity(double bandwidth_hz, double gamma, double p_out) {
  if (p_out < 0.0 || p_out > 1.0) throw std::domain_error("outage_capacity: p_out outside [0,1]");
  return subchannel_capacity(bandwidth_hz, gamma) * (1.0 - p_out);
}

}  // namespace nanonet
