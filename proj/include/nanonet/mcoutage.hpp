#pragma once

#include <cstdint>
#include <stdexcept>
#include <span>
#include <string>
#include <vector>

#include "nanonet/netmodel.hpp"

namespace nanonet {

// Monte Carlo outage for k parallel shadowed links fused at one node.
//
// Each link's SINR in dB is (axis + mean_offset_db) + xi, xi ~ N(0, sigma^2).
// The axis value is the nominal SINR gamma_j; the offset moves the mean so
// the curve can be pinned to a reference point (see calibrate_offset).
struct McRun {
  long trials = 1000000;
  std::vector<int> k_links{1};
  std::vector<double> gamma_axis_db{10.0};
  double tolerance = 1e-6;  // analytic tolerance, kept for the manifest
  std::uint64_t seed = 1;
  double sigma_db = 1.0;
  double threshold_db = 12.0;
  double mean_offset_db = 0.0;
  int batches = 64;  // fixed so results do not depend on the thread count
};

class InvalidRun : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

void check_run(const McRun &run);

struct McPoint {
  int k = 1;
  double gamma_db = 0.0;
  long outages = 0;
  long trials = 0;
  double p_mc = 0.0;
  double p_analytic = 0.0;
  double stderr_mc = 0.0;  // sqrt(p_mc (1 - p_mc) / trials)

  double gamma_linear() const;
  bool operator==(const McPoint &) const = default;
};

/// Rows ordered by k (as given), then axis point. Every k and axis point
/// reuses the same draws, so p_mc is non-increasing in k pointwise.
/// Batch b draws from mt19937_64 seeded with seed_seq{seed, b}; batches run
/// under OpenMP.
std::vector<McPoint> mc_outage(const McRun &run);

/// Single-threaded reference; identical output to mc_outage.
std::vector<McPoint> mc_outage_serial(const McRun &run);

/// max |p_mc - p_analytic|. Throws std::invalid_argument on an empty list.
double mc_vs_analytic_report(std::span<const McPoint> results);

/// |p_mc - p_analytic| <= 3 sqrt(p (1 - p) / trials) with p the analytic value.
bool within_binomial_envelope(const McPoint &pt);

/// Offset making a single link's outage equal `target_p` at `axis_db`.
double calibrate_offset(double target_p, double axis_db, double threshold_db, double sigma_db);

/// Reference point for the fusion curves: a single link at axis 10 has
/// outage 0.12.
inline constexpr double kAnchorAxis = 10.0;
inline constexpr double kAnchorSingleLink = 0.12;

/// Run with channel sigma/threshold from the config, trials and seed from the
/// config, and the offset calibrated to the reference point.
McRun mc_run_from_config(const ValidatedConfig &cfg);

/// k,gamma_dB,gamma_lin,p_mc,p_analytic,stderr
std::string mc_csv(std::span<const McPoint> results);

}  // namespace nanonet
