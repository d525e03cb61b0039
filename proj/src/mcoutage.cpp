#include "nanonet/mcoutage.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <boost/math/distributions/normal.hpp>

#include "nanonet/channel.hpp"
#include "nanonet/units.hpp"

namespace nanonet {

double McPoint::gamma_linear() const { return from_db(gamma_db); }

void check_run(const McRun &run) {
  if (run.trials < 1) throw InvalidRun("trials must be >= 1");
  if (run.k_links.empty()) throw InvalidRun("k_links must not be empty");
  for (int k : run.k_links) {
    if (k < 1) throw InvalidRun("k_links entries must be >= 1");
  }
  if (run.gamma_axis_db.empty()) throw InvalidRun("gamma axis must not be empty");
  if (run.sigma_db < 0.0) throw InvalidRun("sigma must be >= 0");
  if (run.batches < 1) throw InvalidRun("batches must be >= 1");
}

namespace {

// Trials handled by batch b: an even split, the first batches take the remainder.
long batch_trials(const McRun &run, int b) {
  const long base = run.trials / run.batches;
  const long extra = run.trials % run.batches;
  return base + (b < extra ? 1 : 0);
}

void run_batch(const McRun &run, int b, std::vector<long> &out) {
  const int kmax = *std::max_element(run.k_links.begin(), run.k_links.end());
  const std::size_t na = run.gamma_axis_db.size();
  const std::size_t nk = run.k_links.size();
  // Outage on link y iff xi_y < threshold - mean; all k links fail iff the
  // largest of the first k draws does.
  std::vector<double> margin(na);
  for (std::size_t a = 0; a < na; ++a) {
    margin[a] = run.threshold_db - (run.gamma_axis_db[a] + run.mean_offset_db);
  }
  // seed ^ b would hand neighbouring seeds the same set of streams
  std::seed_seq seq{static_cast<std::uint32_t>(run.seed), static_cast<std::uint32_t>(run.seed >> 32),
                    static_cast<std::uint32_t>(b)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> xi(0.0, 1.0);
  std::vector<double> running_max(kmax);
  const long n = batch_trials(run, b);
  for (long t = 0; t < n; ++t) {
    double m = -INFINITY;
    for (int y = 0; y < kmax; ++y) {
      m = std::max(m, run.sigma_db * xi(rng));
      running_max[y] = m;
    }
    for (std::size_t ki = 0; ki < nk; ++ki) {
      const double mk = running_max[run.k_links[ki] - 1];
      long *row = out.data() + ki * na;
      for (std::size_t a = 0; a < na; ++a) row[a] += mk < margin[a];
    }
  }
}

std::vector<McPoint> assemble(const McRun &run, const std::vector<long> &outages) {
  std::vector<McPoint> pts;
  const std::size_t na = run.gamma_axis_db.size();
  for (std::size_t ki = 0; ki < run.k_links.size(); ++ki) {
    const int k = run.k_links[ki];
    for (std::size_t a = 0; a < na; ++a) {
      McPoint p;
      p.k = k;
      p.gamma_db = run.gamma_axis_db[a];
      p.outages = outages[ki * na + a];
      p.trials = run.trials;
      p.p_mc = static_cast<double>(p.outages) / static_cast<double>(p.trials);
      const std::vector<DbNormal> links(static_cast<std::size_t>(k),
                                        {p.gamma_db + run.mean_offset_db, run.sigma_db});
      p.p_analytic = fusion_outage_at(run.threshold_db, links);
      p.stderr_mc = std::sqrt(p.p_mc * (1.0 - p.p_mc) / static_cast<double>(p.trials));
      pts.push_back(p);
    }
  }
  return pts;
}

}  // namespace

std::vector<McPoint> mc_outage_serial(const McRun &run) {
  check_run(run);
  std::vector<long> total(run.k_links.size() * run.gamma_axis_db.size(), 0);
  for (int b = 0; b < run.batches; ++b) run_batch(run, b, total);
  return assemble(run, total);
}

std::vector<McPoint> mc_outage(const McRun &run) {
  check_run(run);
  const std::size_t cells = run.k_links.size() * run.gamma_axis_db.size();
  std::vector<std::vector<long>> per_batch(run.batches, std::vector<long>(cells, 0));
#pragma omp parallel for schedule(dynamic)
  for (int b = 0; b < run.batches; ++b) run_batch(run, b, per_batch[b]);
  std::vector<long> total(cells, 0);
  for (const auto &c : per_batch) {
    for (std::size_t i = 0; i < cells; ++i) total[i] += c[i];
  }
  return assemble(run, total);
}

double mc_vs_analytic_report(std::span<const McPoint> results) {
  if (results.empty()) throw std::invalid_argument("mc_vs_analytic_report: no results");
  double worst = 0.0;
  for (const auto &r : results) worst = std::max(worst, std::abs(r.p_mc - r.p_analytic));
  return worst;
}

bool within_binomial_envelope(const McPoint &pt) {
  const double p = pt.p_analytic;
  const double bound = 3.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(pt.trials));
  return std::abs(pt.p_mc - p) <= bound;
}

double calibrate_offset(double target_p, double axis_db, double threshold_db, double sigma_db) {
  if (!(target_p > 0.0 && target_p < 1.0)) {
    throw std::invalid_argument("calibrate_offset: target must lie in (0, 1)");
  }
  if (!(sigma_db > 0.0)) throw std::invalid_argument("calibrate_offset: sigma must be > 0");
  // target = Phi((th - axis - offset) / sigma)
  const double z = boost::math::quantile(boost::math::normal(), target_p);
  return threshold_db - axis_db - sigma_db * z;
}

McRun mc_run_from_config(const ValidatedConfig &cfg) {
  McRun run;
  run.trials = cfg->trials;
  run.seed = cfg->seed;
  run.tolerance = cfg->analytic_tolerance;
  run.sigma_db = cfg->channel.shadowing_sigma_db;
  run.threshold_db = cfg->channel.sinr_threshold_db;
  run.k_links = {1, 2, 4};
  run.gamma_axis_db.clear();
  for (int g = 0; g <= 20; ++g) run.gamma_axis_db.push_back(g);
  run.mean_offset_db = run.sigma_db > 0.0
                           ? calibrate_offset(kAnchorSingleLink, kAnchorAxis, run.threshold_db,
                                              run.sigma_db)
                           : 0.0;
  return run;
}

std::string mc_csv(std::span<const McPoint> results) {
  std::ostringstream out;
  out << "k,gamma_dB,gamma_lin,p_mc,p_analytic,stderr\n";
  for (const auto &r : results) {
    out << r.k << ',' << format_double(r.gamma_db) << ',' << format_double(r.gamma_linear())
        << ',' << format_double(r.p_mc) << ',' << format_double(r.p_analytic) << ','
        << format_double(r.stderr_mc) << '\n';
  }
  return out.str();
}

}  // namespace nanonet
