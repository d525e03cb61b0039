#include <doctest.h>

#include <cmath>
#include <random>

#include "nanonet/energy.hpp"
#include "oracles.hpp"

using namespace nanonet;

TEST_CASE("storage limit with the reference parameters") {
  EnergyParams p;
  CHECK(e_nps_max(p) == doctest::Approx(793.8e-12).epsilon(1e-9));
  EnergyParams q = p;
  q.v_g_v *= 2;
  CHECK(e_nps_max(q) == doctest::Approx(4 * e_nps_max(p)).epsilon(1e-15));
  q = p;
  q.c_nps_f = 0.0;
  CHECK(e_nps_max(q) == 0.0);
}

TEST_CASE("charging voltage") {
  EnergyParams p;
  CHECK(v_nps(0, p) == 0.0);
  // 630 = V_g C / dQ; half the generator voltage after 630 ln 2 cycles
  CHECK(v_nps(630.0 * std::log(2.0), p) == doctest::Approx(0.21).epsilon(1e-12));
  for (double b : {1e5, 3e5, 1e7}) CHECK(std::abs(v_nps(b, p) - 0.42) <= 1e-6);
  double prev = -1;
  for (int b = 0; b < 5000; b += 7) {
    const double v = v_nps(b, p);
    CHECK(v > prev);
    CHECK(v <= 0.42);
    CHECK(e_nps(b, p) == doctest::Approx(0.5 * 9e-9 * v * v).epsilon(1e-14));
    prev = v;
  }
}

TEST_CASE("cycles to energy") {
  EnergyParams p;
  const double emax = e_nps_max(p);
  CHECK(cycles_to_energy(0.0, p) == 0);
  // ceil(630 ln 2) = ceil(436.68) = 437
  CHECK(cycles_to_energy(emax / 4, p) == 437);
  CHECK_THROWS_AS(cycles_to_energy(emax, p), std::domain_error);
  CHECK_THROWS_AS(cycles_to_energy(-1e-15, p), std::domain_error);
}

TEST_CASE("cycles_to_energy is a left inverse of the charging curve") {
  EnergyParams p;
  const double emax = e_nps_max(p);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 0.999);
  for (int i = 0; i < 5000; ++i) {
    const double e = u(rng) * emax;
    const long b = cycles_to_energy(e, p);
    CHECK(e_nps(static_cast<double>(b), p) >= e * (1 - 1e-9));
    if (b > 0) CHECK(e_nps(static_cast<double>(b - 1), p) < e);
  }
}

TEST_CASE("charge saturates and composes") {
  EnergyParams p;
  const double emax = e_nps_max(p);
  CHECK(charge(0.0, 0.0, p) == 0.0);
  CHECK(charge(0.2 * emax, 1e9, p) == doctest::Approx(emax));
  const double a = charge(charge(0.1 * emax, 50, p), 70, p);
  const double b = charge(0.1 * emax, 120, p);
  CHECK(a == doctest::Approx(b).epsilon(1e-12));
}

TEST_CASE("harvest rate") {
  EnergyParams p;
  const double emax = e_nps_max(p);
  const double d = 10e-12;
  // dE per cycle goes as (1 - e^-x) e^-x: slow from empty, fastest at E_max/4
  const double r0 = harvest_rate(0.0, d, p);
  const double rq = harvest_rate(emax / 4 - d / 2, d, p);
  const double r1 = harvest_rate(emax / 2, d, p);
  const double r2 = harvest_rate(0.9 * emax, d, p);
  CHECK(r0 > 0);
  CHECK(rq > r0);
  CHECK(rq > r1);
  CHECK(r1 > r2);
  EnergyParams slow = p;
  slow.tau_s *= 2;
  CHECK(harvest_rate(emax / 2, d, slow) == doctest::Approx(r1 / 2).epsilon(1e-14));
  CHECK_THROWS_AS(harvest_rate(0.0, 0.0, p), std::domain_error);
  CHECK_THROWS_AS(harvest_rate(emax, d, p), std::domain_error);
}

TEST_CASE("chain for the reference parameters") {
  EnergyParams p;
  CHECK(chain_beta(p) == 7);  // floor(793.8 / 100)
  const EnergyChain c = build_chain(p, 1e-9);
  CHECK(c.states() == 8);
  const auto &g = c.generator;
  for (int i = 0; i < c.states(); ++i) {
    double row = 0, biggest = 0;
    for (int j = 0; j < c.states(); ++j) {
      row += g(i, j);
      biggest = std::max(biggest, std::abs(g(i, j)));
      if (i != j) CHECK(g(i, j) >= 0);
      if (std::abs(i - j) > 1) CHECK(g(i, j) == 0);
    }
    CHECK(std::abs(row) <= 1e-12 * biggest);
  }
  for (int u = 0; u < c.beta; ++u) CHECK(c.rates_c[u] == doctest::Approx(1e-9 / 100e-12));
}

TEST_CASE("minimal chain") {
  EnergyParams p;
  p.e_tx_j = 500e-12;
  const EnergyChain c = build_chain(p, 1e-9);
  CHECK(c.states() == 2);
  const auto pi = stationary_distribution(c);
  const double h = c.rates_h[0], k = c.rates_c[0];
  CHECK(pi(0) == doctest::Approx(k / (h + k)).epsilon(1e-13));
  CHECK(pi(1) == doctest::Approx(h / (h + k)).epsilon(1e-13));
  p.e_tx_j = 800e-12;
  CHECK_THROWS_AS(build_chain(p, 1e-9), InvalidParams);
}

TEST_CASE("symmetric rates give a uniform law") {
  const auto c = chain_from_rates(std::vector<double>(9, 2.5), std::vector<double>(9, 2.5));
  const auto pi = stationary_distribution(c);
  for (int i = 0; i < 10; ++i) CHECK(pi(i) == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("linear solve agrees with detailed balance") {
  std::mt19937_64 rng(2024);
  for (int t = 0; t < 200; ++t) {
    const int n = 2 + static_cast<int>(rng() % 60);
    auto [h, c] = oracle::random_rates(rng, n - 1);
    const auto pi = stationary_distribution(chain_from_rates(h, c));
    const auto ref = oracle::detailed_balance(h, c);
    for (int i = 0; i < n; ++i) CHECK(std::abs(pi(i) - ref[i]) <= 1e-10);
  }
}

TEST_CASE("stationary law matches a simulated trajectory") {
  std::mt19937_64 rng(99);
  auto [h, c] = oracle::random_rates(rng, 7);
  const auto pi = stationary_distribution(chain_from_rates(h, c));
  const auto occ = oracle::trajectory_occupancy(h, c, 1000000, 7);
  double tv = 0;
  for (int i = 0; i < 8; ++i) tv += 0.5 * std::abs(pi(i) - occ[i]);
  CHECK(tv < 0.01);
}

TEST_CASE("a zero rate makes the chain reducible") {
  const auto c = chain_from_rates({1.0, 0.0}, {1.0, 1.0});
  CHECK_THROWS_AS(stationary_distribution(c), ReducibleChain);
  CHECK_THROWS_AS(chain_from_rates({1.0}, {}), InvalidParams);
}

TEST_CASE("energy-saving probability") {
  const double theta = 1e12;
  CHECK(p_es(0, 0, theta) == 0.0);
  CHECK(p_es(1, 1, theta) == doctest::Approx(1.0));
  CHECK(p_es(std::log(2.0) / theta / 2, std::log(2.0) / theta / 2, theta) ==
        doctest::Approx(0.5).epsilon(1e-14));
  CHECK(p_es_rate(0, 0, theta) == theta);
  double prev_rate = INFINITY, prev_p = -1;
  for (int i = 0; i < 400; ++i) {
    const double e = i * 1e-14;
    const double p = p_es(e, e, theta), r = p_es_rate(e, e, theta);
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
    CHECK(p > prev_p);
    CHECK(r < prev_rate);
    CHECK(r == doctest::Approx(theta * (1 - p)).epsilon(1e-12));
    prev_p = p;
    prev_rate = r;
  }
}

TEST_CASE("p_es_rate is the derivative of p_es in the total energy") {
  const double theta = 3e14;
  for (double s : {1e-16, 1e-15, 4e-15, 1e-14}) {
    const double h = s * 1e-4;
    const double fd = (p_es(s + h, 0, theta) - p_es(s - h, 0, theta)) / (2 * h);
    CHECK(std::abs(fd - p_es_rate(s, 0, theta)) <= 1e-6 * p_es_rate(s, 0, theta));
  }
}
