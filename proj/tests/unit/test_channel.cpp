#include <doctest.h>

#include <cmath>
#include <random>

#include "nanonet/channel.hpp"
#include "nanonet/units.hpp"
#include "oracles.hpp"

using namespace nanonet;

namespace {

ChannelParams bare() {
  ChannelParams ch;
  ch.gain = 1.0;
  ch.path_loss_exponent = 0.0;
  ch.absorption_per_m = 0.0;
  ch.speed_of_light_mps = 3e8;
  return ch;
}

}  // namespace

TEST_CASE("spreading loss at 1 THz over 10 mm") {
  // (4 pi 1e12 0.01 / 3e8)^-2 = 418.879^-2
  CHECK(received_power(1.0, 0.01, 0.0, bare()) == doctest::Approx(5.70e-6).epsilon(1e-3));
  CHECK(received_power(1.0, 0.01, 0.0, bare()) == doctest::Approx(5.699e-6).epsilon(2e-4));
}

TEST_CASE("shadowing, distance and absorption scale as expected") {
  ChannelParams ch;
  const double p = received_power(1.0, 3e-3, 0.0, ch);
  CHECK(received_power(1.0, 3e-3, 10.0, ch) == doctest::Approx(10 * p).epsilon(1e-13));
  CHECK(received_power(1.0, 6e-3, 0.0, ch) == doctest::Approx(p / 32).epsilon(1e-13));
  ch.absorption_per_m = 50.0;
  CHECK(received_power(1.0, 3e-3, 0.0, ch) == doctest::Approx(p * std::exp(-0.15)).epsilon(1e-13));
  CHECK_THROWS_AS(received_power(1.0, 0.0, 0.0, ch), std::domain_error);
}

TEST_CASE("interference") {
  ChannelParams ch;
  CHECK(interference_power({}, ch) == 0.0);
  const Interferer one{0.3, 4e-3, 2.0};
  CHECK(interference_power(std::span(&one, 1), ch) ==
        doctest::Approx(received_power(0.3, 4e-3, 2.0, ch)).epsilon(1e-12));
  const std::vector<Interferer> two{one, one};
  CHECK(interference_power(two, ch) ==
        doctest::Approx(2 * received_power(0.3, 4e-3, 2.0, ch)).epsilon(1e-12));
}

TEST_CASE("sinr") {
  CHECK(sinr(2.0, 0.0, 0.5) == 4.0);
  CHECK(sinr(0.0, 1.0, 1.0) == 0.0);
  CHECK(sinr(1.0, 1.0, 1.0) == 0.5);
}

TEST_CASE("Fenton-Wilkinson degenerate cases") {
  const DbNormal a{3.0, 4.0};
  const auto one = lognormal_fit(std::span(&a, 1));
  CHECK(one.mean_db == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(one.std_db == doctest::Approx(4.0).epsilon(1e-12));
  const std::vector<DbNormal> det{{5.0, 0.0}, {5.0, 0.0}};
  const auto two = lognormal_fit(det);
  CHECK(two.mean_db == doctest::Approx(5.0 + 10 * std::log10(2.0)).epsilon(1e-12));
  CHECK(two.std_db == doctest::Approx(0.0));
}

TEST_CASE("Fenton-Wilkinson preserves the first two moments exactly") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> mu(-20, 20), sd(0, 8);
  for (int t = 0; t < 500; ++t) {
    std::vector<DbNormal> c(1 + rng() % 8);
    for (auto &x : c) x = {mu(rng), sd(rng)};
    const auto m = linear_moments(c);
    const auto f = linear_moments(lognormal_fit(c));
    CHECK(f.mean == doctest::Approx(m.mean).epsilon(1e-10));
    CHECK(f.variance == doctest::Approx(m.variance).epsilon(1e-9));
  }
}

TEST_CASE("Fenton-Wilkinson against sampled sums of two 6 dB components") {
  const std::vector<DbNormal> c{{0.0, 6.0}, {0.0, 6.0}};
  const auto fit = lognormal_fit(c);
  const auto s = oracle::sampled_sum_moments({{0.0, 6.0}, {0.0, 6.0}}, 1000000, 17);
  // dB-domain parameters implied by the sampled moments
  const double sl2 = std::log(1 + s.variance / (s.mean * s.mean));
  const double mu_ln = std::log(s.mean) - sl2 / 2;
  const double k = 10 / std::log(10.0);
  CHECK(std::abs(fit.mean_db - k * mu_ln) <= 0.1);
  CHECK(std::abs(fit.std_db - k * std::sqrt(sl2)) <= 0.1);
}

TEST_CASE("link budget without interference") {
  ChannelParams ch;
  const double p = received_power(0.5, 4e-3, 0.0, ch);
  const auto lb = link_budget(0.5, 4e-3, {}, ch);
  CHECK(lb.p_interference == 0.0);
  CHECK(lb.sinr == doctest::Approx(p / ch.noise_power_w).epsilon(1e-12));
  CHECK(lb.sinr_db_mean == doctest::Approx(to_db(p / ch.noise_power_w)).epsilon(1e-12));
  CHECK(lb.sinr_db_std == doctest::Approx(ch.shadowing_sigma_db).epsilon(1e-12));
}

TEST_CASE("link budget with interferers widens the spread") {
  ChannelParams ch;
  ch.shadowing_sigma_db = 4.0;
  const std::vector<Interferer> intf{{0.5, 3e-3, 0.0}, {0.5, 5e-3, 0.0}};
  const auto lb = link_budget(0.5, 4e-3, intf, ch);
  CHECK(lb.p_interference > 0);
  CHECK(lb.sinr_db_std > 4.0);
  CHECK(lb.sinr < received_power(0.5, 4e-3, 0.0, ch) / ch.noise_power_w);
}

TEST_CASE("single-link outage is the lower tail") {
  CHECK(outage_single(12, 12, 1) == doctest::Approx(0.5));
  CHECK(outage_single(12, 13, 1) == doctest::Approx(0.1587).epsilon(1e-3));
  CHECK(outage_single(12, 11, 1) == doctest::Approx(0.8413).epsilon(1e-3));
  CHECK(outage_single(12, 13, 0) == 0.0);
  CHECK(outage_single(12, 11, 0) == 1.0);
  CHECK(outage_single(0, 60, 2) < 1e-100);
  CHECK(outage_single(0, -60, 2) == 1.0);
  double prev = 2;
  for (double phi = -30; phi <= 30; phi += 0.25) {
    const double p = outage_single(0, phi, 3.0);
    CHECK(p <= prev);
    CHECK(p == doctest::Approx(oracle::normal_cdf(-phi / 3.0)).epsilon(1e-12));
    prev = p;
  }
}

TEST_CASE("decode-and-forward threshold") {
  CHECK(daf_threshold(1, 1e12, 1e12) == doctest::Approx(1.0));
  CHECK(daf_threshold(2, 1e12, 1e12) == doctest::Approx(3.0));
  CHECK(daf_threshold(1, 0, 1e12) == 0.0);
  const DbNormal l{2.0, 1.5};
  CHECK(fusion_outage(std::span(&l, 1), 2, 1e12, 1e12) ==
        doctest::Approx(outage_single(to_db(3.0), 2.0, 1.5)).epsilon(1e-14));
  CHECK(fusion_outage(std::span(&l, 1), 1, 0.0, 1e12) == 0.0);
}

TEST_CASE("fusion over identical links follows the power law and falls with k") {
  const DbNormal l{13.0, 1.0};
  const double p1 = fusion_outage_at(12, std::span(&l, 1));
  double prev = 1;
  for (int k = 1; k <= 12; ++k) {
    const std::vector<DbNormal> links(k, l);
    const double pk = fusion_outage_at(12, links);
    CHECK(std::abs(pk - std::pow(p1, k)) <= 1e-12 * std::pow(p1, k));
    CHECK(pk < prev);
    prev = pk;
  }
}

TEST_CASE("fusion never exceeds its best link") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> mu(0, 25), sd(0.1, 6);
  for (int t = 0; t < 1000; ++t) {
    std::vector<DbNormal> links(1 + rng() % 6);
    double best = 1;
    for (auto &x : links) {
      x = {mu(rng), sd(rng)};
      best = std::min(best, outage_single(12, x.mean_db, x.std_db));
    }
    CHECK(fusion_outage_at(12, links) <= best);
  }
}

TEST_CASE("capacity") {
  CHECK(capacity(std::vector<Subchannel>{{1, 0}, {5, 0}}) == 0.0);
  CHECK(capacity(std::vector<Subchannel>{{1, 1}}) == doctest::Approx(1.0));
  CHECK(capacity(std::vector<Subchannel>{{1, 3}}) == doctest::Approx(2.0));
  const std::vector<Subchannel> a{{1e9, 3.2}, {2e9, 0.7}}, b{{5e8, 40.0}};
  std::vector<Subchannel> ab = a;
  ab.insert(ab.end(), b.begin(), b.end());
  CHECK(capacity(ab) == capacity(a) + capacity(b));
}

TEST_CASE("outage capacity") {
  const Subchannel s{1e12, 15.0};
  CHECK(outage_capacity(1e12, 15.0, 0.1) == 0.9 * capacity(std::span(&s, 1)));
  CHECK(outage_capacity(1e12, 15.0, 0.0) == capacity(std::span(&s, 1)));
  CHECK(outage_capacity(1e12, 15.0, 1.0) == 0.0);
  CHECK_THROWS_AS(outage_capacity(1e12, 15.0, 1.5), std::domain_error);
}
