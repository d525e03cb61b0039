#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "nanonet/clustering.hpp"
#include "nanonet/energy.hpp"
#include "support.hpp"

using namespace nanonet;
using namespace testing_support;

namespace {

ElectionOptions opts(double adv, double emax = 793.8e-12, int rounds = 0) {
  ElectionOptions o;
  o.advert_range = adv;
  o.e_max = emax;
  o.max_rounds = rounds;
  return o;
}

}  // namespace

TEST_CASE("weight is residual over capacity") {
  const double emax = e_nps_max(EnergyParams{});
  CHECK(weight(node_at(1, 0, 0, 0, emax), emax) == 1.0);
  CHECK(weight(node_at(1, 0, 0, 0, 0.0), emax) == 0.0);
  CHECK(weight(node_at(1, 0, 0, 0, 396.9e-12), 793.8e-12) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK_THROWS_AS(weight(node_at(1, 0, 0, 0, 1.0), 0.0), std::domain_error);
}

TEST_CASE("a lone node heads its own cluster") {
  const auto dep = manual_deployment({node_at(1, 1e-3, 0, 0, 1e-10)});
  const auto cl = elect_nccs(dep, opts(5e-3));
  REQUIRE(cl.size() == 1);
  CHECK(cl[0].ncc == 1);
  CHECK(cl[0].members == std::vector<NodeId>{1});
}

TEST_CASE("the stronger of two neighbours wins") {
  const auto dep = manual_deployment({node_at(1, 1e-3, 0, 0, 0.9 * 793.8e-12),
                                      node_at(2, 2e-3, 0, 0, 0.4 * 793.8e-12)});
  const auto cl = elect_nccs(dep, opts(5e-3));
  REQUIRE(cl.size() == 1);
  CHECK(cl[0].ncc == 1);
  CHECK(cl[0].members == std::vector<NodeId>{1, 2});
}

TEST_CASE("equal weights go to the lower id") {
  const auto dep = manual_deployment({node_at(1, 2e-3, 0, 0, 1e-10), node_at(2, 1e-3, 0, 0, 1e-10)});
  const auto cl = elect_nccs(dep, opts(5e-3));
  REQUIRE(cl.size() == 1);
  CHECK(cl[0].ncc == 1);
}

TEST_CASE("nodes out of reach of every head form later rounds, or orphan") {
  // A - B - C on a line, 0.6 advert apart: B is beaten by A, C by B.
  const double adv = 1e-3;
  const auto dep = manual_deployment({node_at(1, 0, 0, 0, 3e-10), node_at(2, 0.6e-3, 0, 0, 2e-10),
                                      node_at(3, 1.2e-3, 0, 0, 1e-10)});
  const auto cl = elect_nccs(dep, opts(adv));
  REQUIRE(cl.size() == 2);
  CHECK(cl[0].ncc == 1);
  CHECK(cl[0].members == std::vector<NodeId>{1, 2});
  CHECK(cl[1].ncc == 3);
  CHECK(check_partition(dep, cl).empty());
  try {
    elect_nccs(dep, opts(adv, 793.8e-12, 1));
    FAIL("expected OrphanNode");
  } catch (const OrphanNode &e) {
    CHECK(e.node() == 3);
  }
}

TEST_CASE("layers never mix") {
  auto dep = manual_deployment({node_at(1, 4e-3, 0, 0, 3e-10, 0), node_at(2, 5.5e-3, 0, 0, 2e-10, 1)});
  const auto cl = elect_nccs(dep, opts(5e-3));
  CHECK(cl.size() == 2);
  CHECK(check_partition(dep, cl).empty());
}

TEST_CASE("seeded deployments are partitioned, with members near their founding head") {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    const auto cfg = config_with(seed);
    Deployment dep = deploy(cfg);
    const auto o = opts(cfg.advert_range(), e_nps_max(cfg->energy));
    const auto cl = elect_nccs(dep, o);
    REQUIRE(check_partition(dep, cl).empty());
    for (const auto &c : cl) {
      CHECK(c.members.front() == c.ncc);
      for (NodeId m : c.members) {
        CHECK(distance(dep.node(m).pos, dep.node(c.ncc).pos) <= o.advert_range);
      }
    }
    // the strongest node of each layer always heads a cluster
    std::map<int, NodeId> best;
    for (const auto &n : dep.nodes) {
      auto it = best.find(n.layer);
      if (it == best.end() || weight(n, o.e_max) > weight(dep.node(it->second), o.e_max) ||
          (weight(n, o.e_max) == weight(dep.node(it->second), o.e_max) && n.id < it->second)) {
        best[n.layer] = n.id;
      }
    }
    std::set<NodeId> heads;
    for (const auto &c : cl) heads.insert(c.ncc);
    for (const auto &[layer, id] : best) CHECK(heads.count(id) == 1);
  }
}

TEST_CASE("election ignores a common energy scale") {
  const auto cfg = config_with(77);
  Deployment dep = deploy(cfg);
  const auto o = opts(cfg.advert_range(), e_nps_max(cfg->energy));
  const auto a = elect_nccs(dep, o);
  for (auto &n : dep.nodes) n.residual_energy *= 0.37;
  const auto b = elect_nccs(dep, o);
  CHECK(a == b);
}

TEST_CASE("rotation follows join order and wraps") {
  Cluster c;
  c.members = {4, 9, 2};
  c.ncc = 4;
  c.info_list = {7, 8};
  c = rotate_ncc(c);
  CHECK(c.ncc == 9);
  CHECK(c.info_list == std::vector<std::uint64_t>{7, 8});
  c = rotate_ncc(c);
  CHECK(c.ncc == 2);
  c = rotate_ncc(c);
  CHECK(c.ncc == 4);

  Cluster single;
  single.members = {5};
  single.ncc = 5;
  CHECK(rotate_ncc(single).ncc == 5);
}

TEST_CASE("|members| rotations return to the start") {
  for (std::size_t n = 1; n < 20; ++n) {
    Cluster c;
    for (std::size_t i = 0; i < n; ++i) c.members.push_back(static_cast<NodeId>(10 + i));
    c.ncc = c.members[n / 2];
    const NodeId start = c.ncc;
    std::set<NodeId> seen;
    for (std::size_t i = 0; i < n; ++i) {
      seen.insert(c.ncc);
      c = rotate_ncc(c);
    }
    CHECK(c.ncc == start);
    CHECK(seen.size() == n);
  }
}

TEST_CASE("apply_clusters sets roles and the csv lists members") {
  auto dep = manual_deployment({node_at(1, 1e-3, 0, 0, 3e-10), node_at(2, 2e-3, 0, 0, 1e-10)});
  const auto cl = elect_nccs(dep, opts(5e-3));
  apply_clusters(dep, cl);
  CHECK(dep.node(1).role == Role::NCC);
  CHECK(dep.node(2).role == Role::NCM);
  CHECK(dep.node(2).cluster == 0);
  CHECK(clusters_csv(cl) == "cluster_id,layer,ncc_id,member_ids\n0,1,1,1;2\n");
}

TEST_CASE("check_partition catches a duplicated member") {
  auto dep = manual_deployment({node_at(1, 1e-3, 0, 0, 3e-10), node_at(2, 2e-3, 0, 0, 1e-10)});
  auto cl = elect_nccs(dep, opts(5e-3));
  cl.push_back(cl[0]);
  cl.back().id = 1;
  CHECK(!check_partition(dep, cl).empty());
}
