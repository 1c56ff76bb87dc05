#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>

#include "ctails/degree_reduction.hpp"

using namespace ctails;

namespace {

// Independent restatement of the five deletion rules, evaluated naively.
std::vector<int> oracle_removable(const Subgraph& g) {
  const ChimeraGraph& parent = g.parent();
  const int dmax = g.max_degree();
  auto deg_pair = [&](const Edge& e) {
    int du = g.degree(e.u), dv = g.degree(e.v);
    if (du < dv) std::swap(du, dv);
    return std::pair<int, int>(du, dv);
  };
  std::vector<int> out;
  for (int e = 0; e < parent.num_edges(); ++e) {
    if (!g.edge_active(e)) continue;
    auto [du, dv] = deg_pair(parent.edges()[e]);
    if (du != dmax) continue;  // rule 1
    bool dominated = false;    // rule 2: some edge pairs a max-degree qubit
                               // with a strictly higher-degree partner
    for (int e2 = 0; e2 < parent.num_edges() && !dominated; ++e2) {
      if (!g.edge_active(e2)) continue;
      auto [du2, dv2] = deg_pair(parent.edges()[e2]);
      if (du2 >= du && dv2 > dv) dominated = true;
    }
    if (dominated) continue;
    if (parent.is_intercell(e)) {  // rule 3
      if (du != dv) continue;
      bool intra_at_max = false;
      for (int e2 = 0; e2 < parent.num_edges() && !intra_at_max; ++e2) {
        if (!g.edge_active(e2) || parent.is_intercell(e2)) continue;
        auto [du2, dv2] = deg_pair(parent.edges()[e2]);
        if (du2 == dmax && dv2 == dmax) intra_at_max = true;
      }
      if (intra_at_max) continue;
    }
    if (dv < 3) continue;  // rule 4
    if (!g.connected(e)) continue;  // rule 5
    out.push_back(e);
  }
  return out;
}

}  // namespace

TEST_CASE("on a pristine C_1 every intra-cell edge is removable") {
  auto g = std::make_shared<ChimeraGraph>(1);
  Subgraph sub(g);
  CHECK(removable_edges(sub, 3).size() == 16);
}

TEST_CASE("removable_edges matches the naive rule oracle on random partial graphs") {
  auto g = std::make_shared<ChimeraGraph>(2);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(derive_seed(7, seed, "oracle"));
    Subgraph sub(g);
    // Walk a few random legal removals to land in a representative state.
    int steps = static_cast<int>(bounded(rng, 40));
    for (int t = 0; t < steps; ++t) {
      auto cand = removable_edges(sub, 3);
      if (cand.empty()) break;
      sub.remove_edge(cand[bounded(rng, cand.size())]);
    }
    auto got = removable_edges(sub, 3);
    auto want = oracle_removable(sub);
    REQUIRE(got == want);
  }
}

TEST_CASE("reduction reaches the target degree with invariants intact") {
  auto g = std::make_shared<ChimeraGraph>(2);
  for (int d : {3, 4, 5}) {
    ReductionConfig cfg;
    cfg.target_degree = d;
    cfg.seed = 11 + d;
    Subgraph sub = reduce_to_degree(g, cfg);
    CHECK(sub.max_degree() <= d);
    CHECK(sub.connected());
    for (Qubit q = 0; q < g->num_sites(); ++q) CHECK(sub.degree(q) >= 2);
  }
}

TEST_CASE("reduction is deterministic in the seed") {
  auto g = std::make_shared<ChimeraGraph>(2);
  ReductionConfig cfg;
  cfg.target_degree = 4;
  cfg.seed = 99;
  Subgraph a = reduce_to_degree(g, cfg);
  Subgraph b = reduce_to_degree(g, cfg);
  CHECK(a.active_edges() == b.active_edges());
  cfg.seed = 100;
  Subgraph c = reduce_to_degree(g, cfg);
  CHECK(a.active_edges() != c.active_edges());
}

TEST_CASE("degree distribution sums to one and is concentrated at the target") {
  auto g = std::make_shared<ChimeraGraph>(4);
  ReductionConfig cfg;
  cfg.target_degree = 3;
  cfg.seed = 5;
  Subgraph sub = reduce_to_degree(g, cfg);
  auto dist = degree_distribution(sub);
  double total = 0.0, at_target = 0.0;
  for (auto [d, f] : dist) {
    CHECK(d >= 2);
    CHECK(d <= 3);
    total += f;
    if (d == 3) at_target = f;
  }
  CHECK(total == Catch::Approx(1.0));
  CHECK(at_target > 0.8);
}

TEST_CASE("invalid targets are rejected") {
  auto g = std::make_shared<ChimeraGraph>(1);
  ReductionConfig cfg;
  cfg.target_degree = 2;
  CHECK_THROWS_AS(reduce_to_degree(g, cfg), std::invalid_argument);
  cfg.target_degree = 7;
  CHECK_THROWS_AS(reduce_to_degree(g, cfg), std::invalid_argument);
}

TEST_CASE("degree distribution of an empty graph is the zero bucket") {
  std::vector<Qubit> all;
  for (Qubit q = 0; q < 8; ++q) all.push_back(q);
  auto g = std::make_shared<ChimeraGraph>(1, all);
  Subgraph sub(g);
  auto dist = degree_distribution(sub);
  REQUIRE(dist.size() == 1);
  CHECK(dist.at(0) == 1.0);
}
