#pragma once

#include <map>
#include <stdexcept>
#include <vector>

#include "ctails/chimera.hpp"
#include "ctails/rng.hpp"

namespace ctails {

struct ReductionConfig {
  int target_degree = 6;  // in {3,4,5,6}; degree-2 targets are excluded
  int max_restarts = 100;
  std::uint64_t seed = 0;
};

struct ReductionError : std::runtime_error {
  int restarts_used;
  ReductionError(const std::string& msg, int restarts)
      : std::runtime_error(msg), restarts_used(restarts) {}
};

namespace detail {

// Canonical orientation of an unordered edge: u is the higher-degree
// endpoint, ties broken toward the lower qubit index.
inline std::pair<Qubit, Qubit> orient(const Subgraph& g, const Edge& e) {
  if (g.degree(e.u) >= g.degree(e.v)) return {e.u, e.v};
  return {e.v, e.u};
}

}  // namespace detail

// Edges removable under the five deletion rules.  Rule 5 (connectivity) is
// evaluated last since it is the only non-local check.
inline std::vector<int> removable_edges(const Subgraph& g, int /*target_degree*/) {
  const ChimeraGraph& parent = g.parent();
  const int dmax = g.max_degree();

  // Rule 2 bound: the largest degree seen opposite a maximum-degree endpoint.
  // Rule 3 bound: whether any intra-cell edge joins two maximum-degree qubits.
  int best_partner = 0;
  bool intra_at_max = false;
  for (int e = 0; e < parent.num_edges(); ++e) {
    if (!g.edge_active(e)) continue;
    auto [u, v] = detail::orient(g, parent.edges()[e]);
    if (g.degree(u) == dmax) {
      best_partner = std::max(best_partner, g.degree(v));
      if (g.degree(v) == dmax && !parent.is_intercell(e)) intra_at_max = true;
    }
  }

  std::vector<int> out;
  for (int e = 0; e < parent.num_edges(); ++e) {
    if (!g.edge_active(e)) continue;
    auto [u, v] = detail::orient(g, parent.edges()[e]);
    const int du = g.degree(u), dv = g.degree(v);
    if (du != dmax) continue;                           // rule 1
    if (dv < best_partner) continue;                    // rule 2
    if (parent.is_intercell(e)) {                       // rule 3
      if (du != dv) continue;
      if (intra_at_max) continue;
    }
    if (dv < 3) continue;                               // rule 4
    if (!g.connected(e)) continue;                      // rule 5
    out.push_back(e);
  }
  return out;
}

// Randomized iterative reduction to target maximum degree, restarting from
// scratch when no edge is removable.
inline Subgraph reduce_to_degree(std::shared_ptr<const ChimeraGraph> g,
                                 const ReductionConfig& cfg) {
  if (cfg.target_degree < 3 || cfg.target_degree > 6)
    throw std::invalid_argument("reduce_to_degree: target degree must be in {3,4,5,6}");
  Rng rng(cfg.seed);
  for (int attempt = 0; attempt <= cfg.max_restarts; ++attempt) {
    Subgraph sub(g);
    bool stuck = false;
    while (sub.max_degree() > cfg.target_degree) {
      std::vector<int> cand = removable_edges(sub, cfg.target_degree);
      if (cand.empty()) {
        stuck = true;
        break;
      }
      sub.remove_edge(cand[bounded(rng, cand.size())]);
    }
    if (!stuck) return sub;
  }
  throw ReductionError("reduce_to_degree: restart budget exhausted after " +
                           std::to_string(cfg.max_restarts + 1) + " attempts",
                       cfg.max_restarts + 1);
}

// Fractions of operable qubits per degree; sums to 1.
inline std::map<int, double> degree_distribution(const Subgraph& g) {
  std::map<int, long long> counts;
  long long total = 0;
  for (Qubit q = 0; q < g.parent().num_sites(); ++q) {
    if (!g.parent().operable(q)) continue;
    ++counts[g.degree(q)];
    ++total;
  }
  std::map<int, double> out;
  if (total == 0) {
    out[0] = 1.0;
    return out;
  }
  for (auto [d, c] : counts) out[d] = static_cast<double>(c) / static_cast<double>(total);
  return out;
}

}  // namespace ctails
