#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "ctails/instance.hpp"
#include "ctails/rng.hpp"

namespace ctails {

// Classical spin configuration; entries +-1.  Inoperable qubit slots are
// carried as +1 and never contribute energy.
using SpinState = std::vector<std::int8_t>;

inline SpinState random_state(const ChimeraGraph& g, Rng& rng) {
  SpinState s(g.num_sites(), 1);
  for (Qubit q = 0; q < g.num_sites(); ++q)
    if (g.operable(q)) s[q] = static_cast<std::int8_t>(coin_spin(rng));
  return s;
}

inline void check_dims(const IsingInstance& inst, const SpinState& s) {
  if (static_cast<int>(s.size()) != inst.num_sites())
    throw std::invalid_argument("state length does not match instance qubit count");
}

// Exact classical energy in integer coupling units.
inline long long energy_int(const IsingInstance& inst, const SpinState& s) {
  check_dims(inst, s);
  long long e = 0;
  const auto& edges = inst.parent().edges();
  for (int i = 0; i < inst.parent().num_edges(); ++i) {
    int j = inst.coupling_int(i);
    if (j) e += static_cast<long long>(j) * s[edges[i].u] * s[edges[i].v];
  }
  for (Qubit q = 0; q < inst.num_sites(); ++q)
    if (inst.field_int(q)) e += static_cast<long long>(inst.field_int(q)) * s[q];
  return e;
}

inline double energy(const IsingInstance& inst, const SpinState& s) {
  return inst.scale() * static_cast<double>(energy_int(inst, s));
}

// Effective field on qubit i, summed over all neighbors j != i.
inline long long effective_field_int(const IsingInstance& inst, const SpinState& s, Qubit i) {
  check_dims(inst, s);
  if (i < 0 || i >= inst.num_sites())
    throw std::invalid_argument("effective_field: invalid qubit index");
  long long f = inst.field_int(i);
  for (const auto& a : inst.parent().neighbors(i)) {
    int j = inst.coupling_int(a.edge);
    if (j) f += static_cast<long long>(j) * s[a.q];
  }
  return f;
}

inline double effective_field(const IsingInstance& inst, const SpinState& s, Qubit i) {
  return inst.scale() * static_cast<double>(effective_field_int(inst, s, i));
}

// Qubits with exactly zero effective field; flipping any of them leaves the
// energy unchanged.
inline std::vector<Qubit> floppy_qubits(const IsingInstance& inst, const SpinState& s) {
  std::vector<Qubit> out;
  for (Qubit q = 0; q < inst.num_sites(); ++q) {
    if (!inst.parent().operable(q)) continue;
    if (effective_field_int(inst, s, q) == 0) out.push_back(q);
  }
  return out;
}

struct FloppyStats {
  // degree -> (floppy observations, total observations)
  std::map<int, std::pair<long long, long long>> counts;
  double fraction(int degree) const {
    auto it = counts.find(degree);
    if (it == counts.end() || it->second.second == 0) return 0.0;
    return static_cast<double>(it->second.first) / static_cast<double>(it->second.second);
  }
};

// Monte Carlo floppiness frequencies over uniform random states, bucketed by
// qubit degree in the instance subgraph.
inline FloppyStats floppy_fraction_random(const IsingInstance& inst, long long n_samples,
                                          Rng& rng) {
  if (n_samples < 1) throw std::invalid_argument("floppy_fraction_random: n_samples >= 1");
  FloppyStats stats;
  for (long long t = 0; t < n_samples; ++t) {
    SpinState s = random_state(inst.parent(), rng);
    for (Qubit q = 0; q < inst.num_sites(); ++q) {
      if (!inst.parent().operable(q)) continue;
      auto& bucket = stats.counts[inst.graph().degree(q)];
      ++bucket.second;
      if (effective_field_int(inst, s, q) == 0) ++bucket.first;
    }
  }
  return stats;
}

// Greedy stable set among the floppy qubits of a state, smallest current
// degree first.  Flipping any subset of the returned set is isoenergetic,
// so the state sits in a hypercube of at least 2^|S| isoenergetic states.
inline std::vector<Qubit> floppy_stable_set(const IsingInstance& inst, const SpinState& s) {
  std::vector<Qubit> floppy = floppy_qubits(inst, s);
  std::vector<char> is_floppy(inst.num_sites(), 0);
  for (Qubit q : floppy) is_floppy[q] = 1;
  auto floppy_degree = [&](Qubit q) {
    int d = 0;
    for (const auto& a : inst.parent().neighbors(q))
      if (inst.graph().edge_active(a.edge) && is_floppy[a.q]) ++d;
    return d;
  };
  std::stable_sort(floppy.begin(), floppy.end(),
                   [&](Qubit a, Qubit b) { return floppy_degree(a) < floppy_degree(b); });
  std::vector<char> taken(inst.num_sites(), 0);
  std::vector<Qubit> stable;
  for (Qubit q : floppy) {
    bool ok = true;
    for (const auto& a : inst.parent().neighbors(q))
      if (inst.graph().edge_active(a.edge) && taken[a.q]) {
        ok = false;
        break;
      }
    if (ok) {
      taken[q] = 1;
      stable.push_back(q);
    }
  }
  return stable;
}

inline int cluster_bound(const IsingInstance& inst, const SpinState& s) {
  return static_cast<int>(floppy_stable_set(inst, s).size());
}

}  // namespace ctails
