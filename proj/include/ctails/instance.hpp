#pragma once

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ctails/chimera.hpp"
#include "ctails/rng.hpp"

namespace ctails {

struct InstanceMeta {
  std::string id;
  std::string family = "uk";  // "uk" or "sidon28"
  int k = 1;
  int target_degree = 6;
  int denom = 1;       // coupling normalization denominator (k, or 28 for sidon28)
  double alpha = 1.0;  // energy-scale prefactor in (0,1]
  std::uint64_t graph_seed = 0;
  std::uint64_t coupling_seed = 0;
};

// Random Ising instance on a Chimera subgraph.  Couplings and fields are
// exact integers; the 1/denom normalization and the alpha prefactor are
// applied lazily so that ground-state comparisons stay exact.
class IsingInstance {
 public:
  IsingInstance(Subgraph graph, std::vector<int> couplings, std::vector<int> fields,
                InstanceMeta meta)
      : graph_(std::move(graph)),
        j_(std::move(couplings)),
        h_(std::move(fields)),
        meta_(std::move(meta)) {
    if (static_cast<int>(j_.size()) != graph_.parent().num_edges())
      throw std::invalid_argument("IsingInstance: coupling vector size mismatch");
    if (static_cast<int>(h_.size()) != graph_.parent().num_sites())
      throw std::invalid_argument("IsingInstance: field vector size mismatch");
    for (int e = 0; e < graph_.parent().num_edges(); ++e)
      if (j_[e] != 0 && !graph_.edge_active(e))
        throw std::invalid_argument("IsingInstance: coupling on inactive edge");
  }

  const Subgraph& graph() const { return graph_; }
  const ChimeraGraph& parent() const { return graph_.parent(); }
  const InstanceMeta& meta() const { return meta_; }
  int num_sites() const { return graph_.parent().num_sites(); }
  int num_operable() const { return graph_.parent().num_operable(); }

  int coupling_int(int edge) const { return j_[edge]; }
  int field_int(Qubit q) const { return h_[q]; }
  const std::vector<int>& couplings_int() const { return j_; }
  const std::vector<int>& fields_int() const { return h_; }

  // Scale applied to integer units to obtain physical couplings in [-1,1].
  double scale() const { return meta_.alpha / static_cast<double>(meta_.denom); }
  double coupling(int edge) const { return scale() * j_[edge]; }
  double field(Qubit q) const { return scale() * h_[q]; }

  void set_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0))
      throw std::invalid_argument("alpha must lie in (0,1]");
    meta_.alpha = alpha;
  }
  void set_id(const std::string& id) { meta_.id = id; }

 private:
  Subgraph graph_;
  std::vector<int> j_;  // indexed by parent edge id; 0 on inactive edges
  std::vector<int> h_;  // indexed by qubit
  InstanceMeta meta_;
};

inline IsingInstance sample_uk(const Subgraph& g, int k, Rng& rng) {
  if (k < 1) throw std::invalid_argument("sample_uk: k must be >= 1");
  std::vector<int> j(g.parent().num_edges(), 0);
  for (int e = 0; e < g.parent().num_edges(); ++e) {
    if (!g.edge_active(e)) continue;
    int mag = 1 + static_cast<int>(bounded(rng, static_cast<std::uint64_t>(k)));
    j[e] = mag * coin_spin(rng);
  }
  InstanceMeta meta;
  meta.family = "uk";
  meta.k = k;
  meta.denom = k;
  return IsingInstance(g, std::move(j), std::vector<int>(g.parent().num_sites(), 0), meta);
}

inline IsingInstance sample_sidon28(const Subgraph& g, Rng& rng) {
  static constexpr int kMagnitudes[4] = {8, 13, 19, 28};
  std::vector<int> j(g.parent().num_edges(), 0);
  for (int e = 0; e < g.parent().num_edges(); ++e) {
    if (!g.edge_active(e)) continue;
    j[e] = kMagnitudes[bounded(rng, 4)] * coin_spin(rng);
  }
  InstanceMeta meta;
  meta.family = "sidon28";
  meta.k = 28;
  meta.denom = 28;
  return IsingInstance(g, std::move(j), std::vector<int>(g.parent().num_sites(), 0), meta);
}

inline IsingInstance apply_scale(IsingInstance inst, double alpha) {
  inst.set_alpha(alpha);
  return inst;
}

struct Gauge {
  std::vector<std::int8_t> g;  // entries in {-1,+1}
};

inline Gauge random_gauge(const ChimeraGraph& graph, Rng& rng) {
  Gauge gauge;
  gauge.g.resize(graph.num_sites());
  for (auto& x : gauge.g) x = static_cast<std::int8_t>(coin_spin(rng));
  return gauge;
}

inline Gauge identity_gauge(const ChimeraGraph& graph) {
  return Gauge{std::vector<std::int8_t>(graph.num_sites(), 1)};
}

// Spin reversal transform: J'_ij = g_i g_j J_ij, h'_i = g_i h_i.
inline IsingInstance spin_reversal(const IsingInstance& inst, const Gauge& gauge) {
  if (static_cast<int>(gauge.g.size()) != inst.num_sites())
    throw std::invalid_argument("spin_reversal: gauge must cover all qubits");
  for (auto x : gauge.g)
    if (x != 1 && x != -1) throw std::invalid_argument("spin_reversal: gauge entries must be +-1");
  std::vector<int> j(inst.couplings_int());
  std::vector<int> h(inst.fields_int());
  const auto& edges = inst.parent().edges();
  for (int e = 0; e < inst.parent().num_edges(); ++e)
    j[e] *= gauge.g[edges[e].u] * gauge.g[edges[e].v];
  for (Qubit q = 0; q < inst.num_sites(); ++q) h[q] *= gauge.g[q];
  return IsingInstance(inst.graph(), std::move(j), std::move(h), inst.meta());
}

// ---------------------------------------------------------------------------
// Instance file format: text header, then integer coupler/field lines.
// Round-trips bit-exactly (canonical edge order, %.17g for alpha).

inline void save_instance(const IsingInstance& inst, std::ostream& os) {
  const auto& m = inst.meta();
  char alpha_buf[64];
  std::snprintf(alpha_buf, sizeof alpha_buf, "%.17g", m.alpha);
  os << "ising v1\n";
  os << "id " << (m.id.empty() ? "-" : m.id) << "\n";
  os << "L " << inst.parent().grid_size() << "\n";
  os << "family " << m.family << "\n";
  os << "k " << m.k << "\n";
  os << "d " << m.target_degree << "\n";
  os << "denom " << m.denom << "\n";
  os << "alpha " << alpha_buf << "\n";
  os << "graph_seed " << m.graph_seed << "\n";
  os << "coupling_seed " << m.coupling_seed << "\n";
  std::vector<Qubit> inop;
  for (Qubit q = 0; q < inst.num_sites(); ++q)
    if (!inst.parent().operable(q)) inop.push_back(q);
  os << "inoperable " << inop.size();
  for (Qubit q : inop) os << " " << q;
  os << "\n";
  std::vector<int> active;
  for (int e = 0; e < inst.parent().num_edges(); ++e)
    if (inst.graph().edge_active(e)) active.push_back(e);
  os << "couplers " << active.size() << "\n";
  for (int e : active) {
    const Edge& ed = inst.parent().edges()[e];
    os << ed.u << " " << ed.v << " " << inst.coupling_int(e) << "\n";
  }
  std::vector<Qubit> hq;
  for (Qubit q = 0; q < inst.num_sites(); ++q)
    if (inst.field_int(q) != 0) hq.push_back(q);
  os << "fields " << hq.size() << "\n";
  for (Qubit q : hq) os << q << " " << inst.field_int(q) << "\n";
  os << "end\n";
}

inline void save_instance(const IsingInstance& inst, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("save_instance: cannot open " + path);
  save_instance(inst, os);
}

inline IsingInstance load_instance(std::istream& is) {
  auto expect = [&](const std::string& key) {
    std::string tok;
    if (!(is >> tok) || tok != key)
      throw std::runtime_error("load_instance: expected '" + key + "', got '" + tok + "'");
  };
  expect("ising");
  expect("v1");
  InstanceMeta meta;
  expect("id");
  is >> meta.id;
  if (meta.id == "-") meta.id.clear();
  expect("L");
  int L;
  is >> L;
  expect("family");
  is >> meta.family;
  expect("k");
  is >> meta.k;
  expect("d");
  is >> meta.target_degree;
  expect("denom");
  is >> meta.denom;
  expect("alpha");
  is >> meta.alpha;
  expect("graph_seed");
  is >> meta.graph_seed;
  expect("coupling_seed");
  is >> meta.coupling_seed;
  expect("inoperable");
  std::size_t n_inop;
  is >> n_inop;
  std::vector<Qubit> inop(n_inop);
  for (auto& q : inop) is >> q;
  auto parent = std::make_shared<ChimeraGraph>(L, inop);
  Subgraph sub(parent);
  for (int e = 0; e < parent->num_edges(); ++e) sub.remove_edge(e);
  std::vector<int> j(parent->num_edges(), 0);
  expect("couplers");
  std::size_t n_coup;
  is >> n_coup;
  for (std::size_t i = 0; i < n_coup; ++i) {
    Qubit u, v;
    int val;
    is >> u >> v >> val;
    int e = parent->edge_index(u, v);
    if (e < 0)
      throw std::runtime_error("load_instance: coupler (" + std::to_string(u) + "," +
                               std::to_string(v) + ") is not a Chimera edge");
    sub.restore_edge(e);
    j[e] = val;
  }
  std::vector<int> h(parent->num_sites(), 0);
  expect("fields");
  std::size_t n_fields;
  is >> n_fields;
  for (std::size_t i = 0; i < n_fields; ++i) {
    Qubit q;
    int val;
    is >> q >> val;
    h[q] = val;
  }
  expect("end");
  return IsingInstance(std::move(sub), std::move(j), std::move(h), meta);
}

inline IsingInstance load_instance(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("load_instance: cannot open " + path);
  return load_instance(is);
}

}  // namespace ctails
