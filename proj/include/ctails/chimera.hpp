#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <ostream>
#include <queue>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ctails {

using Qubit = int;

struct Edge {
  Qubit u = -1;
  Qubit v = -1;  // canonical: u < v
  friend bool operator==(const Edge&, const Edge&) = default;
};

struct CellCoord {
  int row = 0;
  int col = 0;
  int side = 0;   // 0: couples along the row, 1: couples along the column
  int index = 0;  // 0..3 within the side
};

// Chimera graph C_L: an L x L grid of K_{4,4} unit cells with same-index
// couplers between adjacent cells.  Inoperable qubits are deleted outright
// together with their incident edges.
class ChimeraGraph {
 public:
  struct Adj {
    Qubit q;
    int edge;
  };

  explicit ChimeraGraph(int L, const std::vector<Qubit>& inoperable = {}) : L_(L) {
    if (L < 1) throw std::invalid_argument("ChimeraGraph: L must be >= 1");
    const int n = 8 * L * L;
    operable_.assign(n, true);
    for (Qubit q : inoperable) {
      if (q < 0 || q >= n)
        throw std::invalid_argument("ChimeraGraph: inoperable qubit index " +
                                    std::to_string(q) + " out of range [0," +
                                    std::to_string(n) + ")");
      operable_[q] = false;
    }
    for (int r = 0; r < L; ++r)
      for (int c = 0; c < L; ++c) {
        for (int a = 0; a < 4; ++a)
          for (int b = 0; b < 4; ++b) add_edge(site(r, c, 0, a), site(r, c, 1, b));
        for (int k = 0; k < 4; ++k) {
          if (c + 1 < L) add_edge(site(r, c, 0, k), site(r, c + 1, 0, k));
          if (r + 1 < L) add_edge(site(r, c, 1, k), site(r + 1, c, 1, k));
        }
      }
    std::sort(edges_.begin(), edges_.end(),
              [](const Edge& a, const Edge& b) { return a.u != b.u ? a.u < b.u : a.v < b.v; });
    adj_.assign(n, {});
    for (int e = 0; e < static_cast<int>(edges_.size()); ++e) {
      adj_[edges_[e].u].push_back({edges_[e].v, e});
      adj_[edges_[e].v].push_back({edges_[e].u, e});
    }
  }

  int grid_size() const { return L_; }
  int num_sites() const { return 8 * L_ * L_; }
  bool operable(Qubit q) const { return operable_[q]; }
  int num_operable() const {
    return static_cast<int>(std::count(operable_.begin(), operable_.end(), true));
  }

  Qubit site(int row, int col, int side, int index) const {
    return (((row * L_ + col) * 2 + side) * 4) + index;
  }
  CellCoord cell_of(Qubit q) const {
    CellCoord c;
    c.index = q % 4;
    q /= 4;
    c.side = q % 2;
    q /= 2;
    c.col = q % L_;
    c.row = q / L_;
    return c;
  }

  const std::vector<Edge>& edges() const { return edges_; }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  std::span<const Adj> neighbors(Qubit q) const { return adj_[q]; }
  int degree(Qubit q) const { return static_cast<int>(adj_[q].size()); }

  bool is_intercell(const Edge& e) const {
    if (e.u == e.v) throw std::invalid_argument("is_intercell: degenerate edge");
    CellCoord a = cell_of(e.u), b = cell_of(e.v);
    return a.row != b.row || a.col != b.col;
  }
  bool is_intercell(int edge_id) const { return is_intercell(edges_[edge_id]); }

  int edge_index(Qubit u, Qubit v) const {
    if (u > v) std::swap(u, v);
    for (const Adj& a : adj_[u])
      if (a.q == v) return a.edge;
    return -1;
  }

  void export_edge_list(std::ostream& os) const {
    os << "chimera L=" << L_ << "\n";
    for (const Edge& e : edges_) os << e.u << " " << e.v << "\n";
  }

 private:
  void add_edge(Qubit u, Qubit v) {
    if (!operable_[u] || !operable_[v]) return;
    if (u > v) std::swap(u, v);
    edges_.push_back({u, v});
  }

  int L_;
  std::vector<bool> operable_;
  std::vector<Edge> edges_;
  std::vector<std::vector<Adj>> adj_;
};

// A subgraph of a ChimeraGraph given by a subset of active edges.  Mutable
// only through remove/restore; instances built on top treat it as immutable.
class Subgraph {
 public:
  explicit Subgraph(std::shared_ptr<const ChimeraGraph> parent)
      : parent_(std::move(parent)), active_(parent_->num_edges(), 1) {
    degree_.assign(parent_->num_sites(), 0);
    for (Qubit q = 0; q < parent_->num_sites(); ++q) degree_[q] = parent_->degree(q);
  }

  const ChimeraGraph& parent() const { return *parent_; }
  std::shared_ptr<const ChimeraGraph> parent_ptr() const { return parent_; }

  bool edge_active(int e) const { return active_[e] != 0; }
  int degree(Qubit q) const { return degree_[q]; }
  int max_degree() const {
    int m = 0;
    for (int d : degree_) m = std::max(m, d);
    return m;
  }
  int num_active_edges() const {
    return static_cast<int>(std::count(active_.begin(), active_.end(), char(1)));
  }

  void remove_edge(int e) {
    if (!active_[e]) return;
    active_[e] = 0;
    --degree_[parent_->edges()[e].u];
    --degree_[parent_->edges()[e].v];
  }
  void restore_edge(int e) {
    if (active_[e]) return;
    active_[e] = 1;
    ++degree_[parent_->edges()[e].u];
    ++degree_[parent_->edges()[e].v];
  }

  std::vector<Edge> active_edges() const {
    std::vector<Edge> out;
    for (int e = 0; e < parent_->num_edges(); ++e)
      if (active_[e]) out.push_back(parent_->edges()[e]);
    return out;
  }

  // Connectivity of the subgraph induced on qubits of degree >= 1,
  // optionally pretending edge `skip` has been removed.
  bool connected(int skip = -1) const {
    const int n = parent_->num_sites();
    std::vector<char> seen(n, 0);
    Qubit start = -1;
    std::vector<int> deg = degree_;
    if (skip >= 0 && active_[skip]) {
      --deg[parent_->edges()[skip].u];
      --deg[parent_->edges()[skip].v];
    }
    for (Qubit q = 0; q < n; ++q)
      if (deg[q] >= 1) {
        start = q;
        break;
      }
    if (start < 0) return true;
    std::vector<Qubit> stack{start};
    seen[start] = 1;
    while (!stack.empty()) {
      Qubit q = stack.back();
      stack.pop_back();
      for (const auto& a : parent_->neighbors(q)) {
        if (!active_[a.edge] || a.edge == skip || seen[a.q]) continue;
        seen[a.q] = 1;
        stack.push_back(a.q);
      }
    }
    for (Qubit q = 0; q < n; ++q)
      if (deg[q] >= 1 && !seen[q]) return false;
    return true;
  }

  void export_edge_list(std::ostream& os) const {
    os << "chimera L=" << parent_->grid_size() << "\n";
    for (const Edge& e : active_edges()) os << e.u << " " << e.v << "\n";
  }

 private:
  std::shared_ptr<const ChimeraGraph> parent_;
  std::vector<char> active_;
  std::vector<int> degree_;
};

}  // namespace ctails
