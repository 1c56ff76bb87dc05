#pragma once

#include <array>
#include <climits>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ctails/ising.hpp"
#include "ctails/instance.hpp"

namespace ctails {

// Saturating ground-state degeneracy counter, cap 2^63 - 1.
inline constexpr std::uint64_t kDegeneracyCap = 0x7fffffffffffffffULL;

inline std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) {
  return (a > kDegeneracyCap - b) ? kDegeneracyCap : a + b;
}
inline std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
  if (a == 0 || b == 0) return 0;
  return (a > kDegeneracyCap / b) ? kDegeneracyCap : a * b;
}

enum class GroundMethod { exhaustive, column_dp, best_found };

inline const char* to_string(GroundMethod m) {
  switch (m) {
    case GroundMethod::exhaustive: return "exhaustive";
    case GroundMethod::column_dp: return "column_dp";
    case GroundMethod::best_found: return "best_found";
  }
  return "?";
}

struct GroundTruth {
  long long energy = 0;  // integer units, pre-normalization
  std::uint64_t degeneracy = 0;
  GroundMethod method = GroundMethod::exhaustive;
  bool exact() const { return method != GroundMethod::best_found; }
};

// Minimum over all 2^n states of the operable qubits, Gray-code order with
// incremental local fields.  Exact energy and degeneracy.
inline GroundTruth exhaustive_ground(const IsingInstance& inst) {
  std::vector<Qubit> qs;
  for (Qubit q = 0; q < inst.num_sites(); ++q)
    if (inst.parent().operable(q)) qs.push_back(q);
  const int n = static_cast<int>(qs.size());
  if (n > 28)
    throw std::invalid_argument("exhaustive_ground: " + std::to_string(n) +
                                " qubits exceeds the n<=28 budget; use column_dp_ground");
  SpinState s(inst.num_sites(), 1);
  std::vector<long long> f(inst.num_sites(), 0);
  for (Qubit q : qs) f[q] = effective_field_int(inst, s, q);
  long long e = energy_int(inst, s);
  GroundTruth gt{e, 1, GroundMethod::exhaustive};
  const std::uint64_t total = 1ULL << n;
  for (std::uint64_t g = 1; g < total; ++g) {
    Qubit q = qs[__builtin_ctzll(g)];
    e += -2LL * s[q] * f[q];
    s[q] = static_cast<std::int8_t>(-s[q]);
    for (const auto& a : inst.parent().neighbors(q)) {
      int j = inst.coupling_int(a.edge);
      if (j) f[a.q] += 2LL * j * s[q];
    }
    if (e < gt.energy) {
      gt.energy = e;
      gt.degeneracy = 1;
    } else if (e == gt.energy) {
      gt.degeneracy = sat_add(gt.degeneracy, 1);
    }
  }
  return gt;
}

namespace detail {

constexpr long long kInfEnergy = LLONG_MAX / 4;

struct MinCount {
  long long e = kInfEnergy;
  std::uint64_t c = 0;
  void offer(long long oe, std::uint64_t oc) {
    if (oe < e) {
      e = oe;
      c = oc;
    } else if (oe == e && oe < kInfEnergy) {
      c = sat_add(c, oc);
    }
  }
};

}  // namespace detail

// Exact ground energy and degeneracy by a transfer DP over unit-cell
// columns.  The DP state is the spin assignment of the 4L row-coupled
// ("side 0") qubits of the current column; within a column the four
// column-coupled ("side 1") spins per index form independent vertical
// chains once the boundary is fixed.
inline GroundTruth column_dp_ground(const IsingInstance& inst) {
  const ChimeraGraph& g = inst.parent();
  const int L = g.grid_size();
  const int W = 4 * L;
  if (W > 24)
    throw std::invalid_argument("column_dp_ground: boundary width " + std::to_string(W) +
                                " exceeds the 24-bit budget");
  const std::size_t SZ = std::size_t(1) << W;

  auto spin_of = [](std::size_t x, int bit) -> int { return (x >> bit) & 1 ? -1 : 1; };

  std::vector<long long> E(SZ, detail::kInfEnergy);
  std::vector<std::uint64_t> C(SZ, 0);

  // Per-column side-0 operability mask (bit r*4+k).
  auto forced_mask = [&](int col) {
    std::size_t m = 0;
    for (int r = 0; r < L; ++r)
      for (int k = 0; k < 4; ++k)
        if (!g.operable(g.site(r, col, 0, k))) m |= std::size_t(1) << (r * 4 + k);
    return m;
  };

  struct ColumnTables {
    // jintra[r][k0][k1]: side0 index k0 to side1 index k1 within cell r.
    std::vector<std::array<std::array<int, 4>, 4>> jintra;
    std::vector<std::array<int, 4>> jvert;  // cell r side1 k to cell r+1 side1 k
    std::vector<std::array<int, 4>> h1;     // fields on side1 qubits
    std::vector<std::array<char, 4>> op1;   // operability of side1 qubits
    std::vector<std::array<int, 4>> h0;     // fields on side0 qubits
    std::vector<std::array<char, 4>> op0;
  };
  auto build_tables = [&](int col) {
    ColumnTables t;
    t.jintra.assign(L, {});
    t.jvert.assign(L, {});
    t.h1.assign(L, {});
    t.op1.assign(L, {});
    t.h0.assign(L, {});
    t.op0.assign(L, {});
    for (int r = 0; r < L; ++r)
      for (int k = 0; k < 4; ++k) {
        Qubit v1 = g.site(r, col, 1, k);
        Qubit v0 = g.site(r, col, 0, k);
        t.op1[r][k] = g.operable(v1);
        t.op0[r][k] = g.operable(v0);
        t.h1[r][k] = g.operable(v1) ? inst.field_int(v1) : 0;
        t.h0[r][k] = g.operable(v0) ? inst.field_int(v0) : 0;
        for (int k0 = 0; k0 < 4; ++k0) {
          int e = g.edge_index(g.site(r, col, 0, k0), v1);
          t.jintra[r][k0][k] = (e >= 0 && inst.graph().edge_active(e)) ? inst.coupling_int(e) : 0;
        }
        if (r + 1 < L) {
          int e = g.edge_index(v1, g.site(r + 1, col, 1, k));
          t.jvert[r][k] = (e >= 0 && inst.graph().edge_active(e)) ? inst.coupling_int(e) : 0;
        }
      }
    return t;
  };

  // Energy and degeneracy of one column (side-1 spins minimized out) given
  // the side-0 assignment x.
  auto column_value = [&](const ColumnTables& t, std::size_t x) {
    long long total = 0;
    std::uint64_t count = 1;
    for (int r = 0; r < L; ++r)
      for (int k = 0; k < 4; ++k)
        if (t.op0[r][k]) total += static_cast<long long>(t.h0[r][k]) * spin_of(x, r * 4 + k);
    for (int k = 0; k < 4; ++k) {
      bool open = false;
      long long ce[2] = {0, 0};        // chain energies for spin +1 / -1
      std::uint64_t cc[2] = {1, 1};
      int prev_link = 0;
      auto collapse = [&]() {
        detail::MinCount mc;
        mc.offer(ce[0], cc[0]);
        mc.offer(ce[1], cc[1]);
        total += mc.e;
        count = sat_mul(count, mc.c);
        open = false;
      };
      for (int r = 0; r < L; ++r) {
        if (!t.op1[r][k]) {
          if (open) collapse();
          prev_link = 0;
          continue;
        }
        long long f = t.h1[r][k];
        for (int k0 = 0; k0 < 4; ++k0)
          if (t.jintra[r][k0][k]) f += static_cast<long long>(t.jintra[r][k0][k]) * spin_of(x, r * 4 + k0);
        if (!open) {
          ce[0] = f;
          ce[1] = -f;
          cc[0] = cc[1] = 1;
          open = true;
        } else {
          detail::MinCount up, dn;
          up.offer(ce[0] + prev_link, cc[0]);   // prev +1, cur +1
          up.offer(ce[1] - prev_link, cc[1]);   // prev -1, cur +1
          dn.offer(ce[0] - prev_link, cc[0]);
          dn.offer(ce[1] + prev_link, cc[1]);
          ce[0] = up.e + f;
          cc[0] = up.c;
          ce[1] = dn.e - f;
          cc[1] = dn.c;
        }
        prev_link = t.jvert[r][k];
      }
      if (open) collapse();
    }
    return std::pair<long long, std::uint64_t>(total, count);
  };

  // Column 0.
  {
    ColumnTables t = build_tables(0);
    std::size_t forced = forced_mask(0);
    for (std::size_t x = 0; x < SZ; ++x) {
      if (x & forced) continue;
      auto [a, c] = column_value(t, x);
      E[x] = a;
      C[x] = c;
    }
  }

  for (int col = 1; col < L; ++col) {
    // Fold the row couplers between columns col-1 and col one boundary bit
    // at a time; after bit b is folded, index bit b refers to column col.
    for (int b = 0; b < W; ++b) {
      int r = b / 4, k = b % 4;
      int e = g.edge_index(g.site(r, col - 1, 0, k), g.site(r, col, 0, k));
      long long jb =
          (e >= 0 && inst.graph().edge_active(e)) ? inst.coupling_int(e) : 0;
      const std::size_t bit = std::size_t(1) << b;
      for (std::size_t i = 0; i < SZ; ++i) {
        if (i & bit) continue;
        const std::size_t i0 = i, i1 = i | bit;
        long long e0 = E[i0], e1 = E[i1];
        std::uint64_t c0 = C[i0], c1 = C[i1];
        detail::MinCount nx0, nx1;  // new x spin +1 / -1
        if (e0 < detail::kInfEnergy) {
          nx0.offer(e0 + jb, c0);
          nx1.offer(e0 - jb, c0);
        }
        if (e1 < detail::kInfEnergy) {
          nx0.offer(e1 - jb, c1);
          nx1.offer(e1 + jb, c1);
        }
        E[i0] = nx0.e;
        C[i0] = nx0.c;
        E[i1] = nx1.e;
        C[i1] = nx1.c;
      }
    }
    ColumnTables t = build_tables(col);
    std::size_t forced = forced_mask(col);
    for (std::size_t x = 0; x < SZ; ++x) {
      if (x & forced) {
        E[x] = detail::kInfEnergy;
        C[x] = 0;
        continue;
      }
      if (E[x] >= detail::kInfEnergy) continue;
      auto [a, c] = column_value(t, x);
      E[x] += a;
      C[x] = sat_mul(C[x], c);
    }
  }

  detail::MinCount best;
  for (std::size_t x = 0; x < SZ; ++x)
    if (E[x] < detail::kInfEnergy) best.offer(E[x], C[x]);
  if (best.c == 0) throw std::runtime_error("column_dp_ground: no feasible state");
  return GroundTruth{best.e, best.c, GroundMethod::column_dp};
}

// Lowest energy over recorded solver samples; an upper bound only.
inline GroundTruth best_found_ground(const IsingInstance& inst,
                                     std::span<const SpinState> samples) {
  if (samples.empty())
    throw std::invalid_argument("best_found_ground: no samples available");
  GroundTruth gt;
  gt.method = GroundMethod::best_found;
  gt.energy = LLONG_MAX;
  for (const SpinState& s : samples) {
    long long e = energy_int(inst, s);
    if (e < gt.energy) {
      gt.energy = e;
      gt.degeneracy = 0;  // unknown for best-found
    }
  }
  return gt;
}

// ---------------------------------------------------------------------------
// Ground-truth cache: one line per instance id.

inline void save_ground_truths(const std::map<std::string, GroundTruth>& m,
                               const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("save_ground_truths: cannot open " + path);
  os << "# id energy degeneracy method\n";
  for (const auto& [id, gt] : m)
    os << id << " " << gt.energy << " " << gt.degeneracy << " " << to_string(gt.method) << "\n";
}

inline std::map<std::string, GroundTruth> load_ground_truths(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("load_ground_truths: cannot open " + path);
  std::map<std::string, GroundTruth> m;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string id, method;
    GroundTruth gt;
    ls >> id >> gt.energy >> gt.degeneracy >> method;
    if (method == "exhaustive") gt.method = GroundMethod::exhaustive;
    else if (method == "column_dp") gt.method = GroundMethod::column_dp;
    else gt.method = GroundMethod::best_found;
    m[id] = gt;
  }
  return m;
}

}  // namespace ctails
