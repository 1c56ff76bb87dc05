#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ctails/ising.hpp"
#include "ctails/instance.hpp"

namespace ctails {

// Tabulated annealing schedule: transverse-field and longitudinal energy
// curves Delta(s), epsilon(s) in GHz, piecewise-linear interpolation.
class AnnealSchedule {
 public:
  AnnealSchedule(std::vector<double> s, std::vector<double> delta, std::vector<double> eps)
      : s_(std::move(s)), delta_(std::move(delta)), eps_(std::move(eps)) {
    if (s_.size() < 2 || s_.size() != delta_.size() || s_.size() != eps_.size())
      throw std::invalid_argument("AnnealSchedule: need matching sample vectors, >= 2 points");
    if (s_.front() != 0.0 || s_.back() != 1.0)
      throw std::invalid_argument("AnnealSchedule: samples must cover [0,1]");
    for (std::size_t i = 0; i + 1 < s_.size(); ++i)
      if (!(s_[i] < s_[i + 1]))
        throw std::invalid_argument("AnnealSchedule: s samples must be strictly increasing");
    for (std::size_t i = 0; i < s_.size(); ++i)
      if (delta_[i] < 0.0 || eps_[i] < 0.0)
        throw std::invalid_argument("AnnealSchedule: Delta and epsilon must be >= 0");
    if (!(delta_.front() > 10.0 * eps_.front()))
      throw std::invalid_argument("AnnealSchedule: expected Delta(0) >> epsilon(0)");
    if (!(eps_.back() > 10.0 * delta_.back()))
      throw std::invalid_argument("AnnealSchedule: expected epsilon(1) >> Delta(1)");
  }

  double delta(double s) const { return interp(delta_, s); }
  double epsilon(double s) const { return interp(eps_, s); }

  // Ratio Delta(s)/epsilon(s); used to check the transverse field is
  // effectively off late in the anneal.
  double transverse_ratio(double s) const {
    double e = epsilon(s);
    return e > 0.0 ? delta(s) / e : std::numeric_limits<double>::infinity();
  }

  // Synthetic default qualitatively matching a DW2X-style schedule: Delta
  // falls from ~6 GHz to ~0 near s=0.7, epsilon rises to ~12 GHz at s=1.
  static AnnealSchedule default_synthetic() {
    return AnnealSchedule(
        {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0},
        {6.0, 5.0, 4.0, 3.0, 2.1, 1.3, 0.6, 0.08, 0.02, 0.005, 0.0},
        {0.05, 0.4, 1.0, 1.8, 2.8, 4.0, 5.4, 7.0, 8.6, 10.3, 12.0});
  }

  void save_csv(std::ostream& os) const {
    os << "s,delta_ghz,epsilon_ghz\n";
    char buf[128];
    for (std::size_t i = 0; i < s_.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", s_[i], delta_[i], eps_[i]);
      os << buf;
    }
  }
  static AnnealSchedule load_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != "s,delta_ghz,epsilon_ghz")
      throw std::runtime_error("AnnealSchedule: bad CSV header");
    std::vector<double> s, d, e;
    while (std::getline(is, line)) {
      if (line.empty()) continue;
      std::istringstream ls(line);
      std::string tok;
      double vals[3];
      for (int i = 0; i < 3; ++i) {
        if (!std::getline(ls, tok, ',')) throw std::runtime_error("AnnealSchedule: bad CSV row");
        vals[i] = std::stod(tok);
      }
      s.push_back(vals[0]);
      d.push_back(vals[1]);
      e.push_back(vals[2]);
    }
    return AnnealSchedule(std::move(s), std::move(d), std::move(e));
  }
  static AnnealSchedule load_csv_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("AnnealSchedule: cannot open " + path);
    return load_csv(is);
  }

 private:
  double interp(const std::vector<double>& y, double s) const {
    if (!(s >= 0.0 && s <= 1.0))
      throw std::invalid_argument("AnnealSchedule: s must lie in [0,1]");
    auto it = std::upper_bound(s_.begin(), s_.end(), s);
    if (it == s_.begin()) return y.front();
    if (it == s_.end()) return y.back();
    std::size_t hi = static_cast<std::size_t>(it - s_.begin());
    std::size_t lo = hi - 1;
    double w = (s - s_[lo]) / (s_[hi] - s_[lo]);
    return y[lo] + w * (y[hi] - y[lo]);
  }

  std::vector<double> s_, delta_, eps_;
};

// Rotor angles in [0, pi], one per qubit slot (inoperable slots unused).
using RotorState = std::vector<double>;

inline RotorState corner_state(const SpinState& s) {
  RotorState theta(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) theta[i] = s[i] > 0 ? 0.0 : M_PI;
  return theta;
}

// Spin-vector energy at annealing parameter s (GHz).
inline double sv_energy(const IsingInstance& inst, const AnnealSchedule& sched, double s,
                        const RotorState& theta) {
  if (static_cast<int>(theta.size()) != inst.num_sites())
    throw std::invalid_argument("sv_energy: rotor state size mismatch");
  const double eps = sched.epsilon(s), del = sched.delta(s);
  const double scale = inst.scale();
  double ising = 0.0, transverse = 0.0;
  const auto& edges = inst.parent().edges();
  for (int e = 0; e < inst.parent().num_edges(); ++e) {
    int j = inst.coupling_int(e);
    if (j) ising += scale * j * std::cos(theta[edges[e].u]) * std::cos(theta[edges[e].v]);
  }
  for (Qubit q = 0; q < inst.num_sites(); ++q) {
    if (!inst.parent().operable(q)) continue;
    if (inst.field_int(q)) ising += scale * inst.field_int(q) * std::cos(theta[q]);
    transverse += std::sin(theta[q]);
  }
  return 0.5 * eps * ising - 0.5 * del * transverse;
}

// Rotor effective field h_i + sum_j J_ij cos(theta_j), physical units.
inline double rotor_effective_field(const IsingInstance& inst, const RotorState& theta,
                                    Qubit i) {
  double f = inst.field(i);
  for (const auto& a : inst.parent().neighbors(i)) {
    int j = inst.coupling_int(a.edge);
    if (j) f += inst.scale() * j * std::cos(theta[a.q]);
  }
  return f;
}

namespace detail {

// Locally optimal angle for given effective field: the (0,pi) branch of
// arccot(-eps*heff/delta).  delta=0 falls back to the classical limit.
inline double theta_star_from_field(double heff, double delta, double eps) {
  if (delta > 0.0) return M_PI / 2.0 + std::atan(eps * heff / delta);
  if (heff < 0.0) return 0.0;
  if (heff > 0.0) return M_PI;
  return M_PI / 2.0;
}

}  // namespace detail

inline double theta_star(const IsingInstance& inst, const AnnealSchedule& sched, double s,
                         const RotorState& theta, Qubit i) {
  if (i < 0 || i >= inst.num_sites() || !inst.parent().operable(i))
    throw std::invalid_argument("theta_star: invalid qubit index");
  return detail::theta_star_from_field(rotor_effective_field(inst, theta, i), sched.delta(s),
                                       sched.epsilon(s));
}

struct DescentOptions {
  double tol = 1e-8;       // max per-coordinate |theta_i - theta*_i|
  int max_passes = 100000;
  double monotone_tol_rel = 1e-12;  // per-pass energy increase tolerance
};

struct DescentResult {
  RotorState theta;
  double energy = 0.0;
  int passes = 0;
  bool converged = false;
  double residual = 0.0;
  bool monotone = true;
  double worst_increase = 0.0;
};

// The map L_s(theta): sequential half-step coordinate updates
// theta_i <- (theta_i + theta*_i)/2 until every coordinate sits within tol
// of its locally optimal angle.
inline DescentResult descend(const IsingInstance& inst, const AnnealSchedule& sched, double s,
                             const RotorState& theta0, const DescentOptions& opts = {}) {
  if (static_cast<int>(theta0.size()) != inst.num_sites())
    throw std::invalid_argument("descend: rotor state size mismatch");
  const double del = sched.delta(s), eps = sched.epsilon(s);
  const double scale = inst.scale();
  const ChimeraGraph& g = inst.parent();

  DescentResult res;
  res.theta = theta0;
  std::vector<double> cosv(theta0.size());
  for (std::size_t i = 0; i < theta0.size(); ++i) cosv[i] = std::cos(res.theta[i]);
  std::vector<double> heff(theta0.size(), 0.0);
  std::vector<Qubit> order;
  for (Qubit q = 0; q < g.num_sites(); ++q)
    if (g.operable(q)) {
      order.push_back(q);
      double f = scale * inst.field_int(q);
      for (const auto& a : g.neighbors(q)) {
        int j = inst.coupling_int(a.edge);
        if (j) f += scale * j * cosv[a.q];
      }
      heff[q] = f;
    }

  double prev_energy = sv_energy(inst, sched, s, res.theta);
  const double energy_scale = std::max(1.0, std::abs(prev_energy));
  for (res.passes = 0; res.passes < opts.max_passes; ++res.passes) {
    double residual = 0.0;
    for (Qubit q : order) {
      double ts = detail::theta_star_from_field(heff[q], del, eps);
      residual = std::max(residual, std::abs(res.theta[q] - ts));
      double nt = 0.5 * (res.theta[q] + ts);
      res.theta[q] = nt;
      double nc = std::cos(nt);
      double dc = nc - cosv[q];
      if (dc != 0.0) {
        cosv[q] = nc;
        for (const auto& a : g.neighbors(q)) {
          int j = inst.coupling_int(a.edge);
          if (j) heff[a.q] += scale * j * dc;
        }
      }
    }
    double e = sv_energy(inst, sched, s, res.theta);
    if (e > prev_energy + opts.monotone_tol_rel * energy_scale) {
      res.monotone = false;
      res.worst_increase = std::max(res.worst_increase, e - prev_energy);
    }
    prev_energy = e;
    res.residual = residual;
    if (residual < opts.tol) {
      res.converged = true;
      ++res.passes;
      break;
    }
  }
  res.energy = prev_energy;
  return res;
}

struct Candidate {
  SpinState state;
  long long energy_int = 0;
  bool is_ground = false;
};

struct CrossingOptions {
  DescentOptions descent;
  double tie_rel_tol = 1e-9;
};

struct CrossingLedgerRow {
  double s = 0.0;
  double min_energy = 0.0;
  std::vector<int> minimizers;      // candidate indices attaining the minimum
  bool ground_attains_min = false;
};

struct CrossingReport {
  std::optional<double> s_star;     // nullopt: no crossing found
  std::vector<CrossingLedgerRow> ledger;  // visited grid points, descending s
  int n_candidates = 0;
  int n_ground_candidates = 0;
};

inline std::vector<double> make_grid(double start, double stop, double step) {
  if (!(step > 0.0) || !(stop > start)) throw std::invalid_argument("make_grid: bad range");
  int n = static_cast<int>(std::lround((stop - start) / step));
  std::vector<double> g;
  for (int i = 0; i <= n; ++i) g.push_back(start + i * step);
  g.back() = stop;
  return g;
}

// Mean-field crossing time s*_SV: the largest grid s at which no descent of
// a classical ground state attains the instantaneous spin-vector minimum.
// Scans the grid from s=stop downward and stops at the first such s.
inline CrossingReport crossing_time(const IsingInstance& inst, const AnnealSchedule& sched,
                                    const std::vector<Candidate>& candidates,
                                    const std::vector<double>& s_grid,
                                    const CrossingOptions& opts = {}) {
  if (candidates.empty()) throw std::invalid_argument("crossing_time: empty candidate pool");
  CrossingReport rep;
  rep.n_candidates = static_cast<int>(candidates.size());
  for (const auto& c : candidates)
    if (c.is_ground) ++rep.n_ground_candidates;
  if (rep.n_ground_candidates == 0)
    throw std::invalid_argument("crossing_time: need at least one ground-state candidate");

  std::vector<RotorState> corners;
  corners.reserve(candidates.size());
  for (const auto& c : candidates) corners.push_back(corner_state(c.state));

  for (auto it = s_grid.rbegin(); it != s_grid.rend(); ++it) {
    const double s = *it;
    CrossingLedgerRow row;
    row.s = s;
    std::vector<double> energies(candidates.size());
    double emin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      energies[i] = descend(inst, sched, s, corners[i], opts.descent).energy;
      emin = std::min(emin, energies[i]);
    }
    const double tie = opts.tie_rel_tol * std::max(1e-30, std::abs(emin));
    for (std::size_t i = 0; i < candidates.size(); ++i)
      if (energies[i] <= emin + tie) {
        row.minimizers.push_back(static_cast<int>(i));
        if (candidates[i].is_ground) row.ground_attains_min = true;
      }
    row.min_energy = emin;
    rep.ledger.push_back(row);
    if (!row.ground_attains_min) {
      rep.s_star = s;
      return rep;
    }
  }
  return rep;  // ground descents win everywhere: no crossing
}

// Per-candidate excitation curves over the grid: sv_energy of the descended
// candidate minus the instantaneous minimum over candidates.
inline std::vector<std::vector<double>> mf_spectrum(const IsingInstance& inst,
                                                    const AnnealSchedule& sched,
                                                    const std::vector<Candidate>& candidates,
                                                    const std::vector<double>& s_grid,
                                                    const CrossingOptions& opts = {}) {
  if (candidates.empty()) throw std::invalid_argument("mf_spectrum: empty candidate pool");
  std::vector<std::vector<double>> curves(candidates.size(),
                                          std::vector<double>(s_grid.size(), 0.0));
  for (std::size_t si = 0; si < s_grid.size(); ++si) {
    double emin = std::numeric_limits<double>::infinity();
    std::vector<double> energies(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      energies[i] = descend(inst, sched, s_grid[si], corner_state(candidates[i].state),
                            opts.descent)
                        .energy;
      emin = std::min(emin, energies[i]);
    }
    for (std::size_t i = 0; i < candidates.size(); ++i) curves[i][si] = energies[i] - emin;
  }
  return curves;
}

}  // namespace ctails
