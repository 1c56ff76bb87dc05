#pragma once

#include <algorithm>
#include <climits>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "ctails/exact.hpp"
#include "ctails/ising.hpp"
#include "ctails/metrics.hpp"

namespace ctails {

// Timing convention for modeled wall clock: spin updates per nanosecond.
inline constexpr double kSpinUpdatesPerNs = 6.65;

struct SASchedule {
  double beta0 = 0.01;
  double betaf = 5.0;
  int sweeps = 1024;
};

inline void validate(const SASchedule& s) {
  if (!(s.beta0 < s.betaf))
    throw std::invalid_argument("SASchedule: beta0 must be < betaf");
  if (s.sweeps < 1) throw std::invalid_argument("SASchedule: sweeps must be >= 1");
}

struct SABatchOptions {
  int batch_size = 100;
  long long max_samples = 10000;
  int target_hits = 100;
  int keep_best = 0;  // retain up to this many lowest-energy distinct states
};

struct SAResult {
  long long samples = 0;
  long long ground_hits = 0;
  double p_hat = 0.0;
  int sweeps = 0;
  double ns_per_sample = 0.0;  // sweeps * n / 6.65
  long long best_energy = LLONG_MAX;
  std::vector<std::pair<long long, SpinState>> kept;  // (energy, state), ascending
};

struct NoiseModel {
  double sigma = 0.0;  // Gaussian misspecification per h/J entry, full energy scale
};

struct ExperimentLayout {
  int gauges = 10;
  int repetitions = 10;
};

namespace detail {

// Flattened couplings for the Metropolis inner loop.  T=int runs the exact
// integer representation (beta premultiplied by alpha/denom); T=double runs
// a perturbed Hamiltonian directly.
template <typename T>
struct SAView {
  std::vector<Qubit> sites;  // operable qubits, fixed sweep order
  std::vector<int> offset;   // per site position into nbr/jval
  std::vector<int> nbr;      // neighbor slot within `sites`
  std::vector<T> jval;
  std::vector<T> hval;
  double beta_scale = 1.0;
};

template <typename T>
SAView<T> make_view(const IsingInstance& inst) {
  SAView<T> v;
  const ChimeraGraph& g = inst.parent();
  std::vector<int> slot(g.num_sites(), -1);
  for (Qubit q = 0; q < g.num_sites(); ++q)
    if (g.operable(q)) {
      slot[q] = static_cast<int>(v.sites.size());
      v.sites.push_back(q);
    }
  v.offset.assign(v.sites.size() + 1, 0);
  for (std::size_t i = 0; i < v.sites.size(); ++i) {
    Qubit q = v.sites[i];
    v.offset[i + 1] = v.offset[i];
    for (const auto& a : g.neighbors(q)) {
      if (!inst.graph().edge_active(a.edge)) continue;
      v.nbr.push_back(slot[a.q]);
      v.jval.push_back(static_cast<T>(inst.coupling_int(a.edge)));
      ++v.offset[i + 1];
    }
    v.hval.push_back(static_cast<T>(inst.field_int(q)));
  }
  v.beta_scale = inst.scale();
  return v;
}

inline SAView<double> make_perturbed_view(const IsingInstance& inst, double sigma, Rng& rng) {
  SAView<double> v = make_view<double>(inst);
  const double s = inst.scale();
  for (auto& j : v.jval) j *= s;
  for (auto& h : v.hval) h *= s;
  v.beta_scale = 1.0;
  if (sigma > 0.0) {
    std::normal_distribution<double> noise(0.0, sigma);
    // One draw per physical coupler; jval holds each coupler twice, so the
    // mirror entry gets the same perturbation.
    for (std::size_t i = 0; i < v.sites.size(); ++i)
      for (int p = v.offset[i]; p < v.offset[i + 1]; ++p)
        if (v.nbr[p] > static_cast<int>(i)) {
          double eps = noise(rng);
          v.jval[p] += eps;
          int j = v.nbr[p];
          for (int q = v.offset[j]; q < v.offset[j + 1]; ++q)
            if (v.nbr[q] == static_cast<int>(i)) v.jval[q] += eps;
        }
    for (auto& h : v.hval) h += noise(rng);
  }
  return v;
}

template <typename T>
SpinState sa_sample_view(const SAView<T>& v, int n_sites_total, const SASchedule& sched,
                         Rng& rng) {
  const std::size_t n = v.sites.size();
  std::vector<std::int8_t> s(n);
  for (auto& x : s) x = static_cast<std::int8_t>(coin_spin(rng));
  std::vector<T> f(n);
  for (std::size_t i = 0; i < n; ++i) {
    T acc = v.hval[i];
    for (int p = v.offset[i]; p < v.offset[i + 1]; ++p) acc += v.jval[p] * s[v.nbr[p]];
    f[i] = acc;
  }
  for (int t = 0; t < sched.sweeps; ++t) {
    double beta = (sched.sweeps == 1)
                      ? sched.betaf
                      : sched.beta0 + (sched.betaf - sched.beta0) * t / (sched.sweeps - 1);
    const double be = beta * v.beta_scale;
    for (std::size_t i = 0; i < n; ++i) {
      const double dE = -2.0 * s[i] * static_cast<double>(f[i]);
      // Zero-cost (floppy) moves flip with probability 1/2: any symmetric
      // rule satisfies detailed balance, and 1/2 keeps the chain aperiodic.
      if (dE > 0.0 && uniform01(rng) >= std::exp(-be * dE)) continue;
      if (dE == 0.0 && uniform01(rng) >= 0.5) continue;
      s[i] = static_cast<std::int8_t>(-s[i]);
      const T two_si = static_cast<T>(2 * s[i]);
      for (int p = v.offset[i]; p < v.offset[i + 1]; ++p) f[v.nbr[p]] += v.jval[p] * two_si;
    }
  }
  SpinState out(n_sites_total, 1);
  for (std::size_t i = 0; i < n; ++i) out[v.sites[i]] = s[i];
  return out;
}

inline void keep_state(SAResult& r, int cap, long long e, const SpinState& s) {
  if (cap <= 0) return;
  if (static_cast<int>(r.kept.size()) == cap && e >= r.kept.back().first) return;
  for (const auto& [ke, ks] : r.kept)
    if (ke == e && ks == s) return;
  auto pos = std::upper_bound(r.kept.begin(), r.kept.end(), e,
                              [](long long a, const auto& b) { return a < b.first; });
  r.kept.insert(pos, {e, s});
  if (static_cast<int>(r.kept.size()) > cap) r.kept.pop_back();
}

template <typename T>
SAResult sa_batch_view(const IsingInstance& inst, const SAView<T>& v, const SASchedule& sched,
                       const SABatchOptions& opts, long long ground_energy, Rng& rng) {
  validate(sched);
  SAResult r;
  r.sweeps = sched.sweeps;
  r.ns_per_sample = static_cast<double>(sched.sweeps) * v.sites.size() / kSpinUpdatesPerNs;
  while (r.ground_hits < opts.target_hits && r.samples < opts.max_samples) {
    for (int b = 0; b < opts.batch_size; ++b) {
      SpinState s = sa_sample_view(v, inst.num_sites(), sched, rng);
      long long e = energy_int(inst, s);
      ++r.samples;
      if (e == ground_energy) ++r.ground_hits;
      r.best_energy = std::min(r.best_energy, e);
      keep_state(r, opts.keep_best, e, s);
    }
  }
  r.p_hat = r.samples ? static_cast<double>(r.ground_hits) / r.samples : 0.0;
  return r;
}

}  // namespace detail

// One anneal: random initial state, Metropolis sweeps with beta linear from
// beta0 to betaf; the alpha prefactor enters the acceptance as beta -> alpha*beta.
inline SpinState sa_sample(const IsingInstance& inst, const SASchedule& sched, Rng& rng) {
  validate(sched);
  auto v = detail::make_view<int>(inst);
  return detail::sa_sample_view(v, inst.num_sites(), sched, rng);
}

// One Metropolis sweep at fixed beta (beta measured against max|J|=1 units).
inline void metropolis_sweep(const IsingInstance& inst, SpinState& s, double beta, Rng& rng) {
  check_dims(inst, s);
  const double be = beta * inst.scale();
  for (Qubit q = 0; q < inst.num_sites(); ++q) {
    if (!inst.parent().operable(q)) continue;
    long long f = effective_field_int(inst, s, q);
    double dE = -2.0 * s[q] * static_cast<double>(f);
    if (dE > 0.0 && uniform01(rng) >= std::exp(-be * dE)) continue;
    if (dE == 0.0 && uniform01(rng) >= 0.5) continue;
    s[q] = static_cast<std::int8_t>(-s[q]);
  }
}

// Batched sampling against a known ground energy: draws in atomic batches
// until target_hits ground states are seen or max_samples drawn.
inline SAResult sa_batch(const IsingInstance& inst, const SASchedule& sched,
                         const SABatchOptions& opts, long long ground_energy, Rng& rng) {
  auto v = detail::make_view<int>(inst);
  return detail::sa_batch_view(inst, v, sched, opts, ground_energy, rng);
}

struct SweepOptResult {
  int best_sweeps = 0;
  SAResult result;
  bool solved = false;
};

// Pick the anneal length minimizing modeled total time sweeps * R(p_hat);
// ties favor fewer sweeps.
inline SweepOptResult optimize_sweeps(const IsingInstance& inst,
                                      const std::vector<int>& candidate_sweeps,
                                      SASchedule base, const SABatchOptions& opts,
                                      long long ground_energy, Rng& rng) {
  if (candidate_sweeps.empty())
    throw std::invalid_argument("optimize_sweeps: candidate list is empty");
  auto v = detail::make_view<int>(inst);
  SweepOptResult out;
  double best_cost = std::numeric_limits<double>::infinity();
  for (int sweeps : candidate_sweeps) {
    base.sweeps = sweeps;
    SAResult r = detail::sa_batch_view(inst, v, base, opts, ground_energy, rng);
    double cost = sweeps * repetitions_R(r.p_hat);
    if (r.p_hat > 0.0 && cost < best_cost) {
      best_cost = cost;
      out.best_sweeps = sweeps;
      out.result = r;
      out.solved = true;
    }
  }
  return out;
}

// Noisy-SA control-error protocol: gauges x repetitions experiments, each on
// a freshly perturbed Hamiltonian, scored against the unperturbed ground
// energy.  Noise is relative to full energy scale, so alpha-scaled runs see
// 1/alpha times the relative error.
inline std::vector<SAResult> noisy_sa(const IsingInstance& inst, const NoiseModel& noise,
                                      const SASchedule& sched, const ExperimentLayout& layout,
                                      const SABatchOptions& opts, long long ground_energy,
                                      Rng& rng) {
  if (noise.sigma < 0.0) throw std::invalid_argument("noisy_sa: sigma must be >= 0");
  std::vector<SAResult> out;
  out.reserve(static_cast<std::size_t>(layout.gauges) * layout.repetitions);
  for (int gi = 0; gi < layout.gauges; ++gi) {
    Gauge gauge = random_gauge(inst.parent(), rng);
    IsingInstance gauged = spin_reversal(inst, gauge);
    for (int rep = 0; rep < layout.repetitions; ++rep) {
      auto v = detail::make_perturbed_view(gauged, noise.sigma, rng);
      out.push_back(detail::sa_batch_view(gauged, v, sched, opts, ground_energy, rng));
    }
  }
  return out;
}

}  // namespace ctails
