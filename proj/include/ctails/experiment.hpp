#pragma once

#include <atomic>
#include <climits>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "ctails/config.hpp"
#include "ctails/degree_reduction.hpp"
#include "ctails/exact.hpp"
#include "ctails/instance.hpp"
#include "ctails/meanfield.hpp"
#include "ctails/metrics.hpp"
#include "ctails/records.hpp"
#include "ctails/sa.hpp"

namespace ctails {

namespace fs = std::filesystem;

struct MeanfieldSpec {
  double grid_start = 0.10;
  double grid_stop = 1.00;
  double grid_step = 0.005;
  int max_candidates = 200;  // excited-state pool cap
  long long harvest_samples = 500;
  std::string schedule = "default";  // "default" or a CSV path
};

struct EnsembleSpec {
  int schema = 1;
  int L = 4;
  int n_instances = 1000;
  std::string family = "uk";  // "uk" or "sidon28"
  int k = 1;
  int d = 6;
  std::vector<Qubit> inoperable;
  std::uint64_t master_seed = 0;
  std::vector<double> alphas{1.0};
  std::vector<double> sigmas{0.0};
  SASchedule sa;
  SABatchOptions batch;
  ExperimentLayout layout;  // used for sigma > 0 runs
  MeanfieldSpec mf;
};

inline EnsembleSpec load_spec(const Config& cfg) {
  EnsembleSpec s;
  s.schema = static_cast<int>(cfg.get_int("ensemble.schema", 1));
  if (s.schema != 1) throw std::runtime_error("spec: unsupported schema version");
  s.L = static_cast<int>(cfg.get_int("ensemble.L", 4));
  s.n_instances = static_cast<int>(cfg.get_int("ensemble.n_instances", 1000));
  s.family = cfg.get("ensemble.family", "uk");
  if (s.family != "uk" && s.family != "sidon28")
    throw std::runtime_error("spec: family must be uk or sidon28");
  s.k = static_cast<int>(cfg.get_int("ensemble.k", 1));
  s.d = static_cast<int>(cfg.get_int("ensemble.d", 6));
  if (s.L < 1 || s.n_instances < 1 || s.k < 1 || s.d < 3 || s.d > 6)
    throw std::runtime_error("spec: invalid ensemble parameters");
  {
    std::istringstream ss(cfg.get("ensemble.inoperable", ""));
    std::string tok;
    while (std::getline(ss, tok, ','))
      if (!tok.empty()) s.inoperable.push_back(std::stoi(tok));
  }
  s.master_seed = static_cast<std::uint64_t>(cfg.get_int("ensemble.master_seed", 0));
  s.alphas = cfg.get_double_list("ensemble.alpha", {1.0});
  s.sigmas = cfg.get_double_list("ensemble.sigma", {0.0});
  for (double a : s.alphas)
    if (!(a > 0.0 && a <= 1.0)) throw std::runtime_error("spec: alpha must lie in (0,1]");
  s.sa.beta0 = cfg.get_double("sa.beta0", 0.01);
  s.sa.betaf = cfg.get_double("sa.betaf", 5.0);
  s.sa.sweeps = static_cast<int>(cfg.get_int("sa.sweeps", 1024));
  validate(s.sa);
  s.batch.batch_size = static_cast<int>(cfg.get_int("sa.batch", 100));
  s.batch.max_samples = cfg.get_int("sa.max_samples", 10000);
  s.batch.target_hits = static_cast<int>(cfg.get_int("sa.target_hits", 100));
  s.layout.gauges = static_cast<int>(cfg.get_int("sa.gauges", 10));
  s.layout.repetitions = static_cast<int>(cfg.get_int("sa.repetitions", 10));
  s.mf.grid_start = cfg.get_double("meanfield.grid_start", 0.10);
  s.mf.grid_stop = cfg.get_double("meanfield.grid_stop", 1.00);
  s.mf.grid_step = cfg.get_double("meanfield.grid_step", 0.005);
  s.mf.max_candidates = static_cast<int>(cfg.get_int("meanfield.candidates", 200));
  s.mf.harvest_samples = cfg.get_int("meanfield.harvest_samples", 500);
  s.mf.schedule = cfg.get("meanfield.schedule", "default");
  return s;
}

inline std::string instance_id(const EnsembleSpec& spec, int index) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "C%d_%s%dd%d_i%05d", spec.L,
                spec.family == "uk" ? "U" : "S", spec.family == "uk" ? spec.k : 28, spec.d,
                index);
  return buf;
}

inline std::string format_g17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string solver_config_hash(const std::string& solver, double alpha, double sigma,
                                      const SASchedule& sched, const SABatchOptions& opts) {
  std::ostringstream ss;
  ss << solver << "|a=" << format_g17(alpha) << "|s=" << format_g17(sigma)
     << "|b0=" << format_g17(sched.beta0) << "|bf=" << format_g17(sched.betaf)
     << "|sw=" << sched.sweeps << "|bs=" << opts.batch_size << "|ms=" << opts.max_samples
     << "|th=" << opts.target_hits;
  return ss.str();
}

// Run fn(0..n-1); slot-indexed outputs keep results deterministic under any
// degree of parallelism.
inline void parallel_for(int n, int jobs, const std::function<void(int)>& fn) {
  if (jobs <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int t = 0; t < jobs; ++t)
    pool.emplace_back([&] {
      for (;;) {
        int i = next.fetch_add(1);
        if (i >= n) return;
        fn(i);
      }
    });
  for (auto& th : pool) th.join();
}

inline AnnealSchedule resolve_schedule(const MeanfieldSpec& mf) {
  if (mf.schedule == "default") return AnnealSchedule::default_synthetic();
  return AnnealSchedule::load_csv_file(mf.schedule);
}

// ---------------------------------------------------------------------------
// generate: instance files plus exact ground truths where the DP applies.

struct GenerateSummary {
  int generated = 0;
  int skipped = 0;
  std::vector<std::string> skipped_ids;
};

inline GenerateSummary cmd_generate(const EnsembleSpec& spec, const std::string& outdir,
                                    int jobs = 1) {
  fs::create_directories(fs::path(outdir) / "instances");
  auto parent = std::make_shared<ChimeraGraph>(spec.L, spec.inoperable);
  GenerateSummary summary;
  std::vector<std::optional<IsingInstance>> made(spec.n_instances);
  std::vector<std::optional<GroundTruth>> gts(spec.n_instances);
  const bool dp_ok = 4 * spec.L <= 24;

  parallel_for(spec.n_instances, jobs, [&](int i) {
    ReductionConfig rc;
    rc.target_degree = spec.d;
    rc.seed = derive_seed(spec.master_seed, i, "graph");
    try {
      Subgraph sub = reduce_to_degree(parent, rc);
      Rng rng(derive_seed(spec.master_seed, i, "couplings"));
      IsingInstance inst = spec.family == "uk" ? sample_uk(sub, spec.k, rng)
                                               : sample_sidon28(sub, rng);
      InstanceMeta meta = inst.meta();
      meta.id = instance_id(spec, i);
      meta.target_degree = spec.d;
      meta.graph_seed = rc.seed;
      meta.coupling_seed = derive_seed(spec.master_seed, i, "couplings");
      IsingInstance named(inst.graph(), inst.couplings_int(), inst.fields_int(), meta);
      if (dp_ok) gts[i] = column_dp_ground(named);
      made[i] = std::move(named);
    } catch (const ReductionError&) {
      // skipped; reported in the summary
    }
  });

  std::map<std::string, GroundTruth> cache;
  for (int i = 0; i < spec.n_instances; ++i) {
    if (!made[i]) {
      ++summary.skipped;
      summary.skipped_ids.push_back(instance_id(spec, i));
      continue;
    }
    const auto& inst = *made[i];
    save_instance(inst, (fs::path(outdir) / "instances" / (inst.meta().id + ".txt")).string());
    if (gts[i]) cache[inst.meta().id] = *gts[i];
    ++summary.generated;
  }
  save_ground_truths(cache, (fs::path(outdir) / "ground_truth.txt").string());
  return summary;
}

inline std::vector<std::string> list_instance_files(const std::string& outdir) {
  std::vector<std::string> files;
  fs::path dir = fs::path(outdir) / "instances";
  if (!fs::exists(dir)) return files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ".txt") files.push_back(e.path().string());
  std::sort(files.begin(), files.end());
  return files;
}

// Ground reference for scoring; falls back to a best-found scout run when no
// exact truth is cached.  The cache is updated in that case.
inline GroundTruth ensure_ground(const IsingInstance& inst,
                                 std::map<std::string, GroundTruth>& cache,
                                 const EnsembleSpec& spec) {
  auto it = cache.find(inst.meta().id);
  if (it != cache.end()) return it->second;
  Rng rng(derive_seed(spec.master_seed, mix64(std::hash<std::string>{}(inst.meta().id)),
                      "scout"));
  SABatchOptions scout = spec.batch;
  scout.target_hits = scout.batch_size;  // just draw a couple of batches
  scout.max_samples = 2 * scout.batch_size;
  SAResult r = sa_batch(inst, spec.sa, scout, LLONG_MIN, rng);
  GroundTruth gt;
  gt.energy = r.best_energy;
  gt.degeneracy = 0;
  gt.method = GroundMethod::best_found;
  cache[inst.meta().id] = gt;
  return gt;
}

// ---------------------------------------------------------------------------
// solve: SA / noisy-SA experiments, resumable by record key.

struct SolveSummary {
  int records_written = 0;
  int records_skipped = 0;  // already present
  int instances = 0;
};

inline SolveSummary cmd_solve(const EnsembleSpec& spec, const std::string& outdir,
                              int jobs = 1) {
  SolveSummary summary;
  auto files = list_instance_files(outdir);
  summary.instances = static_cast<int>(files.size());
  const std::string record_path = (fs::path(outdir) / "records.jsonl").string();
  const std::string gt_path = (fs::path(outdir) / "ground_truth.txt").string();
  std::map<std::string, GroundTruth> cache;
  if (fs::exists(gt_path)) cache = load_ground_truths(gt_path);
  std::set<std::string> existing;
  for (const auto& r : load_records(record_path)) existing.insert(r.key());

  std::vector<std::vector<ExperimentRecord>> produced(files.size());
  std::mutex cache_mu;

  parallel_for(static_cast<int>(files.size()), jobs, [&](int fi) {
    IsingInstance base = load_instance(files[fi]);
    GroundTruth gt;
    {
      std::lock_guard<std::mutex> lk(cache_mu);
      gt = ensure_ground(base, cache, spec);
    }
    for (double alpha : spec.alphas) {
      IsingInstance inst = apply_scale(base, alpha);
      for (double sigma : spec.sigmas) {
        const std::string solver = sigma > 0.0 ? "noisy_sa" : "sa";
        const std::string hash =
            solver_config_hash(solver, alpha, sigma, spec.sa, spec.batch);
        const std::uint64_t seed = derive_seed(spec.master_seed,
                                               mix64(std::hash<std::string>{}(base.meta().id)),
                                               hash);
        if (sigma == 0.0) {
          ExperimentRecord rec;
          rec.instance_id = base.meta().id;
          rec.solver = solver;
          rec.config_hash = hash;
          rec.alpha = alpha;
          rec.sigma = sigma;
          rec.sweeps = spec.sa.sweeps;
          rec.seed = seed;
          rec.ground_method = to_string(gt.method);
          if (existing.count(rec.key())) continue;
          Rng rng(seed);
          SAResult r = sa_batch(inst, spec.sa, spec.batch, gt.energy, rng);
          rec.samples = r.samples;
          rec.ground_hits = r.ground_hits;
          rec.p_hat = r.p_hat;
          rec.ns_per_sample = r.ns_per_sample;
          produced[fi].push_back(rec);
        } else {
          // The whole gauge grid shares one RNG stream; skip only if every
          // record of the grid is already present.
          bool all_present = true;
          for (int g = 0; g < spec.layout.gauges && all_present; ++g)
            for (int rep = 0; rep < spec.layout.repetitions && all_present; ++rep) {
              ExperimentRecord probe;
              probe.instance_id = base.meta().id;
              probe.config_hash = hash;
              probe.gauge = g;
              probe.repetition = rep;
              if (!existing.count(probe.key())) all_present = false;
            }
          if (all_present) continue;
          Rng rng(seed);
          NoiseModel noise{sigma};
          auto results = noisy_sa(inst, noise, spec.sa, spec.layout, spec.batch, gt.energy, rng);
          int idx = 0;
          for (int g = 0; g < spec.layout.gauges; ++g)
            for (int rep = 0; rep < spec.layout.repetitions; ++rep, ++idx) {
              ExperimentRecord rec;
              rec.instance_id = base.meta().id;
              rec.solver = solver;
              rec.config_hash = hash;
              rec.alpha = alpha;
              rec.sigma = sigma;
              rec.sweeps = spec.sa.sweeps;
              rec.gauge = g;
              rec.repetition = rep;
              rec.seed = seed;
              rec.ground_method = to_string(gt.method);
              rec.samples = results[idx].samples;
              rec.ground_hits = results[idx].ground_hits;
              rec.p_hat = results[idx].p_hat;
              rec.ns_per_sample = results[idx].ns_per_sample;
              if (!existing.count(rec.key())) produced[fi].push_back(rec);
            }
        }
      }
    }
  });

  std::vector<ExperimentRecord> flat;
  for (auto& v : produced)
    for (auto& r : v) flat.push_back(std::move(r));
  append_records(flat, record_path);
  save_ground_truths(cache, gt_path);
  summary.records_written = static_cast<int>(flat.size());
  return summary;
}

// ---------------------------------------------------------------------------
// meanfield: crossing times per instance.

struct MeanfieldSummary {
  int computed = 0;
  int flagged = 0;
};

inline MeanfieldSummary cmd_meanfield(const EnsembleSpec& spec, const std::string& outdir,
                                      int jobs = 1) {
  auto files = list_instance_files(outdir);
  const std::string gt_path = (fs::path(outdir) / "ground_truth.txt").string();
  std::map<std::string, GroundTruth> cache;
  if (fs::exists(gt_path)) cache = load_ground_truths(gt_path);
  AnnealSchedule sched = resolve_schedule(spec.mf);
  std::vector<double> grid = make_grid(spec.mf.grid_start, spec.mf.grid_stop, spec.mf.grid_step);

  struct Row {
    std::string id;
    std::optional<double> s_star;
    int n_candidates = 0;
    int n_ground = 0;
    std::string status = "ok";
  };
  std::vector<Row> rows(files.size());
  std::mutex cache_mu;

  parallel_for(static_cast<int>(files.size()), jobs, [&](int fi) {
    IsingInstance inst = load_instance(files[fi]);
    Row& row = rows[fi];
    row.id = inst.meta().id;
    GroundTruth gt;
    {
      std::lock_guard<std::mutex> lk(cache_mu);
      gt = ensure_ground(inst, cache, spec);
    }
    // Candidate pool: SA-harvested low-energy distinct states, split into
    // ground states (verified against the exact energy) and excited states.
    SABatchOptions harvest = spec.batch;
    harvest.max_samples = spec.mf.harvest_samples;
    harvest.target_hits = INT_MAX;  // draw the full harvest
    harvest.keep_best = spec.mf.max_candidates + 8;
    Rng rng(derive_seed(spec.master_seed, mix64(std::hash<std::string>{}(inst.meta().id)),
                        "harvest"));
    SAResult h = sa_batch(inst, spec.sa, harvest, gt.energy, rng);
    std::vector<Candidate> pool;
    int n_excited = 0;
    for (const auto& [e, st] : h.kept) {
      Candidate c{st, e, e == gt.energy};
      if (!c.is_ground && n_excited >= spec.mf.max_candidates) continue;
      if (!c.is_ground) ++n_excited;
      pool.push_back(std::move(c));
    }
    row.n_candidates = static_cast<int>(pool.size());
    for (const auto& c : pool) row.n_ground += c.is_ground;
    if (row.n_ground == 0) {
      row.status = "no_ground_candidate";
      return;
    }
    if (n_excited == 0) {
      row.status = "no_excited_candidate";
      return;
    }
    CrossingReport rep = crossing_time(inst, sched, pool, grid);
    row.s_star = rep.s_star;
  });

  std::ofstream os((fs::path(outdir) / "crossings.csv").string());
  os << "# grid=" << format_g17(spec.mf.grid_start) << ":" << format_g17(spec.mf.grid_stop)
     << ":" << format_g17(spec.mf.grid_step) << " schedule=" << spec.mf.schedule
     << " harvest_samples=" << spec.mf.harvest_samples << "\n";
  os << "id,s_star,n_candidates,n_ground,status\n";
  MeanfieldSummary summary;
  for (const auto& r : rows) {
    os << r.id << "," << (r.s_star ? format_g17(*r.s_star) : std::string("none")) << ","
       << r.n_candidates << "," << r.n_ground << "," << r.status << "\n";
    if (r.status == "ok") ++summary.computed;
    else ++summary.flagged;
  }
  save_ground_truths(cache, gt_path);
  return summary;
}

// ---------------------------------------------------------------------------
// analyze: CSV families for the figure-style outputs.

inline std::string render_R(double r) {
  return std::isinf(r) ? "censored" : format_g17(r);
}

inline void cmd_analyze(const EnsembleSpec& spec, const std::string& outdir) {
  (void)spec;
  fs::create_directories(fs::path(outdir) / "analysis");
  auto records = load_records((fs::path(outdir) / "records.jsonl").string());

  // Pooled per-instance hardness per solver configuration.
  struct Agg {
    long long samples = 0, hits = 0;
    double ns_per_sample = 0;
    ExperimentRecord proto;
    std::vector<double> experiment_R;
  };
  std::map<std::pair<std::string, std::string>, Agg> agg;  // (config, instance)
  for (const auto& r : records) {
    auto& a = agg[{r.config_hash, r.instance_id}];
    a.samples += r.samples;
    a.hits += r.ground_hits;
    a.ns_per_sample = r.ns_per_sample;
    a.proto = r;
    a.experiment_R.push_back(repetitions_R(r.p_hat));
  }

  {
    std::ofstream os((fs::path(outdir) / "analysis" / "hardness.csv").string());
    os << "config,instance,solver,alpha,sigma,sweeps,samples,hits,p_hat,R,model_time_ns\n";
    for (const auto& [key, a] : agg) {
      double p = a.samples ? static_cast<double>(a.hits) / a.samples : 0.0;
      double R = repetitions_R(p);
      double model_time =
          std::isinf(R) ? std::numeric_limits<double>::infinity()
                        : std::max(1.0, R) * a.ns_per_sample;
      os << key.first << "," << key.second << "," << a.proto.solver << ","
         << format_g17(a.proto.alpha) << "," << format_g17(a.proto.sigma) << ","
         << a.proto.sweeps << "," << a.samples << "," << a.hits << "," << format_g17(p) << ","
         << render_R(R) << "," << render_R(model_time) << "\n";
    }
  }

  {
    // Hardness-percentile curves per configuration.
    std::map<std::string, std::vector<double>> byconfig;
    std::map<std::string, ExperimentRecord> proto;
    for (const auto& [key, a] : agg) {
      double p = a.samples ? static_cast<double>(a.hits) / a.samples : 0.0;
      byconfig[key.first].push_back(repetitions_R(p));
      proto[key.first] = a.proto;
    }
    std::ofstream os((fs::path(outdir) / "analysis" / "percentiles.csv").string());
    os << "config,solver,alpha,sigma,sweeps,percentile,R\n";
    for (auto& [cfg, rs] : byconfig) {
      for (int p = 1; p <= 99; ++p) {
        double v = nearest_rank(rs, static_cast<double>(p));
        os << cfg << "," << proto[cfg].solver << "," << format_g17(proto[cfg].alpha) << ","
           << format_g17(proto[cfg].sigma) << "," << proto[cfg].sweeps << "," << p << ","
           << render_R(v) << "\n";
      }
    }
  }

  {
    // Quantile-spread table per configuration (error-sensitivity view).
    std::map<std::string, std::map<std::string, std::vector<double>>> grids;
    for (const auto& [key, a] : agg)
      if (a.experiment_R.size() > 1) grids[key.first][key.second] = a.experiment_R;
    std::ofstream os((fs::path(outdir) / "analysis" / "quantile_spread.csv").string());
    os << "config,instance,R_median,R25,R75,spread,censored_median\n";
    for (const auto& [cfg, byinst] : grids) {
      auto rows = quantile_spread(byinst);
      for (const auto& r : rows)
        os << cfg << "," << r.id << "," << render_R(r.r_median) << "," << render_R(r.r25)
           << "," << render_R(r.r75) << "," << render_R(r.spread) << ","
           << (r.censored_median ? 1 : 0) << "\n";
    }
  }

  {
    // ECDF of crossing times; "none" plotted at s = 0.10.
    std::vector<double> sstars;
    std::ifstream is((fs::path(outdir) / "crossings.csv").string());
    std::string line;
    while (is && std::getline(is, line)) {
      if (line.empty() || line[0] == '#' || line.rfind("id,", 0) == 0) continue;
      std::istringstream ls(line);
      std::string id, sstar, rest;
      std::getline(ls, id, ',');
      std::getline(ls, sstar, ',');
      std::string status;
      std::getline(ls, rest, ',');
      std::getline(ls, rest, ',');
      std::getline(ls, status, ',');
      if (status != "ok" && status != "no_excited_candidate") continue;
      sstars.push_back(sstar == "none" ? kNoCrossingBucket : std::stod(sstar));
    }
    std::ofstream os((fs::path(outdir) / "analysis" / "ecdf_sstar.csv").string());
    os << "s_star,cumulative\n";
    for (const auto& [x, c] : ecdf(std::move(sstars)))
      os << format_g17(x) << "," << format_g17(c) << "\n";
  }
}

// ---------------------------------------------------------------------------
// floppy-stats: per-degree floppiness, random states or a low-energy window.

struct FloppyReport {
  FloppyStats stats;
  long long states_used = 0;
};

inline FloppyReport floppy_stats(const IsingInstance& inst, long long n_samples,
                                 std::optional<double> window, const EnsembleSpec& spec,
                                 Rng& rng) {
  FloppyReport rep;
  if (!window) {
    rep.stats = floppy_fraction_random(inst, n_samples, rng);
    rep.states_used = n_samples;
    return rep;
  }
  // Low-lying states: SA-sampled states within `window` (normalized energy
  // units) above the exact/best-known ground energy.
  std::map<std::string, GroundTruth> cache;
  GroundTruth gt = ensure_ground(inst, cache, spec);
  const double wint = *window / inst.scale();
  SASchedule sched = spec.sa;
  for (long long t = 0; t < n_samples; ++t) {
    SpinState s = sa_sample(inst, sched, rng);
    long long e = energy_int(inst, s);
    if (static_cast<double>(e - gt.energy) > wint) continue;
    ++rep.states_used;
    for (Qubit q = 0; q < inst.num_sites(); ++q) {
      if (!inst.parent().operable(q)) continue;
      auto& bucket = rep.stats.counts[inst.graph().degree(q)];
      ++bucket.second;
      if (effective_field_int(inst, s, q) == 0) ++bucket.first;
    }
  }
  return rep;
}

}  // namespace ctails
