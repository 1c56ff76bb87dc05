#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ctails/experiment.hpp"

using namespace ctails;

namespace {

EnsembleSpec read_spec(const std::string& path, std::optional<std::uint64_t> seed_override) {
  EnsembleSpec spec = load_spec(Config::parse_file(path));
  if (seed_override) spec.master_seed = *seed_override;
  return spec;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Degree-controlled Ising ensembles on Chimera graphs: generation, "
               "simulated annealing, mean-field crossing times, hardness analysis"};
  app.require_subcommand(1);
  app.fallthrough();  // allow global flags after the subcommand name

  std::string spec_path, outdir = "out";
  std::optional<std::uint64_t> seed_override;
  int jobs = 1;
  app.add_option("--spec", spec_path, "Ensemble spec file (INI)");
  app.add_option("--out", outdir, "Output directory")->capture_default_str();
  app.add_option("--seed", seed_override, "Override master seed from the spec");
  app.add_option("--jobs", jobs, "Worker threads")->capture_default_str();

  auto* gen = app.add_subcommand("generate", "Generate instances and exact ground truths");
  auto* solve = app.add_subcommand("solve", "Run SA / noisy-SA experiments (resumable)");
  auto* mf = app.add_subcommand("meanfield", "Compute spin-vector crossing times");
  auto* analyze = app.add_subcommand("analyze", "Write analysis CSVs from records");

  auto* floppy = app.add_subcommand("floppy-stats", "Per-degree floppy-qubit fractions");
  std::string inst_path;
  long long fl_samples = 1000;
  std::optional<double> fl_window;
  std::uint64_t fl_seed = 1;
  floppy->add_option("--instance", inst_path, "Instance file")->required();
  floppy->add_option("--samples", fl_samples, "States to sample")->capture_default_str();
  floppy->add_option("--window", fl_window,
                     "Only count states within this normalized energy above ground "
                     "(default: uniform random states)");
  floppy->add_option("--rng-seed", fl_seed, "Sampling seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (floppy->parsed()) {
      IsingInstance inst = load_instance(inst_path);
      EnsembleSpec spec;
      if (!spec_path.empty()) spec = read_spec(spec_path, seed_override);
      Rng rng(fl_seed);
      FloppyReport rep = floppy_stats(inst, fl_samples, fl_window, spec, rng);
      std::printf("states_used %lld\n", rep.states_used);
      std::printf("degree floppy total fraction\n");
      for (const auto& [deg, ft] : rep.stats.counts) {
        double frac = ft.second ? static_cast<double>(ft.first) / ft.second : 0.0;
        std::printf("%d %lld %lld %.6f\n", deg, static_cast<long long>(ft.first),
                    static_cast<long long>(ft.second), frac);
      }
      return 0;
    }

    if (spec_path.empty()) {
      std::cerr << "error: --spec is required\n";
      return 2;
    }
    EnsembleSpec spec = read_spec(spec_path, seed_override);

    if (gen->parsed()) {
      GenerateSummary s = cmd_generate(spec, outdir, jobs);
      std::printf("generated %d skipped %d\n", s.generated, s.skipped);
      for (const auto& id : s.skipped_ids) std::printf("skipped %s\n", id.c_str());
    } else if (solve->parsed()) {
      SolveSummary s = cmd_solve(spec, outdir, jobs);
      std::printf("instances %d records_written %d\n", s.instances, s.records_written);
    } else if (mf->parsed()) {
      MeanfieldSummary s = cmd_meanfield(spec, outdir, jobs);
      std::printf("computed %d flagged %d\n", s.computed, s.flagged);
    } else if (analyze->parsed()) {
      cmd_analyze(spec, outdir);
      std::printf("analysis written to %s/analysis\n", outdir.c_str());
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
