#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "ctails/exact.hpp"
#include "ctails/meanfield.hpp"

using namespace ctails;

namespace {

IsingInstance small_instance(std::uint64_t seed, int k = 2) {
  auto g = std::make_shared<ChimeraGraph>(1);
  Subgraph sub(g);
  Rng rng(seed);
  return k == 28 ? sample_sidon28(sub, rng) : sample_uk(sub, k, rng);
}

IsingInstance c1_ferromagnet() {
  auto g = std::make_shared<ChimeraGraph>(1);
  Subgraph sub(g);
  InstanceMeta meta;
  return IsingInstance(sub, std::vector<int>(16, -1), std::vector<int>(8, 0), meta);
}

}  // namespace

TEST_CASE("theta* branch of arccot(-eps h/Delta)") {
  using detail::theta_star_from_field;
  CHECK(theta_star_from_field(0.0, 2.0, 1.0) == Catch::Approx(M_PI / 2));
  CHECK(theta_star_from_field(1.0, 1.0, 1.0) == Catch::Approx(3 * M_PI / 4));
  CHECK(theta_star_from_field(-1.0, 1.0, 1.0) == Catch::Approx(M_PI / 4));
  // Classical limit Delta -> 0: align against the field.
  CHECK(theta_star_from_field(3.0, 0.0, 1.0) == M_PI);
  CHECK(theta_star_from_field(-3.0, 0.0, 1.0) == 0.0);
  CHECK(theta_star_from_field(0.0, 0.0, 1.0) == Catch::Approx(M_PI / 2));
  // Large transverse field pins theta to pi/2.
  CHECK(theta_star_from_field(1.0, 1e9, 1.0) == Catch::Approx(M_PI / 2).margin(1e-8));
}

TEST_CASE("theta* minimizes the single-coordinate energy") {
  IsingInstance inst = small_instance(4);
  AnnealSchedule sched = AnnealSchedule::default_synthetic();
  Rng rng(5);
  for (int t = 0; t < 300; ++t) {
    double s = 0.05 + 0.9 * uniform01(rng);
    RotorState theta(inst.num_sites());
    for (auto& x : theta) x = M_PI * uniform01(rng);
    Qubit q = static_cast<Qubit>(bounded(rng, inst.num_sites()));
    double ts = theta_star(inst, sched, s, theta, q);
    auto at = [&](double v) {
      RotorState t2 = theta;
      t2[q] = v;
      return sv_energy(inst, sched, s, t2);
    };
    double e_star = at(ts);
    for (double d : {-0.3, -0.01, 0.01, 0.3}) {
      double v = std::clamp(ts + d, 0.0, M_PI);
      CHECK(e_star <= at(v) + 1e-12);
    }
  }
}

TEST_CASE("schedule interpolation and invariants") {
  AnnealSchedule sched = AnnealSchedule::default_synthetic();
  CHECK(sched.delta(0.0) == Catch::Approx(6.0));
  CHECK(sched.epsilon(1.0) == Catch::Approx(12.0));
  CHECK(sched.delta(0.05) == Catch::Approx(5.5));
  CHECK(sched.transverse_ratio(0.0) > 10.0);
  CHECK(sched.transverse_ratio(1.0) < 0.1);
  CHECK_THROWS_AS(sched.delta(1.5), std::invalid_argument);
  // Invalid constructions.
  CHECK_THROWS_AS(AnnealSchedule({0.0, 1.0}, {6.0, 5.0}, {0.1, 12.0}),
                  std::invalid_argument);  // transverse field never turns off
  CHECK_THROWS_AS(AnnealSchedule({0.0, 0.5}, {6.0, 0.0}, {0.1, 12.0}),
                  std::invalid_argument);  // does not cover [0,1]
  CHECK_THROWS_AS(AnnealSchedule({0.0, 0.5, 0.5, 1.0}, {6.0, 3.0, 2.0, 0.0},
                                 {0.1, 1.0, 2.0, 12.0}),
                  std::invalid_argument);  // not strictly increasing
}

TEST_CASE("schedule CSV round trip is byte identical") {
  AnnealSchedule sched = AnnealSchedule::default_synthetic();
  std::ostringstream a;
  sched.save_csv(a);
  std::istringstream in(a.str());
  AnnealSchedule back = AnnealSchedule::load_csv(in);
  std::ostringstream b;
  back.save_csv(b);
  CHECK(a.str() == b.str());
}

TEST_CASE("descent is monotone and reaches a fixed point") {
  AnnealSchedule sched = AnnealSchedule::default_synthetic();
  Rng rng(9);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    IsingInstance inst = small_instance(derive_seed(1, seed, "mf"));
    for (double s : {0.2, 0.5, 0.8, 0.95}) {
      RotorState theta0(inst.num_sites());
      for (auto& x : theta0) x = M_PI * uniform01(rng);
      DescentResult r = descend(inst, sched, s, theta0);
      CHECK(r.converged);
      CHECK(r.monotone);
      CHECK(r.residual < 1e-8);
      // Restarting from the fixed point stays put.
      DescentResult r2 = descend(inst, sched, s, r.theta);
      CHECK(r2.passes <= 2);
      CHECK(r2.energy == Catch::Approx(r.energy).margin(1e-9));
    }
  }
}

TEST_CASE("s=1 endpoint: spin-vector energy of corners matches classical exactly") {
  IsingInstance inst = small_instance(12, 28);
  AnnealSchedule sched = AnnealSchedule::default_synthetic();
  Rng rng(13);
  for (int t = 0; t < 50; ++t) {
    SpinState s = random_state(inst.parent(), rng);
    double sv = sv_energy(inst, sched, 1.0, corner_state(s));
    CHECK(sv == Catch::Approx(0.5 * sched.epsilon(1.0) * energy(inst, s)).epsilon(1e-12));
  }
}

TEST_CASE("descent energies are gauge covariant") {
  IsingInstance inst = small_instance(21);
  AnnealSchedule sched = AnnealSchedule::default_synthetic();
  Rng rng(22);
  Gauge gauge = random_gauge(inst.parent(), rng);
  IsingInstance gauged = spin_reversal(inst, gauge);
  SpinState base = random_state(inst.parent(), rng);
  SpinState flipped(base.size());
  for (std::size_t q = 0; q < base.size(); ++q)
    flipped[q] = static_cast<std::int8_t>(base[q] * gauge.g[q]);
  for (double s : {0.3, 0.7, 0.95}) {
    DescentResult a = descend(inst, sched, s, corner_state(base));
    DescentResult b = descend(gauged, sched, s, corner_state(flipped));
    CHECK(a.energy == Catch::Approx(b.energy).margin(1e-9));
  }
}

TEST_CASE("make_grid covers the range inclusively") {
  auto g = make_grid(0.1, 1.0, 0.005);
  REQUIRE(g.size() == 181);
  CHECK(g.front() == Catch::Approx(0.1));
  CHECK(g.back() == 1.0);
  CHECK(g[1] - g[0] == Catch::Approx(0.005));
  CHECK_THROWS_AS(make_grid(1.0, 0.1, 0.005), std::invalid_argument);
}

TEST_CASE("ferromagnetic control has no mean-field crossing") {
  IsingInstance inst = c1_ferromagnet();
  std::vector<Candidate> pool;
  SpinState up(8, 1), down(8, -1);
  pool.push_back({up, -16, true});
  pool.push_back({down, -16, true});
  SpinState excited = up;
  excited[0] = -1;
  pool.push_back({excited, energy_int(inst, excited), false});
  AnnealSchedule sched = AnnealSchedule::default_synthetic();
  CrossingReport rep =
      crossing_time(inst, sched, pool, make_grid(0.1, 1.0, 0.02));
  CHECK_FALSE(rep.s_star.has_value());
  CHECK(rep.n_candidates == 3);
  CHECK(rep.n_ground_candidates == 2);
  for (const auto& row : rep.ledger) CHECK(row.ground_attains_min);
}

TEST_CASE("crossing_time validates its candidate pool") {
  IsingInstance inst = c1_ferromagnet();
  AnnealSchedule sched = AnnealSchedule::default_synthetic();
  auto grid = make_grid(0.5, 1.0, 0.1);
  CHECK_THROWS_AS(crossing_time(inst, sched, {}, grid), std::invalid_argument);
  SpinState up(8, 1);
  std::vector<Candidate> no_ground{{up, -16, false}};
  CHECK_THROWS_AS(crossing_time(inst, sched, no_ground, grid), std::invalid_argument);
}

TEST_CASE("mf_spectrum gaps are nonnegative with a zero minimum") {
  IsingInstance inst = small_instance(31);
  GroundTruth gt = exhaustive_ground(inst);
  AnnealSchedule sched = AnnealSchedule::default_synthetic();
  Rng rng(32);
  std::vector<Candidate> pool;
  for (int t = 0; t < 4; ++t) {
    SpinState s = random_state(inst.parent(), rng);
    pool.push_back({s, energy_int(inst, s), energy_int(inst, s) == gt.energy});
  }
  auto grid = make_grid(0.3, 0.9, 0.2);
  auto curves = mf_spectrum(inst, sched, pool, grid);
  REQUIRE(curves.size() == pool.size());
  for (std::size_t si = 0; si < grid.size(); ++si) {
    double lowest = 1e300;
    for (const auto& c : curves) {
      CHECK(c[si] >= -1e-12);
      lowest = std::min(lowest, c[si]);
    }
    CHECK(lowest == Catch::Approx(0.0).margin(1e-12));
  }
}
