#include <catch2/catch_amalgamated.hpp>

#include "ctails/degree_reduction.hpp"
#include "ctails/ising.hpp"

using namespace ctails;

namespace {

IsingInstance make_u1(int L, std::uint64_t seed, int target_degree = 0) {
  auto g = std::make_shared<ChimeraGraph>(L);
  if (target_degree == 0) {
    Subgraph sub(g);
    Rng rng(seed);
    return sample_uk(sub, 1, rng);
  }
  ReductionConfig rc;
  rc.target_degree = target_degree;
  rc.seed = seed;
  Subgraph sub = reduce_to_degree(g, rc);
  Rng rng(derive_seed(seed, 1, "j"));
  return sample_uk(sub, 1, rng);
}

}  // namespace

TEST_CASE("flip identity: dE = -2 s_i h_i^eff") {
  IsingInstance inst = make_u1(2, 31);
  Rng rng(7);
  for (int t = 0; t < 1000; ++t) {
    SpinState s = random_state(inst.parent(), rng);
    Qubit q = static_cast<Qubit>(bounded(rng, inst.num_sites()));
    long long e0 = energy_int(inst, s);
    long long f = effective_field_int(inst, s, q);
    SpinState flipped = s;
    flipped[q] = static_cast<std::int8_t>(-flipped[q]);
    CHECK(energy_int(inst, flipped) - e0 == -2LL * s[q] * f);
  }
}

TEST_CASE("floppy qubits are exactly the isoenergetic flips") {
  IsingInstance inst = make_u1(2, 5);
  Rng rng(6);
  SpinState s = random_state(inst.parent(), rng);
  std::vector<char> floppy(inst.num_sites(), 0);
  for (Qubit q : floppy_qubits(inst, s)) floppy[q] = 1;
  long long e0 = energy_int(inst, s);
  for (Qubit q = 0; q < inst.num_sites(); ++q) {
    SpinState flipped = s;
    flipped[q] = static_cast<std::int8_t>(-flipped[q]);
    bool iso = energy_int(inst, flipped) == e0;
    bool expected = inst.parent().operable(q) ? iso : false;
    CHECK(static_cast<bool>(floppy[q]) == expected);
  }
}

TEST_CASE("floppiness over random states follows the central binomial law") {
  // All-|J|=1 couplings: a degree-d spin is floppy iff its d neighbor terms
  // cancel, probability C(d, d/2)/2^d for even d and 0 for odd d.
  Rng rng(17);
  FloppyStats even;
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    IsingInstance inst = make_u1(1, derive_seed(2, seed, "flop"));
    FloppyStats st = floppy_fraction_random(inst, 2000, rng);
    for (auto [d, c] : st.counts) {
      even.counts[d].first += c.first;
      even.counts[d].second += c.second;
    }
  }
  CHECK(even.fraction(4) == Catch::Approx(0.375).margin(0.02));

  FloppyStats odd;
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    IsingInstance inst = make_u1(2, derive_seed(3, seed, "flop3"), 3);
    FloppyStats st = floppy_fraction_random(inst, 500, rng);
    for (auto [d, c] : st.counts) {
      odd.counts[d].first += c.first;
      odd.counts[d].second += c.second;
    }
  }
  CHECK(odd.counts.at(3).first == 0);          // odd degree never floppy
  CHECK(odd.fraction(2) == Catch::Approx(0.5).margin(0.05));
}

TEST_CASE("Sidon magnitudes suppress floppiness") {
  auto g = std::make_shared<ChimeraGraph>(2);
  Subgraph sub(g);
  Rng jr(41);
  IsingInstance inst = sample_sidon28(sub, jr);
  Rng rng(42);
  FloppyStats st = floppy_fraction_random(inst, 1000, rng);
  long long floppy = 0, total = 0;
  for (auto [d, c] : st.counts) {
    floppy += c.first;
    total += c.second;
  }
  CHECK(static_cast<double>(floppy) / total < 0.02);
}

TEST_CASE("floppy stable set flips are isoenergetic for every subset") {
  IsingInstance inst = make_u1(2, 9);
  Rng rng(10);
  for (int t = 0; t < 20; ++t) {
    SpinState s = random_state(inst.parent(), rng);
    auto stable = floppy_stable_set(inst, s);
    CHECK(cluster_bound(inst, s) == static_cast<int>(stable.size()));
    long long e0 = energy_int(inst, s);
    std::size_t m = std::min<std::size_t>(stable.size(), 10);
    for (std::size_t mask = 1; mask < (std::size_t(1) << m); ++mask) {
      SpinState flipped = s;
      for (std::size_t b = 0; b < m; ++b)
        if (mask & (std::size_t(1) << b))
          flipped[stable[b]] = static_cast<std::int8_t>(-flipped[stable[b]]);
      REQUIRE(energy_int(inst, flipped) == e0);
    }
  }
}

TEST_CASE("dimension checks throw") {
  IsingInstance inst = make_u1(1, 1);
  SpinState bad(7, 1);
  CHECK_THROWS_AS(energy_int(inst, bad), std::invalid_argument);
  SpinState ok(8, 1);
  CHECK_THROWS_AS(effective_field_int(inst, ok, 8), std::invalid_argument);
}
