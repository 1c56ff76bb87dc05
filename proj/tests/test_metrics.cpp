#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "ctails/metrics.hpp"

using namespace ctails;

TEST_CASE("repetitions metric pinned values") {
  CHECK(repetitions_R(0.99) == 1.0);
  CHECK(repetitions_R(1.0) == 0.0);
  CHECK(std::isinf(repetitions_R(0.0)));
  CHECK(repetitions_R(0.5) == Catch::Approx(std::log(0.01) / std::log(0.5)));
  CHECK(repetitions_R(0.5) == Catch::Approx(6.6438561897747).epsilon(1e-12));
  CHECK(repetitions_clamped(0.999) == 1.0);
  CHECK_THROWS_AS(repetitions_R(-0.1), std::invalid_argument);
  CHECK_THROWS_AS(repetitions_R(1.1), std::invalid_argument);
  CHECK_THROWS_AS(repetitions_R(std::nan("")), std::invalid_argument);
}

TEST_CASE("repetitions metric is strictly decreasing in p") {
  double prev = std::numeric_limits<double>::infinity();
  for (int i = 1; i <= 1000; ++i) {
    double p = static_cast<double>(i) / 1000.0;
    double r = repetitions_R(p);
    CHECK(r < prev);
    prev = r;
  }
}

TEST_CASE("nearest rank order statistics") {
  std::vector<double> v{4.0, 1.0, 3.0, 2.0};
  CHECK(nearest_rank(v, 25.0) == 1.0);
  CHECK(nearest_rank(v, 50.0) == 2.0);
  CHECK(nearest_rank(v, 75.0) == 3.0);
  CHECK(nearest_rank(v, 100.0) == 4.0);
  CHECK(nearest_rank(v, 1.0) == 1.0);
  CHECK_THROWS_AS(nearest_rank({}, 50.0), std::invalid_argument);
  CHECK_THROWS_AS(nearest_rank(v, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(nearest_rank(v, 101.0), std::invalid_argument);
}

TEST_CASE("censored values rank above every finite value") {
  std::vector<double> v{1.0, kCensoredR, 2.0, kCensoredR, 3.0};
  CHECK(nearest_rank(v, 40.0) == 2.0);       // low ranks untouched by censoring
  CHECK(nearest_rank(v, 50.0) == 3.0);
  CHECK(std::isinf(nearest_rank(v, 80.0)));  // tail is censored
  CHECK(std::isinf(nearest_rank(v, 100.0)));
}

TEST_CASE("percentile curves over a hardness table") {
  HardnessTable table;
  for (int i = 1; i <= 10; ++i) {
    HardnessRow row;
    row.id = "i" + std::to_string(i);
    row.R = static_cast<double>(i);
    table.push_back(row);
  }
  table[9].R = kCensoredR;
  auto curves = percentile_curves(table, {50.0, 90.0, 100.0});
  REQUIRE(curves.size() == 3);
  CHECK(curves[0].second == 5.0);
  CHECK(curves[1].second == 9.0);
  CHECK(std::isinf(curves[2].second));
  CHECK_THROWS_AS(percentile_curves({}, {50.0}), std::invalid_argument);
}

TEST_CASE("bootstrap interval degenerates correctly on constant data") {
  std::vector<double> v(20, 7.0);
  auto mean = [](const std::vector<double>& x) {
    double s = 0;
    for (double xi : x) s += xi;
    return s / x.size();
  };
  auto [lo, hi] = bootstrap_ci(v, mean, 0.95, 200, 3);
  CHECK(lo == 7.0);
  CHECK(hi == 7.0);
}

TEST_CASE("bootstrap interval brackets the point estimate and is deterministic") {
  std::vector<double> v{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  auto med = [](const std::vector<double>& x) { return nearest_rank(x, 50.0); };
  auto ci1 = bootstrap_ci(v, med, 0.95, 500, 42);
  auto ci2 = bootstrap_ci(v, med, 0.95, 500, 42);
  CHECK(ci1 == ci2);
  CHECK(ci1.first <= 5.0);
  CHECK(ci1.second >= 5.0);
  auto narrow = bootstrap_ci(v, med, 0.5, 500, 42);
  CHECK(narrow.first >= ci1.first);
  CHECK(narrow.second <= ci1.second);
  CHECK_THROWS_AS(bootstrap_ci({}, med, 0.95, 10, 1), std::invalid_argument);
}

TEST_CASE("quantile spread rows, flags, and ordering") {
  std::map<std::string, std::vector<double>> data;
  data["easy"] = std::vector<double>(100, 2.0);
  std::vector<double> spreadful;
  for (int i = 1; i <= 100; ++i) spreadful.push_back(static_cast<double>(i));
  data["hard"] = spreadful;
  std::vector<double> censored(100, kCensoredR);
  for (int i = 0; i < 40; ++i) censored[i] = 5.0;
  data["censored"] = censored;

  auto rows = quantile_spread(data);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].id == "easy");
  CHECK(rows[0].spread == 1.0);
  CHECK_FALSE(rows[0].censored_median);
  CHECK(rows[1].id == "hard");
  CHECK(rows[1].r_median == 50.0);
  CHECK(rows[1].r25 == 25.0);
  CHECK(rows[1].r75 == 75.0);
  CHECK(rows[1].spread == 3.0);
  CHECK(rows[2].id == "censored");
  CHECK(rows[2].censored_median);
  CHECK(std::isinf(rows[2].spread));
}

TEST_CASE("ecdf collapses duplicates and ends at 1") {
  auto steps = ecdf({3.0, 1.0, 3.0, 2.0, 3.0});
  REQUIRE(steps.size() == 3);
  CHECK(steps[0] == std::pair<double, double>(1.0, 0.2));
  CHECK(steps[1] == std::pair<double, double>(2.0, 0.4));
  CHECK(steps[2] == std::pair<double, double>(3.0, 1.0));
  CHECK(ecdf({}).empty());
  CHECK(kNoCrossingBucket == 0.10);
}
