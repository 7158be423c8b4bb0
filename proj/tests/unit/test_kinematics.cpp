#include <doctest.h>

#include <cmath>

#include "haltsim/kinematics.hpp"
#include "haltsim/oscillator.hpp"

using namespace haltsim;
using namespace haltsim::kin;

TEST_CASE("end positions") {
  const ScheduleConfig c;
  const auto e = end_positions(c);
  REQUIRE(e.R.size() == 4u);
  for (int i = 0; i < 4; ++i) CHECK(e.distance[i][i] == 0.0);
  CHECK(e.distance[0][3] == doctest::Approx(c.v0 * 3 * c.dT).epsilon(1e-12));
  for (int i = 1; i < 4; ++i) CHECK(e.R[i] < e.R[i - 1]);
}

TEST_CASE("ordering holds across admissible configs") {
  for (double v0 : {1.0, 4.0, 20.0})
    for (int m : {2, 3, 6}) {
      ScheduleConfig c;
      c.v0 = v0;
      c.m_r = m;
      const auto e = end_positions(c);
      const auto t = arriving_times(c);
      for (int i = 1; i < m; ++i) {
        CHECK(e.R[i] < e.R[i - 1]);
        CHECK(t.T[i] > t.T[i - 1]);
      }
    }
}

TEST_CASE("arrival differences") {
  ScheduleConfig c;
  for (int i = 1; i < 4; ++i) CHECK(arrival_difference(c, i, i + 1) == doctest::Approx(c.dT * c.v0 / c.v).epsilon(1e-12));
  c.m_r = 5;
  c.dT = 1.0;
  c.dt0 = 0.96;
  c.v0 = 0.8;
  c.wall_x = 1000;
  CHECK(arriving_times(c).max_difference == doctest::Approx(0.04).epsilon(1e-12));
  // v0 -> v recovers the uncompressed spacing (v0 < v_h <= v forbids equality)
  ScheduleConfig same;
  same.v0 = same.v * (1 - 1e-9);
  same.wall_x = 1000;
  CHECK(arrival_difference(same, 1, 3) == doctest::Approx(2 * same.dT).epsilon(1e-8));
}

TEST_CASE("schedule validation") {
  ScheduleConfig c;
  CHECK_NOTHROW(c.validate());
  c.dT = 0.01;
  CHECK_THROWS_AS(c.validate(), Error);
  ScheduleConfig d;
  d.v0 = 100;
  CHECK_THROWS_AS(d.validate(), Error);
}

TEST_CASE("predicted fidelity") {
  const ScheduleConfig c;
  for (auto r : {Regime::original, Regime::retuned}) {
    CHECK(predicted_fidelity(c, 1, r).probability == 1.0);
    CHECK(predicted_fidelity(c, 1, r).series == 1.0);
  }
  for (int j = 2; j <= 4; ++j) {
    const double dTj = (j - 1) * c.dT * c.ratio();
    const double a = osc::amplitude_Aj(c.E_h() / c.omega0, c.omega0, dTj);
    CHECK(predicted_fidelity(c, j, Regime::original).probability == doctest::Approx(a * a).epsilon(1e-14));
    const auto f2 = predicted_fidelity(c, j, Regime::retuned);
    CHECK(f2.series_valid);
    CHECK(std::abs(f2.series - f2.probability) < std::pow(c.omega_c * dTj, 4));
  }
}

TEST_CASE("toy estimate") {
  const ScheduleConfig c;
  CHECK(toy_estimate(1.0, c, 1) == 1.0);
  ScheduleConfig d;
  d.dT = 0.2;
  d.v0 = d.v;
  CHECK(toy_estimate(1.0, d, 2) == doctest::Approx(0.99).epsilon(1e-14));
  const double def1 = 1 - toy_estimate(1.0, c, 3);
  ScheduleConfig h = c;
  h.v0 = c.v0 / 2;
  CHECK(def1 / (1 - toy_estimate(1.0, h, 3)) == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("search threshold") {
  CHECK(search_threshold(50, 1) == 1.0);
  CHECK(search_threshold(100, 1e4) == 1.0 - std::log(1e4) / 100.0);
  double prev = 0;
  for (double n : {10.0, 100.0, 1e3, 1e4, 1e5}) {
    const double t = search_threshold(n, n * n);
    CHECK(t > prev);
    prev = t;
  }
  CHECK(meets_threshold(0.95, 100, 1e4));
  CHECK_FALSE(meets_threshold(0.9, 100, 1e4));
}
