#include <doctest.h>

#include <cmath>
#include <numbers>

#include "haltsim/wavepacket.hpp"

using namespace haltsim;
using namespace haltsim::wp;

namespace {

const Grid1D kGrid{-40.0, 40.0, 1024};

}  // namespace

TEST_CASE("double-well potential") {
  PotentialSpec s;
  CHECK(s.value(s.barrier_center()) == s.barrier_height);
  CHECK(s.value(s.center) == 0.0);
  for (double d : {-1.5, 0.3, 1.0}) CHECK(s.value(s.center + d) == doctest::Approx(0.5 * s.K * d * d));
  CHECK(s.flank_end() == doctest::Approx(s.center + std::sqrt(2 * s.barrier_height / s.K)));
  CHECK(s.value(s.barrier_end() + 1.0) == 0.0);
  CHECK(s.value(s.right_wall() + 0.5) == s.pad_height());
}

TEST_CASE("gaussian initialisation") {
  const auto w = init_gaussian(kGrid, -6.0, 0.0, 1.0, 0);
  CHECK(w.norm() == doctest::Approx(1.0).epsilon(1e-12));
  const auto o = measure(w, {}, 0.0);
  CHECK(std::abs(o.p) < 1e-10);
  CHECK(o.x == doctest::Approx(-6.0).epsilon(1e-10));
  CHECK(o.p_left > 1 - 1e-6);
  CHECK(std::abs(overlap(w, w) - 1.0) < 1e-12);
  // centered between two samples so the split is symmetric on the grid
  const double mid = kGrid.x(kGrid.n / 2) + 0.5 * kGrid.dx();
  const auto sym = init_gaussian(kGrid, mid, 0.0, 1.0, 1);
  const auto os = measure(sym, {}, mid);
  CHECK(std::abs(os.p_left - os.p_right) < 1e-3);
  CHECK_THROWS_AS(init_gaussian(kGrid, 38.0, 0.0, 1.0, 0), Error);
  CHECK_THROWS_AS(init_gaussian(kGrid, 0.0, 0.0, 0.2, 0), Error);
}

TEST_CASE("zero steps is the identity") {
  const auto w = init_gaussian(kGrid, 0.0, 1.0, 1.0, 0);
  const auto out = evolve(w, std::vector<double>(kGrid.n, 0.0), 5e-4, 0);
  CHECK(std::abs(overlap(w, out) - 1.0) < 1e-15);
}

TEST_CASE("free spreading") {
  const double sigma = 1.0, t = 2.0;
  const auto w = init_gaussian(kGrid, 0.0, 0.0, sigma, 0);
  const auto out = evolve(w, std::vector<double>(kGrid.n, 0.0), 5e-4, 4000);
  // position std of |psi|^2 is sigma / sqrt(2)
  const double s0 = sigma / std::sqrt(2.0);
  const double expect = s0 * std::sqrt(1.0 + std::pow(t / (2.0 * s0 * s0), 2));
  CHECK(measure(out, {}, 0.0).spread == doctest::Approx(expect).epsilon(0.01));
  CHECK(out.norm() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("harmonic well: Ehrenfest oscillation at omega0") {
  std::vector<double> v(kGrid.n);
  for (std::size_t i = 0; i < kGrid.n; ++i) v[i] = 0.5 * kGrid.x(i) * kGrid.x(i);
  const auto w = init_gaussian(kGrid, 2.0, 0.0, 1.0, 0);
  const double dt = 5e-4;
  const auto half = evolve(w, v, dt, static_cast<std::size_t>(std::lround(std::numbers::pi / dt)));
  CHECK(measure(half, v, 0.0).x == doctest::Approx(-2.0).epsilon(0.01));
  const auto quarter = evolve(w, v, dt, static_cast<std::size_t>(std::lround(0.5 * std::numbers::pi / dt)));
  CHECK(std::abs(measure(quarter, v, 0.0).x) < 0.02);
  CHECK(measure(quarter, v, 0.0).p == doctest::Approx(-2.0).epsilon(0.01));
}

TEST_CASE("ground state of the harmonic well") {
  std::vector<double> v(kGrid.n);
  for (std::size_t i = 0; i < kGrid.n; ++i) v[i] = 0.5 * kGrid.x(i) * kGrid.x(i);
  const auto g = ground_state(kGrid, v, 0.5, 1.5, 0);
  const auto o = measure(g, v, 0.0);
  CHECK(o.energy == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(o.spread == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-4));
}

TEST_CASE("momentum kicks") {
  auto w = init_gaussian(kGrid, 0.0, 0.5, 1.5, 0);
  const double p0 = measure(w, {}, 0.0).p;
  const double hk = 3.0;
  apply_kick(w, {hk, -1, 0, false, -20.0, 20.0});
  CHECK(measure(w, {}, 0.0).p - p0 == doctest::Approx(-hk).epsilon(0.01));
  for (int k = 0; k < 3; ++k) apply_kick(w, {hk, +1, 0, false, -20.0, 20.0});
  CHECK(measure(w, {}, 0.0).p - p0 == doctest::Approx(2 * hk).epsilon(0.01));

  auto r = init_gaussian(kGrid, 0.0, 0.0, 1.5, 0);
  const auto raman = raman_kick(2.0, 1.5, +1, 0, -20.0, 20.0);
  CHECK(raman.hbar_k == doctest::Approx(3.5));
  CHECK(raman.swap);
  apply_kick(r, raman);
  const auto o = measure(r, {}, 0.0);
  CHECK(o.p == doctest::Approx(3.5).epsilon(0.01));
  CHECK(o.level[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("kick window excluding the packet leaves it unchanged") {
  const auto w = init_gaussian(kGrid, -10.0, 0.0, 1.0, 0);
  auto k = w;
  apply_kick(k, {5.0, +1, 0, true, 10.0, 30.0});
  CHECK(std::abs(overlap(w, k) - 1.0) < 1e-12);
}

TEST_CASE("square barrier transmission" * doctest::timeout(300)) {
  TransmissionOptions o;
  o.n = 2048;
  CHECK(transmission_scan(2.0, 0.0, 2.0, 1.0, o) == doctest::Approx(1.0).epsilon(1e-3));
  const double hi = transmission_scan(40.0, 1.0, 1.0, 1.0, o);
  CHECK(hi == doctest::Approx(transmission_analytic(40.0, 1.0, 1.0)).epsilon(0.02));
  CHECK(hi > 0.98);
  CHECK(transmission_scan(1.0, 3.0, 1.5, 1.0, o) == doctest::Approx(transmission_analytic(1.0, 3.0, 1.5)).epsilon(0.1));
}

TEST_CASE("closed-form transmission") {
  // textbook expression evaluated inline
  const double E = 1.0, V0 = 3.0, a = 2.0, b = std::sqrt(2.0 * (V0 - E));
  const double s = std::sinh(b * a);
  CHECK(transmission_analytic(E, V0, a) == doctest::Approx(1.0 / (1.0 + V0 * V0 * s * s / (4 * E * (V0 - E)))).epsilon(1e-12));
  CHECK(transmission_analytic(E, 0.0, a) == 1.0);
}
