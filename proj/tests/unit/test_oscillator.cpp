#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "haltsim/oscillator.hpp"

using namespace haltsim;
using namespace haltsim::osc;
using Eigen::MatrixXcd;

namespace {

MatrixXcd ladder(int n) {
  MatrixXcd a = MatrixXcd::Zero(n + 1, n + 1);
  for (int k = 1; k <= n; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
  return a;
}

// coefficients built by recursion c_k = c_{k-1} alpha / sqrt(k), independent of the library
Eigen::VectorXcd coherent_oracle(Complex alpha, int n) {
  Eigen::VectorXcd v(n + 1);
  v(0) = std::exp(-0.5 * std::norm(alpha));
  for (int k = 1; k <= n; ++k) v(k) = v(k - 1) * alpha / std::sqrt(static_cast<double>(k));
  return v;
}

// <alpha| S(z) |beta> with S from the Pade matrix exponential on a generous space
Complex squeeze_oracle(Complex a, Complex b, Complex z, int n) {
  const MatrixXcd A = ladder(n);
  const MatrixXcd Ad = A.adjoint();
  const MatrixXcd G = 0.5 * (z * A * A - std::conj(z) * Ad * Ad);
  const MatrixXcd S = G.exp();
  return coherent_oracle(a, n).dot(S * coherent_oracle(b, n));
}

}  // namespace

TEST_CASE("coherent_fock") {
  const auto v0 = coherent_fock(0.0, 10);
  CHECK(std::abs(v0.amps(0) - 1.0) < 1e-15);
  CHECK(v0.amps.tail(10).norm() < 1e-15);
  CHECK(coherent_fock(1.0, 20).amps(0).real() == doctest::Approx(std::exp(-0.5)).epsilon(1e-14));
  CHECK(coherent_fock(Complex(1.2, -0.7), 40).amps.isApprox(coherent_oracle(Complex(1.2, -0.7), 40), 1e-13));
}

TEST_CASE("Poisson tail truncation") {
  // direct sum of terms beyond 30
  double tail = 0, term = std::exp(-4.0);
  for (int k = 1; k <= 200; ++k) {
    term *= 4.0 / k;
    if (k > 30) tail += term;
  }
  CHECK(tail < 1e-10);
  CHECK(poisson_tail(4.0, 30) == doctest::Approx(tail).epsilon(1e-6));
  CHECK(poisson_tail(4.0, required_nmax(4.0)) < 1e-10);
  CHECK_THROWS_AS(coherent_fock(3.0, 10), Error);
}

TEST_CASE("coherent overlap") {
  CHECK(std::abs(coherent_overlap(0.8, 0.8) - 1.0) < 1e-15);
  CHECK(std::abs(coherent_overlap(0.0, Complex(1, 1))) == doctest::Approx(std::exp(-1.0)));
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int t = 0; t < 30; ++t) {
    const Complex a(u(rng), u(rng)), b(u(rng), u(rng));
    const auto va = coherent_oracle(a, 80), vb = coherent_oracle(b, 80);
    CHECK(std::abs(coherent_overlap(a, b) - va.dot(vb)) < 1e-10);
  }
}

TEST_CASE("amplitude_Aj") {
  CHECK(amplitude_Aj(3.0, 1.0, 0.0) == 1.0);
  CHECK(amplitude_Aj(1.0, 1.0, std::numbers::pi) == doctest::Approx(std::exp(-2.0)).epsilon(1e-14));
  for (double n : {0.1, 1.0, 5.0, 10.0})
    for (double th : {0.1, 1.0, 3.0, 6.0}) {
      const Complex a(std::sqrt(n), 0);
      CHECK(amplitude_Aj(n, 1.0, th) == doctest::Approx(std::abs(coherent_overlap(a, a * std::polar(1.0, -th)))).epsilon(1e-12));
    }
}

TEST_CASE("probability series") {
  CHECK(probability_series(1.0, 0.25, 0.15, 1, 0.1) == 1.0);
  for (int j = 2; j < 6; ++j) {
    const double phase = 0.25 * (j - 1) * 0.15 * 0.1;
    const double exact = projection_probability(1.0, 0.25, (j - 1) * 0.15 * 0.1);
    CHECK(std::abs(probability_series(1.0, 0.25, 0.15, j, 0.1) - exact) < std::pow(phase, 4));
    CHECK(probability_series(1.0, 0.25, 0.15, j, 0.1) < probability_series(1.0, 0.25, 0.15, j - 1, 0.1));
  }
  CHECK_THROWS_AS(probability_series(1.0, 0.25, 0.15, 0, 0.1), Error);
  CHECK_THROWS_AS(probability_series(1.0, 0.25, 0.15, 2, 1.5), Error);
}

TEST_CASE("rotate_coherent") {
  const Complex a(0.7, -0.4);
  CHECK(std::abs(rotate_coherent({a}, 0.0).alpha - a) < 1e-15);
  CHECK(std::abs(rotate_coherent({a}, 2 * std::numbers::pi).alpha - a) < 1e-14);
  const double phi = 0.9;
  const auto R = fock::rotation_operator(phi, 40);
  Eigen::VectorXcd rotated = R * coherent_fock(a, 40).amps;
  CHECK((rotated - coherent_fock(rotate_coherent({a}, phi).alpha, 40).amps).norm() < 1e-10);
}

TEST_CASE("squeeze amplitude") {
  const Complex a(0.5, 0.2), b(-0.3, 0.9);
  CHECK(std::abs(squeeze_amplitude(a, b, 0.0) - coherent_overlap(a, b)) < 1e-15);
  for (double r : {0.2, 0.5, 1.0})
    CHECK(std::abs(squeeze_amplitude(0.0, 0.0, std::polar(r, 0.4)) - 1.0 / std::sqrt(std::cosh(r))) < 1e-14);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0, 1);
  for (int t = 0; t < 8; ++t) {
    const Complex x = std::polar(1.5 * u(rng), 6.3 * u(rng)), y = std::polar(1.5 * u(rng), 6.3 * u(rng));
    const Complex z = std::polar(0.5, 6.3 * u(rng));
    const Complex ref = squeeze_oracle(x, y, z, 120);
    CHECK(std::abs(squeeze_amplitude(x, y, z) - ref) < 1e-8);
    CHECK(std::abs(squeeze_amplitude_numeric(x, y, z, squeeze_nmax(std::max(std::norm(x), std::norm(y)), 0.5)) - ref) < 1e-8);
  }
}

TEST_CASE("library squeeze operator matches Pade exponential") {
  const Complex z = std::polar(0.8, 1.1);
  const int n = 30;
  const MatrixXcd A = ladder(n);
  const MatrixXcd G = 0.5 * (z * A * A - std::conj(z) * A.adjoint() * A.adjoint());
  CHECK((fock::squeeze_operator(z, n) - G.exp()).cwiseAbs().maxCoeff() < 1e-12);
  const Complex beta(0.6, -0.2);
  const MatrixXcd Gd = beta * A.adjoint() - std::conj(beta) * A;
  CHECK((fock::displacement_operator(beta, n) - Gd.exp()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("full transfer") {
  const Complex ac = std::polar(1.3, 0.4);
  SqueezeParams sq{0.0, 0.0, 0.7};
  const double gamma = std::arg(ac) - sq.phi_rot;
  const auto rep = solve_full_transfer(ac, gamma, sq);
  REQUIRE(rep.roots.size() == 1);
  CHECK(rep.roots[0] == std::abs(ac));
  for (double root : rep.roots) CHECK(std::abs(full_transfer_modulus(ac, root, gamma, sq) - 1.0) < 1e-9);
  CHECK(rep.a1 > 0);
  SqueezeParams sq2{0.5, 0.3, 0.7};
  CHECK_THROWS_AS(solve_full_transfer(ac, 0.0, sq2), NoSolutionError);
  const auto an = analyze_full_transfer(ac, 0.0, sq2);
  CHECK(an.roots.empty());
  CHECK(an.best_modulus < 1.0);
  CHECK(an.residual == doctest::Approx(1.0 - an.best_modulus));
  // modulus against the Fock-space matrix element
  for (double b : {0.2, 0.9, 1.6})
    for (double g : {0.0, 1.0, 2.5}) {
      const Complex ref = squeeze_oracle(std::polar(b, g), ac * std::polar(1.0, -sq2.phi_rot), std::polar(sq2.r, sq2.phi_sq), 120);
      CHECK(full_transfer_modulus(ac, b, g, sq2) == doctest::Approx(std::abs(ref)).epsilon(1e-9));
    }
}

TEST_CASE("displacement transfer") {
  const int n = 30;
  CHECK((displacement_transfer(0.0, n) - MatrixXcd::Identity(n + 1, n + 1)).cwiseAbs().maxCoeff() < 1e-14);
  const Eigen::VectorXcd g = displacement_transfer(1.0, n) * coherent_fock(1.0, n).amps;
  CHECK(std::norm(g(0)) > 1 - 1e-8);
  const MatrixXcd D = displacement_transfer(Complex(0.8, 0.3), 60);
  CHECK((D.adjoint() * D - MatrixXcd::Identity(61, 61)).topLeftCorner(30, 30).cwiseAbs().maxCoeff() < 1e-8);
}
