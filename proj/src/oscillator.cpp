#include "haltsim/oscillator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace haltsim::osc {
namespace {

constexpr const char* kModule = "oscillator_analytics";

}  // namespace

double poisson_tail(double mean_n, int n_max) {
  if (mean_n <= 0.0) return 0.0;
  // Sum the tail directly; 1 - head would cancel.
  double term = std::exp(-mean_n);
  for (int k = 1; k <= n_max + 1; ++k) term *= mean_n / k;
  double tail = 0.0;
  for (int k = n_max + 1; k < n_max + 2000; ++k) {
    tail += term;
    term *= mean_n / (k + 1);
    if (term < 1e-30 * tail && k > mean_n) break;
  }
  return tail;
}

int required_nmax(double mean_n, double tail_tol) {
  int n = 0;
  while (poisson_tail(mean_n, n) >= tail_tol) ++n;
  return n;
}

int squeeze_nmax(double mean_n, double r, double tail_tol) {
  int n = 2 * std::max(required_nmax(mean_n, tail_tol), 4);
  if (r > 0.0) {
    const double t = std::tanh(r);
    // squeezed-vacuum weight on |2k> decays like t^{2k}
    const int sq = static_cast<int>(std::ceil(std::log(tail_tol * 1e-4) / std::log(t)));
    n = std::max(n, sq + 4 * required_nmax(mean_n, tail_tol));
  }
  return n;
}

FockVector coherent_fock(Complex alpha, int n_max, double tail_tol) {
  if (n_max < 0) throw Error(ErrorCategory::input, kModule, "n_max must be >= 0");
  const double mean_n = std::norm(alpha);
  const double tail = poisson_tail(mean_n, n_max);
  if (tail > tail_tol) {
    std::ostringstream os;
    os << "coherent state |alpha|^2=" << mean_n << " loses " << tail << " above n_max=" << n_max
       << "; required n_max=" << required_nmax(mean_n, tail_tol);
    throw Error(ErrorCategory::truncation, kModule, os.str());
  }
  FockVector v;
  v.n_max = n_max;
  v.tail_tol = tail_tol;
  v.amps.resize(n_max + 1);
  Complex c = std::exp(-0.5 * mean_n);
  v.amps(0) = c;
  for (int k = 1; k <= n_max; ++k) {
    c *= alpha / std::sqrt(static_cast<double>(k));
    v.amps(k) = c;
  }
  return v;
}

Complex coherent_overlap(Complex alpha, Complex beta) {
  return std::exp(-0.5 * std::norm(alpha) - 0.5 * std::norm(beta) + std::conj(alpha) * beta);
}

Complex fock_inner(const FockVector& a, const FockVector& b) {
  if (a.amps.size() != b.amps.size()) throw Error(ErrorCategory::input, kModule, "Fock size mismatch");
  return a.amps.dot(b.amps);
}

double amplitude_Aj(double mean_n, double omega0, double delta_t) {
  return std::exp(-mean_n * (1.0 - std::cos(omega0 * delta_t)));
}

double projection_probability(double mean_n_c, double omega_c, double delta_t) {
  return std::exp(-2.0 * mean_n_c * (1.0 - std::cos(omega_c * delta_t)));
}

double probability_series(double mean_n_c, double omega_c, double delta_t_cycle, int j, double ratio) {
  if (j < 1) throw Error(ErrorCategory::input, kModule, "cycle index j must be >= 1");
  if (!(ratio > 0.0 && ratio <= 1.0)) throw Error(ErrorCategory::input, kModule, "ratio must lie in (0, 1]");
  const double phase = omega_c * delta_t_cycle * (j - 1) * ratio;
  return 1.0 - mean_n_c * phase * phase;
}

CoherentLabel rotate_coherent(CoherentLabel label, double phi) {
  return {label.alpha * std::polar(1.0, -phi)};
}

Complex squeeze_amplitude(Complex alpha1, Complex beta1, Complex z) {
  const double r = std::abs(z);
  const double phi = std::arg(z);
  const double c = std::cosh(r);
  const double t = std::tanh(r);
  const Complex a1c = std::conj(alpha1);
  const Complex e = -0.5 * (std::norm(alpha1) + std::norm(beta1)) + a1c * beta1 / c +
                    0.5 * t * (beta1 * beta1 * std::polar(1.0, phi) - a1c * a1c * std::polar(1.0, -phi));
  return std::exp(e) / std::sqrt(c);
}

Complex squeeze_amplitude_numeric(Complex alpha1, Complex beta1, Complex z, int n_max) {
  const fock::Matrix s = fock::squeeze_operator(z, n_max);
  const double tol = 1.0;  // caller owns truncation policy here
  const FockVector a = coherent_fock(alpha1, n_max, tol);
  const FockVector b = coherent_fock(beta1, n_max, tol);
  return a.amps.dot(s * b.amps);
}

Complex checked_squeeze_amplitude(Complex alpha1, Complex beta1, Complex z, double tol) {
  const Complex analytic = squeeze_amplitude(alpha1, beta1, z);
  const double mean_n = std::max(std::norm(alpha1), std::norm(beta1));
  const int n = squeeze_nmax(mean_n, std::abs(z));
  const Complex numeric = squeeze_amplitude_numeric(alpha1, beta1, z, n);
  const double diff = std::abs(analytic - numeric);
  if (diff > tol) {
    std::ostringstream os;
    os << "squeeze amplitude Fock cross-check differs by " << diff << " at n_max=" << n;
    throw Error(ErrorCategory::truncation, kModule, os.str());
  }
  return analytic;
}

fock::Matrix transfer_operator(const SqueezeParams& sq, int n_max) {
  return fock::squeeze_operator(std::polar(sq.r, sq.phi_sq), n_max) * fock::rotation_operator(sq.phi_rot, n_max);
}

namespace {

struct Quadratic {
  double a1, b1, c1;
};

Quadratic coefficients(Complex alpha_c, double gamma, const SqueezeParams& sq) {
  const double c = std::cosh(sq.r);
  const double t = std::tanh(sq.r);
  const double ac = std::abs(alpha_c);
  const double gc = std::arg(alpha_c);
  return {1.0 + t * std::cos(2.0 * gamma + sq.phi_sq), -2.0 * ac / c * std::cos(-gamma + gc - sq.phi_rot),
          std::log(c) + ac * ac * (1.0 - t * std::cos(2.0 * gc - 2.0 * sq.phi_rot + sq.phi_sq))};
}

}  // namespace

double full_transfer_modulus(Complex alpha_c, double beta_abs, double gamma, const SqueezeParams& sq) {
  const Quadratic q = coefficients(alpha_c, gamma, sq);
  return std::exp(-0.5 * (q.a1 * beta_abs * beta_abs + q.b1 * beta_abs + q.c1));
}

FullTransferReport analyze_full_transfer(Complex alpha_c, double gamma, const SqueezeParams& sq) {
  if (!(sq.r >= 0.0)) throw Error(ErrorCategory::input, kModule, "squeeze magnitude r must be >= 0");
  const Quadratic q = coefficients(alpha_c, gamma, sq);
  FullTransferReport rep;
  rep.a1 = q.a1;
  rep.b1 = q.b1;
  rep.c1 = q.c1;
  rep.discriminant = q.b1 * q.b1 - 4.0 * q.a1 * q.c1;
  // a1 >= 1 - tanh r > 0, so the quadratic has a minimum.
  rep.best_beta = std::max(0.0, -q.b1 / (2.0 * q.a1));
  rep.best_modulus = full_transfer_modulus(alpha_c, rep.best_beta, gamma, sq);
  rep.residual = 1.0 - rep.best_modulus;
  const double scale = std::max({1.0, q.b1 * q.b1, std::abs(4.0 * q.a1 * q.c1)});
  if (rep.discriminant >= -1e-12 * scale) {
    // near-zero discriminant collapses to the double root
    const double s = rep.discriminant > 1e-12 * scale ? std::sqrt(rep.discriminant) : 0.0;
    for (double root : {(-q.b1 - s) / (2.0 * q.a1), (-q.b1 + s) / (2.0 * q.a1)}) {
      if (root > 0.0 && (rep.roots.empty() || root != rep.roots.back())) rep.roots.push_back(root);
    }
  }
  return rep;
}

FullTransferReport solve_full_transfer(Complex alpha_c, double gamma, const SqueezeParams& sq) {
  FullTransferReport rep = analyze_full_transfer(alpha_c, gamma, sq);
  if (rep.roots.empty()) {
    std::ostringstream os;
    os << "no admissible |beta| (discriminant " << rep.discriminant << "); best modulus " << rep.best_modulus
       << " at |beta|=" << rep.best_beta;
    throw NoSolutionError(os.str(), rep.best_modulus);
  }
  return rep;
}

fock::Matrix displacement_transfer(Complex beta, int n_max) { return fock::displacement_operator(-beta, n_max); }

}  // namespace haltsim::osc
