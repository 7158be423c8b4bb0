#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <memory>
#include <vector>

#include "haltsim/error.hpp"

namespace haltsim::wp {

using cplx = std::complex<double>;

/// Periodic grid x_i = x_min + i dx, i < n, dx = (x_max - x_min) / n.
struct Grid1D {
  double x_min = -20.0;
  double x_max = 45.0;
  std::size_t n = 4096;

  double dx() const { return (x_max - x_min) / static_cast<double>(n); }
  double length() const { return x_max - x_min; }
  double x(std::size_t i) const { return x_min + dx() * static_cast<double>(i); }
  double k_max() const;
  std::vector<double> xs() const;
  /// FFT-ordered wavenumbers.
  std::vector<double> ks() const;

  void validate() const;
};

/// Double well: harmonic left well (force constant K, center) whose right flank rises to
/// barrier_height and continues as the square barrier of width a; flat floor 0 of length
/// right_length beyond; pads of height pad_factor * V0 outside [left_wall, right wall].
struct PotentialSpec {
  double K = 1.0;
  double center = 0.0;
  double barrier_height = 4.0;
  double barrier_width = 3.2;
  double right_length = 30.0;
  double pad_factor = 1e4;
  double left_wall = -1e300;  // pad below this x (the harmonic wall usually suffices)

  double flank_end() const;       // where the harmonic flank reaches V0
  double barrier_end() const { return flank_end() + barrier_width; }
  double barrier_center() const { return flank_end() + 0.5 * barrier_width; }
  double right_wall() const { return barrier_end() + right_length; }
  double pad_height() const { return pad_factor * barrier_height; }
  double value(double x) const;
};

std::vector<double> build_potential(const PotentialSpec& spec, const Grid1D& grid);

/// Square barrier [0, a] of height V0 in an otherwise flat box.
std::vector<double> square_barrier(double V0, double a, const Grid1D& grid);

/// Two internal levels on one grid. Normalization: sum |psi|^2 dx = 1.
struct SpinorWave {
  Grid1D grid;
  double mass = 1.0;
  std::array<std::vector<cplx>, 2> psi;

  double norm() const;
};

SpinorWave init_gaussian(const Grid1D& grid, double x0, double p0, double sigma, int level, double mass = 1.0);

/// Strang split-operator stepper with FFTW transforms and SIMD phase kernels.
class SplitOperator {
 public:
  SplitOperator(const Grid1D& grid, std::vector<double> potential, double dt, double mass = 1.0);
  ~SplitOperator();
  SplitOperator(const SplitOperator&) = delete;
  SplitOperator& operator=(const SplitOperator&) = delete;

  double dt() const { return dt_; }
  const std::vector<double>& potential() const { return v_; }
  /// Largest kinetic phase per step, k_max^2 dt / (2 m).
  double kinetic_phase() const;

  void evolve(SpinorWave& wave, std::size_t steps);
  /// Imaginary-time relaxation of one level; renormalizes each step.
  void relax(std::vector<cplx>& psi, std::size_t steps);
  /// <T> + <V> of one level (normalized to that level's weight).
  double energy(const std::vector<cplx>& psi);
  /// sum k |psi_k|^2 / sum |psi_k|^2 over one level, and the level weight.
  double mean_momentum(const std::vector<cplx>& psi, double* weight = nullptr);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  Grid1D grid_;
  std::vector<double> v_;
  double dt_;
  double mass_;
};

/// Evolve with a fresh stepper; checks the stability heuristic and the norm budget.
SpinorWave evolve(const SpinorWave& wave, const std::vector<double>& potential, double dt, std::size_t steps);

struct KickSpec {
  double hbar_k = 0.0;  // momentum transfer magnitude
  int sign = +1;        // +1 co-propagating (accelerate), -1 counter-propagating
  int target_level = 0;
  bool swap = false;    // also exchange the internal level (Raman transfer)
  double x_lo = -1e300;
  double x_hi = 1e300;
};

/// Two-beam Raman transfer: total momentum hbar k_A + hbar k_B.
KickSpec raman_kick(double k_a, double k_b, int sign, int target_level, double x_lo, double x_hi);

/// In the window: target level picks up e^{i sign k x}; with swap, (target, other) ->
/// (e^{-i sign k x} other, e^{i sign k x} target). Unitary pointwise.
void apply_kick(SpinorWave& wave, const KickSpec& kick);

struct Observables {
  double norm = 0;
  double x = 0;
  double p = 0;
  double energy = 0;
  double p_left = 0;
  double p_right = 0;
  double spread = 0;
  std::array<double, 2> level{};
};

/// Observables; P_left / P_right split at x_split. Energy needs the potential (may be empty).
Observables measure(const SpinorWave& wave, const std::vector<double>& potential, double x_split);

/// Same, reusing a stepper's transforms and potential.
Observables measure(const SpinorWave& wave, SplitOperator& op, double x_split);

/// <a|b> summed over both levels.
cplx overlap(const SpinorWave& a, const SpinorWave& b);

/// Lowest state of the potential on one level, by imaginary-time relaxation from a Gaussian guess.
SpinorWave ground_state(const Grid1D& grid, const std::vector<double>& potential, double x0, double sigma,
                        int level, double dt = 2e-3, double tol = 1e-13, std::size_t max_steps = 200000);

struct TransmissionOptions {
  std::size_t n = 4096;
  double half_width = 200.0;
  double sigma = 14.0;
  double dt = 1e-3;
  double max_relative_bandwidth = 0.25;  // energy spread / |V0 - E|
};

/// Transmitted probability of a quasi-monochromatic packet through a square barrier.
double transmission_scan(double E, double V0, double a, double mass = 1.0, const TransmissionOptions& opt = {});

/// Closed-form square-barrier transmission (E != V0).
double transmission_analytic(double E, double V0, double a, double mass = 1.0);

}  // namespace haltsim::wp
