#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "haltsim/error.hpp"
#include "haltsim/fock.hpp"

namespace haltsim::osc {

using Complex = std::complex<double>;

inline constexpr double kDefaultTailTol = 1e-10;

struct CoherentLabel {
  Complex alpha{0.0, 0.0};
};

/// Truncated number-basis vector over |0> .. |n_max>.
struct FockVector {
  Eigen::VectorXcd amps;
  int n_max = 0;
  double tail_tol = kDefaultTailTol;

  double norm() const { return amps.norm(); }
};

/// Squeeze magnitude r, squeeze phase phi_sq (z = r e^{i phi_sq}) and rotation angle phi_rot.
struct SqueezeParams {
  double r = 0.0;
  double phi_sq = 0.0;
  double phi_rot = 0.0;
};

/// Probability of a Poisson(mean_n) variable exceeding n_max.
double poisson_tail(double mean_n, int n_max);

/// Smallest N whose Poisson tail beyond N is below tail_tol.
int required_nmax(double mean_n, double tail_tol = kDefaultTailTol);

/// Truncation for squeeze work: the coherent rule doubled, raised if the squeezed
/// number distribution (tanh r)^n still carries weight at that size.
int squeeze_nmax(double mean_n, double r, double tail_tol = kDefaultTailTol);

/// exp(-|a|^2/2) a^k / sqrt(k!). Throws truncation if the discarded tail exceeds tail_tol.
FockVector coherent_fock(Complex alpha, int n_max, double tail_tol = kDefaultTailTol);

/// <alpha|beta>.
Complex coherent_overlap(Complex alpha, Complex beta);

/// <a|b> for two truncated vectors of equal size.
Complex fock_inner(const FockVector& a, const FockVector& b);

/// exp{-|alpha|^2 (1 - cos(omega0 dT))}.
double amplitude_Aj(double mean_n, double omega0, double delta_t);

/// exp{-2 |alpha_c|^2 (1 - cos(omega_c dT))}.
double projection_probability(double mean_n_c, double omega_c, double delta_t);

/// 1 - |alpha_c|^2 omega_c^2 dT^2 (j-1)^2 ratio^2.
double probability_series(double mean_n_c, double omega_c, double delta_t_cycle, int j, double ratio);

CoherentLabel rotate_coherent(CoherentLabel label, double phi);

/// <alpha1| S(z) |beta1> in closed form.
Complex squeeze_amplitude(Complex alpha1, Complex beta1, Complex z);

/// Same amplitude from a truncated-Fock realization of S(z).
Complex squeeze_amplitude_numeric(Complex alpha1, Complex beta1, Complex z, int n_max);

/// Closed form, verified against the Fock realization; divergence beyond tol throws truncation.
Complex checked_squeeze_amplitude(Complex alpha1, Complex beta1, Complex z, double tol = 1e-8);

/// S(z) R(phi_rot) on a truncated Fock space.
fock::Matrix transfer_operator(const SqueezeParams& sq, int n_max);

/// |<beta e^{i gamma}| S(z) R(phi_rot) |alpha_c>| as a function of |beta|.
double full_transfer_modulus(Complex alpha_c, double beta_abs, double gamma, const SqueezeParams& sq);

struct FullTransferReport {
  double a1 = 0, b1 = 0, c1 = 0;
  double discriminant = 0;
  std::vector<double> roots;  // admissible |beta| values
  double best_beta = 0;       // |beta| maximizing the modulus
  double best_modulus = 0;
  double residual = 1;        // 1 - best_modulus
};

/// Coefficients, roots and best achievable modulus without throwing.
FullTransferReport analyze_full_transfer(Complex alpha_c, double gamma, const SqueezeParams& sq);

class NoSolutionError : public Error {
 public:
  NoSolutionError(const std::string& what, double best_modulus)
      : Error(ErrorCategory::no_solution, "oscillator_analytics", what), best_modulus_(best_modulus) {}
  double best_modulus() const noexcept { return best_modulus_; }

 private:
  double best_modulus_;
};

/// As analyze_full_transfer, but throws NoSolutionError when no admissible root exists.
FullTransferReport solve_full_transfer(Complex alpha_c, double gamma, const SqueezeParams& sq);

/// D(-beta): maps |beta> to the ground state.
fock::Matrix displacement_transfer(Complex beta, int n_max);

}  // namespace haltsim::osc
