#pragma once

#include <complex>
#include <optional>
#include <utility>
#include <vector>

#include "haltsim/error.hpp"
#include "haltsim/oscillator.hpp"

namespace haltsim::fm {

using Complex = std::complex<double>;

/// Frequency profile omega(t) on [0, duration()], from omega_start to omega_end.
///   constant:    omega_start throughout (omega_start == omega_end), length hold_time
///   sudden_jump: omega_start at t = 0, omega_end for t > 0, length hold_time
///   smooth_ramp: omega^2 = ws^2 + (we^2 - ws^2) s(t/ramp) + bump we^2 sin^2(pi t/ramp) on [0, ramp],
///                with s the quintic smoothstep, then omega_end for hold_time
struct ModulationProfile {
  enum class Family { constant, sudden_jump, smooth_ramp };

  Family family = Family::constant;
  double omega_start = 1.0;
  double omega_end = 1.0;
  double ramp_time = 0.0;
  double bump = 0.0;
  double hold_time = 0.0;

  static ModulationProfile constant(double omega, double duration);
  static ModulationProfile sudden_jump(double omega_c, double omega0, double hold = 0.0);
  static ModulationProfile smooth_ramp(double omega_c, double omega0, double ramp, double bump = 0.0,
                                       double hold = 0.0);

  double duration() const;
  double omega2(double t) const;
  double omega(double t) const;
  std::vector<std::pair<double, double>> samples(int n) const;

  /// Throws input error on a non-positive frequency or broken boundary conditions.
  void validate() const;
};

const char* family_name(ModulationProfile::Family f);

/// U^dag a_out U = u a_in + v a_in^dag, ladders taken at omega_end (out) and omega_start (in).
struct BogoliubovPair {
  Complex u{1.0, 0.0};
  Complex v{0.0, 0.0};

  double identity() const { return std::norm(u) - std::norm(v); }
};

struct IntegrationOptions {
  double rtol = 1e-12;
  double atol = 1e-14;
  double identity_tol = 1e-9;
};

struct BogoliubovTrace {
  BogoliubovPair pair;
  double max_identity_defect = 0.0;  // over every accepted step
  std::size_t steps = 0;
};

/// Pair from the classical solutions f1 (x=1, x'=0) and f2 (x=0, x'=1) evaluated at the end time.
BogoliubovPair pair_from_solutions(double f1, double f1d, double f2, double f2d, double omega_in,
                                   double omega_out);

BogoliubovTrace integrate_bogoliubov_traced(const ModulationProfile& profile, const IntegrationOptions& opt = {});

BogoliubovPair integrate_bogoliubov(const ModulationProfile& profile, const IntegrationOptions& opt = {});

/// r = arcosh|u|, phi_rot = -arg u, phi_sq = phi_rot - arg v + pi, phases in [0, 2pi).
osc::SqueezeParams params_from_bogoliubov(const BogoliubovPair& pair);

BogoliubovPair pair_from_params(const osc::SqueezeParams& sq);

struct FockPropagationOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  double norm_tol = 1e-7;
  int work_nmax = -1;  // internal truncation; -1 picks 2 n_max + 20
};

/// Direct Schrodinger propagation of a Fock vector (omega_start basis) under H(t);
/// returned in the omega_end basis, truncated back to psi0.n_max. Global phase is not tracked.
osc::FockVector propagate_fock_td(const ModulationProfile& profile, const osc::FockVector& psi0,
                                  const FockPropagationOptions& opt = {});

/// S(z) R(phi_rot) psi, evaluated in a padded space and truncated back.
osc::FockVector apply_transfer(const osc::SqueezeParams& sq, const osc::FockVector& psi, int pad = -1);

struct DesignOptions {
  std::optional<double> fixed_ramp_time;
  std::optional<double> fixed_bump;
  bool allow_hold = true;
  double tolerance = 1e-6;
};

struct DesignResult {
  ModulationProfile profile;
  osc::SqueezeParams squeeze;
  osc::FullTransferReport transfer;
  double residual = 1.0;
};

class InfeasibleError : public Error {
 public:
  InfeasibleError(const std::string& what, DesignResult best)
      : Error(ErrorCategory::infeasible, "frequency_modulation", what), best_(std::move(best)) {}
  const DesignResult& best() const noexcept { return best_; }

 private:
  DesignResult best_;
};

/// Search the smooth-ramp family for a profile whose transfer admits the full-transfer root.
DesignResult design_modulation(double omega_c, double omega0, Complex alpha_c, double gamma,
                               const DesignOptions& opt = {});

}  // namespace haltsim::fm
