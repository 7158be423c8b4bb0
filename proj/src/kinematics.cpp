#include "haltsim/kinematics.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "haltsim/oscillator.hpp"

namespace haltsim::kin {
namespace {

constexpr const char* kModule = "control_kinematics";

[[noreturn]] void fail(ErrorCategory cat, const std::string& what) { throw Error(cat, kModule, what); }

void check_index(const ScheduleConfig& c, int j) {
  if (j < 1 || j > c.m_r) {
    std::ostringstream os;
    os << "cycle index " << j << " outside 1.." << c.m_r;
    fail(ErrorCategory::input, os.str());
  }
}

}  // namespace

void ScheduleConfig::validate() const {
  auto bad = [](const std::string& w) { fail(ErrorCategory::schedule, w); };
  if (m_r < 1) bad("m_r must be >= 1");
  for (double d : {dT, dt_b, dt_h, dt_hp, dt_r, dt0, dt_f, T_D, T_A})
    if (!(d >= 0.0) || !std::isfinite(d)) bad("durations must be finite and >= 0");
  const double sum = dt_b + dt_h + dt_hp + dt_r + dt0 + dt_f;
  if (std::abs(sum - dT) > 1e-12 * std::max(1.0, dT)) {
    std::ostringstream os;
    os << "stage durations sum to " << sum << " but dT = " << dT;
    bad(os.str());
  }
  if (!(dt0 < dT - dt_r)) bad("lock window dt0 must be shorter than dT - dt_r");
  if (!(T_D < dt_f || (T_D == 0.0 && dt_f == 0.0))) bad("T_D must be shorter than dt_f");
  if (!(v0 > 0.0)) bad("v0 must be positive");
  if (!(v0 < v_h)) bad("v0 must be below v_h");
  if (!(v_h <= v)) bad("v_h must not exceed v");
  if (!(omega0 > 0.0) || !(omega_c > 0.0)) bad("frequencies must be positive");
  if (!(omega_c <= omega0)) bad("omega_c must not exceed omega0");
  if (!(m_h > 0.0)) bad("m_h must be positive");
  if (!(mean_n_c >= 0.0)) bad("mean_n_c must be >= 0");
  const double rmax = reference_position() + v0 * (m_r - 1) * dT;
  if (!(rmax < wall_x)) bad("drifting packets reach the wall before acceleration");
}

EndPositions end_positions(const ScheduleConfig& c) {
  c.validate();
  EndPositions e;
  const double t_end = c.accel_time();
  for (int i = 1; i <= c.m_r; ++i)
    e.R.push_back(c.reference_position() + c.v0 * (t_end - c.decel_time(i) - c.T_D));
  e.distance.assign(c.m_r, std::vector<double>(c.m_r, 0.0));
  for (int i = 1; i <= c.m_r; ++i)
    for (int j = 1; j <= c.m_r; ++j) e.distance[i - 1][j - 1] = c.v0 * (j - i) * c.dT;
  return e;
}

ArrivalTimes arriving_times(const ScheduleConfig& c) {
  const EndPositions e = end_positions(c);
  ArrivalTimes a;
  const double t0 = c.accel_time();
  for (int i = 1; i <= c.m_r; ++i) a.T.push_back(t0 + ((c.wall_x - e.R[i - 1]) + (c.wall_x - c.arrival_x)) / c.v);
  a.dT_ji.assign(c.m_r, std::vector<double>(c.m_r, 0.0));
  for (int j = 1; j <= c.m_r; ++j)
    for (int i = 1; i <= c.m_r; ++i) a.dT_ji[j - 1][i - 1] = (j - i) * c.dT * c.v0 / c.v;
  a.max_difference = (c.m_r - 1) * c.dT * c.v0 / c.v;
  return a;
}

double arrival_difference(const ScheduleConfig& c, int i, int j) { return (j - i) * c.dT * c.v0 / c.v; }

FidelityPrediction predicted_fidelity(const ScheduleConfig& c, int j, Regime regime) {
  c.validate();
  check_index(c, j);
  FidelityPrediction f;
  const double delta = arrival_difference(c, 1, j);
  const bool original = regime == Regime::original;
  const double omega = original ? c.omega0 : c.omega_c;
  const double mean_n = original ? c.E_h() / c.omega0 : c.mean_n_c;
  if (original) {
    const double a = osc::amplitude_Aj(mean_n, omega, delta);
    f.probability = a * a;
  } else {
    f.probability = osc::projection_probability(mean_n, omega, delta);
  }
  const double max_phase = omega * (c.m_r - 1) * c.dT * c.ratio();
  if (max_phase >= 0.1 * std::numbers::pi) {
    std::ostringstream os;
    os << "small-phase precondition fails (omega (m_r-1) dT v0/v = " << max_phase
       << "); reporting the exponential form";
    f.warning = os.str();
    f.series_valid = false;
    f.series = f.probability;
  } else {
    f.series = osc::probability_series(mean_n, omega, c.dT, j, c.ratio());
  }
  return f;
}

double toy_estimate(double omega_p, const ScheduleConfig& c, int j) {
  if (j < 1) fail(ErrorCategory::input, "cycle index must be >= 1");
  const double arg = omega_p * (j - 1) * c.dT * c.ratio();
  if (!(std::abs(arg) < 1.0)) fail(ErrorCategory::input, "rotation-pulse estimate out of regime: argument >= 1");
  const double est = 1.0 - 0.25 * arg * arg;
  if (est < 0.0) fail(ErrorCategory::input, "rotation-pulse estimate below 0");
  return est;
}

double search_threshold(double n, double p_n) {
  if (!(n >= 1.0)) fail(ErrorCategory::input, "n must be >= 1");
  if (!(p_n >= 1.0)) fail(ErrorCategory::input, "p(n) must be >= 1");
  return 1.0 - std::log(p_n) / n;
}

}  // namespace haltsim::kin
