#pragma once

#include <string>
#include <vector>

#include "haltsim/error.hpp"

namespace haltsim::kin {

/// Protocol timing and kinematics. Units: hbar = m_h = 1, omega0 = 1 unless overridden.
/// Cycle k (1-based) starts at (k-1) dT and runs the stages b, h, h', r, then the lock
/// window dt0, then f. The trigger of cycle k fires at t_0k = (k-1) dT + dt_b + dt_h + dt_hp;
/// the decelerating pulse of cycle k at t_mk = t_0k + dt0; the broadband acceleration at
/// t_acc = t_{m, m_r} + T_D.
struct ScheduleConfig {
  int m_r = 4;
  double dT = 0.15;
  double dt_b = 0.005;
  double dt_h = 0.005;
  double dt_hp = 0.005;
  double dt_r = 0.005;
  double dt0 = 0.11;
  double dt_f = 0.02;
  double T_D = 0.0;
  double T_A = 0.0;
  double v_h = 80.0;
  double v0 = 8.0;
  double v = 80.0;
  double omega0 = 1.0;
  double omega_c = 0.25;
  double mean_n_c = 1.0;  // |alpha_c|^2 after the frequency retune (regime 2)
  double m_h = 1.0;
  double x_trigger = 0.0;  // packet center when the trigger fires
  double wall_x = 36.0;    // reflecting wall of the right well
  double arrival_x = 0.0;  // arrival reference point in the left well
  double spread = 0.70710678118654752;  // packet spread dR

  double ratio() const { return v0 / v; }
  double E_h() const { return 0.5 * m_h * v_h * v_h; }
  double trigger_time(int k) const { return (k - 1) * dT + dt_b + dt_h + dt_hp; }
  double decel_time(int k) const { return trigger_time(k) + dt0; }
  double accel_time() const { return decel_time(m_r) + T_D; }
  /// R_2(t_mi + T_D): the common post-deceleration position.
  double reference_position() const { return x_trigger + v_h * dt0 + v0 * T_D; }

  /// Throws schedule error naming the first violated invariant.
  void validate() const;
};

struct EndPositions {
  std::vector<double> R;                      // R[i-1] = R_{2,i}
  std::vector<std::vector<double>> distance;  // distance[i-1][j-1] = R_{2,i} - R_{2,j}
};

EndPositions end_positions(const ScheduleConfig& c);

struct ArrivalTimes {
  std::vector<double> T;                    // T[i-1]
  std::vector<std::vector<double>> dT_ji;   // dT_ji[j-1][i-1] = T_j - T_i
  double max_difference = 0;                // (m_r - 1) dT v0 / v
};

/// Arrival at arrival_x after the bounce at wall_x, all packets moving at v.
ArrivalTimes arriving_times(const ScheduleConfig& c);

double arrival_difference(const ScheduleConfig& c, int i, int j);

enum class Regime { original = 1, retuned = 2 };

struct FidelityPrediction {
  double probability = 1.0;  // exp form
  double series = 1.0;       // quadratic series, or the exp form when out of regime
  bool series_valid = true;  // false when the small-phase precondition fails
  std::string warning;
};

/// Regime 1: |A_j|^2 with |alpha|^2 = E_h / omega0 at omega0.
/// Regime 2: projection probability with omega_c and |alpha_c|^2.
/// Both also report the quadratic series when the largest phase is small.
FidelityPrediction predicted_fidelity(const ScheduleConfig& c, int j, Regime regime);

/// 1 - [omega_p (j-1) dT (v0/v)]^2 / 4.
double toy_estimate(double omega_p, const ScheduleConfig& c, int j);

/// 1 - ln(p_n) / n.
double search_threshold(double n, double p_n);

inline bool meets_threshold(double fidelity, double n, double p_n) { return fidelity > search_threshold(n, p_n); }

}  // namespace haltsim::kin
