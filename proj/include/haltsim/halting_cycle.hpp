#pragma once

#include <optional>
#include <string>
#include <vector>

#include "haltsim/kinematics.hpp"
#include "haltsim/wavepacket.hpp"

namespace haltsim::wp {

/// Geometry and numerics for one halting-cycle trajectory.
struct CycleOptions {
  Grid1D grid{-20.0, 45.0, 4096};
  PotentialSpec potential{};  // right wall at flank_end + a + L ~ 36
  double dt = 4e-5;
  double sample_every = 0.005;   // trajectory sampling interval
  double max_flight = 3.0;       // give up if no arrival this long after acceleration
  double min_locked_p_right = 0.99;
};

struct StageRecord {
  std::string stage;
  double t = 0;
  Observables obs;
};

struct TrajectorySample {
  double t = 0;
  double x = 0;
  double p_right = 0;
  double level1 = 0;
};

struct CycleResult {
  int trigger_cycle = 0;
  double arrival_time = 0;         // T_i: <x> crosses arrival_x moving left
  std::size_t arrival_step = 0;
  double bounce_time = 0;          // turning point of <x> at the wall
  double final_overlap = 1;        // |<psi_ref(T_ref)|psi_i(T_ref)>|^2
  double min_locked_p_right = 1;   // over [t_mi, t_acc]
  double spread_at_arrival = 0;
  std::vector<StageRecord> stages;
  std::vector<TrajectorySample> trajectory;
  std::optional<SpinorWave> snapshot;  // state at the requested snapshot step
};

/// Consistency of the schedule with the geometry; throws schedule errors.
void check_cycle_schedule(const kin::ScheduleConfig& c, const CycleOptions& opt);

/// One trajectory triggered in cycle i. The run starts at the trigger (the ground packet is
/// stationary before it). The state is kept at snapshot_step when set, else at the arrival step.
CycleResult run_halting_cycle_raw(const kin::ScheduleConfig& c, int i, const CycleOptions& opt = {},
                                  std::optional<std::size_t> snapshot_step = std::nullopt);

/// Trajectory for cycle i, with the final overlap taken against the reference run i = 1
/// at its arrival: the transfer that returns packet 1 exactly to the ground state.
CycleResult run_halting_cycle(const kin::ScheduleConfig& c, int i, const CycleOptions& opt = {});

/// Runs for several cycles sharing one reference run.
std::vector<CycleResult> run_cycle_ensemble(const kin::ScheduleConfig& c, const std::vector<int>& cycles,
                                            const CycleOptions& opt = {});

/// Ground packet of the left well (relaxed with the right well walled off).
SpinorWave left_ground_state(const CycleOptions& opt, const std::vector<double>& potential);

/// P_right gained by the left-well ground packet over `duration` with no pulses.
double ground_leakage(const CycleOptions& opt, double duration);

}  // namespace haltsim::wp
