#include "haltsim/halting_cycle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "haltsim/simd/kernels.hpp"

namespace haltsim::wp {
namespace {

constexpr const char* kModule = "wavepacket_sim";

std::size_t to_step(double t, double dt) { return static_cast<std::size_t>(std::llround(t / dt)); }

struct Event {
  std::size_t step;
  int order;  // decelerations before the acceleration at the same instant
  KickSpec kick;
  std::string name;
};

}  // namespace

SpinorWave left_ground_state(const CycleOptions& opt, const std::vector<double>& v) {
  // The flat right well holds lower states; relax with it walled off.
  std::vector<double> left = v;
  const double split = opt.potential.barrier_center();
  for (std::size_t j = 0; j < opt.grid.n; ++j)
    if (opt.grid.x(j) >= split) left[j] = opt.potential.pad_height();
  return ground_state(opt.grid, left, opt.potential.center, 1.0 / std::sqrt(std::sqrt(opt.potential.K)), 0);
}

void check_cycle_schedule(const kin::ScheduleConfig& c, const CycleOptions& opt) {
  c.validate();
  auto bad = [](const std::string& w) { throw Error(ErrorCategory::schedule, kModule, w); };
  const PotentialSpec& p = opt.potential;
  if (!(c.E_h() >= 2.0 * p.barrier_height)) bad("trigger energy must be well above the barrier (E_h >= 2 V0)");
  if (!(0.5 * c.m_h * c.v * c.v < p.pad_height())) bad("return energy exceeds the wall pad height");
  const double sigma = 1.0 / std::sqrt(c.m_h * c.omega0);
  if (!(c.reference_position() - 4.0 * sigma > p.barrier_center()))
    bad("packet has not cleared the barrier when the decelerating pulse fires");
  const double rmax = c.reference_position() + c.v0 * (c.m_r - 1) * c.dT;
  if (!(rmax + 4.0 * sigma < p.right_wall())) bad("drifting packet reaches the right wall before acceleration");
  if (std::abs(c.wall_x - p.right_wall()) > 1.0) bad("schedule wall_x disagrees with the potential geometry");
}

CycleResult run_halting_cycle_raw(const kin::ScheduleConfig& c, int i, const CycleOptions& opt,
                                  std::optional<std::size_t> snapshot_step) {
  check_cycle_schedule(c, opt);
  if (i < 1 || i > c.m_r) throw Error(ErrorCategory::input, kModule, "trigger cycle outside 1..m_r");
  if (std::abs(c.m_h - 1.0) > 0.0) throw Error(ErrorCategory::input, kModule, "wave engine uses m_h = 1 units");
  const Grid1D& g = opt.grid;
  const std::vector<double> v = build_potential(opt.potential, g);
  const double split = opt.potential.barrier_center();
  const double dt = opt.dt;

  SpinorWave w = left_ground_state(opt, v);
  SplitOperator op(g, v, dt, w.mass);
  if (!(op.kinetic_phase() < M_PI / 4.0)) throw Error(ErrorCategory::input, kModule, "dt above the stability heuristic");

  // Triggered branch only. A two-level Raman swap is an involution, so a repeated decelerating
  // pulse would undo the lock; the C2 phase-only action is carried by the register engine.
  std::vector<Event> ev;
  ev.push_back({to_step(c.trigger_time(i), dt), 0, {c.m_h * c.v_h, +1, 0, true, g.x_min, split}, "trigger"});
  ev.push_back({to_step(c.decel_time(i), dt), 1, {c.m_h * (c.v_h - c.v0), -1, 1, true, split, g.x_max}, "decelerate"});
  ev.push_back({to_step(c.accel_time(), dt), 2, {c.m_h * (c.v - c.v0), +1, 0, true, split, g.x_max}, "accelerate"});
  std::sort(ev.begin(), ev.end(), [](const Event& a, const Event& b) {
    return a.step != b.step ? a.step < b.step : a.order < b.order;
  });

  CycleResult r;
  r.trigger_cycle = i;
  const std::size_t start = ev.front().step;
  const std::size_t decel_step = to_step(c.decel_time(i), dt);
  const std::size_t accel_step = to_step(c.accel_time(), dt);
  const std::size_t last_step = accel_step + to_step(opt.max_flight, dt);
  const std::size_t sample_stride = std::max<std::size_t>(1, to_step(opt.sample_every, dt));

  auto record = [&](const std::string& name, std::size_t step) {
    r.stages.push_back({name, step * dt, measure(w, op, split)});
  };

  // <x>, P_right and level weights, cheap enough for every step
  const std::vector<double> xs = g.xs();
  std::vector<double> right(g.n);
  for (std::size_t j = 0; j < g.n; ++j) right[j] = xs[j] >= split ? 1.0 : 0.0;
  auto quick = [&](const SpinorWave& s) {
    const auto& kr = simd::kernels();
    Observables q;
    double tot = 0, sx = 0, sr = 0;
    for (int l = 0; l < 2; ++l) {
      const double wl = kr.norm2(s.psi[l].data(), g.n);
      q.level[l] = wl * g.dx();
      tot += wl;
      sx += kr.weighted_norm2(s.psi[l].data(), xs.data(), g.n);
      sr += kr.weighted_norm2(s.psi[l].data(), right.data(), g.n);
    }
    q.norm = tot * g.dx();
    q.x = sx / tot;
    q.p_right = sr * g.dx();
    return q;
  };

  std::size_t next = 0;
  std::size_t step = start;
  double x_prev = 0.0;
  bool have_prev = false;
  bool returning = false;
  bool arrived = false;
  double x_max_seen = -1e300;
  while (step <= last_step) {
    while (next < ev.size() && ev[next].step == step) {
      record("before-" + ev[next].name, step);
      apply_kick(w, ev[next].kick);
      record(ev[next].name, step);
      ++next;
    }
    if (snapshot_step && step == *snapshot_step) r.snapshot = w;

    const Observables o = quick(w);
    if (step >= decel_step && step <= accel_step) r.min_locked_p_right = std::min(r.min_locked_p_right, o.p_right);
    if ((step - start) % sample_stride == 0) r.trajectory.push_back({step * dt, o.x, o.p_right, o.level[1]});

    if (step > accel_step) {
      if (!returning) {
        if (o.x > x_max_seen) {
          x_max_seen = o.x;
          r.bounce_time = step * dt;
        } else if (o.x < x_max_seen - 1.0) {
          returning = true;
        }
      }
      if (returning && !arrived && have_prev && x_prev > c.arrival_x && o.x <= c.arrival_x) {
        const double frac = (x_prev - c.arrival_x) / (x_prev - o.x);
        r.arrival_time = (step - 1 + frac) * dt;
        r.arrival_step = step;
        arrived = true;
        if (!snapshot_step) r.snapshot = w;
        record("arrival", step);
        r.spread_at_arrival = r.stages.back().obs.spread;
      }
    }
    x_prev = o.x;
    have_prev = true;

    const bool snapshot_done = !snapshot_step || step >= *snapshot_step;
    if (arrived && snapshot_done && step >= r.arrival_step) break;
    op.evolve(w, 1);
    ++step;
  }
  if (!arrived) throw Error(ErrorCategory::schedule, kModule, "packet did not return within max_flight");
  if (snapshot_step && !r.snapshot) {
    // arrival came first; continue to the requested step
    std::size_t s = step;
    if (*snapshot_step > s) op.evolve(w, *snapshot_step - s);
    r.snapshot = w;
  }
  if (r.min_locked_p_right < opt.min_locked_p_right) {
    std::ostringstream os;
    os << "packet leaked out of the right well during the locked phase (P_right " << r.min_locked_p_right << ")";
    throw Error(ErrorCategory::schedule, kModule, os.str());
  }
  return r;
}

std::vector<CycleResult> run_cycle_ensemble(const kin::ScheduleConfig& c, const std::vector<int>& cycles,
                                            const CycleOptions& opt) {
  // reference: run 1, kept at its own arrival step
  CycleResult ref_snap = run_halting_cycle_raw(c, 1, opt);
  const SpinorWave& psi_ref = *ref_snap.snapshot;
  const std::size_t ref_step = ref_snap.arrival_step;
  std::vector<CycleResult> out;
  for (int i : cycles) {
    if (i == 1) {
      CycleResult r = ref_snap;
      r.final_overlap = 1.0;
      r.snapshot.reset();
      out.push_back(std::move(r));
      continue;
    }
    CycleResult r = run_halting_cycle_raw(c, i, opt, ref_step);
    r.final_overlap = std::norm(overlap(psi_ref, *r.snapshot));
    r.snapshot.reset();
    out.push_back(std::move(r));
  }
  return out;
}

CycleResult run_halting_cycle(const kin::ScheduleConfig& c, int i, const CycleOptions& opt) {
  return run_cycle_ensemble(c, {i}, opt).front();
}

double ground_leakage(const CycleOptions& opt, double duration) {
  const std::vector<double> v = build_potential(opt.potential, opt.grid);
  const double split = opt.potential.barrier_center();
  SpinorWave w = left_ground_state(opt, v);
  const double before = measure(w, v, split).p_right;
  SplitOperator op(opt.grid, v, opt.dt, w.mass);
  op.evolve(w, to_step(duration, opt.dt));
  return measure(w, op, split).p_right - before;
}

}  // namespace haltsim::wp
