#include "haltsim/modulation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/numeric/odeint.hpp>

namespace haltsim::fm {
namespace {

constexpr const char* kModule = "frequency_modulation";
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_2pi(double x) {
  double y = std::fmod(x, kTwoPi);
  if (y < 0.0) y += kTwoPi;
  if (y >= kTwoPi) y = 0.0;
  return y;
}

double smoothstep(double x) { return x * x * x * (10.0 + x * (-15.0 + 6.0 * x)); }

// Frequency seen by the dynamics; the sudden jump has already happened for every t >= 0.
double dyn_omega2(const ModulationProfile& p, double t) {
  if (p.family == ModulationProfile::Family::sudden_jump) return p.omega_end * p.omega_end;
  return p.omega2(t);
}

// Integration segments split at the ramp end, where omega^2 is only C^2.
std::vector<std::pair<double, double>> segments(const ModulationProfile& p) {
  const double d = p.duration();
  std::vector<std::pair<double, double>> s;
  if (p.family == ModulationProfile::Family::smooth_ramp) {
    s.emplace_back(0.0, p.ramp_time);
    if (p.hold_time > 0.0) s.emplace_back(p.ramp_time, d);
  } else if (d > 0.0) {
    s.emplace_back(0.0, d);
  }
  return s;
}

double initial_dt(const ModulationProfile& p) {
  return 1e-3 / std::max(p.omega_start, p.omega_end);
}

}  // namespace

ModulationProfile ModulationProfile::constant(double omega, double duration) {
  ModulationProfile p;
  p.family = Family::constant;
  p.omega_start = p.omega_end = omega;
  p.hold_time = duration;
  p.validate();
  return p;
}

ModulationProfile ModulationProfile::sudden_jump(double omega_c, double omega0, double hold) {
  ModulationProfile p;
  p.family = Family::sudden_jump;
  p.omega_start = omega_c;
  p.omega_end = omega0;
  p.hold_time = hold;
  p.validate();
  return p;
}

ModulationProfile ModulationProfile::smooth_ramp(double omega_c, double omega0, double ramp, double bump,
                                                 double hold) {
  ModulationProfile p;
  p.family = Family::smooth_ramp;
  p.omega_start = omega_c;
  p.omega_end = omega0;
  p.ramp_time = ramp;
  p.bump = bump;
  p.hold_time = hold;
  p.validate();
  return p;
}

double ModulationProfile::duration() const {
  return family == Family::smooth_ramp ? ramp_time + hold_time : hold_time;
}

double ModulationProfile::omega2(double t) const {
  const double ws2 = omega_start * omega_start;
  const double we2 = omega_end * omega_end;
  switch (family) {
    case Family::constant: return ws2;
    case Family::sudden_jump: return t > 0.0 ? we2 : ws2;
    case Family::smooth_ramp: {
      if (t >= ramp_time) return we2;
      if (t <= 0.0) return ws2;
      const double x = t / ramp_time;
      const double sn = std::sin(std::numbers::pi * x);
      return ws2 + (we2 - ws2) * smoothstep(x) + bump * we2 * sn * sn;
    }
  }
  return ws2;
}

double ModulationProfile::omega(double t) const { return std::sqrt(std::max(0.0, omega2(t))); }

std::vector<std::pair<double, double>> ModulationProfile::samples(int n) const {
  std::vector<std::pair<double, double>> out;
  const double d = duration();
  if (n < 2) n = 2;
  for (int i = 0; i < n; ++i) {
    const double t = d * i / (n - 1);
    out.emplace_back(t, omega(t));
  }
  return out;
}

void ModulationProfile::validate() const {
  auto fail = [](const std::string& m) { throw Error(ErrorCategory::input, kModule, m); };
  if (!(omega_start > 0.0) || !(omega_end > 0.0)) fail("frequencies must be positive");
  if (!(hold_time >= 0.0) || !std::isfinite(hold_time)) fail("hold time must be finite and >= 0");
  if (family == Family::constant && omega_start != omega_end) fail("constant profile needs omega_start == omega_end");
  if (family == Family::smooth_ramp) {
    if (!(ramp_time > 0.0) || !std::isfinite(ramp_time)) fail("ramp time must be positive");
    for (int i = 0; i <= 400; ++i) {
      if (!(omega2(ramp_time * i / 400.0) > 0.0)) fail("profile frequency not positive; reduce the bump");
    }
  }
}

const char* family_name(ModulationProfile::Family f) {
  switch (f) {
    case ModulationProfile::Family::constant: return "constant";
    case ModulationProfile::Family::sudden_jump: return "sudden-jump";
    case ModulationProfile::Family::smooth_ramp: return "smooth-ramp";
  }
  return "?";
}

BogoliubovPair pair_from_solutions(double f1, double f1d, double f2, double f2d, double omega_in,
                                   double omega_out) {
  // a_out = sqrt(w/2)(x + i p / w); x, p evolve as x f1 + p f2, x f1' + p f2'.
  const double s = std::sqrt(omega_out / 2.0);
  const Complex cx = s * Complex(f1, f1d / omega_out);
  const Complex cp = s * Complex(f2, f2d / omega_out);
  const Complex i{0.0, 1.0};
  const Complex a = cx / std::sqrt(2.0 * omega_in);
  const Complex b = i * cp * std::sqrt(omega_in / 2.0);
  return {a - b, a + b};
}

BogoliubovTrace integrate_bogoliubov_traced(const ModulationProfile& profile, const IntegrationOptions& opt) {
  namespace ode = boost::numeric::odeint;
  profile.validate();
  using State = std::array<double, 4>;  // f1, f1', f2, f2'
  State x{1.0, 0.0, 0.0, 1.0};
  BogoliubovTrace tr;

  auto out_omega = [&](double t) {
    return profile.family == ModulationProfile::Family::sudden_jump ? profile.omega_end : profile.omega(t);
  };
  auto observe = [&](const State& s, double t) {
    const BogoliubovPair p = pair_from_solutions(s[0], s[1], s[2], s[3], profile.omega_start, out_omega(t));
    tr.max_identity_defect = std::max(tr.max_identity_defect, std::abs(p.identity() - 1.0));
    ++tr.steps;
  };
  auto rhs = [&](const State& s, State& ds, double t) {
    const double w2 = dyn_omega2(profile, t);
    ds[0] = s[1];
    ds[1] = -w2 * s[0];
    ds[2] = s[3];
    ds[3] = -w2 * s[2];
  };

  observe(x, 0.0);
  for (auto [t0, t1] : segments(profile)) {
    auto stepper = ode::make_controlled(opt.atol, opt.rtol, ode::runge_kutta_dopri5<State>());
    ode::integrate_adaptive(stepper, rhs, x, t0, t1, std::min(initial_dt(profile), t1 - t0), observe);
  }
  tr.pair = pair_from_solutions(x[0], x[1], x[2], x[3], profile.omega_start, profile.omega_end);
  if (tr.max_identity_defect > opt.identity_tol) {
    std::ostringstream os;
    os << "Bogoliubov identity drifted by " << tr.max_identity_defect << " (> " << opt.identity_tol
       << "); suggested refinement: rtol " << opt.rtol / 100.0;
    throw Error(ErrorCategory::integration, kModule, os.str());
  }
  return tr;
}

BogoliubovPair integrate_bogoliubov(const ModulationProfile& profile, const IntegrationOptions& opt) {
  return integrate_bogoliubov_traced(profile, opt).pair;
}

osc::SqueezeParams params_from_bogoliubov(const BogoliubovPair& pair) {
  osc::SqueezeParams sq;
  const double au = std::abs(pair.u);
  sq.r = au > 1.0 ? std::acosh(au) : 0.0;
  sq.phi_rot = wrap_2pi(-std::arg(pair.u));
  sq.phi_sq = std::abs(pair.v) > 0.0 ? wrap_2pi(sq.phi_rot - std::arg(pair.v) + std::numbers::pi) : 0.0;
  return sq;
}

BogoliubovPair pair_from_params(const osc::SqueezeParams& sq) {
  return {std::cosh(sq.r) * std::polar(1.0, -sq.phi_rot), -std::sinh(sq.r) * std::polar(1.0, sq.phi_rot - sq.phi_sq)};
}

osc::FockVector propagate_fock_td(const ModulationProfile& profile, const osc::FockVector& psi0,
                                  const FockPropagationOptions& opt) {
  namespace ode = boost::numeric::odeint;
  profile.validate();
  const double n0 = psi0.norm();
  if (std::abs(n0 - 1.0) > std::max(psi0.tail_tol, 1e-10))
    throw Error(ErrorCategory::input, kModule, "psi0 must be normalized");
  const int n = psi0.n_max;
  const int nw = opt.work_nmax >= n ? opt.work_nmax : 2 * n + 20;
  using State = std::vector<Complex>;
  State psi(nw + 1, Complex{});
  for (int k = 0; k <= n; ++k) psi[k] = psi0.amps(k);

  // H = d (2n+1) + o (a^2 + a^dag^2) in the omega_start ladder basis.
  const double wr = profile.omega_start;
  std::vector<double> up(nw + 1, 0.0);  // sqrt((k+1)(k+2))
  for (int k = 0; k + 2 <= nw; ++k) up[k] = std::sqrt((k + 1.0) * (k + 2.0));
  auto rhs = [&](const State& s, State& ds, double t) {
    const double w2 = dyn_omega2(profile, t);
    const double d = 0.25 * (wr + w2 / wr);
    const double o = 0.25 * (w2 / wr - wr);
    const Complex mi{0.0, -1.0};
    for (int k = 0; k <= nw; ++k) {
      Complex h = d * (2.0 * k + 1.0) * s[k];
      if (k + 2 <= nw) h += o * up[k] * s[k + 2];
      if (k >= 2) h += o * up[k - 2] * s[k - 2];
      ds[k] = mi * h;
    }
  };
  double drift = 0.0;
  auto observe = [&](const State& s, double) {
    double nn = 0.0;
    for (const auto& c : s) nn += std::norm(c);
    drift = std::max(drift, std::abs(std::sqrt(nn) - n0));
  };
  for (auto [t0, t1] : segments(profile)) {
    auto stepper = ode::make_controlled(opt.atol, opt.rtol, ode::runge_kutta_dopri5<State>());
    ode::integrate_adaptive(stepper, rhs, psi, t0, t1, std::min(initial_dt(profile), t1 - t0), observe);
  }
  if (drift > opt.norm_tol) {
    std::ostringstream os;
    os << "norm drift " << drift << " exceeds " << opt.norm_tol << "; reduce rtol or raise work_nmax";
    throw Error(ErrorCategory::integration, kModule, os.str());
  }

  Eigen::VectorXcd v = Eigen::Map<Eigen::VectorXcd>(psi.data(), nw + 1);
  if (profile.omega_end != profile.omega_start) {
    // |n_out><m_in| overlaps: the sudden-jump map between the two ladders.
    const auto basis = params_from_bogoliubov(pair_from_solutions(1.0, 0.0, 0.0, 1.0, wr, profile.omega_end));
    v = osc::transfer_operator(basis, nw) * v;
  }
  osc::FockVector out;
  out.n_max = n;
  out.tail_tol = psi0.tail_tol;
  out.amps = v.head(n + 1);
  return out;
}

osc::FockVector apply_transfer(const osc::SqueezeParams& sq, const osc::FockVector& psi, int pad) {
  const int n = psi.n_max;
  const int nw = pad >= 0 ? n + pad : 2 * n + 20;
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(nw + 1);
  v.head(n + 1) = psi.amps;
  v = osc::transfer_operator(sq, nw) * v;
  osc::FockVector out = psi;
  out.amps = v.head(n + 1);
  return out;
}

namespace {

struct Candidate {
  double ramp = 0.0;
  double bump = 0.0;
  Complex v{};
  bool ok = false;
};

Candidate ramp_v(double wc, double w0, double ramp, double bump) {
  Candidate c{ramp, bump, {}, false};
  if (!(ramp > 0.0) || std::abs(bump) > 4.0) return c;
  try {
    c.v = integrate_bogoliubov(ModulationProfile::smooth_ramp(wc, w0, ramp, bump)).v;
    c.ok = true;
  } catch (const Error&) {
  }
  return c;
}

// Damped Newton on the complex equation v(ramp, bump) = 0 over the free coordinates.
Candidate refine(double wc, double w0, Candidate c, bool free_ramp, bool free_bump) {
  for (int it = 0; it < 40 && c.ok && std::abs(c.v) > 1e-12; ++it) {
    const double hr = 1e-6 * c.ramp;
    const double hb = 1e-6;
    Complex dr{}, db{};
    if (free_ramp) {
      const Candidate p = ramp_v(wc, w0, c.ramp + hr, c.bump);
      if (!p.ok) break;
      dr = (p.v - c.v) / hr;
    }
    if (free_bump) {
      const Candidate p = ramp_v(wc, w0, c.ramp, c.bump + hb);
      if (!p.ok) break;
      db = (p.v - c.v) / hb;
    }
    double sr = 0.0, sb = 0.0;
    if (free_ramp && free_bump) {
      Eigen::Matrix2d j;
      j << dr.real(), db.real(), dr.imag(), db.imag();
      const Eigen::Vector2d step = j.fullPivLu().solve(Eigen::Vector2d(-c.v.real(), -c.v.imag()));
      if (!step.allFinite()) break;
      sr = step(0);
      sb = step(1);
    } else if (free_ramp || free_bump) {
      // least squares in one coordinate
      const Complex d = free_ramp ? dr : db;
      const double denom = std::norm(d);
      if (denom == 0.0) break;
      const double s = -(d.real() * c.v.real() + d.imag() * c.v.imag()) / denom;
      (free_ramp ? sr : sb) = s;
    } else {
      break;
    }
    // keep ramp steps modest so the phase of v stays on one branch
    const double cap = 0.25 * c.ramp;
    if (std::abs(sr) > cap) {
      const double f = cap / std::abs(sr);
      sr *= f;
      sb *= f;
    }
    bool improved = false;
    for (double lam = 1.0; lam > 1e-4; lam *= 0.5) {
      const Candidate t = ramp_v(wc, w0, c.ramp + lam * sr, c.bump + lam * sb);
      if (t.ok && std::abs(t.v) < std::abs(c.v)) {
        c = t;
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
  return c;
}

DesignResult finish(const ModulationProfile& profile, Complex alpha_c, double gamma) {
  DesignResult r;
  r.profile = profile;
  r.squeeze = params_from_bogoliubov(integrate_bogoliubov(profile));
  r.transfer = osc::analyze_full_transfer(alpha_c, gamma, r.squeeze);
  r.residual = r.transfer.residual;
  return r;
}

}  // namespace

DesignResult design_modulation(double omega_c, double omega0, Complex alpha_c, double gamma,
                               const DesignOptions& opt) {
  if (!(omega_c > 0.0) || !(omega0 > 0.0)) throw Error(ErrorCategory::input, kModule, "frequencies must be positive");
  if (omega_c > omega0) throw Error(ErrorCategory::input, kModule, "design requires omega_c <= omega0");
  const double needed_rot = wrap_2pi(std::arg(alpha_c) - gamma);

  DesignResult best;
  if (omega_c == omega0) {
    best = finish(ModulationProfile::constant(omega0, opt.allow_hold ? needed_rot / omega0 : 0.0), alpha_c, gamma);
  } else {
    const bool free_ramp = !opt.fixed_ramp_time.has_value();
    const bool free_bump = !opt.fixed_bump.has_value();
    const double bump0 = opt.fixed_bump.value_or(0.0);

    std::vector<Candidate> seeds;
    if (free_ramp) {
      const double lo = 0.5 * kTwoPi / omega0;
      const double hi = 6.0 * kTwoPi / omega_c;
      const int n = 48;
      for (int i = 0; i < n; ++i) {
        const Candidate c = ramp_v(omega_c, omega0, lo * std::pow(hi / lo, i / (n - 1.0)), bump0);
        if (c.ok) seeds.push_back(c);
      }
    } else {
      const Candidate c = ramp_v(omega_c, omega0, *opt.fixed_ramp_time, bump0);
      if (c.ok) seeds.push_back(c);
    }
    if (seeds.empty()) throw Error(ErrorCategory::input, kModule, "no valid ramp in the requested family");
    std::sort(seeds.begin(), seeds.end(), [](const Candidate& a, const Candidate& b) { return std::abs(a.v) < std::abs(b.v); });
    if (seeds.size() > 6) seeds.resize(6);

    bool have = false;
    for (const Candidate& s : seeds) {
      const Candidate c = refine(omega_c, omega0, s, free_ramp, free_bump);
      if (!c.ok) continue;
      const auto sq = params_from_bogoliubov(integrate_bogoliubov(ModulationProfile::smooth_ramp(omega_c, omega0, c.ramp, c.bump)));
      const double hold = opt.allow_hold ? wrap_2pi(needed_rot - sq.phi_rot) / omega0 : 0.0;
      DesignResult r = finish(ModulationProfile::smooth_ramp(omega_c, omega0, c.ramp, c.bump, hold), alpha_c, gamma);
      if (!have || r.residual < best.residual) {
        best = r;
        have = true;
      }
      if (best.residual < 0.01 * opt.tolerance) break;
    }
  }
  if (!(best.residual < opt.tolerance)) {
    std::ostringstream os;
    os << "modulation search exhausted; best residual " << best.residual << " (tolerance " << opt.tolerance << ")";
    throw InfeasibleError(os.str(), best);
  }
  return best;
}

}  // namespace haltsim::fm
