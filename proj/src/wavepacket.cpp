#include "haltsim/wavepacket.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <numbers>
#include <sstream>

#include <fftw3.h>

#include "haltsim/simd/kernels.hpp"

namespace haltsim::wp {
namespace {

constexpr const char* kModule = "wavepacket_sim";
constexpr double kPi = std::numbers::pi;

[[noreturn]] void fail(ErrorCategory c, const std::string& w) { throw Error(c, kModule, w); }

bool is_pow2(std::size_t n) { return n && !(n & (n - 1)); }

}  // namespace

double Grid1D::k_max() const { return kPi / dx(); }

std::vector<double> Grid1D::xs() const {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = x(i);
  return v;
}

std::vector<double> Grid1D::ks() const {
  std::vector<double> k(n);
  const double dk = 2.0 * kPi / length();
  for (std::size_t i = 0; i < n; ++i) {
    const auto s = static_cast<double>(i);
    k[i] = (i < n / 2 ? s : s - static_cast<double>(n)) * dk;
  }
  return k;
}

void Grid1D::validate() const {
  if (!(x_max > x_min)) fail(ErrorCategory::input, "grid needs x_max > x_min");
  if (n < 256 || !is_pow2(n)) fail(ErrorCategory::input, "grid size must be a power of two >= 256");
}

double PotentialSpec::flank_end() const { return center + std::sqrt(2.0 * barrier_height / K); }

double PotentialSpec::value(double x) const {
  const double pad = pad_height();
  if (x < left_wall) return pad;
  if (x < flank_end()) return std::min(0.5 * K * (x - center) * (x - center), pad);
  if (x < barrier_end()) return barrier_height;
  if (x < right_wall()) return 0.0;
  return pad;
}

std::vector<double> build_potential(const PotentialSpec& spec, const Grid1D& grid) {
  grid.validate();
  if (!(spec.barrier_height > 0.0) || !(spec.barrier_width > 0.0) || !(spec.K > 0.0) || !(spec.right_length > 0.0))
    fail(ErrorCategory::input, "potential needs V0, a, K, L > 0");
  if (spec.right_wall() >= grid.x_max || spec.center <= grid.x_min)
    fail(ErrorCategory::input, "double-well geometry overflows the grid");
  std::vector<double> v(grid.n);
  for (std::size_t i = 0; i < grid.n; ++i) v[i] = spec.value(grid.x(i));
  return v;
}

std::vector<double> square_barrier(double V0, double a, const Grid1D& grid) {
  grid.validate();
  if (!(a >= 0.0) || 0.0 < grid.x_min || a > grid.x_max) fail(ErrorCategory::input, "barrier outside grid");
  std::vector<double> v(grid.n, 0.0);
  for (std::size_t i = 0; i < grid.n; ++i) {
    const double x = grid.x(i);
    if (x >= 0.0 && x < a) v[i] = V0;
  }
  return v;
}

double SpinorWave::norm() const {
  const auto& k = simd::kernels();
  double s = 0.0;
  for (const auto& c : psi) s += k.norm2(c.data(), c.size());
  return s * grid.dx();
}

SpinorWave init_gaussian(const Grid1D& grid, double x0, double p0, double sigma, int level, double mass) {
  grid.validate();
  if (level != 0 && level != 1) fail(ErrorCategory::input, "level must be 0 or 1");
  if (!(sigma > 0.0)) fail(ErrorCategory::input, "sigma must be positive");
  if (x0 - 5.0 * sigma < grid.x_min || x0 + 5.0 * sigma > grid.x_max)
    fail(ErrorCategory::input, "packet support (5 sigma) leaves the grid");
  if (sigma < 8.0 * grid.dx()) fail(ErrorCategory::input, "grid resolves sigma by fewer than 8 points");
  SpinorWave w;
  w.grid = grid;
  w.mass = mass;
  w.psi[0].assign(grid.n, cplx{});
  w.psi[1].assign(grid.n, cplx{});
  auto& p = w.psi[level];
  for (std::size_t i = 0; i < grid.n; ++i) {
    const double d = grid.x(i) - x0;
    p[i] = std::exp(-d * d / (2.0 * sigma * sigma)) * std::polar(1.0, p0 * d);
  }
  const double s = 1.0 / std::sqrt(w.norm());
  for (auto& c : p) c *= s;
  return w;
}

struct SplitOperator::Impl {
  std::size_t n = 0;
  cplx* buf = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
  std::vector<cplx> vhalf, vfull, kin;
  std::vector<double> k, k2;  // k and k^2 / (2m)

  explicit Impl(std::size_t size) : n(size) {
    buf = reinterpret_cast<cplx*>(fftw_malloc(sizeof(fftw_complex) * n));
    auto* f = reinterpret_cast<fftw_complex*>(buf);
    fwd = fftw_plan_dft_1d(static_cast<int>(n), f, f, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd = fftw_plan_dft_1d(static_cast<int>(n), f, f, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  ~Impl() {
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
    fftw_free(buf);
  }
};

SplitOperator::SplitOperator(const Grid1D& grid, std::vector<double> potential, double dt, double mass)
    : impl_(std::make_unique<Impl>(grid.n)), grid_(grid), v_(std::move(potential)), dt_(dt), mass_(mass) {
  grid.validate();
  if (v_.size() != grid.n) fail(ErrorCategory::input, "potential size does not match grid");
  if (!(mass > 0.0)) fail(ErrorCategory::input, "mass must be positive");
  auto& im = *impl_;
  const double inv_n = 1.0 / static_cast<double>(grid.n);
  im.k = grid.ks();
  im.k2.resize(grid.n);
  im.vhalf.resize(grid.n);
  im.vfull.resize(grid.n);
  im.kin.resize(grid.n);
  for (std::size_t i = 0; i < grid.n; ++i) {
    im.k2[i] = im.k[i] * im.k[i] / (2.0 * mass);
    im.vhalf[i] = std::polar(1.0, -0.5 * v_[i] * dt);
    im.vfull[i] = std::polar(1.0, -v_[i] * dt);
    im.kin[i] = std::polar(inv_n, -im.k2[i] * dt);  // FFT normalization folded in
  }
}

SplitOperator::~SplitOperator() = default;

double SplitOperator::kinetic_phase() const { return grid_.k_max() * grid_.k_max() * dt_ / (2.0 * mass_); }

void SplitOperator::evolve(SpinorWave& wave, std::size_t steps) {
  if (steps == 0) return;
  auto& im = *impl_;
  const auto& kr = simd::kernels();
  const std::size_t n = im.n;
  for (auto& psi : wave.psi) {
    if (psi.size() != n) fail(ErrorCategory::input, "wave does not match stepper grid");
    if (kr.norm2(psi.data(), n) == 0.0) continue;
    std::memcpy(static_cast<void*>(im.buf), psi.data(), n * sizeof(cplx));
    kr.cmul(im.buf, im.vhalf.data(), n);
    for (std::size_t s = 0; s < steps; ++s) {
      fftw_execute(im.fwd);
      kr.cmul(im.buf, im.kin.data(), n);
      fftw_execute(im.bwd);
      kr.cmul(im.buf, s + 1 < steps ? im.vfull.data() : im.vhalf.data(), n);
    }
    std::memcpy(static_cast<void*>(psi.data()), im.buf, n * sizeof(cplx));
  }
}

void SplitOperator::relax(std::vector<cplx>& psi, std::size_t steps) {
  auto& im = *impl_;
  const auto& kr = simd::kernels();
  const std::size_t n = im.n;
  std::vector<cplx> vdecay(n), kdecay(n);
  for (std::size_t i = 0; i < n; ++i) {
    vdecay[i] = std::exp(-0.5 * v_[i] * dt_);
    kdecay[i] = std::exp(-im.k2[i] * dt_) / static_cast<double>(n);
  }
  std::memcpy(static_cast<void*>(im.buf), psi.data(), n * sizeof(cplx));
  for (std::size_t s = 0; s < steps; ++s) {
    kr.cmul(im.buf, vdecay.data(), n);
    fftw_execute(im.fwd);
    kr.cmul(im.buf, kdecay.data(), n);
    fftw_execute(im.bwd);
    kr.cmul(im.buf, vdecay.data(), n);
    const double scale = 1.0 / std::sqrt(kr.norm2(im.buf, n) * grid_.dx());
    for (std::size_t i = 0; i < n; ++i) im.buf[i] *= scale;
  }
  std::memcpy(static_cast<void*>(psi.data()), im.buf, n * sizeof(cplx));
}

double SplitOperator::energy(const std::vector<cplx>& psi) {
  auto& im = *impl_;
  const auto& kr = simd::kernels();
  const std::size_t n = im.n;
  const double wx = kr.norm2(psi.data(), n);
  if (wx == 0.0) return 0.0;
  const double pot = kr.weighted_norm2(psi.data(), v_.data(), n) / wx;
  std::memcpy(static_cast<void*>(im.buf), psi.data(), n * sizeof(cplx));
  fftw_execute(im.fwd);
  const double kin = kr.weighted_norm2(im.buf, im.k2.data(), n) / kr.norm2(im.buf, n);
  return kin + pot;
}

double SplitOperator::mean_momentum(const std::vector<cplx>& psi, double* weight) {
  auto& im = *impl_;
  const auto& kr = simd::kernels();
  const std::size_t n = im.n;
  std::memcpy(static_cast<void*>(im.buf), psi.data(), n * sizeof(cplx));
  fftw_execute(im.fwd);
  const double w = kr.norm2(im.buf, n);
  if (weight) *weight = w;
  return w == 0.0 ? 0.0 : kr.weighted_norm2(im.buf, im.k.data(), n) / w;
}

SpinorWave evolve(const SpinorWave& wave, const std::vector<double>& potential, double dt, std::size_t steps) {
  SplitOperator op(wave.grid, potential, dt, wave.mass);
  if (!(op.kinetic_phase() < kPi / 4.0)) {
    std::ostringstream os;
    os << "dt=" << dt << " gives kinetic phase " << op.kinetic_phase() << " >= pi/4";
    fail(ErrorCategory::input, os.str());
  }
  SpinorWave out = wave;
  const double n0 = out.norm();
  op.evolve(out, steps);
  const double budget = 1e-10 * std::max<double>(1.0, std::ceil(static_cast<double>(steps) / 1e4));
  const double drift = std::abs(out.norm() - n0);
  if (drift > budget) {
    std::ostringstream os;
    os << "norm drift " << drift << " exceeds budget " << budget;
    fail(ErrorCategory::integration, os.str());
  }
  return out;
}

KickSpec raman_kick(double k_a, double k_b, int sign, int target_level, double x_lo, double x_hi) {
  return {k_a + k_b, sign, target_level, true, x_lo, x_hi};
}

void apply_kick(SpinorWave& wave, const KickSpec& kick) {
  if (kick.target_level != 0 && kick.target_level != 1) fail(ErrorCategory::input, "kick target level must be 0 or 1");
  const double k = (kick.sign >= 0 ? 1.0 : -1.0) * kick.hbar_k;
  auto& t = wave.psi[kick.target_level];
  auto& o = wave.psi[1 - kick.target_level];
  for (std::size_t i = 0; i < wave.grid.n; ++i) {
    const double x = wave.grid.x(i);
    if (x < kick.x_lo || x > kick.x_hi) continue;
    const cplx ph = std::polar(1.0, k * x);
    if (kick.swap) {
      const cplx a = t[i];
      t[i] = std::conj(ph) * o[i];
      o[i] = ph * a;
    } else {
      t[i] *= ph;
    }
  }
}

namespace {

Observables measure_with(const SpinorWave& wave, SplitOperator* op, double x_split) {
  const auto& kr = simd::kernels();
  const Grid1D& g = wave.grid;
  const std::size_t n = g.n;
  const std::vector<double> xs = g.xs();
  std::vector<double> x2(n), left(n);
  for (std::size_t i = 0; i < n; ++i) {
    x2[i] = xs[i] * xs[i];
    left[i] = xs[i] < x_split ? 1.0 : 0.0;
  }
  Observables o;
  double sx = 0, sx2 = 0, sl = 0, sp = 0, se = 0;
  for (int l = 0; l < 2; ++l) {
    const auto& p = wave.psi[l];
    const double w = kr.norm2(p.data(), n);
    o.level[l] = w * g.dx();
    sx += kr.weighted_norm2(p.data(), xs.data(), n);
    sx2 += kr.weighted_norm2(p.data(), x2.data(), n);
    sl += kr.weighted_norm2(p.data(), left.data(), n);
    if (op && w > 0.0) {
      sp += op->mean_momentum(p) * w;
      se += op->energy(p) * w;
    }
  }
  const double tot = (o.level[0] + o.level[1]) / g.dx();
  o.norm = o.level[0] + o.level[1];
  if (tot > 0.0) {
    o.x = sx / tot;
    o.spread = std::sqrt(std::max(0.0, sx2 / tot - o.x * o.x));
    o.p = sp / tot;
    o.energy = se / tot;
  }
  o.p_left = sl * g.dx();
  o.p_right = o.norm - o.p_left;
  return o;
}

}  // namespace

Observables measure(const SpinorWave& wave, const std::vector<double>& potential, double x_split) {
  std::vector<double> v = potential.empty() ? std::vector<double>(wave.grid.n, 0.0) : potential;
  SplitOperator op(wave.grid, std::move(v), 0.0, wave.mass);
  Observables o = measure_with(wave, &op, x_split);
  if (potential.empty()) o.energy = std::numeric_limits<double>::quiet_NaN();
  return o;
}

Observables measure(const SpinorWave& wave, SplitOperator& op, double x_split) { return measure_with(wave, &op, x_split); }

cplx overlap(const SpinorWave& a, const SpinorWave& b) {
  if (a.grid.n != b.grid.n) fail(ErrorCategory::input, "overlap of waves on different grids");
  const auto& kr = simd::kernels();
  cplx s{};
  for (int l = 0; l < 2; ++l) s += kr.inner(a.psi[l].data(), b.psi[l].data(), a.grid.n);
  return s * a.grid.dx();
}

SpinorWave ground_state(const Grid1D& grid, const std::vector<double>& potential, double x0, double sigma, int level,
                        double dt, double tol, std::size_t max_steps) {
  SpinorWave w = init_gaussian(grid, x0, 0.0, sigma, level);
  SplitOperator op(grid, potential, dt, w.mass);
  double e_prev = op.energy(w.psi[level]);
  const std::size_t chunk = 200;
  for (std::size_t done = 0; done < max_steps; done += chunk) {
    op.relax(w.psi[level], chunk);
    const double e = op.energy(w.psi[level]);
    if (std::abs(e - e_prev) < tol * std::max(1.0, std::abs(e))) return w;
    e_prev = e;
  }
  fail(ErrorCategory::integration, "imaginary-time relaxation did not converge");
}

double transmission_analytic(double E, double V0, double a, double mass) {
  if (!(E > 0.0)) fail(ErrorCategory::input, "energy must be positive");
  if (V0 == 0.0 || a == 0.0) return 1.0;
  if (E < V0) {
    const double beta = std::sqrt(2.0 * mass * (V0 - E));
    const double s = std::sinh(beta * a);
    return 1.0 / (1.0 + V0 * V0 * s * s / (4.0 * E * (V0 - E)));
  }
  if (E > V0) {
    const double kk = std::sqrt(2.0 * mass * (E - V0));
    const double s = std::sin(kk * a);
    return 1.0 / (1.0 + V0 * V0 * s * s / (4.0 * E * (E - V0)));
  }
  return 1.0 / (1.0 + 0.5 * mass * a * a * V0);
}

double transmission_scan(double E, double V0, double a, double mass, const TransmissionOptions& opt) {
  if (!(E > 0.0)) fail(ErrorCategory::input, "energy must be positive");
  if (!(V0 >= 0.0) || !(a >= 0.0)) fail(ErrorCategory::input, "barrier needs V0 >= 0, a >= 0");
  const Grid1D grid{-opt.half_width, opt.half_width, opt.n};
  const double p0 = std::sqrt(2.0 * mass * E);
  const double sigma_e = p0 / (opt.sigma * std::sqrt(2.0)) / mass;
  const double gap = V0 > 0.0 ? std::abs(V0 - E) : E;
  if (sigma_e > opt.max_relative_bandwidth * gap) {
    std::ostringstream os;
    os << "packet energy spread " << sigma_e << " too wide for |V0 - E| = " << gap << "; widen sigma";
    fail(ErrorCategory::input, os.str());
  }
  const double x0 = -0.5 * opt.half_width;
  SpinorWave w = init_gaussian(grid, x0, p0, opt.sigma, 0, mass);
  const double v = p0 / mass;
  const double t_end = (std::abs(x0) + a + 4.0 * opt.sigma) / v;
  const auto steps = static_cast<std::size_t>(std::ceil(t_end / opt.dt));
  w = evolve(w, square_barrier(V0, a, grid), opt.dt, steps);
  double t = 0.0;
  for (std::size_t i = 0; i < grid.n; ++i)
    if (grid.x(i) >= a) t += std::norm(w.psi[0][i]);
  return t * grid.dx() / w.norm();
}

}  // namespace haltsim::wp
