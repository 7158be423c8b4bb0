#include "haltsim/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "haltsim/cyclic_group.hpp"
#include "haltsim/halting_cycle.hpp"
#include "haltsim/kinematics.hpp"
#include "haltsim/modulation.hpp"
#include "haltsim/oscillator.hpp"
#include "haltsim/protocol.hpp"
#include "haltsim/simd/kernels.hpp"
#include "haltsim/wavepacket.hpp"

namespace haltsim::harness {
namespace {

constexpr const char* kModule = "harness_cli";

[[noreturn]] void input_error(const std::string& what) { throw Error(ErrorCategory::input, kModule, what); }

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

const std::vector<std::string> kScheduleKeys = {"m_r", "dT",  "dt_b",   "dt_h",    "dt_hp",    "dt_r",
                                                "dt0", "dt_f", "T_D",   "T_A",     "v_h",      "v0",
                                                "v",   "omega0", "omega_c", "mean_n_c", "m_h"};

std::set<std::string> allowed_keys(const std::string& exp) {
  std::set<std::string> k;
  if (exp == "protocol") k = {"p", "factor", "kind", "variant", "lock_epsilon", "target_index"};
  if (exp == "fidelity") {
    k = {"ratios", "j", "regime"};
    k.insert(kScheduleKeys.begin(), kScheduleKeys.end());
  }
  if (exp == "scatter") k = {"E", "V0", "a_values", "mass", "n", "sigma", "dt", "half_width"};
  if (exp == "squeeze") k = {"samples", "r_max", "alpha_max"};
  if (exp == "kinematics" || exp == "full-cycle") {
    k = {"ratio", "ratios", "cycles", "n", "dt", "V0", "a"};
    k.insert(kScheduleKeys.begin(), kScheduleKeys.end());
  }
  return k;
}

std::set<std::string> required_keys(const std::string& exp) {
  if (exp == "protocol") return {"p"};
  return {};
}

struct Params {
  const ExperimentConfig& cfg;

  bool has(const std::string& k) const { return cfg.params.count(k) != 0; }

  double num(const std::string& k, double def) const {
    auto it = cfg.params.find(k);
    if (it == cfg.params.end()) return def;
    try {
      std::size_t pos = 0;
      const double v = std::stod(it->second, &pos);
      if (pos != it->second.size() || !std::isfinite(v)) throw std::invalid_argument(k);
      return v;
    } catch (const std::exception&) {
      input_error("key '" + k + "' expects a number, got '" + it->second + "'");
    }
  }

  long integer(const std::string& k, long def) const {
    const double v = num(k, static_cast<double>(def));
    if (v != std::floor(v)) input_error("key '" + k + "' expects an integer");
    return static_cast<long>(v);
  }

  std::string str(const std::string& k, const std::string& def) const {
    auto it = cfg.params.find(k);
    return it == cfg.params.end() ? def : it->second;
  }

  std::vector<double> list(const std::string& k, const std::vector<double>& def) const {
    auto it = cfg.params.find(k);
    if (it == cfg.params.end()) return def;
    std::vector<double> out;
    std::stringstream ss(it->second);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item.empty()) continue;
      try {
        std::size_t pos = 0;
        out.push_back(std::stod(item, &pos));
        if (pos != item.size()) throw std::invalid_argument(k);
      } catch (const std::exception&) {
        input_error("key '" + k + "' has a non-numeric entry '" + item + "'");
      }
    }
    return out;
  }
};

kin::ScheduleConfig schedule_from(const Params& p) {
  kin::ScheduleConfig c;
  c.m_r = static_cast<int>(p.integer("m_r", c.m_r));
  c.dT = p.num("dT", c.dT);
  c.dt_b = p.num("dt_b", c.dt_b);
  c.dt_h = p.num("dt_h", c.dt_h);
  c.dt_hp = p.num("dt_hp", c.dt_hp);
  c.dt_r = p.num("dt_r", c.dt_r);
  c.dt0 = p.num("dt0", c.dt0);
  c.dt_f = p.num("dt_f", c.dt_f);
  c.T_D = p.num("T_D", c.T_D);
  c.T_A = p.num("T_A", c.T_A);
  c.v_h = p.num("v_h", c.v_h);
  c.v = p.num("v", c.v);
  c.v0 = p.num("v0", c.v0);
  c.omega0 = p.num("omega0", c.omega0);
  c.omega_c = p.num("omega_c", c.omega_c);
  c.mean_n_c = p.num("mean_n_c", c.mean_n_c);
  c.m_h = p.num("m_h", c.m_h);
  return c;
}

wp::CycleOptions cycle_options_from(const Params& p, kin::ScheduleConfig& c) {
  wp::CycleOptions o;
  o.grid.n = static_cast<std::size_t>(p.integer("n", static_cast<long>(o.grid.n)));
  o.dt = p.num("dt", o.dt);
  o.potential.barrier_height = p.num("V0", o.potential.barrier_height);
  o.potential.barrier_width = p.num("a", o.potential.barrier_width);
  c.wall_x = o.potential.right_wall();
  return o;
}

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

RunOutput run_protocol(const Params& p) {
  const auto fact = cyclic::factorize_group(static_cast<std::uint64_t>(p.integer("p", 7)));
  if (fact.rank() == 0) input_error("key 'p' must be an odd prime (p - 1 has no factors for p = 2)");
  const long k = p.integer("factor", static_cast<long>(fact.rank()));
  const std::string kind_s = p.str("kind", "multiplicative");
  if (kind_s != "multiplicative" && kind_s != "additive") input_error("key 'kind' must be multiplicative or additive");
  const std::string var_s = p.str("variant", "Qc");
  if (var_s != "Qc" && var_s != "Qh") input_error("key 'variant' must be Qc or Qh");
  const double eps = p.num("lock_epsilon", 0.0);
  if (!(eps >= 0.0 && eps <= 1.0)) input_error("key 'lock_epsilon' must lie in [0, 1]");
  if (k < 1 || static_cast<std::size_t>(k) > fact.rank()) input_error("key 'factor' outside 1..rank");
  const auto kind = kind_s == "additive" ? cyclic::SubspaceKind::additive : cyclic::SubspaceKind::multiplicative;
  const auto sub = cyclic::build_subspace(fact, static_cast<std::size_t>(k), kind);
  const auto variant = var_s == "Qh" ? protocol::Variant::Qh : protocol::Variant::Qc;
  const auto lock = eps > 0.0 ? protocol::LockModel::rotation(eps) : protocol::LockModel::ideal();
  const auto target = static_cast<std::size_t>(p.integer("target_index", 0));

  RunOutput out;
  out.table.header = schema("protocol");
  double min_p = 1.0;
  for (std::size_t x0 = 0; x0 < sub.dimension(); ++x0) {
    const auto r = protocol::run_program(sub, x0, variant, lock, target);
    const auto& sp = r.final_state.space();
    // dominant (level, branch, functional) cell
    double best = -1;
    protocol::HaltingLevel bl = protocol::HaltingLevel::N0;
    unsigned bb = 0;
    std::size_t bf = 0;
    for (auto lv : sp.levels())
      for (unsigned b = 0; b < 2; ++b)
        for (std::size_t f = 0; f < sp.functional_dim(); ++f) {
          const double q = r.final_state.probability(lv, b, f);
          if (q > best) {
            best = q;
            bl = lv;
            bb = b;
            bf = f;
          }
        }
    const std::string fval = bf == sp.blank() ? "blank" : std::to_string(sp.functional_value(bf));
    out.table.rows.push_back({std::to_string(x0), std::to_string(r.trigger_cycle), protocol::level_name(bl),
                              std::to_string(bb), fval, format_double(r.output_probability)});
    min_p = std::min(min_p, r.output_probability);
  }
  std::ostringstream s;
  s << "protocol p=" << fact.p << " m=" << sub.dimension() << " (" << kind_s << ", " << var_s
    << "): min P(C2,1,blank) = " << format_double(min_p);
  out.summary = s.str();
  return out;
}

RunOutput run_fidelity(const Params& p) {
  kin::ScheduleConfig c = schedule_from(p);
  const int j = static_cast<int>(p.integer("j", 2));
  const std::string reg = p.str("regime", "1");
  if (reg != "1" && reg != "2" && reg != "both") input_error("key 'regime' must be 1, 2 or both");
  const auto ratios = p.list("ratios", {0.1, 0.05, 0.01});
  RunOutput out;
  out.table.header = schema("fidelity");
  for (double ratio : ratios) {
    if (!(ratio > 0.0 && ratio <= 1.0)) input_error("key 'ratios' entries must lie in (0, 1]");
    c.v0 = ratio * c.v;
    for (int r : {1, 2}) {
      if ((reg == "1" && r != 1) || (reg == "2" && r != 2)) continue;
      const auto f = kin::predicted_fidelity(c, j, static_cast<kin::Regime>(r));
      out.table.rows.push_back(
          {std::to_string(j), format_double(ratio), std::to_string(r), format_double(f.probability), format_double(f.series)});
    }
  }
  out.summary = "fidelity: " + std::to_string(out.table.rows.size()) + " rows";
  return out;
}

RunOutput run_scatter(const Params& p) {
  const double E = p.num("E", 1.0);
  const double V0 = p.num("V0", 3.0);
  const double mass = p.num("mass", 1.0);
  wp::TransmissionOptions o;
  o.n = static_cast<std::size_t>(p.integer("n", static_cast<long>(o.n)));
  o.sigma = p.num("sigma", o.sigma);
  o.dt = p.num("dt", o.dt);
  o.half_width = p.num("half_width", o.half_width);
  const auto as = p.list("a_values", {1.5, 2.0, 2.5, 3.0, 3.5, 4.0});
  RunOutput out;
  out.table.header = schema("scatter");
  std::vector<double> xa, lt;
  for (double a : as) {
    const double t = wp::transmission_scan(E, V0, a, mass, o);
    out.table.rows.push_back({format_double(a), format_double(E), format_double(V0), format_double(t),
                              format_double(wp::transmission_analytic(E, V0, a, mass))});
    xa.push_back(a);
    lt.push_back(std::log(t));
  }
  std::ostringstream s;
  s << "scatter: " << as.size() << " widths";
  if (as.size() >= 2 && E < V0) {
    const double beta = std::sqrt(2.0 * mass * (V0 - E));
    s << "; fitted d(ln T)/da = " << format_double(least_squares_slope(xa, lt)) << " vs -2 beta = " << format_double(-2.0 * beta);
  }
  out.summary = s.str();
  return out;
}

RunOutput run_squeeze(const Params& p, std::uint64_t seed) {
  const long n = p.integer("samples", 50);
  const double r_max = p.num("r_max", 1.0);
  const double a_max = p.num("alpha_max", 1.5);
  if (n < 0) input_error("key 'samples' must be >= 0");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  RunOutput out;
  out.table.header = schema("squeeze");
  double worst = 0;
  for (long i = 0; i < n; ++i) {
    const double r = r_max * u(rng);
    const double phi = 2.0 * std::numbers::pi * u(rng);
    const std::complex<double> alpha = std::polar(a_max * std::sqrt(u(rng)), 2.0 * std::numbers::pi * u(rng));
    const auto z = std::polar(r, phi);
    const auto analytic = osc::squeeze_amplitude(alpha, alpha, z);
    const int nmax = osc::squeeze_nmax(std::norm(alpha), r);
    const double err = std::abs(analytic - osc::squeeze_amplitude_numeric(alpha, alpha, z, nmax));
    worst = std::max(worst, err);
    out.table.rows.push_back({format_double(r), format_double(phi), format_double(alpha.real()),
                              format_double(alpha.imag()), format_double(analytic.real()),
                              format_double(analytic.imag()), format_double(err)});
  }
  out.summary = "squeeze: " + std::to_string(n) + " samples, max |analytic - numeric| = " + format_double(worst);
  return out;
}

RunOutput run_kinematics(const Params& p) {
  kin::ScheduleConfig c = schedule_from(p);
  const wp::CycleOptions o = cycle_options_from(p, c);
  c.v0 = p.num("ratio", c.v0 / c.v) * c.v;
  std::vector<int> cycles;
  for (double x : p.list("cycles", {})) cycles.push_back(static_cast<int>(x));
  if (cycles.empty())
    for (int i = 1; i <= c.m_r; ++i) cycles.push_back(i);
  const auto runs = wp::run_cycle_ensemble(c, cycles, o);
  RunOutput out;
  out.table.header = schema("kinematics");
  double worst = 0;
  for (std::size_t a = 0; a < runs.size(); ++a)
    for (std::size_t b = a + 1; b < runs.size(); ++b) {
      const int i = runs[a].trigger_cycle, j = runs[b].trigger_cycle;
      const double an = kin::arrival_difference(c, i, j);
      const double me = runs[b].arrival_time - runs[a].arrival_time;
      if (an != 0.0) worst = std::max(worst, std::abs(me / an - 1.0));
      out.table.rows.push_back({std::to_string(i), std::to_string(j), format_double(runs[a].arrival_time),
                                format_double(an), format_double(me)});
    }
  out.summary = "kinematics: max relative arrival-difference error = " + format_double(worst);
  return out;
}

RunOutput run_full_cycle(const Params& p) {
  kin::ScheduleConfig c = schedule_from(p);
  const wp::CycleOptions o = cycle_options_from(p, c);
  std::vector<int> cycles;
  for (double x : p.list("cycles", {2})) cycles.push_back(static_cast<int>(x));
  RunOutput out;
  out.table.header = schema("full-cycle");
  for (double ratio : p.list("ratios", {0.1, 0.05, 0.025})) {
    c.v0 = ratio * c.v;
    for (const auto& r : wp::run_cycle_ensemble(c, cycles, o)) {
      const auto pred = kin::predicted_fidelity(c, r.trigger_cycle, kin::Regime::original);
      out.table.rows.push_back({format_double(ratio), std::to_string(r.trigger_cycle), format_double(r.arrival_time),
                                format_double(r.final_overlap), format_double(pred.probability),
                                format_double(r.min_locked_p_right), format_double(r.spread_at_arrival)});
    }
  }
  out.summary = "full-cycle: " + std::to_string(out.table.rows.size()) + " trajectories";
  return out;
}

}  // namespace

const std::vector<std::string>& experiments() {
  static const std::vector<std::string> e = {"protocol", "fidelity", "scatter", "squeeze", "kinematics", "full-cycle"};
  return e;
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) input_error("config line " + std::to_string(lineno) + " has no '='");
    apply_override(cfg, line);
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) input_error("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

void apply_override(ExperimentConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) input_error("override '" + assignment + "' is not key=value");
  const std::string key = trim(assignment.substr(0, eq));
  const std::string value = trim(assignment.substr(eq + 1));
  if (key.empty()) input_error("override '" + assignment + "' has an empty key");
  if (key == "experiment") {
    cfg.experiment = value;
  } else if (key == "seed") {
    try {
      std::size_t pos = 0;
      cfg.seed = std::stoull(value, &pos);
      if (pos != value.size()) throw std::invalid_argument("seed");
    } catch (const std::exception&) {
      input_error("key 'seed' expects a non-negative integer");
    }
  } else if (key == "output") {
    cfg.output = value;
  } else {
    cfg.params[key] = value;
  }
}

const std::vector<std::string>& schema(const std::string& experiment) {
  static const std::map<std::string, std::vector<std::string>> s = {
      {"protocol", {"x0", "trigger_cycle", "final_level", "final_branch", "final_functional", "probability"}},
      {"fidelity", {"j", "ratio", "regime", "probability_analytic", "probability_series"}},
      {"scatter", {"a", "E", "V0", "T_numeric", "T_analytic"}},
      {"kinematics", {"i", "j", "T_i", "dT_ji_analytic", "dT_ji_measured"}},
      {"squeeze", {"r", "phi", "alpha_re", "alpha_im", "amp_analytic_re", "amp_analytic_im", "amp_numeric_abs_err"}},
      {"full-cycle",
       {"ratio", "i", "T_i", "final_overlap", "predicted_regime1", "min_locked_p_right", "spread_at_arrival"}},
  };
  auto it = s.find(experiment);
  if (it == s.end()) input_error("unknown experiment '" + experiment + "'");
  return it->second;
}

void validate_config(const ExperimentConfig& cfg) {
  if (cfg.experiment.empty()) input_error("missing required key 'experiment'");
  (void)schema(cfg.experiment);
  const auto allowed = allowed_keys(cfg.experiment);
  for (const auto& [k, v] : cfg.params)
    if (!allowed.count(k)) input_error("unknown key '" + k + "' for experiment " + cfg.experiment);
  for (const auto& k : required_keys(cfg.experiment))
    if (!cfg.params.count(k)) input_error("missing required key '" + k + "' for experiment " + cfg.experiment);
}

std::string CsvTable::to_string() const {
  std::ostringstream os;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
    os << '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
  return os.str();
}

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

RunOutput run_experiment_table(const ExperimentConfig& cfg) {
  validate_config(cfg);
  const Params p{cfg};
  const std::string& e = cfg.experiment;
  if (e == "protocol") return run_protocol(p);
  if (e == "fidelity") return run_fidelity(p);
  if (e == "scatter") return run_scatter(p);
  if (e == "squeeze") return run_squeeze(p, cfg.seed);
  if (e == "kinematics") return run_kinematics(p);
  return run_full_cycle(p);
}

std::string resolve_output_path(const ExperimentConfig& cfg) {
  namespace fs = std::filesystem;
  const char* env = std::getenv(kOutputDirEnv);
  const fs::path dir = env && *env ? fs::path(env) : fs::path(".");
  if (cfg.output.empty()) return (dir / (cfg.experiment + ".csv")).string();
  const fs::path out(cfg.output);
  if (out.is_absolute() || !env || !*env) return out.string();
  return (dir / out).string();
}

RunOutput run_experiment(const ExperimentConfig& cfg) {
  RunOutput out = run_experiment_table(cfg);
  out.path = resolve_output_path(cfg);
  namespace fs = std::filesystem;
  const fs::path parent = fs::path(out.path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
  std::ofstream f(out.path, std::ios::binary);
  if (!f) throw Error(ErrorCategory::input, kModule, "cannot write '" + out.path + "'");
  f << out.table.to_string();
  return out;
}

bool SuiteReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

std::string SuiteReport::to_string() const {
  std::ostringstream os;
  for (const auto& c : checks) {
    char t[32];
    std::snprintf(t, sizeof t, "%.2fs", c.seconds);
    os << (c.passed ? "PASS " : "FAIL ") << c.module << ": " << c.invariant << " [" << c.observed << "] (" << t
       << ")\n";
  }
  return os.str();
}

namespace {

using osc::Complex;

std::string fmt_e(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

struct Check {
  std::string module;
  std::string invariant;
  // returns (observed, passed)
  std::function<std::pair<std::string, bool>()> body;
};

std::vector<Check> fast_checks(bool inject_fault) {
  std::vector<Check> v;
  v.push_back({"cyclic_group", "prime-power factors multiply to p - 1 and shift has period m", [] {
                 std::size_t bad = 0, tested = 0;
                 for (std::uint64_t p = 3; p < 400; ++p) {
                   if (!cyclic::is_prime(p)) continue;
                   ++tested;
                   const auto f = cyclic::factorize_group(p);
                   std::uint64_t prod = 1;
                   for (const auto& q : f.factors) prod *= q.m;
                   if (prod != p - 1) ++bad;
                   for (std::size_t k = 1; k <= f.rank(); ++k) {
                     const auto sub = cyclic::build_subspace(f, k, cyclic::SubspaceKind::multiplicative);
                     std::uint64_t x = sub.value_at(0);
                     for (std::size_t s = 0; s < sub.dimension(); ++s) x = cyclic::apply_shift(sub, x);
                     if (x != sub.value_at(0)) ++bad;
                   }
                 }
                 return std::pair{std::to_string(tested) + " primes, " + std::to_string(bad) + " failures", bad == 0};
               }});
  v.push_back({"protocol", "every gate is unitary", [inject_fault] {
                 const auto f = cyclic::factorize_group(7);
                 const auto sub = cyclic::build_subspace(f, f.rank(), cyclic::SubspaceKind::multiplicative);
                 double worst = 0;
                 for (auto var : {protocol::Variant::Qc, protocol::Variant::Qh}) {
                   const protocol::CompositeSpace space(sub, var);
                   for (auto g : protocol::cycle_sequence(var))
                     for (std::size_t c = 1; c <= space.cycles(); ++c)
                       worst = std::max(worst, make_gate(g, space, protocol::LockModel::rotation(0.1), c).unitarity_defect());
                   if (inject_fault) {
                     auto bad = make_gate(protocol::GateKind::Ub, space);
                     auto col = bad.column(0);
                     for (auto& e : col) e.second *= 1.05;
                     bad.set_column(0, col);
                     worst = std::max(worst, bad.unitarity_defect());
                   }
                 }
                 return std::pair{"max defect " + fmt_e(worst), worst < 1e-12};
               }});
  v.push_back({"protocol", "trigger cycle and output probability for every start", [] {
                 std::size_t bad = 0;
                 double min_p = 1;
                 for (std::uint64_t p : {5ull, 7ull, 11ull, 13ull}) {
                   const auto f = cyclic::factorize_group(p);
                   for (std::size_t k = 1; k <= f.rank(); ++k) {
                     const auto sub = cyclic::build_subspace(f, k, cyclic::SubspaceKind::multiplicative);
                     for (auto var : {protocol::Variant::Qc, protocol::Variant::Qh})
                       for (std::size_t x0 = 0; x0 < sub.dimension(); ++x0) {
                         const auto r = protocol::run_program(sub, x0, var);
                         if (r.trigger_cycle != protocol::expected_trigger_cycle(sub.dimension(), x0)) ++bad;
                         min_p = std::min(min_p, r.output_probability);
                       }
                   }
                 }
                 return std::pair{std::to_string(bad) + " wrong cycles, min P = " + format_double(min_p),
                                  bad == 0 && min_p > 1 - 1e-12};
               }});
  v.push_back({"protocol", "conflict probabilities obey p1 + p2 <= 1", [] {
                 std::mt19937_64 rng(7);
                 double worst = 0;
                 for (int t = 0; t < 200; ++t) {
                   const auto u = protocol::random_unitary(6, rng);
                   const auto q = protocol::random_unitary(6, rng);
                   const auto c = protocol::conflict_bound(u, q.col(0), q.col(1));
                   worst = std::max(worst, c.p1 + c.p2);
                 }
                 return std::pair{"max p1 + p2 = " + format_double(worst), worst <= 1 + 1e-12};
               }});
  v.push_back({"oscillator_analytics", "coherent overlap matches truncated Fock sum", [] {
                 double worst = 0;
                 for (double a : {0.3, 1.0, 2.0})
                   for (double ph : {0.0, 0.7, 2.5}) {
                     const Complex x(a, 0), y = std::polar(a * 0.8, ph);
                     const int n = osc::required_nmax(std::max(std::norm(x), std::norm(y)));
                     const auto fx = osc::coherent_fock(x, n), fy = osc::coherent_fock(y, n);
                     worst = std::max(worst, std::abs(osc::fock_inner(fx, fy) - osc::coherent_overlap(x, y)));
                   }
                 return std::pair{"max error " + fmt_e(worst), worst < 1e-9};
               }});
  v.push_back({"oscillator_analytics", "squeeze amplitude closed form matches matrix exponential", [] {
                 std::mt19937_64 rng(3);
                 std::uniform_real_distribution<double> u(0, 1);
                 double worst = 0;
                 for (int t = 0; t < 10; ++t) {
                   const Complex a = std::polar(1.5 * u(rng), 6.28 * u(rng));
                   const Complex b = std::polar(1.5 * u(rng), 6.28 * u(rng));
                   const Complex z = std::polar(u(rng), 6.28 * u(rng));
                   const int n = osc::squeeze_nmax(std::max(std::norm(a), std::norm(b)), std::abs(z));
                   worst = std::max(worst, std::abs(osc::squeeze_amplitude(a, b, z) - osc::squeeze_amplitude_numeric(a, b, z, n)));
                 }
                 return std::pair{"max error " + fmt_e(worst), worst < 1e-8};
               }});
  v.push_back({"frequency_modulation", "sudden jump squeeze magnitude", [] {
                 const double wc = 0.25, w0 = 1.0;
                 const auto pr = fm::integrate_bogoliubov(fm::ModulationProfile::sudden_jump(wc, w0));
                 const double expect = std::abs(w0 - wc) / (2 * std::sqrt(w0 * wc));
                 const double err = std::abs(std::abs(pr.v) - expect);
                 const double ident = std::abs(std::norm(pr.u) - std::norm(pr.v) - 1);
                 return std::pair{"| |v| - expected | = " + fmt_e(err) + ", |u|^2-|v|^2-1 = " + fmt_e(ident),
                                  err < 1e-9 && ident < 1e-9};
               }});
  v.push_back({"control_kinematics", "arrival differences are antisymmetric and additive", [] {
                 const kin::ScheduleConfig c;
                 double worst = 0;
                 for (int i = 1; i <= c.m_r; ++i)
                   for (int j = 1; j <= c.m_r; ++j) {
                     worst = std::max(worst, std::abs(kin::arrival_difference(c, i, j) + kin::arrival_difference(c, j, i)));
                     for (int k = 1; k <= c.m_r; ++k)
                       worst = std::max(worst, std::abs(kin::arrival_difference(c, i, j) + kin::arrival_difference(c, j, k) -
                                                        kin::arrival_difference(c, i, k)));
                   }
                 return std::pair{"max violation " + fmt_e(worst), worst < 1e-12};
               }});
  v.push_back({"wavepacket_sim", "SIMD kernels match scalar reference", [] {
                 if (!simd::backend_available(simd::Backend::avx2)) return std::pair{std::string("avx2 unavailable, scalar only"), true};
                 const auto& s = simd::kernels_for(simd::Backend::scalar);
                 const auto& a = simd::kernels_for(simd::Backend::avx2);
                 std::mt19937_64 rng(11);
                 std::normal_distribution<double> g;
                 double worst = 0;
                 for (std::size_t n : {0u, 1u, 3u, 7u, 64u, 1001u}) {
                   std::vector<simd::cplx> x(n), y(n);
                   std::vector<double> w(n);
                   for (std::size_t i = 0; i < n; ++i) {
                     x[i] = {g(rng), g(rng)};
                     y[i] = {g(rng), g(rng)};
                     w[i] = g(rng);
                   }
                   auto x1 = x, x2 = x;
                   s.cmul(x1.data(), y.data(), n);
                   a.cmul(x2.data(), y.data(), n);
                   for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(x1[i] - x2[i]));
                   const double scale = 1.0 + static_cast<double>(n);
                   worst = std::max(worst, std::abs(s.norm2(x.data(), n) - a.norm2(x.data(), n)) / scale);
                   worst = std::max(worst, std::abs(s.weighted_norm2(x.data(), w.data(), n) - a.weighted_norm2(x.data(), w.data(), n)) / scale);
                   worst = std::max(worst, std::abs(s.inner(x.data(), y.data(), n) - a.inner(x.data(), y.data(), n)) / scale);
                 }
                 return std::pair{"max difference " + fmt_e(worst), worst < 1e-12};
               }});
  v.push_back({"wavepacket_sim", "free evolution conserves norm", [] {
                 wp::Grid1D grid{-40, 40, 1024};
                 auto w = wp::init_gaussian(grid, 0, 1.0, 2.0, 0);
                 const std::vector<double> pot(grid.n, 0.0);
                 const double n0 = w.norm();
                 const auto out = wp::evolve(w, pot, 5e-4, 4000);
                 const double d = std::abs(out.norm() - n0);
                 return std::pair{"|dN| = " + fmt_e(d), d < 1e-10};
               }});
  return v;
}

std::vector<Check> full_checks() {
  std::vector<Check> v;
  v.push_back({"wavepacket_sim", "tunnelling decay rate follows -2 beta", [] {
                 const double E = 1, V0 = 3;
                 std::vector<double> a = {1.5, 2.0, 2.5, 3.0, 3.5, 4.0}, lt;
                 for (double x : a) lt.push_back(std::log(wp::transmission_scan(E, V0, x)));
                 const double slope = least_squares_slope(a, lt), beta = std::sqrt(2 * (V0 - E));
                 const double rel = std::abs(slope / (-2 * beta) - 1);
                 return std::pair{"slope " + format_double(slope) + ", rel error " + fmt_e(rel), rel < 0.1};
               }});
  v.push_back({"frequency_modulation", "designed modulation reaches the target coherent state", [] {
                 const auto d = fm::design_modulation(0.25, 1.0, Complex(1, 0), 0.3);
                 return std::pair{"residual " + fmt_e(d.residual), d.residual < 1e-6};
               }});
  v.push_back({"wavepacket_sim", "halting-cycle arrival differences match kinematics", [] {
                 kin::ScheduleConfig c;
                 wp::CycleOptions o;
                 c.wall_x = o.potential.right_wall();
                 const auto runs = wp::run_cycle_ensemble(c, {1, 2, 3, 4}, o);
                 double worst = 0;
                 for (std::size_t j = 1; j < runs.size(); ++j) {
                   const double an = kin::arrival_difference(c, runs[0].trigger_cycle, runs[j].trigger_cycle);
                   worst = std::max(worst, std::abs((runs[j].arrival_time - runs[0].arrival_time) / an - 1));
                 }
                 return std::pair{"max relative error " + fmt_e(worst), worst < 0.05};
               }});
  return v;
}

}  // namespace

SuiteReport validate_suite(const SuiteOptions& opt) {
  auto checks = fast_checks(opt.inject_fault);
  if (opt.level == Level::full)
    for (auto& c : full_checks()) checks.push_back(std::move(c));
  SuiteReport rep;
  for (const auto& c : checks) {
    CheckResult r{c.module, c.invariant, "", false, 0};
    const auto t0 = std::chrono::steady_clock::now();
    try {
      auto [obs, ok] = c.body();
      r.observed = std::move(obs);
      r.passed = ok;
    } catch (const std::exception& e) {
      r.observed = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (opt.on_check) opt.on_check(r);
    rep.checks.push_back(std::move(r));
  }
  return rep;
}

}  // namespace haltsim::harness
