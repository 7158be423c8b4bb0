#include "haltsim/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "haltsim/error.hpp"

namespace haltsim::protocol {

namespace {
constexpr const char* kModule = "protocol_engine";

int slot_of(HaltingLevel level) { return static_cast<int>(level); }
}  // namespace

const char* level_name(HaltingLevel level) {
  switch (level) {
    case HaltingLevel::N0: return "N0";
    case HaltingLevel::N1: return "N1";
    case HaltingLevel::C1: return "C1";
    case HaltingLevel::C2: return "C2";
  }
  return "?";
}

const char* gate_name(GateKind kind) {
  switch (kind) {
    case GateKind::Ub: return "Ub";
    case GateKind::Uh: return "Uh";
    case GateKind::Ut: return "Ut";
    case GateKind::Lock: return "Lock";
    case GateKind::UfCond: return "UfCond";
    case GateKind::Vh: return "Vh";
    case GateKind::Utr: return "Utr";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// CompositeSpace

CompositeSpace::CompositeSpace(cyclic::FunctionalSubspace subspace, Variant variant, std::size_t target_index)
    : subspace_(std::move(subspace)), variant_(variant), target_(target_index) {
  if (target_ >= subspace_.dimension())
    throw Error(ErrorCategory::input, kModule, "target index outside the subspace");
  if (variant_ == Variant::Qc)
    levels_ = {HaltingLevel::N0, HaltingLevel::C1, HaltingLevel::C2};
  else
    levels_ = {HaltingLevel::N0, HaltingLevel::N1, HaltingLevel::C1, HaltingLevel::C2};
  level_slot_.fill(-1);
  for (std::size_t i = 0; i < levels_.size(); ++i) level_slot_[slot_of(levels_[i])] = static_cast<int>(i);
}

bool CompositeSpace::has_level(HaltingLevel level) const noexcept { return level_slot_[slot_of(level)] >= 0; }

std::size_t CompositeSpace::dimension() const noexcept {
  return levels_.size() * 2 * functional_dim() * record_dim();
}

std::size_t CompositeSpace::index(const BasisLabel& label) const {
  const int slot = level_slot_[slot_of(label.level)];
  if (slot < 0 || label.branch > 1 || label.functional >= functional_dim() || label.record >= record_dim())
    throw Error(ErrorCategory::input, kModule, "basis label outside the composite space");
  return ((static_cast<std::size_t>(slot) * 2 + label.branch) * functional_dim() + label.functional) *
             record_dim() +
         label.record;
}

BasisLabel CompositeSpace::label(std::size_t index) const {
  BasisLabel out;
  out.record = index % record_dim();
  index /= record_dim();
  out.functional = index % functional_dim();
  index /= functional_dim();
  out.branch = static_cast<unsigned>(index % 2);
  out.level = levels_.at(index / 2);
  return out;
}

std::uint64_t CompositeSpace::functional_value(std::size_t symbol) const {
  if (symbol < subspace_.dimension()) return subspace_.value_at(symbol);
  return subspace_.kind() == cyclic::SubspaceKind::multiplicative ? 0 : subspace_.dimension();
}

// ---------------------------------------------------------------------------
// SparseOperator

std::vector<Complex> SparseOperator::apply(const std::vector<Complex>& psi) const {
  if (psi.size() != dimension()) throw Error(ErrorCategory::input, kModule, "state/operator size mismatch");
  std::vector<Complex> out(psi.size());
  for (std::size_t c = 0; c < columns_.size(); ++c) {
    if (psi[c] == Complex{}) continue;
    for (const auto& [row, value] : columns_[c]) out[row] += value * psi[c];
  }
  return out;
}

SparseOperator SparseOperator::compose(const SparseOperator& rhs) const {
  SparseOperator out(dimension());
  std::map<std::size_t, Complex> acc;
  for (std::size_t c = 0; c < dimension(); ++c) {
    acc.clear();
    for (const auto& [mid, v] : rhs.column(c))
      for (const auto& [row, w] : columns_[mid]) acc[row] += w * v;
    std::vector<Entry> col;
    col.reserve(acc.size());
    for (const auto& [row, value] : acc)
      if (value != Complex{}) col.emplace_back(row, value);
    out.set_column(c, std::move(col));
  }
  return out;
}

DenseMatrix SparseOperator::to_dense() const {
  const auto n = static_cast<Eigen::Index>(dimension());
  DenseMatrix m = DenseMatrix::Zero(n, n);
  for (std::size_t c = 0; c < dimension(); ++c)
    for (const auto& [row, value] : columns_[c]) m(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(c)) += value;
  return m;
}

double SparseOperator::unitarity_defect() const {
  // Gram matrix of columns; only pairs sharing a row can be nonzero.
  std::vector<std::vector<std::pair<std::size_t, Complex>>> rows(dimension());
  for (std::size_t c = 0; c < dimension(); ++c)
    for (const auto& [row, value] : columns_[c]) rows[row].emplace_back(c, value);
  std::map<std::pair<std::size_t, std::size_t>, Complex> gram;
  for (const auto& row : rows)
    for (const auto& [ci, vi] : row)
      for (const auto& [cj, vj] : row) gram[{ci, cj}] += std::conj(vi) * vj;
  double defect = 0;
  for (std::size_t c = 0; c < dimension(); ++c) {
    const auto it = gram.find({c, c});
    const Complex diag = it == gram.end() ? Complex{} : it->second;
    defect = std::max(defect, std::abs(diag - 1.0));
  }
  for (const auto& [key, value] : gram)
    if (key.first != key.second) defect = std::max(defect, std::abs(value));
  return defect;
}

double SparseOperator::max_abs_difference(const SparseOperator& rhs) const {
  double worst = 0;
  std::map<std::size_t, Complex> acc;
  for (std::size_t c = 0; c < dimension(); ++c) {
    acc.clear();
    for (const auto& [row, value] : columns_[c]) acc[row] += value;
    for (const auto& [row, value] : rhs.column(c)) acc[row] -= value;
    for (const auto& [row, value] : acc) worst = std::max(worst, std::abs(value));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Gates

namespace {

SparseOperator permutation_gate(const CompositeSpace& space, auto&& map_label) {
  SparseOperator op(space.dimension());
  for (std::size_t c = 0; c < space.dimension(); ++c) {
    const BasisLabel out = map_label(space.label(c));
    op.set_column(c, {{space.index(out), Complex{1.0, 0.0}}});
  }
  return op;
}

void require_level(const CompositeSpace& space, HaltingLevel level, GateKind kind) {
  if (!space.has_level(level))
    throw Error(ErrorCategory::input, kModule,
                std::string(gate_name(kind)) + " needs halting level " + level_name(level) +
                    ", absent from this variant");
}

}  // namespace

SparseOperator make_gate(GateKind kind, const CompositeSpace& space, const LockModel& lock, std::size_t cycle) {
  const std::size_t target = space.target_index();
  const std::size_t blank = space.blank();
  const std::size_t m = space.cycles();
  switch (kind) {
    case GateKind::Ub:
      return permutation_gate(space, [&](BasisLabel l) {
        if (l.functional == target) l.branch ^= 1U;
        return l;
      });
    case GateKind::Uh:
      return permutation_gate(space, [&](BasisLabel l) {
        if (l.level == HaltingLevel::N0) {
          if (l.functional == target)
            l.functional = blank;
          else if (l.functional == blank)
            l.functional = target;
        }
        return l;
      });
    case GateKind::Ut:
      require_level(space, HaltingLevel::C1, kind);
      return permutation_gate(space, [&](BasisLabel l) {
        if (l.functional == blank) {
          if (l.level == HaltingLevel::N0)
            l.level = HaltingLevel::C1;
          else if (l.level == HaltingLevel::C1)
            l.level = HaltingLevel::N0;
        }
        return l;
      });
    case GateKind::Vh:
      require_level(space, HaltingLevel::N1, kind);
      return permutation_gate(space, [&](BasisLabel l) {
        if (l.functional == blank) {
          if (l.level == HaltingLevel::N0)
            l.level = HaltingLevel::N1;
          else if (l.level == HaltingLevel::N1)
            l.level = HaltingLevel::N0;
        }
        return l;
      });
    case GateKind::Utr:
      require_level(space, HaltingLevel::N1, kind);
      return permutation_gate(space, [&](BasisLabel l) {
        if (l.level == HaltingLevel::N1)
          l.level = HaltingLevel::C1;
        else if (l.level == HaltingLevel::C1)
          l.level = HaltingLevel::N1;
        return l;
      });
    case GateKind::UfCond:
      return permutation_gate(space, [&](BasisLabel l) {
        if (l.branch == 0 && l.functional < m) l.functional = (l.functional + 1) % m;
        return l;
      });
    case GateKind::Lock: {
      if (cycle < 1 || cycle >= space.record_dim())
        throw Error(ErrorCategory::input, kModule, "lock cycle outside 1..m");
      const double eps = lock.residual();
      if (eps < 0.0 || eps > 1.0) throw Error(ErrorCategory::input, kModule, "epsilon0 must lie in [0, 1]");
      const double s = std::sqrt(1.0 - eps * eps);
      const Complex down = std::polar(s, -lock.gamma);  // <C2,k| L |C1,0>
      const Complex up = -std::polar(s, lock.gamma);    // <C1,0| L |C2,k>
      SparseOperator op(space.dimension());
      for (std::size_t c = 0; c < space.dimension(); ++c) {
        BasisLabel l = space.label(c);
        if (l.level == HaltingLevel::C1 && l.record == 0) {
          BasisLabel locked = l;
          locked.level = HaltingLevel::C2;
          locked.record = cycle;
          std::vector<SparseOperator::Entry> col;
          if (eps != 0.0) col.emplace_back(c, Complex{eps, 0.0});
          col.emplace_back(space.index(locked), down);
          op.set_column(c, std::move(col));
        } else if (l.level == HaltingLevel::C2 && l.record == cycle) {
          BasisLabel unlocked = l;
          unlocked.level = HaltingLevel::C1;
          unlocked.record = 0;
          std::vector<SparseOperator::Entry> col;
          col.emplace_back(space.index(unlocked), up);
          if (eps != 0.0) col.emplace_back(c, Complex{eps, 0.0});
          op.set_column(c, std::move(col));
        } else {
          op.set_column(c, {{c, Complex{1.0, 0.0}}});
        }
      }
      return op;
    }
  }
  throw Error(ErrorCategory::input, kModule, "unknown gate kind");
}

// ---------------------------------------------------------------------------
// CompositeState

CompositeState::CompositeState(std::shared_ptr<const CompositeSpace> space, std::vector<Complex> amplitudes)
    : space_(std::move(space)), amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() != space_->dimension())
    throw Error(ErrorCategory::input, kModule, "amplitude vector does not match the space");
  if (std::abs(norm() - 1.0) > 1e-12) throw Error(ErrorCategory::input, kModule, "state is not normalized");
}

CompositeState CompositeState::basis(std::shared_ptr<const CompositeSpace> space, const BasisLabel& label) {
  std::vector<Complex> amps(space->dimension());
  amps[space->index(label)] = 1.0;
  return CompositeState(std::move(space), std::move(amps));
}

double CompositeState::norm() const {
  double s = 0;
  for (const auto& a : amplitudes_) s += std::norm(a);
  return std::sqrt(s);
}

CompositeState CompositeState::evolved(const SparseOperator& op) const {
  return CompositeState(space_, op.apply(amplitudes_));
}

double CompositeState::probability(HaltingLevel level, unsigned branch, std::size_t functional) const {
  double p = 0;
  for (std::size_t r = 0; r < space_->record_dim(); ++r)
    p += std::norm(amplitudes_[space_->index({level, branch, functional, r})]);
  return p;
}

double CompositeState::level_probability(HaltingLevel level) const {
  if (!space_->has_level(level)) return 0.0;
  double p = 0;
  for (std::size_t i = 0; i < amplitudes_.size(); ++i)
    if (space_->label(i).level == level) p += std::norm(amplitudes_[i]);
  return p;
}

double CompositeState::branch_probability(unsigned branch) const {
  double p = 0;
  for (std::size_t i = 0; i < amplitudes_.size(); ++i)
    if (space_->label(i).branch == branch) p += std::norm(amplitudes_[i]);
  return p;
}

double CompositeState::record_probability(std::size_t record) const {
  double p = 0;
  for (std::size_t i = 0; i < amplitudes_.size(); i += 1)
    if (i % space_->record_dim() == record) p += std::norm(amplitudes_[i]);
  return p;
}

// ---------------------------------------------------------------------------
// Program

std::vector<GateKind> cycle_sequence(Variant variant) {
  if (variant == Variant::Qc) return {GateKind::Ub, GateKind::Uh, GateKind::Ut, GateKind::Lock, GateKind::UfCond};
  return {GateKind::Ub, GateKind::Uh, GateKind::Vh, GateKind::Utr, GateKind::Lock, GateKind::UfCond};
}

std::size_t expected_trigger_cycle(std::size_t m, std::size_t x0, std::size_t target_index) {
  return (target_index + m - x0 % m) % m + 1;
}

RunResult run_program(const cyclic::FunctionalSubspace& subspace, std::size_t x0, Variant variant,
                      const LockModel& lock, std::size_t target_index) {
  if (x0 >= subspace.dimension())
    throw Error(ErrorCategory::input, kModule,
                "x0 = " + std::to_string(x0) + " outside 0.." + std::to_string(subspace.dimension() - 1));
  auto space = std::make_shared<const CompositeSpace>(subspace, variant, target_index);
  const std::size_t m = space->cycles();

  // Cycle-independent gates are built once; the lock differs per cycle only in its record slot.
  const auto order = cycle_sequence(variant);
  std::map<GateKind, SparseOperator> fixed;
  for (GateKind k : order)
    if (k != GateKind::Lock) fixed.emplace(k, make_gate(k, *space));

  CompositeState state = CompositeState::basis(space, {HaltingLevel::N0, 0, x0, 0});
  std::vector<CycleTrace> trace;
  trace.reserve(m);
  for (std::size_t cycle = 1; cycle <= m; ++cycle) {
    CycleTrace t;
    t.cycle = cycle;
    for (HaltingLevel lv : space->levels()) t.level_probability[slot_of(lv)] = state.level_probability(lv);
    t.branch1 = state.branch_probability(1);
    for (std::size_t f = 0; f < space->functional_dim(); ++f)
      t.n0_branch0 += state.probability(HaltingLevel::N0, 0, f);

    for (GateKind k : order) {
      if (k == GateKind::Lock)
        state = state.evolved(make_gate(GateKind::Lock, *space, lock, cycle));
      else
        state = state.evolved(fixed.at(k));
    }
    t.locked_this_cycle = state.record_probability(cycle);
    trace.push_back(t);
  }

  std::size_t trigger = 0;
  double best = -1.0;
  for (std::size_t k = 1; k <= m; ++k) {
    const double p = state.record_probability(k);
    if (p > best) {
      best = p;
      trigger = k;
    }
  }
  const double out = state.probability(HaltingLevel::C2, 1, space->blank());
  return RunResult{std::move(state), std::move(trace), trigger, out};
}

double commutator_check(GateKind kind, const CompositeSpace& space, const LockModel& lock, std::size_t cycle) {
  const SparseOperator a = make_gate(kind, space, lock, cycle);
  const SparseOperator l = make_gate(GateKind::Lock, space, lock, cycle);
  return a.compose(l).max_abs_difference(l.compose(a));
}

ConflictProbabilities conflict_bound(const DenseMatrix& unitary, const DenseVector& c1, const DenseVector& c2) {
  const auto n = unitary.rows();
  if (unitary.cols() != n || c1.size() != n || c2.size() != n)
    throw Error(ErrorCategory::input, kModule, "conflict_bound dimension mismatch");
  const double defect = (unitary.adjoint() * unitary - DenseMatrix::Identity(n, n)).cwiseAbs().maxCoeff();
  if (defect > 1e-10) throw Error(ErrorCategory::input, kModule, "conflict_bound requires a unitary operator");
  if (std::abs(c1.norm() - 1.0) > 1e-12 || std::abs(c2.norm() - 1.0) > 1e-12 || std::abs(c1.dot(c2)) > 1e-12)
    throw Error(ErrorCategory::input, kModule, "c1, c2 must be orthonormal");
  const DenseVector u1 = unitary * c1;
  const DenseVector u2 = unitary * c2;
  return {std::norm(c2.dot(u1)), std::norm(c2.dot(u2))};
}

DenseMatrix random_unitary(std::size_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  const auto n = static_cast<Eigen::Index>(dim);
  DenseMatrix z(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) z(i, j) = Complex{gauss(rng), gauss(rng)};
  Eigen::HouseholderQR<DenseMatrix> qr(z);
  DenseMatrix q = qr.householderQ();
  const DenseMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < n; ++j) {
    const Complex d = r(j, j);
    const double mag = std::abs(d);
    if (mag > 0) q.col(j) *= d / mag;
  }
  return q;
}

}  // namespace haltsim::protocol
