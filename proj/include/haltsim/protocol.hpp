#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <memory>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "haltsim/cyclic_group.hpp"

namespace haltsim::protocol {

using Complex = std::complex<double>;
using DenseMatrix = Eigen::MatrixXcd;
using DenseVector = Eigen::VectorXcd;

/// Halting-register levels. Qc uses {N0, C1, C2}; the atomic variant Qh adds N1.
enum class HaltingLevel : std::uint8_t { N0 = 0, N1 = 1, C1 = 2, C2 = 3 };

enum class Variant { Qc, Qh };

enum class GateKind { Ub, Uh, Ut, Lock, UfCond, Vh, Utr };

const char* level_name(HaltingLevel level);
const char* gate_name(GateKind kind);

/// Residual-amplitude model of the locking step. Ideal is epsilon0 = 0.
struct LockModel {
  enum class Mode { ideal, rotation_pulse };
  Mode mode = Mode::ideal;
  double epsilon0 = 0.0;
  double gamma = 1.5707963267948966;  // e^{-i gamma} = -i: the rotation-pulse phase

  static LockModel ideal() { return {}; }
  static LockModel rotation(double epsilon0) { return {Mode::rotation_pulse, epsilon0, 1.5707963267948966}; }

  double residual() const { return mode == Mode::ideal ? 0.0 : epsilon0; }
};

/// One basis ket |level>|branch>|functional>|record>.
/// functional in [0, m) indexes a subspace value; functional == m is the blank symbol.
/// record == 0 means "not locked"; record == k means the lock fired in cycle k.
struct BasisLabel {
  HaltingLevel level = HaltingLevel::N0;
  unsigned branch = 0;
  std::size_t functional = 0;
  std::size_t record = 0;

  bool operator==(const BasisLabel&) const = default;
};

/// Tensor-product basis of the program registers built over one functional subspace.
class CompositeSpace {
 public:
  CompositeSpace(cyclic::FunctionalSubspace subspace, Variant variant, std::size_t target_index = 0);

  const cyclic::FunctionalSubspace& subspace() const noexcept { return subspace_; }
  Variant variant() const noexcept { return variant_; }
  std::size_t cycles() const noexcept { return subspace_.dimension(); }
  std::size_t target_index() const noexcept { return target_; }
  std::size_t blank() const noexcept { return subspace_.dimension(); }
  std::size_t functional_dim() const noexcept { return subspace_.dimension() + 1; }
  std::size_t record_dim() const noexcept { return subspace_.dimension() + 1; }
  const std::vector<HaltingLevel>& levels() const noexcept { return levels_; }
  bool has_level(HaltingLevel level) const noexcept;
  std::size_t dimension() const noexcept;

  std::size_t index(const BasisLabel& label) const;
  BasisLabel label(std::size_t index) const;

  /// Register value shown to users: the subspace value, or 0 (multiplicative) / m (additive) for blank.
  std::uint64_t functional_value(std::size_t symbol) const;

 private:
  cyclic::FunctionalSubspace subspace_;
  Variant variant_;
  std::size_t target_;
  std::vector<HaltingLevel> levels_;
  std::array<int, 4> level_slot_{};
};

/// Column-sparse operator on a CompositeSpace.
class SparseOperator {
 public:
  using Entry = std::pair<std::size_t, Complex>;

  explicit SparseOperator(std::size_t dim) : columns_(dim) {}

  std::size_t dimension() const noexcept { return columns_.size(); }
  void set_column(std::size_t col, std::vector<Entry> entries) { columns_.at(col) = std::move(entries); }
  const std::vector<Entry>& column(std::size_t col) const { return columns_.at(col); }

  std::vector<Complex> apply(const std::vector<Complex>& psi) const;
  /// this * rhs
  SparseOperator compose(const SparseOperator& rhs) const;
  DenseMatrix to_dense() const;
  /// max |(U^dag U - I)_{ij}|
  double unitarity_defect() const;
  /// max |(this - rhs)_{ij}|
  double max_abs_difference(const SparseOperator& rhs) const;

 private:
  std::vector<std::vector<Entry>> columns_;
};

/// Gate on the composite space. `cycle` selects the lock record slot and is ignored otherwise.
SparseOperator make_gate(GateKind kind, const CompositeSpace& space, const LockModel& lock = {},
                         std::size_t cycle = 1);

/// Normalized amplitude vector over a CompositeSpace.
class CompositeState {
 public:
  CompositeState(std::shared_ptr<const CompositeSpace> space, std::vector<Complex> amplitudes);

  static CompositeState basis(std::shared_ptr<const CompositeSpace> space, const BasisLabel& label);

  const CompositeSpace& space() const noexcept { return *space_; }
  const std::shared_ptr<const CompositeSpace>& space_ptr() const noexcept { return space_; }
  const std::vector<Complex>& amplitudes() const noexcept { return amplitudes_; }
  double norm() const;

  CompositeState evolved(const SparseOperator& op) const;

  /// Probability of (level, branch, functional), summed over the lock record.
  double probability(HaltingLevel level, unsigned branch, std::size_t functional) const;
  double level_probability(HaltingLevel level) const;
  double branch_probability(unsigned branch) const;
  double record_probability(std::size_t record) const;

 private:
  std::shared_ptr<const CompositeSpace> space_;
  std::vector<Complex> amplitudes_;
};

/// Register populations at the start of one cycle, plus what that cycle locked.
struct CycleTrace {
  std::size_t cycle = 0;
  std::array<double, 4> level_probability{};  // indexed by HaltingLevel
  double n0_branch0 = 0.0;                    // P(level = N0, branch = 0) at cycle start
  double branch1 = 0.0;
  double locked_this_cycle = 0.0;             // P(record = cycle) at cycle end
};

struct RunResult {
  CompositeState final_state;
  std::vector<CycleTrace> trace;
  std::size_t trigger_cycle = 0;  // cycle whose record slot holds the most weight
  double output_probability = 0;  // P(C2, branch 1, blank)
};

/// Cycle gate order. Qc: Ub, Uh, Ut, Lock, UfCond. Qh: Ub, Uh, Vh, Utr, Lock, UfCond.
std::vector<GateKind> cycle_sequence(Variant variant);

RunResult run_program(const cyclic::FunctionalSubspace& subspace, std::size_t x0, Variant variant,
                      const LockModel& lock = {}, std::size_t target_index = 0);

/// Expected firing cycle for a start index: (x_f - x0) mod m + 1.
std::size_t expected_trigger_cycle(std::size_t m, std::size_t x0, std::size_t target_index = 0);

/// max-norm of [A, Lock_cycle].
double commutator_check(GateKind kind, const CompositeSpace& space, const LockModel& lock = {},
                        std::size_t cycle = 1);

struct ConflictProbabilities {
  double p1 = 0;  // |<c2|U|c1>|^2
  double p2 = 0;  // |<c2|U|c2>|^2
};

/// Row-norm bound of a unitary: p1 + p2 <= 1 for orthonormal c1, c2.
ConflictProbabilities conflict_bound(const DenseMatrix& unitary, const DenseVector& c1,
                                     const DenseVector& c2);

/// Haar-distributed unitary (QR of a complex Gaussian matrix with phase-fixed R).
DenseMatrix random_unitary(std::size_t dim, std::mt19937_64& rng);

}  // namespace haltsim::protocol
