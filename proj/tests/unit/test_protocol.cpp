#include <doctest.h>

#include <set>

#include "haltsim/protocol.hpp"

using namespace haltsim;
using namespace haltsim::protocol;

namespace {

cyclic::FunctionalSubspace sub7() {
  return cyclic::build_subspace(cyclic::factorize_group(7), 2, cyclic::SubspaceKind::multiplicative);
}

std::vector<Complex> apply_to_basis(const SparseOperator& op, const CompositeSpace& s, const BasisLabel& l) {
  std::vector<Complex> psi(s.dimension(), 0.0);
  psi[s.index(l)] = 1.0;
  return op.apply(psi);
}

bool is_basis(const std::vector<Complex>& v, std::size_t idx) {
  for (std::size_t i = 0; i < v.size(); ++i)
    if (std::abs(v[i] - (i == idx ? Complex(1) : Complex(0))) > 1e-14) return false;
  return true;
}

}  // namespace

TEST_CASE("basis indexing round trip") {
  const CompositeSpace s(sub7(), Variant::Qh);
  for (std::size_t i = 0; i < s.dimension(); ++i) CHECK(s.index(s.label(i)) == i);
}

TEST_CASE("Ub marks the target value only") {
  const CompositeSpace s(sub7(), Variant::Qc);
  const auto ub = make_gate(GateKind::Ub, s);
  // value 1 sits at index 0
  CHECK(is_basis(apply_to_basis(ub, s, {HaltingLevel::N0, 0, 0, 0}), s.index({HaltingLevel::N0, 1, 0, 0})));
  CHECK(is_basis(apply_to_basis(ub, s, {HaltingLevel::N0, 0, 1, 0}), s.index({HaltingLevel::N0, 0, 1, 0})));
}

TEST_CASE("Ut leaves (C2, b, blank) alone") {
  const CompositeSpace s(sub7(), Variant::Qc);
  const auto ut = make_gate(GateKind::Ut, s);
  for (unsigned b = 0; b < 2; ++b) {
    const BasisLabel l{HaltingLevel::C2, b, s.blank(), 1};
    CHECK(is_basis(apply_to_basis(ut, s, l), s.index(l)));
  }
}

TEST_CASE("all gates unitary") {
  for (auto var : {Variant::Qc, Variant::Qh}) {
    const CompositeSpace s(sub7(), var);
    for (auto g : {GateKind::Ub, GateKind::Uh, GateKind::Ut, GateKind::Lock, GateKind::UfCond})
      for (std::size_t c = 1; c <= 3; ++c) {
        CHECK(make_gate(g, s, {}, c).unitarity_defect() < 1e-13);
        CHECK(make_gate(g, s, LockModel::rotation(0.2), c).unitarity_defect() < 1e-13);
      }
  }
}

TEST_CASE("hand-traced trigger cycles on [1,2,4]") {
  const auto sub = sub7();
  const std::size_t expect[] = {1, 3, 2};
  for (std::size_t x0 = 0; x0 < 3; ++x0) {
    const auto r = run_program(sub, x0, Variant::Qc);
    CHECK(r.trigger_cycle == expect[x0]);
    CHECK(r.output_probability == doctest::Approx(1.0).epsilon(1e-14));
    const auto& s = r.final_state.space();
    CHECK(r.final_state.probability(HaltingLevel::C2, 1, s.blank()) == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("additive subspace immediate match") {
  const auto sub = cyclic::build_subspace(cyclic::factorize_group(7), 2, cyclic::SubspaceKind::additive);
  const auto r = run_program(sub, 0, Variant::Qc);
  CHECK(r.trigger_cycle == 1);
  CHECK(r.output_probability == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("both variants on larger primes: bijective trigger cycles") {
  for (std::uint64_t p : {11ull, 23ull}) {
    const auto f = cyclic::factorize_group(p);
    for (std::size_t k = 1; k <= f.rank(); ++k) {
      const auto sub = cyclic::build_subspace(f, k, cyclic::SubspaceKind::multiplicative);
      for (auto var : {Variant::Qc, Variant::Qh}) {
        std::set<std::size_t> cycles;
        for (std::size_t x0 = 0; x0 < sub.dimension(); ++x0) {
          const auto r = run_program(sub, x0, var);
          CHECK(r.output_probability == doctest::Approx(1.0).epsilon(1e-12));
          CHECK(r.trigger_cycle == expected_trigger_cycle(sub.dimension(), x0));
          cycles.insert(r.trigger_cycle);
        }
        CHECK(cycles.size() == sub.dimension());
        CHECK(*cycles.begin() == 1);
        CHECK(*cycles.rbegin() == sub.dimension());
      }
    }
  }
}

TEST_CASE("imperfect lock loses weight at second order") {
  const auto sub = sub7();
  double prev = 0;
  for (double eps : {0.2, 0.1, 0.05}) {
    const auto r = run_program(sub, 1, Variant::Qc, LockModel::rotation(eps));
    const double loss = 1.0 - r.output_probability;
    CHECK(r.output_probability < 1.0);
    CHECK(loss > 0.0);
    if (prev > 0) CHECK(prev / loss == doctest::Approx(4.0).epsilon(0.25));
    prev = loss;
  }
}

TEST_CASE("commutators") {
  const CompositeSpace s(sub7(), Variant::Qc);
  for (std::size_t c = 1; c <= 3; ++c) {
    CHECK(commutator_check(GateKind::Ub, s, {}, c) < 1e-14);
    CHECK(commutator_check(GateKind::UfCond, s, {}, c) < 1e-14);
  }
  CHECK(commutator_check(GateKind::Ut, s, {}, 1) > 1e-3);
}

TEST_CASE("conflict bound") {
  DenseVector c1 = DenseVector::Zero(4), c2 = DenseVector::Zero(4);
  c1(0) = 1;
  c2(1) = 1;
  auto id = conflict_bound(DenseMatrix::Identity(4, 4), c1, c2);
  CHECK(id.p1 == doctest::Approx(0.0));
  CHECK(id.p2 == doctest::Approx(1.0));
  DenseMatrix sw = DenseMatrix::Identity(4, 4);
  sw.row(0).swap(sw.row(1));
  auto s = conflict_bound(sw, c1, c2);
  CHECK(s.p1 == doctest::Approx(1.0));
  CHECK(s.p2 == doctest::Approx(0.0));
  std::mt19937_64 rng(42);
  DenseVector d1 = DenseVector::Zero(5), d2 = DenseVector::Zero(5);
  d1(2) = 1;
  d2(4) = 1;
  for (int t = 0; t < 200; ++t) {
    const auto u = random_unitary(5, rng);
    CHECK((u.adjoint() * u - DenseMatrix::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-12);
    const auto r = conflict_bound(u, d1, d2);
    CHECK(r.p1 + r.p2 <= 1.0 + 1e-12);
  }
}
