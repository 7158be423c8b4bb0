#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

namespace haltsim::cyclic {

/// Largest modulus accepted by the group constructions.
inline constexpr std::uint64_t kMaxModulus = 1'000'000;

/// One prime-power factor m = prime^exponent of a group order n, with cofactor n / m.
struct PrimePowerFactor {
  std::uint64_t prime = 0;
  unsigned exponent = 0;
  std::uint64_t m = 0;
  std::uint64_t cofactor = 0;

  bool operator==(const PrimePowerFactor&) const = default;
};

/// Prime-power decomposition of n in ascending order of m. n = 1 gives an empty list.
std::vector<PrimePowerFactor> factorize_order(std::uint64_t n);

bool is_prime(std::uint64_t n);

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t mod);

/// Multiplicative order of a modulo p (a coprime to p).
std::uint64_t multiplicative_order(std::uint64_t a, std::uint64_t p);

/// Smallest generator of the multiplicative group mod p. Throws on non-prime p.
std::uint64_t find_primitive_root(std::uint64_t p);

/// Modulus, generator and the prime-power factors of the group order p - 1.
struct GroupFactorization {
  std::uint64_t p = 0;
  std::uint64_t g = 0;
  std::vector<PrimePowerFactor> factors;

  std::size_t rank() const noexcept { return factors.size(); }
};

GroupFactorization factorize_group(std::uint64_t p);

enum class SubspaceKind { multiplicative, additive };

/// The ordered values f(0), ..., f(m-1) cycled by the shift operation.
class FunctionalSubspace {
 public:
  FunctionalSubspace(SubspaceKind kind, std::vector<std::uint64_t> values);

  SubspaceKind kind() const noexcept { return kind_; }
  std::size_t dimension() const noexcept { return values_.size(); }
  const std::vector<std::uint64_t>& values() const noexcept { return values_; }
  std::uint64_t value_at(std::size_t x) const { return values_.at(x); }

  /// Index x with f(x) == value, if value lies in the subspace.
  std::optional<std::size_t> index_of(std::uint64_t value) const;

 private:
  SubspaceKind kind_;
  std::vector<std::uint64_t> values_;
  std::unordered_map<std::uint64_t, std::size_t> index_;
};

/// Subspace for factor k (1-based, 1 <= k <= rank).
/// multiplicative: f_k(x) = (g^{M_k})^x mod p; additive: f_k(x) = x mod m_k.
FunctionalSubspace build_subspace(const GroupFactorization& fact, std::size_t k, SubspaceKind kind);

/// f(x) -> f((x+1) mod m) for values in the subspace; everything else is left alone.
std::uint64_t apply_shift(const FunctionalSubspace& sub, std::uint64_t value);

}  // namespace haltsim::cyclic
