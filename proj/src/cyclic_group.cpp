#include "haltsim/cyclic_group.hpp"

#include <algorithm>
#include <string>
#include <unordered_set>

#include "haltsim/error.hpp"

namespace haltsim::cyclic {

namespace {
constexpr const char* kModule = "cyclic_group";
}

std::vector<PrimePowerFactor> factorize_order(std::uint64_t n) {
  if (n == 0) throw Error(ErrorCategory::input, kModule, "factorize_order requires n >= 1");
  std::vector<PrimePowerFactor> out;
  std::uint64_t rest = n;
  for (std::uint64_t q = 2; q * q <= rest; ++q) {
    if (rest % q != 0) continue;
    PrimePowerFactor f{q, 0, 1, 0};
    while (rest % q == 0) {
      rest /= q;
      f.m *= q;
      ++f.exponent;
    }
    out.push_back(f);
  }
  if (rest > 1) out.push_back({rest, 1, rest, 0});
  for (auto& f : out) f.cofactor = n / f.m;
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.m < b.m; });
  return out;
}

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t q = 2; q * q <= n; ++q)
    if (n % q == 0) return false;
  return true;
}

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t mod) {
  if (mod == 1) return 0;
  unsigned __int128 result = 1;
  unsigned __int128 b = base % mod;
  while (exp > 0) {
    if (exp & 1U) result = (result * b) % mod;
    b = (b * b) % mod;
    exp >>= 1U;
  }
  return static_cast<std::uint64_t>(result);
}

std::uint64_t multiplicative_order(std::uint64_t a, std::uint64_t p) {
  if (p < 2 || a % p == 0) throw Error(ErrorCategory::input, kModule, "order undefined for a = 0 mod p");
  const std::uint64_t n = p - 1;
  std::uint64_t order = n;
  for (const auto& f : factorize_order(n)) {
    for (unsigned e = 0; e < f.exponent; ++e) {
      if (pow_mod(a, order / f.prime, p) == 1)
        order /= f.prime;
      else
        break;
    }
  }
  return order;
}

std::uint64_t find_primitive_root(std::uint64_t p) {
  if (!is_prime(p)) throw Error(ErrorCategory::input, kModule, std::to_string(p) + " is not prime");
  if (p > kMaxModulus) throw Error(ErrorCategory::input, kModule, "modulus above desk-scale cap");
  if (p == 2) return 1;
  const auto factors = factorize_order(p - 1);
  for (std::uint64_t g = 2; g < p; ++g) {
    const bool generator = std::all_of(factors.begin(), factors.end(), [&](const auto& f) {
      return pow_mod(g, (p - 1) / f.prime, p) != 1;
    });
    if (generator) return g;
  }
  throw Error(ErrorCategory::input, kModule, "no primitive root found");  // unreachable for prime p
}

GroupFactorization factorize_group(std::uint64_t p) {
  GroupFactorization fact;
  fact.p = p;
  fact.g = find_primitive_root(p);
  fact.factors = factorize_order(p - 1);
  return fact;
}

FunctionalSubspace::FunctionalSubspace(SubspaceKind kind, std::vector<std::uint64_t> values)
    : kind_(kind), values_(std::move(values)) {
  if (values_.empty()) throw Error(ErrorCategory::input, kModule, "empty subspace");
  index_.reserve(values_.size());
  for (std::size_t x = 0; x < values_.size(); ++x) {
    if (!index_.emplace(values_[x], x).second)
      throw Error(ErrorCategory::input, kModule, "subspace values must be distinct");
  }
}

std::optional<std::size_t> FunctionalSubspace::index_of(std::uint64_t value) const {
  const auto it = index_.find(value);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

FunctionalSubspace build_subspace(const GroupFactorization& fact, std::size_t k, SubspaceKind kind) {
  if (k < 1 || k > fact.rank())
    throw Error(ErrorCategory::input, kModule,
                "factor index " + std::to_string(k) + " outside 1.." + std::to_string(fact.rank()));
  const auto& f = fact.factors[k - 1];
  std::vector<std::uint64_t> values(f.m);
  if (kind == SubspaceKind::additive) {
    for (std::uint64_t x = 0; x < f.m; ++x) values[x] = x;
  } else {
    const std::uint64_t step = pow_mod(fact.g, f.cofactor, fact.p);
    std::uint64_t v = 1;
    for (std::uint64_t x = 0; x < f.m; ++x) {
      values[x] = v;
      v = static_cast<std::uint64_t>((static_cast<unsigned __int128>(v) * step) % fact.p);
    }
  }
  return FunctionalSubspace(kind, std::move(values));
}

std::uint64_t apply_shift(const FunctionalSubspace& sub, std::uint64_t value) {
  const auto x = sub.index_of(value);
  if (!x) return value;
  return sub.value_at((*x + 1) % sub.dimension());
}

}  // namespace haltsim::cyclic
