#include <doctest.h>

#include <set>

#include "haltsim/cyclic_group.hpp"

using namespace haltsim::cyclic;

namespace {

// trial division, prime-power grouping
std::vector<PrimePowerFactor> oracle_factor(std::uint64_t n) {
  std::vector<PrimePowerFactor> out;
  const std::uint64_t n0 = n;
  for (std::uint64_t q = 2; q * q <= n; ++q) {
    if (n % q) continue;
    PrimePowerFactor f{q, 0, 1, 0};
    while (n % q == 0) {
      n /= q;
      ++f.exponent;
      f.m *= q;
    }
    out.push_back(f);
  }
  if (n > 1) out.push_back({n, 1, n, 0});
  for (auto& f : out) f.cofactor = n0 / f.m;
  std::sort(out.begin(), out.end(), [](auto& a, auto& b) { return a.m < b.m; });
  return out;
}

std::uint64_t brute_order(std::uint64_t a, std::uint64_t p) {
  std::uint64_t x = a % p, k = 1;
  while (x != 1) {
    x = x * a % p;
    ++k;
  }
  return k;
}

}  // namespace

TEST_CASE("factorize_order examples") {
  CHECK(factorize_order(6) == std::vector<PrimePowerFactor>{{2, 1, 2, 3}, {3, 1, 3, 2}});
  CHECK(factorize_order(1).empty());
  CHECK(factorize_order(10) == std::vector<PrimePowerFactor>{{2, 1, 2, 5}, {5, 1, 5, 2}});
}

TEST_CASE("factorize_order matches trial division") {
  for (std::uint64_t n = 1; n < 3000; ++n) CHECK(factorize_order(n) == oracle_factor(n));
}

TEST_CASE("primitive roots") {
  CHECK(find_primitive_root(7) == 3);
  CHECK(find_primitive_root(2) == 1);
  CHECK(find_primitive_root(11) == 2);
  for (std::uint64_t p = 3; p < 500; ++p) {
    if (!is_prime(p)) continue;
    const auto g = find_primitive_root(p);
    CHECK(brute_order(g, p) == p - 1);
    for (std::uint64_t c = 2; c < g; ++c) CHECK(brute_order(c, p) < p - 1);
  }
}

TEST_CASE("non-prime modulus is rejected") { CHECK_THROWS(find_primitive_root(9)); }

TEST_CASE("subspace construction") {
  const auto f = factorize_group(7);
  REQUIRE(f.g == 3);
  REQUIRE(f.rank() == 2);
  CHECK(build_subspace(f, 2, SubspaceKind::multiplicative).values() == std::vector<std::uint64_t>{1, 2, 4});
  CHECK(build_subspace(f, 1, SubspaceKind::multiplicative).values() == std::vector<std::uint64_t>{1, 6});
  CHECK(build_subspace(f, 2, SubspaceKind::additive).values() == std::vector<std::uint64_t>{0, 1, 2});
}

TEST_CASE("multiplicative subspaces are distinct powers of g^M") {
  for (std::uint64_t p : {11ull, 23ull, 31ull, 97ull}) {
    const auto f = factorize_group(p);
    for (std::size_t k = 1; k <= f.rank(); ++k) {
      const auto sub = build_subspace(f, k, SubspaceKind::multiplicative);
      const auto& fac = f.factors[k - 1];
      CHECK(sub.dimension() == fac.m);
      std::set<std::uint64_t> seen(sub.values().begin(), sub.values().end());
      CHECK(seen.size() == fac.m);
      std::uint64_t gen = 1;
      for (std::uint64_t i = 0; i < fac.cofactor; ++i) gen = gen * f.g % p;
      std::uint64_t x = 1;
      for (std::size_t i = 0; i < sub.dimension(); ++i) {
        CHECK(sub.value_at(i) == x);
        x = x * gen % p;
      }
    }
  }
}

TEST_CASE("apply_shift") {
  const auto f = factorize_group(7);
  const auto sub = build_subspace(f, 2, SubspaceKind::multiplicative);
  CHECK(apply_shift(sub, 4) == 1);
  CHECK(apply_shift(sub, 1) == 2);
  CHECK(apply_shift(sub, 0) == 0);
  const auto add = build_subspace(f, 2, SubspaceKind::additive);
  CHECK(apply_shift(add, 2) == 0);
  for (auto v : sub.values()) {
    auto x = v;
    for (std::size_t i = 0; i < sub.dimension(); ++i) x = apply_shift(sub, x);
    CHECK(x == v);
  }
}
