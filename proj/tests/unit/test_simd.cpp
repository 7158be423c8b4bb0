#include <doctest.h>

#include <cstdlib>
#include <random>
#include <vector>

#include "haltsim/simd/kernels.hpp"

using namespace haltsim::simd;

namespace {

struct Data {
  std::vector<cplx> a, b;
  std::vector<double> w;
};

Data make(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Data d;
  for (std::size_t i = 0; i < n; ++i) {
    d.a.emplace_back(g(rng), g(rng));
    d.b.emplace_back(g(rng), g(rng));
    d.w.push_back(g(rng));
  }
  return d;
}

}  // namespace

TEST_CASE("scalar kernels against plain loops") {
  const auto& s = kernels_for(Backend::scalar);
  const auto d = make(37, 1);
  auto a = d.a;
  s.cmul(a.data(), d.b.data(), a.size());
  double n2 = 0, wn = 0;
  cplx in = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(std::abs(a[i] - d.a[i] * d.b[i]) < 1e-14);
    n2 += std::norm(d.a[i]);
    wn += d.w[i] * std::norm(d.a[i]);
    in += std::conj(d.a[i]) * d.b[i];
  }
  CHECK(s.norm2(d.a.data(), d.a.size()) == doctest::Approx(n2).epsilon(1e-14));
  CHECK(s.weighted_norm2(d.a.data(), d.w.data(), d.a.size()) == doctest::Approx(wn).epsilon(1e-14));
  CHECK(std::abs(s.inner(d.a.data(), d.b.data(), d.a.size()) - in) < 1e-12);
}

TEST_CASE("avx2 kernels match scalar for every tail length") {
  if (!backend_available(Backend::avx2)) {
    MESSAGE("avx2 backend unavailable; skipping");
    return;
  }
  const auto& s = kernels_for(Backend::scalar);
  const auto& v = kernels_for(Backend::avx2);
  for (std::size_t n = 0; n < 40; ++n) {
    const auto d = make(n, static_cast<unsigned>(n) + 10);
    auto a1 = d.a, a2 = d.a;
    s.cmul(a1.data(), d.b.data(), n);
    v.cmul(a2.data(), d.b.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(a1[i] - a2[i]) < 1e-14);
    CHECK(s.norm2(d.a.data(), n) == doctest::Approx(v.norm2(d.a.data(), n)).epsilon(1e-13));
    CHECK(s.weighted_norm2(d.a.data(), d.w.data(), n) ==
          doctest::Approx(v.weighted_norm2(d.a.data(), d.w.data(), n)).epsilon(1e-13));
    CHECK(std::abs(s.inner(d.a.data(), d.b.data(), n) - v.inner(d.a.data(), d.b.data(), n)) < 1e-12 * (1.0 + n));
  }
}

TEST_CASE("dispatch") {
  CHECK(backend_available(Backend::scalar));
  const Backend b = active_backend();
  CHECK(backend_available(b));
  const char* env = std::getenv("HALTSIM_SIMD");
  if (env && std::string(env) == "scalar") CHECK(b == Backend::scalar);
  CHECK(std::string(backend_name(Backend::avx2)) == "avx2");
}
