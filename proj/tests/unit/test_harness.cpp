#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "haltsim/harness.hpp"

using namespace haltsim;
using namespace haltsim::harness;

namespace {

std::vector<std::string> split_lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string l;
  while (std::getline(in, l)) out.push_back(l);
  return out;
}

ErrorCategory category_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.category();
  }
  return ErrorCategory::validation;
}

}  // namespace

TEST_CASE("config parsing") {
  const auto c = parse_config("# comment\nexperiment = protocol\n p=7 \nseed=3\n\n");
  CHECK(c.experiment == "protocol");
  CHECK(c.params.at("p") == "7");
  CHECK(c.seed == 3u);
  CHECK_THROWS_AS(parse_config("nonsense line"), Error);
}

TEST_CASE("validation names the key") {
  auto c = parse_config("experiment=protocol\np=7\nbogus=1\n");
  try {
    validate_config(c);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("bogus") != std::string::npos);
    CHECK(e.category() == ErrorCategory::input);
  }
  auto missing = parse_config("experiment=protocol\n");
  try {
    validate_config(missing);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("'p'") != std::string::npos);
  }
  CHECK(category_of([] { (void)schema("nope"); }) == ErrorCategory::input);
  auto bad = parse_config("experiment=fidelity\nj=two\n");
  CHECK(category_of([&] { (void)run_experiment_table(bad); }) == ErrorCategory::input);
}

TEST_CASE("protocol experiment") {
  const auto out = run_experiment_table(parse_config("experiment=protocol\np=7\n"));
  CHECK(out.table.header == schema("protocol"));
  REQUIRE(out.table.rows.size() == 3u);
  for (const auto& r : out.table.rows) {
    CHECK(r[2] == "C2");
    CHECK(r[3] == "1");
    CHECK(r[4] == "blank");
    CHECK(std::stod(r[5]) == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("fidelity experiment") {
  const auto out = run_experiment_table(parse_config("experiment=fidelity\nratios=0.1,0.05,0.01\n"));
  REQUIRE(out.table.rows.size() == 3u);
  double prev = 0;
  for (const auto& r : out.table.rows) {
    const double p = std::stod(r[3]);
    CHECK(p > prev);
    prev = p;
  }
  const auto empty = run_experiment_table(parse_config("experiment=fidelity\nratios=\n"));
  CHECK(empty.table.rows.empty());
  CHECK(split_lines(empty.table.to_string()).size() == 1u);
}

TEST_CASE("float formatting round-trips") {
  for (double x : {0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300}) CHECK(std::stod(format_double(x)) == x);
}

TEST_CASE("squeeze experiment is reproducible for a fixed seed") {
  auto c = parse_config("experiment=squeeze\nsamples=5\nseed=17\n");
  const auto a = run_experiment_table(c).table.to_string();
  const auto b = run_experiment_table(c).table.to_string();
  CHECK(a == b);
  c.seed = 18;
  CHECK(run_experiment_table(c).table.to_string() != a);
  for (const auto& r : run_experiment_table(c).table.rows) CHECK(std::stod(r[6]) < 1e-8);
}

TEST_CASE("output path and CSV file") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "haltsim_harness_test";
  fs::remove_all(dir);
  ::setenv(kOutputDirEnv, dir.c_str(), 1);
  auto c = parse_config("experiment=protocol\np=5\n");
  const auto out = run_experiment(c);
  CHECK(fs::path(out.path) == dir / "protocol.csv");
  std::ifstream f(out.path);
  std::stringstream ss;
  ss << f.rdbuf();
  CHECK(ss.str() == out.table.to_string());
  ::unsetenv(kOutputDirEnv);
  fs::remove_all(dir);
}

TEST_CASE("fast suite passes and the injected fault is caught") {
  const auto ok = validate_suite({});
  CHECK(ok.passed());
  SuiteOptions bad;
  bad.inject_fault = true;
  const auto rep = validate_suite(bad);
  CHECK_FALSE(rep.passed());
  bool saw = false;
  for (const auto& c : rep.checks)
    if (!c.passed) {
      CHECK(c.module == "protocol");
      CHECK(c.invariant.find("unitary") != std::string::npos);
      saw = true;
    }
  CHECK(saw);
}
