#include <doctest.h>

#include <fstream>

#include "jflow/config.hpp"
#include "jflow/error.hpp"

using namespace jflow;

namespace {

constexpr const char* kMinimal = R"(
grid: [8, 8, 8, 8]
G: [1, 1, 0, 0]
H: [2, 2, 0, 0]
)";

std::string with(const std::string& extra) { return std::string(kMinimal) + extra + "\n"; }

}  // namespace

TEST_CASE("minimal document takes the documented defaults") {
  const RunConfig c = parse_config(kMinimal);
  CHECK(c.grid == GridShape::cube(8));
  CHECK(c.G == HermitianMatrix2::identity());
  CHECK(c.H == HermitianMatrix2::scalar(2.0));
  CHECK(c.psi0.empty());
  CHECK(c.sigma == 0.2);
  CHECK(c.tol_stop == 1e-10);
  CHECK(c.t_max == 200.0);
  CHECK(c.sample_interval == 16);
  CHECK(c.snapshot_interval == 0);
  CHECK_FALSE(c.A_override.has_value());
  CHECK(c.output_dir == "out");
  CHECK(c == RunConfig{});
}

TEST_CASE("full document") {
  const RunConfig c = parse_config(R"(
grid: [8, 6, 4, 10]
G: [1.5, 2, 0.25, -0.5]
H: [3, 3, 0, 0, 0, 0]
psi0:
  - {k: [1, 0, 0, 0], amplitude: 0.05, phase: 0}
  - k: [0, -1, 1, 2]
    amplitude: -0.01
    phase: 1.25
sigma: 0.5
tol_stop: 1e-9
t_max: 12.5
sample_interval: 4
snapshot_interval: 100
A_override: 0.75
seed: 99
output_dir: "runs/a b"
newton_tol: 1e-10
newton_max_iter: 20
compare_threshold: 2e-5
)");
  CHECK(c.grid == GridShape{{8, 6, 4, 10}});
  CHECK(c.G == HermitianMatrix2{1.5, 2, {0.25, -0.5}});
  CHECK(c.H == HermitianMatrix2::scalar(3.0));
  REQUIRE(c.psi0.size() == 2u);
  CHECK(c.psi0[1].k == std::array<int, 4>{0, -1, 1, 2});
  CHECK(c.psi0[1].amplitude == -0.01);
  CHECK(c.psi0[1].phase == 1.25);
  CHECK(c.sigma == 0.5);
  CHECK(c.tol_stop == 1e-9);
  CHECK(c.t_max == 12.5);
  CHECK(c.sample_interval == 4);
  CHECK(c.snapshot_interval == 100);
  CHECK(c.A_override == 0.75);
  CHECK(c.seed == 99u);
  CHECK(c.output_dir == "runs/a b");
  CHECK(c.newton_tol == 1e-10);
  CHECK(c.newton_max_iter == 20);
  CHECK(c.compare_threshold == 2e-5);
}

TEST_CASE("validation errors") {
  CHECK_THROWS_WITH_AS(parse_config("grid: [7, 8, 8, 8]\nG: [1, 1, 0, 0]\nH: [2, 2, 0, 0]\n"),
                       doctest::Contains("grid dims must be even"), ValidationError);
  CHECK_THROWS_WITH_AS(parse_config(with("sigma: 1.5")), doctest::Contains("sigma"), ValidationError);
  CHECK_THROWS_AS(parse_config(with("sigma: 0")), ValidationError);
  CHECK_THROWS_AS(parse_config(with("tol_stop: -1")), ValidationError);
  CHECK_THROWS_AS(parse_config(with("t_max: -2")), ValidationError);
  CHECK_THROWS_AS(parse_config(with("sample_interval: 0")), ValidationError);
  CHECK_THROWS_AS(parse_config(with("snapshot_interval: -3")), ValidationError);
  CHECK_THROWS_WITH_AS(parse_config(with("sigmaa: 0.3")), doctest::Contains("unknown key"),
                       ValidationError);
  CHECK_THROWS_AS(parse_config(with("psi0:\n  - {k: [1, 0, 0], amplitude: 1, phase: 0}")),
                  ValidationError);
  CHECK_THROWS_AS(parse_config(with("psi0:\n  - {k: [1, 0, 0, 0], amplitude: 1, colour: 2}")),
                  ValidationError);
  CHECK_THROWS_AS(parse_config("grid: [8, 8, 8, 8]\nG: [1, 1, 0, 0]\n"), ValidationError);
  CHECK_THROWS_AS(parse_config("grid: [8, 8, 8, 8]\nG: [1, 1, 0]\nH: [2, 2, 0, 0]\n"),
                  ValidationError);
  CHECK_THROWS_AS(parse_config(with("sigma: abc")), ValidationError);
  CHECK_THROWS_AS(parse_config("grid: [8, 8\n"), ValidationError);
  CHECK_THROWS_AS(parse_config("- 1\n- 2\n"), ValidationError);
}

TEST_CASE("errors carry the line of the offending key") {
  CHECK_THROWS_WITH_AS(parse_config(with("sigma: 1.5")), doctest::Contains("line 5"),
                       ValidationError);
}

TEST_CASE("property: parse, serialize, parse is the identity") {
  RunConfig a;
  a.grid = GridShape{{4, 6, 8, 10}};
  a.G = HermitianMatrix2{1.0 / 3.0, 2.0, {0.1, -1e-17}};
  a.H = HermitianMatrix2{2.0, 2.5, {0.0, 0.3}};
  a.psi0 = {{{1, 0, 0, 0}, 0.05, 0.0}, {{-1, 2, 0, 3}, 1.0 / 7.0, 2.0 / 3.0}};
  a.sigma = 0.123456789012345678;
  a.tol_stop = 3e-11;
  a.t_max = 0.0;
  a.sample_interval = 7;
  a.snapshot_interval = 13;
  a.A_override = -0.0;
  a.seed = 18446744073709551615ull;
  a.output_dir = "dir: with #special chars";
  a.newton_tol = 1e-12;
  a.newton_max_iter = 3;
  a.compare_threshold = 5e-6;

  const RunConfig b = parse_config(serialize_config(a));
  CHECK(b == a);
  CHECK(parse_config(serialize_config(b)) == b);

  const RunConfig d = parse_config(kMinimal);
  CHECK(parse_config(serialize_config(d)) == d);
}

TEST_CASE("load_config reads files and reports missing ones") {
  const auto dir = std::filesystem::temp_directory_path() / "jflow_test_config";
  std::filesystem::create_directories(dir);
  {
    std::ofstream f(dir / "c.yaml");
    f << kMinimal;
  }
  CHECK(load_config(dir / "c.yaml") == RunConfig{});
  CHECK_THROWS_AS(load_config(dir / "missing.yaml"), UsageError);
}

TEST_CASE("model and options from a config") {
  RunConfig c = parse_config(with("psi0:\n  - {k: [1, 0, 0, 0], amplitude: 0.05, phase: 0}"));
  const SurfaceModel m = build_model(c);
  CHECK(m.c() == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(m.psi0()[0] == doctest::Approx(0.05));
  const FlowOptions o = flow_options(c);
  CHECK(o.sigma == c.sigma);
  CHECK(o.tol_stop == c.tol_stop);
  CHECK(o.t_max == c.t_max);

  c.psi0 = {{{1, 0, 0, 0}, 0.15, 0.0}};
  CHECK_THROWS_AS(build_model(c), HypothesisError);
  c.psi0 = {{{4, 0, 0, 0}, 0.01, 0.0}};
  CHECK_THROWS_AS(build_model(c), ValidationError);
}
