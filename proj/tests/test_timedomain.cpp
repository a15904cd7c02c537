#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "tslab/timedomain.hpp"

using namespace tslab;

namespace {

PulseConfig small_config(double A, int periods = 2) {
  PulseConfig c;
  c.spec = make_single_delta_comb(A, 1.0);
  c.periods = periods;
  c.width = 30.0;
  c.cells_per_period = 16;
  return c;
}

double max_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double max_abs(const std::vector<cplx>& a) {
  double m = 0.0;
  for (const cplx& z : a) m = std::max(m, std::abs(z));
  return m;
}

}  // namespace

TEST_CASE("bump envelope") {
  CHECK(bump_envelope(-0.5) == doctest::Approx(1.0));
  CHECK(bump_envelope(-1.0) == 0.0);
  CHECK(bump_envelope(0.0) == 0.0);
  CHECK(bump_envelope(0.3) == 0.0);
  CHECK(bump_envelope(-0.25) == doctest::Approx(bump_envelope(-0.75)));
}

TEST_CASE("discretization places the comb on grid nodes") {
  const PulseConfig c = small_config(10.0, 3);
  const Discretization d = discretize(c);
  CHECK(d.h == doctest::Approx(1.0 / 16));
  CHECK(d.dt == doctest::Approx(0.9 * d.h / std::sqrt(1 + 10.0 * d.h / 4)));
  CHECK(d.x(d.origin) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(d.x(d.slab_end) == doctest::Approx(3.0));
  REQUIRE(d.delta_nodes.size() == 3);
  for (std::size_t n = 0; n < 3; ++n) CHECK(d.x(d.delta_nodes[n]) == doctest::Approx(static_cast<double>(n)));
  CHECK(d.omega0 == doctest::Approx(std::numbers::pi * (1 - 2.0 / 10.0)));
}

TEST_CASE("initial pulse lives on x < 0") {
  const PulseConfig c = small_config(10.0);
  const Discretization d = discretize(c);
  const FieldState s = make_initial_pulse(c, d);
  for (std::size_t i = d.origin; i < d.size; ++i) CHECK(s.curr[i] == cplx(0.0));
  CHECK(max_abs(s.curr) > 0.1 / std::sqrt(c.width));
}

TEST_CASE("configuration errors") {
  PulseConfig c = small_config(10.0);
  c.theta = 5.0;
  CHECK_THROWS_AS(discretize(c), Error);
  c = small_config(10.0);
  c.spec = make_scaled_smooth({{0.0, 1.0, ConstProfile{1.0}}}, 1.0, 1.0);
  CHECK_THROWS_AS(discretize(c), Error);
  c = small_config(10.0);
  c.spec = PotentialSpec(1.0, 1.0, {{0.3, 1.0}}, {});
  c.cells_per_period = 4;
  CHECK_THROWS_AS(discretize(c), Error);
}

TEST_CASE("one step is linear in the field") {
  const PulseConfig c = small_config(10.0);
  const Discretization d = discretize(c);
  FieldState u = make_initial_pulse(c, d);
  FieldState v = u;
  for (std::size_t i = 0; i < d.size; ++i) {
    v.curr[i] = std::conj(u.curr[i]) * 0.5;
    v.prev[i] = std::conj(u.prev[i]) * 0.5;
  }
  const cplx a(0.3, -1.2), b(2.0, 0.7);
  FieldState w = u;
  for (std::size_t i = 0; i < d.size; ++i) {
    w.curr[i] = a * u.curr[i] + b * v.curr[i];
    w.prev[i] = a * u.prev[i] + b * v.prev[i];
  }
  step(u, d);
  step(v, d);
  step(w, d);
  double e = 0.0;
  for (std::size_t i = 0; i < d.size; ++i) e = std::max(e, std::abs(w.curr[i] - (a * u.curr[i] + b * v.curr[i])));
  CHECK(e < 1e-13);
}

TEST_CASE("leapfrog runs backwards exactly") {
  const PulseConfig c = small_config(25.0);
  const Discretization d = discretize(c);
  const FieldState start = make_initial_pulse(c, d);
  FieldState s = start;
  for (int i = 0; i < 3000; ++i) step(s, d);
  std::swap(s.prev, s.curr);
  for (int i = 0; i < 3000; ++i) step(s, d);
  CHECK(max_diff(s.curr, start.prev) < 1e-10 * max_abs(start.curr));
  CHECK(max_diff(s.prev, start.curr) < 1e-10 * max_abs(start.curr));
}

TEST_CASE("discrete causality: support grows one node per step") {
  const PulseConfig c = small_config(10.0);
  const Discretization d = discretize(c);
  FieldState s = make_initial_pulse(c, d);
  std::size_t last = 0;
  for (std::size_t i = 0; i < d.size; ++i)
    if (s.curr[i] != cplx(0.0) || s.prev[i] != cplx(0.0)) last = i;
  bool escaped = false;
  for (std::size_t n = 1; n <= 200; ++n) {
    step(s, d);
    for (std::size_t i = last + n + 1; i < d.size; ++i) escaped = escaped || s.curr[i] != cplx(0.0);
  }
  CHECK(!escaped);
}

TEST_CASE("energy is conserved and splits into three parts") {
  const PulseReport r = run(small_config(10.0));
  CHECK(r.max_relative_drift < 1e-4);
  CHECK(r.reflected_fraction + r.inside_fraction + r.transmitted_fraction == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(r.series.front().t == 0.0);
  CHECK(r.series.back().t == doctest::Approx(r.grid.t_end).epsilon(0.01));
  for (const EnergySample& e : r.series) CHECK(e.left + e.slab + e.right == doctest::Approx(e.total).epsilon(1e-12));
}

TEST_CASE("no potential: everything is transmitted") {
  PulseConfig c = small_config(1.0);
  c.spec = c.spec.with_amplitude(0.0);
  const PulseReport r = run(c);
  CHECK(r.transmitted_fraction == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("single delta: transmitted fraction matches 4w^2 / (4w^2 + A^2)") {
  PulseConfig c = small_config(10.0, 1);
  c.width = 150.0;
  c.cells_per_period = 32;
  const PulseReport r = run(c);
  const double w = r.grid.omega0, A = 10.0;
  CHECK(r.transmitted_fraction == doctest::Approx(4 * w * w / (4 * w * w + A * A)).epsilon(0.02));
  const OracleResult o = freq_domain_oracle(c);
  CHECK(r.transmitted_fraction == doctest::Approx(o.fraction).epsilon(0.02));
}

TEST_CASE("walls too close raise a domain error") {
  PulseConfig c = small_config(10.0);
  c.x_min = -35.0;
  c.x_max = 10.0;
  try {
    (void)run(c);
    FAIL("expected a domain-size error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::domain_size);
  }
}

TEST_CASE("results do not depend on the worker count") {
  PulseConfig c = small_config(10.0);
  c.cells_per_period = 64;
  c.x_min = -400.0;
  c.x_max = 400.0;
  c.t_end = 20.0;
  ::setenv("SCATTER_THREADS", "1", 1);
  const PulseReport one = run(c);
  ::setenv("SCATTER_THREADS", "3", 1);
  const PulseReport three = run(c);
  ::unsetenv("SCATTER_THREADS");
  REQUIRE(one.grid.size > 40000);
  REQUIRE(one.series.size() == three.series.size());
  for (std::size_t i = 0; i < one.series.size(); ++i) {
    CHECK(one.series[i].total == three.series[i].total);
    CHECK(one.series[i].right == three.series[i].right);
  }
  CHECK(one.g_gradient_energy == three.g_gradient_energy);
}

TEST_CASE("snapshot layout") {
  const PulseConfig c = small_config(10.0);
  const Discretization d = discretize(c);
  const FieldState s = make_initial_pulse(c, d);
  const auto path = std::filesystem::temp_directory_path() / "tslab_snapshot_test.bin";
  write_snapshot(path.string(), s, d);
  CHECK(std::filesystem::file_size(path) == 32 + 16 * d.size);
  std::ifstream in(path, std::ios::binary);
  std::uint64_t n = 0;
  double h = 0.0;
  in.read(reinterpret_cast<char*>(&n), 8);
  in.read(reinterpret_cast<char*>(&h), 8);
  CHECK(n == d.size);
  CHECK(h == d.h);
  std::filesystem::remove(path);
}
