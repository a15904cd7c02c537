#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "tslab/scattering.hpp"
#include "tslab/transfer.hpp"

using namespace tslab;

namespace {

constexpr double pi = std::numbers::pi;
constexpr cplx I{0.0, 1.0};

template <class Fn>
cplx circle_mean(Fn f, cplx centre, double radius, int n = 64) {
  cplx acc = 0.0;
  for (int j = 0; j < n; ++j) acc += f(centre + radius * std::exp(I * (2 * pi * j / n)));
  return acc / static_cast<double>(n);
}

Band first_band(const PotentialSpec& s) {
  const BandScan scan = find_bands(s, 0.1, 4.0, 2000);
  REQUIRE(!scan.bands.empty());
  return scan.bands.front();
}

}  // namespace

TEST_CASE("a single delta splits the wave by the textbook amplitudes") {
  for (double A : {0.5, 10.0, 100.0})
    for (double w : {0.3, 2.0, 7.0}) {
      const ScatterResult r = scatter_direct(Frequency{w}, make_single_delta_comb(A, 1.0), 1);
      const cplx den = 2.0 * I * w - A;
      CHECK(std::abs(r.r - A / den) < 1e-12);
      CHECK(std::abs(r.t - 2.0 * I * w / den) < 1e-12);
      CHECK(std::norm(r.t) == doctest::Approx(4 * w * w / (4 * w * w + A * A)).epsilon(1e-12));
    }
}

TEST_CASE("free medium transmits everything") {
  const ScatterResult r = scatter_direct(Frequency{3.0}, PotentialSpec::free(1.0), 7);
  CHECK(std::abs(r.r) < 1e-14);
  CHECK(std::abs(r.t - 1.0) < 1e-12);
}

TEST_CASE("rectangular barrier transmittance") {
  const double V = 12.0, d = 1.0;
  const PotentialSpec s = make_scaled_smooth({{0.0, d, ConstProfile{1.0}}}, V, d);
  for (double w : {1.5, 3.0, 4.5, 9.0}) {
    const cplx kappa = std::sqrt(cplx(w * w - V));
    const cplx sn = std::sin(kappa * d);
    const double expected = 1.0 / (1.0 + V * V * std::norm(sn) / (4 * w * w * std::norm(kappa)));
    CHECK(std::norm(scatter_direct(Frequency{w}, s, 1).t) == doctest::Approx(expected).epsilon(1e-8));
  }
}

TEST_CASE("conservation, formula agreement and the norm identity on random media") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const PotentialSpec s(1.0, 1 + 60 * u(rng), {{0.0, 1.0}, {0.5, -0.5 - u(rng)}},
                          {{0.6, 0.9, ConstProfile{u(rng) - 0.5}}});
    const double w = 0.3 + 12 * u(rng);
    const int N = 1 + static_cast<int>(40 * u(rng));
    const ScatterResult r = scatter_direct(Frequency{w}, s, N);
    CHECK(r.conservation_defect < 1e-9);
    CHECK(std::abs(std::norm(r.t) - r.t_sq_from_norm) < 1e-10);
    CHECK(std::abs(reflection_formula(Frequency{w}, s, N) - r.r) < 1e-9);
    CHECK(std::abs(transmittance_formula(w, s, N) - std::norm(r.t)) < 1e-10);
  }
}

TEST_CASE("reciprocity: mirroring the medium keeps t and |r|") {
  const PotentialSpec s(1.0, 3.0, {{0.2, 1.0}, {0.5, -2.0}}, {{0.1, 0.3, ConstProfile{1.5}}});
  const PotentialSpec m(1.0, 3.0, {{0.5, -2.0}, {0.8, 1.0}}, {{0.7, 0.9, ConstProfile{1.5}}});
  for (double w : {1.0, 2.7, 5.5})
    for (int N : {1, 3, 8}) {
      const ScatterResult a = scatter_direct(Frequency{w}, s, N), b = scatter_direct(Frequency{w}, m, N);
      CHECK(std::abs(a.t - b.t) < 1e-9);
      CHECK(std::abs(std::abs(a.r) - std::abs(b.r)) < 1e-9);
    }
}

TEST_CASE("real potential: r(-w) is the conjugate of r(w)") {
  const PotentialSpec s(1.0, 5.0, {{0.0, 1.0}}, {{0.4, 0.8, PolyProfile{{1.0, 1.0}}}});
  for (double w : {0.8, 3.3}) {
    const ScatterResult p = scatter_direct(Frequency{w}, s, 4), n = scatter_direct(Frequency{-w}, s, 4);
    CHECK(std::abs(n.r - std::conj(p.r)) < 1e-9);
    CHECK(std::abs(n.t - std::conj(p.t)) < 1e-9);
  }
}

TEST_CASE("causality: r_N and t_N are analytic above the real axis") {
  const PotentialSpec s = make_single_delta_comb(30.0, 1.0);
  const cplx w0(2.5, 0.5);
  for (int N : {1, 4, 16}) {
    auto r = [&](cplx w) { return scatter_direct(Frequency{w}, s, N).r; };
    auto t = [&](cplx w) { return scatter_direct(Frequency{w}, s, N).t; };
    CHECK(std::abs(circle_mean(r, w0, 0.3) - r(w0)) < 1e-9);
    CHECK(std::abs(circle_mean(t, w0, 0.3) - t(w0)) < 1e-9);
  }
}

TEST_CASE("transparency points: N - 1 of them per band, each fully transmitting") {
  const PotentialSpec s = make_single_delta_comb(100.0, 1.0);
  const Band b = first_band(s);
  for (int N : {2, 5, 8}) {
    const auto pts = transparency_points(s, b, N);
    REQUIRE(pts.size() == static_cast<std::size_t>(N - 1));
    for (const auto& p : pts) {
      CHECK(p.omega > b.lo);
      CHECK(p.omega < b.hi);
      CHECK(p.residual < 1e-9);
      CHECK(std::abs(scatter_direct(Frequency{p.omega}, s, N).t) > 1 - 1e-8);
      CHECK(std::abs(reflection_formula(Frequency{p.omega}, s, N)) < 1e-6);
    }
  }
  CHECK(transparency_points(s, b, 1).empty());
}

TEST_CASE("gap decay rate equals Im k") {
  const PotentialSpec s = make_single_delta_comb(20.0, 1.0);
  for (double w : {1.0, 4.5}) {
    const GapDecayFit fit = gap_decay_fit(s, w, {4, 8, 16, 32, 64});
    CHECK(fit.sigma == doctest::Approx(fit.im_k).epsilon(0.02));
    CHECK(fit.im_k == doctest::Approx(bloch_k(Frequency{w}, s).k.imag()));
  }
  CHECK_THROWS_AS(gap_decay_fit(s, 3.0, {4, 8}), Error);
}

TEST_CASE("semi-infinite medium") {
  const PotentialSpec s = make_single_delta_comb(20.0, 1.0);
  SUBCASE("both forms agree and a gap reflects totally") {
    const SemiInfiniteResult r = scatter_semi_infinite(Frequency{1.5}, s);
    CHECK(std::abs(r.r - r.r_weyl) < 1e-9);
    CHECK(std::abs(r.r) == doctest::Approx(1.0).epsilon(1e-10));
  }
  SUBCASE("finite slabs converge to it above the axis") {
    const cplx w(3.0, 0.05);
    const cplx r = scatter_semi_infinite(Frequency{w}, s).r;
    double prev = 1e300;
    for (int N : {8, 32, 128, 512}) {
      const double e = std::abs(scatter_direct(Frequency{w}, s, N).r - r);
      CHECK(e < prev);
      prev = e;
    }
    CHECK(prev < 1e-10);
  }
  SUBCASE("band edge is singular") {
    CHECK_THROWS_AS(scatter_semi_infinite(Frequency{pi}, s), Error);
  }
}

TEST_CASE("non-degenerate edge: |t_N| decays like 1/N") {
  const PotentialSpec s = make_single_delta_comb(100.0, 1.0);
  const double edge = first_band(s).lo;
  const double a = 16 * std::abs(scatter_direct(Frequency{edge}, s, 16).t);
  const double b = 1024 * std::abs(scatter_direct(Frequency{edge}, s, 1024).t);
  CHECK(b / a == doctest::Approx(1.0).epsilon(0.05));
}
