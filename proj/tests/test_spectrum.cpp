#include <doctest.h>

#include <array>
#include <cmath>
#include <numbers>

#include "tslab/spectrum.hpp"

using namespace tslab;

namespace {

constexpr double pi = std::numbers::pi;
constexpr cplx I{0.0, 1.0};

// Kronig-Penney comb with the delta at the start of the period.
struct Comb {
  double A, L;
  double F(double w) const { return std::cos(w * L) + A / (2 * w) * std::sin(w * L); }
  double dF(double w) const {
    return -L * std::sin(w * L) + A / 2 * (L * std::cos(w * L) / w - std::sin(w * L) / (w * w));
  }
};

// Half-trace of the alternating comb built by hand from 2x2 products.
cplx alternating_F(double A, double l, cplx w) {
  using M = std::array<cplx, 4>;
  auto mul = [](const M& x, const M& y) {
    return M{x[0] * y[0] + x[1] * y[2], x[0] * y[1] + x[1] * y[3], x[2] * y[0] + x[3] * y[2],
             x[2] * y[1] + x[3] * y[3]};
  };
  const M rot{std::cos(w * l), std::sin(w * l), -std::sin(w * l), std::cos(w * l)};
  const M up{1.0, 0.0, A / w, 1.0}, down{1.0, 0.0, -A / w, 1.0};
  const M m = mul(rot, mul(down, mul(rot, up)));
  return 0.5 * (m[0] + m[3]);
}

double bisect(auto f, double a, double b) {
  double fa = f(a);
  for (int i = 0; i < 200; ++i) {
    const double m = 0.5 * (a + b);
    if (m == a || m == b) break;
    const double fm = f(m);
    if ((fm < 0) == (fa < 0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

template <class Fn>
cplx circle_mean(Fn f, cplx centre, double radius, int n = 64) {
  cplx acc = 0.0;
  for (int j = 0; j < n; ++j) acc += f(centre + radius * std::exp(I * (2 * pi * j / n)));
  return acc / static_cast<double>(n);
}

}  // namespace

TEST_CASE("discriminant of the comb matches the closed form") {
  const Comb c{100.0, 1.0};
  const PotentialSpec s = make_single_delta_comb(c.A, c.L);
  for (double w : {0.5, 3.05, 6.1, 9.3}) {
    CHECK(discriminant(Frequency{w}, s).real() == doctest::Approx(c.F(w)).epsilon(1e-12));
    const DiscriminantJet j = discriminant_jet(w, s);
    CHECK(j.F1 == doctest::Approx(c.dF(w)).epsilon(1e-7));
  }
}

TEST_CASE("comb bands: upper edges at n pi, lower edges at the closed-form roots") {
  const Comb c{100.0, 1.0};
  const BandScan scan = find_bands(make_single_delta_comb(c.A, c.L), 0.1, 10.0, 2000);
  REQUIRE(scan.bands.size() == 3);
  CHECK(scan.under_resolved.empty());
  for (int n = 1; n <= 3; ++n) {
    const Band& b = scan.bands[static_cast<std::size_t>(n - 1)];
    CAPTURE(n);
    CHECK(b.index == n);
    CHECK(b.hi == doctest::Approx(n * pi).epsilon(1e-11));
    const double target = n % 2 ? 1.0 : -1.0;
    const double lo = bisect([&](double w) { return c.F(w) - target; }, n * pi - 1.0, n * pi - 1e-9);
    CHECK(std::abs(b.lo - lo) < 1e-9);
    CHECK(b.lo_class == EdgeKind::nondegenerate);
    CHECK(b.hi_class == EdgeKind::nondegenerate);
    CHECK(b.hi < n * pi + 1e-9);
  }
}

TEST_CASE("free medium is one band over the whole window") {
  const BandScan scan = find_bands(PotentialSpec::free(1.0), 0.1, 10.0, 500);
  REQUIRE(scan.bands.size() == 1);
  CHECK(scan.bands[0].lo == 0.1);
  CHECK(scan.bands[0].hi == 10.0);
  CHECK(scan.bands[0].lo_class == EdgeKind::range_limit);
  CHECK(scan.bands[0].hi_class == EdgeKind::range_limit);
}

TEST_CASE("alternating comb: bands touch at n pi / l") {
  const double A = 5.0, l = 0.5;
  const PotentialSpec s = make_alternating_delta_comb(A, l);
  for (double w : {1.3, 4.0, 7.7}) CHECK(std::abs(discriminant(Frequency{w}, s) - alternating_F(A, l, w)) < 1e-12);
  const BandScan scan = find_bands(s, 0.5, 13.0, 2000);
  int touches = 0;
  for (std::size_t i = 0; i + 1 < scan.bands.size(); ++i)
    if (scan.bands[i].hi == scan.bands[i + 1].lo) {
      ++touches;
      CHECK(scan.bands[i].hi_class == EdgeKind::degenerate);
      CHECK(scan.bands[i + 1].lo_class == EdgeKind::degenerate);
      const double wn = std::round(scan.bands[i].hi * l / pi) * pi / l;
      CHECK(scan.bands[i].hi == doctest::Approx(wn).epsilon(1e-9));
    }
  CHECK(touches == 2);
  const EdgeClassification e = classify_edge(s, 2 * pi);
  CHECK(e.kind == EdgeKind::degenerate);
  CHECK(e.monodromy_dist_to_pm_identity < 1e-10);
}

TEST_CASE("sign-changing smooth profile has no degenerate edges") {
  const PotentialSpec s = make_scaled_smooth({{0.0, 1.0, PolyProfile{{1.0, -2.0}}}}, 60.0, 1.0);
  const BandScan scan = find_bands(s, 0.1, 4 * pi, 1000);
  CHECK(!scan.bands.empty());
  for (const Band& b : scan.bands) {
    CHECK(b.lo_class != EdgeKind::degenerate);
    CHECK(b.hi_class != EdgeKind::degenerate);
  }
}

TEST_CASE("Bloch phase solves cos k = F on the decaying branch") {
  const PotentialSpec s = make_single_delta_comb(20.0, 1.0);
  for (cplx w : {cplx(2.0), cplx(2.9), cplx(5.0), cplx(3.0, 0.2), cplx(8.0, 1.0)}) {
    const DispersionSample d = bloch_k(Frequency{w}, s);
    CHECK(std::abs(std::cos(d.k) - d.F) < 1e-10 * std::max(1.0, std::abs(d.F)));
    CHECK(std::abs(d.mu_plus) <= 1.0 + 1e-12);
    CHECK(d.k.imag() >= 0.0);
    if (w.imag() > 0.0) CHECK(d.k.imag() > 0.0);
  }
  CHECK(bloch_k(Frequency{1.0}, s).regime == Regime::gap);
  CHECK(bloch_k(Frequency{3.0}, s).regime == Regime::band);
}

TEST_CASE("on a band the real-axis phase is the limit from above") {
  const PotentialSpec s = make_single_delta_comb(20.0, 1.0);
  for (double w : {2.6, 3.0, 5.9}) {
    const cplx k0 = bloch_k(Frequency{w}, s).k;
    const cplx k1 = bloch_k(Frequency{cplx(w, 1e-7)}, s).k;
    CHECK(std::abs(k0 - k1) < 1e-5);
  }
}

TEST_CASE("Weyl function is the eigenvector slope and is analytic above the axis") {
  const PotentialSpec s(1.0, 4.0, {{0.0, 1.0}}, {{0.3, 0.7, ConstProfile{2.0}}});
  SpectrumOptions o;
  const cplx w0(3.5, 0.6);
  const WeylPair p = weyl_functions(Frequency{w0}, s);
  const Mat2 m = monodromy(Frequency{w0}, s);
  const DispersionSample d = bloch_k(Frequency{w0}, s);
  CHECK(std::abs((m.a - d.mu_plus) + m.b * p.m_plus) < 1e-10 * m.max_abs());
  CHECK(std::abs(m.c + (m.d - 1.0 / d.mu_plus) * p.m_minus) < 1e-10 * m.max_abs());
  auto mp = [&](cplx w) { return weyl_functions(Frequency{w}, s).m_plus; };
  CHECK(std::abs(circle_mean(mp, w0, 0.4) - p.m_plus) < 1e-9 * std::abs(p.m_plus));
  auto k = [&](cplx w) { return bloch_k(Frequency{w}, s).k; };
  CHECK(std::abs(circle_mean(k, w0, 0.4) - d.k) < 1e-9);
}

TEST_CASE("group velocity against the closed-form derivative") {
  const Comb c{50.0, 1.0};
  const PotentialSpec s = make_single_delta_comb(c.A, c.L);
  for (double w : {2.95, 3.0, 3.1, 6.0, 6.2}) {
    if (std::abs(c.F(w)) >= 1.0) continue;
    const double expected = c.L * std::sqrt(1 - c.F(w) * c.F(w)) / std::abs(c.dF(w));
    const GroupVelocitySample g = group_velocity(w, s);
    CHECK(std::abs(g.group_velocity) == doctest::Approx(expected).epsilon(1e-6));
  }
  CHECK_THROWS_AS(group_velocity(1.0, s), Error);
}

TEST_CASE("degenerate edge velocity is L / sqrt|F''|") {
  const double A = 50.0, l = 0.5;
  const PotentialSpec s = make_alternating_delta_comb(A, l);
  const double w0 = pi / l, h = 1e-4;
  const double f2 = (alternating_F(A, l, w0 + h).real() - 2 * alternating_F(A, l, w0).real() +
                     alternating_F(A, l, w0 - h).real()) /
                    (h * h);
  CHECK(degenerate_edge_velocity(s, w0) == doctest::Approx(2 * l / std::sqrt(std::abs(f2))).epsilon(1e-5));
}

TEST_CASE("edge classification of a comb edge") {
  const EdgeClassification e = classify_edge(make_single_delta_comb(100.0, 1.0), pi);
  CHECK(e.kind == EdgeKind::nondegenerate);
  CHECK(std::abs(e.F_prime) > 0.0);
}
