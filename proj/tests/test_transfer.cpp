#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "tslab/transfer.hpp"

using namespace tslab;

namespace {

constexpr cplx I{0.0, 1.0};

double rel_dist(const Mat2& x, const Mat2& y) { return distance(x, y) / std::max(1.0, y.max_abs()); }

// Prüfer propagator of a constant potential q over length d.
Mat2 constant_oracle(cplx w, cplx q, double d) {
  const cplx kappa = std::sqrt(w * w - q);
  const cplx c = std::cos(kappa * d);
  const cplx s = std::abs(kappa) < 1e-12 ? cplx(d) * w : std::sin(kappa * d) * w / kappa;
  const cplx sk = std::abs(kappa) < 1e-12 ? cplx(0.0) : -std::sin(kappa * d) * kappa / w;
  return {c, s, sk, c};
}

// Classical RK4 on (psi, psi'/w) with a fixed step.
Mat2 rk4_oracle(cplx w, const std::function<double(double)>& q, double x0, double x1, int steps) {
  auto f = [&](double x, cplx p1, cplx p2, cplx& d1, cplx& d2) {
    d1 = w * p2;
    d2 = (q(x) - w * w) / w * p1;
  };
  Mat2 out;
  for (int col = 0; col < 2; ++col) {
    cplx p1 = col == 0 ? 1.0 : 0.0, p2 = col == 0 ? 0.0 : 1.0;
    const double h = (x1 - x0) / steps;
    for (int i = 0; i < steps; ++i) {
      const double x = x0 + i * h;
      cplx a1, a2, b1, b2, c1, c2, e1, e2;
      f(x, p1, p2, a1, a2);
      f(x + h / 2, p1 + h / 2 * a1, p2 + h / 2 * a2, b1, b2);
      f(x + h / 2, p1 + h / 2 * b1, p2 + h / 2 * b2, c1, c2);
      f(x + h, p1 + h * c1, p2 + h * c2, e1, e2);
      p1 += h / 6 * (a1 + 2.0 * b1 + 2.0 * c1 + e1);
      p2 += h / 6 * (a2 + 2.0 * b2 + 2.0 * c2 + e2);
    }
    if (col == 0) {
      out.a = p1;
      out.c = p2;
    } else {
      out.b = p1;
      out.d = p2;
    }
  }
  return out;
}

Mat2 naive_power(const Mat2& m, int n) {
  Mat2 p;
  for (int i = 0; i < n; ++i) p = m * p;
  return p;
}

}  // namespace

TEST_CASE("free propagation is a rotation") {
  const Mat2 r = free_propagator(Frequency{2.0}, 0.3);
  CHECK(r.a.real() == doctest::Approx(std::cos(0.6)));
  CHECK(r.b.real() == doctest::Approx(std::sin(0.6)));
  CHECK(r.c.real() == doctest::Approx(-std::sin(0.6)));
  CHECK(std::abs(r.det() - 1.0) < 1e-15);
  CHECK(rel_dist(free_propagator(Frequency{2.0}, 0.5) * r, free_propagator(Frequency{2.0}, 0.8)) < 1e-14);
}

TEST_CASE("zero frequency is a singularity") {
  CHECK_THROWS_AS(Frequency{0.0}, Error);
}

TEST_CASE("constant potential matches the closed form") {
  for (double q : {-30.0, -1.0, 2.0, 9.0, 40.0})
    for (cplx w : {cplx(0.7), cplx(3.0), cplx(11.0), cplx(2.0, 0.3)}) {
      const PotentialSpec s = make_scaled_smooth({{0.0, 1.0, ConstProfile{1.0}}}, q, 1.0);
      const Mat2 m = monodromy(Frequency{w}, s);
      CAPTURE(q);
      CAPTURE(w);
      CHECK(rel_dist(m, constant_oracle(w, q, 1.0)) < 1e-8);
    }
}

TEST_CASE("single comb half-trace is cos wL + (A / 2w) sin wL") {
  for (double A : {1.0, 37.0, 250.0})
    for (double w : {0.4, 3.0, 3.14, 8.5}) {
      const double L = 1.3;
      const cplx F = monodromy(Frequency{w}, make_single_delta_comb(A, L)).half_trace();
      CHECK(std::abs(F - (std::cos(w * L) + A / (2 * w) * std::sin(w * L))) < 1e-12 * (1 + A / w));
    }
}

TEST_CASE("smooth profiles agree with an independent RK4 solution") {
  const PotentialSpec poly = make_scaled_smooth({{0.1, 0.9, PolyProfile{{1.0, -2.0, 3.0}}}}, 6.0, 1.0);
  const PotentialSpec table = make_scaled_smooth({{0.0, 1.0, TableProfile{{0.0, 0.3, 1.0}, {1.0, -2.0, 0.5}}}}, 4.0, 1.0);
  for (const PotentialSpec* s : {&poly, &table})
    for (cplx w : {cplx(1.1), cplx(5.0), cplx(4.0, 0.5)}) {
      // split at the kinks so that RK4 keeps its order
      Mat2 oracle;
      std::vector<double> cuts{0.0};
      for (const auto& p : s->smooth()) {
        cuts.push_back(p.lo);
        cuts.push_back(p.hi);
      }
      for (double b : s->breakpoints()) cuts.push_back(b);
      cuts.push_back(1.0);
      std::sort(cuts.begin(), cuts.end());
      cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
      for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double a = cuts[i], b = cuts[i + 1];
        // sample strictly inside so that a jump at an end is not picked up
        const auto q = [&](double x) { return s->evaluate_smooth(std::clamp(x, a + 1e-13, b - 1e-13)); };
        oracle = rk4_oracle(w, q, a, b, 4000) * oracle;
      }
      CHECK(rel_dist(monodromy(Frequency{w}, *s), oracle) < 1e-8);
    }
}

TEST_CASE("propagators compose") {
  const PotentialSpec s(1.0, 3.0, {{0.0, 1.0}, {0.4, -2.0}},
                        {{0.5, 0.9, PolyProfile{{0.0, 1.0}}}, {0.1, 0.3, ConstProfile{2.0}}});
  const Frequency w{cplx(4.2, 0.1)};
  const double cuts[] = {0.0, 0.2, 0.4, 0.7, 1.0};
  Mat2 prod;
  for (int i = 0; i < 4; ++i) prod = propagator(w, s, cuts[i], cuts[i + 1]) * prod;
  CHECK(rel_dist(prod, monodromy(w, s)) < 1e-9);
  CHECK(rel_dist(propagator(w, s, 0.0, 1.0), monodromy(w, s)) < 1e-12);
}

TEST_CASE("smooth propagator rejects a delta in the interval") {
  const PotentialSpec s(1.0, 1.0, {{0.5, 1.0}}, {});
  CHECK_THROWS_AS(smooth_propagator(Frequency{1.0}, s, 0.2, 0.8), Error);
  CHECK(rel_dist(smooth_propagator(Frequency{1.0}, s, 0.0, 0.5), free_propagator(Frequency{1.0}, 0.5)) < 1e-14);
}

TEST_CASE("determinant stays at one for random media and frequencies") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  TransferOptions raw;
  raw.project_unimodular = false;
  for (int trial = 0; trial < 200; ++trial) {
    const double A = 1 + 50 * u(rng);
    const PotentialSpec s(1.0, A, {{0.3 * u(rng), 1.0}},
                          {{0.5, 0.9, PolyProfile{{u(rng) - 0.5, 2 * u(rng) - 1}}}});
    const cplx w(0.5 + 12 * u(rng), trial % 3 == 0 ? 0.3 * u(rng) : 0.0);
    CHECK(std::abs(monodromy(Frequency{w}, s, raw).det() - 1.0) < 1e-8);
    CHECK(std::abs(monodromy(Frequency{w}, s).det() - 1.0) < 1e-8);
  }
}

TEST_CASE("Chebyshev polynomials match the trigonometric and hyperbolic forms") {
  for (double th : {0.1, 1.0, 2.5})
    for (int m : {0, 1, 5, 40}) {
      const cplx u = chebyshev_u(std::cos(th), m);
      CHECK(std::abs(u - std::sin((m + 1) * th) / std::sin(th)) < 1e-10 * (m + 1));
    }
  for (double t : {0.2, 1.5})
    for (int m : {3, 20}) {
      const cplx u = chebyshev_u(std::cosh(t), m);
      CHECK(std::abs(u / (std::sinh((m + 1) * t) / std::sinh(t)) - 1.0) < 1e-12);
    }
  const auto [um, um1] = chebyshev_u_pair(0.3, 0);
  CHECK(um == 1.0);
  CHECK(um1 == 0.0);
}

TEST_CASE("power identity matches repeated products") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const PotentialSpec s = trial % 2 ? make_single_delta_comb(1 + 80 * u(rng), 0.5 + u(rng))
                                      : make_alternating_delta_comb(1 + 30 * u(rng), 0.5);
    const cplx w(0.3 + 10 * u(rng), trial % 4 == 0 ? 0.2 * u(rng) : 0.0);
    const Mat2 m = monodromy(Frequency{w}, s);
    for (int n : {1, 2, 3, 7, 16, 33, 64}) {
      const Mat2 direct = naive_power(m, n);
      CHECK(distance(monodromy_power(m, m.half_trace(), n), direct) / direct.max_abs() < 1e-10);
    }
    CHECK(rel_dist(transfer_over_slab(Frequency{w}, s, 5), naive_power(m, 5)) < 1e-10);
  }
}

TEST_CASE("Hilbert-Schmidt norm") {
  CHECK(hs_norm_sq(Mat2{1.0, 2.0, I, -3.0}) == doctest::Approx(15.0));
}

TEST_CASE("frozen monodromy reproduces the adaptive sweep and is smooth in omega") {
  const PotentialSpec s = make_scaled_smooth({{0.0, 1.0, PolyProfile{{0.5, -1.0, 1.0}}}}, 20.0, 1.0);
  const FrozenMonodromy frozen(s, Frequency{6.0});
  CHECK(rel_dist(frozen(Frequency{6.0}), monodromy(Frequency{6.0}, s)) < 1e-9);
  // second difference of a smooth function scales like h^2
  auto F = [&](double w) { return frozen(Frequency{w}).half_trace().real(); };
  const double d1 = F(6.0 + 1e-3) - 2 * F(6.0) + F(6.0 - 1e-3);
  const double d2 = F(6.0 + 5e-4) - 2 * F(6.0) + F(6.0 - 5e-4);
  CHECK(d1 / d2 == doctest::Approx(4.0).epsilon(1e-3));
}

TEST_CASE("overflow guard") {
  const PotentialSpec s = make_scaled_smooth({{0.0, 1.0, ConstProfile{1.0}}}, 1e6, 1.0);
  try {
    (void)monodromy(Frequency{1.0}, s);
    FAIL("expected scale error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::scale_exceeded);
  }
}
