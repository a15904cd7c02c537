#include "tslab/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "tslab/parallel.hpp"

namespace tslab {

namespace {

constexpr double pi = std::numbers::pi;

// Roots of mu^2 - 2 F mu + 1 = 0, larger modulus first. The small root is
// taken as the reciprocal of the large one to avoid cancellation.
std::pair<cplx, cplx> characteristic_roots(cplx F) {
  const cplx s = std::sqrt(F * F - 1.0);
  const cplx r1 = F + s, r2 = F - s;
  const cplx big = std::abs(r1) >= std::abs(r2) ? r1 : r2;
  return {big, 1.0 / big};
}

// bisection for a sign change of f on [a, b]; fa and fb must have opposite signs
template <class Fn>
double bisect(const Fn& f, double a, double b, double fa, double rel) {
  for (int it = 0; it < 200; ++it) {
    const double m = 0.5 * (a + b);
    if (b - a <= rel * std::abs(m) || m == a || m == b) break;
    const double fm = f(m);
    if ((fm <= 0.0) == (fa <= 0.0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

double g_of(const PotentialSpec& spec, double w, const SpectrumOptions& o) {
  return std::abs(discriminant(Frequency{w}, spec, o).real()) - 1.0;
}

}  // namespace

const char* to_string(Regime r) noexcept {
  switch (r) {
    case Regime::band: return "band";
    case Regime::gap: return "gap";
    case Regime::edge: return "edge";
  }
  return "?";
}

const char* to_string(EdgeKind k) noexcept {
  switch (k) {
    case EdgeKind::nondegenerate: return "nondegenerate";
    case EdgeKind::degenerate: return "degenerate";
    case EdgeKind::range_limit: return "range_limit";
  }
  return "?";
}

cplx discriminant(Frequency omega, const PotentialSpec& spec, const SpectrumOptions& opts) {
  return monodromy(omega, spec, opts.transfer).half_trace();
}

DiscriminantJet discriminant_jet(double omega, const PotentialSpec& spec, const SpectrumOptions& opts) {
  const FrozenMonodromy m(spec, Frequency{omega}, opts.transfer);
  auto F = [&](double w) { return m(Frequency{w}).half_trace().real(); };
  const double f0 = F(omega);
  const double h = opts.deriv_step_rel * std::abs(omega);
  double d1[3], d2[3];
  for (int j = 0; j < 3; ++j) {
    const double s = h / static_cast<double>(1 << j);
    const double fp = F(omega + s), fm = F(omega - s);
    d1[j] = (fp - fm) / (2.0 * s);
    d2[j] = (fp - 2.0 * f0 + fm) / (s * s);
  }
  auto richardson = [](const double* d) {
    const double r0 = (4.0 * d[1] - d[0]) / 3.0;
    const double r1 = (4.0 * d[2] - d[1]) / 3.0;
    return (16.0 * r1 - r0) / 15.0;
  };
  return {f0, richardson(d1), richardson(d2)};
}

DispersionSample bloch_k(Frequency omega, const Mat2& m, const PotentialSpec& spec, const SpectrumOptions& opts) {
  const cplx F = m.half_trace();
  const auto [big, small] = characteristic_roots(F);
  DispersionSample out{omega.value(), F, 0.0, small, Regime::gap};
  auto finish = [&](cplx mu) {
    out.mu_plus = mu;
    out.k = cplx{0.0, -1.0} * std::log(mu);
    return out;
  };

  if (!omega.is_real()) {
    const bool on_circle = std::abs(std::abs(small) - 1.0) < opts.edge_tol;
    out.regime = on_circle ? (std::abs(F * F - 1.0) < opts.edge_tol ? Regime::edge : Regime::band) : Regime::gap;
    return finish(small);
  }

  const double Fr = F.real();
  if (std::abs(std::abs(Fr) - 1.0) < opts.edge_tol) {
    out.regime = Regime::edge;
    out.mu_plus = Fr > 0 ? 1.0 : -1.0;
    out.k = Fr > 0 ? 0.0 : pi;
    return out;
  }
  if (std::abs(Fr) > 1.0) {
    out.regime = Regime::gap;
    return finish(cplx{small.real(), 0.0});
  }

  // Band: both roots on the unit circle. Pick the one that the decaying root
  // above the axis converges to.
  out.regime = Regime::band;
  const double ang = std::acos(Fr);
  const cplx roots[2] = {std::polar(1.0, ang), std::polar(1.0, -ang)};
  int choice = -1;
  for (double eps : opts.nudges) {
    const Frequency nudged{cplx{omega.real(), eps * std::abs(omega.real())}};
    const cplx Fn = monodromy(nudged, spec, opts.transfer).half_trace();
    const cplx sel = characteristic_roots(Fn).second;
    const int c = std::abs(sel - roots[0]) <= std::abs(sel - roots[1]) ? 0 : 1;
    if (c == choice) break;
    choice = c;
  }
  out.mu_plus = roots[choice];
  out.k = choice == 0 ? ang : -ang;
  return out;
}

DispersionSample bloch_k(Frequency omega, const PotentialSpec& spec, const SpectrumOptions& opts) {
  return bloch_k(omega, monodromy(omega, spec, opts.transfer), spec, opts);
}

EdgeClassification classify_edge(const PotentialSpec& spec, double omega_edge, const SpectrumOptions& opts) {
  const DiscriminantJet jet = discriminant_jet(omega_edge, spec, opts);
  const double resolution = 4.0 * std::abs(jet.F1) * opts.bisect_rel * std::abs(omega_edge);
  if (std::abs(std::abs(jet.F) - 1.0) > std::max(opts.edge_tol, resolution)) {
    std::ostringstream os;
    os << "omega = " << omega_edge << " is not a band edge (F = " << jet.F << ")";
    raise(ErrorCode::domain, os.str());
  }
  const Mat2 m = monodromy(Frequency{omega_edge}, spec, opts.transfer);
  EdgeClassification c;
  c.F = jet.F;
  c.F_prime = jet.F1;
  c.F_double_prime = jet.F2;
  c.monodromy_dist_to_pm_identity = std::min(distance(m, Mat2::identity()), distance(m, cplx{-1.0} * Mat2::identity()));
  const double scale = std::max(std::abs(jet.F1), std::abs(jet.F2) * 1e-2 * std::abs(omega_edge));
  c.derivative_threshold = opts.tol_der_rel * scale;

  const bool flat = std::abs(jet.F1) < c.derivative_threshold;
  if (!flat) {
    c.kind = EdgeKind::nondegenerate;
    return c;
  }
  if (c.monodromy_dist_to_pm_identity < opts.tol_mat && std::abs(jet.F2) > c.derivative_threshold) {
    c.kind = EdgeKind::degenerate;
    return c;
  }
  std::ostringstream os;
  os << "ambiguous edge at omega = " << omega_edge << ": F' = " << jet.F1 << ", F'' = " << jet.F2
     << ", min|M -+ I| = " << c.monodromy_dist_to_pm_identity << ", threshold = " << c.derivative_threshold;
  raise(ErrorCode::classification, os.str());
}

BandScan find_bands(const PotentialSpec& spec, double omega_lo, double omega_hi, int grid,
                    const SpectrumOptions& opts) {
  if (!(omega_lo > 0.0 && omega_lo < omega_hi)) raise(ErrorCode::domain, "band scan needs 0 < omega_lo < omega_hi");
  if (grid < 2) raise(ErrorCode::domain, "band scan needs at least 2 grid points");

  const double L = spec.period();
  const double cell = (omega_hi - omega_lo) / (grid - 1);
  std::vector<double> w(static_cast<std::size_t>(grid));
  for (int i = 0; i < grid; ++i) w[static_cast<std::size_t>(i)] = omega_lo + cell * i;
  w.back() = omega_hi;

  // Bands shrink like 1/A next to n*pi/L; sample those neighborhoods finer.
  if (!spec.is_free()) {
    const double factor = std::clamp(spec.contrast(), 16.0, 4096.0);
    const double fine = cell / factor;
    const int n_lo = std::max(1, static_cast<int>(std::floor((omega_lo - 2 * cell) * L / pi)));
    const int n_hi = static_cast<int>(std::ceil((omega_hi + 2 * cell) * L / pi));
    for (int n = n_lo; n <= n_hi; ++n) {
      const double c = n * pi / L;
      const double a = std::max(omega_lo, c - 2 * cell), b = std::min(omega_hi, c + 2 * cell);
      for (double x = a; x < b; x += fine) w.push_back(x);
    }
    std::sort(w.begin(), w.end());
    w.erase(std::unique(w.begin(), w.end(), [&](double x, double y) { return y - x < 1e-3 * fine; }), w.end());
    w.back() = omega_hi;
  }

  const std::size_t n = w.size();
  std::vector<double> g(n);
  parallel_for(n, [&](std::size_t i) { g[i] = g_of(spec, w[i], opts); });

  auto gf = [&](double x) { return g_of(spec, x, opts); };
  // slope of |F|
  auto dg = [&](double x) {
    const DiscriminantJet j = discriminant_jet(x, spec, opts);
    return j.F >= 0.0 ? j.F1 : -j.F1;
  };

  enum class Ev { toggle, touch };
  struct Event {
    double omega;
    Ev type;
  };
  std::vector<Event> events;
  BandScan scan;

  auto extremum = [&](std::size_t i, bool maximum) -> double {
    double a = w[i - 1], b = w[i + 1];
    double da = dg(a);
    const double db = dg(b);
    if (maximum ? !(da > 0.0 && db < 0.0) : !(da < 0.0 && db > 0.0)) return std::nan("");
    return bisect(dg, a, b, da, 1e-13);
  };

  for (std::size_t i = 0; i + 1 < n; ++i) {
    const bool in_a = g[i] <= 0.0, in_b = g[i + 1] <= 0.0;
    if (in_a != in_b) events.push_back({bisect(gf, w[i], w[i + 1], g[i], opts.bisect_rel), Ev::toggle});
  }

  for (std::size_t i = 1; i + 1 < n; ++i) {
    const bool in_band = g[i - 1] <= 0.0 && g[i] <= 0.0 && g[i + 1] <= 0.0;
    const bool in_gap = g[i - 1] > 0.0 && g[i] > 0.0 && g[i + 1] > 0.0;
    if (in_band && g[i] >= g[i - 1] && g[i] > g[i + 1]) {
      const double x = extremum(i, true);
      if (std::isnan(x)) continue;
      const double gx = gf(x);
      if (gx > opts.edge_tol) {
        events.push_back({bisect(gf, w[i - 1], x, g[i - 1], opts.bisect_rel), Ev::toggle});
        events.push_back({bisect(gf, x, w[i + 1], gx, opts.bisect_rel), Ev::toggle});
        scan.under_resolved.push_back({w[i - 1], w[i + 1]});
      } else if (gx >= -opts.edge_tol && !spec.is_free()) {
        events.push_back({x, Ev::touch});
      }
    } else if (in_gap && g[i] <= g[i - 1] && g[i] < g[i + 1]) {
      const double x = extremum(i, false);
      if (std::isnan(x)) continue;
      const double gx = gf(x);
      if (gx < -opts.edge_tol) {
        events.push_back({bisect(gf, w[i - 1], x, g[i - 1], opts.bisect_rel), Ev::toggle});
        events.push_back({bisect(gf, x, w[i + 1], gx, opts.bisect_rel), Ev::toggle});
        scan.under_resolved.push_back({w[i - 1], w[i + 1]});
      }
    }
  }
  std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) { return a.omega < b.omega; });

  // Walk the events and close bands.
  bool inside = g.front() <= 0.0;
  double start = omega_lo;
  EdgeKind start_kind = EdgeKind::range_limit;
  auto close = [&](double hi, EdgeKind hi_kind) {
    scan.bands.push_back({static_cast<int>(scan.bands.size()) + 1, start, hi, start_kind, hi_kind});
  };
  for (const Event& e : events) {
    if (e.type == Ev::touch) {
      if (!inside) continue;
      close(e.omega, EdgeKind::degenerate);
      start = e.omega;
      start_kind = EdgeKind::degenerate;
    } else if (inside) {
      close(e.omega, EdgeKind::nondegenerate);
      inside = false;
    } else {
      start = e.omega;
      start_kind = EdgeKind::nondegenerate;
      inside = true;
    }
  }
  if (inside) close(omega_hi, EdgeKind::range_limit);

  // Confirm the structural edge kinds with the derivative test.
  auto confirm = [&](double x, EdgeKind& kind) {
    if (kind == EdgeKind::range_limit) return;
    try {
      const EdgeClassification c = classify_edge(spec, x, opts);
      if (c.kind != kind) {
        std::ostringstream os;
        os << "edge at " << x << " looks " << to_string(kind) << " from the scan but classifies "
           << to_string(c.kind);
        scan.warnings.push_back(os.str());
      }
      kind = c.kind;
    } catch (const Error& e) {
      scan.warnings.push_back(e.what());
    }
  };
  for (Band& b : scan.bands) {
    confirm(b.lo, b.lo_class);
    confirm(b.hi, b.hi_class);
  }

  // Anything narrower than two local sample spacings is suspect.
  auto spacing_at = [&](double x) {
    const auto it = std::lower_bound(w.begin(), w.end(), x);
    const std::size_t j = std::clamp<std::size_t>(static_cast<std::size_t>(it - w.begin()), 1, n - 1);
    return w[j] - w[j - 1];
  };
  for (std::size_t i = 0; i < scan.bands.size(); ++i) {
    const Band& b = scan.bands[i];
    if (b.lo_class != EdgeKind::range_limit && b.hi_class != EdgeKind::range_limit &&
        b.width() < 2.0 * spacing_at(0.5 * (b.lo + b.hi)))
      scan.under_resolved.push_back({b.lo, b.hi});
    if (i + 1 < scan.bands.size()) {
      const double glo = b.hi, ghi = scan.bands[i + 1].lo;
      if (ghi > glo && ghi - glo < 2.0 * spacing_at(0.5 * (glo + ghi))) scan.under_resolved.push_back({glo, ghi});
    }
  }
  std::sort(scan.under_resolved.begin(), scan.under_resolved.end());
  scan.under_resolved.erase(std::unique(scan.under_resolved.begin(), scan.under_resolved.end()),
                            scan.under_resolved.end());
  for (const auto& r : scan.under_resolved) {
    std::ostringstream os;
    os << "under-resolved structure in [" << r[0] << ", " << r[1] << "]; refine the grid there";
    scan.warnings.push_back(os.str());
  }
  return scan;
}

GroupVelocitySample group_velocity(double omega, const PotentialSpec& spec, const SpectrumOptions& opts) {
  const DispersionSample s = bloch_k(Frequency{omega}, spec, opts);
  const double F = s.F.real();
  if (s.regime != Regime::band || std::abs(F) >= 1.0 - opts.interior_margin) {
    std::ostringstream os;
    os << "omega = " << omega << " is not strictly inside a band (F = " << F << ")";
    raise(ErrorCode::near_edge, os.str());
  }
  const DiscriminantJet jet = discriminant_jet(omega, spec, opts);
  const double branch = s.k.real() >= 0.0 ? 1.0 : -1.0;
  const double kp = -branch * jet.F1 / std::sqrt(1.0 - F * F);
  return {omega, kp, spec.period() / kp};
}

double degenerate_edge_velocity(const PotentialSpec& spec, double omega0, const SpectrumOptions& opts) {
  const EdgeClassification c = classify_edge(spec, omega0, opts);
  if (c.kind != EdgeKind::degenerate) {
    std::ostringstream os;
    os << "omega = " << omega0 << " is a " << to_string(c.kind) << " edge, not degenerate";
    raise(ErrorCode::classification, os.str());
  }
  return spec.period() / std::sqrt(std::abs(c.F_double_prime));
}

WeylPair weyl_functions(Frequency omega, const PotentialSpec& spec, const SpectrumOptions& opts) {
  const Mat2 m = monodromy(omega, spec, opts.transfer);
  const DispersionSample s = bloch_k(omega, m, spec, opts);
  if (s.regime == Regime::edge) raise(ErrorCode::edge_singularity, "Weyl functions are singular at a band edge");
  const double scale = std::max(1.0, m.max_abs());
  auto weyl = [&](cplx mu) {
    const cplx den1 = m.b, den2 = mu - m.d;
    const double n1 = std::abs(den1), n2 = std::abs(den2);
    if (n1 <= 1e-13 * scale && n2 <= 1e-13 * scale)
      raise(ErrorCode::edge_singularity, "both Weyl representations are singular");
    const cplx m1 = (mu - m.a) / den1, m2 = m.c / den2;
    const cplx value = n1 >= n2 ? m1 : m2;
    if (n1 > 1e-6 * scale && n2 > 1e-6 * scale &&
        std::abs(m1 - m2) > opts.weyl_tol * std::max(1.0, std::abs(value))) {
      std::ostringstream os;
      os << "Weyl representations disagree: " << m1 << " vs " << m2;
      raise(ErrorCode::numeric_degeneracy, os.str());
    }
    return value;
  };
  return {weyl(s.mu_plus), weyl(1.0 / s.mu_plus)};
}

}  // namespace tslab
