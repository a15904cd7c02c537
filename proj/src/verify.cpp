#include "tslab/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>

#include <json.hpp>

#include "tslab/parallel.hpp"
#include "tslab/transfer.hpp"

namespace tslab {

namespace {

constexpr double pi = std::numbers::pi;
using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

// Random one-period potential drawn from the model families plus generic
// smooth profiles. Smooth parts keep |q| L^2 <= 25 so that hyperbolic growth
// stays below e^5 and det M is not swamped by cancellation in ad - bc.
PotentialSpec random_spec(Rng& rng) {
  const int kind = std::uniform_int_distribution<int>(0, 5)(rng);
  const double L = uniform(rng, 0.5, 2.0);
  const double q_max = 25.0 / (L * L);
  switch (kind) {
    case 0: return make_single_delta_comb(uniform(rng, 1.0, 200.0), L);
    case 1: return make_alternating_delta_comb(uniform(rng, 1.0, 100.0), 0.5 * L);
    case 2: {
      const double lo = uniform(rng, 0.0, 0.4 * L), hi = uniform(rng, 0.6 * L, L);
      return make_scaled_smooth({{lo, hi, ConstProfile{1.0}}}, uniform(rng, -q_max, q_max), L);
    }
    case 3: {
      // |v| <= 3 on [0, L]
      const std::vector<double> c{uniform(rng, -1, 1), uniform(rng, -1, 1) / L, uniform(rng, -1, 1) / (L * L)};
      return make_scaled_smooth({{0.0, L, PolyProfile{c}}}, uniform(rng, 1.0, q_max / 3.0), L);
    }
    case 4: {
      TableProfile t;
      for (int i = 0; i <= 4; ++i) {
        t.x.push_back(L * i / 4.0);
        t.v.push_back(uniform(rng, -1.0, 1.0));
      }
      return make_scaled_smooth({{0.0, L, t}}, uniform(rng, 1.0, q_max), L);
    }
    default: {
      const double A = uniform(rng, 1.0, 20.0);
      return PotentialSpec(L, A, {{0.0, uniform(rng, 0.5, 3.0)}, {0.5 * L, -uniform(rng, 0.5, 3.0)}},
                           {{0.1 * L, 0.4 * L, ConstProfile{uniform(rng, -1.0, 1.0)}},
                            {0.6 * L, 0.9 * L, PolyProfile{{0.0, uniform(rng, -1.0, 1.0) / L}}}});
    }
  }
}

Frequency random_frequency(Rng& rng, bool allow_complex) {
  const double re = uniform(rng, 0.3, 15.0);
  if (allow_complex && uniform(rng, 0.0, 1.0) < 0.25) return Frequency{cplx{re, uniform(rng, 0.0, 0.3)}};
  return Frequency{re};
}

VerifyCheck check_below(std::string name, double measured, double bound) {
  return {std::move(name), measured, bound, "<", measured < bound};
}

VerifyCheck check_at_most(std::string name, double measured, double bound) {
  return {std::move(name), measured, bound, "<=", measured <= bound};
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(y[i]) - my);
  }
  return sxy / sxx;
}

double max_entry_error(const Mat2& x, const Mat2& y) {
  return std::max({std::abs(x.a - y.a), std::abs(x.b - y.b), std::abs(x.c - y.c), std::abs(x.d - y.d)});
}

Band first_band(const PotentialSpec& spec, const ScatterOptions& o) {
  const BandScan scan = find_bands(spec, 0.1, 4.0 / spec.period(), 200, o.spectrum);
  if (scan.bands.empty()) raise(ErrorCode::domain, "no band found below 4/L");
  return scan.bands.front();
}

struct Context {
  const VerifyOptions& opts;
  const VerifyTolerances& tol;
  const ScatterOptions& num;
  CriterionResult& out;
};

// Criterion bodies -----------------------------------------------------------

void determinant_law(Context& c) {
  constexpr std::size_t samples = 10000;
  std::vector<double> err(samples), err_projected(samples);
  TransferOptions raw = c.num.spectrum.transfer;
  raw.project_unimodular = false;
  parallel_for(samples, [&](std::size_t i) {
    Rng rng(c.opts.seed + 1000003 * (i + 1));
    const PotentialSpec spec = random_spec(rng);
    const Frequency w = random_frequency(rng, true);
    err[i] = std::abs(monodromy(w, spec, raw).det() - 1.0);
    err_projected[i] = std::abs(monodromy(w, spec, c.num.spectrum.transfer).det() - 1.0);
  });
  c.out.checks.push_back(
      check_below("max |det M - 1| unprojected", *std::max_element(err.begin(), err.end()), c.tol.det));
  c.out.checks.push_back(check_below("max |det M - 1|", *std::max_element(err_projected.begin(), err_projected.end()),
                                     c.tol.det));
  c.out.info.emplace_back("samples", static_cast<double>(samples));
}

void chebyshev_identity(Context& c) {
  constexpr std::size_t samples = 1000;
  std::vector<double> err(samples);
  parallel_for(samples, [&](std::size_t i) {
    Rng rng(c.opts.seed + 2000003 * (i + 1));
    const PotentialSpec spec = random_spec(rng);
    const Frequency w = random_frequency(rng, true);
    const Mat2 m = monodromy(w, spec, c.num.spectrum.transfer);
    Mat2 product = m;
    double worst = 0.0;
    for (int n = 1; n <= 64; ++n) {
      if (n > 1) product = product * m;
      const Mat2 cheb = monodromy_power(m, m.half_trace(), n);
      worst = std::max(worst, max_entry_error(cheb, product) / product.max_abs());
    }
    err[i] = worst;
  });
  c.out.checks.push_back(
      check_below("max entry error / max|M^N| over N <= 64", *std::max_element(err.begin(), err.end()), c.tol.chebyshev));
}

void formula_cross_validation(Context& c) {
  constexpr std::size_t samples = 1000;
  std::vector<double> er(samples), et(samples), ec(samples);
  parallel_for(samples, [&](std::size_t i) {
    Rng rng(c.opts.seed + 3000017 * (i + 1));
    const PotentialSpec spec = random_spec(rng);
    const Frequency w = random_frequency(rng, false);
    const int n = std::uniform_int_distribution<int>(1, 64)(rng);
    const ScatterResult s = scatter_direct(w, spec, n, c.num);
    er[i] = std::abs(reflection_formula(w, spec, n, c.num) - s.r);
    et[i] = std::abs(transmittance_formula(w.real(), spec, n, c.num) - s.t_sq_from_norm);
    ec[i] = s.conservation_defect;
  });
  c.out.checks.push_back(check_below("max |r_N(cot form) - r_N(direct)|", *std::max_element(er.begin(), er.end()), c.tol.reflection));
  c.out.checks.push_back(check_below("max | |t_N|^2(Chebyshev) - 4/(|T|^2+2) |", *std::max_element(et.begin(), et.end()),
                                     c.tol.transmittance));
  c.out.checks.push_back(check_below("max | |r|^2 + |t|^2 - 1 |", *std::max_element(ec.begin(), ec.end()), c.tol.conservation));
}

void narrow_band_edge(Context& c) {
  const double A = 100.0;
  const PotentialSpec spec = make_single_delta_comb(A, 1.0);
  const Band b = first_band(spec, c.num);
  // tan(eps/2) = 2 (pi - eps) / A, solved by plain bisection on (0, pi)
  double lo = 0.0, hi = pi - 1e-12;
  auto g = [&](double e) { return std::tan(0.5 * e) - 2.0 * (pi - e) / A; };
  for (int it = 0; it < 200 && hi - lo > 1e-17; ++it) {
    const double m = 0.5 * (lo + hi);
    (g(m) < 0.0 ? lo : hi) = m;
  }
  const double tan_edge = pi - 0.5 * (lo + hi);
  const double asym = pi * (1.0 - 4.0 / A);
  c.out.checks.push_back(check_below("|edge - root of tan equation|", std::abs(b.lo - tan_edge), c.tol.tan_root));
  c.out.checks.push_back(
      check_below("|edge - pi(1 - 4/A)|", std::abs(b.lo - asym), c.tol.edge_asymptotic_coeff / (A * A)));
  c.out.info.emplace_back("edge", b.lo);
  c.out.info.emplace_back("tan_root_edge", tan_edge);
  c.out.info.emplace_back("asymptotic_edge", asym);
}

void group_velocity_bound(Context& c) {
  const std::vector<double> amps{50.0, 100.0, 200.0};
  std::vector<double> vmax;
  for (double A : amps) {
    const PotentialSpec spec = make_single_delta_comb(A, 1.0);
    const Band b = first_band(spec, c.num);
    auto speed = [&](double w) {
      try {
        return std::abs(group_velocity(w, spec, c.num.spectrum).group_velocity);
      } catch (const Error&) {
        return 0.0;
      }
    };
    constexpr int K = 400;
    double best_w = b.lo, best = 0.0;
    for (int j = 0; j < K; ++j) {
      const double w = b.lo + b.width() * (j + 0.5) / K;
      const double v = speed(w);
      if (v > best) best = v, best_w = w;
    }
    // golden-section refinement around the best sample
    double x0 = best_w - b.width() / K, x1 = best_w + b.width() / K;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int it = 0; it < 60; ++it) {
      const double p = x1 - gr * (x1 - x0), q = x0 + gr * (x1 - x0);
      if (speed(p) > speed(q))
        x1 = q;
      else
        x0 = p;
    }
    best = std::max(best, speed(0.5 * (x0 + x1)));
    vmax.push_back(best);
    const double bound = 2.0 * pi / A * (1.0 + c.tol.vg_bound_coeff / A);
    std::ostringstream name;
    name << "max |V_g| over b_1, A = " << A;
    c.out.checks.push_back(check_at_most(name.str(), best, bound));
  }
  const double slope = loglog_slope(amps, vmax);
  c.out.checks.push_back(check_at_most("|slope of log max|V_g| vs log A + 1|", std::abs(slope + 1.0), c.tol.vg_slope));
  c.out.info.emplace_back("slope", slope);
}

void degenerate_edge(Context& c) {
  const std::vector<double> amps{50.0, 100.0, 200.0};
  std::vector<double> vg;
  double worst_m = 0.0, worst_r = 0.0;
  for (double A : amps) {
    const PotentialSpec spec = make_alternating_delta_comb(A, 1.0);
    const Frequency w{pi};
    worst_m = std::max(worst_m, distance(monodromy(w, spec, c.num.spectrum.transfer), Mat2::identity()));
    for (int n : {4, 32, 256}) worst_r = std::max(worst_r, std::abs(scatter_direct(w, spec, n, c.num).r));
    vg.push_back(degenerate_edge_velocity(spec, pi, c.num.spectrum));
  }
  c.out.checks.push_back(check_below("max ||M - I|| at pi/l", worst_m, c.tol.identity));
  c.out.checks.push_back(check_below("max |r_N|, N in {4, 32, 256}", worst_r, c.tol.degenerate_reflection));
  const double slope = loglog_slope(amps, vg);
  c.out.checks.push_back(check_at_most("|slope of log V_g vs log A + 1|", std::abs(slope + 1.0), c.tol.degenerate_slope));
  c.out.info.emplace_back("slope", slope);
}

void transparency(Context& c) {
  const double A = 100.0;
  const int N = 8;
  const PotentialSpec spec = make_single_delta_comb(A, 1.0);
  const Band b = first_band(spec, c.num);
  const auto pts = transparency_points(spec, b, N, c.num);
  VerifyCheck count{"transparency points in b_1", static_cast<double>(pts.size()), N - 1.0, "==",
                    pts.size() == static_cast<std::size_t>(N - 1)};
  c.out.checks.push_back(count);
  double min_peak = 2.0, max_mid = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    min_peak = std::min(min_peak, std::abs(scatter_direct(Frequency{pts[i].omega}, spec, N, c.num).t));
    if (i + 1 < pts.size()) {
      const double mid = 0.5 * (pts[i].omega + pts[i + 1].omega);
      max_mid = std::max(max_mid, std::abs(scatter_direct(Frequency{mid}, spec, N, c.num).t));
    }
  }
  c.out.checks.push_back({"min |t_8| at transparency points", min_peak, 1.0 - c.tol.transparency, ">",
                          min_peak > 1.0 - c.tol.transparency});
  c.out.checks.push_back(check_below("max |t_8| at midpoints", max_mid, c.tol.transparency_mid_coeff / A));
}

void gap_decay(Context& c) {
  const PotentialSpec spec = make_single_delta_comb(100.0, 1.0);
  const BandScan scan = find_bands(spec, 0.1, 7.0, 200, c.num.spectrum);
  if (scan.bands.size() < 2) raise(ErrorCode::domain, "expected two bands below 7");
  const double w = 0.5 * (scan.bands[0].hi + scan.bands[1].lo);
  std::vector<int> ns;
  for (int n = 4; n <= 64; ++n) ns.push_back(n);
  const GapDecayFit fit = gap_decay_fit(spec, w, ns, c.num);
  c.out.checks.push_back(check_below("|sigma / Im k - 1|", std::abs(fit.sigma / fit.im_k - 1.0), c.tol.decay_rel));
  c.out.info.emplace_back("omega", w);
  c.out.info.emplace_back("sigma", fit.sigma);
  c.out.info.emplace_back("im_k", fit.im_k);
}

void edge_law(Context& c) {
  const PotentialSpec spec = make_single_delta_comb(100.0, 1.0);
  const Band b = first_band(spec, c.num);
  double lo = 1e300, hi = 0.0;
  for (int n : {16, 64, 256, 1024}) {
    const double v = n * std::abs(scatter_direct(Frequency{b.lo}, spec, n, c.num).t);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    c.out.info.emplace_back("N|t_N| at N=" + std::to_string(n), v);
  }
  c.out.checks.push_back(check_below("max/min of N|t_N|", hi / lo, c.tol.edge_factor));
}

void semi_infinite(Context& c) {
  {
    const PotentialSpec spec = make_single_delta_comb(10.0, 1.0);
    const Band b = first_band(spec, c.num);
    const Frequency w{cplx{0.5 * (b.lo + b.hi), 0.01}};
    const cplx r_inf = scatter_semi_infinite(w, spec, c.num).r;
    std::vector<double> dist;
    for (int n = 8; n <= 1024; n += 8) {
      const double d = std::abs(scatter_direct(w, spec, n, c.num).r - r_inf);
      if (d < 1e-12) break;
      dist.push_back(d);
    }
    double worst = 0.0;
    for (std::size_t i = 1; i < dist.size(); ++i) worst = std::max(worst, dist[i] / dist[i - 1]);
    if (dist.size() < 3) worst = std::nan("");
    c.out.checks.push_back(check_below("max |r_{N+8} - r| / |r_N - r|", worst, c.tol.geometric_ratio));
    c.out.info.emplace_back("blocks", static_cast<double>(dist.size()));
  }
  {
    double lo = 1e300, hi = 0.0;
    for (double A : {50.0, 100.0, 200.0}) {
      const PotentialSpec spec = make_alternating_delta_comb(A, 1.0);
      const double w = pi + 0.3 / A;
      const double v = std::abs(scatter_semi_infinite(Frequency{w}, spec, c.num).r + 1.0) * A;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      c.out.info.emplace_back("A|r+1| at A=" + std::to_string(static_cast<int>(A)), v);
    }
    c.out.checks.push_back(check_below("max/min of A|r + 1|", hi / lo, c.tol.semi_factor));
  }
}

void energy_split(Context& c) {
  PulseConfig base = c.opts.pulse;
  base.spec = make_single_delta_comb(100.0, 1.0);
  PulseConfig half = base;
  half.spec = make_single_delta_comb(50.0, 1.0);
  const PulseReport r100 = run(base);
  const PulseReport r50 = run(half);
  const OracleResult o100 = freq_domain_oracle(base, c.num);
  c.out.checks.push_back(check_below("relative energy drift, A = 100", r100.max_relative_drift, c.tol.drift));
  c.out.checks.push_back(check_below("|transmitted / oracle - 1|, A = 100",
                                     std::abs(r100.transmitted_fraction / o100.fraction - 1.0), c.tol.oracle_rel));
  const double ratio = r50.transmitted_fraction / r100.transmitted_fraction;
  c.out.checks.push_back({"transmitted(A=50) / transmitted(A=100)", ratio, c.tol.split_ratio_lo, ">=",
                          ratio >= c.tol.split_ratio_lo});
  c.out.checks.push_back({"transmitted(A=50) / transmitted(A=100)", ratio, c.tol.split_ratio_hi, "<=",
                          ratio <= c.tol.split_ratio_hi});
  c.out.checks.push_back(check_below("pre-transit energy beyond NL / total, A = 100", r100.pre_transit_right_fraction,
                                     c.tol.pre_transit));
  c.out.info.emplace_back("transmitted_fraction_A100", r100.transmitted_fraction);
  c.out.info.emplace_back("oracle_fraction_A100", o100.fraction);
  c.out.info.emplace_back("transmitted_fraction_A50", r50.transmitted_fraction);
  c.out.info.emplace_back("reflected_fraction_A100", r100.reflected_fraction);
  c.out.info.emplace_back("g_energy_ratio_A50_A100", r50.g_gradient_energy / r100.g_gradient_energy);
}

void smooth_trends(Context& c) {
  {
    const double w0 = 3.0;
    const PotentialSpec shape = make_scaled_smooth({{0.0, 1.0, ConstProfile{1.0}}}, 1.0, 1.0);
    double threshold = std::nan("");
    bool last_gap = false;
    for (double A = 1.0; A <= 4096.0; A *= 2.0) {
      const bool gap = bloch_k(Frequency{w0}, shape.with_amplitude(A), c.num.spectrum).regime == Regime::gap;
      if (gap && !last_gap) threshold = A;
      if (!gap) threshold = std::nan("");
      last_gap = gap;
    }
    c.out.checks.push_back({"constant barrier: omega = 3 in a gap for all A >= threshold", threshold, 4096.0, "<=",
                            std::isfinite(threshold) && last_gap});
  }
  {
    const PotentialSpec shape = make_scaled_smooth({{0.0, 1.0, ConstProfile{-1.0}}}, 1.0, 1.0);
    std::vector<double> v;
    for (double A : {25.0, 100.0, 400.0}) {
      v.push_back(group_velocity(1.0, shape.with_amplitude(A), c.num.spectrum).group_velocity);
      c.out.info.emplace_back("well V_g at A=" + std::to_string(static_cast<int>(A)), v.back());
    }
    const bool increasing = v[0] < v[1] && v[1] < v[2];
    c.out.checks.push_back({"constant well: V_g(omega = 1) increasing over A = 25, 100, 400", v[2] / v[0], 1.0, ">",
                            increasing});
  }
  {
    const PotentialSpec spec = make_scaled_smooth({{0.0, 0.5, ConstProfile{1.0}}, {0.5, 1.0, ConstProfile{-1.0}}}, 100.0, 1.0);
    const BandScan scan = find_bands(spec, 0.1, 4.0 * pi, 400, c.num.spectrum);
    int degenerate = 0;
    for (const Band& b : scan.bands)
      degenerate += (b.lo_class == EdgeKind::degenerate) + (b.hi_class == EdgeKind::degenerate);
    c.out.checks.push_back({"sign-changing profile: degenerate edges in (0, 4 pi)", static_cast<double>(degenerate), 0.0,
                            "==", degenerate == 0});
    c.out.info.emplace_back("bands", static_cast<double>(scan.bands.size()));
  }
}

struct Criterion {
  int id;
  const char* name;
  double time_limit;
  void (*body)(Context&);
};

constexpr Criterion criteria[] = {
    {1, "determinant law", 30.0, determinant_law},
    {2, "Chebyshev power identity", 10.0, chebyshev_identity},
    {3, "formula cross-validation", 10.0, formula_cross_validation},
    {4, "narrow-band edge asymptotics", 1.0, narrow_band_edge},
    {5, "group-velocity bound", 5.0, group_velocity_bound},
    {6, "degenerate edge", 5.0, degenerate_edge},
    {7, "transparency points", 5.0, transparency},
    {8, "gap decay", 5.0, gap_decay},
    {9, "non-degenerate edge law", 5.0, edge_law},
    {10, "semi-infinite limit", 5.0, semi_infinite},
    {11, "time-domain energy split", 300.0, energy_split},
    {12, "smooth-potential trends", 30.0, smooth_trends},
};

}  // namespace

bool VerifyReport::all_passed() const {
  return std::all_of(criteria.begin(), criteria.end(), [](const CriterionResult& c) { return c.passed; });
}

VerifyReport run_verification(const VerifyOptions& opts, const std::function<void(const CriterionResult&)>& progress) {
  VerifyReport report;
  report.seed = opts.seed;
  for (const Criterion& cr : criteria) {
    if (!opts.only.empty() && std::find(opts.only.begin(), opts.only.end(), cr.id) == opts.only.end()) continue;
    CriterionResult res;
    res.id = cr.id;
    res.name = cr.name;
    res.time_limit = cr.time_limit * opts.tol.time_scale;
    Context ctx{opts, opts.tol, opts.numerics, res};
    const auto t0 = std::chrono::steady_clock::now();
    try {
      cr.body(ctx);
    } catch (const std::exception& e) {
      res.error = e.what();
    }
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    res.passed = res.error.empty() && !res.checks.empty() && res.seconds < res.time_limit &&
                 std::all_of(res.checks.begin(), res.checks.end(), [](const VerifyCheck& k) { return k.passed; });
    if (progress) progress(res);
    report.criteria.push_back(std::move(res));
  }
  return report;
}

std::string report_to_json(const VerifyReport& report) {
  using nlohmann::json;
  auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  json out;
  out["seed"] = report.seed;
  out["all_passed"] = report.all_passed();
  out["criteria"] = json::array();
  for (const CriterionResult& c : report.criteria) {
    json j;
    j["id"] = c.id;
    j["name"] = c.name;
    j["passed"] = c.passed;
    j["seconds"] = c.seconds;
    j["time_limit"] = c.time_limit;
    if (!c.error.empty()) j["error"] = c.error;
    j["checks"] = json::array();
    for (const VerifyCheck& k : c.checks)
      j["checks"].push_back({{"name", k.name}, {"measured", num(k.measured)}, {"bound", num(k.bound)},
                             {"relation", k.relation}, {"passed", k.passed}});
    j["info"] = json::object();
    for (const auto& [key, v] : c.info) j["info"][key] = num(v);
    out["criteria"].push_back(j);
  }
  return out.dump(2);
}

std::string format_line(const CriterionResult& c) {
  std::ostringstream os;
  os.precision(3);
  os << (c.passed ? "PASS" : "FAIL") << "  " << (c.id < 10 ? " " : "") << c.id << "  " << c.name << "  ("
     << c.seconds << " s, limit " << c.time_limit << " s)";
  for (const VerifyCheck& k : c.checks)
    os << "\n        " << (k.passed ? "ok  " : "BAD ") << k.name << ": " << k.measured << " " << k.relation << " "
       << k.bound;
  if (!c.error.empty()) os << "\n        error: " << c.error;
  return os.str();
}

}  // namespace tslab
