#include "tslab/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "tslab/transfer.hpp"

namespace tslab {

namespace {

constexpr cplx I{0.0, 1.0};

cplx stable_cot(cplx z) {
  if (z.imag() >= 0.0) {
    const cplx q = std::exp(2.0 * I * z);
    return I * (q + 1.0) / (q - 1.0);
  }
  const cplx q = std::exp(-2.0 * I * z);
  return I * (1.0 + q) / (1.0 - q);
}

cplx sin_from_mu(cplx mu) { return (mu - 1.0 / mu) / (2.0 * I); }

}  // namespace

ScatterResult scatter_direct(Frequency omega, const PotentialSpec& spec, int periods, const ScatterOptions& opts) {
  const Mat2 T = transfer_over_slab(omega, spec, periods, opts.spectrum.transfer);
  const cplx den = T.a + T.d + I * (T.c - T.b);
  if (!(std::abs(den) > 1e-300)) raise(ErrorCode::numeric_degeneracy, "vanishing scattering denominator");
  const cplx w = omega.value();
  ScatterResult out;
  out.omega = w;
  out.periods = periods;
  out.r = (T.d - T.a - I * (T.b + T.c)) / den;
  out.t = std::exp(-I * w * (spec.period() * periods)) * (2.0 / den);
  if (omega.is_real()) {
    out.conservation_defect = std::abs(std::norm(out.r) + std::norm(out.t) - 1.0);
    out.t_sq_from_norm = 4.0 / (hs_norm_sq(T) + 2.0);
  } else {
    out.conservation_defect = std::nan("");
    out.t_sq_from_norm = std::nan("");
  }
  return out;
}

cplx reflection_formula(Frequency omega, const PotentialSpec& spec, int periods, const ScatterOptions& opts) {
  if (periods < 1) raise(ErrorCode::domain, "period count must be >= 1");
  const Mat2 m = monodromy(omega, spec, opts.spectrum.transfer);
  const cplx num = (m.a - m.d) + I * (m.b + m.c);
  const cplx skew = I * (m.c - m.b);

  const DispersionSample s = bloch_k(omega, m, spec, opts.spectrum);
  const cplx sin_k = sin_from_mu(s.mu_plus);
  const cplx sin_nk = std::sin(static_cast<double>(periods) * s.k);
  if (s.regime != Regime::edge && std::abs(sin_k) > opts.edge_sin_tol && std::abs(sin_nk) > opts.edge_sin_tol &&
      std::abs(s.k.imag()) * periods < 600.0)
    return -num / (2.0 * sin_k * stable_cot(static_cast<double>(periods) * s.k) + skew);

  const cplx F = m.half_trace();
  const auto [u1, u2] = chebyshev_u_pair(F, periods - 1);
  const cplx tn = F * u1 - u2;
  return -u1 * num / (2.0 * tn + u1 * skew);
}

double transmittance_formula(double omega, const PotentialSpec& spec, int periods, const ScatterOptions& opts) {
  if (periods < 1) raise(ErrorCode::domain, "period count must be >= 1");
  const Mat2 m = monodromy(Frequency{omega}, spec, opts.spectrum.transfer);
  const cplx u = chebyshev_u(m.half_trace(), periods - 1);
  return 4.0 / ((hs_norm_sq(m) - 2.0) * std::norm(u) + 4.0);
}

SemiInfiniteResult scatter_semi_infinite(Frequency omega, const PotentialSpec& spec, const ScatterOptions& opts) {
  const Mat2 m = monodromy(omega, spec, opts.spectrum.transfer);
  const DispersionSample s = bloch_k(omega, m, spec, opts.spectrum);
  if (s.regime == Regime::edge) raise(ErrorCode::edge_singularity, "semi-infinite reflection is singular at a band edge");
  const WeylPair weyl = weyl_functions(omega, spec, opts.spectrum);

  SemiInfiniteResult out;
  out.omega = omega.value();
  out.m_plus = weyl.m_plus;
  out.r = (m.b + m.c - I * (m.a - m.d)) / (2.0 * sin_from_mu(s.mu_plus) + m.b - m.c);
  out.r_weyl = (I - weyl.m_plus) / (I + weyl.m_plus);
  out.c = 1.0 + out.r;
  if (std::abs(out.r - out.r_weyl) > opts.semi_tol * std::max(1.0, std::abs(out.r))) {
    std::ostringstream os;
    os << "semi-infinite reflection forms disagree: " << out.r << " vs " << out.r_weyl;
    raise(ErrorCode::numeric_degeneracy, os.str());
  }
  return out;
}

std::vector<TransparencyPoint> transparency_points(const PotentialSpec& spec, const Band& band, int periods,
                                                   const ScatterOptions& opts) {
  if (periods < 1) raise(ErrorCode::domain, "period count must be >= 1");
  std::vector<TransparencyPoint> out;
  if (periods == 1) return out;
  if (!(band.hi > band.lo) || band.width() < 1e-13 * band.hi)
    raise(ErrorCode::refinement, "band is too narrow to resolve transparency points");

  auto F = [&](double w) { return discriminant(Frequency{w}, spec, opts.spectrum).real(); };
  const double f_lo = F(band.lo), f_hi = F(band.hi);
  for (int m = 1; m < periods; ++m) {
    const double target = std::cos(m * std::numbers::pi / periods);
    double a = band.lo, b = band.hi;
    double fa = f_lo - target;
    if ((fa <= 0.0) == (f_hi - target <= 0.0)) continue;
    while (true) {
      const double mid = 0.5 * (a + b);
      if (mid == a || mid == b) break;
      const double fm = F(mid) - target;
      if (fm == 0.0) {
        a = b = mid;
        break;
      }
      if ((fm < 0.0) == (fa < 0.0)) {
        a = mid;
        fa = fm;
      } else {
        b = mid;
      }
    }
    TransparencyPoint p;
    p.omega = 0.5 * (a + b);
    p.band_index = band.index;
    p.m = m;
    const double fp = std::clamp(F(p.omega), -1.0, 1.0);
    p.residual = std::abs(std::sin(periods * std::acos(fp)));
    if (p.residual > opts.transparency_tol) {
      std::ostringstream os;
      os << "transparency point m = " << m << " in band " << band.index << " only reached |sin Nk| = " << p.residual;
      raise(ErrorCode::refinement, os.str());
    }
    out.push_back(p);
  }
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.omega < y.omega; });
  return out;
}

GapDecayFit gap_decay_fit(const PotentialSpec& spec, double omega, const std::vector<int>& periods,
                          const ScatterOptions& opts) {
  const Mat2 m = monodromy(Frequency{omega}, spec, opts.spectrum.transfer);
  const DispersionSample s = bloch_k(Frequency{omega}, m, spec, opts.spectrum);
  if (s.regime != Regime::gap) {
    std::ostringstream os;
    os << "omega = " << omega << " is not in a gap (F = " << s.F.real() << ")";
    raise(ErrorCode::domain, os.str());
  }
  GapDecayFit fit;
  fit.omega = omega;
  fit.im_k = s.k.imag();

  const double excess = hs_norm_sq(m) - 2.0;
  std::vector<double> xs, ys;
  for (int n : periods) {
    if (n < 1) raise(ErrorCode::domain, "period count must be >= 1");
    double t_sq = 0.0;
    try {
      const cplx u = chebyshev_u(m.half_trace(), n - 1);
      t_sq = 4.0 / (excess * std::norm(u) + 4.0);
    } catch (const Error&) {
      t_sq = 0.0;
    }
    if (!(t_sq > 1e-300)) {
      fit.warnings.push_back("|t_N| underflows at N = " + std::to_string(n) + "; dropped");
      continue;
    }
    xs.push_back(n);
    ys.push_back(0.5 * std::log(t_sq));
    fit.periods_used.push_back(n);
  }
  if (xs.size() < 2) raise(ErrorCode::domain, "gap decay fit needs at least two usable period counts");

  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (!(sxx > 0.0)) raise(ErrorCode::domain, "gap decay fit needs distinct period counts");
  const double slope = sxy / sxx;
  double ss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double e = ys[i] - (my + slope * (xs[i] - mx));
    ss += e * e;
  }
  fit.sigma = -slope;
  fit.fit_residual = std::sqrt(ss / n);
  return fit;
}

}  // namespace tslab
