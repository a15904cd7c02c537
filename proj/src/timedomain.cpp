#include "tslab/timedomain.hpp"

#include <algorithm>
#include <atomic>
#include <barrier>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <sstream>
#include <thread>

#if defined(__SSE2__)
#include <immintrin.h>
#endif

#include "tslab/parallel.hpp"
#include "tslab/scattering.hpp"

namespace tslab {

namespace {

constexpr double pi = std::numbers::pi;

// Sum of term(i) over [lo, hi) with a fixed pairwise tree.
template <class Term>
double pairwise(std::size_t lo, std::size_t hi, const Term& term) {
  if (hi <= lo) return 0.0;
  if (hi - lo <= 64) {
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += term(i);
    return s;
  }
  const std::size_t mid = lo + (hi - lo) / 2;
  return pairwise(lo, mid, term) + pairwise(mid, hi, term);
}

// Free leapfrog update of nodes [lo, hi) of a field with walls at 0 and size - 1.
void leapfrog(cplx* next, const cplx* curr, const cplx* prev, std::size_t size, std::size_t lo, std::size_t hi,
              double r2) {
  hi = std::min(hi, size);
  if (lo >= hi) return;
  if (lo == 0) next[lo++] = 0.0;
  if (hi == size) next[--hi] = 0.0;
  // complex values are stored as adjacent (re, im) doubles
  double* nx = reinterpret_cast<double*>(next);
  const double* c = reinterpret_cast<const double*>(curr);
  const double* p = reinterpret_cast<const double*>(prev);
  const double centre = 2.0 - 2.0 * r2;
  for (std::size_t j = 2 * lo; j < 2 * hi; ++j) nx[j] = centre * c[j] - p[j] + r2 * (c[j + 2] + c[j - 2]);
}

void apply_deltas(cplx* next, const cplx* curr, const Discretization& d, std::size_t lo, std::size_t hi) {
  const double k = d.dt * d.dt / d.h;
  for (std::size_t m = 0; m < d.delta_nodes.size(); ++m) {
    const std::size_t i = d.delta_nodes[m];
    if (i >= lo && i < hi) next[i] -= k * d.delta_strengths[m] * curr[i];
  }
}

EnergySample energy_of(const cplx* prev, const cplx* curr, const cplx* next, const Discretization& d, double t) {
  const double h = d.h, inv2dt = 0.5 / d.dt;
  const std::size_t n = d.size;
  auto kinetic = [&](std::size_t i) { return h * std::norm((next[i] - prev[i]) * inv2dt); };
  auto gradient = [&](std::size_t i) { return std::norm(curr[i + 1] - curr[i]) / h; };
  EnergySample e;
  e.t = t;
  e.left = pairwise(0, d.origin, kinetic) + pairwise(0, d.origin, gradient);
  e.slab = pairwise(d.origin, d.slab_end + 1, kinetic) + pairwise(d.origin, d.slab_end, gradient);
  for (std::size_t m = 0; m < d.delta_nodes.size(); ++m)
    e.slab += d.delta_strengths[m] * std::norm(curr[d.delta_nodes[m]]);
  e.right = pairwise(d.slab_end + 1, n, kinetic) + pairwise(d.slab_end, n - 1, gradient);
  e.total = e.left + e.slab + e.right;
  return e;
}

double max_abs(const std::vector<cplx>& u) {
  double m = 0.0;
  for (const cplx& z : u) m = std::max(m, std::abs(z));
  return m;
}

std::string describe_regime(const Discretization& d, int periods) {
  std::ostringstream os;
  os.precision(3);
  if (d.amplitude <= 1.0) {
    os << "weak coupling (A <= 1); no large-A asymptotics apply";
    return os.str();
  }
  const double la = std::log(d.amplitude);
  const double eps = std::log(d.width) / la - 1.0;
  const double gamma = std::log(static_cast<double>(periods)) / la;
  os << "B = A^" << 1.0 + eps << ", N = A^" << gamma << "; ";
  if (gamma > eps)
    os << "N grows faster than B/A (gamma > epsilon)";
  else
    os << "desk scale: gamma <= epsilon, so the slab is shorter than the large-A theory assumes";
  return os.str();
}

// The field ahead of the wave front decays into subnormal numbers, which are
// very slow on x86; flush them to zero while stepping.
class FlushDenormals {
 public:
#if defined(__SSE2__)
  FlushDenormals() : saved_(_mm_getcsr()) { _mm_setcsr(saved_ | 0x8040); }
  ~FlushDenormals() { _mm_setcsr(saved_); }

 private:
  unsigned saved_;
#endif
};

void put_le(std::ofstream& out, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}

void put_le(std::ofstream& out, double v) { put_le(out, std::bit_cast<std::uint64_t>(v)); }

}  // namespace

double bump_envelope(double s) {
  if (!(s > -1.0 && s < 0.0)) return 0.0;
  const double y = 2.0 * s + 1.0;
  return std::exp(1.0 - 1.0 / (1.0 - y * y));
}

Discretization discretize(const PulseConfig& cfg) {
  const PotentialSpec& spec = cfg.spec;
  if (!spec.smooth().empty()) raise(ErrorCode::configuration, "pulse simulation supports delta terms only");
  if (cfg.periods < 1) raise(ErrorCode::configuration, "pulse needs N >= 1");
  if (cfg.band < 1) raise(ErrorCode::configuration, "band index must be >= 1");
  if (!(cfg.theta > 0.0 && cfg.theta < 4.0)) raise(ErrorCode::configuration, "theta must lie in (0, 4)");
  if (cfg.cells_per_period < 2) raise(ErrorCode::configuration, "need at least 2 cells per period");
  if (!(cfg.cfl > 0.0 && cfg.cfl <= 1.0)) raise(ErrorCode::configuration, "cfl factor must lie in (0, 1]");
  if (!(cfg.sample_dt > 0.0)) raise(ErrorCode::configuration, "sample spacing must be positive");
  if (!cfg.envelope) raise(ErrorCode::configuration, "pulse envelope is missing");
  for (double s : {1e-3, 0.25, 0.5, 1.0})
    if (cfg.envelope(s) != 0.0) raise(ErrorCode::configuration, "pulse support overlaps the slab: envelope nonzero for s > 0");

  Discretization d;
  const double L = spec.period();
  const int M = cfg.cells_per_period;
  const double NL = L * cfg.periods;
  d.h = L / M;
  d.amplitude = spec.contrast();
  const double A = d.amplitude;

  std::vector<std::pair<int, double>> cell_deltas;
  for (std::size_t i = 0; i < spec.deltas().size(); ++i) {
    const double pos = spec.deltas()[i].offset * M / L;
    const double node = std::round(pos);
    if (std::abs(pos - node) > 1e-9 * M)
      raise(ErrorCode::configuration, "delta offsets must fall on grid nodes (offset * M / L integer)");
    cell_deltas.emplace_back(static_cast<int>(node), spec.scaled_strength(i));
  }

  d.omega0 = cfg.band * pi / L * (A > 0.0 ? 1.0 - cfg.theta / (A * L) : 1.0);
  if (!(d.omega0 > 0.0)) raise(ErrorCode::configuration, "carrier frequency is not positive; increase A");
  if (cfg.width > 0.0)
    d.width = cfg.width;
  else if (A > 0.0)
    d.width = std::pow(A, 1.2);
  else
    raise(ErrorCode::configuration, "pulse width must be given when A = 0");
  const double B = d.width;
  d.t_end = cfg.t_end > 0.0 ? cfg.t_end : B + NL + 20.0 * std::max(A, 1.0) * L;
  d.dt = cfg.cfl * d.h / std::sqrt(1.0 + A * d.h / 4.0);
  d.transit_time = A > 0.0 ? A * cfg.periods * L * L / (cfg.band * pi * std::sqrt(4.0 * cfg.theta - cfg.theta * cfg.theta)) : NL;

  double lo = -B - d.t_end - cfg.margin, hi = NL + d.t_end + cfg.margin;
  if (cfg.x_min < cfg.x_max) {
    lo = cfg.x_min;
    hi = cfg.x_max;
  }
  if (!(lo < -B) || !(hi > NL)) raise(ErrorCode::configuration, "domain must contain the pulse support and the slab");

  const auto left_cells = static_cast<std::size_t>(std::ceil(-lo / d.h));
  const auto right_cells = static_cast<std::size_t>(std::ceil((hi - NL) / d.h));
  d.origin = left_cells;
  d.slab_end = d.origin + static_cast<std::size_t>(M) * static_cast<std::size_t>(cfg.periods);
  d.size = d.slab_end + right_cells + 1;
  d.x0 = -static_cast<double>(left_cells) * d.h;
  for (int n = 0; n < cfg.periods; ++n)
    for (const auto& [node, s] : cell_deltas) {
      d.delta_nodes.push_back(d.origin + static_cast<std::size_t>(n * M + node));
      d.delta_strengths.push_back(s);
    }
  return d;
}

cplx initial_profile(const PulseConfig& cfg, const Discretization& d, double x) {
  const double a = cfg.envelope(x / d.width);
  if (a == 0.0) return 0.0;
  return a / std::sqrt(d.width) * std::polar(1.0, d.omega0 * x);
}

FieldState make_initial_pulse(const PulseConfig& cfg, const Discretization& d) {
  FieldState s;
  s.prev.assign(d.size, 0.0);
  s.curr.assign(d.size, 0.0);
  for (std::size_t i = 1; i + 1 < d.size; ++i) {
    s.curr[i] = initial_profile(cfg, d, d.x(i));
    s.prev[i] = initial_profile(cfg, d, d.x(i) + d.dt);
  }
  return s;
}

void step(FieldState& state, const Discretization& d) {
  std::vector<cplx> next(d.size);
  const double r2 = (d.dt / d.h) * (d.dt / d.h);
  leapfrog(next.data(), state.curr.data(), state.prev.data(), d.size, 0, d.size, r2);
  apply_deltas(next.data(), state.curr.data(), d, 0, d.size);
  state.prev = std::move(state.curr);
  state.curr = std::move(next);
  state.t += d.dt;
  ++state.steps;
}

EnergySample total_energy(const FieldState& state, const Discretization& d) {
  FieldState ahead = state;
  step(ahead, d);
  return energy_of(state.prev.data(), state.curr.data(), ahead.curr.data(), d, state.t);
}

PulseReport run(const PulseConfig& cfg) {
  const Discretization d = discretize(cfg);
  PulseReport rep;
  rep.grid = d;
  rep.regime = describe_regime(d, cfg.periods);
  rep.pre_transit_time = 0.5 * d.transit_time;

  const FieldState init = make_initial_pulse(cfg, d);
  const std::size_t n = d.size;
  std::vector<cplx> buf[3] = {init.prev, init.curr, std::vector<cplx>(n)};
  const std::size_t mn = cfg.mirror_reference ? d.origin + 1 : 0;
  std::vector<cplx> mirror[3];
  for (int j = 0; j < 3; ++j) mirror[j].assign(mn, 0.0);
  for (std::size_t i = 0; i + 1 < mn; ++i) {
    mirror[0][i] = init.prev[i];
    mirror[1][i] = init.curr[i];
  }

  const long total_steps = static_cast<long>(std::ceil(d.t_end / d.dt));
  const long sample_every = std::max(1L, static_cast<long>(std::llround(cfg.sample_dt / d.dt)));
  const long pre_step = static_cast<long>(std::llround(rep.pre_transit_time / d.dt));
  const double r2 = (d.dt / d.h) * (d.dt / d.h);
  const unsigned workers = std::max(1u, std::min<unsigned>(thread_count(), static_cast<unsigned>(n / 20000 + 1)));

  long level = 0;  // index of the current level (t = level * dt)
  double norm_ref = max_abs(init.curr);
  bool have_pre = false;
  std::atomic<bool> stop{false};
  std::exception_ptr failure;
  const double wall_tol = 1e-12 * std::max(norm_ref, 1e-300);

  // After step s, buffers hold levels s-1, s, s+1 at (s % 3), ((s+1) % 3), ((s+2) % 3).
  auto bookkeeping = [&]() noexcept {
    try {
      const long s = level;
      const cplx* p = buf[s % 3].data();
      const cplx* c = buf[(s + 1) % 3].data();
      const cplx* nx = buf[(s + 2) % 3].data();
      const double t = static_cast<double>(s) * d.dt;
      if (s % sample_every == 0 || s == pre_step) {
        const EnergySample e = energy_of(p, c, nx, d, t);
        if (s == 0) rep.initial_energy = e.total;
        if (s % sample_every == 0) rep.series.push_back(e);
        if (s == pre_step && !have_pre) {
          rep.pre_transit_right_fraction = e.right / rep.initial_energy;
          have_pre = true;
        }
        rep.max_relative_drift = std::max(rep.max_relative_drift, std::abs(e.total - rep.initial_energy) / rep.initial_energy);
        double edge = 0.0;
        for (std::size_t k = 1; k < 5 && k < n; ++k) edge = std::max({edge, std::abs(c[k]), std::abs(c[n - 1 - k])});
        if (edge > wall_tol) {
          std::ostringstream os;
          os << "field reached a wall at t = " << t << " (|u| = " << edge << "); enlarge the domain";
          raise(ErrorCode::domain_size, os.str());
        }
      }
      if (s > 0 && s % 100 == 0) {
        double m = 0.0;
        for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(c[i]));
        if (!std::isfinite(m) || m > 10.0 * norm_ref) {
          std::ostringstream os;
          os << "field grew by more than 10x over 100 steps at t = " << t << "; dt = " << d.dt
             << " must satisfy dt <= h / sqrt(1 + A h / 4) = " << d.h / std::sqrt(1.0 + d.amplitude * d.h / 4.0);
          raise(ErrorCode::stability, os.str());
        }
        norm_ref = std::max(m, 1e-300);
      }
      ++level;
      if (level >= total_steps) stop = true;
    } catch (...) {
      failure = std::current_exception();
      stop = true;
    }
  };

  std::barrier sync(static_cast<std::ptrdiff_t>(workers), bookkeeping);
  auto worker = [&](unsigned w) {
    const FlushDenormals ftz;
    const std::size_t lo = n * w / workers, hi = n * (w + 1) / workers;
    const std::size_t mlo = mn * w / workers, mhi = mn * (w + 1) / workers;
    while (!stop.load()) {
      const long s = level;
      // advance from level s to s + 1: prev = s - 1, curr = s, next = s + 1
      cplx* nx = buf[(s + 2) % 3].data();
      const cplx* c = buf[(s + 1) % 3].data();
      const cplx* p = buf[s % 3].data();
      leapfrog(nx, c, p, n, lo, hi, r2);
      apply_deltas(nx, c, d, lo, hi);
      if (mn > 0) leapfrog(mirror[(s + 2) % 3].data(), mirror[(s + 1) % 3].data(), mirror[s % 3].data(), mn, mlo, mhi, r2);
      sync.arrive_and_wait();
    }
  };
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(worker, w);
    worker(0);
  }
  if (failure) std::rethrow_exception(failure);

  // The last bookkeeping call advanced `level` to total_steps; the current field is buf[(level + 1) % 3].
  const std::vector<cplx>& u = buf[(level + 1) % 3];
  const FieldState last{buf[level % 3], u, static_cast<double>(level) * d.dt, level};
  const EnergySample fin = total_energy(last, d);
  rep.series.push_back(fin);
  rep.max_relative_drift = std::max(rep.max_relative_drift, std::abs(fin.total - rep.initial_energy) / rep.initial_energy);
  rep.reflected_fraction = fin.left / rep.initial_energy;
  rep.inside_fraction = fin.slab / rep.initial_energy;
  rep.transmitted_fraction = fin.right / rep.initial_energy;
  if (!have_pre) rep.pre_transit_right_fraction = std::nan("");
  if (!cfg.snapshot_path.empty()) write_snapshot(cfg.snapshot_path, last, d);

  if (mn > 0) {
    const std::vector<cplx>& ref = mirror[(level + 1) % 3];
    rep.g_gradient_energy = pairwise(0, d.origin, [&](std::size_t i) {
      return std::norm((u[i + 1] - ref[i + 1]) - (u[i] - ref[i])) / d.h;
    });
  } else {
    rep.g_gradient_energy = std::nan("");
  }
  return rep;
}

OracleResult freq_domain_oracle(const PulseConfig& cfg, const ScatterOptions& opts) {
  const Discretization d = discretize(cfg);
  const double B = d.width, w0 = d.omega0;

  // The envelope is smooth and flat at both ends, so the trapezoid rule converges spectrally.
  constexpr int nodes = 4096;
  std::vector<double> a(nodes + 1);
  for (int j = 0; j <= nodes; ++j) a[static_cast<std::size_t>(j)] = cfg.envelope(-1.0 + static_cast<double>(j) / nodes);
  auto spectrum_sq = [&](double xi) {
    const cplx rot = std::polar(1.0, -xi / nodes);
    cplx z = std::polar(1.0, xi);  // e^{-i xi s} at s = -1
    cplx acc = 0.0;
    for (int j = 0; j <= nodes; ++j) {
      acc += a[static_cast<std::size_t>(j)] * z;
      z *= rot;
    }
    return std::norm(acc / static_cast<double>(nodes));
  };

  const double peak = spectrum_sq(0.0);
  double xi_max = 10.0;
  while (xi_max < 4000.0 && std::max(spectrum_sq(xi_max), spectrum_sq(-xi_max)) > 1e-18 * peak) xi_max *= 1.25;
  const double xi_lo = std::max(-xi_max, -B * w0 * (1.0 - 1e-6));

  auto integrate = [&](double dxi, double& trans, double& total, double& trans2, double& total2) {
    const auto cells = static_cast<std::size_t>(std::ceil((xi_max - xi_lo) / dxi / 4.0)) * 4;
    const double hx = (xi_max - xi_lo) / static_cast<double>(cells);
    std::vector<double> ft(cells + 1), fe(cells + 1);
    parallel_for(cells + 1, [&](std::size_t i) {
      const double xi = xi_lo + hx * static_cast<double>(i);
      const double w = w0 + xi / B;
      const double e = 2.0 * w * w * spectrum_sq(xi) / (2.0 * pi);
      fe[i] = e;
      ft[i] = d.amplitude > 0.0 ? e * transmittance_formula(w, cfg.spec, cfg.periods, opts) : e;
    });
    auto simpson = [&](const std::vector<double>& f, std::size_t stride) {
      double s = f.front() + f.back();
      for (std::size_t i = stride; i < cells; i += stride) s += ((i / stride) % 2 ? 4.0 : 2.0) * f[i];
      return s * hx * static_cast<double>(stride) / 3.0;
    };
    trans = simpson(ft, 1);
    total = simpson(fe, 1);
    trans2 = simpson(ft, 2);
    total2 = simpson(fe, 2);
  };

  double dxi = 0.05;
  for (int level = 0; level < 4; ++level, dxi *= 0.5) {
    double t1, e1, t2, e2;
    integrate(dxi, t1, e1, t2, e2);
    if (std::abs(t1 - t2) <= 1e-6 * e1 && std::abs(e1 - e2) <= 1e-8 * e1) return {t1, e1, t1 / e1};
  }
  raise(ErrorCode::accuracy, "frequency-domain quadrature did not converge");
}

void write_snapshot(const std::string& path, const FieldState& state, const Discretization& d) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(ErrorCode::configuration, "cannot open snapshot file " + path);
  put_le(out, static_cast<std::uint64_t>(state.curr.size()));
  put_le(out, d.h);
  put_le(out, state.t);
  put_le(out, d.x0);
  for (const cplx& z : state.curr) {
    put_le(out, z.real());
    put_le(out, z.imag());
  }
  if (!out) raise(ErrorCode::configuration, "failed writing snapshot " + path);
}

}  // namespace tslab
