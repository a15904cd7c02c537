#include "tslab/transfer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace tslab {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// b - b*, the embedded fourth-order error weights (b7 of the FSAL stage is -1/40).
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

// Right-hand side K(x) P with K = [[0, w], [(q - w^2)/w, 0]]. The
// propagator is kept as rows (a, b), (c, d).
struct Rhs {
  cplx omega;
  double amplitude;
  const SmoothPiece* piece;

  Mat2 operator()(double x, const Mat2& p) const {
    const cplx g = (amplitude * (*piece)(x) - omega * omega) / omega;
    return {omega * p.c, omega * p.d, g * p.a, g * p.b};
  }
};

Mat2 axpy(const Mat2& y, double h, std::initializer_list<std::pair<double, const Mat2*>> terms) {
  Mat2 out = y;
  for (const auto& [w, k] : terms) {
    const cplx s = h * w;
    out.a += s * k->a;
    out.b += s * k->b;
    out.c += s * k->c;
    out.d += s * k->d;
  }
  return out;
}

struct StepResult {
  Mat2 y5;
  Mat2 err;
};

StepResult dopri_step(const Rhs& f, double x, const Mat2& y, double h) {
  const Mat2 k1 = f(x, y);
  const Mat2 k2 = f(x + c2 * h, axpy(y, h, {{a21, &k1}}));
  const Mat2 k3 = f(x + c3 * h, axpy(y, h, {{a31, &k1}, {a32, &k2}}));
  const Mat2 k4 = f(x + c4 * h, axpy(y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
  const Mat2 k5 = f(x + c5 * h, axpy(y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
  const Mat2 k6 = f(x + h, axpy(y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
  const Mat2 y5 = axpy(y, h, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
  const Mat2 k7 = f(x + h, y5);
  const Mat2 err = axpy(Mat2{0.0, 0.0, 0.0, 0.0}, h,
                        {{e1, &k1}, {e3, &k3}, {e4, &k4}, {e5, &k5}, {e6, &k6}, {e7, &k7}});
  return {y5, err};
}

double error_norm(const Mat2& err, const Mat2& y0, const Mat2& y1, const TransferOptions& o) {
  const std::array<cplx, 4> e{err.a, err.b, err.c, err.d};
  const std::array<cplx, 4> u{y0.a, y0.b, y0.c, y0.d};
  const std::array<cplx, 4> v{y1.a, y1.b, y1.c, y1.d};
  // Scale by the largest entry so that a passing zero of one entry does not
  // force tiny steps. The matrix is unimodular, so its norm is the natural scale.
  double scale = 0.0;
  for (int i = 0; i < 4; ++i) scale = std::max({scale, std::abs(u[i]), std::abs(v[i])});
  double n = 0.0;
  for (int i = 0; i < 4; ++i) n = std::max(n, std::abs(e[i]) / (o.atol + o.rtol * scale));
  return n;
}

void guard(const Mat2& m, const TransferOptions& o) {
  const double s = m.max_abs();
  if (!(s <= o.overflow_limit)) {
    std::ostringstream os;
    os << "propagator entry magnitude " << s << " exceeds " << o.overflow_limit;
    raise(ErrorCode::scale_exceeded, os.str());
  }
}

// Adaptive sweep over [x0, x1] inside one smooth piece. Returns the propagator
// and, if requested, the accepted step nodes (including both ends).
Mat2 integrate_adaptive(const Rhs& f, double x0, double x1, const TransferOptions& o,
                        std::vector<double>* nodes) {
  Mat2 y = Mat2::identity();
  if (x1 <= x0) return y;
  const double len = x1 - x0;
  const double qmax = std::abs(f.amplitude) *
                      std::max({std::abs((*f.piece)(x0)), std::abs((*f.piece)(0.5 * (x0 + x1))),
                                std::abs((*f.piece)(x1))});
  const double rate = std::abs(f.omega) + std::sqrt(qmax) + qmax / std::abs(f.omega);
  double h = std::min(len, 0.05 / std::max(rate, 1e-12));
  double x = x0;
  if (nodes) nodes->push_back(x0);
  long steps = 0;
  double last_err = 0.0;
  while (x < x1) {
    if (++steps > o.max_steps) {
      std::ostringstream os;
      os << "integrator exceeded " << o.max_steps << " steps at x = " << x << " (last error estimate "
         << last_err * o.rtol << ")";
      raise(ErrorCode::accuracy, os.str());
    }
    const bool last = x + h >= x1 - 1e-14 * len;
    const double step = last ? x1 - x : h;
    const StepResult r = dopri_step(f, x, y, step);
    const double err = error_norm(r.err, y, r.y5, o);
    if (!std::isfinite(err)) {
      guard(r.y5, o);
      raise(ErrorCode::accuracy, "integrator produced a non-finite error estimate");
    }
    if (err <= 1.0) {
      x = last ? x1 : x + step;
      y = r.y5;
      guard(y, o);
      if (nodes) nodes->push_back(x);
      last_err = err;
    }
    const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
    h = step * factor;
    if (h < 1e-15 * len) {
      std::ostringstream os;
      os << "step size underflow at x = " << x << " (error estimate " << err * o.rtol << ")";
      raise(ErrorCode::accuracy, os.str());
    }
  }
  return y;
}

Mat2 integrate_fixed(const Rhs& f, const std::vector<double>& nodes, const TransferOptions& o) {
  Mat2 y = Mat2::identity();
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    y = dopri_step(f, nodes[i - 1], y, nodes[i] - nodes[i - 1]).y5;
    guard(y, o);
  }
  return y;
}

// Integrator error leaves det slightly off 1, and powers of the monodromy
// amplify that by up to N^2. The correction is skipped when ad - bc itself
// suffers from cancellation.
Mat2 project(const Mat2& m, const TransferOptions& o) {
  if (!o.project_unimodular) return m;
  const double size = std::abs(m.a * m.d) + std::abs(m.b * m.c);
  if (!(size < 1e4)) return m;
  const cplx det = m.det();
  if (!(std::abs(det - 1.0) < 1e-3)) return m;
  const cplx s = 1.0 / std::sqrt(det);
  return {m.a * s, m.b * s, m.c * s, m.d * s};
}

struct Cell {
  double lo, hi;
  std::vector<double> jumps;
  int piece = -1;
};

// Splits [0, L] at every delta offset, piece boundary and table node.
std::vector<Cell> decompose(const PotentialSpec& spec) {
  const double L = spec.period();
  std::vector<double> cuts{0.0, L};
  for (const auto& d : spec.deltas()) cuts.push_back(d.offset);
  for (const auto& p : spec.smooth()) {
    cuts.push_back(p.lo);
    cuts.push_back(p.hi);
  }
  for (double x : spec.breakpoints()) cuts.push_back(x);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::vector<Cell> cells;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    Cell c{cuts[i], cuts[i + 1], {}, -1};
    for (const auto& d : spec.deltas())
      if (d.offset == c.lo) c.jumps.push_back(d.strength);
    const double mid = 0.5 * (c.lo + c.hi);
    for (std::size_t j = 0; j < spec.smooth().size(); ++j)
      if (mid > spec.smooth()[j].lo && mid < spec.smooth()[j].hi) c.piece = static_cast<int>(j);
    cells.push_back(std::move(c));
  }
  return cells;
}

Mat2 cell_propagator(Frequency omega, const PotentialSpec& spec, int piece, double lo, double hi,
                     const TransferOptions& o, std::vector<double>* nodes) {
  if (piece < 0) return free_propagator(omega, hi - lo);
  const Rhs f{omega.value(), spec.amplitude(), &spec.smooth()[static_cast<std::size_t>(piece)]};
  return project(integrate_adaptive(f, lo, hi, o, nodes), o);
}

}  // namespace

Mat2 free_propagator(Frequency omega, double length) {
  if (length < 0.0) raise(ErrorCode::domain, "propagation length must be non-negative");
  const cplx phase = omega.value() * length;
  const cplx c = std::cos(phase), s = std::sin(phase);
  return {c, s, -s, c};
}

Mat2 delta_jump(Frequency omega, double strength) { return {1.0, 0.0, strength / omega.value(), 1.0}; }

Mat2 propagator(Frequency omega, const PotentialSpec& spec, double x0, double x1, const TransferOptions& opts) {
  const double L = spec.period();
  if (!(x0 >= 0.0 && x0 <= x1 && x1 <= L)) raise(ErrorCode::domain, "propagator needs 0 <= x0 <= x1 <= L");
  Mat2 t = Mat2::identity();
  for (const Cell& c : decompose(spec)) {
    if (c.lo >= x1) break;
    const double lo = std::max(c.lo, x0), hi = std::min(c.hi, x1);
    if (c.lo >= x0)
      for (double s : c.jumps) t = delta_jump(omega, spec.amplitude() * s) * t;
    if (hi > lo) t = cell_propagator(omega, spec, c.piece, lo, hi, opts, nullptr) * t;
    guard(t, opts);
  }
  return t;
}

Mat2 smooth_propagator(Frequency omega, const PotentialSpec& spec, double x0, double x1,
                       const TransferOptions& opts) {
  for (const auto& d : spec.deltas())
    if (d.offset > x0 && d.offset < x1) raise(ErrorCode::domain, "smooth propagator interval contains a delta");
  const double L = spec.period();
  if (!(x0 >= 0.0 && x0 <= x1 && x1 <= L)) raise(ErrorCode::domain, "propagator needs 0 <= x0 <= x1 <= L");
  Mat2 t = Mat2::identity();
  for (const Cell& c : decompose(spec)) {
    const double lo = std::max(c.lo, x0), hi = std::min(c.hi, x1);
    if (hi > lo) t = cell_propagator(omega, spec, c.piece, lo, hi, opts, nullptr) * t;
  }
  return t;
}

Mat2 monodromy(Frequency omega, const PotentialSpec& spec, const TransferOptions& opts) {
  Mat2 t = Mat2::identity();
  for (const Cell& c : decompose(spec)) {
    for (double s : c.jumps) t = delta_jump(omega, spec.amplitude() * s) * t;
    t = cell_propagator(omega, spec, c.piece, c.lo, c.hi, opts, nullptr) * t;
    guard(t, opts);
  }
  return t;
}

std::pair<cplx, cplx> chebyshev_u_pair(cplx x, int m) {
  if (m < 0) return {0.0, 0.0};  // (U_{-1}, U_{-2}) is never needed past this point
  cplx prev = 0.0, curr = 1.0;  // U_{-1}, U_0
  const cplx two_x = 2.0 * x;
  for (int j = 0; j < m; ++j) {
    const cplx next = two_x * curr - prev;
    prev = curr;
    curr = next;
  }
  if (!(std::abs(curr) <= 1e300)) raise(ErrorCode::scale_exceeded, "Chebyshev value overflow");
  return {curr, prev};
}

cplx chebyshev_u(cplx x, int m) {
  if (m == -1) return 0.0;
  return chebyshev_u_pair(x, m).first;
}

Mat2 monodromy_power(const Mat2& m, cplx half_trace, int periods) {
  if (periods < 1) raise(ErrorCode::domain, "period count must be >= 1");
  const auto [u1, u2] = chebyshev_u_pair(half_trace, periods - 1);
  return {u1 * m.a - u2, u1 * m.b, u1 * m.c, u1 * m.d - u2};
}

Mat2 transfer_over_slab(Frequency omega, const PotentialSpec& spec, int periods, const TransferOptions& opts) {
  const Mat2 m = monodromy(omega, spec, opts);
  const Mat2 out = monodromy_power(m, m.half_trace(), periods);
  guard(out, opts);
  return out;
}

double hs_norm_sq(const Mat2& m) { return std::norm(m.a) + std::norm(m.b) + std::norm(m.c) + std::norm(m.d); }

FrozenMonodromy::FrozenMonodromy(const PotentialSpec& spec, Frequency reference, const TransferOptions& opts)
    : spec_(spec), opts_(opts) {
  for (auto& c : decompose(spec_)) {
    FrozenMonodromy::Cell fc{c.lo, c.hi, std::move(c.jumps), {}, c.piece};
    if (c.piece >= 0) cell_propagator(reference, spec_, c.piece, c.lo, c.hi, opts_, &fc.nodes);
    cells_.push_back(std::move(fc));
  }
}

Mat2 FrozenMonodromy::operator()(Frequency omega) const {
  Mat2 t = Mat2::identity();
  for (const Cell& c : cells_) {
    for (double s : c.jumps) t = delta_jump(omega, spec_.amplitude() * s) * t;
    if (c.piece < 0) {
      t = free_propagator(omega, c.hi - c.lo) * t;
    } else {
      const Rhs f{omega.value(), spec_.amplitude(), &spec_.smooth()[static_cast<std::size_t>(c.piece)]};
      t = project(integrate_fixed(f, c.nodes, opts_), opts_) * t;
    }
    guard(t, opts_);
  }
  return t;
}

}  // namespace tslab
