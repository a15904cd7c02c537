#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "tslab/mat2.hpp"
#include "tslab/potential.hpp"
#include "tslab/scattering.hpp"

namespace tslab {

/// exp(1 - 1/(1 - (2s + 1)^2)) on (-1, 0), zero elsewhere; peak value 1 at s = -1/2.
double bump_envelope(double s);

/// Pulse u0(x) = B^{-1/2} alpha(x/B) e^{i w0 x} launched at a delta comb
/// occupying [0, N L]. Only delta terms are supported; they are lumped onto
/// single grid nodes.
struct PulseConfig {
  PotentialSpec spec = make_single_delta_comb(100.0, 1.0);
  int band = 1;
  double theta = 2.0;
  int periods = 3;
  double width = 0.0;          // B; <= 0 selects A^1.2
  int cells_per_period = 32;   // h = L / M
  double cfl = 0.9;
  double t_end = 0.0;          // <= 0 selects B + NL + 20 A L
  double margin = 8.0;         // extra room beyond the light cone on both sides
  double x_min = 0.0;          // explicit domain; used only when x_min < x_max
  double x_max = 0.0;
  double sample_dt = 1.0;      // spacing of the energy time series
  bool mirror_reference = true;
  std::string snapshot_path;   // when set, the final field is written there
  std::function<double(double)> envelope = bump_envelope;
};

/// The resolved numbers behind a PulseConfig.
struct Discretization {
  double amplitude = 0.0;  // largest |scaled delta strength|
  double omega0 = 0.0;
  double width = 0.0;
  double t_end = 0.0;
  double h = 0.0;
  double dt = 0.0;
  double x0 = 0.0;             // position of node 0
  std::size_t size = 0;
  std::size_t origin = 0;      // node at x = 0
  std::size_t slab_end = 0;    // node at x = NL
  std::vector<std::size_t> delta_nodes;
  std::vector<double> delta_strengths;  // scaled strengths A_m; node potential is A_m / h
  double transit_time = 0.0;   // A N L^2 / (n pi sqrt(4 theta - theta^2))

  double x(std::size_t i) const { return x0 + h * static_cast<double>(i); }
};

Discretization discretize(const PulseConfig& cfg);

/// u0 evaluated at x.
cplx initial_profile(const PulseConfig& cfg, const Discretization& d, double x);

/// Two consecutive time levels of the complex field.
struct FieldState {
  std::vector<cplx> prev;
  std::vector<cplx> curr;
  double t = 0.0;
  long steps = 0;
};

/// Levels u(x, -dt) = u0(x + dt) and u(x, 0) = u0(x).
FieldState make_initial_pulse(const PulseConfig& cfg, const Discretization& d);

/// One leapfrog step with hard walls at both ends.
void step(FieldState& state, const Discretization& d);

struct EnergySample {
  double t = 0.0;
  double total = 0.0;
  double left = 0.0;   // x < 0
  double slab = 0.0;   // 0 <= x <= NL, including the delta terms
  double right = 0.0;  // x > NL
};

/// Centered energy at the current level of `state`.
EnergySample total_energy(const FieldState& state, const Discretization& d);

struct PulseReport {
  Discretization grid;
  std::vector<EnergySample> series;
  double initial_energy = 0.0;
  double max_relative_drift = 0.0;
  double reflected_fraction = 0.0;
  double inside_fraction = 0.0;
  double transmitted_fraction = 0.0;
  double pre_transit_time = 0.0;
  double pre_transit_right_fraction = 0.0;
  double g_gradient_energy = 0.0;  // integral of |g'|^2 over x < 0 at t_end
  std::string regime;
};

/// Runs to t_end. Throws a stability error on blow-up and a domain-size
/// error if the field reaches a wall.
PulseReport run(const PulseConfig& cfg);

struct OracleResult {
  double transmitted = 0.0;
  double total = 0.0;
  double fraction = 0.0;
};

/// Transmitted energy predicted from |t_N(w)|^2 and the pulse spectrum.
OracleResult freq_domain_oracle(const PulseConfig& cfg, const ScatterOptions& opts = {});

/// Raw snapshot: header (uint64 size, float64 h, float64 t, float64 x0), then
/// size pairs of little-endian float64 (re, im).
void write_snapshot(const std::string& path, const FieldState& state, const Discretization& d);

}  // namespace tslab
