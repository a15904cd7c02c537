#pragma once

#include <string>
#include <vector>

#include "tslab/mat2.hpp"
#include "tslab/potential.hpp"
#include "tslab/spectrum.hpp"

namespace tslab {

struct ScatterOptions {
  SpectrumOptions spectrum;
  double transparency_tol = 1e-9;  // required |sin Nk| at a transparency point
  double edge_sin_tol = 1e-6;      // |sin k| below this is treated as an edge
  double semi_tol = 1e-9;          // agreement of the two semi-infinite forms
};

/// Scattering data of the N-period slab. t multiplies e^{i w x} for x > NL.
struct ScatterResult {
  cplx omega;
  int periods = 0;
  cplx r;
  cplx t;
  /// | |r|^2 + |t|^2 - 1 |, NaN for complex omega.
  double conservation_defect = 0.0;
  /// 4 / (||T||^2 + 2), an independent value of |t|^2 for real omega.
  double t_sq_from_norm = 0.0;
};

struct SemiInfiniteResult {
  cplx omega;
  cplx r;
  cplx r_weyl;  // (i - m+)/(i + m+)
  cplx c;       // 1 + r
  cplx m_plus;
};

struct TransparencyPoint {
  double omega = 0.0;
  int band_index = 0;
  int m = 0;
  double residual = 0.0;  // |sin(N k)|
};

struct GapDecayFit {
  double omega = 0.0;
  double sigma = 0.0;
  double fit_residual = 0.0;  // RMS deviation of log|t_N| from the fitted line
  double im_k = 0.0;
  std::vector<int> periods_used;
  std::vector<std::string> warnings;
};

ScatterResult scatter_direct(Frequency omega, const PotentialSpec& spec, int periods, const ScatterOptions& opts = {});

/// r_N from the monodromy data and the Bloch phase: the cotangent form away
/// from edges, the Chebyshev form where sin k or sin Nk vanish.
cplx reflection_formula(Frequency omega, const PotentialSpec& spec, int periods, const ScatterOptions& opts = {});

/// |t_N|^2 = 4 / ((||M||^2 - 2) U_{N-1}(F)^2 + 4).
double transmittance_formula(double omega, const PotentialSpec& spec, int periods, const ScatterOptions& opts = {});

SemiInfiniteResult scatter_semi_infinite(Frequency omega, const PotentialSpec& spec, const ScatterOptions& opts = {});

/// Frequencies inside the band where sin(Nk) = 0 with sin k != 0, by
/// bisection on F = cos(m pi / N), m = 1..N-1.
std::vector<TransparencyPoint> transparency_points(const PotentialSpec& spec, const Band& band, int periods,
                                                   const ScatterOptions& opts = {});

GapDecayFit gap_decay_fit(const PotentialSpec& spec, double omega, const std::vector<int>& periods,
                          const ScatterOptions& opts = {});

}  // namespace tslab
