#pragma once

#include <array>
#include <string>
#include <vector>

#include "tslab/mat2.hpp"
#include "tslab/potential.hpp"
#include "tslab/transfer.hpp"

namespace tslab {

enum class Regime { band, gap, edge };
const char* to_string(Regime r) noexcept;

/// Classification of a band end. `range_limit` marks an end that is only the
/// boundary of the scanned frequency window.
enum class EdgeKind { nondegenerate, degenerate, range_limit };
const char* to_string(EdgeKind k) noexcept;

struct SpectrumOptions {
  TransferOptions transfer;
  double edge_tol = 1e-9;          // ||F| - 1| below this counts as an edge
  double tol_mat = 1e-6;           // distance of M from +-I at a degenerate edge
  double tol_der_rel = 1e-6;       // derivative threshold relative to the local F' scale
  double deriv_step_rel = 1e-4;    // first Richardson step, relative to omega
  double interior_margin = 1e-6;   // group velocity needs |F| < 1 - margin
  double weyl_tol = 1e-8;
  std::array<double, 3> nudges{1e-4, 1e-6, 1e-8};
  double bisect_rel = 1e-12;
};

struct DispersionSample {
  cplx omega;
  cplx F;
  cplx k;       // Bloch phase per period, e^{ik} = mu_plus
  cplx mu_plus; // |mu_plus| <= 1
  Regime regime;
};

struct Band {
  int index = 0;
  double lo = 0.0;
  double hi = 0.0;
  EdgeKind lo_class = EdgeKind::nondegenerate;
  EdgeKind hi_class = EdgeKind::nondegenerate;

  double width() const noexcept { return hi - lo; }
};

struct BandScan {
  std::vector<Band> bands;
  /// Intervals where a band or gap was narrower than two grid cells.
  std::vector<std::array<double, 2>> under_resolved;
  std::vector<std::string> warnings;
};

struct EdgeClassification {
  EdgeKind kind = EdgeKind::nondegenerate;
  double F = 0.0;
  double F_prime = 0.0;
  double F_double_prime = 0.0;
  double monodromy_dist_to_pm_identity = 0.0;
  double derivative_threshold = 0.0;
};

struct GroupVelocitySample {
  double omega = 0.0;
  double k_prime = 0.0;
  double group_velocity = 0.0;
};

struct WeylPair {
  cplx m_plus;
  cplx m_minus;
};

/// F and its first two omega-derivatives (central differences, two Richardson levels).
struct DiscriminantJet {
  double F = 0.0;
  double F1 = 0.0;
  double F2 = 0.0;
};

cplx discriminant(Frequency omega, const PotentialSpec& spec, const SpectrumOptions& opts = {});

DiscriminantJet discriminant_jet(double omega, const PotentialSpec& spec, const SpectrumOptions& opts = {});

/// Bloch phase on the physical branch: Im k > 0 above the real axis, and on
/// the real axis the limit from above.
DispersionSample bloch_k(Frequency omega, const PotentialSpec& spec, const SpectrumOptions& opts = {});

/// The same selection on an already computed monodromy.
DispersionSample bloch_k(Frequency omega, const Mat2& monodromy, const PotentialSpec& spec,
                         const SpectrumOptions& opts = {});

/// Bands of |F| <= 1 in [omega_lo, omega_hi] from a uniform grid, densified
/// near n*pi/L where large contrasts make bands narrow.
BandScan find_bands(const PotentialSpec& spec, double omega_lo, double omega_hi, int grid,
                    const SpectrumOptions& opts = {});

EdgeClassification classify_edge(const PotentialSpec& spec, double omega_edge, const SpectrumOptions& opts = {});

GroupVelocitySample group_velocity(double omega, const PotentialSpec& spec, const SpectrumOptions& opts = {});

/// L / sqrt|F''| at a degenerate edge.
double degenerate_edge_velocity(const PotentialSpec& spec, double omega0, const SpectrumOptions& opts = {});

WeylPair weyl_functions(Frequency omega, const PotentialSpec& spec, const SpectrumOptions& opts = {});

}  // namespace tslab
