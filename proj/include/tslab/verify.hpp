#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "tslab/scattering.hpp"
#include "tslab/timedomain.hpp"

namespace tslab {

/// Pass thresholds of the acceptance suite. Each can be overridden as
/// verify.<field> from the command line.
struct VerifyTolerances {
  double det = 1e-8;
  double chebyshev = 1e-8;
  double reflection = 1e-9;
  double transmittance = 1e-10;
  double conservation = 1e-9;
  double tan_root = 1e-10;
  double edge_asymptotic_coeff = 10.0;    // |edge - pi (1 - 4/A)| < coeff / A^2
  double vg_bound_coeff = 5.0;            // max|V_g| <= (2 pi / A L)(1 + coeff / A)
  double vg_slope = 0.05;
  double identity = 1e-8;
  double degenerate_reflection = 1e-8;
  double degenerate_slope = 0.10;
  double transparency = 1e-8;
  double transparency_mid_coeff = 10.0;   // |t_N| at midpoints < coeff / A
  double decay_rel = 0.02;
  double edge_factor = 2.0;
  double geometric_ratio = 0.9;
  double semi_factor = 3.0;
  double drift = 1e-3;
  double oracle_rel = 0.10;
  double split_ratio_lo = 2.8;
  double split_ratio_hi = 5.7;
  double pre_transit = 1e-5;
  double time_scale = 1.0;                // multiplies every wall-clock limit
};

struct VerifyOptions {
  std::uint64_t seed = 20240611;
  VerifyTolerances tol;
  ScatterOptions numerics;
  PulseConfig pulse;              // spec and amplitude are set per run
  std::vector<int> only;          // empty runs every criterion
};

struct VerifyCheck {
  std::string name;
  double measured = 0.0;
  double bound = 0.0;
  std::string relation;  // how measured is compared with bound
  bool passed = false;
};

struct CriterionResult {
  int id = 0;
  std::string name;
  std::vector<VerifyCheck> checks;
  double seconds = 0.0;
  double time_limit = 0.0;
  bool passed = false;
  std::string error;  // set when the criterion threw
  std::vector<std::pair<std::string, double>> info;
};

struct VerifyReport {
  std::uint64_t seed = 0;
  std::vector<CriterionResult> criteria;
  bool all_passed() const;
};

VerifyReport run_verification(const VerifyOptions& opts = {},
                              const std::function<void(const CriterionResult&)>& progress = {});

std::string report_to_json(const VerifyReport& report);

/// One line per criterion: "PASS  3  formula cross-validation  (0.41 s)  ...".
std::string format_line(const CriterionResult& c);

}  // namespace tslab
