#pragma once

#include <string>
#include <variant>
#include <vector>

#include "tslab/potential.hpp"
#include "tslab/settings.hpp"
#include "tslab/spectrum.hpp"
#include "tslab/timedomain.hpp"

namespace tslab {

enum class Format { csv, json };

/// Column-oriented result of a sweep. Doubles print with 17 significant
/// digits; NaN prints as "nan" in CSV and null in JSON.
struct Table {
  using Value = std::variant<double, long, std::string>;
  std::vector<std::string> columns;
  std::vector<std::vector<Value>> rows;
};

std::string render(const Table& table, Format format);

/// lo, lo + step, ..., hi with `steps` points; a single point is lo.
std::vector<double> omega_grid(double lo, double hi, int steps);

/// omega, re_F, im_F, re_k, im_k, regime, error. Frequencies are
/// omega + i * omega_imag.
Table dispersion_table(const PotentialSpec& spec, const std::vector<double>& omegas, double omega_imag,
                       const Settings& s);

/// n, lo, hi, lo_class, hi_class, width.
Table band_table(const BandScan& scan);

/// Band table plus under-resolved intervals and warnings as one JSON object.
std::string band_scan_json(const BandScan& scan);

/// One row per (omega, N): omega, N, re_r, im_r, abs_t, r2_plus_t2,
/// conservation_defect, regime, error. Failed rows carry NaN values and the
/// error message.
Table scatter_table(const PotentialSpec& spec, const std::vector<double>& omegas, const std::vector<int>& periods,
                    double omega_imag, const Settings& s);

/// band_index, N, m, omega, residual over every band found in [lo, hi].
Table transparency_table(const PotentialSpec& spec, const BandScan& scan, const std::vector<int>& periods,
                         const Settings& s);

/// omega, re_r, im_r, re_r_weyl, im_r_weyl, re_m_plus, im_m_plus, abs_c, regime, error.
Table semi_table(const PotentialSpec& spec, const std::vector<double>& omegas, double omega_imag, const Settings& s);

/// t, E_total, E_left, E_slab, E_right.
Table pulse_series_table(const PulseReport& report);

/// Energy split, g-energy and the comparison with the frequency-domain prediction.
std::string pulse_summary_json(const PulseReport& report, const OracleResult& oracle);

}  // namespace tslab
