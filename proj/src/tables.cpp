#include "tslab/tables.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include <json.hpp>

#include "tslab/error.hpp"
#include "tslab/parallel.hpp"
#include "tslab/scattering.hpp"
#include "tslab/transfer.hpp"

namespace tslab {

namespace {

using nlohmann::json;

std::string number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

json json_number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json row_object(const Table& t, const std::vector<Table::Value>& row) {
  json o = json::object();
  for (std::size_t i = 0; i < t.columns.size(); ++i) {
    const auto& v = row[i];
    if (const double* d = std::get_if<double>(&v))
      o[t.columns[i]] = json_number(*d);
    else if (const long* n = std::get_if<long>(&v))
      o[t.columns[i]] = *n;
    else
      o[t.columns[i]] = std::get<std::string>(v);
  }
  return o;
}

json table_array(const Table& t) {
  json a = json::array();
  for (const auto& row : t.rows) a.push_back(row_object(t, row));
  return a;
}

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

Frequency at(double omega, double omega_imag) {
  return omega_imag == 0.0 ? Frequency{omega} : Frequency{cplx{omega, omega_imag}};
}

}  // namespace

std::string render(const Table& table, Format format) {
  if (format == Format::json) return table_array(table).dump(2) + "\n";
  std::string out;
  for (std::size_t i = 0; i < table.columns.size(); ++i) out += (i ? "," : "") + table.columns[i];
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      const auto& v = row[i];
      if (const double* d = std::get_if<double>(&v))
        out += number(*d);
      else if (const long* n = std::get_if<long>(&v))
        out += std::to_string(*n);
      else
        out += csv_field(std::get<std::string>(v));
    }
    out += '\n';
  }
  return out;
}

std::vector<double> omega_grid(double lo, double hi, int steps) {
  if (steps < 1) raise(ErrorCode::configuration, "omega grid needs at least one point");
  if (!(lo > 0.0) || !(hi >= lo)) raise(ErrorCode::configuration, "omega range must satisfy 0 < min <= max");
  if (steps == 1) return {lo};
  std::vector<double> w(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) w[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (steps - 1);
  w.back() = hi;
  return w;
}

Table dispersion_table(const PotentialSpec& spec, const std::vector<double>& omegas, double omega_imag,
                       const Settings& s) {
  Table t{{"omega", "re_F", "im_F", "re_k", "im_k", "regime", "error"}, {}};
  t.rows.resize(omegas.size());
  parallel_for(omegas.size(), [&](std::size_t i) {
    try {
      const DispersionSample d = bloch_k(at(omegas[i], omega_imag), spec, s.scatter.spectrum);
      t.rows[i] = {omegas[i], d.F.real(), d.F.imag(), d.k.real(), d.k.imag(), std::string(to_string(d.regime)),
                   std::string()};
    } catch (const Error& e) {
      t.rows[i] = {omegas[i], nan, nan, nan, nan, std::string(), std::string(e.what())};
    }
  });
  return t;
}

Table band_table(const BandScan& scan) {
  Table t{{"n", "lo", "hi", "lo_class", "hi_class", "width"}, {}};
  for (const Band& b : scan.bands)
    t.rows.push_back({static_cast<long>(b.index), b.lo, b.hi, std::string(to_string(b.lo_class)),
                      std::string(to_string(b.hi_class)), b.width()});
  return t;
}

std::string band_scan_json(const BandScan& scan) {
  json o;
  o["bands"] = table_array(band_table(scan));
  o["under_resolved"] = json::array();
  for (const auto& iv : scan.under_resolved) o["under_resolved"].push_back({json_number(iv[0]), json_number(iv[1])});
  o["warnings"] = scan.warnings;
  return o.dump(2) + "\n";
}

Table scatter_table(const PotentialSpec& spec, const std::vector<double>& omegas, const std::vector<int>& periods,
                    double omega_imag, const Settings& s) {
  Table t{{"omega", "N", "re_r", "im_r", "abs_t", "r2_plus_t2", "conservation_defect", "regime", "error"}, {}};
  const std::size_t n = omegas.size() * periods.size();
  t.rows.resize(n);
  parallel_for(n, [&](std::size_t i) {
    const double w = omegas[i / periods.size()];
    const int N = periods[i % periods.size()];
    try {
      const Frequency f = at(w, omega_imag);
      const ScatterResult r = scatter_direct(f, spec, N, s.scatter);
      const Mat2 m = monodromy(f, spec, s.scatter.spectrum.transfer);
      std::string regime;
      try {
        regime = to_string(bloch_k(f, m, spec, s.scatter.spectrum).regime);
      } catch (const Error&) {
        regime = "unknown";
      }
      t.rows[i] = {w,
                   static_cast<long>(N),
                   r.r.real(),
                   r.r.imag(),
                   std::abs(r.t),
                   std::norm(r.r) + std::norm(r.t),
                   r.conservation_defect,
                   regime,
                   std::string()};
    } catch (const Error& e) {
      t.rows[i] = {w, static_cast<long>(N), nan, nan, nan, nan, nan, std::string(), std::string(e.what())};
    }
  });
  return t;
}

Table transparency_table(const PotentialSpec& spec, const BandScan& scan, const std::vector<int>& periods,
                         const Settings& s) {
  Table t{{"band_index", "N", "m", "omega", "residual"}, {}};
  for (int N : periods)
    for (const Band& b : scan.bands) {
      if (b.lo_class == EdgeKind::range_limit || b.hi_class == EdgeKind::range_limit) continue;
      for (const TransparencyPoint& p : transparency_points(spec, b, N, s.scatter))
        t.rows.push_back({static_cast<long>(p.band_index), static_cast<long>(N), static_cast<long>(p.m), p.omega,
                          p.residual});
    }
  return t;
}

Table semi_table(const PotentialSpec& spec, const std::vector<double>& omegas, double omega_imag, const Settings& s) {
  Table t{{"omega", "re_r", "im_r", "re_r_weyl", "im_r_weyl", "re_m_plus", "im_m_plus", "abs_c", "regime", "error"},
          {}};
  t.rows.resize(omegas.size());
  parallel_for(omegas.size(), [&](std::size_t i) {
    const Frequency f = at(omegas[i], omega_imag);
    try {
      const SemiInfiniteResult r = scatter_semi_infinite(f, spec, s.scatter);
      const std::string regime = to_string(bloch_k(f, spec, s.scatter.spectrum).regime);
      t.rows[i] = {omegas[i],       r.r.real(),        r.r.imag(),        r.r_weyl.real(), r.r_weyl.imag(),
                   r.m_plus.real(), r.m_plus.imag(),   std::abs(r.c),     regime,          std::string()};
    } catch (const Error& e) {
      t.rows[i] = {omegas[i], nan, nan, nan, nan, nan, nan, nan, std::string(), std::string(e.what())};
    }
  });
  return t;
}

Table pulse_series_table(const PulseReport& report) {
  Table t{{"t", "E_total", "E_left", "E_slab", "E_right"}, {}};
  for (const EnergySample& e : report.series) t.rows.push_back({e.t, e.total, e.left, e.slab, e.right});
  return t;
}

std::string pulse_summary_json(const PulseReport& report, const OracleResult& oracle) {
  const Discretization& g = report.grid;
  json o;
  o["amplitude"] = json_number(g.amplitude);
  o["omega0"] = json_number(g.omega0);
  o["width"] = json_number(g.width);
  o["t_end"] = json_number(g.t_end);
  o["h"] = json_number(g.h);
  o["dt"] = json_number(g.dt);
  o["grid_size"] = g.size;
  o["transit_time"] = json_number(g.transit_time);
  o["initial_energy"] = json_number(report.initial_energy);
  o["max_relative_drift"] = json_number(report.max_relative_drift);
  o["reflected_fraction"] = json_number(report.reflected_fraction);
  o["inside_fraction"] = json_number(report.inside_fraction);
  o["transmitted_fraction"] = json_number(report.transmitted_fraction);
  o["pre_transit_time"] = json_number(report.pre_transit_time);
  o["pre_transit_right_fraction"] = json_number(report.pre_transit_right_fraction);
  o["g_gradient_energy"] = json_number(report.g_gradient_energy);
  o["regime"] = report.regime;
  const double rel = oracle.fraction > 0.0
                         ? std::abs(report.transmitted_fraction - oracle.fraction) / oracle.fraction
                         : std::numeric_limits<double>::quiet_NaN();
  o["oracle"] = {{"transmitted_fraction", json_number(oracle.fraction)},
                 {"transmitted_energy", json_number(oracle.transmitted)},
                 {"total_energy", json_number(oracle.total)},
                 {"relative_difference", json_number(rel)}};
  return o.dump(2) + "\n";
}

}  // namespace tslab
