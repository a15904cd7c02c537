#include "tslab/settings.hpp"

#include <charconv>
#include <cstdio>
#include <functional>
#include <map>

#include "tslab/error.hpp"

namespace tslab {

namespace {

double parse_double(std::string_view key, std::string_view v) {
  double x = 0.0;
  const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc{} || end != v.data() + v.size())
    raise(ErrorCode::configuration, "setting " + std::string(key) + ": '" + std::string(v) + "' is not a number");
  return x;
}

long parse_long(std::string_view key, std::string_view v) {
  long x = 0;
  const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc{} || end != v.data() + v.size())
    raise(ErrorCode::configuration, "setting " + std::string(key) + ": '" + std::string(v) + "' is not an integer");
  return x;
}

bool parse_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "on") return true;
  if (v == "false" || v == "0" || v == "off") return false;
  raise(ErrorCode::configuration, "setting " + std::string(key) + ": '" + std::string(v) + "' is not a boolean");
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

struct Entry {
  std::function<void(Settings&, std::string_view, std::string_view)> set;
  std::function<std::string(const Settings&)> get;
};

template <class F>
Entry real(F field) {
  return {[field](Settings& s, std::string_view k, std::string_view v) { field(s) = parse_double(k, v); },
          [field](const Settings& s) { return fmt(field(s)); }};
}

template <class F>
Entry integer(F field) {
  return {[field](Settings& s, std::string_view k, std::string_view v) {
            field(s) = static_cast<std::remove_reference_t<decltype(field(s))>>(parse_long(k, v));
          },
          [field](const Settings& s) { return std::to_string(field(s)); }};
}

template <class F>
Entry boolean(F field) {
  return {[field](Settings& s, std::string_view k, std::string_view v) { field(s) = parse_bool(k, v); },
          [field](const Settings& s) { return std::string(field(s) ? "true" : "false"); }};
}

#define FIELD(expr) [](auto& s) -> auto& { return expr; }

const std::map<std::string, Entry, std::less<>>& table() {
  static const std::map<std::string, Entry, std::less<>> t{
      {"transfer.rtol", real(FIELD(s.scatter.spectrum.transfer.rtol))},
      {"transfer.atol", real(FIELD(s.scatter.spectrum.transfer.atol))},
      {"transfer.det_tol", real(FIELD(s.scatter.spectrum.transfer.det_tol))},
      {"transfer.overflow_limit", real(FIELD(s.scatter.spectrum.transfer.overflow_limit))},
      {"transfer.max_steps", integer(FIELD(s.scatter.spectrum.transfer.max_steps))},
      {"transfer.project_unimodular", boolean(FIELD(s.scatter.spectrum.transfer.project_unimodular))},

      {"spectrum.edge_tol", real(FIELD(s.scatter.spectrum.edge_tol))},
      {"spectrum.tol_mat", real(FIELD(s.scatter.spectrum.tol_mat))},
      {"spectrum.tol_der_rel", real(FIELD(s.scatter.spectrum.tol_der_rel))},
      {"spectrum.deriv_step_rel", real(FIELD(s.scatter.spectrum.deriv_step_rel))},
      {"spectrum.interior_margin", real(FIELD(s.scatter.spectrum.interior_margin))},
      {"spectrum.weyl_tol", real(FIELD(s.scatter.spectrum.weyl_tol))},
      {"spectrum.bisect_rel", real(FIELD(s.scatter.spectrum.bisect_rel))},
      {"spectrum.nudge1", real(FIELD(s.scatter.spectrum.nudges[0]))},
      {"spectrum.nudge2", real(FIELD(s.scatter.spectrum.nudges[1]))},
      {"spectrum.nudge3", real(FIELD(s.scatter.spectrum.nudges[2]))},
      {"spectrum.grid", integer(FIELD(s.band_grid))},

      {"scattering.transparency_tol", real(FIELD(s.scatter.transparency_tol))},
      {"scattering.edge_sin_tol", real(FIELD(s.scatter.edge_sin_tol))},
      {"scattering.semi_tol", real(FIELD(s.scatter.semi_tol))},

      {"pulse.band", integer(FIELD(s.pulse.band))},
      {"pulse.theta", real(FIELD(s.pulse.theta))},
      {"pulse.periods", integer(FIELD(s.pulse.periods))},
      {"pulse.width", real(FIELD(s.pulse.width))},
      {"pulse.cells_per_period", integer(FIELD(s.pulse.cells_per_period))},
      {"pulse.cfl", real(FIELD(s.pulse.cfl))},
      {"pulse.t_end", real(FIELD(s.pulse.t_end))},
      {"pulse.margin", real(FIELD(s.pulse.margin))},
      {"pulse.x_min", real(FIELD(s.pulse.x_min))},
      {"pulse.x_max", real(FIELD(s.pulse.x_max))},
      {"pulse.sample_dt", real(FIELD(s.pulse.sample_dt))},
      {"pulse.mirror_reference", boolean(FIELD(s.pulse.mirror_reference))},

      {"verify.det", real(FIELD(s.verify.det))},
      {"verify.chebyshev", real(FIELD(s.verify.chebyshev))},
      {"verify.reflection", real(FIELD(s.verify.reflection))},
      {"verify.transmittance", real(FIELD(s.verify.transmittance))},
      {"verify.conservation", real(FIELD(s.verify.conservation))},
      {"verify.tan_root", real(FIELD(s.verify.tan_root))},
      {"verify.edge_asymptotic_coeff", real(FIELD(s.verify.edge_asymptotic_coeff))},
      {"verify.vg_bound_coeff", real(FIELD(s.verify.vg_bound_coeff))},
      {"verify.vg_slope", real(FIELD(s.verify.vg_slope))},
      {"verify.identity", real(FIELD(s.verify.identity))},
      {"verify.degenerate_reflection", real(FIELD(s.verify.degenerate_reflection))},
      {"verify.degenerate_slope", real(FIELD(s.verify.degenerate_slope))},
      {"verify.transparency", real(FIELD(s.verify.transparency))},
      {"verify.transparency_mid_coeff", real(FIELD(s.verify.transparency_mid_coeff))},
      {"verify.decay_rel", real(FIELD(s.verify.decay_rel))},
      {"verify.edge_factor", real(FIELD(s.verify.edge_factor))},
      {"verify.geometric_ratio", real(FIELD(s.verify.geometric_ratio))},
      {"verify.semi_factor", real(FIELD(s.verify.semi_factor))},
      {"verify.drift", real(FIELD(s.verify.drift))},
      {"verify.oracle_rel", real(FIELD(s.verify.oracle_rel))},
      {"verify.split_ratio_lo", real(FIELD(s.verify.split_ratio_lo))},
      {"verify.split_ratio_hi", real(FIELD(s.verify.split_ratio_hi))},
      {"verify.pre_transit", real(FIELD(s.verify.pre_transit))},
      {"verify.time_scale", real(FIELD(s.verify.time_scale))},
  };
  return t;
}

#undef FIELD

const Entry& lookup(std::string_view key) {
  const auto& t = table();
  const auto it = t.find(key);
  if (it == t.end()) raise(ErrorCode::configuration, "unknown setting '" + std::string(key) + "'");
  return it->second;
}

}  // namespace

void apply_setting(Settings& s, std::string_view key, std::string_view value) { lookup(key).set(s, key, value); }

void apply_assignment(Settings& s, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0)
    raise(ErrorCode::configuration, "expected key=value, got '" + std::string(assignment) + "'");
  apply_setting(s, assignment.substr(0, eq), assignment.substr(eq + 1));
}

std::vector<std::string> setting_keys() {
  std::vector<std::string> keys;
  for (const auto& [k, e] : table()) keys.push_back(k);
  return keys;
}

std::string setting_value(const Settings& s, std::string_view key) { return lookup(key).get(s); }

}  // namespace tslab
