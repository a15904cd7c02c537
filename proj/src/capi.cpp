#include "tslab/tslab.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "tslab/error.hpp"
#include "tslab/potential_io.hpp"
#include "tslab/scattering.hpp"
#include "tslab/settings.hpp"
#include "tslab/tables.hpp"
#include "tslab/transfer.hpp"
#include "tslab/verify.hpp"

struct tslab_spec {
  tslab::PotentialSpec spec;
};

struct tslab_settings {
  tslab::Settings settings;
};

namespace {

thread_local std::string last_error;

struct InvalidArgument {
  const char* what;
};

tslab_status fail(tslab_status st, const std::string& msg) {
  last_error = msg;
  return st;
}

template <class Body>
tslab_status guarded(Body&& body) {
  try {
    last_error.clear();
    body();
    return TSLAB_OK;
  } catch (const InvalidArgument& e) {
    return fail(TSLAB_ERR_INVALID_ARGUMENT, e.what);
  } catch (const tslab::Error& e) {
    return fail(static_cast<tslab_status>(static_cast<int>(e.code())), e.what());
  } catch (const std::bad_alloc&) {
    return fail(TSLAB_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(TSLAB_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(TSLAB_ERR_INTERNAL, "unknown failure");
  }
}

template <class T>
T* need(T* p, const char* name) {
  if (!p) throw InvalidArgument{name};
  return p;
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

const tslab::Settings& defaults() {
  static const tslab::Settings d;
  return d;
}

const tslab::Settings& settings_of(const tslab_settings* s) { return s ? s->settings : defaults(); }

tslab::Frequency frequency(double re, double im) {
  if (im == 0.0) return tslab::Frequency{re};
  return tslab::Frequency{tslab::cplx{re, im}};
}

tslab::Format format_of(tslab_format f) {
  if (f == TSLAB_FORMAT_CSV) return tslab::Format::csv;
  if (f == TSLAB_FORMAT_JSON) return tslab::Format::json;
  throw InvalidArgument{"unknown output format"};
}

std::vector<int> period_list(const int* periods, size_t n) {
  if (n == 0) throw InvalidArgument{"at least one period count is required"};
  need(periods, "periods is null");
  std::vector<int> out(periods, periods + n);
  for (int p : out)
    if (p < 1) tslab::raise(tslab::ErrorCode::configuration, "period counts must be >= 1");
  return out;
}

tslab_spec* wrap(tslab::PotentialSpec spec) { return new tslab_spec{std::move(spec)}; }

}  // namespace

extern "C" {

const char* tslab_version(void) { return "1.0.0"; }

const char* tslab_last_error(void) { return last_error.c_str(); }

const char* tslab_status_name(tslab_status status) {
  switch (status) {
    case TSLAB_OK: return "ok";
    case TSLAB_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case TSLAB_ERR_IO: return "io";
    case TSLAB_ERR_INTERNAL: return "internal";
    default:
      if (status >= TSLAB_ERR_INVALID_SPEC && status <= TSLAB_ERR_DOMAIN_SIZE)
        return tslab::to_string(static_cast<tslab::ErrorCode>(static_cast<int>(status)));
      return "unknown";
  }
}

void tslab_string_free(char* s) { std::free(s); }

tslab_status tslab_spec_from_json(const char* json, tslab_spec** out) {
  return guarded([&] {
    need(out, "out is null");
    *out = wrap(tslab::parse_spec_json(need(json, "json is null")));
  });
}

tslab_status tslab_spec_single_comb(double amplitude, double period, tslab_spec** out) {
  return guarded([&] { *need(out, "out is null") = wrap(tslab::make_single_delta_comb(amplitude, period)); });
}

tslab_status tslab_spec_alternating_comb(double amplitude, double half_period, tslab_spec** out) {
  return guarded([&] { *need(out, "out is null") = wrap(tslab::make_alternating_delta_comb(amplitude, half_period)); });
}

tslab_status tslab_spec_free_medium(double period, tslab_spec** out) {
  return guarded([&] { *need(out, "out is null") = wrap(tslab::PotentialSpec::free(period)); });
}

tslab_status tslab_spec_with_amplitude(const tslab_spec* spec, double amplitude, tslab_spec** out) {
  return guarded([&] { *need(out, "out is null") = wrap(need(spec, "spec is null")->spec.with_amplitude(amplitude)); });
}

tslab_status tslab_spec_to_json(const tslab_spec* spec, char** out) {
  return guarded([&] { *need(out, "out is null") = dup(tslab::spec_to_json(need(spec, "spec is null")->spec)); });
}

tslab_status tslab_spec_period(const tslab_spec* spec, double* out) {
  return guarded([&] { *need(out, "out is null") = need(spec, "spec is null")->spec.period(); });
}

void tslab_spec_destroy(tslab_spec* spec) { delete spec; }

tslab_status tslab_settings_create(tslab_settings** out) {
  return guarded([&] { *need(out, "out is null") = new tslab_settings{}; });
}

tslab_status tslab_settings_set(tslab_settings* s, const char* key, const char* value) {
  return guarded([&] {
    tslab::apply_setting(need(s, "settings is null")->settings, need(key, "key is null"), need(value, "value is null"));
  });
}

tslab_status tslab_settings_assign(tslab_settings* s, const char* assignment) {
  return guarded(
      [&] { tslab::apply_assignment(need(s, "settings is null")->settings, need(assignment, "assignment is null")); });
}

tslab_status tslab_settings_get(const tslab_settings* s, const char* key, char** out) {
  return guarded([&] {
    need(out, "out is null");
    *out = dup(tslab::setting_value(settings_of(s), need(key, "key is null")));
  });
}

tslab_status tslab_settings_keys(char** out) {
  return guarded([&] {
    std::string all;
    for (const auto& k : tslab::setting_keys()) all += k + "\n";
    *need(out, "out is null") = dup(all);
  });
}

void tslab_settings_destroy(tslab_settings* s) { delete s; }

tslab_status tslab_monodromy(const tslab_spec* spec, const tslab_settings* s, double re, double im, double out[8]) {
  return guarded([&] {
    need(out, "out is null");
    const tslab::Mat2 m =
        tslab::monodromy(frequency(re, im), need(spec, "spec is null")->spec, settings_of(s).scatter.spectrum.transfer);
    const tslab::cplx e[4] = {m.a, m.b, m.c, m.d};
    for (int i = 0; i < 4; ++i) {
      out[2 * i] = e[i].real();
      out[2 * i + 1] = e[i].imag();
    }
  });
}

tslab_status tslab_bloch(const tslab_spec* spec, const tslab_settings* s, double re, double im,
                         tslab_dispersion* out) {
  return guarded([&] {
    need(out, "out is null");
    const tslab::DispersionSample d =
        tslab::bloch_k(frequency(re, im), need(spec, "spec is null")->spec, settings_of(s).scatter.spectrum);
    out->F_re = d.F.real();
    out->F_im = d.F.imag();
    out->k_re = d.k.real();
    out->k_im = d.k.imag();
    out->mu_re = d.mu_plus.real();
    out->mu_im = d.mu_plus.imag();
    out->regime = d.regime == tslab::Regime::band  ? TSLAB_REGIME_BAND
                  : d.regime == tslab::Regime::gap ? TSLAB_REGIME_GAP
                                                   : TSLAB_REGIME_EDGE;
  });
}

tslab_status tslab_group_velocity(const tslab_spec* spec, const tslab_settings* s, double omega, double* out) {
  return guarded([&] {
    need(out, "out is null");
    *out = tslab::group_velocity(omega, need(spec, "spec is null")->spec, settings_of(s).scatter.spectrum)
               .group_velocity;
  });
}

tslab_status tslab_scatter(const tslab_spec* spec, const tslab_settings* s, double re, double im, int periods,
                           tslab_scatter_point* out) {
  return guarded([&] {
    need(out, "out is null");
    if (periods < 1) tslab::raise(tslab::ErrorCode::domain, "period count must be >= 1");
    const tslab::ScatterResult r =
        tslab::scatter_direct(frequency(re, im), need(spec, "spec is null")->spec, periods, settings_of(s).scatter);
    *out = {r.r.real(), r.r.imag(), r.t.real(), r.t.imag(), r.conservation_defect, r.t_sq_from_norm};
  });
}

tslab_status tslab_reflection_formula(const tslab_spec* spec, const tslab_settings* s, double re, double im,
                                      int periods, double out[2]) {
  return guarded([&] {
    need(out, "out is null");
    const tslab::cplx r =
        tslab::reflection_formula(frequency(re, im), need(spec, "spec is null")->spec, periods, settings_of(s).scatter);
    out[0] = r.real();
    out[1] = r.imag();
  });
}

tslab_status tslab_transmittance_formula(const tslab_spec* spec, const tslab_settings* s, double omega,
                                         int periods, double* out) {
  return guarded([&] {
    *need(out, "out is null") =
        tslab::transmittance_formula(omega, need(spec, "spec is null")->spec, periods, settings_of(s).scatter);
  });
}

tslab_status tslab_semi_infinite(const tslab_spec* spec, const tslab_settings* s, double re, double im,
                                 tslab_semi_point* out) {
  return guarded([&] {
    need(out, "out is null");
    const tslab::SemiInfiniteResult r =
        tslab::scatter_semi_infinite(frequency(re, im), need(spec, "spec is null")->spec, settings_of(s).scatter);
    *out = {r.r.real(), r.r.imag(), r.r_weyl.real(), r.r_weyl.imag(), r.m_plus.real(), r.m_plus.imag()};
  });
}

tslab_status tslab_bands_table(const tslab_spec* spec, const tslab_settings* s, double omega_min, double omega_max,
                               tslab_format format, char** out, int* under_resolved, char** warnings) {
  return guarded([&] {
    need(out, "out is null");
    const tslab::Format f = format_of(format);
    const tslab::Settings& st = settings_of(s);
    if (!(omega_min > 0.0 && omega_max > omega_min))
      tslab::raise(tslab::ErrorCode::configuration, "band scan needs 0 < omega_min < omega_max");
    const tslab::BandScan scan =
        tslab::find_bands(need(spec, "spec is null")->spec, omega_min, omega_max, st.band_grid, st.scatter.spectrum);
    const std::string text = f == tslab::Format::json ? tslab::band_scan_json(scan) : tslab::render(tslab::band_table(scan), f);
    std::string warn;
    for (const auto& w : scan.warnings) warn += w + "\n";
    char* w = warnings ? dup(warn) : nullptr;
    *out = dup(text);
    if (warnings) *warnings = w;
    if (under_resolved) *under_resolved = static_cast<int>(scan.under_resolved.size());
  });
}

tslab_status tslab_dispersion_table(const tslab_spec* spec, const tslab_settings* s, double omega_min,
                                    double omega_max, int steps, double omega_imag, tslab_format format, char** out) {
  return guarded([&] {
    need(out, "out is null");
    const tslab::Format f = format_of(format);
    *out = dup(tslab::render(tslab::dispersion_table(need(spec, "spec is null")->spec,
                                                     tslab::omega_grid(omega_min, omega_max, steps), omega_imag,
                                                     settings_of(s)),
                             f));
  });
}

tslab_status tslab_scatter_table(const tslab_spec* spec, const tslab_settings* s, double omega_min, double omega_max,
                                 int steps, const int* periods, size_t n_periods, double omega_imag,
                                 tslab_format format, char** out) {
  return guarded([&] {
    need(out, "out is null");
    const tslab::Format f = format_of(format);
    *out = dup(tslab::render(tslab::scatter_table(need(spec, "spec is null")->spec,
                                                  tslab::omega_grid(omega_min, omega_max, steps),
                                                  period_list(periods, n_periods), omega_imag, settings_of(s)),
                             f));
  });
}

tslab_status tslab_transparency_table(const tslab_spec* spec, const tslab_settings* s, double omega_min,
                                      double omega_max, const int* periods, size_t n_periods, tslab_format format,
                                      char** out) {
  return guarded([&] {
    need(out, "out is null");
    const tslab::Format f = format_of(format);
    const tslab::Settings& st = settings_of(s);
    const tslab::PotentialSpec& p = need(spec, "spec is null")->spec;
    const std::vector<int> ns = period_list(periods, n_periods);
    if (!(omega_min > 0.0 && omega_max > omega_min))
      tslab::raise(tslab::ErrorCode::configuration, "band scan needs 0 < omega_min < omega_max");
    const tslab::BandScan scan = tslab::find_bands(p, omega_min, omega_max, st.band_grid, st.scatter.spectrum);
    *out = dup(tslab::render(tslab::transparency_table(p, scan, ns, st), f));
  });
}

tslab_status tslab_semi_table(const tslab_spec* spec, const tslab_settings* s, double omega_min, double omega_max,
                              int steps, double omega_imag, tslab_format format, char** out) {
  return guarded([&] {
    need(out, "out is null");
    const tslab::Format f = format_of(format);
    *out = dup(tslab::render(tslab::semi_table(need(spec, "spec is null")->spec,
                                               tslab::omega_grid(omega_min, omega_max, steps), omega_imag,
                                               settings_of(s)),
                             f));
  });
}

tslab_status tslab_pulse(const tslab_spec* spec, const tslab_settings* s, tslab_format series_format,
                         const char* snapshot_path, char** series, char** summary_json) {
  return guarded([&] {
    need(series, "series is null");
    need(summary_json, "summary_json is null");
    const tslab::Format f = format_of(series_format);
    const tslab::Settings& st = settings_of(s);
    tslab::PulseConfig cfg = st.pulse;
    cfg.spec = need(spec, "spec is null")->spec;
    if (snapshot_path) cfg.snapshot_path = snapshot_path;
    const tslab::PulseReport rep = tslab::run(cfg);
    const tslab::OracleResult oracle = tslab::freq_domain_oracle(cfg, st.scatter);
    char* a = dup(tslab::render(tslab::pulse_series_table(rep), f));
    char* b = nullptr;
    try {
      b = dup(tslab::pulse_summary_json(rep, oracle));
    } catch (...) {
      std::free(a);
      throw;
    }
    *series = a;
    *summary_json = b;
  });
}

tslab_status tslab_verify(const tslab_settings* s, unsigned long long seed, const int* only, size_t n_only,
                          tslab_progress_fn progress, void* user, char** report_json, int* all_passed) {
  return guarded([&] {
    need(report_json, "report_json is null");
    const tslab::Settings& st = settings_of(s);
    tslab::VerifyOptions opts;
    opts.seed = seed;
    opts.tol = st.verify;
    opts.numerics = st.scatter;
    opts.pulse = st.pulse;
    if (n_only > 0) opts.only.assign(need(only, "only is null"), only + n_only);
    auto cb = [&](const tslab::CriterionResult& c) {
      if (progress) progress(tslab::format_line(c).c_str(), c.passed ? 1 : 0, user);
    };
    const tslab::VerifyReport rep = tslab::run_verification(opts, cb);
    *report_json = dup(tslab::report_to_json(rep));
    if (all_passed) *all_passed = rep.all_passed() ? 1 : 0;
  });
}

}  // extern "C"
