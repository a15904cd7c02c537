// Command-line front end. Talks to the library only through tslab.h.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tslab/tslab.h"

namespace {

enum Exit { ok = 0, usage = 1, numeric = 2, verify_failed = 3, under_resolved = 4 };

struct Failure {
  int code;
  std::string message;
};

int exit_for(tslab_status st) {
  switch (st) {
    case TSLAB_ERR_INVALID_SPEC:
    case TSLAB_ERR_CONFIGURATION:
    case TSLAB_ERR_INVALID_ARGUMENT:
    case TSLAB_ERR_IO:
      return usage;
    default:
      return numeric;
  }
}

void check(tslab_status st) {
  if (st != TSLAB_OK) throw Failure{exit_for(st), tslab_last_error()};
}

struct Text {
  char* p = nullptr;
  ~Text() { tslab_string_free(p); }
  std::string str() const { return p ? p : ""; }
};

using SpecPtr = std::unique_ptr<tslab_spec, decltype(&tslab_spec_destroy)>;
using SettingsPtr = std::unique_ptr<tslab_settings, decltype(&tslab_settings_destroy)>;

struct Common {
  std::string spec;
  std::optional<double> amplitude;
  std::vector<std::string> sets;
  std::string out;
  std::string format = "csv";
  double omega_min = 0.1;
  double omega_max = 10.0;
  int omega_steps = 200;
  double omega_imag = 0.0;
  std::vector<int> periods;
};

std::string read_spec_text(const std::string& arg) {
  const auto first = arg.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && arg[first] == '{') return arg;
  std::ifstream in(arg);
  if (!in) throw Failure{usage, "cannot read spec file '" + arg + "'"};
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

SpecPtr load_spec(const Common& c) {
  if (c.spec.empty()) throw Failure{usage, "--spec is required"};
  tslab_spec* raw = nullptr;
  check(tslab_spec_from_json(read_spec_text(c.spec).c_str(), &raw));
  SpecPtr spec(raw, tslab_spec_destroy);
  if (c.amplitude) {
    tslab_spec* scaled = nullptr;
    check(tslab_spec_with_amplitude(spec.get(), *c.amplitude, &scaled));
    spec.reset(scaled);
  }
  return spec;
}

SettingsPtr load_settings(const Common& c) {
  tslab_settings* raw = nullptr;
  check(tslab_settings_create(&raw));
  SettingsPtr s(raw, tslab_settings_destroy);
  for (const auto& a : c.sets) check(tslab_settings_assign(s.get(), a.c_str()));
  return s;
}

tslab_format format_of(const Common& c) { return c.format == "json" ? TSLAB_FORMAT_JSON : TSLAB_FORMAT_CSV; }

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Failure{usage, "cannot open '" + path + "' for writing"};
  f << text;
  if (!f) throw Failure{usage, "failed writing '" + path + "'"};
}

void add_spec_options(CLI::App* app, Common& c) {
  app->add_option("--spec", c.spec, "Potential: inline JSON or path to a JSON file");
  app->add_option("--amplitude", c.amplitude, "Replace the amplitude A of the potential");
}

void add_output_options(CLI::App* app, Common& c) {
  app->add_option("--out", c.out, "Output file (default stdout)");
  app->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app->add_option("--set", c.sets, "Numerical override key=value, e.g. transfer.rtol=1e-12")->take_all();
}

void add_range_options(CLI::App* app, Common& c, bool steps) {
  app->add_option("--omega-min", c.omega_min, "Lower end of the frequency range");
  app->add_option("--omega-max", c.omega_max, "Upper end of the frequency range");
  if (steps) {
    app->add_option("--omega-steps", c.omega_steps, "Number of grid points");
    app->add_option("--omega-imag", c.omega_imag, "Imaginary part added to every frequency")
        ->check(CLI::NonNegativeNumber);
  }
}

int cmd_bands(const Common& c) {
  const SpecPtr spec = load_spec(c);
  const SettingsPtr s = load_settings(c);
  Text table, warnings;
  int unresolved = 0;
  check(tslab_bands_table(spec.get(), s.get(), c.omega_min, c.omega_max, format_of(c), &table.p, &unresolved,
                          &warnings.p));
  emit(c.out, table.str());
  std::istringstream lines(warnings.str());
  for (std::string line; std::getline(lines, line);) std::cerr << "warning: " << line << "\n";
  return unresolved > 0 ? under_resolved : ok;
}

int cmd_dispersion(const Common& c) {
  const SpecPtr spec = load_spec(c);
  const SettingsPtr s = load_settings(c);
  Text table;
  check(tslab_dispersion_table(spec.get(), s.get(), c.omega_min, c.omega_max, c.omega_steps, c.omega_imag,
                               format_of(c), &table.p));
  emit(c.out, table.str());
  return ok;
}

std::vector<int> periods_or_default(const Common& c) { return c.periods.empty() ? std::vector<int>{8} : c.periods; }

int cmd_scatter(const Common& c) {
  const SpecPtr spec = load_spec(c);
  const SettingsPtr s = load_settings(c);
  const std::vector<int> ns = periods_or_default(c);
  Text table;
  check(tslab_scatter_table(spec.get(), s.get(), c.omega_min, c.omega_max, c.omega_steps, ns.data(), ns.size(),
                            c.omega_imag, format_of(c), &table.p));
  emit(c.out, table.str());
  return ok;
}

int cmd_transparency(const Common& c) {
  const SpecPtr spec = load_spec(c);
  const SettingsPtr s = load_settings(c);
  const std::vector<int> ns = periods_or_default(c);
  Text table;
  check(tslab_transparency_table(spec.get(), s.get(), c.omega_min, c.omega_max, ns.data(), ns.size(), format_of(c),
                                 &table.p));
  emit(c.out, table.str());
  return ok;
}

int cmd_semi(const Common& c) {
  const SpecPtr spec = load_spec(c);
  const SettingsPtr s = load_settings(c);
  Text table;
  check(tslab_semi_table(spec.get(), s.get(), c.omega_min, c.omega_max, c.omega_steps, c.omega_imag, format_of(c),
                         &table.p));
  emit(c.out, table.str());
  return ok;
}

int cmd_pulse(Common c, const std::string& summary, const std::string& snapshot) {
  if (c.spec.empty()) c.spec = R"({"period": 1, "amplitude": 100, "deltas": [{"offset": 0, "strength": 1}]})";
  const SpecPtr spec = load_spec(c);
  const SettingsPtr s = load_settings(c);
  Text series, report;
  check(tslab_pulse(spec.get(), s.get(), format_of(c), snapshot.empty() ? nullptr : snapshot.c_str(), &series.p,
                    &report.p));
  emit(c.out, series.str());
  if (!summary.empty())
    emit(summary, report.str());
  else if (c.out.empty() || c.out == "-")
    std::cerr << report.str();
  else
    std::cout << report.str();
  return ok;
}

void print_progress(const char* line, int, void*) { std::cerr << line << "\n"; }

int cmd_verify(const Common& c, unsigned long long seed, const std::vector<int>& only) {
  const SettingsPtr s = load_settings(c);
  Text report;
  int passed = 0;
  check(tslab_verify(s.get(), seed, only.empty() ? nullptr : only.data(), only.size(), print_progress, nullptr,
                     &report.p, &passed));
  emit(c.out, report.str());
  return passed ? ok : verify_failed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Band structure, scattering and pulse propagation for truncated periodic potentials"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(tslab_version()));

  Common c;
  unsigned long long seed = 20240611;
  std::vector<int> only;
  std::string summary, snapshot;

  auto* bands = app.add_subcommand("bands", "Band table with edge classification");
  add_spec_options(bands, c);
  add_range_options(bands, c, false);
  add_output_options(bands, c);

  auto* dispersion = app.add_subcommand("dispersion", "F(omega) and the Bloch phase on a grid");
  add_spec_options(dispersion, c);
  add_range_options(dispersion, c, true);
  add_output_options(dispersion, c);

  auto* scatter = app.add_subcommand("scatter", "Reflection and transmission of the N-period slab");
  add_spec_options(scatter, c);
  add_range_options(scatter, c, true);
  scatter->add_option("--periods", c.periods, "Number of periods (repeatable)")->check(CLI::PositiveNumber);
  add_output_options(scatter, c);

  auto* transparency = app.add_subcommand("transparency", "Frequencies where the slab is fully transparent");
  add_spec_options(transparency, c);
  add_range_options(transparency, c, false);
  transparency->add_option("--periods", c.periods, "Number of periods (repeatable)")->check(CLI::PositiveNumber);
  add_output_options(transparency, c);

  auto* semi = app.add_subcommand("semi", "Reflection from the semi-infinite periodic medium");
  add_spec_options(semi, c);
  add_range_options(semi, c, true);
  add_output_options(semi, c);

  auto* pulse = app.add_subcommand("pulse", "Time-domain pulse against a delta comb");
  add_spec_options(pulse, c);
  add_output_options(pulse, c);
  pulse->add_option("--summary", summary, "Write the summary JSON here");
  pulse->add_option("--snapshot", snapshot, "Write the final field as a binary snapshot");

  auto* verify = app.add_subcommand("verify", "Run the acceptance suite");
  verify->add_option("--out", c.out, "JSON report file (default stdout)");
  verify->add_option("--set", c.sets, "Override key=value, e.g. verify.chebyshev=1e-12")->take_all();
  verify->add_option("--seed", seed, "Seed of the randomized checks");
  verify->add_option("--only", only, "Run only these criteria (repeatable)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? ok : usage;
  }

  try {
    if (*bands) return cmd_bands(c);
    if (*dispersion) return cmd_dispersion(c);
    if (*scatter) return cmd_scatter(c);
    if (*transparency) return cmd_transparency(c);
    if (*semi) return cmd_semi(c);
    if (*pulse) return cmd_pulse(c, summary, snapshot);
    if (*verify) return cmd_verify(c, seed, only);
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << "\n";
    return f.code;
  }
  return usage;
}
