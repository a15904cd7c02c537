#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "tslab/scattering.hpp"
#include "tslab/timedomain.hpp"
#include "tslab/verify.hpp"

namespace tslab {

/// Every tunable number, grouped the way overrides are named:
/// transfer.*, spectrum.*, scattering.*, pulse.* and verify.*.
struct Settings {
  ScatterOptions scatter;
  PulseConfig pulse;
  VerifyTolerances verify;
  int band_grid = 2000;  // spectrum.grid: base grid of the band scan
};

/// Applies "key=value" style overrides. Unknown keys and unparsable values
/// raise a configuration error naming the key.
void apply_setting(Settings& s, std::string_view key, std::string_view value);
void apply_assignment(Settings& s, std::string_view assignment);

std::vector<std::string> setting_keys();

/// Current value of a key, formatted like the CSV output.
std::string setting_value(const Settings& s, std::string_view key);

}  // namespace tslab
