#pragma once

#include <string>

#include "tslab/potential.hpp"

namespace tslab {

/// Parses {"period", "amplitude", "deltas": [{"offset", "strength"}],
/// "smooth": [{"lo", "hi", "profile": {"kind": "const"|"poly"|"table", ...}}]}.
/// "amplitude" defaults to 1 and both lists default to empty.
PotentialSpec parse_spec_json(const std::string& text);

/// Inverse of parse_spec_json. Custom profiles cannot be serialized.
std::string spec_to_json(const PotentialSpec& spec);

}  // namespace tslab
