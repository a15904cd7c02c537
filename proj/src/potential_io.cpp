#include "tslab/potential_io.hpp"

#include <json.hpp>

#include "tslab/error.hpp"

namespace tslab {

using nlohmann::json;

namespace {

Profile parse_profile(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "const") return ConstProfile{j.at("value").get<double>()};
  if (kind == "poly") return PolyProfile{j.at("coefficients").get<std::vector<double>>()};
  if (kind == "table")
    return TableProfile{j.at("x").get<std::vector<double>>(), j.at("v").get<std::vector<double>>()};
  raise(ErrorCode::invalid_spec, "unknown profile kind '" + kind + "'");
}

json profile_json(const Profile& profile) {
  if (const auto* p = std::get_if<ConstProfile>(&profile)) return {{"kind", "const"}, {"value", p->value}};
  if (const auto* p = std::get_if<PolyProfile>(&profile))
    return {{"kind", "poly"}, {"coefficients", p->coefficients}};
  if (const auto* p = std::get_if<TableProfile>(&profile)) return {{"kind", "table"}, {"x", p->x}, {"v", p->v}};
  raise(ErrorCode::invalid_spec, "custom profiles cannot be serialized");
}

}  // namespace

PotentialSpec parse_spec_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    std::vector<DeltaTerm> deltas;
    for (const auto& d : j.value("deltas", json::array()))
      deltas.push_back({d.at("offset").get<double>(), d.at("strength").get<double>()});
    std::vector<SmoothPiece> smooth;
    for (const auto& s : j.value("smooth", json::array()))
      smooth.push_back({s.at("lo").get<double>(), s.at("hi").get<double>(), parse_profile(s.at("profile"))});
    return PotentialSpec(j.at("period").get<double>(), j.value("amplitude", 1.0), std::move(deltas),
                         std::move(smooth));
  } catch (const json::exception& e) {
    raise(ErrorCode::invalid_spec, std::string("malformed spec JSON: ") + e.what());
  }
}

std::string spec_to_json(const PotentialSpec& spec) {
  json deltas = json::array();
  for (const auto& d : spec.deltas()) deltas.push_back({{"offset", d.offset}, {"strength", d.strength}});
  json smooth = json::array();
  for (const auto& p : spec.smooth()) smooth.push_back({{"lo", p.lo}, {"hi", p.hi}, {"profile", profile_json(p.profile)}});
  const json j = {{"period", spec.period()}, {"amplitude", spec.amplitude()}, {"deltas", deltas}, {"smooth", smooth}};
  return j.dump();
}

}  // namespace tslab
