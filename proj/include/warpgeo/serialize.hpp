#pragma once

#include "json.hpp"

#include "warpgeo/isometry.hpp"
#include "warpgeo/riccati.hpp"
#include "warpgeo/two_point.hpp"
#include "warpgeo/warp.hpp"

namespace warpgeo {

using json = nlohmann::ordered_json;

// Non-finite doubles are written as null and read back as +inf.
json number_or_null(double x);
double number_from(const json& j);

json to_json(const RiccatiReport& rep);
RiccatiReport riccati_report_from_json(const json& j);

json to_json(const HField& field);

// Found results carry only the number of path samples, not the samples themselves.
json to_json(const ConnectResult& res);
ConnectResult connect_result_from_json(const json& j);

json to_json(const GridSpec& grid);
GridSpec grid_spec_from_json(const json& j);

json to_json(const IsometryReport& rep);
IsometryReport isometry_report_from_json(const json& j);

// Text form "one_over_r", "r", "exp", "flat:a0,a1", "neg2:c0,c1,c2".
WarpSpec parse_warp_spec(const std::string& text);
std::string format_warp_spec(const WarpSpec& spec);

// Either the text form or {"kind": ..., "params": [...], "domain": [lo, hi]},
// with kind "custom" taking {"r_min", "r_max", "h": [...]}.
WarpSpec warp_spec_from_json(const json& j);
json to_json(const WarpSpec& spec);

// "zero", "const:c" or "inv2:c" (c / r^2).
CurvatureProfile parse_profile(const std::string& text);

}  // namespace warpgeo
