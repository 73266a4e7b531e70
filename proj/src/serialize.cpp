#include "warpgeo/serialize.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace warpgeo {

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

double number_from(const json& j) { return j.is_null() ? kInfinity : j.get<double>(); }

json to_json(const RiccatiReport& rep) {
    json j;
    j["max_residual"] = number_or_null(rep.max_residual);
    j["grid_size"] = rep.grid_size;
    j["pass"] = rep.pass;
    if (rep.blowup_location) j["blowup_location"] = *rep.blowup_location;
    return j;
}

RiccatiReport riccati_report_from_json(const json& j) {
    RiccatiReport rep;
    rep.max_residual = number_from(j.at("max_residual"));
    rep.grid_size = j.at("grid_size").get<std::size_t>();
    rep.pass = j.at("pass").get<bool>();
    if (j.contains("blowup_location")) rep.blowup_location = j.at("blowup_location").get<double>();
    return rep;
}

json to_json(const HField& field) {
    json j;
    j["r0"] = field.r0;
    j["r"] = field.r;
    j["H"] = field.H;
    j["h"] = field.h;
    if (field.blowup) j["blowup"] = *field.blowup;
    return j;
}

namespace {

json state_json(const GeodesicState& s) { return {{"r", s.r}, {"t", s.t}, {"f", s.f}, {"g", s.g}}; }

GeodesicState state_from(const json& j) {
    return {j.at("r").get<double>(), j.at("t").get<double>(), j.at("f").get<double>(),
            j.at("g").get<double>()};
}

std::string sign_text(Sign s) { return s == Sign::Plus ? "+" : "-"; }

Sign sign_parse(const std::string& s) {
    if (s == "+") return Sign::Plus;
    if (s == "-") return Sign::Minus;
    throw std::invalid_argument("bad sign '" + s + "'");
}

}  // namespace

json to_json(const ConnectResult& res) {
    json j;
    if (const auto* h = std::get_if<Horizontal>(&res)) {
        j["result"] = "horizontal";
        j["length"] = h->length;
    } else if (const auto* f = std::get_if<Found>(&res)) {
        j["result"] = "found";
        j["s"] = f->s;
        j["family_param"] = f->family_param;
        j["sign"] = sign_text(f->sign);
        j["length"] = f->length;
        j["replay_miss"] = number_or_null(f->replay_miss);
        j["iterations"] = f->iterations;
        j["initial"] = state_json(f->initial);
        j["path_samples"] = f->path.samples.size();
        json alts = json::array();
        for (const auto& a : f->alternatives) {
            alts.push_back({{"s", a.s}, {"family_param", a.family_param}, {"sign", sign_text(a.sign)},
                            {"length", a.length}});
        }
        j["alternatives"] = alts;
    } else {
        const auto& n = std::get<NoGeodesic>(res);
        j["result"] = "no_geodesic";
        j["reason"] = to_string(n.reason);
        j["iterations"] = n.iterations;
    }
    return j;
}

ConnectResult connect_result_from_json(const json& j) {
    const std::string kind = j.at("result").get<std::string>();
    if (kind == "horizontal") return Horizontal{j.at("length").get<double>()};
    if (kind == "found") {
        Found f;
        f.s = j.at("s").get<double>();
        f.family_param = j.at("family_param").get<double>();
        f.sign = sign_parse(j.at("sign").get<std::string>());
        f.length = j.at("length").get<double>();
        f.replay_miss = number_from(j.at("replay_miss"));
        f.iterations = j.at("iterations").get<int>();
        f.initial = state_from(j.at("initial"));
        for (const auto& a : j.at("alternatives")) {
            f.alternatives.push_back({a.at("s").get<double>(), a.at("family_param").get<double>(),
                                      sign_parse(a.at("sign").get<std::string>()),
                                      a.at("length").get<double>()});
        }
        return f;
    }
    if (kind == "no_geodesic") {
        const std::string reason = j.at("reason").get<std::string>();
        NoGeodesic n;
        if (reason == "threshold-violated") {
            n.reason = NoGeodesicReason::ThresholdViolated;
        } else if (reason == "search-exhausted") {
            n.reason = NoGeodesicReason::SearchExhausted;
        } else {
            throw std::invalid_argument("unknown no-geodesic reason '" + reason + "'");
        }
        n.iterations = j.at("iterations").get<int>();
        return n;
    }
    throw std::invalid_argument("unknown connect result '" + kind + "'");
}

json to_json(const GridSpec& g) {
    return {{"r_min", g.r_min}, {"r_max", g.r_max}, {"t_min", g.t_min},
            {"t_max", g.t_max}, {"nr", g.nr},       {"nt", g.nt}};
}

GridSpec grid_spec_from_json(const json& j) {
    GridSpec g;
    g.r_min = j.at("r_min").get<double>();
    g.r_max = j.at("r_max").get<double>();
    g.t_min = j.at("t_min").get<double>();
    g.t_max = j.at("t_max").get<double>();
    g.nr = j.at("nr").get<int>();
    g.nt = j.at("nt").get<int>();
    return g;
}

json to_json(const IsometryReport& rep) {
    json j;
    j["holomorphy_residual"] = number_or_null(rep.holomorphy_residual);
    j["isometry_residual"] = number_or_null(rep.isometry_residual);
    j["verdict"] = to_string(rep.verdict);
    j["tol"] = rep.tol;
    j["seed"] = rep.seed;
    j["grid"] = to_json(rep.grid);
    return j;
}

IsometryReport isometry_report_from_json(const json& j) {
    IsometryReport rep;
    rep.holomorphy_residual = number_from(j.at("holomorphy_residual"));
    rep.isometry_residual = number_from(j.at("isometry_residual"));
    const std::string v = j.at("verdict").get<std::string>();
    if (v == "holomorphic_isometry") {
        rep.verdict = Verdict::HolomorphicIsometry;
    } else if (v == "isometry_only") {
        rep.verdict = Verdict::IsometryOnly;
    } else if (v == "holomorphic_only") {
        rep.verdict = Verdict::HolomorphicOnly;
    } else if (v == "neither") {
        rep.verdict = Verdict::Neither;
    } else {
        throw std::invalid_argument("unknown verdict '" + v + "'");
    }
    rep.tol = j.at("tol").get<double>();
    rep.seed = j.at("seed").get<std::uint64_t>();
    rep.grid = grid_spec_from_json(j.at("grid"));
    return rep;
}

namespace {

std::vector<double> parse_numbers(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            throw std::invalid_argument("bad number '" + item + "'");
        }
        if (used != item.size()) throw std::invalid_argument("bad number '" + item + "'");
        out.push_back(v);
    }
    return out;
}

WarpKind kind_from_name(const std::string& name) {
    if (name == "one_over_r") return WarpKind::OneOverR;
    if (name == "r") return WarpKind::R;
    if (name == "exp") return WarpKind::Exp;
    if (name == "flat") return WarpKind::FlatFamily;
    if (name == "neg2") return WarpKind::Neg2Family;
    if (name == "custom") return WarpKind::Custom;
    throw std::invalid_argument("unknown warp '" + name + "'");
}

}  // namespace

WarpSpec parse_warp_spec(const std::string& text) {
    const auto colon = text.find(':');
    WarpSpec spec;
    spec.kind = kind_from_name(text.substr(0, colon));
    if (spec.kind == WarpKind::Custom) {
        throw std::invalid_argument("custom warps are only accepted from a config file");
    }
    if (colon != std::string::npos) spec.params = parse_numbers(text.substr(colon + 1));
    return spec;
}

std::string format_warp_spec(const WarpSpec& spec) {
    std::string out = to_string(spec.kind);
    char buf[32];
    for (std::size_t i = 0; i < spec.params.size(); ++i) {
        out += i ? ',' : ':';
        const auto res = std::to_chars(buf, buf + sizeof buf, spec.params[i]);
        out.append(buf, res.ptr);
    }
    return out;
}

WarpSpec warp_spec_from_json(const json& j) {
    if (j.is_string()) return parse_warp_spec(j.get<std::string>());
    WarpSpec spec;
    spec.kind = kind_from_name(j.at("kind").get<std::string>());
    if (j.contains("params")) spec.params = j.at("params").get<std::vector<double>>();
    if (j.contains("domain")) {
        const auto d = j.at("domain");
        spec.domain = Interval{number_from(d.at(0)), number_from(d.at(1))};
    }
    if (spec.kind == WarpKind::Custom) {
        WarpTable tab;
        tab.r_min = j.at("r_min").get<double>();
        tab.r_max = j.at("r_max").get<double>();
        tab.h = j.at("h").get<std::vector<double>>();
        spec.table = std::move(tab);
    }
    return spec;
}

json to_json(const WarpSpec& spec) {
    json j;
    j["kind"] = to_string(spec.kind);
    j["params"] = spec.params;
    if (spec.domain) j["domain"] = {spec.domain->lo, number_or_null(spec.domain->hi)};
    if (spec.table) {
        j["r_min"] = spec.table->r_min;
        j["r_max"] = spec.table->r_max;
        j["h"] = spec.table->h;
    }
    return j;
}

CurvatureProfile parse_profile(const std::string& text) {
    if (text == "zero") return CurvatureProfile::constant(0.0);
    const auto colon = text.find(':');
    if (colon != std::string::npos) {
        const std::string name = text.substr(0, colon);
        const auto c = parse_numbers(text.substr(colon + 1));
        if (c.size() == 1 && name == "const") return CurvatureProfile::constant(c[0]);
        if (c.size() == 1 && name == "inv2") return CurvatureProfile::inverse_square(c[0]);
    }
    throw std::invalid_argument("unknown curvature profile '" + text + "'");
}

}  // namespace warpgeo
