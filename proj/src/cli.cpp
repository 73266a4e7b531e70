#include "warpgeo/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "CLI11.hpp"

#include "warpgeo/geodesic.hpp"
#include "warpgeo/isometry.hpp"
#include "warpgeo/riccati.hpp"
#include "warpgeo/serialize.hpp"
#include "warpgeo/two_point.hpp"

namespace warpgeo {

namespace {

OutputFormat parse_format(const std::string& s) {
    if (s == "json") return OutputFormat::Json;
    if (s == "csv") return OutputFormat::Csv;
    throw std::invalid_argument("format must be json or csv, got '" + s + "'");
}

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::vector<double> split_numbers(const std::string& text, char sep, std::size_t expected,
                                  const std::string& what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, sep)) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != item.size()) {
            throw std::invalid_argument(what + ": bad number '" + item + "'");
        }
        out.push_back(v);
    }
    if (out.size() != expected) {
        throw std::invalid_argument(what + ": expected " + std::to_string(expected) + " values");
    }
    return out;
}

Point make_point(double r, double t, const std::string& what) {
    try {
        return {r, t};
    } catch (const std::invalid_argument& e) {
        throw DomainError(what + ": " + e.what());
    }
}

Point parse_point(const std::string& text, const std::string& what) {
    const auto v = split_numbers(text, ',', 2, what);
    return make_point(v[0], v[1], what);
}

// "lo:hi:n" -> n evenly spaced values including both ends.
std::vector<double> parse_range(const std::string& text, const std::string& what) {
    const auto v = split_numbers(text, ':', 3, what);
    if (v[2] < 0.0 || v[2] != std::floor(v[2])) {
        throw std::invalid_argument(what + ": count must be a non-negative integer");
    }
    const auto n = static_cast<std::size_t>(v[2]);
    std::vector<double> out;
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(n == 1 ? v[0] : v[0] + (v[1] - v[0]) * static_cast<double>(i) / (n - 1));
    }
    return out;
}

StepControl step_control(const RunConfig& cfg, StepControl base) {
    if (cfg.abs_tol) base.abs_tol = *cfg.abs_tol;
    if (cfg.rel_tol) base.rel_tol = *cfg.rel_tol;
    if (cfg.max_step) base.max_step = *cfg.max_step;
    base.validate();
    return base;
}

// Writes to --out when given, otherwise to the command's stream.
class Sink {
public:
    Sink(const RunConfig& cfg, std::ostream& fallback) : stream_(&fallback) {
        if (cfg.out_path) {
            file_.open(*cfg.out_path, std::ios::binary | std::ios::trunc);
            if (!file_) throw std::runtime_error("cannot open output file '" + *cfg.out_path + "'");
            stream_ = &file_;
        }
    }
    std::ostream& stream() { return *stream_; }
    bool to_file() const { return file_.is_open(); }

private:
    std::ofstream file_;
    std::ostream* stream_;
};

// Companion gnuplot script for a CSV data file written with --out.
void write_plot_script(const RunConfig& cfg, const std::string& command) {
    if (!cfg.plot_path) return;
    if (!cfg.out_path || cfg.format.value_or(OutputFormat::Csv) != OutputFormat::Csv) {
        throw std::invalid_argument("--plot needs CSV output written to a file with --out");
    }
    std::ofstream os(*cfg.plot_path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open plot script '" + *cfg.plot_path + "'");
    const std::string data = "'" + *cfg.out_path + "'";
    os << "set datafile separator ','\nset key autotitle columnhead\n";
    if (command == "curvature") {
        os << "set xlabel 'r'\nset ylabel 'K'\n"
           << "plot " << data << " using 1:2 with lines, '' using 1:3 with points\n";
    } else if (command == "geodesic") {
        os << "set xlabel 't'\nset ylabel 'r'\nset datafile commentschars '#'\n"
           << "plot " << data << " using 3:2 with lines\n";
    } else if (command == "sweep") {
        os << "set xlabel 't1'\nset ylabel 'r1'\nset palette defined (0 'red', 1 'blue')\n"
           << "plot " << data << " using 4:3:5 with points pt 7 palette\n";
    } else {
        os << "set xlabel 'r'\nset datafile commentschars '#'\n"
           << "plot " << data << " using 1:2 with lines title 'H', '' using 1:3 with lines title 'h'\n";
    }
}

void require_range(const WarpFunction& w, double lo, double hi) {
    if (!w.in_domain(lo) || !w.in_domain(hi)) {
        throw DomainError("range [" + num(lo) + ", " + num(hi) + "] leaves the domain of " + w.label());
    }
}

int cmd_curvature(const RunConfig& cfg, double r_min, double r_max, int n, double step, std::ostream& out) {
    if (!(r_min > 0.0) || !(r_max > r_min) || n < 2) {
        throw std::invalid_argument("curvature needs 0 < r-min < r-max and n >= 2");
    }
    const WarpFunction w = make_warp(cfg.warp);
    require_range(w, r_min, r_max);
    Sink sink(cfg, out);
    auto& os = sink.stream();
    const bool csv = cfg.format.value_or(OutputFormat::Csv) == OutputFormat::Csv;
    json rows = json::array();
    if (csv) os << "r,K,K_oracle,abs_diff\n";
    for (int i = 0; i < n; ++i) {
        const double r = i == n - 1 ? r_max : r_min + (r_max - r_min) * i / (n - 1);
        const double k = sectional_curvature(w, r);
        const double ko = curvature_oracle(w, r, step);
        const double d = std::abs(k - ko);
        if (csv) {
            os << num(r) << ',' << num(k) << ',' << num(ko) << ',' << num(d) << '\n';
        } else {
            rows.push_back({{"r", r}, {"K", k}, {"K_oracle", ko}, {"abs_diff", d}});
        }
    }
    if (!csv) os << json{{"warp", format_warp_spec(cfg.warp)}, {"rows", rows}}.dump(2) << '\n';
    write_plot_script(cfg, "curvature");
    return kExitOk;
}

int cmd_geodesic(const RunConfig& cfg, double r0, double t0, double angle, double s_max, std::ostream& out) {
    if (!(s_max >= 0.0) || !std::isfinite(s_max)) throw std::invalid_argument("s-max must be finite and >= 0");
    const WarpFunction w = make_warp(cfg.warp);
    const Point p0 = make_point(r0, t0, "start");
    w.require_in_domain(p0.r());
    IntegrateOptions opts;
    StepControl base;
    base.max_step = s_max > 0.0 ? s_max / 256.0 : 1.0;
    opts.control = step_control(cfg, base);
    const GeodesicPath path = integrate(w, state_from_angle(p0, angle), s_max, opts);
    const GeodesicState& end = path.end();

    Sink sink(cfg, out);
    if (cfg.format.value_or(OutputFormat::Csv) == OutputFormat::Csv) {
        write_path_csv(sink.stream(), path);
        std::ostream& summary = sink.to_file() ? out : sink.stream();
        summary << (sink.to_file() ? "" : "# ") << "escaped=" << (path.escaped ? "true" : "false")
                << ",length=" << num(path.total_length) << ",end_r=" << num(end.r)
                << ",end_t=" << num(end.t) << '\n';
    } else {
        json samples = json::array();
        for (const auto& smp : path.samples) {
            samples.push_back({smp.s, smp.state.r, smp.state.t, smp.state.f, smp.state.g});
        }
        json j{{"warp", format_warp_spec(cfg.warp)},
               {"escaped", path.escaped},
               {"length", path.total_length},
               {"end", {{"r", end.r}, {"t", end.t}, {"f", end.f}, {"g", end.g}}},
               {"columns", {"s", "r", "t", "f", "g"}},
               {"samples", samples}};
        sink.stream() << j.dump(2) << '\n';
    }
    write_plot_script(cfg, "geodesic");
    return kExitOk;
}

Metric metric_of(const WarpSpec& spec) {
    if (spec.kind == WarpKind::OneOverR && !spec.domain) return Metric::DS1;
    if (spec.kind == WarpKind::R && !spec.domain) return Metric::DS2;
    throw DomainError("two-point solving is available for the one_over_r and r warps only");
}

ConnectOptions connect_options(const RunConfig& cfg) {
    ConnectOptions opts;
    if (cfg.tol) opts.tol = *cfg.tol;
    if (!(opts.tol > 0.0)) throw std::invalid_argument("tol must be positive");
    if (cfg.abs_tol || cfg.rel_tol || cfg.max_step) opts.replay.control = step_control(cfg, opts.replay.control);
    return opts;
}

int cmd_connect(const RunConfig& cfg, const std::string& a, const std::string& b, std::ostream& out) {
    const Point p0 = parse_point(a, "p0");
    const Point p1 = parse_point(b, "p1");
    if (p0 == p1) throw std::invalid_argument("connect needs two distinct points");
    const Metric metric = metric_of(cfg.warp);
    const ConnectOptions opts = connect_options(cfg);
    const ConnectResult res = metric == Metric::DS1 ? connect_ds1(p0, p1, opts) : connect_ds2(p0, p1, opts);

    Sink sink(cfg, out);
    if (cfg.format.value_or(OutputFormat::Json) == OutputFormat::Json) {
        sink.stream() << to_json(res).dump(2) << '\n';
    } else {
        auto& os = sink.stream();
        os << "result,length,s,family_param,sign,iterations\n";
        if (const auto* h = std::get_if<Horizontal>(&res)) {
            os << "horizontal," << num(h->length) << ",,,,0\n";
        } else if (const auto* f = std::get_if<Found>(&res)) {
            os << "found," << num(f->length) << ',' << num(f->s) << ',' << num(f->family_param) << ','
               << (f->sign == Sign::Plus ? '+' : '-') << ',' << f->iterations << '\n';
        } else {
            const auto& ng = std::get<NoGeodesic>(res);
            os << "no_geodesic:" << to_string(ng.reason) << ",,,,," << ng.iterations << '\n';
        }
    }
    return connected(res) ? kExitOk : kExitNoGeodesic;
}

int cmd_sweep(const RunConfig& cfg, const std::string& p0_text, const std::string& r1_text,
              const std::string& t1_text, unsigned workers, std::ostream& out) {
    const Point p0 = parse_point(p0_text, "p0");
    const Metric metric = metric_of(cfg.warp);
    const std::vector<double> r1 = parse_range(r1_text, "r1");
    const std::vector<double> t1 = parse_range(t1_text, "t1");
    std::vector<Point> targets;
    for (double r : r1) {
        if (!(r > 0.0)) throw DomainError("sweep grid leaves the half plane at r1 = " + num(r));
        for (double t : t1) targets.emplace_back(r, t);
    }
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    const auto rows = sweep_connect(metric, p0, targets, workers, connect_options(cfg));

    Sink sink(cfg, out);
    if (cfg.format.value_or(OutputFormat::Csv) == OutputFormat::Csv) {
        write_atlas_csv(sink.stream(), rows);
    } else {
        json arr = json::array();
        for (const auto& row : rows) {
            arr.push_back({{"r0", row.p0.r()},
                           {"t0", row.p0.t()},
                           {"r1", row.p1.r()},
                           {"t1", row.p1.t()},
                           {"exists", row.exists},
                           {"length", row.length ? json(*row.length) : json(nullptr)},
                           {"iterations", row.iterations}});
        }
        sink.stream() << json{{"warp", format_warp_spec(cfg.warp)}, {"rows", arr}}.dump(2) << '\n';
    }
    write_plot_script(cfg, "sweep");
    return kExitOk;
}

int cmd_riccati(const RunConfig& cfg, const std::string& profile, double r0, double H0,
                const std::string& range_text, std::ostream& out) {
    const CurvatureProfile f = parse_profile(profile);
    const auto range = split_numbers(range_text, ',', 2, "range");
    RiccatiOptions opts;
    opts.control = step_control(cfg, opts.control);
    const HField field = solve_prescribed(f, r0, H0, Interval{range[0], range[1]}, opts);
    const RiccatiReport report = verify_field(field, f, cfg.tol.value_or(1e-6));

    Sink sink(cfg, out);
    if (cfg.format.value_or(OutputFormat::Csv) == OutputFormat::Csv) {
        auto& os = sink.stream();
        os << "r,H,h\n";
        for (std::size_t i = 0; i < field.r.size(); ++i) {
            os << num(field.r[i]) << ',' << num(field.H[i]) << ',' << num(field.h[i]) << '\n';
        }
        std::ostream& summary = sink.to_file() ? out : os;
        summary << (sink.to_file() ? "" : "# ") << to_json(report).dump() << '\n';
    } else {
        sink.stream() << json{{"profile", profile}, {"field", to_json(field)}, {"report", to_json(report)}}.dump(2)
                      << '\n';
    }
    write_plot_script(cfg, "riccati");
    return kExitOk;
}

int cmd_isometry(const RunConfig& cfg, double k, double l, const std::string& grid_text, std::ostream& out) {
    if (!(k > 0.0)) throw DomainError("isometry needs k > 0");
    const WarpFunction w = make_warp(cfg.warp);
    ClassifyOptions opts;
    opts.seed = cfg.seed;
    if (cfg.tol) opts.tol = *cfg.tol;
    if (!grid_text.empty()) {
        const auto g = split_numbers(grid_text, ',', 6, "grid");
        opts.grid = GridSpec{g[0], g[1], g[2], g[3], static_cast<int>(g[4]), static_cast<int>(g[5])};
    }
    const IsometryReport rep = classify(w, AffineMap(k, l), opts);

    Sink sink(cfg, out);
    if (cfg.format.value_or(OutputFormat::Json) == OutputFormat::Json) {
        json j = to_json(rep);
        j["warp"] = format_warp_spec(cfg.warp);
        j["k"] = k;
        j["l"] = l;
        sink.stream() << j.dump(2) << '\n';
    } else {
        sink.stream() << "k,l,holomorphy_residual,isometry_residual,verdict\n"
                      << num(k) << ',' << num(l) << ',' << num(rep.holomorphy_residual) << ','
                      << num(rep.isometry_residual) << ',' << to_string(rep.verdict) << '\n';
    }
    return kExitOk;
}

}  // namespace

void RunConfig::validate() const {
    for (const auto& v : {abs_tol, rel_tol, max_step, tol}) {
        if (v && !(*v > 0.0)) throw std::invalid_argument("tolerances and step bounds must be positive");
    }
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read config file '" + path + "'");
    const json j = json::parse(in);
    RunConfig cfg;
    if (j.contains("warp")) cfg.warp = warp_spec_from_json(j.at("warp"));
    if (j.contains("integrator")) {
        const auto& integ = j.at("integrator");
        if (integ.contains("abs_tol")) cfg.abs_tol = integ.at("abs_tol").get<double>();
        if (integ.contains("rel_tol")) cfg.rel_tol = integ.at("rel_tol").get<double>();
        if (integ.contains("max_step")) cfg.max_step = integ.at("max_step").get<double>();
    }
    if (j.contains("output")) {
        const auto& o = j.at("output");
        if (o.contains("format")) cfg.format = parse_format(o.at("format").get<std::string>());
        if (o.contains("path")) cfg.out_path = o.at("path").get<std::string>();
        if (o.contains("plot")) cfg.plot_path = o.at("plot").get<std::string>();
    }
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("tol")) cfg.tol = j.at("tol").get<double>();
    cfg.validate();
    return cfg;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Geometry of warped half-plane metrics dr^2 + dt^2/h(r)^2", "warpgeo"};
    app.require_subcommand(1);

    std::string warp_text;
    std::string config_path;
    std::string format_text;
    std::string out_path;
    std::string plot_path;
    double tol = 0.0;
    double abs_tol = 0.0;
    double rel_tol = 0.0;
    double max_step = 0.0;
    std::uint64_t seed = 0;
    auto* o_warp = app.add_option("--warp", warp_text,
                                  "one_over_r | r | exp | flat:a0,a1 | neg2:c0,c1,c2 (default one_over_r)");
    auto* o_config = app.add_option("--config", config_path, "JSON config file (default: $WARPGEO_CONFIG)");
    auto* o_format = app.add_option("--format", format_text,
                                    "json | csv (default csv for curvature, geodesic, sweep and riccati; "
                                    "json for connect and isometry)");
    auto* o_out = app.add_option("--out", out_path, "output file (default stdout)");
    auto* o_tol = app.add_option("--tol", tol,
                                 "acceptance tolerance: replay miss for connect/sweep (1e-9), "
                                 "residual for isometry (1e-9) and riccati (1e-6)");
    auto* o_seed = app.add_option("--seed", seed, "random seed for sampled test vectors (default 0)");
    auto* o_abs = app.add_option("--abs-tol", abs_tol, "integrator absolute tolerance (default 1e-10)");
    auto* o_rel = app.add_option("--rel-tol", rel_tol, "integrator relative tolerance (default 1e-10)");
    auto* o_max = app.add_option("--max-step", max_step, "integrator maximum step");
    auto* o_plot = app.add_option("--plot", plot_path,
                                  "also write a gnuplot script for the CSV file named by --out "
                                  "(curvature, geodesic, sweep, riccati)");

    auto* curv = app.add_subcommand("curvature", "tabulate K and its finite-difference oracle");
    double c_rmin = 0.0, c_rmax = 0.0, c_step = 1e-3;
    int c_n = 0;
    curv->add_option("--r-min", c_rmin, "lower end of the r range")->required();
    curv->add_option("--r-max", c_rmax, "upper end of the r range")->required();
    curv->add_option("--n", c_n, "number of rows (>= 2)")->required();
    curv->add_option("--step", c_step, "relative oracle step (default 1e-3)");

    auto* geo = app.add_subcommand("geodesic", "integrate a unit-speed geodesic");
    double g_r0 = 0.0, g_t0 = 0.0, g_angle = 0.0, g_smax = 0.0;
    geo->add_option("--r0", g_r0, "start r")->required();
    geo->add_option("--t0", g_t0, "start t (default 0)");
    geo->add_option("--angle", g_angle, "launch angle from d_r toward T_h (default 0)");
    geo->add_option("--s-max", g_smax, "arc length to integrate")->required();

    auto* con = app.add_subcommand("connect", "solve the two-point problem (exit 2 when no geodesic)");
    std::string c_p0, c_p1;
    con->add_option("--p0", c_p0, "start point r,t")->required();
    con->add_option("--p1", c_p1, "end point r,t")->required();

    auto* swp = app.add_subcommand("sweep", "connect p0 to every point of an (r1, t1) grid");
    std::string s_p0, s_r1, s_t1;
    unsigned s_workers = 1;
    swp->add_option("--p0", s_p0, "start point r,t")->required();
    swp->add_option("--r1", s_r1, "target radii lo:hi:n")->required();
    swp->add_option("--t1", s_t1, "target angles lo:hi:n")->required();
    swp->add_option("--workers", s_workers, "worker threads, 0 for all cores (default 1)");

    auto* ric = app.add_subcommand("riccati", "solve H' = H^2 + f from (r0, H0) and verify the result");
    std::string r_profile, r_range;
    double r_r0 = 0.0, r_H0 = 0.0;
    ric->add_option("--profile", r_profile, "zero | const:c | inv2:c (c/r^2)")->required();
    ric->add_option("--r0", r_r0, "initial radius")->required();
    ric->add_option("--H0", r_H0, "initial value of H")->required();
    ric->add_option("--range", r_range, "integration range lo,hi")->required();

    auto* iso = app.add_subcommand("isometry", "classify (r, t) -> (k r, k t + l)");
    double i_k = 0.0, i_l = 0.0;
    std::string i_grid;
    iso->add_option("--k", i_k, "scale factor")->required();
    iso->add_option("--l", i_l, "translation (default 0)");
    iso->add_option("--grid", i_grid, "sample grid r_min,r_max,t_min,t_max,nr,nt (default 0.1,5,-3,3,20,20)");

    for (auto* sub : app.get_subcommands({})) sub->fallthrough();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitError;
    }

    try {
        RunConfig cfg;
        std::string cfg_file = config_path;
        if (o_config->count() == 0) {
            if (const char* env = std::getenv("WARPGEO_CONFIG"); env && *env) cfg_file = env;
        }
        if (!cfg_file.empty()) cfg = load_config(cfg_file);
        if (o_warp->count()) cfg.warp = parse_warp_spec(warp_text);
        if (o_format->count()) cfg.format = parse_format(format_text);
        if (o_out->count()) cfg.out_path = out_path;
        if (o_tol->count()) cfg.tol = tol;
        if (o_seed->count()) cfg.seed = seed;
        if (o_abs->count()) cfg.abs_tol = abs_tol;
        if (o_rel->count()) cfg.rel_tol = rel_tol;
        if (o_max->count()) cfg.max_step = max_step;
        if (o_plot->count()) cfg.plot_path = plot_path;
        cfg.validate();

        if (*curv) return cmd_curvature(cfg, c_rmin, c_rmax, c_n, c_step, out);
        if (*geo) return cmd_geodesic(cfg, g_r0, g_t0, g_angle, g_smax, out);
        if (*con) return cmd_connect(cfg, c_p0, c_p1, out);
        if (*swp) return cmd_sweep(cfg, s_p0, s_r1, s_t1, s_workers, out);
        if (*ric) return cmd_riccati(cfg, r_profile, r_r0, r_H0, r_range, out);
        if (*iso) return cmd_isometry(cfg, i_k, i_l, i_grid, out);
    } catch (const std::exception& e) {
        err << "warpgeo: " << e.what() << '\n';
        return kExitError;
    }
    return kExitError;
}

}  // namespace warpgeo
