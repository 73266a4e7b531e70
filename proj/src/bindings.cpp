#include <sstream>
#include <string>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "warpgeo/cli.hpp"
#include "warpgeo/geodesic.hpp"
#include "warpgeo/isometry.hpp"
#include "warpgeo/riccati.hpp"
#include "warpgeo/serialize.hpp"
#include "warpgeo/two_point.hpp"
#include "warpgeo/warp.hpp"

namespace py = pybind11;
using namespace warpgeo;

namespace {

py::object to_python(const json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

Point point_of(const std::pair<double, double>& p) { return {p.first, p.second}; }

ConnectOptions connect_options(double tol) {
    ConnectOptions opts;
    opts.tol = tol;
    return opts;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Warped half-plane metrics dr^2 + dt^2/h(r)^2";

    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);

    py::class_<WarpFunction>(m, "Warp")
        .def(py::init([](const std::string& spec) { return make_warp(parse_warp_spec(spec)); }), py::arg("spec"))
        .def_property_readonly("label", &WarpFunction::label)
        .def_property_readonly("domain",
                               [](const WarpFunction& w) { return py::make_tuple(w.domain().lo, w.domain().hi); })
        .def("in_domain", &WarpFunction::in_domain)
        .def("h", &WarpFunction::h)
        .def("dh", &WarpFunction::dh)
        .def("d2h", &WarpFunction::d2h)
        .def("H", &WarpFunction::H)
        .def("curvature", [](const WarpFunction& w, double r) { return sectional_curvature(w, r); })
        .def("curvature_oracle", [](const WarpFunction& w, double r, double step) { return curvature_oracle(w, r, step); },
             py::arg("r"), py::arg("step") = 1e-3)
        .def("__repr__", [](const WarpFunction& w) { return "Warp('" + w.label() + "')"; });

    m.def(
        "integrate",
        [](const WarpFunction& w, double r0, double t0, double angle, double s_max) {
            const GeodesicPath path = integrate(w, state_from_angle(Point(r0, t0), angle), s_max);
            py::dict out;
            std::vector<double> s, r, t, f, g;
            for (const auto& smp : path.samples) {
                s.push_back(smp.s);
                r.push_back(smp.state.r);
                t.push_back(smp.state.t);
                f.push_back(smp.state.f);
                g.push_back(smp.state.g);
            }
            out["s"] = s;
            out["r"] = r;
            out["t"] = t;
            out["f"] = f;
            out["g"] = g;
            out["escaped"] = path.escaped;
            out["length"] = path.total_length;
            return out;
        },
        py::arg("warp"), py::arg("r0"), py::arg("t0"), py::arg("angle"), py::arg("s_max"));

    m.def(
        "escape_length",
        [](const WarpFunction& w, double r0, double t0, double angle, double cap) {
            return escape_length(w, state_from_angle(Point(r0, t0), angle), cap);
        },
        py::arg("warp"), py::arg("r0"), py::arg("t0"), py::arg("angle"), py::arg("cap") = 1e3);

    m.def(
        "solve_riccati",
        [](const std::string& profile, double r0, double H0, double lo, double hi, double tol) {
            const CurvatureProfile f = parse_profile(profile);
            const HField field = solve_prescribed(f, r0, H0, Interval{lo, hi});
            json j = to_json(field);
            j["report"] = to_json(verify_field(field, f, tol));
            return to_python(j);
        },
        py::arg("profile"), py::arg("r0"), py::arg("H0"), py::arg("lo"), py::arg("hi"), py::arg("tol") = 1e-6);

    m.def(
        "connect",
        [](const std::string& metric, std::pair<double, double> p0, std::pair<double, double> p1, double tol) {
            const auto opts = connect_options(tol);
            if (metric == "ds1") return to_python(to_json(connect_ds1(point_of(p0), point_of(p1), opts)));
            if (metric == "ds2") return to_python(to_json(connect_ds2(point_of(p0), point_of(p1), opts)));
            throw std::invalid_argument("metric must be 'ds1' or 'ds2'");
        },
        py::arg("metric"), py::arg("p0"), py::arg("p1"), py::arg("tol") = 1e-9);

    m.def(
        "distance_ds1",
        [](std::pair<double, double> p0, std::pair<double, double> p1) {
            return distance_ds1(point_of(p0), point_of(p1));
        },
        py::arg("p0"), py::arg("p1"));

    m.def(
        "chord_distance",
        [](std::pair<double, double> p0, std::pair<double, double> p1) {
            const Point a = point_of(p0), b = point_of(p1);
            return chord_distance(a, b, chord_alpha(a, b));
        },
        py::arg("p0"), py::arg("p1"));

    m.def(
        "classify",
        [](const WarpFunction& w, double k, double l, std::uint64_t seed, double tol) {
            ClassifyOptions opts;
            opts.seed = seed;
            opts.tol = tol;
            return to_python(to_json(classify(w, AffineMap(k, l), opts)));
        },
        py::arg("warp"), py::arg("k"), py::arg("l") = 0.0, py::arg("seed") = 0, py::arg("tol") = 1e-9);

    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::ostringstream out, err;
            const int code = run_cli(args, out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"));
}
