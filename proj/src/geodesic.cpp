#include "warpgeo/geodesic.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>

namespace warpgeo {

namespace {

constexpr std::size_t kDim = 4;
using Y = OdeState<kDim>;

Y pack(const GeodesicState& s) { return {s.r, s.t, s.f, s.g}; }
GeodesicState unpack(const Y& y) { return {y[0], y[1], y[2], y[3]}; }

void renormalize(Y& y) {
    const double n = std::hypot(y[2], y[3]);
    y[2] /= n;
    y[3] /= n;
}

}  // namespace

GeodesicState state_from_angle(const Point& p, double angle) {
    return {p.r(), p.t(), std::cos(angle), std::sin(angle)};
}

GeodesicDerivative geodesic_field(const WarpFunction& w, const GeodesicState& st) {
    const double H = w.H(st.r);
    return {st.f, w.h(st.r) * st.g, -st.g * st.g * H, st.f * st.g * H};
}

GeodesicPath integrate(const WarpFunction& w, const GeodesicState& init, double s_max,
                       const IntegrateOptions& opts) {
    const StepControl& ctl = opts.control;
    ctl.validate();
    if (!(s_max > 0.0)) throw std::invalid_argument("s_max must be positive");
    if (!(std::abs(init.speed_defect()) <= 1e-6)) {
        throw std::invalid_argument("initial frame velocity is not unit speed");
    }
    if (!std::isfinite(init.t)) throw std::invalid_argument("initial t must be finite");
    w.require_in_domain(init.r);

    const Interval dom = w.domain();
    auto inside = [&](double r) {
        return r > dom.lo + opts.escape_margin && r < dom.hi - opts.escape_margin;
    };
    auto field = [&w](double, const Y& y) {
        const auto d = geodesic_field(w, unpack(y));
        return Y{d.dr, d.dt, d.df, d.dg};
    };
    // Single step that reports failure instead of throwing when a stage leaves the domain.
    auto try_step = [&](double s, const Y& y, const Y& dy, double h) -> std::optional<StepTrial<kDim>> {
        try {
            auto trial = dormand_prince_step<kDim>(field, s, y, dy, h, ctl);
            if (!inside(trial.y[0]) || !std::isfinite(trial.y[0])) return std::nullopt;
            return trial;
        } catch (const DomainError&) {
            return std::nullopt;
        }
    };

    GeodesicPath path;
    Y y = pack(init);
    renormalize(y);
    if (!inside(y[0])) {
        path.samples.push_back({0.0, unpack(y)});
        path.escaped = true;
        return path;
    }
    Y dy = field(0.0, y);
    double s = 0.0;
    path.samples.push_back({s, unpack(y)});
    double h = std::min(ctl.initial_step, ctl.max_step);

    while (s < s_max) {
        const double remaining = s_max - s;
        const bool last = h >= remaining;
        const double step = last ? remaining : h;
        auto trial = try_step(s, y, dy, step);
        if (!trial) {
            if (step > opts.event_window) {
                h = 0.5 * step;
                continue;
            }
            // Bisect the step length onto the boundary crossing.
            double good = 0.0;
            double bad = step;
            std::optional<StepTrial<kDim>> best;
            for (int it = 0; it < 200 && bad - good > 1e-15 * std::max(1.0, s); ++it) {
                const double mid = 0.5 * (good + bad);
                if (auto t = try_step(s, y, dy, mid)) {
                    good = mid;
                    best = t;
                } else {
                    bad = mid;
                }
            }
            if (best) {
                Y end = best->y;
                if (opts.renormalize) renormalize(end);
                path.samples.push_back({s + good, unpack(end)});
            }
            path.escaped = true;
            path.total_length = s + 0.5 * (good + bad);
            return path;
        }
        if (trial->error > 1.0) {
            h = std::max(0.2, 0.9 * std::pow(trial->error, -0.2)) * step;
            if (h < ctl.min_step) throw std::runtime_error("geodesic step size underflow");
            continue;
        }
        s = last ? s_max : s + step;
        y = trial->y;
        if (opts.renormalize) {
            renormalize(y);
            dy = field(s, y);
        } else {
            dy = trial->dy_end;
        }
        path.samples.push_back({s, unpack(y)});
        h = next_step_size(step, trial->error, ctl);
    }
    path.total_length = s;
    return path;
}

double path_length(const GeodesicPath& path) {
    if (path.samples.empty()) throw std::invalid_argument("empty path");
    return path.total_length;
}

double path_length_quadrature(const WarpFunction& w, const GeodesicPath& path) {
    if (path.samples.empty()) throw std::invalid_argument("empty path");
    auto speed = [&w](const GeodesicState& st) {
        const Point p = st.point();
        const TangentVector v{p, st.f, w.h(st.r) * st.g};
        return std::sqrt(metric_at(w, v, v));
    };
    double total = 0.0;
    for (std::size_t i = 1; i < path.samples.size(); ++i) {
        const auto& a = path.samples[i - 1];
        const auto& b = path.samples[i];
        total += 0.5 * (b.s - a.s) * (speed(a.state) + speed(b.state));
    }
    return total;
}

std::optional<double> escape_length(const WarpFunction& w, const GeodesicState& init, double cap,
                                    const IntegrateOptions& opts) {
    const GeodesicPath path = integrate(w, init, cap, opts);
    if (path.escaped) return path.total_length;
    return std::nullopt;
}

void write_path_csv(std::ostream& os, const GeodesicPath& path) {
    os << "s,r,t,f,g\n";
    char buf[160];
    for (const auto& smp : path.samples) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", smp.s, smp.state.r,
                      smp.state.t, smp.state.f, smp.state.g);
        os << buf;
    }
}

AnalyticGeodesicDS1::AnalyticGeodesicDS1(double r0, double t0, double a, Sign sign)
    : r0_(r0), t0_(t0), a_(a), sign_(sign), beta_(r0 * r0 - a * a) {
    if (!(r0 > 0.0) || !std::isfinite(t0)) throw std::invalid_argument("ds1 geodesic needs r0 > 0");
    if (!(std::abs(a) < r0) || !(beta_ > 0.0)) {
        throw std::invalid_argument("ds1 family parameter a must lie in (-r0, r0)");
    }
}

AnalyticGeodesicDS1 AnalyticGeodesicDS1::from_state(const GeodesicState& st) {
    if (st.g == 0.0) throw std::invalid_argument("radial rays are not members of the ds1 family");
    const double n = std::hypot(st.f, st.g);
    return {st.r, st.t, st.r * st.f / n, sign_from(st.g)};
}

GeodesicState AnalyticGeodesicDS1::initial_state() const {
    return {r0_, t0_, a_ / r0_, as_double(sign_) * std::sqrt(beta_) / r0_};
}

Point ds1_eval(const AnalyticGeodesicDS1& g, double s) {
    const double r0 = g.r0();
    const double a = g.a();
    const double r = std::sqrt(s * s + 2.0 * a * s + r0 * r0);
    // atan2 keeps the angle continuous where r0^2 + a s changes sign.
    const double theta = std::atan2(s * std::sqrt(g.beta()), r0 * r0 + a * s);
    return {r, as_double(g.sign()) * theta + g.t0()};
}

AnalyticGeodesicDS2::AnalyticGeodesicDS2(double r0, double t0, double b, Sign radial, Sign transverse)
    : r0_(r0), t0_(t0), b_(b), radial_(radial), transverse_(transverse) {
    if (!(r0 > 0.0) || !std::isfinite(t0)) throw std::invalid_argument("ds2 geodesic needs r0 > 0");
    if (!(b > 0.0) || b * r0 > 1.0 + 1e-14) {
        throw std::invalid_argument("ds2 parameter b must satisfy 0 < b <= 1/r0");
    }
}

AnalyticGeodesicDS2 AnalyticGeodesicDS2::from_state(const GeodesicState& st) {
    if (st.g == 0.0) throw std::invalid_argument("radial rays are not members of the ds2 family");
    const double n = std::hypot(st.f, st.g);
    const double b = std::min(std::abs(st.g) / n / st.r, 1.0 / st.r);
    return {st.r, st.t, b, sign_from(st.f), sign_from(st.g)};
}

namespace {
double start_phase(const AnalyticGeodesicDS2& g) { return std::asin(std::min(1.0, g.b() * g.r0())); }
}  // namespace

Interval AnalyticGeodesicDS2::arch() const {
    const double phi = start_phase(*this);
    if (radial_ == Sign::Plus) return {-phi / b_, (std::numbers::pi - phi) / b_};
    return {(phi - std::numbers::pi) / b_, phi / b_};
}

GeodesicState AnalyticGeodesicDS2::initial_state() const {
    const double phi = start_phase(*this);
    return {r0_, t0_, as_double(radial_) * std::cos(phi), as_double(transverse_) * b_ * r0_};
}

Point ds2_eval(const AnalyticGeodesicDS2& g, double s) {
    const Interval arch = g.arch();
    if (!(s > arch.lo && s < arch.hi)) {
        throw DomainError("s = " + std::to_string(s) + " is outside the positive arch");
    }
    const double b = g.b();
    const double sr = as_double(g.radial());
    const double phi = start_phase(g);
    const double theta = sr * b * s + phi;
    const double r = std::sin(theta) / b;
    const double t = g.t0() + as_double(g.transverse()) / b *
                                  (0.5 * s - (std::sin(2.0 * theta) - std::sin(2.0 * phi)) / (4.0 * sr * b));
    return {r, t};
}

double ds2_t_printed(const AnalyticGeodesicDS2& g, double s) {
    const double st = as_double(g.transverse());
    const double sr = as_double(g.radial());
    const double phi = start_phase(g);
    return st * (0.5 * s - 0.25 * std::sin(sr * 2.0 * g.b() * s + 2.0 * phi) + st * g.t0() +
                 0.25 * std::sin(2.0 * phi));
}

}  // namespace warpgeo
