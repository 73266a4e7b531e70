#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "warpgeo/ode.hpp"
#include "warpgeo/warp.hpp"

namespace warpgeo {

enum class Sign { Plus, Minus };

inline double as_double(Sign s) { return s == Sign::Plus ? 1.0 : -1.0; }
inline Sign sign_from(double x) { return x < 0.0 ? Sign::Minus : Sign::Plus; }

// Position plus frame velocity: r' = f, t' = h(r) g, with f^2 + g^2 = 1.
struct GeodesicState {
    double r = 1.0;
    double t = 0.0;
    double f = 1.0;
    double g = 0.0;

    Point point() const { return {r, t}; }
    double speed_defect() const { return f * f + g * g - 1.0; }
};

// Unit-speed state at p heading at `angle` from d_r toward T_h.
GeodesicState state_from_angle(const Point& p, double angle);

struct GeodesicDerivative {
    double dr = 0.0;
    double dt = 0.0;
    double df = 0.0;
    double dg = 0.0;
};

// (f, h g, -g^2 H, f g H)
GeodesicDerivative geodesic_field(const WarpFunction& w, const GeodesicState& state);

struct GeodesicSample {
    double s = 0.0;
    GeodesicState state;
};

struct GeodesicPath {
    std::vector<GeodesicSample> samples;
    bool escaped = false;
    double total_length = 0.0;

    const GeodesicState& end() const { return samples.back().state; }
};

struct IntegrateOptions {
    StepControl control{};
    bool renormalize = false;
    double escape_margin = 1e-10;
    double event_window = 1e-3;  // steps shorter than this are bisected onto an escape event
};

GeodesicPath integrate(const WarpFunction& w, const GeodesicState& init, double s_max,
                       const IntegrateOptions& opts = {});

double path_length(const GeodesicPath& path);

// Trapezoidal integral of the metric norm of (dr/ds, dt/ds) along the samples.
double path_length_quadrature(const WarpFunction& w, const GeodesicPath& path);

// Finite length when the geodesic leaves the domain before `cap`; nullopt otherwise.
std::optional<double> escape_length(const WarpFunction& w, const GeodesicState& init, double cap,
                                    const IntegrateOptions& opts = {});

// Header "s,r,t,f,g" followed by one row per sample at 17 significant digits.
void write_path_csv(std::ostream& os, const GeodesicPath& path);

// Closed-form geodesics of dr^2 + r^2 dt^2 that are not radial rays.
class AnalyticGeodesicDS1 {
public:
    AnalyticGeodesicDS1(double r0, double t0, double a, Sign sign);

    // Family member with the given initial frame velocity (g != 0).
    static AnalyticGeodesicDS1 from_state(const GeodesicState& state);

    double r0() const { return r0_; }
    double t0() const { return t0_; }
    double a() const { return a_; }
    Sign sign() const { return sign_; }
    double beta() const { return beta_; }  // r0^2 - a^2

    GeodesicState initial_state() const;

private:
    double r0_;
    double t0_;
    double a_;
    Sign sign_;
    double beta_;
};

Point ds1_eval(const AnalyticGeodesicDS1& g, double s);

// Closed-form geodesics of dr^2 + dt^2/r^2: r = sin(+-b s + asin(b r0))/b.
class AnalyticGeodesicDS2 {
public:
    AnalyticGeodesicDS2(double r0, double t0, double b, Sign radial, Sign transverse);

    static AnalyticGeodesicDS2 from_state(const GeodesicState& state);

    double r0() const { return r0_; }
    double t0() const { return t0_; }
    double b() const { return b_; }
    Sign radial() const { return radial_; }
    Sign transverse() const { return transverse_; }

    // Open s-interval of the arch through s = 0 on which r > 0.
    Interval arch() const;
    GeodesicState initial_state() const;

private:
    double r0_;
    double t0_;
    double b_;
    Sign radial_;
    Sign transverse_;
};

Point ds2_eval(const AnalyticGeodesicDS2& g, double s);

// The t(s) display exactly as printed, with its +- choices tied to (transverse, radial).
// Solves t' = h g only when b = 1 and the radial sign is '+'.
double ds2_t_printed(const AnalyticGeodesicDS2& g, double s);

}  // namespace warpgeo
