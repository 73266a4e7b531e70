#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace warpgeo {

// Step-size control shared by the Riccati solver and the geodesic engine.
struct StepControl {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    double max_step = 1e300;
    double min_step = 1e-14;
    double initial_step = 1e-3;

    void validate() const {
        if (!(abs_tol > 0.0) || !(rel_tol > 0.0) || !(max_step > 0.0) || !(min_step > 0.0) ||
            !(initial_step > 0.0) || min_step > max_step) {
            throw std::invalid_argument("integrator tolerances and step bounds must be positive");
        }
    }
};

template <std::size_t N>
using OdeState = std::array<double, N>;

template <std::size_t N>
struct StepTrial {
    OdeState<N> y;
    OdeState<N> dy_end;  // field at the new point (first-same-as-last)
    double error = 0.0;  // scaled RMS error norm; accept when <= 1
};

// One Dormand-Prince 5(4) step from (x, y) with derivative dy0 = f(x, y).
// The field may throw; the caller decides how to treat that.
template <std::size_t N, class Field>
StepTrial<N> dormand_prince_step(const Field& field, double x, const OdeState<N>& y,
                                 const OdeState<N>& dy0, double h, const StepControl& ctl) {
    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                     a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                     a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                     b6 = 11.0 / 84;
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                     e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    const OdeState<N>& k1 = dy0;
    OdeState<N> tmp;
    auto combine = [&](auto&& coeffs) {
        for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * coeffs(i);
        return tmp;
    };
    const OdeState<N> k2 = field(x + c2 * h, combine([&](std::size_t i) { return a21 * k1[i]; }));
    const OdeState<N> k3 = field(x + c3 * h, combine([&](std::size_t i) {
        return a31 * k1[i] + a32 * k2[i];
    }));
    const OdeState<N> k4 = field(x + c4 * h, combine([&](std::size_t i) {
        return a41 * k1[i] + a42 * k2[i] + a43 * k3[i];
    }));
    const OdeState<N> k5 = field(x + c5 * h, combine([&](std::size_t i) {
        return a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i];
    }));
    const OdeState<N> k6 = field(x + h, combine([&](std::size_t i) {
        return a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i];
    }));

    StepTrial<N> out;
    for (std::size_t i = 0; i < N; ++i) {
        out.y[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    }
    out.dy_end = field(x + h, out.y);
    double sum = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        const double err = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                                e7 * out.dy_end[i]);
        const double scale = ctl.abs_tol + ctl.rel_tol * std::max(std::abs(y[i]), std::abs(out.y[i]));
        sum += (err / scale) * (err / scale);
    }
    out.error = std::sqrt(sum / static_cast<double>(N));
    if (!std::isfinite(out.error)) out.error = 1e300;
    return out;
}

// Standard controller for a 5th-order pair.
inline double next_step_size(double h, double error, const StepControl& ctl) {
    constexpr double kSafety = 0.9;
    double factor = error > 0.0 ? kSafety * std::pow(error, -0.2) : 5.0;
    factor = std::clamp(factor, 0.2, 5.0);
    return std::min(h * factor, ctl.max_step);
}

}  // namespace warpgeo
