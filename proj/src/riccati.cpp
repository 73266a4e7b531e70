#include "warpgeo/riccati.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace warpgeo {

CurvatureProfile CurvatureProfile::constant(double c) {
    std::ostringstream label;
    label << "const:" << c;
    return {[c](double) { return c; }, {0.0, kInfinity}, label.str()};
}

CurvatureProfile CurvatureProfile::inverse_square(double c) {
    std::ostringstream label;
    label << "inverse_square:" << c;
    return {[c](double r) { return c / (r * r); }, {0.0, kInfinity}, label.str()};
}

namespace {

struct Branch {
    std::vector<double> r;
    std::vector<double> H;
    std::vector<double> logh;
    std::optional<double> blowup;
};

// Integrates (H, log h) from r0 toward `end` (either direction) until the end or the cap.
Branch integrate_branch(const CurvatureProfile& f, double r0, double H0, double end,
                        const RiccatiOptions& opts) {
    Branch out;
    if (end == r0) return out;
    const StepControl& ctl = opts.control;
    const double dir = end > r0 ? 1.0 : -1.0;
    auto field = [&f](double r, const OdeState<2>& y) { return OdeState<2>{y[0] * y[0] + f(r), y[0]}; };

    double r = r0;
    OdeState<2> y{H0, 0.0};
    OdeState<2> dy = field(r, y);
    double h = std::min(ctl.initial_step, std::abs(end - r0));
    while (dir * (end - r) > 0.0) {
        const double remaining = std::abs(end - r);
        const bool last = h >= remaining;
        const double step = last ? remaining : h;
        const auto trial = dormand_prince_step<2>(field, r, y, dy, dir * step, ctl);
        const bool finite = std::isfinite(trial.y[0]) && std::isfinite(trial.y[1]);
        if (finite && trial.error <= 1.0) {
            r = last ? end : r + dir * step;
            if (std::abs(trial.y[0]) > opts.blowup_cap) {
                // Near a pole H ~ 1/(r* - r).
                out.blowup = r + 1.0 / trial.y[0];
                return out;
            }
            y = trial.y;
            dy = trial.dy_end;
            out.r.push_back(r);
            out.H.push_back(y[0]);
            out.logh.push_back(y[1]);
            h = next_step_size(step, trial.error, ctl);
        } else {
            h = finite ? std::max(0.2, 0.9 * std::pow(trial.error, -0.2)) * step : 0.2 * step;
            if (h < ctl.min_step) {
                out.blowup = r + 1.0 / y[0];
                return out;
            }
        }
    }
    return out;
}

}  // namespace

HField solve_prescribed(const CurvatureProfile& f, double r0, double H0, Interval range,
                        const RiccatiOptions& opts) {
    opts.control.validate();
    if (!(opts.blowup_cap > 0.0)) throw std::invalid_argument("blow-up cap must be positive");
    if (!f.f) throw std::invalid_argument("curvature profile has no evaluator");
    if (!(range.hi > range.lo) || !(r0 >= range.lo && r0 <= range.hi)) {
        throw std::invalid_argument("r0 must lie in the integration range");
    }
    if (!(range.lo >= f.domain.lo && range.hi <= f.domain.hi) || !(range.lo > 0.0) ||
        !std::isfinite(range.hi)) {
        throw std::invalid_argument("integration range must be a finite subinterval of the profile domain");
    }
    if (!std::isfinite(H0)) throw std::invalid_argument("H0 must be finite");

    const Branch below = integrate_branch(f, r0, H0, range.lo, opts);
    const Branch above = integrate_branch(f, r0, H0, range.hi, opts);

    HField out;
    out.r0 = r0;
    for (std::size_t i = below.r.size(); i-- > 0;) {
        out.r.push_back(below.r[i]);
        out.H.push_back(below.H[i]);
        out.h.push_back(std::exp(below.logh[i]));
    }
    out.r.push_back(r0);
    out.H.push_back(H0);
    out.h.push_back(1.0);
    for (std::size_t i = 0; i < above.r.size(); ++i) {
        out.r.push_back(above.r[i]);
        out.H.push_back(above.H[i]);
        out.h.push_back(std::exp(above.logh[i]));
    }

    if (below.blowup && above.blowup) {
        out.blowup = (r0 - *below.blowup) < (*above.blowup - r0) ? below.blowup : above.blowup;
    } else {
        out.blowup = below.blowup ? below.blowup : above.blowup;
    }
    return out;
}

WarpFunction analytic_flat(double a0, double a1) { return WarpFunction::flat(a0, a1); }

WarpFunction analytic_neg2(double c0, double c1, double c2) { return WarpFunction::neg2(c0, c1, c2); }

RiccatiReport verify_riccati(const WarpFunction& w, const CurvatureProfile& f,
                             std::span<const double> grid, double tol) {
    RiccatiReport rep;
    rep.grid_size = grid.size();
    for (double r : grid) {
        double res = kInfinity;
        if (w.in_domain(r) && f.domain.contains(r, 0.0)) {
            res = std::abs(sectional_curvature(w, r) - f(r));
        }
        if (!(res <= rep.max_residual)) rep.max_residual = res;
    }
    rep.pass = rep.max_residual <= tol;
    return rep;
}

namespace {

// Fornberg weights for the first derivative at x0 from nodes xs.
std::vector<double> first_derivative_weights(double x0, std::span<const double> xs) {
    const std::size_t n = xs.size();
    std::vector<std::vector<double>> c(n, std::vector<double>(2, 0.0));
    double c1 = 1.0;
    double c4 = xs[0] - x0;
    c[0][0] = 1.0;
    for (std::size_t i = 1; i < n; ++i) {
        const std::size_t mn = std::min<std::size_t>(i, 1);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = xs[i] - x0;
        for (std::size_t j = 0; j < i; ++j) {
            const double c3 = xs[i] - xs[j];
            c2 *= c3;
            if (j == i - 1) {
                for (std::size_t k = mn; k >= 1; --k) {
                    c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (std::size_t k = mn; k >= 1; --k) {
                c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = c[i][1];
    return w;
}

}  // namespace

RiccatiReport verify_field(const HField& field, const CurvatureProfile& f, double tol) {
    RiccatiReport rep;
    rep.grid_size = field.r.size();
    rep.blowup_location = field.blowup;
    const std::size_t n = field.r.size();
    if (n < 5) {
        rep.pass = false;
        rep.max_residual = kInfinity;
        return rep;
    }
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t start = std::min(i >= 2 ? i - 2 : 0, n - 5);
        const std::span<const double> xs(field.r.data() + start, 5);
        const std::span<const double> Hs(field.H.data() + start, 5);
        const auto w = first_derivative_weights(field.r[i], xs);
        const double H = field.H[i];
        const double fr = f(field.r[i]);
        double res = 0.0;
        if (std::all_of(Hs.begin(), Hs.end(), [](double v) { return std::abs(v) > 1.0; })) {
            // Near a pole u = 1/H is smooth: u' = -(1 + f u^2).
            double du = 0.0;
            for (std::size_t j = 0; j < 5; ++j) du += w[j] / Hs[j];
            const double u = 1.0 / H;
            res = std::abs(du + 1.0 + fr * u * u) / (1.0 + std::abs(fr) * u * u);
        } else {
            double dH = 0.0;
            for (std::size_t j = 0; j < 5; ++j) dH += w[j] * Hs[j];
            res = std::abs(dH - H * H - fr) / (1.0 + H * H + std::abs(fr));
        }
        rep.max_residual = std::max(rep.max_residual, res);
    }
    rep.pass = rep.max_residual <= tol;
    return rep;
}

}  // namespace warpgeo
