#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "warpgeo/ode.hpp"
#include "warpgeo/warp.hpp"

namespace warpgeo {

// Target curvature r -> f(r).
struct CurvatureProfile {
    std::function<double(double)> f;
    Interval domain{0.0, kInfinity};
    std::string label = "custom";

    double operator()(double r) const { return f(r); }

    static CurvatureProfile constant(double c);
    static CurvatureProfile inverse_square(double c);  // c / r^2
};

struct RiccatiOptions {
    StepControl control{};
    double blowup_cap = 1e8;
};

// Sampled solution of H' = H^2 + f. h = exp(int H) is integrated alongside H, with h(r0) = 1.
struct HField {
    std::vector<double> r;
    std::vector<double> H;
    std::vector<double> h;
    std::optional<double> blowup;  // nearest recorded pole, if integration hit the cap
    double r0 = 0.0;
};

HField solve_prescribed(const CurvatureProfile& f, double r0, double H0, Interval range,
                        const RiccatiOptions& opts = {});

WarpFunction analytic_flat(double a0, double a1);
WarpFunction analytic_neg2(double c0, double c1, double c2);

struct RiccatiReport {
    double max_residual = 0.0;
    std::size_t grid_size = 0;
    bool pass = false;
    std::optional<double> blowup_location;
};

// max |K_W(r) - f(r)| over the grid.
RiccatiReport verify_riccati(const WarpFunction& w, const CurvatureProfile& f,
                             std::span<const double> grid, double tol);

// Residual of a numeric field: |H' - H^2 - f| / (1 + H^2 + |f|), or the matching residual of u = 1/H
// where |H| > 1 on the stencil, with derivatives from five-node Lagrange weights
// on the (non-uniform) sample grid.
RiccatiReport verify_field(const HField& field, const CurvatureProfile& f, double tol);

}  // namespace warpgeo
