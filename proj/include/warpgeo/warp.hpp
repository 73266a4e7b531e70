#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace warpgeo {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Margin used by every strict domain-membership test.
inline constexpr double kDomainMargin = 1e-12;

class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Open interval (lo, hi); hi may be +inf.
struct Interval {
    double lo = 0.0;
    double hi = kInfinity;

    bool contains(double r, double margin = kDomainMargin) const {
        return r > lo + margin && r < hi - margin;
    }
    bool empty() const { return !(hi > lo); }
    bool contains(const Interval& other) const {
        return other.lo >= lo && other.hi <= hi;
    }
};

// A point of the right half plane.
class Point {
public:
    Point(double r, double t);

    double r() const { return r_; }
    double t() const { return t_; }

    friend bool operator==(const Point&, const Point&) = default;

private:
    double r_;
    double t_;
};

// Coordinate components (dr, dt) of a vector at a base point.
struct TangentVector {
    Point base;
    double dr = 0.0;
    double dt = 0.0;
};

enum class WarpKind { OneOverR, R, FlatFamily, Neg2Family, Exp, Custom };

std::string to_string(WarpKind kind);

// Uniformly sampled h on [r_min, r_max]; the config-file form of a custom warp.
struct WarpTable {
    double r_min = 0.0;
    double r_max = 0.0;
    std::vector<double> h;
};

// Declarative description of a warp function. `params` holds (a0, a1) for the
// flat family and (c0, c1, c2) for the -2/r^2 family; `domain`, when set,
// restricts the maximal positive domain.
struct WarpSpec {
    WarpKind kind = WarpKind::OneOverR;
    std::vector<double> params;
    std::optional<Interval> domain;
    std::optional<WarpTable> table;
};

// h(r) together with h', h'' and the logarithmic derivative H = h'/h.
// Immutable; every evaluator throws DomainError outside the domain.
class WarpFunction {
public:
    using Fn = std::function<double(double)>;

    static WarpFunction one_over_r();
    static WarpFunction identity();
    static WarpFunction exponential();
    static WarpFunction flat(double a0, double a1);
    static WarpFunction neg2(double c0, double c1, double c2);

    // Caller-supplied derivatives.
    static WarpFunction custom(Fn h, Fn dh, Fn d2h, Interval domain, std::string label = "custom");

    // Derivatives by central differences; steps scale with max(1, r).
    static WarpFunction custom(Fn h, Interval domain, double first_step = 1e-6,
                               double second_step = 1e-4, std::string label = "custom");

    WarpKind kind() const { return kind_; }
    const std::vector<double>& params() const { return params_; }
    const Interval& domain() const { return domain_; }
    const std::string& label() const { return label_; }

    bool in_domain(double r) const { return domain_.contains(r); }
    void require_in_domain(double r) const;

    double h(double r) const;
    double dh(double r) const;
    double d2h(double r) const;
    double H(double r) const;

    // Symbolically simplified curvature for the kinds that have one.
    std::optional<double> closed_form_curvature(double r) const;

    // Copy with the domain narrowed to `sub`; sub must lie inside the current domain.
    WarpFunction restricted(Interval sub) const;

private:
    WarpFunction(WarpKind kind, std::vector<double> params, Interval domain, std::string label,
                 Fn h, Fn dh, Fn d2h);

    WarpKind kind_;
    std::vector<double> params_;
    Interval domain_;
    std::string label_;
    Fn h_;
    Fn dh_;
    Fn d2h_;
};

WarpFunction make_warp(const WarpSpec& spec);

// Frame components (along d_r, along T_h) of a vector.
struct FrameVector {
    double along_r = 0.0;
    double along_T = 0.0;
};

// Covariant derivatives of the orthonormal frame (d_r, T_h).
struct ConnectionCoeffs {
    FrameVector r_r;  // nabla_{d_r} d_r
    FrameVector T_r;  // nabla_{T} d_r
    FrameVector r_T;  // nabla_{d_r} T
    FrameVector T_T;  // nabla_{T} T
};

TangentVector frame_r(const Point& p);
TangentVector frame_T(const WarpFunction& w, const Point& p);
FrameVector to_frame(const WarpFunction& w, const TangentVector& v);

double metric_at(const WarpFunction& w, const TangentVector& u, const TangentVector& v);
TangentVector apply_J(const WarpFunction& w, const TangentVector& u);
double kahler_form(const WarpFunction& w, const TangentVector& u, const TangentVector& v);
ConnectionCoeffs connection(const WarpFunction& w, const Point& p);

// K = (h''h - 2h'^2)/h^2 = H' - H^2.
double sectional_curvature(const WarpFunction& w, double r);

// Same quantity evaluated from the metric's G = 1/h^2 alone: K = -(sqrt G)''/sqrt G,
// with a five-point second difference of spacing step*r.
double curvature_oracle(const WarpFunction& w, double r, double step = 1e-3);

}  // namespace warpgeo
