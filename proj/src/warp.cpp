#include "warpgeo/warp.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <memory>
#include <utility>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>

namespace warpgeo {

namespace {

double sign_of(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

std::string join_params(const std::vector<double>& ps) {
    std::string out;
    for (std::size_t i = 0; i < ps.size(); ++i) {
        if (i) out += ',';
        char buf[32];
        const auto res = std::to_chars(buf, buf + sizeof buf, ps[i]);
        out.append(buf, res.ptr);
    }
    return out;
}

// Finite probe of positivity over an interval; infinite ends are truncated.
void require_positive(const WarpFunction::Fn& h, Interval domain) {
    const double lo = domain.lo;
    const double hi = std::isfinite(domain.hi) ? domain.hi : std::max(2.0 * lo, lo + 100.0);
    constexpr int kProbes = 1000;
    for (int i = 1; i < kProbes; ++i) {
        const double r = lo + (hi - lo) * i / kProbes;
        const double v = h(r);
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw std::invalid_argument("warp function is not positive at r = " + std::to_string(r));
        }
    }
}

Interval apply_request(Interval maximal, const std::optional<Interval>& request) {
    if (!request) return maximal;
    if (request->empty() || request->lo < 0.0) {
        throw std::invalid_argument("requested warp domain is empty or leaves r > 0");
    }
    if (!maximal.contains(*request)) {
        throw std::invalid_argument("h is not positive on the whole requested domain");
    }
    return *request;
}

}  // namespace

Point::Point(double r, double t) : r_(r), t_(t) {
    if (!(r > 0.0) || !std::isfinite(r) || !std::isfinite(t)) {
        throw std::invalid_argument("point must satisfy r > 0 with finite coordinates");
    }
}

std::string to_string(WarpKind kind) {
    switch (kind) {
        case WarpKind::OneOverR: return "one_over_r";
        case WarpKind::R: return "r";
        case WarpKind::FlatFamily: return "flat";
        case WarpKind::Neg2Family: return "neg2";
        case WarpKind::Exp: return "exp";
        case WarpKind::Custom: return "custom";
    }
    return "unknown";
}

WarpFunction::WarpFunction(WarpKind kind, std::vector<double> params, Interval domain,
                           std::string label, Fn h, Fn dh, Fn d2h)
    : kind_(kind),
      params_(std::move(params)),
      domain_(domain),
      label_(std::move(label)),
      h_(std::move(h)),
      dh_(std::move(dh)),
      d2h_(std::move(d2h)) {
    if (domain_.empty() || domain_.lo < 0.0) {
        throw std::invalid_argument("warp domain must be a nonempty subinterval of (0, inf)");
    }
}

WarpFunction WarpFunction::one_over_r() {
    return {WarpKind::OneOverR, {}, {0.0, kInfinity}, "one_over_r",
            [](double r) { return 1.0 / r; },
            [](double r) { return -1.0 / (r * r); },
            [](double r) { return 2.0 / (r * r * r); }};
}

WarpFunction WarpFunction::identity() {
    return {WarpKind::R, {}, {0.0, kInfinity}, "r",
            [](double r) { return r; },
            [](double) { return 1.0; },
            [](double) { return 0.0; }};
}

WarpFunction WarpFunction::exponential() {
    return {WarpKind::Exp, {}, {0.0, kInfinity}, "exp",
            [](double r) { return std::exp(r); },
            [](double r) { return std::exp(r); },
            [](double r) { return std::exp(r); }};
}

WarpFunction WarpFunction::flat(double a0, double a1) {
    if (a0 == 0.0 || !std::isfinite(a0) || !std::isfinite(a1)) {
        throw std::invalid_argument("flat family needs a0 != 0");
    }
    // h = a0/(a1 - r) > 0 requires sign(a1 - r) = sign(a0).
    Interval dom = a0 > 0.0 ? Interval{0.0, a1} : Interval{std::max(0.0, a1), kInfinity};
    if (dom.empty()) {
        throw std::invalid_argument("flat family (" + join_params({a0, a1}) +
                                    ") has no positive domain in r > 0");
    }
    return {WarpKind::FlatFamily, {a0, a1}, dom, "flat:" + join_params({a0, a1}),
            [a0, a1](double r) { return a0 / (a1 - r); },
            [a0, a1](double r) { const double u = a1 - r; return a0 / (u * u); },
            [a0, a1](double r) { const double u = a1 - r; return 2.0 * a0 / (u * u * u); }};
}

WarpFunction WarpFunction::neg2(double c0, double c1, double c2) {
    if (c0 == 0.0 || !std::isfinite(c0) || !std::isfinite(c1) || !std::isfinite(c2)) {
        throw std::invalid_argument("-2/r^2 family needs c0 != 0");
    }
    const std::string label = "neg2:" + join_params({c0, c1, c2});
    const double want = sign_of(c0);
    Interval dom{0.0, kInfinity};
    const double ratio = c2 != 0.0 ? -c1 / c2 : -1.0;
    if (c2 != 0.0 && ratio > 0.0) {
        // p(r) = c1 + c2 r^3 changes sign once at the cube root; keep the side where sign p = sign c0.
        const double root = std::cbrt(ratio);
        dom = sign_of(c1) == want ? Interval{0.0, root} : Interval{root, kInfinity};
    } else {
        const double s = c1 != 0.0 ? sign_of(c1) : sign_of(c2);
        if (s != want) {
            throw std::invalid_argument("-2/r^2 family (" + join_params({c0, c1, c2}) +
                                        ") has no positive domain in r > 0");
        }
    }
    return {WarpKind::Neg2Family, {c0, c1, c2}, dom, label,
            [c0, c1, c2](double r) { return c0 * r / (c1 + c2 * r * r * r); },
            [c0, c1, c2](double r) {
                const double p = c1 + c2 * r * r * r;
                return c0 * (c1 - 2.0 * c2 * r * r * r) / (p * p);
            },
            [c0, c1, c2](double r) {
                const double r3 = r * r * r;
                const double p = c1 + c2 * r3;
                return -6.0 * c0 * c2 * r * r * (2.0 * c1 - c2 * r3) / (p * p * p);
            }};
}

WarpFunction WarpFunction::custom(Fn h, Fn dh, Fn d2h, Interval domain, std::string label) {
    if (!h || !dh || !d2h) throw std::invalid_argument("custom warp needs h, h' and h''");
    if (domain.empty() || domain.lo < 0.0) {
        throw std::invalid_argument("custom warp domain must be a nonempty subinterval of (0, inf)");
    }
    require_positive(h, domain);
    return {WarpKind::Custom, {}, domain, std::move(label), std::move(h), std::move(dh), std::move(d2h)};
}

WarpFunction WarpFunction::custom(Fn h, Interval domain, double first_step, double second_step,
                                  std::string label) {
    if (!(first_step > 0.0) || !(second_step > 0.0)) {
        throw std::invalid_argument("finite-difference steps must be positive");
    }
    Fn dh = [h, first_step](double r) {
        const double e = first_step * std::max(1.0, r);
        return (h(r + e) - h(r - e)) / (2.0 * e);
    };
    Fn d2h = [h, second_step](double r) {
        const double e = second_step * std::max(1.0, r);
        return (h(r + e) - 2.0 * h(r) + h(r - e)) / (e * e);
    };
    return custom(std::move(h), std::move(dh), std::move(d2h), domain, std::move(label));
}

void WarpFunction::require_in_domain(double r) const {
    if (!domain_.contains(r)) {
        throw DomainError("r = " + std::to_string(r) + " is outside the domain of warp '" + label_ + "'");
    }
}

double WarpFunction::h(double r) const {
    require_in_domain(r);
    return h_(r);
}

double WarpFunction::dh(double r) const {
    require_in_domain(r);
    return dh_(r);
}

double WarpFunction::d2h(double r) const {
    require_in_domain(r);
    return d2h_(r);
}

double WarpFunction::H(double r) const {
    require_in_domain(r);
    switch (kind_) {
        case WarpKind::OneOverR: return -1.0 / r;
        case WarpKind::R: return 1.0 / r;
        case WarpKind::Exp: return 1.0;
        case WarpKind::FlatFamily: return 1.0 / (params_[1] - r);
        default: return dh_(r) / h_(r);
    }
}

std::optional<double> WarpFunction::closed_form_curvature(double r) const {
    require_in_domain(r);
    switch (kind_) {
        case WarpKind::OneOverR: return 0.0;
        case WarpKind::R: return -2.0 / (r * r);
        case WarpKind::Exp: return -1.0;
        default: return std::nullopt;
    }
}

WarpFunction WarpFunction::restricted(Interval sub) const {
    if (sub.empty() || !domain_.contains(sub)) {
        throw std::invalid_argument("restriction must be a nonempty subinterval of the domain");
    }
    WarpFunction copy = *this;
    copy.domain_ = sub;
    return copy;
}

WarpFunction make_warp(const WarpSpec& spec) {
    auto need = [&](std::size_t n) {
        if (spec.params.size() != n) {
            throw std::invalid_argument("warp '" + to_string(spec.kind) + "' takes " +
                                        std::to_string(n) + " parameters");
        }
    };
    auto finish = [&](const WarpFunction& w) {
        if (!spec.domain) return w;
        return w.restricted(apply_request(w.domain(), spec.domain));
    };
    switch (spec.kind) {
        case WarpKind::OneOverR: need(0); return finish(WarpFunction::one_over_r());
        case WarpKind::R: need(0); return finish(WarpFunction::identity());
        case WarpKind::Exp: need(0); return finish(WarpFunction::exponential());
        case WarpKind::FlatFamily:
            need(2);
            return finish(WarpFunction::flat(spec.params[0], spec.params[1]));
        case WarpKind::Neg2Family:
            need(3);
            return finish(WarpFunction::neg2(spec.params[0], spec.params[1], spec.params[2]));
        case WarpKind::Custom: {
            if (!spec.table) throw std::invalid_argument("custom warp needs a sample table");
            const WarpTable& tab = *spec.table;
            if (tab.h.size() < 4 || !(tab.r_max > tab.r_min) || !(tab.r_min > 0.0)) {
                throw std::invalid_argument("custom table needs >= 4 samples on 0 < r_min < r_max");
            }
            const double step = (tab.r_max - tab.r_min) / static_cast<double>(tab.h.size() - 1);
            using Spline = boost::math::interpolators::cardinal_cubic_b_spline<double>;
            auto spline = std::make_shared<Spline>(tab.h.begin(), tab.h.end(), tab.r_min, step);
            auto w = WarpFunction::custom([spline](double r) { return (*spline)(r); },
                                          [spline](double r) { return spline->prime(r); },
                                          [spline](double r) { return spline->double_prime(r); },
                                          Interval{tab.r_min, tab.r_max}, "custom_table");
            return finish(w);
        }
    }
    throw std::invalid_argument("unknown warp kind");
}

TangentVector frame_r(const Point& p) { return {p, 1.0, 0.0}; }

TangentVector frame_T(const WarpFunction& w, const Point& p) { return {p, 0.0, w.h(p.r())}; }

FrameVector to_frame(const WarpFunction& w, const TangentVector& v) {
    return {v.dr, v.dt / w.h(v.base.r())};
}

namespace {
void require_same_base(const TangentVector& u, const TangentVector& v) {
    if (!(u.base == v.base)) throw std::invalid_argument("tangent vectors have different base points");
}
}  // namespace

double metric_at(const WarpFunction& w, const TangentVector& u, const TangentVector& v) {
    require_same_base(u, v);
    const double h = w.h(u.base.r());
    return u.dr * v.dr + u.dt * v.dt / (h * h);
}

TangentVector apply_J(const WarpFunction& w, const TangentVector& u) {
    const double h = w.h(u.base.r());
    return {u.base, -u.dt / h, h * u.dr};
}

double kahler_form(const WarpFunction& w, const TangentVector& u, const TangentVector& v) {
    require_same_base(u, v);
    return (u.dr * v.dt - u.dt * v.dr) / w.h(u.base.r());
}

ConnectionCoeffs connection(const WarpFunction& w, const Point& p) {
    const double H = w.H(p.r());
    return {{0.0, 0.0}, {0.0, -H}, {0.0, 0.0}, {H, 0.0}};
}

double sectional_curvature(const WarpFunction& w, double r) {
    if (auto k = w.closed_form_curvature(r)) return *k;
    const double h = w.h(r);
    const double dh = w.dh(r);
    return (w.d2h(r) * h - 2.0 * dh * dh) / (h * h);
}

double curvature_oracle(const WarpFunction& w, double r, double step) {
    if (!(step > 0.0)) throw std::invalid_argument("oracle step must be positive");
    const double e = step * r;
    if (!w.in_domain(r - 2.0 * e) || !w.in_domain(r + 2.0 * e)) {
        throw DomainError("curvature stencil leaves the warp domain");
    }
    // sqrt(G) read off the metric's dt-dt coefficient.
    auto root_g = [&](double x) {
        const Point p{x, 0.0};
        const TangentVector dt{p, 0.0, 1.0};
        return std::sqrt(metric_at(w, dt, dt));
    };
    const double f0 = root_g(r);
    const double second = (-root_g(r + 2.0 * e) + 16.0 * root_g(r + e) - 30.0 * f0 +
                           16.0 * root_g(r - e) - root_g(r - 2.0 * e)) /
                          (12.0 * e * e);
    return -second / f0;
}

}  // namespace warpgeo
