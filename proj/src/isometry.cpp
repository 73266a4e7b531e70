#include "warpgeo/isometry.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace warpgeo {

AffineMap::AffineMap(double k, double l) : k_(k), l_(l) {
    if (!(k > 0.0) || !std::isfinite(k) || !std::isfinite(l)) {
        throw std::invalid_argument("affine map needs k > 0 and finite l");
    }
}

AffineMap compose(const AffineMap& outer, const AffineMap& inner) {
    return {outer.k() * inner.k(), outer.k() * inner.l() + outer.l()};
}

Point affine_act(const AffineMap& m, const Point& p) { return {m.k() * p.r(), m.k() * p.t() + m.l()}; }

TangentVector affine_push(const AffineMap& m, const TangentVector& v) {
    return {affine_act(m, v.base), m.k() * v.dr, m.k() * v.dt};
}

AffineMap transitivity_witness(const Point& p) { return {1.0 / p.r(), -p.t() / p.r()}; }

double cr_residual(const WarpFunction& w, const AffineMap& m, const Point& p) {
    const double k = m.k();
    const double u = k * p.r();
    const double hr = w.h(p.r());
    const double hu = w.h(u);
    // u_r = k, u_t = 0, v_r = 0, v_t = k
    const double u_r = k, u_t = 0.0, v_r = 0.0, v_t = k;
    return std::abs(u_r * hr - v_t * hu) + std::abs(u_t + hr * hu * v_r);
}

double holomorphy_residual(const WarpFunction& w, const AffineMap& m, const Point& p) {
    // J in coordinates: [[0, -1/h], [h, 0]]; DG = k I.
    const double k = m.k();
    const double h0 = w.h(p.r());
    const double h1 = w.h(k * p.r());
    return std::max(std::abs(k / h0 - k / h1), std::abs(k * h0 - k * h1));
}

double pullback_residual(const WarpFunction& w, const AffineMap& m, std::span<const Point> grid,
                         std::span<const std::pair<double, double>> vectors) {
    double worst = 0.0;
    for (const Point& p : grid) {
        for (const auto& [ur, ut] : vectors) {
            for (const auto& [vr, vt] : vectors) {
                const TangentVector u{p, ur, ut};
                const TangentVector v{p, vr, vt};
                const double before = metric_at(w, u, v);
                const double after = metric_at(w, affine_push(m, u), affine_push(m, v));
                worst = std::max(worst, std::abs(after - before));
            }
        }
    }
    return worst;
}

std::vector<Point> GridSpec::points() const {
    if (nr < 1 || nt < 1 || !(r_min > 0.0) || r_max < r_min || t_max < t_min) {
        throw std::invalid_argument("invalid sample grid");
    }
    std::vector<Point> pts;
    pts.reserve(static_cast<std::size_t>(nr) * static_cast<std::size_t>(nt));
    for (int i = 0; i < nr; ++i) {
        const double r = nr == 1 ? r_min : r_min + (r_max - r_min) * i / (nr - 1);
        for (int j = 0; j < nt; ++j) {
            const double t = nt == 1 ? t_min : t_min + (t_max - t_min) * j / (nt - 1);
            pts.emplace_back(r, t);
        }
    }
    return pts;
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::HolomorphicIsometry: return "holomorphic_isometry";
        case Verdict::IsometryOnly: return "isometry_only";
        case Verdict::HolomorphicOnly: return "holomorphic_only";
        case Verdict::Neither: return "neither";
    }
    return "neither";
}

IsometryReport classify(const WarpFunction& w, const AffineMap& m, const ClassifyOptions& opts) {
    IsometryReport rep;
    rep.grid = opts.grid;
    rep.seed = opts.seed;
    rep.tol = opts.tol;
    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> comp(-1.0, 1.0);
    for (const Point& p : opts.grid.points()) {
        if (!w.in_domain(p.r()) || !w.in_domain(m.k() * p.r())) {
            throw DomainError("sample grid or its image leaves the warp domain");
        }
        rep.holomorphy_residual = std::max(
            {rep.holomorphy_residual, cr_residual(w, m, p), holomorphy_residual(w, m, p)});
        const std::pair<double, double> vecs[] = {
            {1.0, 0.0}, {0.0, w.h(p.r())}, {comp(rng), comp(rng)}};
        const Point single[] = {p};
        rep.isometry_residual = std::max(rep.isometry_residual, pullback_residual(w, m, single, vecs));
    }
    const bool holo = rep.holomorphy_residual < opts.tol;
    const bool iso = rep.isometry_residual < opts.tol;
    rep.verdict = holo && iso ? Verdict::HolomorphicIsometry
                : iso         ? Verdict::IsometryOnly
                : holo        ? Verdict::HolomorphicOnly
                              : Verdict::Neither;
    return rep;
}

double geodesic_preservation_defect(const WarpFunction& w, const AffineMap& m,
                                    const GeodesicState& init, double s_max) {
    IntegrateOptions opts;
    opts.control.abs_tol = 1e-12;
    opts.control.rel_tol = 1e-12;
    opts.control.max_step = 1e-3 * std::max(1.0, s_max);
    const GeodesicPath src = integrate(w, init, s_max, opts);

    auto pushed_velocity = [&](const GeodesicState& st) {
        const TangentVector v{st.point(), st.f, w.h(st.r) * st.g};
        return affine_push(m, v);
    };
    auto speed = [&](const TangentVector& v) { return std::sqrt(metric_at(w, v, v)); };

    const TangentVector v0 = pushed_velocity(src.samples.front().state);
    const double n0 = speed(v0);
    GeodesicState img{v0.base.r(), v0.base.t(), v0.dr / n0, v0.dt / w.h(v0.base.r()) / n0};

    double sigma = 0.0;
    double prev_speed = n0;
    double worst = 0.0;
    IntegrateOptions chase;
    chase.control.abs_tol = 1e-12;
    chase.control.rel_tol = 1e-12;
    for (std::size_t i = 1; i < src.samples.size(); ++i) {
        const auto& a = src.samples[i - 1];
        const auto& b = src.samples[i];
        const TangentVector vb = pushed_velocity(b.state);
        const double sp = speed(vb);
        const double ds = 0.5 * (b.s - a.s) * (prev_speed + sp);
        prev_speed = sp;
        sigma += ds;
        if (ds > 0.0) {
            const GeodesicPath seg = integrate(w, img, ds, chase);
            if (seg.escaped) return kInfinity;
            img = seg.end();
        }
        worst = std::max({worst, std::abs(img.r - vb.base.r()), std::abs(img.t - vb.base.t())});
    }
    return worst;
}

}  // namespace warpgeo
