#include "warpgeo/two_point.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <functional>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <thread>

#include <boost/math/tools/roots.hpp>

namespace warpgeo {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Hit {
    double param = 0.0;
    double s = 0.0;
    Sign sign = Sign::Plus;
};

// Bisection to (near) machine resolution on a bracketed sign change.
template <class F>
double bisect_root(F&& f, double lo, double hi, int& evaluations) {
    auto counted = [&](double x) {
        ++evaluations;
        return f(x);
    };
    const double scale = std::max({std::abs(lo), std::abs(hi), 1e-300});
    std::uintmax_t max_iter = 200;
    auto done = [scale](double a, double b) { return std::abs(b - a) <= 4e-16 * scale; };
    const auto [a, b] = boost::math::tools::bisect(counted, lo, hi, done, max_iter);
    return 0.5 * (a + b);
}

// Roots of miss(x) on each branch, found by a sign-change scan over sorted seeds.
// miss returns nullopt where the branch is undefined.
template <class Miss>
std::vector<double> scan_roots(const std::vector<double>& seeds, Miss&& miss, int& evaluations) {
    std::vector<double> roots;
    std::optional<double> prev;
    double prev_x = 0.0;
    for (double x : seeds) {
        ++evaluations;
        const std::optional<double> m = miss(x);
        if (m && std::abs(*m) <= 1e-13) {
            roots.push_back(x);
        } else if (m && prev && std::abs(*prev) > 1e-13 && (*m > 0.0) != (*prev > 0.0)) {
            roots.push_back(bisect_root([&](double z) { return miss(z).value_or(kNaN); }, prev_x, x,
                                        evaluations));
        }
        prev = m;
        prev_x = x;
    }
    return roots;
}

double endpoint_miss(const GeodesicPath& path, const Point& target) {
    if (path.escaped || path.samples.empty()) return std::numeric_limits<double>::infinity();
    const auto& end = path.end();
    return std::max(std::abs(end.r - target.r()), std::abs(end.t - target.t()));
}

// Replays every hit numerically, keeps the ones landing on target, shortest first.
ConnectResult settle(const WarpFunction& w, std::vector<Hit> hits, const Point& p1,
                     const std::function<GeodesicState(const Hit&)>& init_of, const ConnectOptions& opts,
                     int evaluations) {
    std::sort(hits.begin(), hits.end(), [](const Hit& x, const Hit& y) { return x.s < y.s; });
    std::vector<Found> found;
    for (const Hit& hit : hits) {
        if (!found.empty() && std::abs(found.back().s - hit.s) <= 1e-12 * std::max(1.0, hit.s) &&
            std::abs(found.back().family_param - hit.param) <= 1e-10) {
            continue;
        }
        Found f;
        f.s = hit.s;
        f.family_param = hit.param;
        f.sign = hit.sign;
        f.initial = init_of(hit);
        f.path = integrate(w, f.initial, hit.s, opts.replay);
        f.replay_miss = endpoint_miss(f.path, p1);
        f.length = path_length(f.path);
        if (f.replay_miss <= opts.tol) found.push_back(std::move(f));
    }
    if (found.empty()) return NoGeodesic{NoGeodesicReason::SearchExhausted, evaluations};
    Found best = std::move(found.front());
    for (std::size_t i = 1; i < found.size(); ++i) {
        best.alternatives.push_back({found[i].s, found[i].family_param, found[i].sign, found[i].length});
    }
    best.iterations = evaluations;
    return best;
}

void require_distinct(const Point& p0, const Point& p1) {
    if (p0 == p1) throw std::invalid_argument("endpoints coincide");
}

std::vector<double> uniform_seeds(double lo, double hi, int n) {
    std::vector<double> seeds;
    seeds.reserve(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i < n; ++i) seeds.push_back(lo + (hi - lo) * (i + 0.5) / n);
    return seeds;
}

}  // namespace

std::string to_string(NoGeodesicReason reason) {
    return reason == NoGeodesicReason::ThresholdViolated ? "threshold-violated" : "search-exhausted";
}

bool connected(const ConnectResult& result) { return !std::holds_alternative<NoGeodesic>(result); }

std::optional<double> connection_length(const ConnectResult& result) {
    if (const auto* h = std::get_if<Horizontal>(&result)) return h->length;
    if (const auto* f = std::get_if<Found>(&result)) return f->length;
    return std::nullopt;
}

ConnectResult connect_ds1(const Point& p0, const Point& p1, const ConnectOptions& opts) {
    require_distinct(p0, p1);
    const double r0 = p0.r();
    const double r1 = p1.r();
    const double dt = p1.t() - p0.t();
    if (dt == 0.0) return Horizontal{std::abs(r1 - r0)};
    if (std::abs(dt) >= kPi) return NoGeodesic{NoGeodesicReason::ThresholdViolated, 0};

    const double target = std::abs(dt);
    const Sign sign = sign_from(dt);

    // The family member is labelled by its launch angle phi in (0, pi): a = r0 cos(phi),
    // sqrt(beta) = r0 sin(phi). Radial equation s^2 + 2 a s + r0^2 - r1^2 = 0, one root per branch.
    auto radial_s = [&](double phi, double branch) -> std::optional<double> {
        const double q = r0 * std::sin(phi);
        const double disc = (r1 - q) * (r1 + q);
        if (disc < 0.0) return std::nullopt;
        const double s = -r0 * std::cos(phi) + branch * std::sqrt(disc);
        if (!(s > 1e-14 * std::max(r0, r1))) return std::nullopt;
        return s;
    };
    auto miss = [&](double phi, double branch) -> std::optional<double> {
        if (!(phi > 0.0 && phi < kPi)) return std::nullopt;
        const auto s = radial_s(phi, branch);
        if (!s) return std::nullopt;
        return std::atan2(*s * r0 * std::sin(phi), r0 * r0 + r0 * std::cos(phi) * *s) - target;
    };

    // r1 < r0 is reachable only for phi >= pi - asin(r1/r0).
    const double lo = r1 < r0 ? kPi - std::asin(r1 / r0) : 0.0;
    std::vector<double> seeds = uniform_seeds(lo, kPi, opts.seeds);
    if (lo > 0.0) seeds.push_back(lo);
    // Roots can sit arbitrarily close to either end: rays at phi = 0 or pi, tangency to r = r1 at lo.
    const double width = kPi - lo;
    for (double e = 1e-2; e > 1e-15; e *= 0.1) {
        seeds.push_back(lo + width * e);
        seeds.push_back(kPi - width * e);
    }
    const double s_seed = std::sqrt(r0 * r0 + r1 * r1 - 2.0 * r0 * r1 * std::cos(dt));
    if (s_seed > 0.0) {
        // Launch angle of the chord: cos(phi) = (r1 cos dt - r0)/s, sin(phi) = r1 |sin dt|/s.
        const double phi_seed = std::atan2(r1 * std::abs(std::sin(dt)), r1 * std::cos(dt) - r0);
        if (phi_seed > 0.0 && phi_seed < kPi) seeds.push_back(phi_seed);
    }
    std::sort(seeds.begin(), seeds.end());

    int evaluations = 0;
    std::vector<Hit> hits;
    for (double branch : {1.0, -1.0}) {
        const auto roots = scan_roots(seeds, [&](double phi) { return miss(phi, branch); }, evaluations);
        for (double phi : roots) {
            if (auto s = radial_s(phi, branch)) hits.push_back({phi, *s, sign});
        }
    }
    const WarpFunction w = WarpFunction::one_over_r();
    auto init_of = [&](const Hit& h) {
        return GeodesicState{r0, p0.t(), std::cos(h.param), as_double(h.sign) * std::sin(h.param)};
    };
    ConnectResult res = settle(w, std::move(hits), p1, init_of, opts, evaluations);
    // Report the family parameter a in place of the launch angle.
    if (auto* f = std::get_if<Found>(&res)) {
        f->family_param = r0 * std::cos(f->family_param);
        for (auto& alt : f->alternatives) alt.family_param = r0 * std::cos(alt.family_param);
    }
    return res;
}

std::vector<ChordLawCandidate> chord_law_candidates(const Point& p0, const Point& p1) {
    const double dt = p1.t() - p0.t();
    if (dt == 0.0 || std::abs(dt) >= kPi) {
        throw std::invalid_argument("closed form needs 0 < |t1 - t0| < pi");
    }
    const double r0 = p0.r();
    const double r1 = p1.r();
    const double c = std::cos(dt);
    std::vector<ChordLawCandidate> out;
    for (ChordLawForm form : {ChordLawForm::Squared, ChordLawForm::Linear}) {
        for (Sign inner : {Sign::Plus, Sign::Minus}) {
            for (Sign outer : {Sign::Plus, Sign::Minus}) {
                const double si = as_double(inner);
                ChordLawCandidate cand;
                cand.form = form;
                cand.inner = inner;
                cand.outer = outer;
                if (form == ChordLawForm::Squared) {
                    cand.s_squared = r1 * r1 + r0 * r0 + si * 2.0 * r0 * r0 * r1 * r1 * c * c;
                } else {
                    cand.s_squared = r1 * r1 + r0 * r0 + si * 2.0 * r0 * r1 * c;
                }
                if (cand.s_squared >= 0.0) {
                    cand.s = as_double(outer) * std::sqrt(cand.s_squared);
                    // Both forms share a = (-r0^2 -+ r0 r1 cos) / s with the cos sign tied to `inner`.
                    cand.a = cand.s != 0.0 ? (-r0 * r0 - si * r0 * r1 * c) / cand.s : kNaN;
                } else {
                    cand.s = kNaN;
                    cand.a = kNaN;
                }
                cand.admissible = std::isfinite(cand.s) && cand.s != 0.0 && std::abs(cand.a) < r0;
                out.push_back(cand);
            }
        }
    }
    return out;
}

void reconcile(std::vector<ChordLawCandidate>& candidates, const Point& p0, const Point& p1,
               const ConnectResult& oracle, double tol) {
    const auto oracle_s = connection_length(oracle);
    for (auto& cand : candidates) {
        cand.lands_on_target = false;
        cand.matches_oracle = false;
        if (!cand.admissible) continue;
        for (Sign sign : {Sign::Plus, Sign::Minus}) {
            const Point q = ds1_eval(AnalyticGeodesicDS1(p0.r(), p0.t(), cand.a, sign), cand.s);
            if (std::abs(q.r() - p1.r()) <= tol && std::abs(q.t() - p1.t()) <= tol) {
                cand.lands_on_target = true;
            }
        }
        cand.matches_oracle = oracle_s && std::abs(std::abs(cand.s) - *oracle_s) <= tol;
    }
}

std::optional<double> distance_ds1(const Point& p0, const Point& p1, const ConnectOptions& opts) {
    if (p0 == p1) return 0.0;
    return connection_length(connect_ds1(p0, p1, opts));
}

ChordParam chord_alpha(const Point& p0, const Point& p1) {
    const double dt = p1.t() - p0.t();
    if (dt == 0.0) throw std::invalid_argument("chord parametrisation needs t1 != t0");
    if (std::abs(dt) >= kPi) throw DomainError("no geodesic joins points with |t1 - t0| >= pi");
    const double A = p0.r() * std::cos(p0.t()) - p1.r() * std::cos(p1.t());
    const double B = p0.r() * std::sin(p0.t()) - p1.r() * std::sin(p1.t());
    double alpha = std::atan2(A, B);
    if (alpha > kPi / 2) alpha -= kPi;
    if (alpha <= -kPi / 2) alpha += kPi;
    if (std::cos(p0.t() + alpha) == 0.0) throw DomainError("chord passes through the origin");
    return {alpha};
}

double chord_distance(const Point& p0, const Point& p1, const ChordParam& chord) {
    return std::abs(p1.r() * std::sin(p1.t() + chord.alpha) - p0.r() * std::sin(p0.t() + chord.alpha));
}

namespace {

// Arch of dr^2 + dt^2/r^2 leaving (r0, t0) at angle theta in (0, pi) from d_r:
// b = sin(theta)/r0, phase psi = theta + b s, r = sin(psi)/b.
double ds2_transverse_gain(double b, double theta, double psi) {
    return ((psi - theta) / 2.0 - (std::sin(2.0 * psi) - std::sin(2.0 * theta)) / 4.0) / (b * b);
}

}  // namespace

SameRConnection connect_ds2_same_r(double r0, double dt, const ConnectOptions& opts) {
    if (!(r0 > 0.0)) throw std::invalid_argument("r0 must be positive");
    if (dt == 0.0 || !std::isfinite(dt)) throw std::invalid_argument("dt must be finite and nonzero");
    const double gap = std::abs(dt);
    const Sign sign = sign_from(dt);
    const WarpFunction w = WarpFunction::identity();
    const Point p1{r0, dt};

    SameRConnection out;
    out.printed_threshold_met = kPi * r0 <= gap;

    // Full-period candidates b s = 2 k pi with s = 2|dt|.
    for (int k = 1;; ++k) {
        const double b = k * kPi / gap;
        if (b > 1.0 / r0) break;
        PeriodCandidate cand{k, b, 2.0 * gap, false};
        for (Sign radial : {Sign::Plus, Sign::Minus}) {
            const auto init = AnalyticGeodesicDS2(r0, 0.0, b, radial, sign).initial_state();
            const auto path = integrate(w, init, cand.s, opts.replay);
            if (endpoint_miss(path, p1) <= opts.tol) cand.replay_hit = true;
        }
        out.period_candidates.push_back(cand);
    }

    // Single arch: psi runs from asin(x) to pi - asin(x), x = b r0.
    int evaluations = 0;
    auto gain = [&](double x) {
        const double theta = std::asin(x);
        return ds2_transverse_gain(x / r0, theta, kPi - theta) - gap;
    };
    // gain decreases from +inf (x -> 0) to -gap (x = 1).
    double lo = 0.5;
    while (gain(lo) < 0.0 && lo > 1e-300) {
        lo *= 0.5;
        ++evaluations;
    }
    std::vector<Hit> hits;
    if (gain(lo) >= 0.0) {
        const double x = bisect_root(gain, lo, 1.0, evaluations);
        const double theta = std::asin(x);
        const double b = x / r0;
        hits.push_back({b, (kPi - 2.0 * theta) / b, sign});
    }
    auto init_of = [&](const Hit& h) {
        const double x = std::min(1.0, h.param * r0);
        return GeodesicState{r0, 0.0, std::sqrt(1.0 - x * x), as_double(h.sign) * x};
    };
    out.result = settle(w, std::move(hits), p1, init_of, opts, evaluations);
    return out;
}

ConnectResult connect_ds2(const Point& p0, const Point& p1, const ConnectOptions& opts) {
    require_distinct(p0, p1);
    const double r0 = p0.r();
    const double r1 = p1.r();
    const double dt = p1.t() - p0.t();
    if (dt == 0.0) return Horizontal{std::abs(r1 - r0)};
    const double target = std::abs(dt);
    const Sign sign = sign_from(dt);

    // branch +1 takes the first crossing of r = r1 (psi = asin q), -1 the second.
    auto hit_phase = [&](double theta, double branch) -> std::optional<double> {
        const double q = r1 * std::sin(theta) / r0;
        if (q > 1.0) return std::nullopt;
        const double psi = branch > 0.0 ? std::asin(q) : kPi - std::asin(q);
        if (!(psi > theta + 1e-14) || !(psi < kPi)) return std::nullopt;
        return psi;
    };
    auto miss = [&](double theta, double branch) -> std::optional<double> {
        const auto psi = hit_phase(theta, branch);
        if (!psi) return std::nullopt;
        return ds2_transverse_gain(std::sin(theta) / r0, theta, *psi) - target;
    };

    const std::vector<double> seeds = uniform_seeds(0.0, kPi, opts.seeds);
    int evaluations = 0;
    std::vector<Hit> hits;
    for (double branch : {1.0, -1.0}) {
        const auto roots = scan_roots(seeds, [&](double th) { return miss(th, branch); }, evaluations);
        for (double theta : roots) {
            if (auto psi = hit_phase(theta, branch)) {
                const double b = std::sin(theta) / r0;
                // family_param carries the launch angle until the replay below.
                hits.push_back({theta, (*psi - theta) / b, sign});
            }
        }
    }
    const WarpFunction w = WarpFunction::identity();
    auto init_of = [&](const Hit& h) {
        return GeodesicState{r0, p0.t(), std::cos(h.param), as_double(h.sign) * std::sin(h.param)};
    };
    ConnectResult res = settle(w, std::move(hits), p1, init_of, opts, evaluations);
    if (auto* f = std::get_if<Found>(&res)) {
        f->family_param = std::sin(f->family_param) / r0;
        for (auto& alt : f->alternatives) alt.family_param = std::sin(alt.family_param) / r0;
    }
    return res;
}

std::vector<AtlasRow> sweep_connect(Metric metric, const Point& p0, std::span<const Point> targets,
                                    unsigned workers, const ConnectOptions& opts) {
    std::vector<std::optional<AtlasRow>> slots(targets.size());
    std::vector<std::exception_ptr> failures(targets.size());
    auto one = [&](const Point& p1) {
        AtlasRow row{p0, p1, true, 0.0, 0};
        if (p1 == p0) return row;
        const ConnectResult res =
            metric == Metric::DS1 ? connect_ds1(p0, p1, opts) : connect_ds2(p0, p1, opts);
        row.exists = connected(res);
        row.length = connection_length(res);
        if (const auto* f = std::get_if<Found>(&res)) row.iterations = f->iterations;
        if (const auto* n = std::get_if<NoGeodesic>(&res)) row.iterations = n->iterations;
        return row;
    };
    auto work = [&](std::size_t first, std::size_t stride) {
        for (std::size_t i = first; i < targets.size(); i += stride) {
            try {
                slots[i] = one(targets[i]);
            } catch (...) {
                failures[i] = std::current_exception();
            }
        }
    };
    const unsigned n = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(targets.size())));
    if (n <= 1) {
        work(0, 1);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned k = 0; k < n; ++k) pool.emplace_back(work, k, n);
    }
    for (const auto& e : failures) {
        if (e) std::rethrow_exception(e);
    }
    std::vector<AtlasRow> rows;
    rows.reserve(slots.size());
    for (auto& s : slots) rows.push_back(*s);
    return rows;
}

void write_atlas_csv(std::ostream& os, std::span<const AtlasRow> rows) {
    os << "r0,t0,r1,t1,exists,length,iterations\n";
    char buf[256];
    for (const auto& row : rows) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%d,", row.p0.r(), row.p0.t(), row.p1.r(),
                      row.p1.t(), row.exists ? 1 : 0);
        os << buf;
        if (row.length) {
            std::snprintf(buf, sizeof buf, "%.17g", *row.length);
            os << buf;
        }
        os << ',' << row.iterations << '\n';
    }
}

}  // namespace warpgeo
