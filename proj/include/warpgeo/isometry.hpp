#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "warpgeo/geodesic.hpp"
#include "warpgeo/warp.hpp"

namespace warpgeo {

// (r, t) -> (k r, k t + l), k > 0.
class AffineMap {
public:
    AffineMap(double k, double l);

    double k() const { return k_; }
    double l() const { return l_; }

    static AffineMap identity() { return {1.0, 0.0}; }

private:
    double k_;
    double l_;
};

// (outer o inner)(p) = outer(inner(p)).
AffineMap compose(const AffineMap& outer, const AffineMap& inner);

Point affine_act(const AffineMap& m, const Point& p);

// Coordinate differential (diagonal k, k) applied to a vector at p; the result sits at m(p).
TangentVector affine_push(const AffineMap& m, const TangentVector& v);

// The unique map sending p to (1, 0).
AffineMap transitivity_witness(const Point& p);

// |u_r h(r) - v_t h(u)| + |u_t + h(r) h(u) v_r| for (u, v) = m(r, t).
double cr_residual(const WarpFunction& w, const AffineMap& m, const Point& p);

// max-abs entry of DG J(p) - J(m(p)) DG.
double holomorphy_residual(const WarpFunction& w, const AffineMap& m, const Point& p);

// max over points and vector pairs of |g(DG u, DG v) at m(p) - g(u, v) at p|;
// `vectors` are coordinate components (dr, dt) reused at every point.
double pullback_residual(const WarpFunction& w, const AffineMap& m, std::span<const Point> grid,
                         std::span<const std::pair<double, double>> vectors);

struct GridSpec {
    double r_min = 0.1;
    double r_max = 5.0;
    double t_min = -3.0;
    double t_max = 3.0;
    int nr = 20;
    int nt = 20;

    std::vector<Point> points() const;
};

struct ClassifyOptions {
    GridSpec grid{};
    double tol = 1e-9;
    std::uint64_t seed = 0;
};

enum class Verdict { HolomorphicIsometry, IsometryOnly, HolomorphicOnly, Neither };

std::string to_string(Verdict v);

struct IsometryReport {
    double holomorphy_residual = 0.0;  // max of the CR and commutator residuals
    double isometry_residual = 0.0;
    Verdict verdict = Verdict::Neither;
    GridSpec grid{};
    std::uint64_t seed = 0;
    double tol = 0.0;
};

IsometryReport classify(const WarpFunction& w, const AffineMap& m, const ClassifyOptions& opts = {});

// Pushes the geodesic from `init` through m and compares it, by target arc length,
// with the geodesic launched from the pushed initial data. Returns the largest
// coordinate deviation over s in [0, s_max].
double geodesic_preservation_defect(const WarpFunction& w, const AffineMap& m,
                                    const GeodesicState& init, double s_max);

}  // namespace warpgeo
