#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "warpgeo/geodesic.hpp"
#include "warpgeo/warp.hpp"

namespace warpgeo {

enum class NoGeodesicReason { ThresholdViolated, SearchExhausted };

std::string to_string(NoGeodesicReason reason);

struct Horizontal {
    double length = 0.0;
};

// A further hit of the shooting map, kept beside the shortest one.
struct Alternative {
    double s = 0.0;
    double family_param = 0.0;
    Sign sign = Sign::Plus;
    double length = 0.0;
};

// family_param is a for dr^2 + r^2 dt^2 and b for dr^2 + dt^2/r^2.
struct Found {
    double s = 0.0;
    double family_param = 0.0;
    Sign sign = Sign::Plus;
    GeodesicState initial;
    GeodesicPath path;
    double length = 0.0;
    double replay_miss = 0.0;
    int iterations = 0;
    std::vector<Alternative> alternatives;
};

struct NoGeodesic {
    NoGeodesicReason reason = NoGeodesicReason::SearchExhausted;
    int iterations = 0;
};

using ConnectResult = std::variant<Horizontal, Found, NoGeodesic>;

bool connected(const ConnectResult& result);
std::optional<double> connection_length(const ConnectResult& result);

struct ConnectOptions {
    double tol = 1e-9;  // replayed endpoint must land this close in r and t
    int seeds = 64;
    IntegrateOptions replay = [] {
        IntegrateOptions o;
        o.control.abs_tol = 1e-13;
        o.control.rel_tol = 1e-13;
        return o;
    }();
};

ConnectResult connect_ds1(const Point& p0, const Point& p1, const ConnectOptions& opts = {});

enum class ChordLawForm { Squared, Linear };  // cos^2 term or cos term

// One sign variant of the closed-form (s, a) for the two-point problem.
struct ChordLawCandidate {
    ChordLawForm form = ChordLawForm::Linear;
    Sign inner = Sign::Plus;  // sign in front of the cos term
    Sign outer = Sign::Plus;  // sign of s
    double s_squared = 0.0;
    double s = 0.0;           // NaN when s_squared < 0
    double a = 0.0;
    bool admissible = false;  // s real and nonzero, a in (-r0, r0)
    bool lands_on_target = false;
    bool matches_oracle = false;

    bool confirmed() const { return lands_on_target && matches_oracle; }
};

std::vector<ChordLawCandidate> chord_law_candidates(const Point& p0, const Point& p1);

// Marks which candidates reach p1 and agree with the oracle's arc length.
void reconcile(std::vector<ChordLawCandidate>& candidates, const Point& p0, const Point& p1,
               const ConnectResult& oracle, double tol = 1e-8);

std::optional<double> distance_ds1(const Point& p0, const Point& p1, const ConnectOptions& opts = {});

struct ChordParam {
    double alpha = 0.0;
};

// alpha with r0 cos(t0 + alpha) = r1 cos(t1 + alpha), reduced into (-pi/2, pi/2].
ChordParam chord_alpha(const Point& p0, const Point& p1);

// |r1 sin(t1 + alpha) - r0 sin(t0 + alpha)|
double chord_distance(const Point& p0, const Point& p1, const ChordParam& chord);

// Full-period candidate b = k pi/|dt| for the same-r problem on dr^2 + dt^2/r^2.
struct PeriodCandidate {
    int k = 0;
    double b = 0.0;
    double s = 0.0;
    bool replay_hit = false;
};

struct SameRConnection {
    ConnectResult result;
    bool printed_threshold_met = false;  // pi r0 <= |dt|
    std::vector<PeriodCandidate> period_candidates;
};

SameRConnection connect_ds2_same_r(double r0, double dt, const ConnectOptions& opts = {});

ConnectResult connect_ds2(const Point& p0, const Point& p1, const ConnectOptions& opts = {});

enum class Metric { DS1, DS2 };

struct AtlasRow {
    Point p0;
    Point p1;
    bool exists = false;
    std::optional<double> length;
    int iterations = 0;
};

// Connects p0 to every target; rows come back in target order regardless of `workers`.
std::vector<AtlasRow> sweep_connect(Metric metric, const Point& p0, std::span<const Point> targets,
                                    unsigned workers = 1, const ConnectOptions& opts = {});

void write_atlas_csv(std::ostream& os, std::span<const AtlasRow> rows);

}  // namespace warpgeo
