#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "warpgeo/riccati.hpp"

using namespace warpgeo;

namespace {

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> out;
    for (int i = 0; i < n; ++i) out.push_back(lo + (hi - lo) * i / (n - 1));
    return out;
}

double max_abs_error(const HField& field, const std::function<double(double)>& exact) {
    double worst = 0.0;
    for (std::size_t i = 0; i < field.r.size(); ++i) {
        worst = std::max(worst, std::abs(field.H[i] - exact(field.r[i])));
    }
    return worst;
}

}  // namespace

TEST(SolvePrescribed, FixedPointStaysConstant) {
    const auto field = solve_prescribed(CurvatureProfile::constant(-1.0), 1.0, 1.0, Interval{0.5, 4.0});
    ASSERT_GE(field.r.size(), 2u);
    EXPECT_FALSE(field.blowup.has_value());
    EXPECT_NEAR(field.r.front(), 0.5, 1e-14);
    EXPECT_NEAR(field.r.back(), 4.0, 1e-14);
    for (double H : field.H) EXPECT_NEAR(H, 1.0, 1e-12);
    // h = e^{r - 1}
    for (std::size_t i = 0; i < field.r.size(); ++i) {
        EXPECT_NEAR(field.h[i], std::exp(field.r[i] - 1.0), 1e-9 * field.h[i]);
    }
}

TEST(SolvePrescribed, ZeroProfileBlowsUpAtTwo) {
    const auto field = solve_prescribed(CurvatureProfile::constant(0.0), 1.0, 1.0, Interval{0.5, 3.0});
    ASSERT_TRUE(field.blowup.has_value());
    EXPECT_NEAR(*field.blowup, 2.0, 1e-4);
    EXPECT_LT(field.r.back(), *field.blowup);
    for (std::size_t i = 0; i < field.r.size(); ++i) {
        if (field.r[i] > 1.9) break;
        EXPECT_NEAR(field.H[i], 1.0 / (2.0 - field.r[i]), 1e-8 * (1 + std::abs(field.H[i])));
        // h = 1/(2 - r) normalized to h(1) = 1
        EXPECT_NEAR(field.h[i], 1.0 / (2.0 - field.r[i]), 1e-8 * field.h[i]);
    }
}

TEST(SolvePrescribed, InverseSquareGivesOneOverR) {
    const auto field = solve_prescribed(CurvatureProfile::inverse_square(-2.0), 1.0, 1.0, Interval{0.2, 6.0});
    EXPECT_FALSE(field.blowup.has_value());
    EXPECT_LT(max_abs_error(field, [](double r) { return 1.0 / r; }), 1e-8);
    for (std::size_t i = 0; i < field.r.size(); ++i) EXPECT_NEAR(field.h[i], field.r[i], 1e-8 * field.r[i]);
}

TEST(SolvePrescribed, GridStrictlyIncreasingAndPositiveH) {
    const auto field = solve_prescribed(CurvatureProfile::inverse_square(-2.0), 2.0, -0.3, Interval{0.5, 5.0});
    for (std::size_t i = 1; i < field.r.size(); ++i) EXPECT_GT(field.r[i], field.r[i - 1]);
    for (double h : field.h) EXPECT_GT(h, 0.0);
    EXPECT_EQ(field.r.size(), field.H.size());
    EXPECT_EQ(field.r.size(), field.h.size());
}

TEST(SolvePrescribed, RejectsBadInput) {
    EXPECT_THROW(solve_prescribed(CurvatureProfile::constant(0.0), 5.0, 1.0, Interval{0.5, 3.0}),
                 std::invalid_argument);
    EXPECT_THROW(solve_prescribed(CurvatureProfile::constant(0.0), 1.0, std::nan(""), Interval{0.5, 3.0}),
                 std::invalid_argument);
}

TEST(SolvePrescribed, BlowUpLocationMatchesReciprocal) {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> r0d(0.5, 3.0), H0d(0.2, 5.0);
    for (int i = 0; i < 20; ++i) {
        const double r0 = r0d(rng), H0 = H0d(rng);
        const auto field =
            solve_prescribed(CurvatureProfile::constant(0.0), r0, H0, Interval{r0 * 0.5, r0 + 1.0 / H0 + 1.0});
        ASSERT_TRUE(field.blowup.has_value());
        EXPECT_NEAR(*field.blowup, r0 + 1.0 / H0, 1e-4) << "r0=" << r0 << " H0=" << H0;
    }
}

TEST(SolvePrescribed, NegativeBlowUpBackward) {
    // H' = H^2 with H(1) = -1 gives H = -1/r, which blows up at r = 0 backward.
    const auto field = solve_prescribed(CurvatureProfile::constant(0.0), 1.0, -1.0, Interval{1e-3, 2.0});
    EXPECT_LT(max_abs_error(field, [](double r) { return -1.0 / r; }), 1e-4);
}

TEST(SolvePrescribed, RoundTripsFlatFamily) {
    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> mag(0.5, 3.0), coin(0.0, 1.0);
    for (int trial = 0; trial < 30; ++trial) {
        const double a0 = (coin(rng) < 0.5 ? -1.0 : 1.0) * mag(rng);
        const double a1 = mag(rng) * 2.0;
        const auto w = analytic_flat(a0, a1);
        const Interval d = w.domain();
        const double lo = d.lo + 0.05 * (std::isfinite(d.hi) ? d.hi - d.lo : 1.0);
        const double hi = std::isfinite(d.hi) ? d.hi - 0.05 * (d.hi - d.lo) : lo + 5.0;
        const double r0 = 0.5 * (lo + hi);
        const auto field =
            solve_prescribed(CurvatureProfile::constant(0.0), r0, w.H(r0), Interval{lo, hi});
        ASSERT_FALSE(field.blowup.has_value()) << w.label();
        for (std::size_t i = 0; i < field.r.size(); ++i) {
            const double exact = w.H(field.r[i]);
            EXPECT_NEAR(field.H[i], exact, 1e-8 * (1 + std::abs(exact))) << w.label() << " r=" << field.r[i];
        }
    }
}

TEST(AnalyticFlat, Examples) {
    const auto inv = analytic_flat(-1.0, 0.0);
    EXPECT_EQ(inv.domain().lo, 0.0);
    EXPECT_TRUE(std::isinf(inv.domain().hi));
    EXPECT_NEAR(inv.h(4.0), 0.25, 1e-16);
    const auto w = analytic_flat(1.0, 5.0);
    EXPECT_EQ(w.domain().hi, 5.0);
    EXPECT_NEAR(w.h(3.0), 0.5, 1e-16);
    for (double r : linspace(0.1, 4.9, 25)) EXPECT_NEAR(sectional_curvature(w, r), 0.0, 1e-9);
    EXPECT_THROW(analytic_flat(0.0, 1.0), std::invalid_argument);
}

TEST(AnalyticNeg2, Examples) {
    const auto lin = analytic_neg2(1.0, 1.0, 0.0);
    EXPECT_DOUBLE_EQ(lin.h(2.5), 2.5);
    const auto w = analytic_neg2(1.0, 1.0, 1.0);
    EXPECT_NEAR(w.h(2.0), 2.0 / 9.0, 1e-16);
    for (double r : linspace(0.1, 6.0, 30)) EXPECT_NEAR(sectional_curvature(w, r), -2.0 / (r * r), 1e-9 / (r * r));
    const auto split = analytic_neg2(1.0, -1.0, 1.0);
    EXPECT_FALSE(split.in_domain(1.0));
    EXPECT_THROW(split.h(1.0), DomainError);
    for (double r : {1.2, 2.0, 5.0}) EXPECT_NEAR(sectional_curvature(split, r), -2.0 / (r * r), 1e-9);
    const auto other = analytic_neg2(-1.0, -1.0, 1.0);
    for (double r : {0.2, 0.5, 0.9}) EXPECT_NEAR(sectional_curvature(other, r), -2.0 / (r * r), 1e-8);
}

TEST(VerifyRiccati, Examples) {
    const auto grid = linspace(0.2, 5.0, 40);
    const auto flat = verify_riccati(WarpFunction::one_over_r(), CurvatureProfile::constant(0.0), grid, 1e-9);
    EXPECT_TRUE(flat.pass);
    EXPECT_LE(flat.max_residual, 1e-12);
    EXPECT_EQ(flat.grid_size, grid.size());
    const auto hyp = verify_riccati(WarpFunction::identity(), CurvatureProfile::inverse_square(-2.0), grid, 1e-9);
    EXPECT_TRUE(hyp.pass);
    EXPECT_LE(hyp.max_residual, 1e-12);
    const auto bad = verify_riccati(WarpFunction::identity(), CurvatureProfile::constant(0.0), grid, 1e-9);
    EXPECT_FALSE(bad.pass);
    EXPECT_NEAR(bad.max_residual, 2.0 / (0.2 * 0.2), 1e-9);
}

TEST(VerifyRiccati, GridOutsideDomainFails) {
    const std::vector<double> grid{1.0, 6.0};
    const auto rep = verify_riccati(analytic_flat(1.0, 5.0), CurvatureProfile::constant(0.0), grid, 1e-9);
    EXPECT_FALSE(rep.pass);
    EXPECT_TRUE(std::isinf(rep.max_residual));
}

TEST(VerifyField, NumericSolutionsPass) {
    const auto f = CurvatureProfile::inverse_square(-2.0);
    const auto field = solve_prescribed(f, 1.0, 1.0, Interval{0.3, 4.0});
    EXPECT_TRUE(verify_field(field, f, 1e-6).pass);
    const auto z = CurvatureProfile::constant(0.0);
    const auto pole = solve_prescribed(z, 1.0, 1.0, Interval{0.5, 3.0});
    const auto rep = verify_field(pole, z, 1e-6);
    EXPECT_TRUE(rep.pass) << rep.max_residual;
    ASSERT_TRUE(rep.blowup_location.has_value());
    EXPECT_NEAR(*rep.blowup_location, 2.0, 1e-4);
}

TEST(VerifyField, WrongProfileFails) {
    const auto field = solve_prescribed(CurvatureProfile::constant(-1.0), 1.0, 1.0, Interval{0.5, 3.0});
    const auto rep = verify_field(field, CurvatureProfile::constant(0.0), 1e-6);
    EXPECT_FALSE(rep.pass);
    EXPECT_GT(rep.max_residual, 0.1);
}

TEST(Profiles, Evaluate) {
    EXPECT_EQ(CurvatureProfile::constant(-3.0)(7.0), -3.0);
    EXPECT_DOUBLE_EQ(CurvatureProfile::inverse_square(-2.0)(2.0), -0.5);
}
