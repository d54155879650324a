#include <cmath>
#include <functional>

#include <gtest/gtest.h>

#include "robinlab/geometry.hpp"

using namespace robinlab;

namespace {

// Composite Simpson rule on [0, 2π]; independent of the library's trapezoid sums.
double simpson(const std::function<double(double)>& f, int n = 20000)
{
    const double h = 2.0 * kPi / n;
    double s = f(0.0) + f(2.0 * kPi);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(i * h);
    return s * h / 3.0;
}

Domain cos2_star()
{
    TrigPolynomial p;
    p.cos_coeffs = {1.0, 0.0, 0.1};
    return Domain::star2d(p);
}

}  // namespace

TEST(Geometry, BallMeasures)
{
    EXPECT_DOUBLE_EQ(volume(Domain::ball(2, 1.0)), kPi);
    EXPECT_DOUBLE_EQ(surface_area(Domain::ball(2, 1.0)), 2.0 * kPi);
    EXPECT_NEAR(surface_area(Domain::ball(3, 2.0)), 16.0 * kPi, 1e-12);
    EXPECT_NEAR(volume(Domain::ball(3, 2.0)), 32.0 * kPi / 3.0, 1e-12);
    EXPECT_NEAR(volume(Domain::ball(4, 1.0)), kPi * kPi / 2.0, 1e-13);
}

TEST(Geometry, AnnulusMeasures)
{
    const Domain a = Domain::annulus(3, 1.0, 0.5);
    EXPECT_NEAR(volume(a), 4.0 * kPi / 3.0 * (1.0 - 0.125), 1e-13);
    EXPECT_NEAR(surface_area(a), 4.0 * kPi * 1.25, 1e-13);
}

TEST(Geometry, StarMeasuresMatchSimpson)
{
    const Domain d = cos2_star();
    auto rho = [](double t) { return 1.0 + 0.1 * std::cos(2.0 * t); };
    auto drho = [](double t) { return -0.2 * std::sin(2.0 * t); };
    const double A = simpson([&](double t) { return 0.5 * rho(t) * rho(t); });
    const double L = simpson([&](double t) { return std::hypot(rho(t), drho(t)); });
    EXPECT_NEAR(volume(d), A, 1e-13);
    EXPECT_NEAR(surface_area(d), L, 1e-12);
    EXPECT_LT(volume_estimate(d).error, 1e-13);
}

TEST(Geometry, MeanCurvature)
{
    EXPECT_DOUBLE_EQ(mean_curvature(Domain::ball(3, 2.0)), 0.5);
    EXPECT_DOUBLE_EQ(mean_curvature(Domain::annulus(2, 1.0, 0.5), {0.0, 1}), -2.0);
    const Domain disc = Domain::star2d(TrigPolynomial::constant(1.0), 2.0);
    EXPECT_NEAR(mean_curvature(disc, {0.7, 0}), 0.5, 1e-14);
    // ∮ H dS = 2π for a simple closed curve.
    const Domain d = cos2_star();
    const double total = simpson([&](double t) {
        return mean_curvature(d, {t, 0}) * std::hypot(d.rho(t), d.rho(t, 1));
    });
    EXPECT_NEAR(total, 2.0 * kPi, 1e-10);
}

TEST(Geometry, HarmonicDimensions)
{
    EXPECT_EQ(harmonic_dimension(2, 0), 1);
    EXPECT_EQ(harmonic_dimension(2, 5), 2);
    for (int k = 0; k < 10; ++k) EXPECT_EQ(harmonic_dimension(3, k), 2 * k + 1);
    EXPECT_EQ(harmonic_dimension(4, 2), 9);
    EXPECT_EQ(ball_mode_count(3, 2), 9);
    EXPECT_EQ(ball_mode_degree(3, 0), 0);
    EXPECT_EQ(ball_mode_degree(3, 3), 1);
    EXPECT_EQ(ball_mode_degree(3, 4), 2);
    EXPECT_EQ(ball_mode_degree(2, 4), 2);
}

TEST(Geometry, VolumeChecks)
{
    const Domain ball = Domain::ball(2, 1.0);
    PerturbationField p;
    p.b = {0.0, 0.0, 0.0, 1.0};
    EXPECT_TRUE(check_volume_preserving(p, ball, 1).passed);
    EXPECT_TRUE(check_volume_preserving(p, ball, 2).passed);
    // (n−1)∮H(v·ν)² = 1 on the unit disc; the constant w·ν is −1/|∂B|.
    EXPECT_NEAR(compensating_w_normal(p, ball), -1.0 / (2.0 * kPi), 1e-15);
    p.b[0] = 0.1;
    EXPECT_FALSE(check_volume_preserving(p, ball, 1).passed);
    p.b[0] = 0.0;
    p.w_mode = SecondOrderMode::None;
    EXPECT_FALSE(check_volume_preserving(p, ball, 2).passed);
}

TEST(Geometry, EllipseFieldVolume)
{
    // x ↦ (x(1 − t + t²), y(1 + t)): v = (−x, y), w = (2x, 0).
    const Domain disc = Domain::ball(2, 1.0);
    PlanarField v = [](double x, double y) { return std::array<double, 2>{-x, y}; };
    PlanarField w = [](double x, double) { return std::array<double, 2>{2.0 * x, 0.0}; };
    EXPECT_TRUE(check_volume_preserving(v, w, disc, 1).passed);
    EXPECT_TRUE(check_volume_preserving(v, w, disc, 2).passed);
}

TEST(Geometry, EllipseIsAreaPreserving)
{
    for (double t : {-0.05, 0.1, 0.3}) {
        const Domain e = make_ellipse(1.5, t);
        EXPECT_NEAR(volume(e), kPi * 2.25, 1e-12);
        const double a = 1.5 / (1.0 + t), b = 1.5 * (1.0 + t);
        const double L = simpson([&](double s) { return std::hypot(a * std::sin(s), b * std::cos(s)); });
        EXPECT_NEAR(surface_area(e), L, 1e-11);
    }
}

TEST(Geometry, VolumeCorrectedStar)
{
    TrigPolynomial eta;
    eta.cos_coeffs = {0.0, 0.0, -1.0, 0.3};
    for (double t : {-0.03, 0.02, 0.1}) EXPECT_NEAR(volume(volume_corrected_star(eta, 2.0, t)), 4.0 * kPi, 1e-12);
}

TEST(Geometry, SurfaceDefect)
{
    EXPECT_NEAR(surface_defect(Domain::ball(2, 3.0)), 0.0, 1e-15);
    EXPECT_GT(surface_defect(make_ellipse(1.0, 0.1)), 0.0);
    EXPECT_THROW((void)surface_defect(Domain::ball(3, 1.0)), ValidationError);
}

TEST(Geometry, PlanarMomentsOfShiftedShape)
{
    TrigPolynomial p;
    p.cos_coeffs = {1.0, 0.2};
    const Domain d = Domain::star2d(p);
    const PlanarMoments m = planar_moments(d);
    const double vol_x = simpson([&](double t) { return std::pow(d.rho(t), 3) / 3.0 * std::cos(t); });
    const double bnd_x = simpson([&](double t) { return d.rho(t) * std::cos(t) * std::hypot(d.rho(t), d.rho(t, 1)); });
    EXPECT_NEAR(m.vol_x, vol_x, 1e-12);
    EXPECT_NEAR(m.bnd_x, bnd_x, 1e-12);
    EXPECT_NEAR(m.vol_y, 0.0, 1e-14);
}

TEST(Geometry, Validation)
{
    EXPECT_THROW((void)Domain::ball(1, 1.0), ValidationError);
    EXPECT_THROW((void)Domain::ball(2, -1.0), ValidationError);
    EXPECT_THROW((void)Domain::annulus(3, 1.0, 1.0), ValidationError);
    TrigPolynomial bad;
    bad.cos_coeffs = {1.0, 1.5};
    EXPECT_THROW((void)Domain::star2d(bad), ValidationError);
    EXPECT_THROW((void)second_order_mode_from_string("sometimes"), ValidationError);
}

TEST(Geometry, RandomCorpusIsReproducible)
{
    StarCorpusOptions o;
    o.count = 5;
    o.seed = 42;
    const auto a = random_star_corpus(o);
    const auto b = random_star_corpus(o);
    ASSERT_EQ(a.size(), 5u);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].shape().cos_coeffs, b[i].shape().cos_coeffs);
        EXPECT_EQ(a[i].shape().sin_coeffs, b[i].shape().sin_coeffs);
        EXPECT_EQ(a[i].shape().cos_coeffs[1], 0.0);
    }
    o.amplitude = 0.5;
    EXPECT_THROW((void)random_star_corpus(o), ValidationError);
}
