#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "robinlab/robin_energy.hpp"

using namespace robinlab;

namespace {

// |B_R|(−R²/(n(n+2)) + R/(αn))
double ball_closed_form(int n, double R, double alpha)
{
    return ball_volume(n, R) * (-R * R / (n * (n + 2.0)) + R / (alpha * n));
}

Domain wobbly_star()
{
    TrigPolynomial p;
    p.cos_coeffs = {1.0, 0.0, 0.05, 0.03};
    p.sin_coeffs = {0.0, 0.0, 0.0, 0.0, 0.02};
    return Domain::star2d(p, 1.0, 256);
}

}  // namespace

TEST(RobinEnergy, BallSeriesAndDirect)
{
    for (int n : {2, 3})
        for (double R : {1.0, 2.0})
            for (double alpha : {0.5, 1.0, 2.0, -1.0}) {
                const Domain d = Domain::ball(n, R);
                const SteklovBasis b = steklov_basis(d, 64);
                const TorsionSolution ts = solve_torsion(d);
                const double ref = ball_closed_form(n, R, alpha);
                const EnergyReport rep = energy_series(d, alpha, b, ts);
                ASSERT_TRUE(rep.E_total);
                // E vanishes at αR = n + 2 (R = 2, α = 2 in 2-D), so the tolerance is mixed.
                const double tol = 1e-12 * std::max(1.0, std::abs(ref));
                EXPECT_NEAR(*rep.E_total, ref, tol);
                EXPECT_NEAR(energy_direct(solve_robin_direct(d, alpha)), ref, tol);
                EXPECT_NEAR(energy_direct(solve_robin(d, alpha, b, ts)), ref, tol);
                EXPECT_NEAR(ball_energy(n, R, alpha), ref, tol);
                EXPECT_TRUE(rep.bounds_hold());
            }
}

TEST(RobinEnergy, DiscRobinEqualsClosedForm)
{
    EXPECT_NEAR(ball_energy(2, 1.0, 1.0), 3.0 * kPi / 8.0, 1e-15);
}

TEST(RobinEnergy, AnnulusSeriesMatchesDirect)
{
    const Domain d = Domain::annulus(3, 1.0, 0.5);
    const SteklovBasis b = steklov_basis(d, 64);
    const TorsionSolution ts = solve_torsion(d);
    for (double alpha : {0.3, 2.0, 4.9, 5.1, 7.0, -2.0}) {
        const EnergyReport rep = energy_series(d, alpha, b, ts);
        const double direct = energy_direct(solve_robin_direct(d, alpha));
        EXPECT_NEAR(*rep.E_total, direct, 1e-10 * std::max(1.0, std::abs(direct))) << alpha;
    }
}

TEST(RobinEnergy, AnnulusResonance)
{
    const Domain d = Domain::annulus(3, 1.0, 0.5);
    const SteklovBasis b = steklov_basis(d, 64);
    const TorsionSolution ts = solve_torsion(d);
    const EnergyReport rep = energy_series(d, 5.0, b, ts);
    EXPECT_EQ(rep.status, ExpansionStatus::NoSolution);
    EXPECT_FALSE(rep.E_total);
    EXPECT_THROW((void)energy_direct(solve_robin(d, 5.0, b, ts)), ValidationError);
}

TEST(RobinEnergy, CompatibleResonanceIsFamily)
{
    // Translations: α = 1 on the unit disc is a Steklov eigenvalue with a_i = 0.
    const Domain d = Domain::ball(2, 1.0);
    const SteklovBasis b = steklov_basis(d, 64);
    const EnergyReport rep = energy_series(d, 1.0, b, solve_torsion(d));
    EXPECT_EQ(rep.status, ExpansionStatus::Family);
    EXPECT_NEAR(*rep.E_total, 3.0 * kPi / 8.0, 1e-14);
    EXPECT_TRUE(rep.bounds_hold());
}

TEST(RobinEnergy, PoleScanAnnulus)
{
    const Domain d = Domain::annulus(3, 1.0, 0.5);
    const SteklovBasis b = steklov_basis(d, 64);
    const TorsionSolution ts = solve_torsion(d);
    std::vector<double> grid = {0.0, 1.0, 5.0, 6.0};
    const PoleScan s = pole_scan(d, grid, b, ts);
    ASSERT_EQ(s.poles.size(), 2u);
    EXPECT_EQ(s.poles[0], 0.0);
    EXPECT_EQ(s.poles[1], 5.0);
    EXPECT_EQ(s.excluded, (std::vector<double>{0.0, 5.0}));
    ASSERT_EQ(s.rows.size(), 2u);
    EXPECT_EQ(s.rows[1].alpha, 6.0);
}

TEST(RobinEnergy, StarSeriesMatchesLayerSolve)
{
    const Domain d = wobbly_star();
    const SteklovBasis b = steklov_basis(d, 64);
    const TorsionSolution ts = solve_torsion(d, b.layer_ptr());
    for (double alpha : {0.5, 0.95, -1.0}) {
        const EnergyReport rep = energy_series(d, alpha, b, ts);
        const RobinSolution direct = solve_robin_direct(d, alpha);
        EXPECT_NEAR(*rep.E_total, energy_direct(direct), 1e-9) << alpha;
        EXPECT_LT(direct.boundary_residual, 1e-9);
        EXPECT_TRUE(rep.bounds_hold());
    }
}

TEST(RobinEnergy, SplitVariational)
{
    const Domain d = make_ellipse(1.0, 0.1, 256);
    const SteklovBasis b = steklov_basis(d, 64);
    const TorsionSolution ts = solve_torsion(d, b.layer_ptr());
    const double alpha = 0.5;
    const EnergyReport rep = energy_series(d, alpha, b, ts);
    const VariationalSplit v = energy_split_variational(d, alpha, b, ts, rep.p);
    EXPECT_NEAR(v.E_plus_max, *rep.E_plus, 1e-12);
    EXPECT_NEAR(v.E_minus_restricted, *rep.E_minus, 1e-12);
    ASSERT_TRUE(v.E_minus_constrained);
    EXPECT_NEAR(*v.E_minus_constrained, *rep.E_minus, 1e-10);
    EXPECT_LE(*rep.E_minus, v.E_minus_trial_bound + 1e-15);
    EXPECT_THROW((void)energy_split_variational(d, alpha, b, ts, rep.p + 1), ValidationError);
}

TEST(RobinEnergy, TrialBoundOnShiftedShape)
{
    // Non-symmetric shape: the barycentre bound is strictly negative and above E⁻.
    TrigPolynomial p;
    p.cos_coeffs = {1.0, 0.0, 0.05, 0.06};
    const Domain d = Domain::star2d(p, 1.0, 256);
    const SteklovBasis b = steklov_basis(d, 64);
    const TorsionSolution ts = solve_torsion(d, b.layer_ptr());
    const double alpha = 0.3;
    const EnergyReport rep = energy_series(d, alpha, b, ts);
    const double bound = barycenter_trial_bound(d, alpha);
    EXPECT_LT(bound, 0.0);
    EXPECT_LE(*rep.E_minus, bound + 1e-14);
}

TEST(RobinEnergy, JFunctionalAndAlpha0)
{
    const Domain e = make_ellipse(1.0, 0.1, 256);
    const double T = rigidity(e).value;
    const double a0 = alpha0(e, T);
    EXPECT_GT(a0, 0.0);
    // 𝒥(Ω) − 𝒥(B) changes sign at α₀.
    const double lo = j_functional(e, 0.5 * a0, T) - j_functional_equal_ball(e, 0.5 * a0);
    const double hi = j_functional(e, 2.0 * a0, T) - j_functional_equal_ball(e, 2.0 * a0);
    const double at = j_functional(e, a0, T) - j_functional_equal_ball(e, a0);
    EXPECT_LT(lo, 0.0);
    EXPECT_GT(hi, 0.0);
    EXPECT_NEAR(at, 0.0, 1e-12);
    EXPECT_NEAR(j_functional_equal_ball(Domain::ball(2, 1.0), 0.7), ball_energy(2, 1.0, 0.7), 1e-14);
    EXPECT_THROW((void)alpha0(Domain::ball(2, 1.0)), ValidationError);
}

TEST(RobinEnergy, TruncationGuard)
{
    const Domain d = Domain::annulus(3, 1.0, 0.5);
    const SteklovBasis b = steklov_basis(d, 64);
    const TorsionSolution ts = solve_torsion(d);
    // With one mode the radial flux is missing and α is above the next eigenvalue.
    EXPECT_THROW((void)energy_series(d, 7.0, b, ts, 1), SolverError);
}
