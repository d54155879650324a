#include <cmath>

#include <gtest/gtest.h>

#include "robinlab/oracle/fem.hpp"
#include "robinlab/robin_energy.hpp"

using namespace robinlab;
using kernels::Exec;

namespace {

Domain disc() { return Domain::star2d(TrigPolynomial::constant(1.0), 1.0, 256); }

}  // namespace

TEST(Fem, PolarMeshShape)
{
    const fem::Mesh m = fem::polar_mesh(disc(), 4, 16);
    EXPECT_EQ(m.size(), 1 + 4 * 16);
    EXPECT_EQ(m.boundary.size(), 16u);
    EXPECT_EQ(m.triangles.size(), static_cast<std::size_t>(16 + 2 * 16 * 3));
    for (int id : m.boundary) EXPECT_NEAR(std::hypot(m.x[id], m.y[id]), 1.0, 1e-15);
    EXPECT_EQ(m.node(0, 5), 0);
}

TEST(Fem, SerialAndParallelAssemblyIdentical)
{
    TrigPolynomial p;
    p.cos_coeffs = {1.0, 0.0, 0.1};
    const fem::Mesh m = fem::polar_mesh(Domain::star2d(p), 12, 48);
    const fem::Assembly a = fem::assemble(m, Exec::Serial);
    const fem::Assembly b = fem::assemble(m, Exec::Parallel);
    EXPECT_EQ(a.stiffness_values, b.stiffness_values);
    EXPECT_EQ(a.load, b.load);
    // ∫Σφ_i = area of the polygon
    double s = 0.0;
    for (double v : a.load) s += v;
    EXPECT_GT(s, 0.0);
}

TEST(Fem, DiscEnergies)
{
    const fem::FemSolution a = fem::fem_robin_energy(disc(), 0.5);
    EXPECT_NEAR(a.energy, ball_energy(2, 1.0, 0.5), 1e-7);
    const fem::FemSolution b = fem::fem_robin_energy(disc(), -1.0);
    EXPECT_NEAR(b.energy, -5.0 * kPi / 8.0, 1e-7);
    const fem::FemSolution t = fem::fem_dirichlet_T(disc());
    EXPECT_NEAR(t.energy, -kPi / 8.0, 1e-6);
    EXPECT_LT(t.error, 1e-5);
}

TEST(Fem, ResonantButCompatible)
{
    // α = 1 on the unit disc: translations are in the kernel, load is orthogonal.
    const fem::FemSolution a = fem::fem_robin_energy(disc(), 1.0);
    EXPECT_NEAR(a.energy, 3.0 * kPi / 8.0, 1e-7);
}

TEST(Fem, SecondOrderConvergence)
{
    const fem::FemSolution t = fem::fem_dirichlet_T(make_ellipse(1.0, 0.1, 256));
    ASSERT_EQ(t.level_values.size(), 3u);
    const double exact = -kPi * std::pow(1.0, 3) / (4.0 * (1.0 / 1.21 + 1.21));
    const double e0 = std::abs(t.level_values[0] - exact), e1 = std::abs(t.level_values[1] - exact);
    EXPECT_GT(e0 / e1, 3.5);   // order ≥ 2 under halving
    EXPECT_NEAR(t.energy, exact, 1e-7);
}

TEST(Fem, SquareTorsion)
{
    const double side = std::sqrt(kPi);
    const fem::FemSolution s = fem::fem_dirichlet_T_square(side);
    const double series = fem::square_torsion_series(side);
    EXPECT_NEAR(s.energy, series, 1e-7);
    EXPECT_GT(series, -kPi / 8.0);   // equal-area disc has the minimal T
}

TEST(Fem, SquareSeriesValue)
{
    // ∫s = 0.0351442537 on the unit square
    EXPECT_NEAR(fem::square_torsion_series(1.0), -0.0351442537, 1e-9);
}

TEST(Fem, EllipseRobinAgainstLayer)
{
    const Domain e = make_ellipse(1.0, 0.1, 256);
    const fem::FemSolution f = fem::fem_robin_energy(e, 0.5);
    EXPECT_NEAR(f.energy, energy_direct(solve_robin_direct(e, 0.5)), 1e-7);
}

TEST(Fem, SteklovResidual)
{
    const fem::SteklovResidual a = fem::steklov_residual(spectrum_ball(2, 1.0, 6, 128), 10);
    EXPECT_LT(a.max_residual, 1e-10);
    TrigPolynomial p;
    p.cos_coeffs = {1.0, 0.0, 0.05, 0.03};
    p.sin_coeffs = {0.0, 0.0, 0.0, 0.0, 0.02};
    const Domain d = Domain::star2d(p, 1.0, 256);
    const fem::SteklovResidual r = fem::steklov_residual(spectrum_star2d(d, 10, 256), 10);
    EXPECT_LT(r.max_residual, 1e-5);
    EXPECT_EQ(r.per_mode.size(), 10u);
}

TEST(Fem, NoSolutionAtIncompatibleResonance)
{
    // μ = 0 with a constant load: α → 0 has no Robin solution.
    EXPECT_THROW((void)fem::fem_robin_energy(disc(), 0.0), std::exception);
}
