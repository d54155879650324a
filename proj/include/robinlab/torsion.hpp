#pragma once

#include <memory>
#include <vector>

#include "robinlab/geometry.hpp"
#include "robinlab/layer_potential.hpp"
#include "robinlab/steklov.hpp"

namespace robinlab {

/// Dirichlet torsion function: Δs + 1 = 0 in Ω, s = 0 on ∂Ω.
struct TorsionSolution {
    std::shared_ptr<const Domain> domain;
    double T = 0.0;               // −∫s dx
    double T_error = 0.0;
    double flux_norm2 = 0.0;      // ∮(∂νs)² dS
    double gauss_residual = 0.0;  // |∮∂νs dS + |Ω||
    double trace_residual = 0.0;  // max |s| on the boundary nodes

    // Radial closed form s = −r²/(2n) + d1 + d2 g(r) (Ball: d2 = 0).
    double d1 = 0.0, d2 = 0.0;
    double flux_outer = 0.0, flux_inner = 0.0;

    // Star2D: s = −|x|²/4 + H with H = Sψ + c harmonic.
    std::shared_ptr<const LayerPotential2D> layer;
    LayerDensity harmonic;

    // 2-D: ∂νs at the boundary grid nodes.
    std::shared_ptr<const BoundaryGrid> grid;
    std::vector<double> flux;

    /// s at a point of Ω (2-D; Star2D values are accurate away from ∂Ω).
    [[nodiscard]] double evaluate(double x, double y) const;
    /// s(r) for radial domains.
    [[nodiscard]] double evaluate_radial(double r) const;
};

[[nodiscard]] TorsionSolution solve_torsion(const Domain& d);
/// Star2D solve reusing an existing discretisation (e.g. that of a Steklov basis).
[[nodiscard]] TorsionSolution solve_torsion(const Domain& d, std::shared_ptr<const LayerPotential2D> layer);

/// T(Ω) = −∫s dx with a quadrature error estimate (zero for closed forms).
[[nodiscard]] QuadratureEstimate rigidity(const Domain& d);

/// T of the ball, −R²|B_R|/(n(n+2)).
[[nodiscard]] double ball_rigidity(int dim, double radius);

/// a_i = ∮ φ_i ∂νs dS.
[[nodiscard]] std::vector<double> flux_coefficients(const TorsionSolution& ts, const SteklovBasis& basis);

}  // namespace robinlab
