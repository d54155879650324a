#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "robinlab/geometry.hpp"
#include "robinlab/layer_potential.hpp"
#include "robinlab/steklov.hpp"
#include "robinlab/torsion.hpp"

namespace robinlab {

/// Robin torsion problem Δu + 1 = 0, ∂νu = αu. The energy E = −∫u dx.
struct RobinSolution {
    enum class Method { Series, Radial, Layer };

    double alpha = 0.0;
    Method method = Method::Series;
    ExpansionStatus status = ExpansionStatus::Unique;
    std::shared_ptr<const Domain> domain;

    // Series: u = s + Σ h_i φ_i.
    HarmonicExpansion h;
    std::shared_ptr<const SteklovBasis> basis;
    std::shared_ptr<const TorsionSolution> torsion;

    // Radial: u = −r²/(2n) + A + B g(r).
    double A = 0.0, B = 0.0;

    // Layer: u = −|x|²/4 + Sψ + c, boundary values of u at the grid nodes.
    std::shared_ptr<const LayerPotential2D> layer;
    LayerDensity density;
    std::vector<double> boundary_u;

    double boundary_residual = 0.0;   // max |∂νu − αu| on the boundary

    /// u at a point (2-D), or at radius r for radial methods via evaluate_radial.
    [[nodiscard]] double evaluate(double x, double y) const;
    [[nodiscard]] double evaluate_radial(double r) const;
};

/// u = s + h with h from the Steklov expansion of g = −∂νs.
[[nodiscard]] RobinSolution solve_robin(const Domain& d, double alpha, const SteklovBasis& basis,
                                        const TorsionSolution& ts);

/// Solve that does not use the Steklov expansion: radial two-point problem for
/// Ball/Annulus, second-kind boundary integral equation for Star2D.
[[nodiscard]] RobinSolution solve_robin_direct(const Domain& d, double alpha);

/// −∫u dx. Throws ValidationError when the solution does not exist.
[[nodiscard]] double energy_direct(const RobinSolution& sol);

struct EnergyReport {
    double alpha = 0.0;
    double T = 0.0;
    std::optional<double> E_plus, E_minus, E_total;   // absent when status == NoSolution
    int N_modes = 0;
    int p = 0;                        // #{μ_i < α}
    double tail_bound = 0.0;
    ExpansionStatus status = ExpansionStatus::Unique;
    double pole_distance = 0.0;       // min_i |α − μ_i|
    // Bounds α⁻¹‖∂νs⁺‖² ≤ 𝓔⁺ ≤ (α−μ_p)⁻¹‖∂νs⁺‖² and (α−μ_{p+1})⁻¹‖∂νs⁻‖² ≤ 𝓔⁻ ≤ 0.
    double plus_norm2 = 0.0, minus_norm2 = 0.0;
    double E_plus_lower = 0.0, E_plus_upper = 0.0, E_minus_lower = 0.0;
    [[nodiscard]] bool bounds_hold(double tol = 1e-10) const;
};

inline constexpr int kDefaultEnergyModes = 64;

/// E = T + Σ a_i²/(α − μ_i) over the first N modes, split at p = #{μ_i < α}.
/// Throws SolverError if the truncation bound exceeds 10⁻⁶|E|.
[[nodiscard]] EnergyReport energy_series(const Domain& d, double alpha, const SteklovBasis& basis,
                                         const TorsionSolution& ts, int N = kDefaultEnergyModes);

struct VariationalSplit {
    double E_plus_max = 0.0;                  // max over L_p of H(v)
    double E_minus_restricted = 0.0;          // min over span{φ_{p+1}..φ_N} of H(v)
    std::optional<double> E_minus_constrained; // Star2D: min over the full discrete space ⟂ L_p
    double E_minus_trial_bound = 0.0;         // barycentre trial function bound
};

/// H(v) = ∫|∇v|² − α∮v² + 2∮v∂νs extremised on the Steklov subspaces.
[[nodiscard]] VariationalSplit energy_split_variational(const Domain& d, double alpha, const SteklovBasis& basis,
                                                        const TorsionSolution& ts, int p);

/// 𝓔⁻ ≤ −Σ(∫y_i)²/(n|Ω| − α∮|y|²) with y = x − boundary barycentre; 0 when
/// the denominator is not positive.
[[nodiscard]] double barycenter_trial_bound(const Domain& d, double alpha);

/// 𝒥(Ω) = T(Ω) + |Ω|²/(α|∂Ω|), α > 0.
[[nodiscard]] double j_functional(const Domain& d, double alpha, double T);
[[nodiscard]] double j_functional(const Domain& d, double alpha);

/// 𝒥 and E of the ball with the same volume as d.
[[nodiscard]] double j_functional_equal_ball(const Domain& d, double alpha);
[[nodiscard]] double ball_energy(int dim, double radius, double alpha);

/// α₀ = (|B|²/ε₀)(1/|∂B| − 1/|∂Ω|), ε₀ = T(Ω) − T(B) for the equal-volume ball B.
[[nodiscard]] double alpha0(const Domain& d);
[[nodiscard]] double alpha0(const Domain& d, double T);

struct PoleScan {
    std::vector<EnergyReport> rows;
    std::vector<double> poles;        // μ_i with a_i ≠ 0
    std::vector<double> excluded;     // grid points dropped near poles
};

[[nodiscard]] PoleScan pole_scan(const Domain& d, std::span<const double> alpha_grid, const SteklovBasis& basis,
                                 const TorsionSolution& ts, int N = kDefaultEnergyModes);

}  // namespace robinlab
