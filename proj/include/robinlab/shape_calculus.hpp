#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "robinlab/geometry.hpp"
#include "robinlab/robin_energy.hpp"

namespace robinlab {

enum class SignClass { NegativeDefinite, PositiveOnSubspace, Saddle, Indeterminate };
[[nodiscard]] std::string to_string(SignClass c);

/// Coefficient d_i of the ball second variation for a degree-k mode.
[[nodiscard]] double d_coefficient(int dim, int k, double xi);

struct ModeRow {
    int index = 0;       // 1-based position in the ball basis
    int degree = 0;
    double b = 0.0;
    double d = 0.0;      // 0 for degrees 0 and 1
    double contribution = 0.0;   // b²d/(αn²)
};

struct SignReport {
    SignClass classification = SignClass::Indeterminate;
    std::vector<ModeRow> modes;
};

/// Quantitative bound of a sign theorem, evaluated when its hypothesis holds.
struct TheoremBound {
    bool applies = false;
    double value = 0.0;   // right-hand side
    bool holds = false;   // Ë(0) ≤ value
};

struct VariationReport {
    int dim = 2;
    double R = 1.0, alpha = 1.0, xi = 1.0;
    double E_dot = 0.0;
    double E_ddot = 0.0;          // d_i route
    double E_ddot_radial = 0.0;   // −2Q + (2R/n²)(1−ξ)∮(v·ν)² − (R²/(αn²))S̈
    double S_dot = 0.0, S_ddot = 0.0;
    double J_dot = 0.0, J_ddot = 0.0;
    double Q = 0.0;
    double vnu_norm2 = 0.0;       // ∮(v·ν)² dS
    SignReport sign;
    TheoremBound small_xi;        // 0 < ξ < 1
    TheoremBound mid_xi;          // 1 < ξ < 2
    VolumeCheck volume1, volume2;
    std::vector<std::string> warnings;
};

/// Removes the translation modes b_2..b_{n+1}; returns true if any was nonzero.
bool normalize_barycenter(PerturbationField& p, int dim);

[[nodiscard]] double surface_second_variation(int dim, double radius, const PerturbationField& p);

[[nodiscard]] SignReport classify_sign(int dim, double radius, double alpha, const PerturbationField& p);

struct ShapeDerivativeSolution {
    std::vector<double> c;        // u′ = Σ c_i φ_i
    std::vector<double> sprime;   // s′ = Σ σ_i φ_i, σ_i = b_i R/n
    double Q = 0.0;               // Q(u′) = Σ c_i²(μ_i − α)
    double I = 0.0;               // 𝓘(s′)
};

[[nodiscard]] ShapeDerivativeSolution solve_u_prime(int dim, double radius, double alpha, const PerturbationField& p);

/// Ė(0) and Ë(0) around B_R ⊂ R^n. Translation modes are removed (with a
/// warning); b₁ ≠ 0 and integer ξ ≥ 2 are errors.
[[nodiscard]] VariationReport second_variation_ball(int dim, double radius, double alpha, PerturbationField p);

/// Ė(0) = ((n+1)R/(αn²) − R²/n²) ∮(v·ν) dS on the ball.
[[nodiscard]] double first_variation_ball(int dim, double radius, double alpha, const PerturbationField& p);

/// Boundary quadrature of (v·ν)[|∇u|² − 2u − 2α²u² − α(n−1)u²H] for a 2-D
/// solution; vdotnu holds nodal values on the solution's boundary grid.
[[nodiscard]] double first_variation_general(const RobinSolution& sol, std::span<const double> vdotnu);

/// Boundary grid on which first_variation_general expects nodal data.
[[nodiscard]] BoundaryGrid solution_grid(const RobinSolution& sol);

struct JVariations {
    double J_dot = 0.0, J_ddot = 0.0, I = 0.0;
    double S_ddot_sprime = 0.0;   // ∮(|∇*s′|² − (n−1)s′²/R²)
    double lower = 0.0;           // −S̈/α
    double upper = 0.0;           // (2R/n − 1/α)S̈
    bool bounds_hold = false;
    bool maximizer_criterion = false;   // α < n/(2R)
};

[[nodiscard]] JVariations j_variations(int dim, double radius, double alpha, PerturbationField p);

/// max − min over ∂Ω of (|Ω|²/(α|∂Ω|²))(n−1)H + |∇s|²; zero on balls.
[[nodiscard]] double overdetermined_oscillation(const Domain& d, double alpha, const TorsionSolution& ts);

enum class EnergyMethod { Series, Layer };

struct FiniteDifferenceFit {
    double E_dot = 0.0, E_ddot = 0.0;
    double residual = 0.0;        // RMS of the fit residuals
    std::vector<double> t, energy;
};

using DomainFamily = std::function<Domain(double)>;

/// Least-squares polynomial fit of E(Ω_t) over t_grid (degree 2 by default).
[[nodiscard]] FiniteDifferenceFit finite_difference_check(const DomainFamily& family, double alpha,
                                                          std::span<const double> t_grid,
                                                          EnergyMethod method = EnergyMethod::Series,
                                                          int fit_degree = 2);

/// Energy of a Star2D domain by the chosen method.
[[nodiscard]] double star_energy(const Domain& d, double alpha, EnergyMethod method);

}  // namespace robinlab
