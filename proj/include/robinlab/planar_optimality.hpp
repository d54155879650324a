#pragma once

#include <string>

#include "robinlab/geometry.hpp"
#include "robinlab/steklov.hpp"
#include "robinlab/torsion.hpp"

namespace robinlab {

/// Upper bound for T in the plane from area and perimeter (method of
/// parallel lines), with the parallel-annulus radii R̃ = L/2π, r̃² = R̃² − A/π.
struct PWBound {
    double A = 0.0, L = 0.0;
    double y2 = 0.0;
    double Rtilde = 0.0, rtilde = 0.0;
    double R = 0.0;               // equal-area radius
    double T_star = 0.0;
    double g_val = 0.0;
    double alpha_threshold = 0.0; // (2/R) g(y²)
};

[[nodiscard]] PWBound pw_upper_bound(double A, double L);

/// g(t) = (1−t)²/((1+√(1−t))(1 + t log t − t)), g(0) = 1/2, g(1⁻) = 2.
[[nodiscard]] double defect_g(double t);

/// (π/4)R̃⁴y²(1 + y² log y² − y²) ≥ T(Ω) − T(B_R).
[[nodiscard]] double epsilon0_upper(double A, double L);

enum class Verdict { GuaranteedByTheorem, NotCovered };
[[nodiscard]] std::string to_string(Verdict v);

struct JCheck {
    Verdict verdict = Verdict::NotCovered;
    double alpha = 0.0, y2 = 0.0, g_val = 0.0, threshold = 0.0;
    double J_domain = 0.0, J_ball = 0.0;
    bool numeric_holds = false;   // 𝒥(Ω) ≤ 𝒥(B_R)
};

[[nodiscard]] JCheck theorem_J_check(const Domain& d, double alpha, double T);
[[nodiscard]] JCheck theorem_J_check(const Domain& d, double alpha);

struct CorollaryCheck {
    double alpha = 0.0;
    double mu2 = 0.0, weinstock = 0.0, inv_R = 0.0;   // μ₂(Ω) ≤ 2π/L ≤ 1/R
    bool chain_holds = false;
    double E_domain = 0.0, E_ball = 0.0;
    bool numeric_holds = false;   // E(Ω) ≤ E(B_R)
};

/// Requires 0 < α < μ₂(Ω); basis and ts must be on d.
[[nodiscard]] CorollaryCheck corollary_disc_max(const Domain& d, double alpha, const SteklovBasis& basis,
                                                const TorsionSolution& ts);
[[nodiscard]] CorollaryCheck corollary_disc_max(const Domain& d, double alpha, const SteklovBasis& basis);

}  // namespace robinlab
