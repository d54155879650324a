#include "robinlab/planar_optimality.hpp"

#include <cmath>

#include "robinlab/robin_energy.hpp"

namespace robinlab {

std::string to_string(Verdict v)
{
    return v == Verdict::GuaranteedByTheorem ? "guaranteed" : "not_covered";
}

namespace {

void check_geometry(double A, double L)
{
    if (!(A > 0.0) || !(L > 0.0)) throw ValidationError("area and perimeter must be positive");
    // Allow roundoff at the disc.
    if (L * L < 4.0 * kPi * A * (1.0 - 1e-12)) throw ValidationError("L^2 < 4 pi A: no such planar domain");
}

double defect(double A, double L)
{
    const double y2 = 1.0 - 4.0 * kPi * A / (L * L);
    return y2 < 0.0 ? 0.0 : y2;
}

// 1 + t log t − t, written through δ = 1 − t near t = 1 where it cancels.
double parallel_factor(double t)
{
    const double delta = 1.0 - t;
    if (delta < 0.25) {
        double s = 0.0, p = delta;
        for (int m = 2; m < 200; ++m) {
            p *= delta;                       // δ^m
            const double term = p / (m * (m - 1.0));
            s += term;
            if (term < 1e-18 * s) break;
        }
        return s;
    }
    if (t == 0.0) return 1.0;
    return 1.0 + t * std::log(t) - t;
}

}  // namespace

double defect_g(double t)
{
    if (!(t >= 0.0) || !(t < 1.0)) throw ValidationError("defect_g: t must lie in [0, 1)");
    if (t == 0.0) return 0.5;
    const double delta = 1.0 - t;
    return delta * delta / ((1.0 + std::sqrt(delta)) * parallel_factor(t));
}

PWBound pw_upper_bound(double A, double L)
{
    check_geometry(A, L);
    PWBound b;
    b.A = A;
    b.L = L;
    b.y2 = defect(A, L);
    b.Rtilde = L / (2.0 * kPi);
    b.rtilde = b.Rtilde * std::sqrt(b.y2);
    b.R = std::sqrt(A / kPi);
    const double R4 = std::pow(b.Rtilde, 4);
    const double y2 = b.y2, y4 = y2 * y2;
    // r̃⁴ log(r̃/R̃) = R̃⁴ y⁴ log(y²)/2
    const double logterm = y2 > 0.0 ? 0.5 * y4 * std::log(y2) : 0.0;
    b.T_star = 0.5 * kPi * R4 * (logterm - 0.75 * y4 + y2 - 0.25);
    b.g_val = defect_g(y2);
    b.alpha_threshold = 2.0 / b.R * b.g_val;
    return b;
}

double epsilon0_upper(double A, double L)
{
    check_geometry(A, L);
    const double y2 = defect(A, L);
    if (y2 == 0.0) return 0.0;
    const double R4 = std::pow(L / (2.0 * kPi), 4);
    return 0.25 * kPi * R4 * y2 * (1.0 + y2 * std::log(y2) - y2);
}

JCheck theorem_J_check(const Domain& d, double alpha, double T)
{
    if (d.dim() != 2) throw ValidationError("theorem_J_check: planar domains only");
    if (!(alpha > 0.0)) throw ValidationError("theorem_J_check: alpha must be positive");
    const double A = volume(d), L = surface_area(d);
    const PWBound b = pw_upper_bound(A, L);
    JCheck c;
    c.alpha = alpha;
    c.y2 = b.y2;
    c.g_val = b.g_val;
    c.threshold = b.alpha_threshold;
    c.verdict = alpha <= b.alpha_threshold ? Verdict::GuaranteedByTheorem : Verdict::NotCovered;
    c.J_domain = j_functional(d, alpha, T);
    c.J_ball = j_functional_equal_ball(d, alpha);
    c.numeric_holds = c.J_domain <= c.J_ball + 1e-12 * std::abs(c.J_ball);
    return c;
}

JCheck theorem_J_check(const Domain& d, double alpha) { return theorem_J_check(d, alpha, rigidity(d).value); }

CorollaryCheck corollary_disc_max(const Domain& d, double alpha, const SteklovBasis& basis, const TorsionSolution& ts)
{
    if (d.dim() != 2) throw ValidationError("corollary_disc_max: planar domains only");
    if (basis.count() < 2) throw ValidationError("corollary_disc_max: basis needs at least two modes");
    const double mu2 = basis.mu(1);
    if (!(alpha > 0.0) || !(alpha < mu2)) throw ValidationError("corollary_disc_max: requires 0 < alpha < mu_2");
    CorollaryCheck c;
    c.alpha = alpha;
    c.mu2 = mu2;
    const double A = volume(d), L = surface_area(d);
    const double R = std::sqrt(A / kPi);
    c.weinstock = 2.0 * kPi / L;
    c.inv_R = 1.0 / R;
    const double tol = 1e-10;
    c.chain_holds = mu2 <= c.weinstock * (1.0 + tol) && c.weinstock <= c.inv_R * (1.0 + tol);
    const EnergyReport rep = energy_series(d, alpha, basis, ts);
    if (!rep.E_total) throw SolverError("corollary_disc_max: no solution at this alpha");
    c.E_domain = *rep.E_total;
    c.E_ball = ball_energy(2, R, alpha);
    c.numeric_holds = c.E_domain <= c.E_ball + 1e-12 * std::abs(c.E_ball);
    return c;
}

CorollaryCheck corollary_disc_max(const Domain& d, double alpha, const SteklovBasis& basis)
{
    const TorsionSolution ts = basis.has_layer() ? solve_torsion(d, basis.layer_ptr()) : solve_torsion(d);
    return corollary_disc_max(d, alpha, basis, ts);
}

}  // namespace robinlab
