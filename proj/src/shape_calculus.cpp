#include "robinlab/shape_calculus.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

#include <Eigen/QR>

#include "robinlab/kernels.hpp"

namespace robinlab {

std::string to_string(SignClass c)
{
    switch (c) {
    case SignClass::NegativeDefinite: return "negative_definite";
    case SignClass::PositiveOnSubspace: return "positive_on_subspace";
    case SignClass::Saddle: return "saddle";
    case SignClass::Indeterminate: return "indeterminate";
    }
    return "unknown";
}

namespace {

constexpr double kSignThreshold = 1e-12;

void check_ball_args(int dim, double radius, double alpha)
{
    if (dim < 2) throw ValidationError("dimension must be at least 2");
    if (!(radius > 0.0)) throw ValidationError("radius must be positive");
    if (alpha == 0.0 || !std::isfinite(alpha)) throw ValidationError("alpha must be finite and nonzero");
}

// Integer ξ ≥ 2 is a pole of d_i.
void check_xi(double xi)
{
    const double r = std::round(xi);
    if (r >= 2.0 && std::abs(xi - r) < resonance_tolerance(xi))
        throw ValidationError("alpha*R is an integer >= 2: the second variation has a pole there");
}

double sum_sq(const std::vector<double>& b)
{
    double s = 0.0;
    for (double v : b) s += v * v;
    return s;
}

// Λ − (n−1)/R² for a degree-k mode on ∂B_R.
double surface_weight(int dim, double radius, int k)
{
    return (k * (k + dim - 2.0) - (dim - 1.0)) / (radius * radius);
}

}  // namespace

double d_coefficient(int dim, int k, double xi)
{
    return 2.0 * xi * (1.0 - xi) * (k - 1.0) / (k - xi) - k * (k + dim - 2.0) + dim - 1.0;
}

bool normalize_barycenter(PerturbationField& p, int dim)
{
    bool changed = false;
    for (int i = 1; i <= dim && i < static_cast<int>(p.b.size()); ++i) {
        if (p.b[i] != 0.0) changed = true;
        p.b[i] = 0.0;
    }
    return changed;
}

double surface_second_variation(int dim, double radius, const PerturbationField& p)
{
    if (!p.b.empty() && std::abs(p.b[0]) > 1e-12 * std::max(1.0, std::sqrt(sum_sq(p.b))))
        throw ValidationError("surface_second_variation: b_1 must vanish");
    double s = 0.0;
    for (std::size_t i = 1; i < p.b.size(); ++i)
        s += p.b[i] * p.b[i] * surface_weight(dim, radius, ball_mode_degree(dim, static_cast<int>(i)));
    return s;
}

SignReport classify_sign(int dim, double radius, double alpha, const PerturbationField& p)
{
    check_ball_args(dim, radius, alpha);
    const double xi = alpha * radius;
    check_xi(xi);
    SignReport rep;
    bool pos = false, neg = false;
    for (std::size_t i = 0; i < p.b.size(); ++i) {
        ModeRow row;
        row.index = static_cast<int>(i) + 1;
        row.degree = ball_mode_degree(dim, static_cast<int>(i));
        row.b = p.b[i];
        if (row.degree >= 2) {
            row.d = d_coefficient(dim, row.degree, xi);
            row.contribution = row.b * row.b * row.d / (alpha * dim * dim);
            if (row.b != 0.0) {
                pos = pos || row.d > kSignThreshold;
                neg = neg || row.d < -kSignThreshold;
            }
        }
        rep.modes.push_back(row);
    }
    if (pos && neg) rep.classification = SignClass::Saddle;
    else if (neg) rep.classification = SignClass::NegativeDefinite;
    else if (pos) rep.classification = SignClass::PositiveOnSubspace;
    else rep.classification = SignClass::Indeterminate;
    return rep;
}

ShapeDerivativeSolution solve_u_prime(int dim, double radius, double alpha, const PerturbationField& p)
{
    check_ball_args(dim, radius, alpha);
    const double xi = alpha * radius;
    const bool unforced = std::abs(1.0 - xi) < resonance_tolerance(xi);
    ShapeDerivativeSolution s;
    s.c.assign(p.b.size(), 0.0);
    s.sprime.assign(p.b.size(), 0.0);
    double I_grad = 0.0, I_bnd = 0.0, I_surf = 0.0;
    for (std::size_t i = 0; i < p.b.size(); ++i) {
        const int k = ball_mode_degree(dim, static_cast<int>(i));
        const double mu = k / radius;
        const double b = p.b[i];
        if (b != 0.0 && !unforced) {
            if (std::abs(mu - alpha) < resonance_tolerance(alpha))
                throw ValidationError("solve_u_prime: alpha resonates with an active mode");
            s.c[i] = b * (1.0 - xi) / (dim * (mu - alpha));
        } else if (b != 0.0 && unforced && k == 1) {
            throw ValidationError("solve_u_prime: translation modes must vanish at alpha*R = 1");
        }
        s.Q += s.c[i] * s.c[i] * (mu - alpha);
        const double sig = b * radius / dim;
        s.sprime[i] = sig;
        I_grad += sig * sig * mu;
        I_bnd += sig * sig;
        I_surf += sig * sig * surface_weight(dim, radius, k);
    }
    s.I = 2.0 * I_grad - 2.0 / radius * I_bnd - I_surf / alpha;
    return s;
}

double first_variation_ball(int dim, double radius, double alpha, const PerturbationField& p)
{
    check_ball_args(dim, radius, alpha);
    const double n = dim, R = radius;
    const double mean = p.b.empty() ? 0.0 : p.b[0] * std::sqrt(sphere_area(dim, R));   // ∮ v·ν
    return ((n + 1.0) * R / (alpha * n * n) - R * R / (n * n)) * mean;
}

JVariations j_variations(int dim, double radius, double alpha, PerturbationField p)
{
    check_ball_args(dim, radius, alpha);
    if (!(alpha > 0.0)) throw ValidationError("j_variations: alpha must be positive");
    normalize_barycenter(p, dim);
    const double n = dim, R = radius;
    JVariations j;
    const double mean = p.b.empty() ? 0.0 : p.b[0] * std::sqrt(sphere_area(dim, R));
    const double V = ball_volume(dim, R), S = sphere_area(dim, R);
    const double T_dot = -(R / n) * (R / n) * mean;
    const double S_dot = (n - 1.0) / R * mean;
    j.J_dot = T_dot - V * V / (alpha * S * S) * S_dot;

    double ss = 0.0;
    for (std::size_t i = 0; i < p.b.size(); ++i) {
        const double sig = p.b[i] * R / n;
        ss += sig * sig * surface_weight(dim, R, ball_mode_degree(dim, static_cast<int>(i)));
    }
    j.S_ddot_sprime = ss;
    // 𝓘 only uses the boundary data of s′, which is (v·ν)R/n.
    double I_grad = 0.0, I_bnd = 0.0;
    for (std::size_t i = 0; i < p.b.size(); ++i) {
        const double sig = p.b[i] * R / n;
        I_grad += sig * sig * ball_mode_degree(dim, static_cast<int>(i)) / R;
        I_bnd += sig * sig;
    }
    j.I = 2.0 * I_grad - 2.0 / R * I_bnd - ss / alpha;
    j.J_ddot = j.I;
    j.lower = -ss / alpha;
    j.upper = (2.0 * R / n - 1.0 / alpha) * ss;
    const double tol = 1e-12 * std::max(1.0, std::abs(j.I) + std::abs(ss));
    j.bounds_hold = j.I >= j.lower - tol && j.I <= j.upper + tol;
    j.maximizer_criterion = alpha < n / (2.0 * R);
    return j;
}

VariationReport second_variation_ball(int dim, double radius, double alpha, PerturbationField p)
{
    check_ball_args(dim, radius, alpha);
    const double n = dim, R = radius, xi = alpha * radius;
    check_xi(xi);
    VariationReport rep;
    rep.dim = dim;
    rep.R = R;
    rep.alpha = alpha;
    rep.xi = xi;
    if (!p.b.empty() && std::abs(p.b[0]) > 1e-12 * std::max(1.0, std::sqrt(sum_sq(p.b))))
        throw ValidationError("second_variation_ball: b_1 must vanish (first-order volume preservation)");

    const Domain ball = Domain::ball(dim, R);
    rep.volume1 = check_volume_preserving(p, ball, 1);
    rep.volume2 = check_volume_preserving(p, ball, 2);
    if (!rep.volume2.passed) rep.warnings.push_back("perturbation is not second-order volume preserving");
    if (normalize_barycenter(p, dim)) rep.warnings.push_back("translation modes b_2..b_{n+1} set to zero");

    rep.E_dot = first_variation_ball(dim, R, alpha, p);
    rep.S_dot = (n - 1.0) / R * (p.b.empty() ? 0.0 : p.b[0] * std::sqrt(sphere_area(dim, R)));
    rep.S_ddot = surface_second_variation(dim, R, p);
    rep.vnu_norm2 = sum_sq(p.b);

    rep.sign = classify_sign(dim, R, alpha, p);
    double e = 0.0;
    for (const ModeRow& m : rep.sign.modes) e += m.contribution;
    rep.E_ddot = e;

    const ShapeDerivativeSolution up = solve_u_prime(dim, R, alpha, p);
    rep.Q = up.Q;
    rep.E_ddot_radial = -2.0 * up.Q + 2.0 * R / (n * n) * (1.0 - xi) * rep.vnu_norm2 - R * R / (alpha * n * n) * rep.S_ddot;

    const JVariations jv = j_variations(dim, R, alpha, p);
    rep.J_dot = jv.J_dot;
    rep.J_ddot = jv.J_ddot;

    const double tol = 1e-12 * std::max(1.0, std::abs(rep.E_ddot));
    if (xi > 0.0 && xi < 1.0) {
        rep.small_xi.applies = true;
        rep.small_xi.value = -(n - 0.5) / (alpha * n * n) * rep.vnu_norm2;
        rep.small_xi.holds = rep.E_ddot <= rep.small_xi.value + tol;
    }
    if (xi > 1.0 && xi < 2.0) {
        rep.mid_xi.applies = true;
        rep.mid_xi.value = (2.0 * xi * (1.0 - xi) / (2.0 - xi) - n - 1.0) / (alpha * n * n) * rep.vnu_norm2;
        rep.mid_xi.holds = rep.E_ddot <= rep.mid_xi.value + tol;
    }
    return rep;
}

// ---------------------------------------------------------------------------

BoundaryGrid solution_grid(const RobinSolution& sol)
{
    if (sol.method == RobinSolution::Method::Layer) return sol.layer->grid();
    if (sol.method == RobinSolution::Method::Series && sol.basis->source() == BasisSource::Numeric)
        return sol.basis->grid();
    if (sol.domain->dim() == 2 && sol.domain->kind() == DomainKind::Ball) return boundary_grid(*sol.domain);
    throw ValidationError("solution_grid: requires a planar domain with a single boundary curve");
}

double first_variation_general(const RobinSolution& sol, std::span<const double> vdotnu)
{
    if (sol.status == ExpansionStatus::NoSolution) throw ValidationError("first_variation_general: no solution");
    const BoundaryGrid g = solution_grid(sol);
    const int M = g.size();
    if (static_cast<int>(vdotnu.size()) != M) throw ValidationError("first_variation_general: data size mismatch");
    std::vector<double> u(M);
    if (sol.method == RobinSolution::Method::Layer) {
        u = sol.boundary_u;
    } else if (sol.method == RobinSolution::Method::Series && sol.basis->source() == BasisSource::Numeric) {
        const Eigen::Map<const Eigen::VectorXd> hv(sol.h.coefficients.data(), sol.basis->count());
        const Eigen::VectorXd ub = sol.basis->traces() * hv;
        for (int j = 0; j < M; ++j) u[j] = ub[j];
    } else {
        std::fill(u.begin(), u.end(), sol.evaluate_radial(sol.domain->radius()));
    }
    const std::vector<double> ut = kernels::spectral_derivative(u);
    const double a = sol.alpha;
    std::vector<double> f(M);
    for (int j = 0; j < M; ++j) {
        const double tang = ut[j] / g.speed[j];
        const double grad2 = a * a * u[j] * u[j] + tang * tang;
        f[j] = vdotnu[j] * (grad2 - 2.0 * u[j] - 2.0 * a * a * u[j] * u[j] - a * u[j] * u[j] * g.curvature[j]);
    }
    return g.integrate(f);
}

double overdetermined_oscillation(const Domain& d, double alpha, const TorsionSolution& ts)
{
    if (!(alpha > 0.0)) throw ValidationError("overdetermined_oscillation: alpha must be positive");
    const double V = volume(d), S = surface_area(d);
    const double c = V * V / (alpha * S * S);
    const int n = d.dim();
    if (d.kind() == DomainKind::Ball) return 0.0;
    if (d.kind() == DomainKind::Annulus) {
        const double R = d.radius(), ri = d.kappa() * R;
        const double outer = c * (n - 1.0) / R + ts.flux_outer * ts.flux_outer;
        const double inner = -c * (n - 1.0) / ri + ts.flux_inner * ts.flux_inner;
        return std::abs(outer - inner);
    }
    const BoundaryGrid& g = *ts.grid;
    double lo = 1e300, hi = -1e300;
    for (int j = 0; j < g.size(); ++j) {
        const double v = c * g.curvature[j] + ts.flux[j] * ts.flux[j];
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return hi - lo;
}

// ---------------------------------------------------------------------------

double star_energy(const Domain& d, double alpha, EnergyMethod method)
{
    if (method == EnergyMethod::Layer) return energy_direct(solve_robin_direct(d, alpha));
    const SteklovBasis basis = steklov_basis(d, kDefaultEnergyModes);
    const TorsionSolution ts = solve_torsion(d, basis.layer_ptr());
    const EnergyReport rep = energy_series(d, alpha, basis, ts);
    if (!rep.E_total) throw SolverError("star_energy: no solution at this alpha");
    return *rep.E_total;
}

FiniteDifferenceFit finite_difference_check(const DomainFamily& family, double alpha, std::span<const double> t_grid,
                                            EnergyMethod method, int fit_degree)
{
    if (fit_degree < 2) throw ValidationError("finite_difference_check: fit degree must be at least 2");
    const int K = static_cast<int>(t_grid.size());
    if (K <= fit_degree) throw ValidationError("finite_difference_check: need more t values than the fit degree");
    FiniteDifferenceFit fit;
    fit.t.assign(t_grid.begin(), t_grid.end());
    fit.energy.assign(K, 0.0);
    std::vector<std::exception_ptr> errors(K);
    kernels::for_each_index(K, kernels::Exec::Parallel, [&](int i) {
        try {
            fit.energy[i] = star_energy(family(fit.t[i]), alpha, method);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    });
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    Eigen::MatrixXd V(K, fit_degree + 1);
    Eigen::VectorXd y(K);
    for (int i = 0; i < K; ++i) {
        double p = 1.0;
        for (int k = 0; k <= fit_degree; ++k) {
            V(i, k) = p;
            p *= fit.t[i];
        }
        y[i] = fit.energy[i];
    }
    const Eigen::VectorXd c = V.colPivHouseholderQr().solve(y);
    fit.E_dot = c[1];
    fit.E_ddot = 2.0 * c[2];
    fit.residual = std::sqrt((V * c - y).squaredNorm() / K);
    return fit;
}

}  // namespace robinlab
