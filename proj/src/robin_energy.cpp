#include "robinlab/robin_energy.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>

#include "robinlab/kernels.hpp"

namespace robinlab {

namespace {

double radial_g(int dim, double r) { return dim == 2 ? std::log(r) : std::pow(r, 2 - dim); }
double radial_dg(int dim, double r) { return dim == 2 ? 1.0 / r : (2.0 - dim) * std::pow(r, 1 - dim); }
double radial_g_moment(int dim, double r)
{
    return dim == 2 ? 0.5 * r * r * std::log(r) - 0.25 * r * r : 0.5 * r * r;
}

// ∫_Ω (c1 + c2 g) dx over the shell ri < r < R for a degree-0 profile.
double radial_profile_integral(int n, double ri, double R, double c1, double c2)
{
    double v = c1 * (std::pow(R, n) - std::pow(ri, n)) / n;
    if (c2 != 0.0) v += c2 * (radial_g_moment(n, R) - radial_g_moment(n, ri));
    return unit_sphere_area(n) * v;
}

// ∫ h dx for harmonic h from boundary data on a closed planar curve.
double harmonic_integral(const BoundaryGrid& g, std::span<const double> h, std::span<const double> dh)
{
    const int M = g.size();
    std::vector<double> f(M);
    for (int j = 0; j < M; ++j) {
        const double xn = g.x[j] * g.nx[j] + g.y[j] * g.ny[j];
        const double r2 = g.x[j] * g.x[j] + g.y[j] * g.y[j];
        f[j] = 0.5 * h[j] * xn - 0.25 * r2 * dh[j];
    }
    return g.integrate(f);
}

double quartic_moment(const BoundaryGrid& g)
{
    std::vector<double> f(g.size());
    for (int j = 0; j < g.size(); ++j) {
        const double r2 = g.x[j] * g.x[j] + g.y[j] * g.y[j];
        f[j] = r2 * r2 / 16.0 / g.speed[j];
    }
    return g.integrate(f);   // ∫ |x|²/4 dx
}

bool same_domain(const Domain& a, const Domain& b)
{
    return a.kind() == b.kind() && a.dim() == b.dim() && std::abs(a.radius() - b.radius()) <= 1e-14 * a.radius();
}

}  // namespace

// ---------------------------------------------------------------------------

RobinSolution solve_robin(const Domain& d, double alpha, const SteklovBasis& basis, const TorsionSolution& ts)
{
    if (alpha == 0.0) throw ValidationError("solve_robin: alpha must be nonzero");
    if (!same_domain(d, basis.domain()) || !same_domain(d, *ts.domain))
        throw ValidationError("solve_robin: basis, torsion solution and domain disagree");
    RobinSolution sol;
    sol.alpha = alpha;
    sol.method = RobinSolution::Method::Series;
    sol.domain = std::make_shared<const Domain>(basis.domain());
    const std::vector<double> a = flux_coefficients(ts, basis);
    std::vector<double> g(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) g[i] = -a[i];
    sol.h = expand_harmonic(basis, alpha, g);
    sol.status = sol.h.status;
    sol.basis = std::make_shared<const SteklovBasis>(basis);
    sol.torsion = std::make_shared<const TorsionSolution>(ts);

    if (basis.source() == BasisSource::Numeric) {
        const int M = basis.grid().size();
        const Eigen::Map<const Eigen::VectorXd> hv(sol.h.coefficients.data(), basis.count());
        Eigen::VectorXd mu(basis.count());
        for (int i = 0; i < basis.count(); ++i) mu[i] = basis.mu(i);
        const Eigen::VectorXd ub = basis.traces() * hv;
        const Eigen::VectorXd dub = basis.traces() * mu.cwiseProduct(hv);
        double res = 0.0;
        for (int j = 0; j < M; ++j) res = std::max(res, std::abs(ts.flux[j] + dub[j] - alpha * ub[j]));
        sol.boundary_residual = res;
    } else {
        // Only degree-0 modes carry data; check both spheres.
        const int n = d.dim();
        const double y0 = 1.0 / std::sqrt(unit_sphere_area(n));
        double uo = 0.0, duo = 0.0, ui = 0.0, dui = 0.0;
        for (int i = 0; i < basis.count(); ++i) {
            const SteklovMode& m = basis.modes()[i];
            if (m.degree != 0) continue;
            uo += sol.h.coefficients[i] * m.outer_amp * y0;
            duo += sol.h.coefficients[i] * m.mu * m.outer_amp * y0;
            ui += sol.h.coefficients[i] * m.inner_amp * y0;
            dui += sol.h.coefficients[i] * m.mu * m.inner_amp * y0;
        }
        double res = std::abs(ts.flux_outer + duo - alpha * uo);
        if (d.kind() == DomainKind::Annulus) res = std::max(res, std::abs(ts.flux_inner + dui - alpha * ui));
        sol.boundary_residual = res;
    }
    return sol;
}

RobinSolution solve_robin_direct(const Domain& d, double alpha)
{
    if (alpha == 0.0) throw ValidationError("solve_robin_direct: alpha must be nonzero");
    RobinSolution sol;
    sol.alpha = alpha;
    sol.domain = std::make_shared<const Domain>(d);
    const int n = d.dim();
    const double R = d.radius();

    if (d.kind() == DomainKind::Ball) {
        sol.method = RobinSolution::Method::Radial;
        if (std::abs(alpha) < resonance_tolerance(alpha)) {
            sol.status = ExpansionStatus::NoSolution;
            return sol;
        }
        // ∂r u(R) = α u(R) with u = −r²/(2n) + A.
        sol.A = R * R / (2.0 * n) - R / (alpha * n);
        return sol;
    }
    if (d.kind() == DomainKind::Annulus) {
        sol.method = RobinSolution::Method::Radial;
        const double ri = d.kappa() * R;
        const double mur = annulus_radial_eigenvalue(n, R, d.kappa());
        if (std::abs(alpha) < resonance_tolerance(alpha) || std::abs(alpha - mur) < resonance_tolerance(alpha)) {
            sol.status = ExpansionStatus::NoSolution;
            return sol;
        }
        // Outer: u' − αu = 0 at R; inner: −u' − αu = 0 at κR.
        Eigen::Matrix2d M;
        M << -alpha, radial_dg(n, R) - alpha * radial_g(n, R), -alpha, -radial_dg(n, ri) - alpha * radial_g(n, ri);
        Eigen::Vector2d rhs(R / n - alpha * R * R / (2.0 * n), -ri / n - alpha * ri * ri / (2.0 * n));
        const Eigen::Vector2d c = M.partialPivLu().solve(rhs);
        sol.A = c[0];
        sol.B = c[1];
        const double uo = sol.evaluate_radial(R), ui = sol.evaluate_radial(ri);
        const double duo = -R / n + sol.B * radial_dg(n, R), dui = -ri / n + sol.B * radial_dg(n, ri);
        sol.boundary_residual = std::max(std::abs(duo - alpha * uo), std::abs(-dui - alpha * ui));
        return sol;
    }

    sol.method = RobinSolution::Method::Layer;
    auto layer = std::make_shared<const LayerPotential2D>(d);
    const BoundaryGrid& g = layer->grid();
    const int M = g.size();
    // u = u_p + w, u_p = −|x|²/4: ∂νw − αw = x·ν/2 − α|x|²/4.
    std::vector<double> rhs(M), up(M), dup(M);
    for (int j = 0; j < M; ++j) {
        const double xn = g.x[j] * g.nx[j] + g.y[j] * g.ny[j];
        up[j] = -0.25 * (g.x[j] * g.x[j] + g.y[j] * g.y[j]);
        dup[j] = -0.5 * xn;
        rhs[j] = -dup[j] + alpha * up[j];
    }
    sol.density = layer->solve_robin(alpha, rhs);
    const Eigen::VectorXd w = layer->trace(sol.density);
    const Eigen::VectorXd dw = layer->normal_derivative(sol.density);
    sol.boundary_u.resize(M);
    double res = 0.0;
    for (int j = 0; j < M; ++j) {
        sol.boundary_u[j] = up[j] + w[j];
        res = std::max(res, std::abs(dup[j] + dw[j] - alpha * sol.boundary_u[j]));
    }
    sol.boundary_residual = res;
    sol.layer = std::move(layer);
    return sol;
}

double RobinSolution::evaluate_radial(double r) const
{
    const int n = domain->dim();
    if (method == Method::Radial) {
        double u = -r * r / (2.0 * n) + A;
        if (B != 0.0) u += B * radial_g(n, r);
        return u;
    }
    if (method == Method::Series && basis->source() == BasisSource::Analytic) {
        double u = torsion->evaluate_radial(r);
        const double y0 = 1.0 / std::sqrt(unit_sphere_area(n));
        for (int i = 0; i < basis->count(); ++i) {
            const SteklovMode& m = basis->modes()[i];
            if (m.degree != 0 || h.coefficients[i] == 0.0) continue;
            const double profile = domain->kind() == DomainKind::Ball ? m.outer_amp : m.c1 + m.c2 * radial_g(n, r);
            u += h.coefficients[i] * profile * y0;
        }
        return u;
    }
    throw ValidationError("RobinSolution::evaluate_radial: not a radial solution");
}

double RobinSolution::evaluate(double x, double y) const
{
    if (status == ExpansionStatus::NoSolution) throw ValidationError("RobinSolution::evaluate: no solution");
    if (domain->dim() != 2) throw ValidationError("RobinSolution::evaluate: 2-D only");
    if (method == Method::Radial) return evaluate_radial(std::hypot(x, y));
    if (method == Method::Layer) {
        const double px[1] = {x}, py[1] = {y};
        return -0.25 * (x * x + y * y) + layer->evaluate(density, px, py)[0];
    }
    double u = torsion->evaluate(x, y);
    for (int i = 0; i < basis->count(); ++i)
        if (h.coefficients[i] != 0.0) u += h.coefficients[i] * basis->evaluate(i, x, y);
    return u;
}

double energy_direct(const RobinSolution& sol)
{
    if (sol.status == ExpansionStatus::NoSolution) throw ValidationError("energy_direct: no solution exists");
    const Domain& d = *sol.domain;
    const int n = d.dim();
    switch (sol.method) {
    case RobinSolution::Method::Radial: {
        const double R = d.radius();
        const double ri = d.kind() == DomainKind::Annulus ? d.kappa() * R : 0.0;
        auto moment = [&](double r) {
            double m = -std::pow(r, n + 2) / (2.0 * n * (n + 2)) + sol.A * std::pow(r, n) / n;
            if (sol.B != 0.0) m += sol.B * radial_g_moment(n, r);
            return m;
        };
        const double lower = ri > 0.0 ? moment(ri) : 0.0;
        return -unit_sphere_area(n) * (moment(R) - lower);
    }
    case RobinSolution::Method::Layer: {
        const BoundaryGrid& g = sol.layer->grid();
        const Eigen::VectorXd w = sol.layer->trace(sol.density);
        const Eigen::VectorXd dw = sol.layer->normal_derivative(sol.density);
        return quartic_moment(g) - harmonic_integral(g, {w.data(), static_cast<std::size_t>(w.size())},
                                                     {dw.data(), static_cast<std::size_t>(dw.size())});
    }
    case RobinSolution::Method::Series: break;
    }
    const SteklovBasis& b = *sol.basis;
    double hint = 0.0;
    if (b.source() == BasisSource::Analytic) {
        const double R = d.radius();
        const double ri = d.kind() == DomainKind::Annulus ? d.kappa() * R : 0.0;
        const double y0 = 1.0 / std::sqrt(unit_sphere_area(n));
        for (int i = 0; i < b.count(); ++i) {
            const SteklovMode& m = b.modes()[i];
            if (m.degree != 0 || sol.h.coefficients[i] == 0.0) continue;
            const double c1 = d.kind() == DomainKind::Ball ? m.outer_amp : m.c1;
            const double c2 = d.kind() == DomainKind::Ball ? 0.0 : m.c2;
            hint += sol.h.coefficients[i] * y0 * radial_profile_integral(n, ri, R, c1, c2);
        }
    } else {
        const Eigen::Map<const Eigen::VectorXd> hv(sol.h.coefficients.data(), b.count());
        Eigen::VectorXd mu(b.count());
        for (int i = 0; i < b.count(); ++i) mu[i] = b.mu(i);
        const Eigen::VectorXd hb = b.traces() * hv;
        const Eigen::VectorXd dhb = b.traces() * mu.cwiseProduct(hv);
        hint = harmonic_integral(b.grid(), {hb.data(), static_cast<std::size_t>(hb.size())},
                                 {dhb.data(), static_cast<std::size_t>(dhb.size())});
    }
    return sol.torsion->T - hint;
}

// ---------------------------------------------------------------------------

bool EnergyReport::bounds_hold(double tol) const
{
    if (!E_total) return true;
    const double t = tol * std::max(1.0, std::abs(*E_total));
    const bool plus_ok = *E_plus >= E_plus_lower - t && *E_plus <= E_plus_upper + t && *E_plus >= -t;
    const bool minus_ok = *E_minus <= t && *E_minus >= E_minus_lower - t;
    return plus_ok && minus_ok;
}

EnergyReport energy_series(const Domain& d, double alpha, const SteklovBasis& basis, const TorsionSolution& ts, int N)
{
    if (N < 1) throw ValidationError("energy_series: N must be positive");
    if (!same_domain(d, basis.domain()) || !same_domain(d, *ts.domain))
        throw ValidationError("energy_series: basis, torsion solution and domain disagree");
    EnergyReport rep;
    rep.alpha = alpha;
    rep.T = ts.T;
    const int Nu = std::min(N, basis.count());
    rep.N_modes = Nu;
    const std::vector<double> a_all = flux_coefficients(ts, basis);
    const std::vector<double> a(a_all.begin(), a_all.begin() + Nu);

    double pole = std::numeric_limits<double>::infinity();
    int p = 0;
    for (int i = 0; i < Nu; ++i) {
        pole = std::min(pole, std::abs(alpha - basis.mu(i)));
        if (basis.mu(i) < alpha) ++p;
    }
    rep.pole_distance = pole;
    rep.p = p;

    // Resonance classification on −∂νs.
    const double tol_res = resonance_tolerance(alpha);
    std::vector<double> g(Nu);
    for (int i = 0; i < Nu; ++i) g[i] = -a[i];
    const double tol_compat = compatibility_tolerance(g);
    bool resonant = false, compatible = true;
    double Ep = 0.0, Em = 0.0, sum_a2 = 0.0, plus2 = 0.0;
    for (int i = 0; i < Nu; ++i) {
        const double a2 = a[i] * a[i];
        sum_a2 += a2;
        if (i < p) plus2 += a2;
        const double gap = alpha - basis.mu(i);
        if (std::abs(gap) < tol_res) {
            resonant = true;
            if (std::abs(a[i]) > tol_compat) compatible = false;
            continue;
        }
        if (i < p) Ep += a2 / gap;
        else Em += a2 / gap;
    }
    rep.status = !resonant ? ExpansionStatus::Unique : (compatible ? ExpansionStatus::Family : ExpansionStatus::NoSolution);

    double gap2 = ts.flux_norm2 - sum_a2;
    if (gap2 < 64.0 * std::numeric_limits<double>::epsilon() * ts.flux_norm2) gap2 = 0.0;
    const double mu_next = Nu < basis.count() ? basis.mu(Nu) : basis.mu_next();
    if (gap2 == 0.0) rep.tail_bound = 0.0;
    else if (alpha < mu_next) rep.tail_bound = gap2 / (mu_next - alpha);
    else rep.tail_bound = std::numeric_limits<double>::infinity();

    rep.plus_norm2 = plus2;
    rep.minus_norm2 = std::max(0.0, ts.flux_norm2 - plus2);
    rep.E_plus_lower = alpha > 0.0 ? plus2 / alpha : 0.0;
    // Resonant modes carry a_i = 0 when a solution exists; skip them.
    int below = p, above = p;
    while (below > 0 && alpha - basis.mu(below - 1) < tol_res) --below;
    while (above < basis.count() && basis.mu(above) - alpha < tol_res) ++above;
    rep.E_plus_upper = below > 0 ? plus2 / (alpha - basis.mu(below - 1)) : 0.0;
    rep.E_minus_lower = above < basis.count() ? rep.minus_norm2 / (alpha - basis.mu(above))
                                              : -std::numeric_limits<double>::infinity();

    if (rep.status == ExpansionStatus::NoSolution) return rep;
    rep.E_plus = Ep;
    rep.E_minus = Em;
    rep.E_total = ts.T + Ep + Em;
    if (rep.tail_bound > 1e-6 * std::abs(*rep.E_total))
        throw SolverError("energy_series: truncation bound exceeds 1e-6 relative (increase N or the node count)");
    return rep;
}

// ---------------------------------------------------------------------------

double barycenter_trial_bound(const Domain& d, double alpha)
{
    if (d.dim() != 2) return 0.0;   // radial domains: ∫y_i dx = 0
    const PlanarMoments m = planar_moments(d);
    const double cx = m.bnd_x / m.perimeter, cy = m.bnd_y / m.perimeter;
    const double ix = m.vol_x - cx * m.area, iy = m.vol_y - cy * m.area;
    const double num = ix * ix + iy * iy;
    const double den = 2.0 * m.area - alpha * (m.bnd_r2 - (cx * cx + cy * cy) * m.perimeter);
    if (den <= 0.0) return 0.0;
    return -num / den;
}

VariationalSplit energy_split_variational(const Domain& d, double alpha, const SteklovBasis& basis,
                                          const TorsionSolution& ts, int p)
{
    int expected = 0;
    for (int i = 0; i < basis.count(); ++i) {
        if (std::abs(basis.mu(i) - alpha) < resonance_tolerance(alpha))
            throw ValidationError("energy_split_variational: alpha is a Steklov eigenvalue");
        if (basis.mu(i) < alpha) ++expected;
    }
    if (p != expected) throw ValidationError("energy_split_variational: p is inconsistent with alpha");
    const std::vector<double> a = flux_coefficients(ts, basis);
    const int N = basis.count();
    std::vector<double> v(N);
    for (int i = 0; i < N; ++i) v[i] = -a[i] / (basis.mu(i) - alpha);

    VariationalSplit out;
    out.E_minus_trial_bound = barycenter_trial_bound(d, alpha);

    if (basis.source() == BasisSource::Analytic) {
        // H in modal form: Σ v_i²(μ_i − α) + 2 Σ v_i a_i.
        auto H = [&](int lo, int hi) {
            double s = 0.0;
            for (int i = lo; i < hi; ++i) s += v[i] * v[i] * (basis.mu(i) - alpha) + 2.0 * v[i] * a[i];
            return s;
        };
        out.E_plus_max = H(0, p);
        out.E_minus_restricted = H(p, N);
        return out;
    }

    // Star2D: evaluate H on nodal functions with the discrete DtN quadratic form.
    const BoundaryGrid& g = basis.grid();
    const int M = g.size();
    const Eigen::Map<const Eigen::VectorXd> w(g.weight.data(), M);
    const Eigen::Map<const Eigen::VectorXd> f(ts.flux.data(), M);
    const Eigen::MatrixXd WD = w.asDiagonal() * basis.layer().dtn();
    const Eigen::MatrixXd K = 0.5 * (WD + WD.transpose()) - alpha * Eigen::MatrixXd(w.asDiagonal());
    auto H = [&](const Eigen::VectorXd& x) { return x.dot(K * x) + 2.0 * x.dot(w.cwiseProduct(f)); };
    const Eigen::Map<const Eigen::VectorXd> vv(v.data(), N);
    out.E_plus_max = H(basis.traces().leftCols(p) * vv.head(p));
    out.E_minus_restricted = H(basis.traces().rightCols(N - p) * vv.tail(N - p));

    // min H over nodal v with ∮ v φ_i = 0, i ≤ p.
    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(M + p, M + p);
    kkt.topLeftCorner(M, M) = K;
    const Eigen::MatrixXd C = w.asDiagonal() * basis.traces().leftCols(p);
    kkt.topRightCorner(M, p) = C;
    kkt.bottomLeftCorner(p, M) = C.transpose();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(M + p);
    rhs.head(M) = -w.cwiseProduct(f);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(kkt);
    if (lu.rcond() < 1e-14) throw SolverError("energy_split_variational: constrained problem is singular");
    const Eigen::VectorXd sol = lu.solve(rhs);
    out.E_minus_constrained = H(sol.head(M));
    return out;
}

// ---------------------------------------------------------------------------

double ball_energy(int dim, double radius, double alpha)
{
    if (alpha == 0.0) throw ValidationError("ball_energy: alpha must be nonzero");
    return ball_volume(dim, radius) * (-radius * radius / (dim * (dim + 2.0)) + radius / (alpha * dim));
}

double j_functional(const Domain& d, double alpha, double T)
{
    if (!(alpha > 0.0)) throw ValidationError("j_functional: alpha must be positive");
    const double V = volume(d);
    return T + V * V / (alpha * surface_area(d));
}

double j_functional(const Domain& d, double alpha) { return j_functional(d, alpha, rigidity(d).value); }

double j_functional_equal_ball(const Domain& d, double alpha)
{
    if (!(alpha > 0.0)) throw ValidationError("j_functional: alpha must be positive");
    const int n = d.dim();
    const double R = equal_volume_radius(d);
    const double V = ball_volume(n, R);
    return ball_rigidity(n, R) + V * V / (alpha * sphere_area(n, R));
}

double alpha0(const Domain& d, double T)
{
    if (d.kind() == DomainKind::Ball) throw ValidationError("alpha0: undefined for a ball (epsilon0 = 0)");
    const int n = d.dim();
    const double R = equal_volume_radius(d);
    const double TB = ball_rigidity(n, R);
    const double eps0 = T - TB;
    if (eps0 <= 1e-12 * std::abs(TB)) throw ValidationError("alpha0: epsilon0 is not positive (domain is numerically a ball)");
    const double V = ball_volume(n, R);
    return V * V / eps0 * (1.0 / sphere_area(n, R) - 1.0 / surface_area(d));
}

double alpha0(const Domain& d) { return alpha0(d, rigidity(d).value); }

// ---------------------------------------------------------------------------

PoleScan pole_scan(const Domain& d, std::span<const double> alpha_grid, const SteklovBasis& basis,
                   const TorsionSolution& ts, int N)
{
    PoleScan scan;
    const std::vector<double> a = flux_coefficients(ts, basis);
    const int Nu = std::min(N, basis.count());
    const double tol = compatibility_tolerance(std::span<const double>(a.data(), Nu));
    for (int i = 0; i < Nu; ++i) {
        if (std::abs(a[i]) <= tol) continue;
        const double mu = basis.mu(i);
        if (scan.poles.empty() || std::abs(scan.poles.back() - mu) >= resonance_tolerance(mu)) scan.poles.push_back(mu);
    }
    std::vector<double> kept;
    for (double al : alpha_grid) {
        bool near = false;
        for (double mu : scan.poles) near = near || std::abs(al - mu) < resonance_tolerance(al);
        (near ? scan.excluded : kept).push_back(al);
    }
    scan.rows.resize(kept.size());
    std::vector<std::exception_ptr> errors(kept.size());
    kernels::for_each_index(static_cast<int>(kept.size()), kernels::Exec::Parallel, [&](int i) {
        try {
            scan.rows[i] = energy_series(d, kept[i], basis, ts, N);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    });
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    return scan;
}

}  // namespace robinlab
