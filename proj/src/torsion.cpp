#include "robinlab/torsion.hpp"

#include <algorithm>
#include <cmath>

#include "robinlab/kernels.hpp"

namespace robinlab {

namespace {

double radial_g(int dim, double r) { return dim == 2 ? std::log(r) : std::pow(r, 2 - dim); }
double radial_dg(int dim, double r) { return dim == 2 ? 1.0 / r : (2.0 - dim) * std::pow(r, 1 - dim); }

// ∫ g(r) r^{n−1} dr
double radial_g_moment(int dim, double r)
{
    return dim == 2 ? 0.5 * r * r * std::log(r) - 0.25 * r * r : 0.5 * r * r;
}

TorsionSolution radial_torsion(const Domain& d)
{
    const int n = d.dim();
    const double R = d.radius();
    TorsionSolution ts;
    ts.domain = std::make_shared<const Domain>(d);
    const double vol = volume(d);
    if (d.kind() == DomainKind::Ball) {
        ts.d1 = R * R / (2.0 * n);
        ts.d2 = 0.0;
        ts.flux_outer = -R / n;
        ts.T = ball_rigidity(n, R);
        ts.flux_norm2 = ts.flux_outer * ts.flux_outer * sphere_area(n, R);
        ts.gauss_residual = std::abs(ts.flux_outer * sphere_area(n, R) + vol);
        if (n == 2) {
            auto grid = std::make_shared<BoundaryGrid>(boundary_grid(d));
            ts.flux.assign(grid->size(), ts.flux_outer);
            ts.grid = std::move(grid);
        }
        return ts;
    }
    const double ri = d.kappa() * R;
    ts.d2 = (R * R - ri * ri) / (2.0 * n * (radial_g(n, R) - radial_g(n, ri)));
    ts.d1 = R * R / (2.0 * n) - ts.d2 * radial_g(n, R);
    ts.flux_outer = -R / n + ts.d2 * radial_dg(n, R);
    ts.flux_inner = ri / n - ts.d2 * radial_dg(n, ri);
    auto moment = [&](double r) {
        return -std::pow(r, n + 2) / (2.0 * n * (n + 2)) + ts.d1 * std::pow(r, n) / n + ts.d2 * radial_g_moment(n, r);
    };
    ts.T = -unit_sphere_area(n) * (moment(R) - moment(ri));
    const double so = sphere_area(n, R), si = sphere_area(n, ri);
    ts.flux_norm2 = ts.flux_outer * ts.flux_outer * so + ts.flux_inner * ts.flux_inner * si;
    ts.gauss_residual = std::abs(ts.flux_outer * so + ts.flux_inner * si + vol);
    return ts;
}

struct StarTorsionCore {
    LayerDensity density;
    std::vector<double> flux;
    double T;
    double trace_residual;
};

StarTorsionCore star_core(const LayerPotential2D& layer)
{
    const BoundaryGrid& g = layer.grid();
    const int M = g.size();
    std::vector<double> data(M), quartic(M), r2q(M);
    for (int j = 0; j < M; ++j) {
        const double r2 = g.x[j] * g.x[j] + g.y[j] * g.y[j];
        data[j] = 0.25 * r2;
        quartic[j] = r2 * r2 / 16.0 / g.speed[j];
    }
    StarTorsionCore c;
    c.density = layer.solve_dirichlet(data);
    const Eigen::VectorXd dh = layer.normal_derivative(c.density);
    const Eigen::VectorXd tr = layer.trace(c.density);
    c.flux.resize(M);
    c.trace_residual = 0.0;
    for (int j = 0; j < M; ++j) {
        c.flux[j] = -0.5 * (g.x[j] * g.nx[j] + g.y[j] * g.ny[j]) + dh[j];
        r2q[j] = data[j] * c.flux[j];
        c.trace_residual = std::max(c.trace_residual, std::abs(tr[j] - data[j]));
    }
    // −∫s = ∫|x|²/4 dx − ∫H dx, and ∫H dx = −∮(|x|²/4) ∂νs dS by Green's identity.
    c.T = g.integrate(quartic) + g.integrate(r2q);
    return c;
}

}  // namespace

double ball_rigidity(int dim, double radius)
{
    return -radius * radius * ball_volume(dim, radius) / (dim * (dim + 2.0));
}

TorsionSolution solve_torsion(const Domain& d)
{
    if (d.kind() != DomainKind::Star2D) return radial_torsion(d);
    return solve_torsion(d, std::make_shared<const LayerPotential2D>(d));
}

TorsionSolution solve_torsion(const Domain& d, std::shared_ptr<const LayerPotential2D> layer)
{
    if (d.kind() != DomainKind::Star2D) return radial_torsion(d);
    if (!layer) throw ValidationError("solve_torsion: missing layer discretisation");
    TorsionSolution ts;
    ts.domain = std::make_shared<const Domain>(d.with_quadrature_nodes(layer->size()));
    StarTorsionCore c = star_core(*layer);
    ts.T = c.T;
    ts.harmonic = std::move(c.density);
    ts.flux = std::move(c.flux);
    ts.trace_residual = c.trace_residual;
    const BoundaryGrid& g = layer->grid();
    std::vector<double> f2(ts.flux.size());
    for (std::size_t j = 0; j < f2.size(); ++j) f2[j] = ts.flux[j] * ts.flux[j];
    ts.flux_norm2 = g.integrate(f2);
    ts.gauss_residual = std::abs(g.integrate(ts.flux) + volume(*ts.domain));

    // Error estimate: same solve on half the nodes, when that grid is admissible.
    const int half = layer->size() / 2;
    try {
        const Domain coarse = d.with_quadrature_nodes(half);
        const LayerPotential2D lc(coarse, kernels::Exec::Serial);
        ts.T_error = std::abs(star_core(lc).T - ts.T);
    } catch (const ValidationError&) {
        ts.T_error = 0.0;
    }
    ts.grid = std::make_shared<const BoundaryGrid>(g);
    ts.layer = std::move(layer);
    return ts;
}

double TorsionSolution::evaluate(double x, double y) const
{
    if (domain->dim() != 2) throw ValidationError("TorsionSolution::evaluate: 2-D only");
    if (domain->kind() != DomainKind::Star2D) return evaluate_radial(std::hypot(x, y));
    const double px[1] = {x}, py[1] = {y};
    return -0.25 * (x * x + y * y) + layer->evaluate(harmonic, px, py)[0];
}

double TorsionSolution::evaluate_radial(double r) const
{
    if (domain->kind() == DomainKind::Star2D) throw ValidationError("TorsionSolution::evaluate_radial: radial domains only");
    const int n = domain->dim();
    double s = -r * r / (2.0 * n) + d1;
    if (d2 != 0.0) s += d2 * radial_g(n, r);
    return s;
}

QuadratureEstimate rigidity(const Domain& d)
{
    const TorsionSolution ts = solve_torsion(d);
    return {ts.T, ts.T_error};
}

std::vector<double> flux_coefficients(const TorsionSolution& ts, const SteklovBasis& basis)
{
    const Domain& d = *ts.domain;
    const Domain& bd = basis.domain();
    if (d.kind() != bd.kind() || d.dim() != bd.dim() || std::abs(d.radius() - bd.radius()) > 1e-14 * d.radius())
        throw ValidationError("flux_coefficients: basis and torsion solution are on different domains");
    std::vector<double> a(basis.count(), 0.0);
    if (basis.source() == BasisSource::Analytic) {
        const int n = d.dim();
        const double R = d.radius();
        const double sq = std::sqrt(unit_sphere_area(n));
        const double ri = d.kappa() * R;
        for (int i = 0; i < basis.count(); ++i) {
            const SteklovMode& m = basis.modes()[i];
            if (m.degree != 0) continue;   // ∂νs is radial: only degree-0 modes see it
            double v = m.outer_amp * ts.flux_outer * std::pow(R, n - 1);
            if (d.kind() == DomainKind::Annulus) v += m.inner_amp * ts.flux_inner * std::pow(ri, n - 1);
            a[i] = sq * v;
        }
        return a;
    }
    if (!ts.grid || ts.grid->size() != basis.grid().size())
        throw ValidationError("flux_coefficients: basis and torsion solution use different grids");
    return basis.project(ts.flux);
}

}  // namespace robinlab
