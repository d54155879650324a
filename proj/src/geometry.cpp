#include "robinlab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "robinlab/kernels.hpp"

namespace robinlab {

int TrigPolynomial::degree() const
{
    int deg = 0;
    for (int k = 0; k < static_cast<int>(cos_coeffs.size()); ++k)
        if (cos_coeffs[k] != 0.0) deg = std::max(deg, k);
    for (int k = 1; k < static_cast<int>(sin_coeffs.size()); ++k)
        if (sin_coeffs[k] != 0.0) deg = std::max(deg, k);
    return deg;
}

double TrigPolynomial::derivative(double theta, int order) const
{
    // d^m/dθ^m cos(kθ) = k^m cos(kθ + mπ/2), likewise for sin.
    const double shift = order * kPi / 2.0;
    double s = 0.0;
    for (int k = 0; k < static_cast<int>(cos_coeffs.size()); ++k) {
        if (k == 0) {
            if (order == 0) s += cos_coeffs[0];
            continue;
        }
        s += cos_coeffs[k] * std::pow(k, order) * std::cos(k * theta + shift);
    }
    for (int k = 1; k < static_cast<int>(sin_coeffs.size()); ++k)
        s += sin_coeffs[k] * std::pow(k, order) * std::sin(k * theta + shift);
    return s;
}

TrigPolynomial TrigPolynomial::scaled(double factor) const
{
    TrigPolynomial out = *this;
    for (double& c : out.cos_coeffs) c *= factor;
    for (double& c : out.sin_coeffs) c *= factor;
    return out;
}

std::string to_string(DomainKind kind)
{
    switch (kind) {
    case DomainKind::Ball: return "ball";
    case DomainKind::Annulus: return "annulus";
    case DomainKind::Star2D: return "star2d";
    }
    return "unknown";
}

Domain Domain::ball(int dim, double radius)
{
    if (dim < 2) throw ValidationError("ball: dimension must be >= 2");
    if (!(radius > 0.0)) throw ValidationError("ball: radius must be positive");
    Domain d;
    d.kind_ = DomainKind::Ball;
    d.dim_ = dim;
    d.radius_ = radius;
    return d;
}

Domain Domain::annulus(int dim, double radius, double kappa)
{
    if (dim < 2) throw ValidationError("annulus: dimension must be >= 2");
    if (!(radius > 0.0)) throw ValidationError("annulus: radius must be positive");
    if (!(kappa > 0.0 && kappa < 1.0)) throw ValidationError("annulus: kappa must lie in (0,1)");
    Domain d;
    d.kind_ = DomainKind::Annulus;
    d.dim_ = dim;
    d.radius_ = radius;
    d.kappa_ = kappa;
    return d;
}

Domain Domain::star2d(TrigPolynomial shape, double scale, int quadrature_nodes)
{
    if (!(scale > 0.0)) throw ValidationError("star2d: scale must be positive");
    if (shape.cos_coeffs.empty()) throw ValidationError("star2d: empty radial function");
    if (quadrature_nodes < 16 || quadrature_nodes % 2 != 0)
        throw ValidationError("star2d: quadrature node count must be even and >= 16");
    if (shape.sin_coeffs.empty()) shape.sin_coeffs.push_back(0.0);
    const int samples = std::max(1024, 16 * (shape.degree() + 1));
    for (int j = 0; j < samples; ++j) {
        if (!(shape(2.0 * kPi * j / samples) > 0.0))
            throw ValidationError("star2d: radial function must be positive");
    }
    if (2 * shape.degree() >= quadrature_nodes / 2)
        throw ValidationError("star2d: too few quadrature nodes for the radial function degree");
    Domain d;
    d.kind_ = DomainKind::Star2D;
    d.dim_ = 2;
    d.radius_ = scale;
    d.shape_ = std::move(shape);
    d.nodes_ = quadrature_nodes;
    return d;
}

double Domain::rho(double theta, int order) const
{
    switch (kind_) {
    case DomainKind::Star2D: return radius_ * shape_.derivative(theta, order);
    case DomainKind::Ball:
        if (dim_ != 2) throw ValidationError("rho: only defined in two dimensions");
        return order == 0 ? radius_ : 0.0;
    case DomainKind::Annulus: break;
    }
    throw ValidationError("rho: annulus has no single radial function");
}

Domain Domain::with_quadrature_nodes(int nodes) const
{
    if (kind_ == DomainKind::Star2D) return star2d(shape_, radius_, nodes);
    Domain d = *this;
    d.nodes_ = nodes;
    return d;
}

double BoundaryGrid::integrate(std::span<const double> f) const
{
    return kernels::pairwise_dot(f, weight);
}

BoundaryGrid boundary_grid(const Domain& d, int nodes)
{
    if (d.dim() != 2 || d.kind() == DomainKind::Annulus)
        throw ValidationError("boundary_grid: requires a Star2D domain or a 2-D ball");
    if (nodes < 4) throw ValidationError("boundary_grid: too few nodes");
    BoundaryGrid g;
    g.theta.resize(nodes);
    g.x.resize(nodes);
    g.y.resize(nodes);
    g.nx.resize(nodes);
    g.ny.resize(nodes);
    g.speed.resize(nodes);
    g.curvature.resize(nodes);
    g.weight.resize(nodes);
    const double h = 2.0 * kPi / nodes;
    for (int j = 0; j < nodes; ++j) {
        const double t = h * j;
        const double r = d.rho(t, 0), r1 = d.rho(t, 1), r2 = d.rho(t, 2);
        const double c = std::cos(t), s = std::sin(t);
        const double dx = r1 * c - r * s;
        const double dy = r1 * s + r * c;
        const double sp = std::hypot(dx, dy);
        g.theta[j] = t;
        g.x[j] = r * c;
        g.y[j] = r * s;
        g.nx[j] = dy / sp;
        g.ny[j] = -dx / sp;
        g.speed[j] = sp;
        g.curvature[j] = (r * r + 2.0 * r1 * r1 - r * r2) / (sp * sp * sp);
        g.weight[j] = sp * h;
    }
    return g;
}

double unit_sphere_area(int dim)
{
    return 2.0 * std::pow(kPi, dim / 2.0) / std::tgamma(dim / 2.0);
}

double ball_volume(int dim, double radius) { return unit_sphere_area(dim) * std::pow(radius, dim) / dim; }

double sphere_area(int dim, double radius) { return unit_sphere_area(dim) * std::pow(radius, dim - 1); }

namespace {

// Periodic trapezoid of f over [0,2π) with M nodes.
template <class F>
double periodic_trapezoid(F&& f, int nodes)
{
    std::vector<double> v(nodes);
    for (int j = 0; j < nodes; ++j) v[j] = f(2.0 * kPi * j / nodes);
    return kernels::pairwise_sum(v) * 2.0 * kPi / nodes;
}

template <class F>
QuadratureEstimate periodic_estimate(F&& f, int nodes)
{
    const double full = periodic_trapezoid(f, nodes);
    const double half = periodic_trapezoid(f, nodes / 2);
    return {full, std::abs(full - half)};
}

}  // namespace

QuadratureEstimate volume_estimate(const Domain& d)
{
    switch (d.kind()) {
    case DomainKind::Ball: return {ball_volume(d.dim(), d.radius()), 0.0};
    case DomainKind::Annulus:
        return {ball_volume(d.dim(), d.radius()) * (1.0 - std::pow(d.kappa(), d.dim())), 0.0};
    case DomainKind::Star2D:
        return periodic_estimate([&](double t) { return 0.5 * d.rho(t) * d.rho(t); }, d.quadrature_nodes());
    }
    return {};
}

QuadratureEstimate surface_area_estimate(const Domain& d)
{
    switch (d.kind()) {
    case DomainKind::Ball: return {sphere_area(d.dim(), d.radius()), 0.0};
    case DomainKind::Annulus:
        return {sphere_area(d.dim(), d.radius()) + sphere_area(d.dim(), d.kappa() * d.radius()), 0.0};
    case DomainKind::Star2D:
        return periodic_estimate([&](double t) { return std::hypot(d.rho(t), d.rho(t, 1)); },
                                 d.quadrature_nodes());
    }
    return {};
}

double equal_volume_radius(const Domain& d)
{
    return std::pow(volume(d) * d.dim() / unit_sphere_area(d.dim()), 1.0 / d.dim());
}

double mean_curvature(const Domain& d, BoundaryPoint p)
{
    switch (d.kind()) {
    case DomainKind::Ball: return 1.0 / d.radius();
    case DomainKind::Annulus:
        return p.component == 0 ? 1.0 / d.radius() : -1.0 / (d.kappa() * d.radius());
    case DomainKind::Star2D: {
        const double r = d.rho(p.theta), r1 = d.rho(p.theta, 1), r2 = d.rho(p.theta, 2);
        return (r * r + 2.0 * r1 * r1 - r * r2) / std::pow(r * r + r1 * r1, 1.5);
    }
    }
    return 0.0;
}

double surface_defect(const Domain& d)
{
    if (d.dim() != 2) throw ValidationError("surface_defect: requires a planar domain");
    const double area = volume(d);
    const double length = surface_area(d);
    const double y2 = 1.0 - 4.0 * kPi * area / (length * length);
    // Roundoff on discs can produce −1e−16.
    return std::max(0.0, y2);
}

PlanarMoments planar_moments(const Domain& d)
{
    if (d.dim() != 2) throw ValidationError("planar_moments: requires a planar domain");
    PlanarMoments m;
    if (d.kind() == DomainKind::Annulus) {
        const double R = d.radius(), r = d.kappa() * R;
        m.area = volume(d);
        m.perimeter = surface_area(d);
        m.bnd_r2 = 2.0 * kPi * (R * R * R + r * r * r);
        return m;
    }
    const BoundaryGrid g = boundary_grid(d);
    const int M = g.size();
    std::vector<double> cx(M), cy(M), r2(M), ones(M, 1.0);
    for (int j = 0; j < M; ++j) {
        const double r = std::hypot(g.x[j], g.y[j]);
        // ∫x dx = ∫ ρ³/3 cosθ dθ; expressed against the arclength weights.
        cx[j] = r * r * g.x[j] / 3.0 / g.speed[j];
        cy[j] = r * r * g.y[j] / 3.0 / g.speed[j];
        r2[j] = r * r;
    }
    m.area = volume(d);
    m.perimeter = g.integrate(ones);
    m.vol_x = g.integrate(cx);
    m.vol_y = g.integrate(cy);
    m.bnd_x = g.integrate(g.x);
    m.bnd_y = g.integrate(g.y);
    m.bnd_r2 = g.integrate(r2);
    return m;
}

// ---------------------------------------------------------------------------

std::string to_string(SecondOrderMode mode)
{
    switch (mode) {
    case SecondOrderMode::None: return "none";
    case SecondOrderMode::Compensating: return "compensating";
    case SecondOrderMode::Explicit: return "explicit";
    }
    return "none";
}

SecondOrderMode second_order_mode_from_string(const std::string& s)
{
    if (s == "none") return SecondOrderMode::None;
    if (s == "compensating" || s == "second-order-volume-compensating") return SecondOrderMode::Compensating;
    if (s == "explicit") return SecondOrderMode::Explicit;
    throw ValidationError("unknown w_mode '" + s + "'");
}

long harmonic_dimension(int dim, int k)
{
    if (k < 0) return 0;
    auto binom = [](long n, long r) -> long {
        if (r < 0 || n < r) return 0;
        long v = 1;
        for (long i = 1; i <= r; ++i) v = v * (n - r + i) / i;
        return v;
    };
    return binom(k + dim - 1, dim - 1) - binom(k + dim - 3, dim - 1);
}

int ball_mode_count(int dim, int k_max)
{
    long count = 0;
    for (int k = 0; k <= k_max; ++k) count += harmonic_dimension(dim, k);
    return static_cast<int>(count);
}

int ball_mode_degree(int dim, int index)
{
    if (index < 0) throw ValidationError("ball_mode_degree: negative index");
    long seen = 0;
    for (int k = 0;; ++k) {
        seen += harmonic_dimension(dim, k);
        if (index < seen) return k;
    }
}

namespace {

double sum_squares(std::span<const double> v)
{
    std::vector<double> sq(v.size());
    std::transform(v.begin(), v.end(), sq.begin(), [](double x) { return x * x; });
    return kernels::pairwise_sum(sq);
}

void require_ball(const Domain& d, const char* who)
{
    if (d.kind() != DomainKind::Ball) throw ValidationError(std::string(who) + ": requires a ball");
}

}  // namespace

double compensating_w_normal(const PerturbationField& p, const Domain& d)
{
    require_ball(d, "compensating_w_normal");
    const double n = d.dim(), R = d.radius();
    // (v·ν) = Σ b_i φ_i with orthonormal φ_i, so ∮ H (v·ν)² = Σ b_i² / R.
    const double first = (n - 1.0) * sum_squares(p.b) / R;
    return -first / surface_area(d);
}

VolumeCheck check_volume_preserving(const PerturbationField& p, const Domain& d, int order, double tol)
{
    if (order != 1 && order != 2) throw ValidationError("check_volume_preserving: order must be 1 or 2");
    if (order == 2) require_ball(d, "check_volume_preserving(order 2)");
    VolumeCheck check;
    check.order = order;
    if (order == 1) {
        // ∮ (v·ν) dS = b₁ ∮ φ₁ dS = b₁ √|∂Ω|
        const double b1 = p.b.empty() ? 0.0 : p.b[0];
        check.residual = b1 * std::sqrt(surface_area(d));
    } else {
        const double n = d.dim(), R = d.radius();
        const double curvature_term = (n - 1.0) * sum_squares(p.b) / R;
        double w_integral = 0.0;
        switch (p.w_mode) {
        case SecondOrderMode::None: break;
        case SecondOrderMode::Compensating: w_integral = compensating_w_normal(p, d) * surface_area(d); break;
        case SecondOrderMode::Explicit:
            w_integral = (p.w_coeffs.empty() ? 0.0 : p.w_coeffs[0]) * std::sqrt(surface_area(d));
            break;
        }
        check.residual = curvature_term + w_integral;
    }
    check.passed = std::abs(check.residual) <= tol * std::max(1.0, surface_area(d));
    return check;
}

VolumeCheck check_volume_preserving(const PlanarField& v, const PlanarField& w, const Domain& d, int order,
                                    double tol)
{
    if (d.kind() != DomainKind::Ball || d.dim() != 2)
        throw ValidationError("check_volume_preserving: vector fields require a 2-D ball");
    if (order != 1 && order != 2) throw ValidationError("check_volume_preserving: order must be 1 or 2");
    // Image boundary P + tV + (t²/2)W; the enclosed area is ½∮ Φ × ∂_θΦ dθ, a
    // polynomial in t whose t and t² coefficients need only boundary values.
    const BoundaryGrid g = boundary_grid(d);
    const int M = g.size();
    std::vector<double> vx(M), vy(M), wx(M), wy(M);
    for (int j = 0; j < M; ++j) {
        const auto vv = v(g.x[j], g.y[j]);
        const auto ww = w(g.x[j], g.y[j]);
        vx[j] = vv[0];
        vy[j] = vv[1];
        wx[j] = ww[0];
        wy[j] = ww[1];
    }
    const auto dvx = kernels::spectral_derivative(vx), dvy = kernels::spectral_derivative(vy);
    const auto dwx = kernels::spectral_derivative(wx), dwy = kernels::spectral_derivative(wy);
    const double R = d.radius(), h = 2.0 * kPi / M;
    double first = 0.0, second = 0.0;
    for (int j = 0; j < M; ++j) {
        const double th = 2.0 * kPi * j / M;
        const double px = R * std::cos(th), py = R * std::sin(th), dpx = -py, dpy = px;
        first += 0.5 * (px * dvy[j] - py * dvx[j] + vx[j] * dpy - vy[j] * dpx);
        second += vx[j] * dvy[j] - vy[j] * dvx[j] + 0.5 * (px * dwy[j] - py * dwx[j] + wx[j] * dpy - wy[j] * dpx);
    }
    VolumeCheck check;
    check.order = order;
    check.residual = (order == 1 ? first : second) * h;
    check.passed = std::abs(check.residual) <= tol * std::max(1.0, surface_area(d));
    return check;
}

// ---------------------------------------------------------------------------

Domain make_ellipse(double radius, double t, int quadrature_nodes)
{
    if (!(radius > 0.0) || !(t > -1.0)) throw ValidationError("make_ellipse: invalid parameters");
    const double a = 1.0 / (1.0 + t), b = 1.0 + t;  // semi-axes relative to R
    constexpr int samples = 4096;
    std::vector<double> r(samples);
    for (int j = 0; j < samples; ++j) {
        const double th = 2.0 * kPi * j / samples;
        const double c = std::cos(th), s = std::sin(th);
        r[j] = a * b / std::sqrt(b * b * c * c + a * a * s * s);
    }
    // The radial function is even and π-periodic: only even cosines appear.
    const int max_degree = std::min(quadrature_nodes / 4 - 1, 160);
    TrigPolynomial p;
    p.sin_coeffs = {0.0};
    std::vector<double> prod(samples);
    for (int k = 0; k <= max_degree; ++k) {
        for (int j = 0; j < samples; ++j) prod[j] = r[j] * std::cos(k * 2.0 * kPi * j / samples);
        double c = kernels::pairwise_sum(prod) / samples;
        if (k > 0) c *= 2.0;
        if (k % 2 == 1) c = 0.0;
        p.cos_coeffs.push_back(c);
    }
    while (p.cos_coeffs.size() > 1 && std::abs(p.cos_coeffs.back()) < 1e-17) p.cos_coeffs.pop_back();
    return Domain::star2d(std::move(p), radius, quadrature_nodes);
}

Domain volume_corrected_star(const TrigPolynomial& eta, double radius, double t, int quadrature_nodes)
{
    TrigPolynomial p = eta.scaled(t);
    if (p.cos_coeffs.empty()) p.cos_coeffs.push_back(0.0);
    p.cos_coeffs[0] += 1.0;
    // ∫(1+tη)² dθ = 2π a₀² + π Σ_{k≥1} (a_k² + b_k²)
    double integral = 2.0 * kPi * p.cos_coeffs[0] * p.cos_coeffs[0];
    for (std::size_t k = 1; k < p.cos_coeffs.size(); ++k) integral += kPi * p.cos_coeffs[k] * p.cos_coeffs[k];
    for (std::size_t k = 1; k < p.sin_coeffs.size(); ++k) integral += kPi * p.sin_coeffs[k] * p.sin_coeffs[k];
    const double lambda = std::sqrt(2.0 * kPi / integral);
    return Domain::star2d(p.scaled(lambda), radius, quadrature_nodes);
}

std::vector<Domain> random_star_corpus(const StarCorpusOptions& opt)
{
    if (opt.count < 0 || opt.k_min < 1 || opt.k_max < opt.k_min || !(opt.amplitude >= 0.0))
        throw ValidationError("random_star_corpus: invalid options");
    // Keeps min ρ ≥ 1 − 2(k_max−k_min+1)·amplitude positive.
    if (2.0 * (opt.k_max - opt.k_min + 1) * opt.amplitude >= 0.9)
        throw ValidationError("random_star_corpus: amplitude too large for a star domain");
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> coeff(-opt.amplitude, opt.amplitude);
    std::vector<Domain> out;
    out.reserve(opt.count);
    for (int n = 0; n < opt.count; ++n) {
        TrigPolynomial p;
        p.cos_coeffs.assign(opt.k_max + 1, 0.0);
        p.sin_coeffs.assign(opt.k_max + 1, 0.0);
        p.cos_coeffs[0] = 1.0;
        for (int k = opt.k_min; k <= opt.k_max; ++k) {
            p.cos_coeffs[k] = coeff(rng);
            p.sin_coeffs[k] = coeff(rng);
        }
        out.push_back(Domain::star2d(std::move(p), opt.radius, opt.quadrature_nodes));
    }
    return out;
}

}  // namespace robinlab
