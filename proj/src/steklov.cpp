#include "robinlab/steklov.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "robinlab/kernels.hpp"
#include "robinlab/layer_potential.hpp"

namespace robinlab {

double resonance_tolerance(double alpha) { return 1e-9 * std::max(1.0, std::abs(alpha)); }

std::string to_string(ExpansionStatus s)
{
    switch (s) {
    case ExpansionStatus::Unique: return "unique";
    case ExpansionStatus::Family: return "family";
    case ExpansionStatus::NoSolution: return "no_solution";
    }
    return "unknown";
}

namespace {

// Unit-normalised circular harmonics on S¹.
double circle_harmonic(int degree, int slot, double theta)
{
    if (degree == 0) return 1.0 / std::sqrt(2.0 * kPi);
    return (slot == 0 ? std::cos(degree * theta) : std::sin(degree * theta)) / std::sqrt(kPi);
}

double max_orthonormality_error(const Eigen::MatrixXd& phi, const std::vector<double>& w)
{
    const Eigen::Map<const Eigen::VectorXd> wv(w.data(), static_cast<Eigen::Index>(w.size()));
    const Eigen::MatrixXd gram = phi.transpose() * wv.asDiagonal() * phi;
    return (gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
}

}  // namespace

SteklovBasis spectrum_ball(int dim, double radius, int k_max, int nodes)
{
    if (k_max < 0) throw ValidationError("spectrum_ball: k_max must be >= 0");
    const Domain d = Domain::ball(dim, radius).with_quadrature_nodes(nodes);
    SteklovBasis basis;
    basis.domain_ = std::make_shared<const Domain>(d);
    basis.source_ = BasisSource::Analytic;
    const double amp = std::pow(radius, -0.5 * (dim - 1));
    for (int k = 0; k <= k_max; ++k) {
        const long mult = harmonic_dimension(dim, k);
        for (long s = 0; s < mult; ++s) {
            SteklovMode m;
            m.mu = k / radius;
            m.degree = k;
            m.slot = static_cast<int>(s);
            m.outer_amp = amp;
            basis.modes_.push_back(m);
        }
    }
    basis.mu_next_ = (k_max + 1) / radius;
    if (dim == 2) {
        auto grid = std::make_shared<BoundaryGrid>(boundary_grid(d, nodes));
        const int M = grid->size();
        basis.traces_.resize(M, basis.count());
        for (int i = 0; i < basis.count(); ++i) {
            const SteklovMode& m = basis.modes_[i];
            for (int j = 0; j < M; ++j)
                basis.traces_(j, i) = amp * circle_harmonic(m.degree, m.slot, grid->theta[j]);
        }
        basis.orthonormality_residual_ = max_orthonormality_error(basis.traces_, grid->weight);
        basis.grid_ = std::move(grid);
    }
    return basis;
}

namespace {

struct RadialPair {
    // Profiles c1 f1(r) + c2 f2(r) for degree k in dimension n.
    int dim, k;
    [[nodiscard]] double f1(double r) const { return std::pow(r, k); }
    [[nodiscard]] double df1(double r) const { return k == 0 ? 0.0 : k * std::pow(r, k - 1); }
    [[nodiscard]] double f2(double r) const
    {
        if (dim == 2 && k == 0) return std::log(r);
        return std::pow(r, 2 - dim - k);
    }
    [[nodiscard]] double df2(double r) const
    {
        if (dim == 2 && k == 0) return 1.0 / r;
        return (2.0 - dim - k) * std::pow(r, 1 - dim - k);
    }
};

struct PencilRoot {
    double mu;
    double c1, c2;
};

// Eigenpairs of A c = μ B c for the Steklov conditions on both spheres:
// outer ∂_r φ = μ φ, inner −∂_r φ = μ φ.
std::array<PencilRoot, 2> annulus_pencil(int dim, double R, double kappa, int k)
{
    const RadialPair p{dim, k};
    const double ri = kappa * R;
    const double a11 = p.df1(R), a12 = p.df2(R), a21 = -p.df1(ri), a22 = -p.df2(ri);
    const double b11 = p.f1(R), b12 = p.f2(R), b21 = p.f1(ri), b22 = p.f2(ri);
    const double detB = b11 * b22 - b12 * b21;
    const double scaleB = std::abs(b11 * b22) + std::abs(b12 * b21);
    if (std::abs(detB) <= 1e-14 * scaleB) throw SolverError("spectrum_annulus: degenerate pencil");
    // det(A − μB) = detA − μ(a11 b22 + a22 b11 − a12 b21 − a21 b12) + μ² detB
    const double qa = detB;
    const double qb = -(a11 * b22 + a22 * b11 - a12 * b21 - a21 * b12);
    const double qc = a11 * a22 - a12 * a21;
    double disc = qb * qb - 4.0 * qa * qc;
    if (disc < 0.0) disc = 0.0;   // real spectrum; clip roundoff
    const double sq = std::sqrt(disc);
    // Numerically stable quadratic roots.
    const double q = -0.5 * (qb + std::copysign(sq, qb));
    double m1 = q / qa;
    double m2 = (q != 0.0) ? qc / q : -qb / qa - m1;
    if (m1 > m2) std::swap(m1, m2);
    std::array<PencilRoot, 2> out{};
    const double mus[2] = {m1, m2};
    for (int r = 0; r < 2; ++r) {
        const double mu = std::abs(mus[r]) < 1e-14 * (std::abs(m1) + std::abs(m2)) ? 0.0 : mus[r];
        // Null vector of the better-conditioned row of (A − μB).
        const double r11 = a11 - mu * b11, r12 = a12 - mu * b12;
        const double r21 = a21 - mu * b21, r22 = a22 - mu * b22;
        double c1, c2;
        if (std::hypot(r11, r12) >= std::hypot(r21, r22)) {
            c1 = -r12;
            c2 = r11;
        } else {
            c1 = -r22;
            c2 = r21;
        }
        if (c1 == 0.0 && c2 == 0.0) {
            c1 = 1.0;
            c2 = 0.0;
        }
        out[r] = {mu, c1, c2};
    }
    return out;
}

}  // namespace

double annulus_radial_eigenvalue(int dim, double radius, double kappa)
{
    (void)Domain::annulus(dim, radius, kappa);
    const auto roots = annulus_pencil(dim, radius, kappa, 0);
    return roots[1].mu;
}

SteklovBasis spectrum_annulus(int dim, double radius, double kappa, int k_max)
{
    if (k_max < 0) throw ValidationError("spectrum_annulus: k_max must be >= 0");
    const Domain d = Domain::annulus(dim, radius, kappa);
    SteklovBasis basis;
    basis.domain_ = std::make_shared<const Domain>(d);
    basis.source_ = BasisSource::Analytic;
    const double ri = kappa * radius;
    std::vector<SteklovMode> modes;
    for (int k = 0; k <= k_max; ++k) {
        const RadialPair p{dim, k};
        const auto roots = annulus_pencil(dim, radius, kappa, k);
        for (int r = 0; r < 2; ++r) {
            const double out = roots[r].c1 * p.f1(radius) + roots[r].c2 * p.f2(radius);
            const double in = roots[r].c1 * p.f1(ri) + roots[r].c2 * p.f2(ri);
            double norm = std::sqrt(out * out * std::pow(radius, dim - 1) + in * in * std::pow(ri, dim - 1));
            if (out < 0.0 || (out == 0.0 && in < 0.0)) norm = -norm;
            const long mult = harmonic_dimension(dim, k);
            for (long s = 0; s < mult; ++s) {
                SteklovMode m;
                m.mu = roots[r].mu;
                m.degree = k;
                m.slot = static_cast<int>(s);
                m.radial_branch = (r == 1);
                m.outer_amp = out / norm;
                m.inner_amp = in / norm;
                m.c1 = roots[r].c1 / norm;
                m.c2 = roots[r].c2 / norm;
                modes.push_back(m);
            }
        }
    }
    std::stable_sort(modes.begin(), modes.end(), [](const SteklovMode& a, const SteklovMode& b) { return a.mu < b.mu; });
    // Keep the ordered prefix that is complete: every missing eigenvalue is at
    // least the lower root of degree k_max + 1.
    const double next = annulus_pencil(dim, radius, kappa, k_max + 1)[0].mu;
    for (const SteklovMode& m : modes)
        if (m.mu < next) basis.modes_.push_back(m);
    basis.mu_next_ = next;
    return basis;
}

SteklovBasis spectrum_star2d(const Domain& d, int n_modes, int nodes)
{
    if (d.kind() != DomainKind::Star2D) throw ValidationError("spectrum_star2d: requires a Star2D domain");
    if (n_modes < 1) throw ValidationError("spectrum_star2d: n_modes must be positive");
    if (nodes < 8 * n_modes) throw ValidationError("spectrum_star2d: need at least 8 nodes per requested mode");

    const Domain dd = d.with_quadrature_nodes(nodes);
    auto layer = std::make_shared<LayerPotential2D>(dd);
    const BoundaryGrid& g = layer->grid();
    const int M = g.size();
    const Eigen::Map<const Eigen::VectorXd> w(g.weight.data(), M);

    // Symmetric generalised problem (W D) φ = μ W φ.
    Eigen::MatrixXd A = w.asDiagonal() * layer->dtn();
    const Eigen::MatrixXd As = 0.5 * (A + A.transpose());
    const Eigen::VectorXd wis = w.cwiseSqrt().cwiseInverse();
    const Eigen::MatrixXd B = wis.asDiagonal() * As * wis.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(B);
    if (eig.info() != Eigen::Success) throw SolverError("spectrum_star2d: eigensolver did not converge");

    Eigen::VectorXd mu = eig.eigenvalues();
    Eigen::MatrixXd phi = wis.asDiagonal() * eig.eigenvectors();
    // μ₁ = 0 exactly: constants lie in the kernel of the continuous map.
    mu[0] = std::abs(mu[0]) < 1e-10 ? 0.0 : mu[0];

    // Templates in the ordered disc basis: 1, cos θ, sin θ, cos 2θ, ...
    auto template_degree = [](int i) { return (i + 1) / 2; };
    Eigen::MatrixXd templates(M, n_modes + 1);
    for (int i = 0; i <= n_modes; ++i) {
        const int k = template_degree(i);
        const int slot = (i == 0) ? 0 : (i % 2 == 1 ? 0 : 1);
        for (int j = 0; j < M; ++j) templates(j, i) = circle_harmonic(k, slot, g.theta[j]);
    }

    // Rotate each (near-)degenerate cluster onto its templates so that the
    // basis is reproducible; then fix signs.
    const int keep = n_modes + 1;
    for (int start = 0; start < keep;) {
        int end = start + 1;
        while (end < M && std::abs(mu[end] - mu[start]) < 1e-8 * std::max(1.0, std::abs(mu[start]))) ++end;
        const int m = end - start;
        if (m > 1 && end <= keep) {
            const Eigen::MatrixXd C =
                phi.middleCols(start, m).transpose() * w.asDiagonal() * templates.middleCols(start, m);
            Eigen::JacobiSVD<Eigen::MatrixXd> svd(C, Eigen::ComputeFullU | Eigen::ComputeFullV);
            const Eigen::MatrixXd Q = svd.matrixU() * svd.matrixV().transpose();
            phi.middleCols(start, m) = (phi.middleCols(start, m) * Q).eval();
            const double mean = mu.segment(start, m).mean();
            mu.segment(start, m).setConstant(mean);
        }
        start = end;
    }
    for (int i = 0; i < keep; ++i) {
        const double s = (phi.col(i).array() * w.array() * templates.col(i).array()).sum();
        bool flip = false;
        if (std::abs(s) > 1e-8) {
            flip = s < 0.0;
        } else {
            const double big = phi.col(i).cwiseAbs().maxCoeff();
            for (int j = 0; j < M; ++j) {
                if (std::abs(phi(j, i)) > 1e-8 * big) {
                    flip = phi(j, i) < 0.0;
                    break;
                }
            }
        }
        if (flip) phi.col(i) *= -1.0;
    }

    SteklovBasis basis;
    basis.domain_ = std::make_shared<const Domain>(dd);
    basis.source_ = BasisSource::Numeric;
    basis.traces_ = phi.leftCols(n_modes);
    basis.mu_next_ = mu[n_modes];
    basis.densities_.resize(M, n_modes);
    basis.constants_.resize(n_modes);
    double eigen_res = 0.0;
    for (int i = 0; i < n_modes; ++i) {
        SteklovMode mode;
        mode.mu = mu[i];
        mode.degree = template_degree(i);
        mode.slot = (i == 0) ? 0 : (i % 2 == 1 ? 0 : 1);
        basis.modes_.push_back(mode);
        const Eigen::VectorXd col = phi.col(i);
        const LayerDensity dens = layer->solve_dirichlet({col.data(), static_cast<std::size_t>(M)});
        basis.densities_.col(i) = dens.psi;
        basis.constants_[i] = dens.constant;
        const Eigen::VectorXd r = layer->dtn() * col - mu[i] * col;
        eigen_res = std::max(eigen_res, r.cwiseAbs().maxCoeff());
    }
    basis.eigen_residual_ = eigen_res;
    basis.orthonormality_residual_ = max_orthonormality_error(basis.traces_, g.weight);
    basis.grid_ = std::make_shared<const BoundaryGrid>(g);
    basis.layer_ = std::move(layer);
    return basis;
}

SteklovBasis steklov_basis(const Domain& d, int n_modes)
{
    switch (d.kind()) {
    case DomainKind::Ball: {
        int k = 0;
        while (ball_mode_count(d.dim(), k) < n_modes) ++k;
        return spectrum_ball(d.dim(), d.radius(), k, d.quadrature_nodes());
    }
    case DomainKind::Annulus: {
        const double mur = annulus_radial_eigenvalue(d.dim(), d.radius(), d.kappa());
        const int k = std::max(8, static_cast<int>(std::ceil(mur * d.radius())) + 2);
        return spectrum_annulus(d.dim(), d.radius(), d.kappa(), k);
    }
    case DomainKind::Star2D:
        return spectrum_star2d(d, std::min(n_modes, d.quadrature_nodes() / 8));
    }
    throw ValidationError("steklov_basis: unknown domain kind");
}

double SteklovBasis::evaluate(int i, double x, double y) const
{
    if (i < 0 || i >= count()) throw ValidationError("SteklovBasis::evaluate: index out of range");
    const Domain& d = domain();
    if (d.dim() != 2) throw ValidationError("SteklovBasis::evaluate: interior evaluation is 2-D only");
    const SteklovMode& m = modes_[i];
    if (source_ == BasisSource::Analytic) {
        const double r = std::hypot(x, y), th = std::atan2(y, x);
        double radial;
        if (d.kind() == DomainKind::Ball) {
            radial = m.outer_amp * std::pow(r / d.radius(), m.degree);
        } else {
            const RadialPair p{2, m.degree};
            radial = m.c1 * p.f1(r) + m.c2 * p.f2(r);
        }
        return radial * circle_harmonic(m.degree, m.slot, th);
    }
    const double px[1] = {x}, py[1] = {y};
    const Eigen::MatrixXd E = kernels::single_layer_eval_matrix(*grid_, px, py, kernels::Exec::Serial);
    return (E * densities_.col(i))(0, 0) + constants_[i];
}

std::vector<double> SteklovBasis::project(std::span<const double> f) const
{
    if (!has_traces()) throw ValidationError("SteklovBasis::project: basis has no boundary traces");
    const int M = grid_->size();
    if (static_cast<int>(f.size()) != M) throw ValidationError("SteklovBasis::project: data size mismatch");
    std::vector<double> out(count());
    std::vector<double> prod(M);
    for (int i = 0; i < count(); ++i) {
        for (int j = 0; j < M; ++j) prod[j] = traces_(j, i) * f[j];
        out[i] = grid_->integrate(prod);
    }
    return out;
}

double compatibility_tolerance(std::span<const double> projections)
{
    double n2 = 0.0;
    for (double g : projections) n2 += g * g;
    return 1e-9 * std::max(1.0, std::sqrt(n2));
}

HarmonicExpansion expand_harmonic(const SteklovBasis& basis, double alpha, std::span<const double> projections)
{
    if (static_cast<int>(projections.size()) != basis.count())
        throw ValidationError("expand_harmonic: projection count does not match the basis");
    HarmonicExpansion e;
    e.coefficients.assign(basis.count(), 0.0);
    const double tol_res = resonance_tolerance(alpha);
    const double tol_compat = compatibility_tolerance(projections);
    bool compatible = true;
    for (int i = 0; i < basis.count(); ++i) {
        const double gap = basis.mu(i) - alpha;
        if (std::abs(gap) < tol_res) {
            e.resonant.push_back(i);
            if (std::abs(projections[i]) > tol_compat) compatible = false;
            continue;
        }
        e.coefficients[i] = projections[i] / gap;
    }
    if (e.resonant.empty()) e.status = ExpansionStatus::Unique;
    else e.status = compatible ? ExpansionStatus::Family : ExpansionStatus::NoSolution;
    return e;
}

HarmonicExpansion expand_harmonic_nodal(const SteklovBasis& basis, double alpha, std::span<const double> g)
{
    const std::vector<double> proj = basis.project(g);
    return expand_harmonic(basis, alpha, proj);
}

std::vector<SpectrumRow> spectrum_table(const SteklovBasis& basis)
{
    std::vector<SpectrumRow> rows;
    for (int i = 0; i < basis.count(); ++i)
        rows.push_back({i + 1, basis.modes()[i].degree, basis.mu(i), basis.orthonormality_residual()});
    return rows;
}

}  // namespace robinlab
