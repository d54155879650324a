#include "robinlab/oracle/fem.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

namespace robinlab::fem {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

// 4-point Gauss–Legendre on [0, 1].
constexpr std::array<double, 4> kGaussX = {0.0694318442029737, 0.3300094782075719, 0.6699905217924281,
                                           0.9305681557970263};
constexpr std::array<double, 4> kGaussW = {0.1739274225687269, 0.3260725774312731, 0.3260725774312731,
                                           0.1739274225687269};

double max_edge(const Mesh& m)
{
    double h = 0.0;
    for (const auto& t : m.triangles)
        for (int a = 0; a < 3; ++a) {
            const int p = t[a], q = t[(a + 1) % 3];
            h = std::max(h, std::hypot(m.x[p] - m.x[q], m.y[p] - m.y[q]));
        }
    return h;
}

SpMat stiffness_matrix(const Mesh& m, const Assembly& as)
{
    std::vector<Triplet> trip;
    trip.reserve(as.stiffness_values.size());
    for (std::size_t e = 0; e < m.triangles.size(); ++e)
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                trip.emplace_back(m.triangles[e][a], m.triangles[e][b], as.stiffness_values[9 * e + 3 * a + b]);
    SpMat K(m.size(), m.size());
    K.setFromTriplets(trip.begin(), trip.end());
    return K;
}

// ∮ ψ_a ψ_b dS on the curved boundary, ψ linear in θ between nodes.
SpMat boundary_mass(const Domain& d, const Mesh& m)
{
    const int N = m.angles;
    const double h = 2.0 * kPi / N;
    std::vector<Triplet> trip;
    for (int i = 0; i < N; ++i) {
        const int a = m.boundary[i], b = m.boundary[(i + 1) % N];
        double maa = 0.0, mab = 0.0, mbb = 0.0;
        for (int q = 0; q < 4; ++q) {
            const double s = kGaussX[q];
            const double th = h * (i + s);
            const double r = d.rho(th, 0), dr = d.rho(th, 1);
            const double w = kGaussW[q] * h * std::sqrt(r * r + dr * dr);
            maa += w * (1 - s) * (1 - s);
            mab += w * (1 - s) * s;
            mbb += w * s * s;
        }
        trip.emplace_back(a, a, maa);
        trip.emplace_back(a, b, mab);
        trip.emplace_back(b, a, mab);
        trip.emplace_back(b, b, mbb);
    }
    SpMat B(m.size(), m.size());
    B.setFromTriplets(trip.begin(), trip.end());
    return B;
}

struct Richardson {
    double value;
    double error;
};

// Extrapolation for E(h) = E + c₂h² + c₄h⁴ + … with h halving per level.
Richardson extrapolate(const std::vector<double>& levels)
{
    std::vector<double> row = levels;
    double prev_best = row.back();
    double factor = 4.0;
    while (row.size() > 1) {
        prev_best = row.back();
        std::vector<double> next;
        for (std::size_t i = 0; i + 1 < row.size(); ++i) next.push_back((factor * row[i + 1] - row[i]) / (factor - 1.0));
        row = std::move(next);
        factor *= 4.0;
    }
    return {row.back(), levels.size() > 1 ? std::abs(row.back() - prev_best) : 0.0};
}

std::vector<bool> boundary_mask(const Mesh& m)
{
    std::vector<bool> on(m.size(), false);
    for (int b : m.boundary) on[b] = true;
    return on;
}

// Interior/boundary index maps.
struct Partition {
    std::vector<int> interior, local;   // local[i] = position within interior, −1 on boundary
};

Partition partition(const Mesh& m)
{
    const std::vector<bool> on = boundary_mask(m);
    Partition p;
    p.local.assign(m.size(), -1);
    for (int i = 0; i < m.size(); ++i)
        if (!on[i]) {
            p.local[i] = static_cast<int>(p.interior.size());
            p.interior.push_back(i);
        }
    return p;
}

SpMat restrict_rows_cols(const SpMat& K, const std::vector<int>& row_map, const std::vector<int>& col_map, int rows,
                         int cols)
{
    std::vector<Triplet> trip;
    for (int k = 0; k < K.outerSize(); ++k)
        for (SpMat::InnerIterator it(K, k); it; ++it) {
            const int r = row_map[it.row()], c = col_map[it.col()];
            if (r >= 0 && c >= 0) trip.emplace_back(r, c, it.value());
        }
    SpMat out(rows, cols);
    out.setFromTriplets(trip.begin(), trip.end());
    return out;
}

double dirichlet_level(const Mesh& m, const Assembly& as, std::vector<double>* values)
{
    const SpMat K = stiffness_matrix(m, as);
    const Partition p = partition(m);
    const int n = static_cast<int>(p.interior.size());
    const SpMat KI = restrict_rows_cols(K, p.local, p.local, n, n);
    Eigen::VectorXd f(n);
    for (int i = 0; i < n; ++i) f[i] = as.load[p.interior[i]];
    Eigen::SimplicialLLT<SpMat> llt(KI);
    if (llt.info() != Eigen::Success) throw SolverError("fem_dirichlet_T: factorisation failed");
    const Eigen::VectorXd s = llt.solve(f);
    if (values) {
        values->assign(m.size(), 0.0);
        for (int i = 0; i < n; ++i) (*values)[p.interior[i]] = s[i];
    }
    return -f.dot(s);
}

// Solves A u = f. Near-null eigenvectors of A (α at a Steklov eigenvalue)
// are found by subspace inverse iteration; when f is orthogonal to them the
// solution with those components removed is returned, otherwise SolverError.
Eigen::VectorXd resonant_safe_solve(const SpMat& A, Eigen::SparseLU<SpMat>& lu, const Eigen::VectorXd& f)
{
    const int n = static_cast<int>(A.rows());
    constexpr int kBlock = 4;
    Eigen::MatrixXd Z(n, kBlock);
    for (int k = 0; k < kBlock; ++k)
        for (int i = 0; i < n; ++i) Z(i, k) = std::sin((k + 1.0) * (i + 1.0) * 0.7548776662466927);
    for (int it = 0; it < 8; ++it) {
        Eigen::MatrixXd W(n, kBlock);
        for (int k = 0; k < kBlock; ++k) W.col(k) = lu.solve(Eigen::VectorXd(Z.col(k)));
        if (!W.allFinite()) throw SolverError("fem_robin_energy: system is singular");
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(W);
        Z = qr.householderQ() * Eigen::MatrixXd::Identity(n, kBlock);
    }
    const Eigen::MatrixXd H = Z.transpose() * (A * Z);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (H + H.transpose()));
    double anorm = 0.0;
    for (int k = 0; k < A.outerSize(); ++k) {
        double c = 0.0;
        for (SpMat::InnerIterator it(A, k); it; ++it) c += std::abs(it.value());
        anorm = std::max(anorm, c);
    }
    std::vector<Eigen::VectorXd> null;
    for (int k = 0; k < kBlock; ++k)
        if (std::abs(eig.eigenvalues()[k]) < 1e-9 * anorm) null.push_back(Z * eig.eigenvectors().col(k));
    Eigen::VectorXd rhs = f;
    for (const auto& z : null) {
        const double c = z.dot(f);
        if (std::abs(c) > 1e-6 * f.norm()) throw SolverError("fem_robin_energy: alpha is at a Steklov eigenvalue and the load is incompatible");
        rhs -= c * z;
    }
    Eigen::VectorXd u = lu.solve(rhs);
    for (const auto& z : null) u -= z.dot(u) * z;
    return u;
}

}  // namespace

int Mesh::node(int ring, int angle) const
{
    if (ring == 0) return 0;
    const int a = ((angle % angles) + angles) % angles;
    return 1 + (ring - 1) * angles + a;
}

Mesh polar_mesh(const Domain& d, int rings, int angles)
{
    if (d.dim() != 2 || d.kind() == DomainKind::Annulus) throw ValidationError("polar_mesh: requires a simply connected planar domain");
    if (rings < 1 || angles < 8) throw ValidationError("polar_mesh: need rings >= 1 and angles >= 8");
    Mesh m;
    m.rings = rings;
    m.angles = angles;
    m.x.push_back(0.0);
    m.y.push_back(0.0);
    for (int j = 1; j <= rings; ++j)
        for (int i = 0; i < angles; ++i) {
            const double th = 2.0 * kPi * i / angles;
            const double r = static_cast<double>(j) / rings * d.rho(th, 0);
            m.x.push_back(r * std::cos(th));
            m.y.push_back(r * std::sin(th));
        }
    for (int i = 0; i < angles; ++i) m.triangles.push_back({0, m.node(1, i), m.node(1, i + 1)});
    for (int j = 1; j < rings; ++j)
        for (int i = 0; i < angles; ++i) {
            const int a = m.node(j, i), b = m.node(j + 1, i), c = m.node(j + 1, i + 1), e = m.node(j, i + 1);
            m.triangles.push_back({a, b, c});
            m.triangles.push_back({a, c, e});
        }
    for (int i = 0; i < angles; ++i) m.boundary.push_back(m.node(rings, i));
    m.h_max = max_edge(m);
    return m;
}

Mesh square_mesh(double side, int cells)
{
    if (!(side > 0.0) || cells < 2) throw ValidationError("square_mesh: need side > 0 and cells >= 2");
    Mesh m;
    const int n = cells + 1;
    const double h = side / cells;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            m.x.push_back(-0.5 * side + i * h);
            m.y.push_back(-0.5 * side + j * h);
        }
    auto id = [n](int i, int j) { return j * n + i; };
    for (int j = 0; j < cells; ++j)
        for (int i = 0; i < cells; ++i) {
            m.triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            m.triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }
    // Boundary in counter-clockwise order.
    for (int i = 0; i < cells; ++i) m.boundary.push_back(id(i, 0));
    for (int j = 0; j < cells; ++j) m.boundary.push_back(id(cells, j));
    for (int i = cells; i > 0; --i) m.boundary.push_back(id(i, cells));
    for (int j = cells; j > 0; --j) m.boundary.push_back(id(0, j));
    m.h_max = max_edge(m);
    return m;
}

Assembly assemble(const Mesh& m, kernels::Exec exec)
{
    const int ne = static_cast<int>(m.triangles.size());
    Assembly as;
    as.stiffness_values.assign(9 * static_cast<std::size_t>(ne), 0.0);
    std::vector<double> area(ne);
    kernels::for_each_index(ne, exec, [&](int e) {
        const auto& t = m.triangles[e];
        const double x0 = m.x[t[0]], y0 = m.y[t[0]];
        const double x1 = m.x[t[1]], y1 = m.y[t[1]];
        const double x2 = m.x[t[2]], y2 = m.y[t[2]];
        const double det = (x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0);
        const double A = 0.5 * std::abs(det);
        // ∇φ_a = (y_b − y_c, x_c − x_b)/det
        const double gx[3] = {(y1 - y2) / det, (y2 - y0) / det, (y0 - y1) / det};
        const double gy[3] = {(x2 - x1) / det, (x0 - x2) / det, (x1 - x0) / det};
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) as.stiffness_values[9 * e + 3 * a + b] = A * (gx[a] * gx[b] + gy[a] * gy[b]);
        area[e] = A;
    });
    as.load.assign(m.size(), 0.0);
    for (int e = 0; e < ne; ++e)
        for (int a = 0; a < 3; ++a) as.load[m.triangles[e][a]] += area[e] / 3.0;
    return as;
}

FemSolution fem_robin_energy(const Domain& d, double alpha, const FemOptions& opt)
{
    if (opt.levels < 1) throw ValidationError("fem_robin_energy: need at least one level");
    FemSolution sol;
    for (int l = 0; l < opt.levels; ++l) {
        const int scale = 1 << l;
        Mesh m = polar_mesh(d, opt.base_rings * scale, opt.base_angles * scale);
        const Assembly as = assemble(m, opt.exec);
        const SpMat A = stiffness_matrix(m, as) - alpha * boundary_mass(d, m);
        const Eigen::Map<const Eigen::VectorXd> f(as.load.data(), m.size());
        Eigen::SparseLU<SpMat> lu;
        lu.analyzePattern(A);
        lu.factorize(A);
        if (lu.info() != Eigen::Success) throw SolverError("fem_robin_energy: factorisation failed (alpha near a Steklov eigenvalue)");
        const Eigen::VectorXd u = resonant_safe_solve(A, lu, f);
        sol.level_values.push_back(-f.dot(u));
        if (l + 1 == opt.levels) {
            sol.boundary_residual = (A * u - f).cwiseAbs().maxCoeff();
            sol.values.assign(u.data(), u.data() + u.size());
            sol.h_max = m.h_max;
            sol.mesh = std::move(m);
        }
    }
    const Richardson r = extrapolate(sol.level_values);
    sol.energy = r.value;
    sol.error = r.error;
    return sol;
}

FemSolution fem_dirichlet_T(const Domain& d, const FemOptions& opt)
{
    if (opt.levels < 1) throw ValidationError("fem_dirichlet_T: need at least one level");
    FemSolution sol;
    for (int l = 0; l < opt.levels; ++l) {
        const int scale = 1 << l;
        Mesh m = polar_mesh(d, opt.base_rings * scale, opt.base_angles * scale);
        const Assembly as = assemble(m, opt.exec);
        const bool last = l + 1 == opt.levels;
        sol.level_values.push_back(dirichlet_level(m, as, last ? &sol.values : nullptr));
        if (last) {
            sol.h_max = m.h_max;
            sol.mesh = std::move(m);
        }
    }
    const Richardson r = extrapolate(sol.level_values);
    sol.energy = r.value;
    sol.error = r.error;
    return sol;
}

FemSolution fem_dirichlet_T_square(double side, int base_cells, int levels)
{
    if (levels < 1) throw ValidationError("fem_dirichlet_T_square: need at least one level");
    FemSolution sol;
    for (int l = 0; l < levels; ++l) {
        Mesh m = square_mesh(side, base_cells << l);
        const Assembly as = assemble(m, kernels::Exec::Parallel);
        const bool last = l + 1 == levels;
        sol.level_values.push_back(dirichlet_level(m, as, last ? &sol.values : nullptr));
        if (last) {
            sol.h_max = m.h_max;
            sol.mesh = std::move(m);
        }
    }
    const Richardson r = extrapolate(sol.level_values);
    sol.energy = r.value;
    sol.error = r.error;
    return sol;
}

double square_torsion_series(double side, int terms)
{
    double s = 0.0;
    for (int m = terms - (terms % 2 == 0 ? 1 : 0); m >= 1; m -= 2)
        for (int n = terms - (terms % 2 == 0 ? 1 : 0); n >= 1; n -= 2) {
            const double m2 = double(m) * m, n2 = double(n) * n;
            s += 1.0 / (m2 * n2 * (m2 + n2));
        }
    return -64.0 * std::pow(side, 4) / std::pow(kPi, 6) * s;
}

// ---------------------------------------------------------------------------

namespace {

double radial_f(int dim, int k, double r, int which)
{
    if (which == 1) return std::pow(r, k);
    if (dim == 2 && k == 0) return std::log(r);
    return std::pow(r, 2 - dim - k);
}

double radial_df(int dim, int k, double r, int which)
{
    if (which == 1) return k == 0 ? 0.0 : k * std::pow(r, k - 1);
    if (dim == 2 && k == 0) return 1.0 / r;
    return (2.0 - dim - k) * std::pow(r, 1 - dim - k);
}

SteklovResidual analytic_residual(const SteklovBasis& basis, int n_modes)
{
    SteklovResidual out;
    const Domain& d = basis.domain();
    const int n = d.dim();
    const double R = d.radius(), ri = d.kappa() * R;
    for (int i = 0; i < n_modes; ++i) {
        const SteklovMode& m = basis.modes()[i];
        double res;
        if (d.kind() == DomainKind::Ball) {
            // φ = amp (r/R)^k Y: ∂rφ = (k/R) amp Y on ∂B_R.
            res = std::abs(m.degree / R * m.outer_amp - m.mu * m.outer_amp);
        } else {
            const double dout = m.c1 * radial_df(n, m.degree, R, 1) + m.c2 * radial_df(n, m.degree, R, 2);
            const double din = m.c1 * radial_df(n, m.degree, ri, 1) + m.c2 * radial_df(n, m.degree, ri, 2);
            const double out_val = m.c1 * radial_f(n, m.degree, R, 1) + m.c2 * radial_f(n, m.degree, R, 2);
            const double in_val = m.c1 * radial_f(n, m.degree, ri, 1) + m.c2 * radial_f(n, m.degree, ri, 2);
            res = std::max(std::abs(dout - m.mu * out_val), std::abs(-din - m.mu * in_val));
        }
        out.per_mode.push_back(res);
        out.max_residual = std::max(out.max_residual, res);
    }
    return out;
}

}  // namespace

SteklovResidual steklov_residual(const SteklovBasis& basis, int n_modes, const FemOptions& opt)
{
    if (n_modes < 1 || n_modes > basis.count()) throw ValidationError("steklov_residual: mode count out of range");
    if (basis.source() == BasisSource::Analytic) return analytic_residual(basis, n_modes);

    const Domain& d = basis.domain();
    std::vector<kernels::TrigInterpolant> interp;
    for (int i = 0; i < n_modes; ++i) {
        const Eigen::VectorXd col = basis.traces().col(i);
        interp.push_back(kernels::trig_interpolant({col.data(), static_cast<std::size_t>(col.size())}));
    }
    const int coarse = opt.base_angles;
    // flux[l][i][c] at the coarse boundary nodes c.
    std::vector<std::vector<std::vector<double>>> flux(opt.levels, std::vector<std::vector<double>>(n_modes));
    for (int l = 0; l < opt.levels; ++l) {
        const int scale = 1 << l;
        const Mesh m = polar_mesh(d, opt.base_rings * scale, opt.base_angles * scale);
        const Assembly as = assemble(m, opt.exec);
        const SpMat K = stiffness_matrix(m, as);
        const Partition p = partition(m);
        const int ni = static_cast<int>(p.interior.size());
        const int nb = m.angles;
        std::vector<int> bmap(m.size(), -1);
        for (int b = 0; b < nb; ++b) bmap[m.boundary[b]] = b;
        const SpMat KII = restrict_rows_cols(K, p.local, p.local, ni, ni);
        const SpMat KIB = restrict_rows_cols(K, p.local, bmap, ni, nb);
        const SpMat KBI = restrict_rows_cols(K, bmap, p.local, nb, ni);
        const SpMat KBB = restrict_rows_cols(K, bmap, bmap, nb, nb);
        const SpMat MB = restrict_rows_cols(boundary_mass(d, m), bmap, bmap, nb, nb);
        Eigen::SimplicialLLT<SpMat> llt(KII);
        Eigen::SimplicialLLT<SpMat> mass(MB);
        if (llt.info() != Eigen::Success || mass.info() != Eigen::Success)
            throw SolverError("steklov_residual: factorisation failed");
        for (int i = 0; i < n_modes; ++i) {
            Eigen::VectorXd g(nb);
            for (int b = 0; b < nb; ++b) g[b] = interp[i](2.0 * kPi * b / nb);
            const Eigen::VectorXd u = llt.solve(-(KIB * g));
            // Variationally consistent flux: ∮ψ_b ∂νu = (K u)_b.
            const Eigen::VectorXd q = mass.solve(KBI * u + KBB * g);
            flux[l][i].resize(coarse);
            for (int c = 0; c < coarse; ++c) flux[l][i][c] = q[c * scale];
        }
    }
    SteklovResidual out;
    for (int i = 0; i < n_modes; ++i) {
        double res = 0.0;
        for (int c = 0; c < coarse; ++c) {
            std::vector<double> lv(opt.levels);
            for (int l = 0; l < opt.levels; ++l) lv[l] = flux[l][i][c];
            const double q = extrapolate(lv).value;
            res = std::max(res, std::abs(q - basis.mu(i) * interp[i](2.0 * kPi * c / coarse)));
        }
        out.per_mode.push_back(res);
        out.max_residual = std::max(out.max_residual, res);
    }
    return out;
}

}  // namespace robinlab::fem
