#include "robinlab/layer_potential.hpp"

#include <cmath>

namespace robinlab {

LayerPotential2D::LayerPotential2D(const Domain& d, kernels::Exec exec)
{
    build(d, d.quadrature_nodes(), exec);
}

LayerPotential2D::LayerPotential2D(const Domain& d, int nodes, kernels::Exec exec) { build(d, nodes, exec); }

void LayerPotential2D::build(const Domain& d, int nodes, kernels::Exec exec)
{
    exec_ = exec;
    grid_ = boundary_grid(d, nodes);
    const int M = grid_.size();
    const double h = 2.0 * kPi / M;
    single_ = kernels::single_layer_matrix(grid_, exec);
    flux_ = kernels::adjoint_double_layer_matrix(grid_, exec);
    for (int i = 0; i < M; ++i) flux_(i, i) += 0.5 / grid_.speed[i];

    Eigen::MatrixXd aug(M + 1, M + 1);
    aug.topLeftCorner(M, M) = single_;
    aug.topRightCorner(M, 1).setOnes();
    aug.bottomLeftCorner(1, M).setConstant(h);
    aug(M, M) = 0.0;
    dirichlet_lu_.compute(aug);

    // D = (½ diag(1/|x'|) + K') · P, P = density block of the augmented inverse.
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(M + 1, M);
    rhs.topRows(M).setIdentity();
    const Eigen::MatrixXd inv = dirichlet_lu_.solve(rhs);
    dtn_ = flux_ * inv.topRows(M);
}

LayerDensity LayerPotential2D::solve_dirichlet(std::span<const double> f) const
{
    const int M = size();
    if (static_cast<int>(f.size()) != M) throw ValidationError("solve_dirichlet: data size mismatch");
    Eigen::VectorXd rhs(M + 1);
    for (int i = 0; i < M; ++i) rhs[i] = f[i];
    rhs[M] = 0.0;
    const Eigen::VectorXd sol = dirichlet_lu_.solve(rhs);
    return {sol.head(M), sol[M]};
}

Eigen::VectorXd LayerPotential2D::normal_derivative(const LayerDensity& density) const
{
    return flux_ * density.psi;
}

LayerDensity LayerPotential2D::solve_robin(double alpha, std::span<const double> g) const
{
    const int M = size();
    if (static_cast<int>(g.size()) != M) throw ValidationError("solve_robin: data size mismatch");
    const double h = 2.0 * kPi / M;
    Eigen::MatrixXd A(M + 1, M + 1);
    A.topLeftCorner(M, M) = flux_ - alpha * single_;
    A.topRightCorner(M, 1).setConstant(-alpha);
    A.bottomLeftCorner(1, M).setConstant(h);
    A(M, M) = 0.0;
    Eigen::VectorXd rhs(M + 1);
    for (int i = 0; i < M; ++i) rhs[i] = g[i];
    rhs[M] = 0.0;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
    // Near a Steklov eigenvalue the discrete operator is close to singular.
    if (lu.rcond() < 1e-13) throw SolverError("solve_robin: system is singular (alpha near a Steklov eigenvalue)");
    const Eigen::VectorXd sol = lu.solve(rhs);
    return {sol.head(M), sol[M]};
}

Eigen::VectorXd LayerPotential2D::trace(const LayerDensity& density) const
{
    return (single_ * density.psi).array() + density.constant;
}

std::vector<double> LayerPotential2D::evaluate(const LayerDensity& density, std::span<const double> px,
                                               std::span<const double> py) const
{
    const Eigen::MatrixXd E = kernels::single_layer_eval_matrix(grid_, px, py, exec_);
    const Eigen::VectorXd v = (E * density.psi).array() + density.constant;
    return {v.data(), v.data() + v.size()};
}

}  // namespace robinlab
