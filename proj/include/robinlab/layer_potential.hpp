#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "robinlab/geometry.hpp"
#include "robinlab/kernels.hpp"

namespace robinlab {

/// Harmonic function u = Sσ + c on a smooth planar domain, with ∮σ dS = 0.
/// The added constant keeps the representation complete when the
/// logarithmic capacity of ∂Ω equals one (e.g. the unit disc).
struct LayerDensity {
    Eigen::VectorXd psi;   // σ|x'| at the grid nodes
    double constant = 0.0;
};

/// Nyström discretisation of the interior Laplace problem on a Star2D
/// boundary: periodic trapezoid rule with Kress splitting of the
/// logarithmic kernel.
class LayerPotential2D {
public:
    explicit LayerPotential2D(const Domain& d, kernels::Exec exec = kernels::Exec::Parallel);
    LayerPotential2D(const Domain& d, int nodes, kernels::Exec exec = kernels::Exec::Parallel);

    [[nodiscard]] const BoundaryGrid& grid() const { return grid_; }
    [[nodiscard]] int size() const { return grid_.size(); }

    /// Density reproducing Dirichlet data f.
    [[nodiscard]] LayerDensity solve_dirichlet(std::span<const double> f) const;

    /// Interior normal derivative ∂ν(Sσ) = ½σ + K'σ at the nodes.
    [[nodiscard]] Eigen::VectorXd normal_derivative(const LayerDensity& density) const;

    /// Discrete Dirichlet-to-Neumann map.
    [[nodiscard]] const Eigen::MatrixXd& dtn() const { return dtn_; }

    /// Harmonic u with ∂νu − αu = g on the boundary. Throws SolverError if
    /// the system is numerically singular.
    [[nodiscard]] LayerDensity solve_robin(double alpha, std::span<const double> g) const;

    /// Boundary trace Sσ + c.
    [[nodiscard]] Eigen::VectorXd trace(const LayerDensity& density) const;

    /// Interior values (accurate away from the boundary: distance ≳ 5·h).
    [[nodiscard]] std::vector<double> evaluate(const LayerDensity& density, std::span<const double> px,
                                               std::span<const double> py) const;

private:
    void build(const Domain& d, int nodes, kernels::Exec exec);

    BoundaryGrid grid_;
    Eigen::MatrixXd single_;      // S
    Eigen::MatrixXd flux_;        // ½ diag(1/|x'|) + K'
    Eigen::PartialPivLU<Eigen::MatrixXd> dirichlet_lu_;
    Eigen::MatrixXd dtn_;
    kernels::Exec exec_ = kernels::Exec::Parallel;
};

}  // namespace robinlab
