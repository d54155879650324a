#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "robinlab/geometry.hpp"

namespace robinlab {

class LayerPotential2D;

/// Resonance window |μ_i − α| < 1e−9·max(1,|α|).
[[nodiscard]] double resonance_tolerance(double alpha);

enum class BasisSource { Analytic, Numeric };

/// One Steklov eigenpair. For analytic bases the boundary trace on the sphere
/// of radius r is amp(r)·Y(θ) with Y an L²(S^{n−1})-normalised spherical
/// harmonic of degree `degree`; `slot` enumerates the harmonics of that
/// degree (in 2-D: 0 = cos, 1 = sin).
struct SteklovMode {
    double mu = 0.0;
    int degree = 0;
    int slot = 0;
    bool radial_branch = false;   // annulus: second eigenvalue of the degree-k pencil
    double outer_amp = 0.0;       // trace factor on the outer sphere
    double inner_amp = 0.0;       // trace factor on the inner sphere (annulus)
    double c1 = 0.0, c2 = 0.0;    // annulus radial profile c1 f1(r) + c2 f2(r)
};

/// Ordered Steklov eigenpairs (with multiplicity) of a domain.
class SteklovBasis {
public:
    SteklovBasis() = default;

    [[nodiscard]] const Domain& domain() const { return *domain_; }
    [[nodiscard]] BasisSource source() const { return source_; }
    [[nodiscard]] int count() const { return static_cast<int>(modes_.size()); }
    [[nodiscard]] const std::vector<SteklovMode>& modes() const { return modes_; }
    [[nodiscard]] double mu(int i) const { return modes_.at(i).mu; }
    /// First eigenvalue not included in the basis (used for tail bounds).
    [[nodiscard]] double mu_next() const { return mu_next_; }

    /// Boundary traces at the quadrature grid (2-D bases only): traces()(j, i) = φ_i(x_j).
    [[nodiscard]] bool has_traces() const { return traces_.size() > 0; }
    [[nodiscard]] const BoundaryGrid& grid() const { return *grid_; }
    [[nodiscard]] const Eigen::MatrixXd& traces() const { return traces_; }

    /// φ_i at an interior point (2-D bases only).
    [[nodiscard]] double evaluate(int i, double x, double y) const;

    /// ∮ φ_i f dS for nodal boundary data f on the grid.
    [[nodiscard]] std::vector<double> project(std::span<const double> f) const;

    [[nodiscard]] double orthonormality_residual() const { return orthonormality_residual_; }
    /// max_i ‖Dφ_i − μ_iφ_i‖_∞ for the unsymmetrised discrete DtN map (numeric), 0 for analytic.
    [[nodiscard]] double eigen_residual() const { return eigen_residual_; }
    /// Layer-potential discretisation backing a numeric basis.
    [[nodiscard]] const LayerPotential2D& layer() const { return *layer_; }
    [[nodiscard]] bool has_layer() const { return static_cast<bool>(layer_); }
    [[nodiscard]] std::shared_ptr<const LayerPotential2D> layer_ptr() const { return layer_; }
    [[nodiscard]] std::shared_ptr<const BoundaryGrid> grid_ptr() const { return grid_; }

private:
    friend SteklovBasis spectrum_ball(int, double, int, int);
    friend SteklovBasis spectrum_annulus(int, double, double, int);
    friend SteklovBasis spectrum_star2d(const Domain&, int, int);

    std::shared_ptr<const Domain> domain_;
    BasisSource source_ = BasisSource::Analytic;
    std::vector<SteklovMode> modes_;
    double mu_next_ = 0.0;
    std::shared_ptr<const BoundaryGrid> grid_;
    Eigen::MatrixXd traces_;
    std::shared_ptr<const LayerPotential2D> layer_;
    Eigen::MatrixXd densities_;            // numeric: ψ per mode (columns)
    Eigen::VectorXd constants_;
    double orthonormality_residual_ = 0.0;
    double eigen_residual_ = 0.0;
};

/// Ball B_R ⊂ R^n: μ = k/R for k = 0..k_max with multiplicity of degree-k
/// harmonics. In 2-D, traces are sampled on `nodes` boundary points.
[[nodiscard]] SteklovBasis spectrum_ball(int dim, double radius, int k_max, int nodes = 256);

/// Annulus κR < |x| < R: μ = 0, the radial eigenvalue μ_r, and two
/// eigenvalues per degree 1..k_max from 2×2 pencils.
[[nodiscard]] SteklovBasis spectrum_annulus(int dim, double radius, double kappa, int k_max);

/// Radial eigenvalue μ_r of the annulus (root of the radial 2×2 determinant).
[[nodiscard]] double annulus_radial_eigenvalue(int dim, double radius, double kappa);

/// First n_modes eigenpairs of the discrete DtN map of a Star2D domain
/// (M = nodes ≥ 8·n_modes).
[[nodiscard]] SteklovBasis spectrum_star2d(const Domain& d, int n_modes, int nodes);
[[nodiscard]] inline SteklovBasis spectrum_star2d(const Domain& d, int n_modes)
{
    return spectrum_star2d(d, n_modes, d.quadrature_nodes());
}

/// Basis for any domain kind with sensible defaults.
[[nodiscard]] SteklovBasis steklov_basis(const Domain& d, int n_modes);

enum class ExpansionStatus { Unique, Family, NoSolution };
[[nodiscard]] std::string to_string(ExpansionStatus s);

/// h = Σ h_i φ_i solving Δh = 0, ∂νh = αh + g.
struct HarmonicExpansion {
    std::vector<double> coefficients;
    std::vector<int> resonant;          // indices with μ_i = α
    ExpansionStatus status = ExpansionStatus::Unique;
};

/// Tolerance below which a projection counts as zero for the compatibility test.
[[nodiscard]] double compatibility_tolerance(std::span<const double> projections);

/// g given by its projections g_i = ∮ φ_i g dS.
[[nodiscard]] HarmonicExpansion expand_harmonic(const SteklovBasis& basis, double alpha,
                                                std::span<const double> projections);

/// g given by nodal values on the basis grid.
[[nodiscard]] HarmonicExpansion expand_harmonic_nodal(const SteklovBasis& basis, double alpha,
                                                      std::span<const double> g);

/// Table row for export: index, degree label, μ, orthonormality residual.
struct SpectrumRow {
    int index;
    int degree;
    double mu;
    double residual;
};
[[nodiscard]] std::vector<SpectrumRow> spectrum_table(const SteklovBasis& basis);

}  // namespace robinlab
