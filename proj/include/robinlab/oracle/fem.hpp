#pragma once

// Piecewise-linear finite elements on structured polar meshes of Star2D
// domains. Independent of the boundary-integral code: only the Domain
// geometry is shared.

#include <array>
#include <vector>

#include "robinlab/geometry.hpp"
#include "robinlab/kernels.hpp"
#include "robinlab/steklov.hpp"

namespace robinlab::fem {

struct Mesh {
    int rings = 0, angles = 0;
    std::vector<double> x, y;
    std::vector<std::array<int, 3>> triangles;
    std::vector<int> boundary;          // boundary node ids in angular order
    double h_max = 0.0;

    [[nodiscard]] int node(int ring, int angle) const;   // ring 0 is the centre
    [[nodiscard]] int size() const { return static_cast<int>(x.size()); }
};

/// Centre node plus `rings` rings of `angles` nodes at (j/rings)·ρ(θ_i).
[[nodiscard]] Mesh polar_mesh(const Domain& d, int rings, int angles);

/// Structured triangulation of the square [−a/2, a/2]² with cells² cells.
[[nodiscard]] Mesh square_mesh(double side, int cells);

struct FemOptions {
    int base_rings = 16;
    int base_angles = 64;
    int levels = 3;
    kernels::Exec exec = kernels::Exec::Parallel;
};

struct FemSolution {
    Mesh mesh;                          // finest level
    std::vector<double> values;         // finest level nodal values
    std::vector<double> level_values;   // E (or T) per level
    double energy = 0.0;                // Richardson-extrapolated
    double error = 0.0;                 // |last extrapolation − previous|
    double boundary_residual = 0.0;     // weak Robin residual on the finest level
    double h_max = 0.0;
};

/// Δu + 1 = 0, ∂νu = αu; energy −∫u. Throws SolverError near resonance.
[[nodiscard]] FemSolution fem_robin_energy(const Domain& d, double alpha, const FemOptions& opt = {});

/// Δs + 1 = 0, s = 0; result energy field holds T = −∫s.
[[nodiscard]] FemSolution fem_dirichlet_T(const Domain& d, const FemOptions& opt = {});
[[nodiscard]] FemSolution fem_dirichlet_T_square(double side, int base_cells = 32, int levels = 3);

/// Series value of T for the square: −(64a⁴/π⁶) Σ_{m,n odd} 1/(m²n²(m²+n²)).
[[nodiscard]] double square_torsion_series(double side, int terms = 2000);

/// Sparse stiffness and load assembly; serial and parallel paths give
/// identical matrices.
struct Assembly {
    std::vector<double> stiffness_values;   // 9 per triangle, row-major local blocks
    std::vector<double> load;               // ∫φ_i dx
};
[[nodiscard]] Assembly assemble(const Mesh& m, kernels::Exec exec);

struct SteklovResidual {
    double max_residual = 0.0;
    std::vector<double> per_mode;
};

/// max over boundary nodes of |∂νφ_i − μ_iφ_i|, with ∂νφ_i recomputed from a
/// FEM harmonic extension (numeric bases) or exactly (analytic bases).
[[nodiscard]] SteklovResidual steklov_residual(const SteklovBasis& basis, int n_modes, const FemOptions& opt = {});

}  // namespace robinlab::fem
