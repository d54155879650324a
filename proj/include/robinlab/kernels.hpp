#pragma once

// Data-parallel inner loops. Each kernel has a serial reference version that
// the tests compare against; the parallel versions write disjoint output
// slots only, so results are bit-identical for any thread count.

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace robinlab {

struct BoundaryGrid;

namespace kernels {

enum class Exec { Serial, Parallel };

/// Caps OpenMP parallelism from ROBINLAB_THREADS (if set). Returns the cap in
/// effect, 0 meaning "runtime default".
int apply_thread_cap_from_env();

/// Pairwise (cascade) summation; order is fixed by the input length.
[[nodiscard]] double pairwise_sum(std::span<const double> v);

/// Σ a_i b_i with pairwise accumulation.
[[nodiscard]] double pairwise_dot(std::span<const double> a, std::span<const double> b);

/// Kress logarithmic quadrature weights R_j(0) for 2N = M equispaced nodes:
/// ∫₀^{2π} log(4 sin²((t−τ)/2)) f(τ) dτ ≈ Σ_j w[(i−j) mod M] f(t_j).
[[nodiscard]] std::vector<double> kress_log_weights(int nodes);

/// Single-layer operator on the grid acting on ψ = σ|x'| (density times
/// speed), with G(x,y) = −(1/2π) log|x−y|.
[[nodiscard]] Eigen::MatrixXd single_layer_matrix(const BoundaryGrid& g, Exec exec = Exec::Parallel);

/// Adjoint double-layer K' acting on ψ, with the trapezoid weight included:
/// (K'ψ)_i = Σ_j K_ij ψ_j ≈ ∫ ∂ν_x G(x_i, y) σ(y) ds_y.
[[nodiscard]] Eigen::MatrixXd adjoint_double_layer_matrix(const BoundaryGrid& g, Exec exec = Exec::Parallel);

/// Evaluates Σ_j G(p, x_j) ψ_j · 2π/M at each target point p.
[[nodiscard]] Eigen::MatrixXd single_layer_eval_matrix(const BoundaryGrid& g, std::span<const double> px,
                                                       std::span<const double> py, Exec exec = Exec::Parallel);

/// Row-wise application f(i) for i in [0,n), parallel over i.
template <class F>
void for_each_index(int n, Exec exec, F&& f)
{
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
        for (int i = 0; i < n; ++i) f(i);
    } else {
        for (int i = 0; i < n; ++i) f(i);
    }
}

/// Spectral θ-derivative of periodic samples on an equispaced grid.
[[nodiscard]] std::vector<double> spectral_derivative(std::span<const double> f);

/// Trigonometric interpolant of equispaced periodic samples.
struct TrigInterpolant {
    std::vector<double> a, b;   // f(θ) = Σ a_k cos kθ + b_k sin kθ

    [[nodiscard]] double operator()(double theta) const;
};
[[nodiscard]] TrigInterpolant trig_interpolant(std::span<const double> f);

}  // namespace kernels
}  // namespace robinlab
