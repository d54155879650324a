#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace robinlab {

/// Raised when inputs violate a documented precondition.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a numerical solve fails (singular system, resonance, ...).
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr double kPi = 3.14159265358979323846;

/// Real trigonometric polynomial p(θ) = Σ a_k cos kθ + Σ b_k sin kθ.
/// sin_coeffs[0] is ignored.
struct TrigPolynomial {
    std::vector<double> cos_coeffs;
    std::vector<double> sin_coeffs;

    static TrigPolynomial constant(double c) { return {{c}, {0.0}}; }

    [[nodiscard]] int degree() const;
    [[nodiscard]] double operator()(double theta) const { return derivative(theta, 0); }
    /// d^order p / dθ^order
    [[nodiscard]] double derivative(double theta, int order) const;
    [[nodiscard]] TrigPolynomial scaled(double factor) const;
};

enum class DomainKind { Ball, Annulus, Star2D };

[[nodiscard]] std::string to_string(DomainKind kind);

/// Computational domain. Ball and Annulus are centred at the origin; a Star2D
/// domain has boundary r = R·p(θ) for a positive trigonometric polynomial p.
class Domain {
public:
    static Domain ball(int dim, double radius);
    static Domain annulus(int dim, double radius, double kappa);
    static Domain star2d(TrigPolynomial shape, double scale = 1.0, int quadrature_nodes = 256);

    [[nodiscard]] DomainKind kind() const { return kind_; }
    [[nodiscard]] int dim() const { return dim_; }
    /// Outer radius (Ball, Annulus) or the scale factor R of ρ = R·p (Star2D).
    [[nodiscard]] double radius() const { return radius_; }
    [[nodiscard]] double kappa() const { return kappa_; }
    [[nodiscard]] const TrigPolynomial& shape() const { return shape_; }
    [[nodiscard]] int quadrature_nodes() const { return nodes_; }

    /// Boundary radius ρ(θ) and its θ-derivatives (Star2D, or a 2-D ball).
    [[nodiscard]] double rho(double theta, int order = 0) const;

    [[nodiscard]] Domain with_quadrature_nodes(int nodes) const;

private:
    Domain() = default;

    DomainKind kind_ = DomainKind::Ball;
    int dim_ = 2;
    double radius_ = 1.0;
    double kappa_ = 0.0;
    TrigPolynomial shape_ = TrigPolynomial::constant(1.0);
    int nodes_ = 256;
};

/// Boundary sampled at M equispaced parameter values θ_j = 2πj/M
/// (counter-clockwise). Weights are arclength trapezoid weights.
struct BoundaryGrid {
    std::vector<double> theta;
    std::vector<double> x, y;
    std::vector<double> nx, ny;       // outward unit normal
    std::vector<double> speed;        // |dx/dθ|
    std::vector<double> curvature;    // signed, 1/R on a circle
    std::vector<double> weight;       // speed·2π/M

    [[nodiscard]] int size() const { return static_cast<int>(theta.size()); }
    [[nodiscard]] double integrate(std::span<const double> f) const;
};

/// Grid for a Star2D domain or a 2-D ball.
[[nodiscard]] BoundaryGrid boundary_grid(const Domain& d, int nodes);
[[nodiscard]] inline BoundaryGrid boundary_grid(const Domain& d) { return boundary_grid(d, d.quadrature_nodes()); }

struct QuadratureEstimate {
    double value = 0.0;
    double error = 0.0;   // |Q_M − Q_{M/2}|; zero for closed forms
};

[[nodiscard]] double unit_sphere_area(int dim);       // |S^{n−1}|
[[nodiscard]] double ball_volume(int dim, double radius);
[[nodiscard]] double sphere_area(int dim, double radius);

[[nodiscard]] QuadratureEstimate volume_estimate(const Domain& d);
[[nodiscard]] QuadratureEstimate surface_area_estimate(const Domain& d);
[[nodiscard]] inline double volume(const Domain& d) { return volume_estimate(d).value; }
[[nodiscard]] inline double surface_area(const Domain& d) { return surface_area_estimate(d).value; }

/// Radius of the ball with the same volume as d.
[[nodiscard]] double equal_volume_radius(const Domain& d);

/// Locates a boundary point: θ for Star2D / 2-D balls; component 0 is the
/// outer sphere and component 1 the inner sphere of an annulus.
struct BoundaryPoint {
    double theta = 0.0;
    int component = 0;
};

/// Mean curvature with the convention H(∂B_R) = 1/R (outward normal). The
/// inner sphere of an annulus has H = −1/(κR).
[[nodiscard]] double mean_curvature(const Domain& d, BoundaryPoint p = {});

/// Planar isoperimetric defect y² = 1 − 4πA/L².
[[nodiscard]] double surface_defect(const Domain& d);

/// ∫_Ω x dx and ∮ x dS (2-D only), used for barycentres.
struct PlanarMoments {
    double area = 0.0, perimeter = 0.0;
    double vol_x = 0.0, vol_y = 0.0;        // ∫ x_i dx
    double bnd_x = 0.0, bnd_y = 0.0;        // ∮ x_i dS
    double bnd_r2 = 0.0;                    // ∮ |x|² dS
};
[[nodiscard]] PlanarMoments planar_moments(const Domain& d);

// ---------------------------------------------------------------------------
// Perturbation fields on the ball

enum class SecondOrderMode { None, Compensating, Explicit };

[[nodiscard]] std::string to_string(SecondOrderMode mode);
[[nodiscard]] SecondOrderMode second_order_mode_from_string(const std::string& s);

/// Normal speed (v·ν) = Σ b_i φ_i in the ordered Steklov boundary basis of
/// the ball (b[0] is the coefficient of the constant mode φ₁).
struct PerturbationField {
    std::vector<double> b;
    SecondOrderMode w_mode = SecondOrderMode::Compensating;
    /// (w·ν) coefficients in the same basis, used when w_mode == Explicit.
    std::vector<double> w_coeffs;
    double t_max = 0.05;
};

/// Degree k_i of the i-th (0-based) ball basis function in dimension n.
[[nodiscard]] int ball_mode_degree(int dim, int index);
/// Number of ball basis functions of degree ≤ k_max.
[[nodiscard]] int ball_mode_count(int dim, int k_max);
/// Dimension of the space of degree-k spherical harmonics in R^n.
[[nodiscard]] long harmonic_dimension(int dim, int k);

/// Constant (w·ν) that satisfies (n−1)∮H(v·ν)² + ∮(w·ν) = 0 on ∂B_R.
[[nodiscard]] double compensating_w_normal(const PerturbationField& p, const Domain& ball);

struct VolumeCheck {
    int order = 1;
    bool passed = false;
    double residual = 0.0;
};

/// order 1: b₁ = 0; order 2: (n−1)∮H(v·ν)² + ∮(w·ν) = 0. d must be a ball.
[[nodiscard]] VolumeCheck check_volume_preserving(const PerturbationField& p, const Domain& d, int order,
                                                   double tol = 1e-12);

using PlanarField = std::function<std::array<double, 2>(double, double)>;

/// Same checks for explicit planar vector fields v, w on a 2-D ball: the first
/// and second t-derivatives of |(I + tv + (t²/2)w)(B)| at t = 0. Tangential
/// parts of v are allowed.
[[nodiscard]] VolumeCheck check_volume_preserving(const PlanarField& v, const PlanarField& w, const Domain& d,
                                                   int order, double tol = 1e-12);

// ---------------------------------------------------------------------------
// Named planar shapes

/// Ellipse x = R cosθ/(1+t), y = (1+t) R sinθ written as a Star2D domain;
/// the radial function is expanded in cosines to machine precision.
[[nodiscard]] Domain make_ellipse(double radius, double t, int quadrature_nodes = 256);

/// ρ_t = R λ(t) (1 + t η(θ)) with λ(t) chosen so that |Ω_t| = πR².
[[nodiscard]] Domain volume_corrected_star(const TrigPolynomial& eta, double radius, double t,
                                           int quadrature_nodes = 256);

struct StarCorpusOptions {
    int count = 20;
    std::uint64_t seed = 1;
    double amplitude = 0.04;      // each coefficient uniform in [−amplitude, amplitude]
    int k_min = 2, k_max = 4;
    double radius = 1.0;
    int quadrature_nodes = 256;
};

/// ρ = R(1 + Σ_{k_min ≤ k ≤ k_max} a_k cos kθ + b_k sin kθ) drawn from mt19937_64.
[[nodiscard]] std::vector<Domain> random_star_corpus(const StarCorpusOptions& opt);

}  // namespace robinlab
