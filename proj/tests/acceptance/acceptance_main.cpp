// Acceptance suite: one line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "robinlab/io.hpp"
#include "robinlab/oracle/fem.hpp"
#include "robinlab/planar_optimality.hpp"
#include "robinlab/robin_energy.hpp"
#include "robinlab/shape_calculus.hpp"
#include "robinlab/steklov.hpp"

using namespace robinlab;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;
};

std::string fmt(const char* f, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

// |B_R|(−R²/(n(n+2)) + R/(αn)), written out here rather than taken from the library.
double ball_energy_formula(int n, double R, double alpha)
{
    const double vol = std::pow(kPi, n / 2.0) * std::pow(R, n) / std::tgamma(n / 2.0 + 1.0);
    return vol * (-R * R / (n * (n + 2.0)) + R / (alpha * n));
}

// [−3/(4α) + R(1−αR)/(2(2−αR))]πR³
double ellipse_eddot(double R, double alpha)
{
    return (-3.0 / (4.0 * alpha) + R * (1.0 - alpha * R) / (2.0 * (2.0 - alpha * R))) * kPi * R * R * R;
}

PerturbationField ellipse_field(double R)
{
    PerturbationField p;
    p.b = {0.0, 0.0, 0.0, -R * std::sqrt(kPi * R)};
    return p;
}

const std::vector<double> kFdGrid = {-0.03, -0.02, -0.01, 0.01, 0.02, 0.03};
constexpr int kFitDegree = 4;

// 2·c₂ of the least-squares polynomial of the given degree through (t, E).
double second_derivative_fit(const std::vector<double>& t, const std::vector<double>& E, int degree)
{
    Eigen::MatrixXd V(t.size(), degree + 1);
    Eigen::VectorXd y(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        for (int k = 0; k <= degree; ++k) V(i, k) = std::pow(t[i], k);
        y(i) = E[i];
    }
    const Eigen::VectorXd c = V.colPivHouseholderQr().solve(y);
    return 2.0 * c(2);
}

Outcome criterion1()
{
    double worst = 0.0;
    for (int n : {2, 3})
        for (double R : {1.0, 2.0})
            for (double alpha : {0.5, 1.0, 2.0, -1.0}) {
                const Domain d = Domain::ball(n, R);
                const SteklovBasis b = steklov_basis(d, kDefaultEnergyModes);
                const TorsionSolution ts = solve_torsion(d);
                const double ref = ball_energy_formula(n, R, alpha);
                const EnergyReport rep = energy_series(d, alpha, b, ts);
                if (!rep.E_total) return {false, "series has no solution"};
                worst = std::max(worst, std::abs(*rep.E_total - ref));
                worst = std::max(worst, std::abs(energy_direct(solve_robin_direct(d, alpha)) - ref));
            }
    return {worst <= 1e-10, "max |E - closed form| = " + fmt("%.2e", worst) + " (tol 1e-10)"};
}

Outcome criterion2()
{
    const Domain d = Domain::annulus(3, 1.0, 0.5);
    const SteklovBasis b = steklov_basis(d, kDefaultEnergyModes);
    const TorsionSolution ts = solve_torsion(d);
    std::vector<double> grid = io::parse_grid("0.1:8:50");
    double worst = 0.0;
    for (double alpha : grid) {
        if (std::abs(alpha) < 1e-3 || std::abs(alpha - 5.0) < 1e-3) return {false, "grid touches a pole"};
        const EnergyReport rep = energy_series(d, alpha, b, ts);
        const double direct = energy_direct(solve_robin_direct(d, alpha));
        worst = std::max(worst, std::abs(*rep.E_total - direct) / std::max(1.0, std::abs(direct)));
    }
    const PoleScan scan = pole_scan(d, grid, b, ts);
    std::string poles;
    for (double p : scan.poles) poles += (poles.empty() ? "" : ",") + io::format_double(p);
    const bool ok = worst <= 1e-8 && poles == "0,5";
    return {ok, "50 alphas, max rel diff " + fmt("%.2e", worst) + " (tol 1e-8), poles {" + poles + "}"};
}

Outcome criterion3()
{
    const Domain disc = Domain::star2d(TrigPolynomial::constant(1.0), 1.0, 256);
    const SteklovBasis b = spectrum_star2d(disc, 15, 256);
    double worst = 0.0;
    for (int i = 0; i < 15; ++i) worst = std::max(worst, std::abs(b.mu(i) - (i + 1) / 2));
    const double orth = b.orthonormality_residual();
    return {worst <= 1e-6 && orth < 1e-8,
            "15 modes at M=256: max |mu - k| = " + fmt("%.2e", worst) + " (tol 1e-6), orthonormality " +
                fmt("%.2e", orth) + " (tol 1e-8)"};
}

Outcome criterion4()
{
    Outcome o;
    // (i) d_i route
    double worst = 0.0;
    for (double R : {1.0, 1.5})
        for (double xi : {0.3, 0.9, 1.5, 1.9, 2.1, 2.5, 3.5, 6.5}) {
            const double alpha = xi / R;
            const VariationReport r = second_variation_ball(2, R, alpha, ellipse_field(R));
            worst = std::max(worst, std::abs(r.E_ddot - ellipse_eddot(R, alpha)));
        }
    // Sign flips at αR = 2 and nowhere else on a grid.
    bool sign_ok = true;
    for (double R : {1.0, 1.5})
        for (double xi = 0.05; xi < 6.0; xi += 0.1) {
            if (std::abs(xi - std::round(xi)) < 1e-9) continue;
            const double e = second_variation_ball(2, R, xi / R, ellipse_field(R)).E_ddot;
            sign_ok = sign_ok && ((e < 0.0) == (xi < 2.0));
        }
    for (double R : {1.0, 1.5}) {
        sign_ok = sign_ok && second_variation_ball(2, R, (2.0 - 1e-6) / R, ellipse_field(R)).E_ddot < 0.0;
        sign_ok = sign_ok && second_variation_ball(2, R, (2.0 + 1e-6) / R, ellipse_field(R)).E_ddot > 0.0;
    }
    // (ii) finite differences over the ellipse family
    double fd_series = 0.0, fd_fem = 0.0, worst_series_alpha = 0.0, worst_fem_alpha = 0.0;
    auto family = [](double t) { return make_ellipse(1.0, t, 256); };
    for (double alpha : {0.5, 1.0, 1.5, 2.5, 3.5}) {
        const FiniteDifferenceFit f = finite_difference_check(family, alpha, kFdGrid, EnergyMethod::Series, kFitDegree);
        const double rel = std::abs(f.E_ddot - ellipse_eddot(1.0, alpha)) / std::abs(ellipse_eddot(1.0, alpha));
        if (rel > fd_series) {
            fd_series = rel;
            worst_series_alpha = alpha;
        }
    }
    for (double alpha : {1.0, 2.5}) {
        std::vector<double> E(kFdGrid.size());
        for (std::size_t i = 0; i < kFdGrid.size(); ++i) E[i] = fem::fem_robin_energy(family(kFdGrid[i]), alpha).energy;
        const double eddot = second_derivative_fit(kFdGrid, E, kFitDegree);
        const double rel = std::abs(eddot - ellipse_eddot(1.0, alpha)) / std::abs(ellipse_eddot(1.0, alpha));
        if (rel > fd_fem) {
            fd_fem = rel;
            worst_fem_alpha = alpha;
        }
    }
    o.ok = worst <= 1e-10 && sign_ok && fd_series <= 0.01 && fd_fem <= 0.01;
    o.detail = "d_i route max err " + fmt("%.2e", worst) + " (tol 1e-10), FD series max rel " + fmt("%.2e", fd_series) +
               " at alpha " + fmt("%g", worst_series_alpha) + ", FD FEM max rel " + fmt("%.2e", fd_fem) + " at alpha " +
               fmt("%g", worst_fem_alpha) + " (tol 1e-2), sign flip at 2: " + (sign_ok ? "yes" : "no");
    return o;
}

Outcome criterion5()
{
    long checked = 0, bad = 0;
    for (int n : {2, 3, 4})
        for (int j = 0; j < 200; ++j) {
            const double xi = 0.05 + 0.1 * j;   // never an integer
            const int kp = static_cast<int>(std::floor(xi));
            for (int k = 2; k <= 50; ++k) {
                const double d = d_coefficient(n, k, xi);
                const bool ok = k > kp ? d < 0.0 : d > 0.0;
                ++checked;
                if (!ok) ++bad;
            }
        }
    return {bad == 0, std::to_string(checked) + " (n, xi, k) cases, " + std::to_string(bad) + " violations"};
}

Outcome criterion6()
{
    std::mt19937_64 rng(20240601);
    std::normal_distribution<double> g(0.0, 1.0);
    int checked = 0, bad = 0;
    double worst_margin = -1e300;
    for (int n : {2, 3})
        for (double xi : {0.3, 0.7})
            for (double R : {1.0, 2.0})
                for (int trial = 0; trial < 100; ++trial) {
                    PerturbationField p;
                    const int kmax = 2 + trial % 7;
                    p.b.assign(ball_mode_count(n, kmax), 0.0);
                    for (std::size_t i = n + 1; i < p.b.size(); ++i) p.b[i] = g(rng);   // b₁ = 0, no translations
                    const double alpha = xi / R;
                    const VariationReport r = second_variation_ball(n, R, alpha, p);
                    double vnu2 = 0.0;
                    for (double b : p.b) vnu2 += b * b;
                    const double bound = -((n - 0.5) / (alpha * n * n)) * vnu2;
                    worst_margin = std::max(worst_margin, (r.E_ddot - bound) / std::abs(bound));
                    ++checked;
                    if (!(r.E_ddot <= bound)) ++bad;
                }
    return {bad == 0, std::to_string(checked) + " random fields, " + std::to_string(bad) +
                          " violations, max (E_ddot - bound)/|bound| = " + fmt("%.3f", worst_margin)};
}

Outcome criterion7()
{
    StarCorpusOptions co;
    co.count = 10;
    co.seed = 7;
    co.amplitude = 0.05;
    const std::vector<Domain> corpus = random_star_corpus(co);
    int bad = 0;
    double min_gap = 1e300;
    for (const Domain& d : corpus) {
        const double T = fem::fem_dirichlet_T(d).energy;
        const PWBound b = pw_upper_bound(volume(d), surface_area(d));
        min_gap = std::min(min_gap, b.T_star - T);
        if (!(b.T_star >= T)) ++bad;
    }
    const PWBound disc = pw_upper_bound(kPi, 2.0 * kPi);
    const double eq = std::abs(disc.T_star + kPi / 8.0);
    const double fem_disc =
        std::abs(fem::fem_dirichlet_T(Domain::star2d(TrigPolynomial::constant(1.0), 1.0, 256)).energy - disc.T_star);
    const double g0 = defect_g(0.0), g999 = defect_g(0.999);
    const bool ok = bad == 0 && eq <= 1e-8 && fem_disc <= 1e-8 && g0 == 0.5 && g999 > 1.9 && g999 < 2.0;
    return {ok, "10 domains, " + std::to_string(bad) + " violations, min T_star - T_fem = " + fmt("%.3e", min_gap) +
                    "; disc |T_star - T| = " + fmt("%.1e", eq) + ", |T_fem - T_star| = " + fmt("%.1e", fem_disc) +
                    "; g(0) = " + fmt("%.17g", g0) + ", g(0.999) = " + fmt("%.6f", g999)};
}

Outcome criterion8()
{
    StarCorpusOptions co;
    co.count = 20;
    co.seed = 8;
    co.amplitude = 0.05;
    const std::vector<Domain> corpus = random_star_corpus(co);
    int bad_E = 0, bad_J = 0;
    double worst_E = -1e300, worst_J = -1e300;
    for (const Domain& d : corpus) {
        const SteklovBasis b = steklov_basis(d, kDefaultEnergyModes);
        const TorsionSolution ts = solve_torsion(d, b.layer_ptr());
        const double R = equal_volume_radius(d);
        const double alpha = std::min(1.0 / R, 0.9 * b.mu(1));
        const CorollaryCheck c = corollary_disc_max(d, alpha, b, ts);
        const JCheck j = theorem_J_check(d, alpha, ts.T);
        worst_E = std::max(worst_E, c.E_domain - c.E_ball);
        worst_J = std::max(worst_J, j.J_domain - j.J_ball);
        if (!(c.E_domain <= c.E_ball)) ++bad_E;
        if (!(j.J_domain <= j.J_ball)) ++bad_J;
    }
    return {bad_E == 0 && bad_J == 0, "20 domains: E violations " + std::to_string(bad_E) + ", J violations " +
                                          std::to_string(bad_J) + ", max E - E_ball = " + fmt("%.3e", worst_E) +
                                          ", max J - J_ball = " + fmt("%.3e", worst_J)};
}

Outcome criterion9()
{
    const Domain e = make_ellipse(1.0, 0.1, 256);
    const double T = fem::fem_dirichlet_T(e).energy;
    const double a0 = alpha0(e, T);
    const double lo = j_functional(e, 0.5 * a0, T) - j_functional_equal_ball(e, 0.5 * a0);
    const double hi = j_functional(e, 2.0 * a0, T) - j_functional_equal_ball(e, 2.0 * a0);
    const PWBound b = pw_upper_bound(volume(e), surface_area(e));
    const bool ok = lo < 0.0 && hi > 0.0 && a0 >= b.alpha_threshold;
    return {ok, "alpha0 = " + fmt("%.6f", a0) + " (FEM eps0), threshold (2/R)g = " + fmt("%.6f", b.alpha_threshold) +
                    ", J - J_ball at alpha0/2 = " + fmt("%.3e", lo) + ", at 2 alpha0 = " + fmt("%.3e", hi)};
}

Outcome criterion10()
{
    std::mt19937_64 rng(10);
    std::normal_distribution<double> g(0.0, 1.0);
    double analytic = 0.0, fitted = 0.0;
    const double alphas[] = {0.5, 1.3, 2.7};
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 2 + trial % 2;
        PerturbationField p;
        p.b.assign(ball_mode_count(n, 4), 0.0);
        for (std::size_t i = n + 1; i < p.b.size(); ++i) p.b[i] = g(rng);
        const double alpha = alphas[trial % 3];
        analytic = std::max(analytic, std::abs(first_variation_ball(n, 1.0, alpha, p)));
        analytic = std::max(analytic, std::abs(second_variation_ball(n, 1.0, alpha, p).E_dot));
        if (n != 2) continue;
        // ρ_t = λ(t)(1 + tη) with η = v·ν on the unit circle, scaled to max|η| ≤ 1.
        TrigPolynomial eta;
        eta.cos_coeffs.assign(5, 0.0);
        eta.sin_coeffs.assign(5, 0.0);
        double amp = 0.0;
        for (int i = 3; i < static_cast<int>(p.b.size()); ++i) {
            const int k = ball_mode_degree(2, i);
            (i % 2 == 1 ? eta.cos_coeffs : eta.sin_coeffs)[k] = p.b[i];
            amp += std::abs(p.b[i]);
        }
        eta = eta.scaled(1.0 / amp);
        const FiniteDifferenceFit f = finite_difference_check(
            [&](double t) { return volume_corrected_star(eta, 1.0, t, 256); }, alpha, kFdGrid, EnergyMethod::Series, 4);
        fitted = std::max(fitted, std::abs(f.E_dot) / std::abs(ball_energy_formula(2, 1.0, alpha)));
    }
    return {analytic < 1e-12 && fitted < 1e-4, "50 fields: max analytic |E_dot| = " + fmt("%.2e", analytic) +
                                                   " (tol 1e-12), max fitted |E_dot|/|E| = " + fmt("%.2e", fitted) +
                                                   " (tol 1e-4, quartic fit)"};
}

struct Criterion {
    int id;
    const char* name;
    double limit_s;
    std::function<Outcome()> run;
};

}  // namespace

int main()
{
    kernels::apply_thread_cap_from_env();
    const std::vector<Criterion> list = {
        {1, "ball energy closed form", 1.0, criterion1},
        {2, "annulus series vs radial solve, poles", 5.0, criterion2},
        {3, "numeric disc Steklov spectrum", 10.0, criterion3},
        {4, "ellipse second variation", 60.0, criterion4},
        {5, "sign classification of d_i", 1.0, criterion5},
        {6, "small-alpha maximality bound", 1.0, criterion6},
        {7, "Payne-Weinberger bound", 120.0, criterion7},
        {8, "disc maximality on random corpus", 300.0, criterion8},
        {9, "crossover alpha0 on the ellipse", 60.0, criterion9},
        {10, "first variation vanishes", 30.0, criterion10},
    };
    int failures = 0;
    for (const Criterion& c : list) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = dt < c.limit_s;
        const bool pass = o.ok && in_time;
        if (!pass) ++failures;
        std::printf("[%s] %2d %s: %s; %.2f s (limit %g s)%s\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), dt,
                    c.limit_s, in_time ? "" : " TIMEOUT");
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(list.size()) - failures, list.size());
    return failures == 0 ? 0 : 1;
}
