#include "robinlab/kernels.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

#include <omp.h>

#include "robinlab/geometry.hpp"

namespace robinlab::kernels {

int apply_thread_cap_from_env()
{
    const char* env = std::getenv("ROBINLAB_THREADS");
    if (env == nullptr || *env == '\0') return 0;
    const int cap = std::atoi(env);
    if (cap <= 0) return 0;
    omp_set_num_threads(cap);
    return cap;
}

namespace {

double pairwise_rec(const double* v, std::size_t n)
{
    if (n <= 16) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += v[i];
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_rec(v, half) + pairwise_rec(v + half, n - half);
}

}  // namespace

double pairwise_sum(std::span<const double> v) { return pairwise_rec(v.data(), v.size()); }

double pairwise_dot(std::span<const double> a, std::span<const double> b)
{
    if (a.size() != b.size()) throw ValidationError("pairwise_dot: size mismatch");
    std::vector<double> p(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) p[i] = a[i] * b[i];
    return pairwise_sum(p);
}

std::vector<double> kress_log_weights(int nodes)
{
    if (nodes % 2 != 0) throw ValidationError("kress_log_weights: node count must be even");
    const int N = nodes / 2;
    std::vector<double> w(nodes);
    for (int m = 0; m < nodes; ++m) {
        const double d = kPi * m / N;
        double s = 0.0;
        for (int k = 1; k < N; ++k) s += std::cos(k * d) / k;
        w[m] = -(2.0 * kPi / N) * s - (kPi / (static_cast<double>(N) * N)) * std::cos(N * d);
    }
    return w;
}

Eigen::MatrixXd single_layer_matrix(const BoundaryGrid& g, Exec exec)
{
    const int M = g.size();
    const double h = 2.0 * kPi / M;
    const std::vector<double> w = kress_log_weights(M);
    Eigen::MatrixXd S(M, M);
    for_each_index(M, exec, [&](int i) {
        for (int j = 0; j < M; ++j) {
            double smooth;
            if (i == j) {
                smooth = std::log(g.speed[i] * g.speed[i]);
            } else {
                const double dx = g.x[i] - g.x[j], dy = g.y[i] - g.y[j];
                const double sn = std::sin(0.5 * (g.theta[i] - g.theta[j]));
                smooth = std::log((dx * dx + dy * dy) / (4.0 * sn * sn));
            }
            const int m = ((i - j) % M + M) % M;
            S(i, j) = -(w[m] + h * smooth) / (4.0 * kPi);
        }
    });
    return S;
}

Eigen::MatrixXd adjoint_double_layer_matrix(const BoundaryGrid& g, Exec exec)
{
    const int M = g.size();
    const double h = 2.0 * kPi / M;
    Eigen::MatrixXd K(M, M);
    for_each_index(M, exec, [&](int i) {
        for (int j = 0; j < M; ++j) {
            double k;
            if (i == j) {
                k = 0.5 * g.curvature[i];
            } else {
                const double dx = g.x[i] - g.x[j], dy = g.y[i] - g.y[j];
                k = (dx * g.nx[i] + dy * g.ny[i]) / (dx * dx + dy * dy);
            }
            K(i, j) = -h * k / (2.0 * kPi);
        }
    });
    return K;
}

Eigen::MatrixXd single_layer_eval_matrix(const BoundaryGrid& g, std::span<const double> px,
                                         std::span<const double> py, Exec exec)
{
    const int M = g.size();
    const int P = static_cast<int>(px.size());
    const double h = 2.0 * kPi / M;
    Eigen::MatrixXd E(P, M);
    for_each_index(P, exec, [&](int p) {
        for (int j = 0; j < M; ++j) {
            const double dx = px[p] - g.x[j], dy = py[p] - g.y[j];
            E(p, j) = -h * 0.5 * std::log(dx * dx + dy * dy) / (2.0 * kPi);
        }
    });
    return E;
}

TrigInterpolant trig_interpolant(std::span<const double> f)
{
    const int M = static_cast<int>(f.size());
    const int half = M / 2;
    TrigInterpolant out;
    out.a.assign(half + 1, 0.0);
    out.b.assign(half + 1, 0.0);
    std::vector<double> c(M), s(M);
    for (int k = 0; k <= half; ++k) {
        for (int j = 0; j < M; ++j) {
            const double th = 2.0 * kPi * j / M;
            c[j] = f[j] * std::cos(k * th);
            s[j] = f[j] * std::sin(k * th);
        }
        const double scale = (k == 0 || (M % 2 == 0 && k == half)) ? 1.0 / M : 2.0 / M;
        out.a[k] = pairwise_sum(c) * scale;
        out.b[k] = (M % 2 == 0 && k == half) ? 0.0 : pairwise_sum(s) * scale;
    }
    return out;
}

double TrigInterpolant::operator()(double theta) const
{
    double v = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) v += a[k] * std::cos(k * theta) + b[k] * std::sin(k * theta);
    return v;
}

std::vector<double> spectral_derivative(std::span<const double> f)
{
    const int M = static_cast<int>(f.size());
    const TrigInterpolant p = trig_interpolant(f);
    const int half = M / 2;
    std::vector<double> df(M);
    for (int j = 0; j < M; ++j) {
        const double th = 2.0 * kPi * j / M;
        double v = 0.0;
        // The Nyquist cosine mode has no resolvable derivative on the grid.
        for (int k = 1; k < static_cast<int>(p.a.size()); ++k) {
            if (M % 2 == 0 && k == half) continue;
            v += k * (-p.a[k] * std::sin(k * th) + p.b[k] * std::cos(k * th));
        }
        df[j] = v;
    }
    return df;
}

}  // namespace robinlab::kernels
