// Dense reference constructions used by the unit and acceptance tests.
// Everything here is built from the model definitions directly and does not
// call the library's operators.
#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace oracle {

using Matrix = std::vector<std::vector<double>>;

inline Matrix zeros(std::size_t n)
{
    return Matrix(n, std::vector<double>(n, 0.0));
}

inline Matrix identity(std::size_t n)
{
    Matrix m = zeros(n);
    for (std::size_t i = 0; i < n; ++i)
        m[i][i] = 1.0;
    return m;
}

inline Matrix transpose(const Matrix& a)
{
    Matrix t = zeros(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a.size(); ++j)
            t[j][i] = a[i][j];
    return t;
}

inline Matrix axpby(double x, const Matrix& a, double y, const Matrix& b)
{
    Matrix out = zeros(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a.size(); ++j)
            out[i][j] = x * a[i][j] + y * b[i][j];
    return out;
}

inline std::vector<double> matvec(const Matrix& a, const std::vector<double>& x)
{
    std::vector<double> y(a.size(), 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        long double s = 0.0L;
        for (std::size_t j = 0; j < x.size(); ++j)
            s += static_cast<long double>(a[i][j]) * x[j];
        y[i] = static_cast<double>(s);
    }
    return y;
}

inline Matrix matmul(const Matrix& a, const Matrix& b)
{
    const std::size_t n = a.size();
    Matrix c = zeros(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t j = 0; j < n; ++j)
                c[i][j] += a[i][k] * b[k][j];
    return c;
}

/// Gaussian elimination with partial pivoting.
inline std::vector<double> solve(Matrix a, std::vector<double> b)
{
    const std::size_t n = a.size();
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(a[i][k]) > std::abs(a[piv][k]))
                piv = i;
        if (a[piv][k] == 0.0)
            throw std::runtime_error("oracle::solve: singular");
        std::swap(a[k], a[piv]);
        std::swap(b[k], b[piv]);
        for (std::size_t i = k + 1; i < n; ++i) {
            double f = a[i][k] / a[k][k];
            for (std::size_t j = k; j < n; ++j)
                a[i][j] -= f * a[k][j];
            b[i] -= f * b[k];
        }
    }
    std::vector<double> x(n);
    for (std::size_t k = n; k-- > 0;) {
        double s = b[k];
        for (std::size_t j = k + 1; j < n; ++j)
            s -= a[k][j] * x[j];
        x[k] = s / a[k][k];
    }
    return x;
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b)
{
    long double s = 0.0L;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += static_cast<long double>(a[i]) * b[i];
    return static_cast<double>(s);
}

/// Chang-Cooper weight straight from its definition, in long double.
inline double cc_weight(double w)
{
    long double x = w;
    return static_cast<double>(1.0L / x - 1.0L / std::expm1(x));
}

/// Matrix of df_i/dt = (F_{i+1/2} - F_{i-1/2})/h with the Chang-Cooper
/// flux F_{i+1/2} = B((1-delta) f_{i+1} + delta f_i) + C (f_{i+1} - f_i)/h,
/// B = -b, C = sigma^2/2, assembled cell by cell on a periodic grid.
inline Matrix chang_cooper(std::size_t n, double h, double b, double sigma2)
{
    const double B = -b;
    const double C = 0.5 * sigma2;
    const double w = h * B / C;
    const double delta = std::abs(w) < 1e-6 ? 0.5 - w / 12.0 : cc_weight(w);
    Matrix a = zeros(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t ip = (i + 1) % n;
        std::size_t im = (i + n - 1) % n;
        // + F_{i+1/2} / h
        a[i][ip] += (B * (1.0 - delta) + C / h) / h;
        a[i][i] += (B * delta - C / h) / h;
        // - F_{i-1/2} / h, where F_{i-1/2} couples f_i and f_{i-1}
        a[i][i] -= (B * (1.0 - delta) + C / h) / h;
        a[i][im] -= (B * delta - C / h) / h;
    }
    return a;
}

/// Hat of half-width delta centered at theta on a torus of period K.
inline double torus_hat(double s, double theta, double delta, double period)
{
    double best = 0.0;
    for (int n = -3; n <= 3; ++n) {
        double r = std::abs(s + n * period - theta);
        best = std::max(best, 1.0 - r / delta);
    }
    return best;
}

/// Jump operator as a dense matrix: a jump of size s_k = k*h (k = 0..N-1,
/// read on the torus) moves mass from x_{i-k} to x_i at rate h*nu(s_k).
inline Matrix jump_matrix(std::size_t n, double h, double period, const std::vector<double>& alpha,
                          const std::vector<double>& centers, double delta)
{
    Matrix q = zeros(n);
    for (std::size_t k = 1; k < n; ++k) {
        double s = static_cast<double>(k) * h;
        double nu = 0.0;
        for (std::size_t j = 0; j < alpha.size(); ++j)
            nu += alpha[j] * torus_hat(s, centers[j], delta, period);
        double rate = h * nu;
        for (std::size_t i = 0; i < n; ++i) {
            q[i][(i + n - k) % n] += rate;
            q[(i + n - k) % n][(i + n - k) % n] -= rate;
        }
    }
    return q;
}

/// K implicit Euler substeps followed by IMEX BDF2, all with dense solves.
/// Returns every level f^0..f^{N_T}.
inline std::vector<std::vector<double>> forward_scheme(const std::vector<double>& f0, const Matrix& a,
                                                       const Matrix& q, double dt, std::size_t n_time,
                                                       std::size_t substeps)
{
    const std::size_t n = f0.size();
    const double tau = dt / static_cast<double>(substeps);
    const Matrix euler = axpby(1.0, identity(n), -tau, a);
    const Matrix bdf2 = axpby(3.0, identity(n), -2.0 * dt, a);
    std::vector<std::vector<double>> levels{f0};
    std::vector<double> g = f0;
    for (std::size_t s = 0; s < substeps; ++s) {
        std::vector<double> qg = matvec(q, g);
        for (std::size_t i = 0; i < n; ++i)
            qg[i] = g[i] + tau * qg[i];
        g = solve(euler, qg);
    }
    levels.push_back(g);
    for (std::size_t m = 1; m < n_time; ++m) {
        const auto& fm = levels[m];
        const auto& fmm = levels[m - 1];
        std::vector<double> rhs = matvec(q, fm);
        for (std::size_t i = 0; i < n; ++i)
            rhs[i] = 4.0 * fm[i] - fmm[i] + 2.0 * dt * rhs[i];
        levels.push_back(solve(bdf2, rhs));
    }
    return levels;
}

/// Dense linear map f^0 -> f^{N_T} of the scheme above.
inline Matrix solution_operator(std::size_t n, const Matrix& a, const Matrix& q, double dt, std::size_t n_time,
                                std::size_t substeps)
{
    Matrix s = zeros(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::vector<double> e(n, 0.0);
        e[k] = 1.0;
        auto levels = forward_scheme(e, a, q, dt, n_time, substeps);
        for (std::size_t i = 0; i < n; ++i)
            s[i][k] = levels.back()[i];
    }
    return s;
}

}  // namespace oracle
