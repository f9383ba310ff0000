#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "permspec/errors.hpp"
#include "permspec/laws.hpp"
#include "permspec/rng.hpp"
#include "permspec/special.hpp"

namespace permspec {

// Values of G (or any grid function) on the uniform grid x0 + i*h.
struct GridFunction {
    double x0 = 0.0;
    double h = 0.0;
    std::vector<double> values;
    double theta = 0.0;
    std::string method;

    double x_at(std::size_t i) const { return x0 + h * static_cast<double>(i); }

    double value_at(double x) const {  // linear interpolation
        const double t = (x - x0) / h;
        if (t <= 0) return values.front();
        const std::size_t i = static_cast<std::size_t>(t);
        if (i + 1 >= values.size()) return values.back();
        const double frac = t - static_cast<double>(i);
        return values[i] * (1.0 - frac) + values[i + 1] * frac;
    }
};

namespace detail {

// H on the initial layer (0, x_init]: x^{theta-1} (1 - x), the first-order
// expansion of the equation around G(0+) = 1, G'(0+) = -1. The linear term
// is what keeps the march second-order in h.
inline double layer_H(double theta, double u) { return std::pow(u, theta - 1.0) * (1.0 - u); }

// integral of u^{theta-1} (1 - u) (1 - x + u) over [u0, u1], u0 >= 0
inline double layer_kernel_integral(double theta, double x, double u0, double u1) {
    if (u1 <= u0) return 0.0;
    auto term = [&](double p) { return (std::pow(u1, p) - std::pow(u0, p)) / p; };
    // (1-u)(1-x+u) = (1-x) + u x - u^2
    return (1.0 - x) * term(theta) + x * term(theta + 1.0) - term(theta + 2.0);
}

// integral of (1 - x + u) * (c0 + slope*(u - ul)) over [a, b]
inline double linear_kernel_integral(double x, double ul, double c0, double slope, double a, double b) {
    const double A = 1.0 - x;
    const double B = c0 - slope * ul;
    auto anti = [&](double u) {
        return A * B * u + (A * slope + B) * u * u / 2.0 + slope * u * u * u / 3.0;
    };
    return anti(b) - anti(a);
}

}  // namespace detail

// Forward march for the convolution equation of H:
//   x H(x) = theta * int_0^1 (1-y) H(x-y) dy,   H = 0 on the negatives,
// with H(x) = x^{theta-1} G(x). The weakly singular layer x in (0, 10h]
// carries the small-x expansion G = 1 - x with the x^{theta-1} weight
// integrated in closed form; beyond it H is piecewise linear on the grid and
// each cell of the convolution window is integrated exactly (product
// integration).
inline GridFunction solve_volterra(double theta, double h, double x_max) {
    if (!(theta > 0)) throw parameter_error("solve_volterra: theta must be > 0");
    if (!(h > 0) || h > 1e-2) throw parameter_error("solve_volterra: need 0 < h <= 1e-2");
    if (!(x_max >= 1)) throw parameter_error("solve_volterra: x_max must be >= 1");

    const std::size_t n = static_cast<std::size_t>(std::llround(x_max / h));
    const std::size_t L = 10;  // layer cells
    const double x_init = h * static_cast<double>(L);
    std::vector<double> H(n + 1), G(n + 1);
    G[0] = 1.0;
    H[0] = 0.0;  // unused: the layer is handled analytically
    for (std::size_t i = 1; i <= std::min(L, n); ++i) {
        G[i] = 1.0 - h * static_cast<double>(i);
        H[i] = detail::layer_H(theta, h * static_cast<double>(i));
    }

    const double c_last = h / 2.0 - h * h / 6.0;  // coefficient of the unknown H_n
    for (std::size_t i = L + 1; i <= n; ++i) {
        const double x = h * static_cast<double>(i);
        const double lo = std::max(0.0, x - 1.0);
        double known = detail::layer_kernel_integral(theta, x, lo, std::min(x_init, x));
        const double a = std::max(x_init, lo);
        // first (possibly partial) grid cell
        std::size_t j = static_cast<std::size_t>(std::floor(a / h + 1e-9)) + 1;
        if (j < L + 1) j = L + 1;
        for (; j <= i; ++j) {
            const double ul = h * static_cast<double>(j - 1);
            const double left = std::max(a, ul);
            const double right = h * static_cast<double>(j);
            if (right <= left) continue;
            const double c0 = H[j - 1];
            if (j == i) {
                // unknown endpoint: split into the known H_{i-1} part and the
                // coefficient multiplying H_i
                known += detail::linear_kernel_integral(x, ul, c0, -c0 / h, left, right);
            } else {
                const double slope = (H[j] - c0) / h;
                known += detail::linear_kernel_integral(x, ul, c0, slope, left, right);
            }
        }
        const double denom = x - theta * c_last;
        if (denom <= 0) throw numerical_error("solve_volterra: unstable step (theta too large for h)");
        H[i] = theta * known / denom;
        G[i] = H[i] * std::pow(x, 1.0 - theta);
        if (G[i] > 1.0 + 1e-6 || G[i] < -1e-9 || G[i] > G[i - 1] + 1e-6)
            throw numerical_error("solve_volterra: march left [0,1] / monotonicity bounds");
        if (G[i] < 0.0) G[i] = 0.0;
    }

    GridFunction out;
    out.x0 = 0.0;
    out.h = h;
    out.values = std::move(G);
    out.theta = theta;
    out.method = "volterra";
    return out;
}

// Relative residual of a Volterra solution at x: the solution (layer +
// piecewise-linear nodes) substituted into the equation, the convolution
// integral re-evaluated with per-cell Simpson (independent of the marching
// code; exact for the quadratic per-cell integrand).
inline double volterra_residual(const GridFunction& g, double theta, double x) {
    if (g.method != "volterra") throw parameter_error("volterra_residual: needs a volterra solution");
    const double h = g.h;
    const std::size_t L = 10;
    const double x_init = h * static_cast<double>(L);
    auto H_of = [&](double u) -> double {
        if (u <= 0.0) return 0.0;
        if (u <= x_init) return detail::layer_H(theta, u);
        const double t = u / h;
        std::size_t i = static_cast<std::size_t>(t);
        if (i + 1 >= g.values.size()) i = g.values.size() - 2;
        auto H_node = [&](std::size_t idx) {
            return g.values[idx] * std::pow(h * static_cast<double>(idx), theta - 1.0);
        };
        const double frac = t - static_cast<double>(i);
        return H_node(i) * (1.0 - frac) + H_node(i + 1) * frac;
    };
    const double lo = std::max(0.0, x - 1.0);
    double integral = 0.0;
    if (lo < x_init) {
        const double hi = std::min(x_init, x);
        integral += detail::layer_kernel_integral(theta, x, lo, hi);
    }
    const double a = std::max(lo, x_init);
    std::size_t j = static_cast<std::size_t>(std::floor(a / h + 1e-9)) + 1;
    while (true) {
        const double left = std::max(a, h * static_cast<double>(j - 1));
        const double right = std::min(x, h * static_cast<double>(j));
        if (right <= left) {
            if (left >= x) break;
            ++j;
            continue;
        }
        const double m = 0.5 * (left + right);
        auto f = [&](double u) { return (1.0 - (x - u)) * H_of(u); };
        integral += (right - left) / 6.0 * (f(left) + 4.0 * f(m) + f(right));
        if (right >= x) break;
        ++j;
    }
    const double lhs = x * H_of(x);
    return std::fabs(lhs - theta * integral) / std::max(std::fabs(lhs), 1e-300);
}

// Fourier route: the transform satisfies
//   FT(lambda) = FT(0) exp(-i theta int_0^lambda (1 - e^{-i mu} - i mu)/mu^2 dmu)
// with FT(0) = Gamma(theta) e^{-theta (1 - gamma_Euler)} fixed by the
// high-frequency asymptote FT(lambda) ~ Gamma(theta) (i lambda)^{-theta},
// which is the transform-side statement of G(0+) = 1. Inversion subtracts
// Gamma(theta)(1+i lambda)^{-theta} (the transform of x^{theta-1} e^{-x}),
// leaving an O(lambda^{-2-theta}) integrand handled by Simpson.
inline GridFunction fourier_gap(double theta, double lambda_max, std::size_t n_freq, double x_max,
                                double h) {
    if (!(theta > 0)) throw parameter_error("fourier_gap: theta must be > 0");
    if (!(lambda_max > 10) || n_freq < 100) throw parameter_error("fourier_gap: grid too coarse");
    if (!(h > 0) || !(x_max > h)) throw parameter_error("fourier_gap: bad output grid");
    if (n_freq % 2 == 1) ++n_freq;
    const double dl = lambda_max / static_cast<double>(n_freq);
    if (dl * x_max > 0.5)
        throw numerical_error("fourier_gap: n_freq too small to resolve oscillations at x_max");

    // g(mu) with the removable singularity at 0 replaced by its series
    auto g_fn = [](double mu) -> std::complex<double> {
        if (std::fabs(mu) < 1e-4) {
            const double m2 = mu * mu;
            return {0.5 - m2 / 24.0 + m2 * m2 / 720.0, -mu / 6.0 + mu * m2 / 120.0};
        }
        return {(1.0 - std::cos(mu)) / (mu * mu), (std::sin(mu) - mu) / (mu * mu)};
    };

    // cumulative psi on the frequency grid (4-point Gauss-Legendre per step)
    static const double gx[2] = {0.3399810435848563, 0.8611363115940526};
    static const double gw[2] = {0.6521451548625461, 0.3478548451374538};
    std::vector<std::complex<double>> W(n_freq + 1);
    const double h0 = std::exp(std::lgamma(theta) - theta * (1.0 - EULER_GAMMA));  // FT(0)
    std::complex<double> psi = 0.0;
    for (std::size_t i = 0; i <= n_freq; ++i) {
        const double lam = dl * static_cast<double>(i);
        if (i > 0) {
            const double c = lam - 0.5 * dl, r = 0.5 * dl;
            std::complex<double> acc = 0.0;
            for (int k = 0; k < 2; ++k)
                acc += gw[k] * (g_fn(c - r * gx[k]) + g_fn(c + r * gx[k]));
            psi += acc * r;
        }
        const std::complex<double> ft = h0 * std::exp(std::complex<double>(0.0, -theta) * psi);
        const std::complex<double> sing =
            std::exp(std::lgamma(theta)) * std::pow(std::complex<double>(1.0, lam), -theta);
        W[i] = ft - sing;
    }

    // truncation error in G from the |W| ~ C lambda^{-2-theta} tail
    {
        const double wmax = std::abs(W[n_freq]);
        const double tail_H = wmax * lambda_max / (1.0 + theta);     // integral of the envelope
        const double x_star = 2.0 * (1.0 + theta) / lambda_max;      // worst window in x
        const double tail_G = std::pow(x_star, 1.0 - theta) * tail_H / PI;
        if (tail_G > 1e-3) {
            char buf[128];
            std::snprintf(buf, sizeof buf, "fourier_gap: lambda_max too small, tail estimate %.3g", tail_G);
            throw numerical_error(buf);
        }
    }

    const std::size_t nx = static_cast<std::size_t>(std::llround(x_max / h));
    GridFunction out;
    out.x0 = 0.0;
    out.h = h;
    out.theta = theta;
    out.method = "fourier";
    out.values.resize(nx + 1);
    out.values[0] = 1.0;
    for (std::size_t j = 1; j <= nx; ++j) {
        const double x = h * static_cast<double>(j);
        // Simpson over lambda with a rotation recurrence for e^{i lambda x}
        const double cd = std::cos(dl * x), sd = std::sin(dl * x);
        double cr = 1.0, si = 0.0;
        double acc = 0.0;
        for (std::size_t i = 0; i <= n_freq; ++i) {
            const double re = cr * W[i].real() - si * W[i].imag();
            const double w = (i == 0 || i == n_freq) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
            acc += w * re;
            const double cr2 = cr * cd - si * sd;
            si = cr * sd + si * cd;
            cr = cr2;
        }
        const double corr = acc * dl / 3.0 / PI;
        // inversion noise (below the tail estimate) can stray outside the
        // admissible range of a survival function; clip it
        out.values[j] = std::clamp(std::exp(-x) + std::pow(x, 1.0 - theta) * corr, 0.0, 1.0);
    }
    return out;
}

// One draw of the smallest positive point of the limit process in the
// uniform case: min_m chi_m / y_m over GEM(theta) sticks, chi_m uniform.
// A truncated tail stick of weight y pushes the minimum below x only with
// probability <= x*y, so the missed-event probability at level x is at most
// x * tail_mass.
inline double sample_smallest_gap(double theta, RandomStream& stream, double tol = 1e-12) {
    if (!(theta > 0)) throw parameter_error("sample_smallest_gap: theta must be > 0");
    double remaining = 1.0;
    const double inv_theta = 1.0 / theta;
    double best = std::numeric_limits<double>::infinity();
    while (remaining >= tol) {
        const double b = 1.0 - std::pow(stream.u01_open(), inv_theta);
        const double y = remaining * b;
        remaining *= (1.0 - b);
        const double chi = stream.u01();
        const double v = chi / y;
        if (v < best) best = v;
    }
    return best;
}

inline std::vector<double> mc_gap_samples(double theta, std::size_t n, double tol,
                                          RandomStream& stream) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = sample_smallest_gap(theta, stream, tol);
    return out;
}

// Empirical survival function of the smallest positive point on a grid.
inline GridFunction mc_gap(double theta, std::size_t n_samples, double tol, double h, double x_max,
                           RandomStream& stream) {
    if (!(h > 0) || !(x_max > 0)) throw parameter_error("mc_gap: bad grid");
    std::vector<double> samples = mc_gap_samples(theta, n_samples, tol, stream);
    std::sort(samples.begin(), samples.end());
    const std::size_t nx = static_cast<std::size_t>(std::llround(x_max / h));
    GridFunction out;
    out.x0 = 0.0;
    out.h = h;
    out.theta = theta;
    out.method = "mc";
    out.values.resize(nx + 1);
    for (std::size_t i = 0; i <= nx; ++i) {
        const double x = h * static_cast<double>(i);
        const auto it = std::lower_bound(samples.begin(), samples.end(), x);
        out.values[i] =
            static_cast<double>(samples.end() - it) / static_cast<double>(n_samples);
    }
    return out;
}

}  // namespace permspec
