#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include "permspec/errors.hpp"
#include "permspec/special.hpp"

namespace permspec {

// CDF of the standard symmetric alpha-stable law normalized so that the
// characteristic function is exp(-|t|^alpha). alpha=2 is N(0,2), alpha=1 is
// the standard Cauchy.
//
// General alpha combines three routes, picked by tracked error bounds:
//   center:  F(x) - 1/2 = (1/(pi a)) sum_n (-1)^n G((2n+1)/a) x^(2n+1)/(2n+1)!
//            (convergent for a > 1, optimally truncated for a < 1)
//   tail:    P(S > x) = (1/pi) sum_k (-1)^(k+1) G(k a)/k! sin(k pi a/2) x^(-k a)
//            (convergent for a < 1, asymptotic for a > 1)
//   quadrature of the inversion integral for what the series miss.

namespace detail {

struct SeriesResult {
    double value = 0.0;      // F(x) - 1/2, or the tail probability
    double abs_error = 1e9;  // estimated absolute error
};

inline SeriesResult stable_center_series(double x, double alpha) {
    const double ax = std::fabs(x);
    if (ax == 0) return {0.0, 0.0};
    const double lx = std::log(ax);
    double sum = 0.0, prev_mag = std::numeric_limits<double>::infinity();
    double max_mag = 0.0;
    for (int n = 0; n < 400; ++n) {
        const double m = 2.0 * n + 1.0;
        const double lt = std::lgamma(m / alpha) + m * lx - std::lgamma(m + 1.0);
        if (lt > 600.0) return {sum / (PI * alpha), 1e9};
        const double mag = std::exp(lt);
        if (mag > prev_mag) {
            // past the optimal truncation point
            return {sum / (PI * alpha), (prev_mag + 1e-16 * max_mag) / (PI * alpha)};
        }
        sum += ((n & 1) ? -mag : mag);
        max_mag = std::max(max_mag, mag);
        if (mag < 1e-17 * std::max(1e-300, std::fabs(sum))) {
            return {sum / (PI * alpha), (mag + 1e-16 * max_mag) / (PI * alpha)};
        }
        prev_mag = mag;
    }
    return {sum / (PI * alpha), 1e9};
}

// Tail probability P(S > x), x > 0. Terms with sin = 0 are skipped; the
// termination and divergence checks use the sin-free magnitude bound.
inline SeriesResult stable_tail_series(double x, double alpha) {
    const double lx = std::log(x);
    double sum = 0.0, max_mag = 0.0, prev_bound = std::numeric_limits<double>::infinity();
    for (int k = 1; k < 600; ++k) {
        const double lt = std::lgamma(k * alpha) - std::lgamma(k + 1.0) - k * alpha * lx;
        if (lt > 600.0) return {sum / PI, 1e9};  // would overflow before decaying
        const double bound = std::exp(lt);
        if (alpha >= 1.0 && bound > prev_bound) {
            return {sum / PI, (prev_bound + 1e-16 * max_mag) / PI};  // asymptotic truncation
        }
        const double s = std::sin(0.5 * k * PI * alpha);
        const double term = bound * s;
        sum += ((k & 1) ? term : -term);
        max_mag = std::max(max_mag, bound);
        if (bound < 1e-17 * std::max(1e-300, std::fabs(sum)))
            return {sum / PI, (bound + 1e-16 * max_mag) / PI};
        prev_bound = bound;
    }
    return {sum / PI, 1e-16 * max_mag / PI + 1e-14};
}

// F(b)-F(a) = (1/pi) int_0^inf (sin(bt)-sin(at))/t e^{-t^alpha} dt by
// composite Gauss-Legendre; effective for alpha >= 1 where e^{-t^alpha}
// truncates quickly.
inline double stable_quadrature_t(double a, double b, double alpha) {
    static const double gl_x[8] = {0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
                                   0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
                                   0.9445750230732326, 0.9894009349916499};
    static const double gl_w[8] = {0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
                                   0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
                                   0.0622535239386479, 0.0271524594117541};
    const double t_end = std::pow(42.0, 1.0 / alpha);
    const double xmax = std::max(std::fabs(a), std::fabs(b));
    const double width = std::min(0.5, PI / (4.0 * xmax + 1.0));
    double total = 0.0;
    for (double t0 = 0.0; t0 < t_end; t0 += width) {
        const double t1 = std::min(t0 + width, t_end);
        const double c = 0.5 * (t0 + t1), h = 0.5 * (t1 - t0);
        double panel = 0.0;
        for (int i = 0; i < 8; ++i) {
            for (int sgn = -1; sgn <= 1; sgn += 2) {
                const double t = c + sgn * h * gl_x[i];
                panel += gl_w[i] * ((std::sin(b * t) - std::sin(a * t)) / t * std::exp(-std::pow(t, alpha)));
            }
        }
        total += panel * h;
    }
    return total / PI;
}

// F(x)-1/2 for alpha < 1 via the substitution u = t^alpha:
//   (1/(pi a)) int_0^45 sin(x u^{1/a}) e^{-u} / u du,
// dyadic blocks sized to the local oscillation rate. Returns an error bound;
// gives up (large error) if the oscillation budget explodes.
inline SeriesResult stable_quadrature_u(double x, double alpha) {
    static const double gl_x[4] = {0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                                   0.9602898564975363};
    static const double gl_w[4] = {0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                                   0.1012285362903763};
    const double inv_a = 1.0 / alpha;
    double total = 0.0;
    double hi = 45.0;
    long budget = 400000;
    while (hi > 1e-8) {
        const double lo = hi * 0.5;
        const double rate = (x * inv_a) * std::pow(hi, inv_a - 1.0);
        const double width = std::min(0.25 * (hi - lo), PI / (4.0 * rate + 1.0));
        const long panels = static_cast<long>(std::ceil((hi - lo) / width));
        budget -= panels;
        if (budget < 0) return {0.0, 1e9};
        const double w = (hi - lo) / static_cast<double>(panels);
        for (long p = 0; p < panels; ++p) {
            const double c = lo + (static_cast<double>(p) + 0.5) * w, h = 0.5 * w;
            double panel = 0.0;
            for (int i = 0; i < 4; ++i) {
                for (int sgn = -1; sgn <= 1; sgn += 2) {
                    const double u = c + sgn * h * gl_x[i];
                    panel += gl_w[i] * (std::sin(x * std::pow(u, inv_a)) * std::exp(-u) / u);
                }
            }
            total += panel * h;
        }
        hi = lo;
        // remaining left piece is bounded by x * integral of u^{1/a - 1}
        if (x * std::pow(hi, inv_a) < 1e-17) break;
    }
    const double left_bound = std::fabs(x) * alpha * std::pow(hi, inv_a);
    return {total / (PI * alpha), left_bound + 1e-13};
}

// F(x) for x >= 0 with an error estimate.
inline SeriesResult stable_cdf_positive(double x, double alpha) {
    if (x == 0.0) return {0.5, 0.0};
    SeriesResult center = stable_center_series(x, alpha);
    SeriesResult best{0.5 + center.value, center.abs_error};
    if (best.abs_error < 1e-13) return best;
    SeriesResult tail = stable_tail_series(x, alpha);
    if (tail.abs_error < best.abs_error) best = {1.0 - tail.value, tail.abs_error};
    if (best.abs_error < 1e-11) return best;
    if (alpha > 1.0) {
        return {0.5 + stable_quadrature_t(0.0, x, alpha), 1e-12};
    }
    SeriesResult quad = stable_quadrature_u(x, alpha);
    if (quad.abs_error < best.abs_error) best = {0.5 + quad.value, quad.abs_error};
    return best;
}

}  // namespace detail

inline double stable_cdf(double x, double alpha) {
    if (!(alpha > 0.0) || !(alpha <= 2.0)) throw parameter_error("stable_cdf: alpha must be in (0,2]");
    if (alpha == 2.0) return 0.5 * std::erfc(-x / 2.0);
    if (alpha == 1.0) return 0.5 + std::atan(x) / PI;
    if (x == 0.0) return 0.5;
    const auto f = detail::stable_cdf_positive(std::fabs(x), alpha);
    return x > 0 ? f.value : 1.0 - f.value;
}

// P(a < S <= b), with a cancellation-free series for narrow intervals near
// the origin (the regime the L_k decay computations live in).
inline double stable_interval_prob(double a, double b, double alpha) {
    if (b < a) std::swap(a, b);
    if (!(alpha > 0.0) || !(alpha <= 2.0))
        throw parameter_error("stable_interval_prob: alpha must be in (0,2]");
    if (a == b) return 0.0;
    if (alpha == 2.0 || alpha == 1.0) return stable_cdf(b, alpha) - stable_cdf(a, alpha);
    const double m = std::max(std::fabs(a), std::fabs(b));
    {
        // term-wise difference of the center series
        const double lx = std::log(m);
        double sum = 0.0, prev_bound = std::numeric_limits<double>::infinity();
        for (int n = 0; n < 400; ++n) {
            const double mm = 2.0 * n + 1.0;
            const double lt = std::lgamma(mm / alpha) - std::lgamma(mm + 1.0);
            if (lt + mm * lx > 600.0) break;
            const double bound = std::exp(lt + mm * lx);
            if (bound > prev_bound) break;  // divergence onset: not converged, give up
            const double term = std::exp(lt) * (std::pow(b, mm) - std::pow(a, mm));
            sum += ((n & 1) ? -term : term);
            if (bound < 1e-17 * std::max(1e-300, std::fabs(sum)) || bound < 1e-25)
                return sum / (PI * alpha);
            prev_bound = bound;
        }
    }
    return stable_cdf(b, alpha) - stable_cdf(a, alpha);
}

}  // namespace permspec
